import math

import mpmath
import numpy as np
import pytest

from singopt.blocked import BlockPartition, BlockedVector, from_blocks
from singopt.optimizers import (
    ConfigError,
    HostOptimizerConfig,
    LookAheadConfig,
    OptimizerState,
    Schedule,
    SingPipelineConfig,
    apply_weight_decay,
    host_update,
    lookahead_step,
    lr_at,
    softplus,
    step,
)
from singopt.standardize import StandardizeConfig

PART = BlockPartition.of([("w", (3,))])


def vec(*vals):
    return BlockedVector(np.array(vals, dtype=np.float64), PART)


# -- schedules ----------------------------------------------------------------

def test_lr_warmup_reaches_base_at_last_warmup_step():
    s = Schedule(kind="cosine", base_lr=0.3, warmup_steps=5, total_steps=100)
    assert lr_at(s, 4) == 0.3
    assert lr_at(s, 0) == pytest.approx(0.3 / 5)


def test_lr_cosine_starts_at_base_after_warmup():
    s = Schedule(kind="cosine", base_lr=0.3, warmup_steps=5, total_steps=100)
    assert lr_at(s, 5) == pytest.approx(0.3, rel=1e-15)


def test_lr_cosine_midpoint_is_half():
    s = Schedule(kind="cosine", base_lr=0.4, warmup_steps=10, total_steps=110)
    mid = 10 + (110 - 10) // 2
    assert lr_at(s, mid) == pytest.approx(0.2, rel=1e-12)


def test_lr_constant_after_warmup():
    s = Schedule(kind="constant", base_lr=0.7, warmup_steps=2, total_steps=10)
    assert lr_at(s, 2) == 0.7
    assert lr_at(s, 9) == 0.7


def test_lr_out_of_range():
    s = Schedule(kind="constant", base_lr=0.1, warmup_steps=0, total_steps=10)
    with pytest.raises(ValueError):
        lr_at(s, 10)
    with pytest.raises(ValueError):
        lr_at(s, -1)


def test_schedule_validation():
    with pytest.raises(ConfigError):
        Schedule(kind="cosine", base_lr=0.1, warmup_steps=10, total_steps=10)
    with pytest.raises(ConfigError):
        Schedule(kind="cosine", base_lr=0.1, warmup_steps=0, total_steps=0)
    with pytest.raises(ConfigError):
        Schedule(kind="sawtooth", base_lr=0.1, warmup_steps=0, total_steps=10)


# -- weight decay ---------------------------------------------------------------

def test_weight_decay_zero_is_identity():
    p = vec(1.0, -2.0, 3.0)
    cfg = SingPipelineConfig(weight_decay=0.0)
    out = apply_weight_decay(p, 0.1, cfg)
    assert np.array_equal(out.values, p.values)


def test_weight_decay_shrinks():
    p = vec(1.0, 1.0, 1.0)
    cfg = SingPipelineConfig(weight_decay=0.5)
    out = apply_weight_decay(p, 0.1, cfg)
    assert np.allclose(out.values, 0.95)


def test_weight_decay_skips_named_blocks():
    part = BlockPartition.of([("w", (2,)), ("b", (2,))])
    p = from_blocks(part, [np.ones(2), np.ones(2)])
    cfg = SingPipelineConfig(weight_decay=0.5, weight_decay_skip=frozenset({"b"}))
    out = apply_weight_decay(p, 0.1, cfg)
    assert np.allclose(out.block_flat(0), 0.95)
    assert np.array_equal(out.block_flat(1), np.ones(2))


def test_weight_decay_sign_flip_rejected():
    cfg = SingPipelineConfig(weight_decay=2.0)
    with pytest.raises(ConfigError, match="flip"):
        apply_weight_decay(vec(1.0, 1.0, 1.0), 1.0, cfg)


# -- softplus -------------------------------------------------------------------

def test_softplus_beta50_at_one():
    val = float(softplus(1.0, 50.0))
    assert 1.0 <= val <= 1.0 + 1e-20


def test_softplus_matches_high_precision_oracle():
    mpmath.mp.dps = 60
    for x, beta in [(0.3, 5.0), (0.0, 50.0), (-0.2, 10.0), (2.5, 50.0)]:
        expected = float(mpmath.log(1 + mpmath.e ** (beta * x)) / beta)
        assert float(softplus(x, beta)) == pytest.approx(expected, rel=1e-14)


def test_softplus_bounded_below_and_monotone():
    xs = np.linspace(-3, 3, 101)
    ys = softplus(xs, 50.0)
    assert np.all(ys > 0)
    assert np.all(np.diff(ys) >= 0)


# -- host updates ----------------------------------------------------------------

def test_sgd_momentum_zero_returns_gradient_exactly():
    g = vec(0.5, -1.0, 2.0)
    state = OptimizerState(vec(0.0, 0.0, 0.0))
    cfg = HostOptimizerConfig(kind="sgd", momentum=0.0)
    out = host_update(g, state, cfg)
    assert np.array_equal(out.values, g.values)
    assert state.t == 1


def test_sgd_momentum_accumulates():
    g = vec(1.0, 0.0, 0.0)
    state = OptimizerState(vec(0.0, 0.0, 0.0))
    cfg = HostOptimizerConfig(kind="sgd", momentum=0.5)
    host_update(g, state, cfg)
    out = host_update(g, state, cfg)
    assert out.values[0] == pytest.approx(1.5)  # 0.5 * 1 + 1
    assert state.t == 2


def test_adamw_first_step_is_sign_like():
    # one-step hand computation: m_hat = g, v_hat = g^2
    g = vec(0.3, -0.02, 5.0)
    state = OptimizerState(vec(0.0, 0.0, 0.0))
    cfg = HostOptimizerConfig(kind="adamw")
    out = host_update(g, state, cfg)
    expected = g.values / (np.abs(g.values) + cfg.eps_opt)
    np.testing.assert_allclose(out.values, expected, rtol=1e-12)
    np.testing.assert_allclose(out.values, np.sign(g.values), rtol=1e-6)


def test_adabelief_first_step_hand_computation():
    # m = (1-b1) g, v = (1-b2) (g - m)^2 = (1-b2) b1^2 g^2
    # => update = g / (b1 |g| + eps)
    g = vec(0.4, -1.2, 0.05)
    state = OptimizerState(vec(0.0, 0.0, 0.0))
    cfg = HostOptimizerConfig(kind="adabelief")
    out = host_update(g, state, cfg)
    expected = g.values / (cfg.beta1 * np.abs(g.values) + cfg.eps_opt)
    np.testing.assert_allclose(out.values, expected, rtol=1e-12)


def test_adamw_softplus_branch_replaces_denominator():
    g = vec(0.3, -0.02, 5.0)
    state = OptimizerState(vec(0.0, 0.0, 0.0))
    cfg = HostOptimizerConfig(kind="adamw", softplus_enabled=True, softplus_beta=5.0)
    out = host_update(g, state, cfg)
    expected = g.values / softplus(np.abs(g.values), 5.0)
    np.testing.assert_allclose(out.values, expected, rtol=1e-12)


def test_host_config_validation():
    with pytest.raises(ConfigError):
        HostOptimizerConfig(kind="adagrad")
    with pytest.raises(ConfigError):
        HostOptimizerConfig(beta1=1.0)
    with pytest.raises(ConfigError):
        HostOptimizerConfig(eps_opt=0.0)


# -- lookahead --------------------------------------------------------------------

def test_lookahead_alpha_one_copies_fast():
    p0 = vec(0.0, 0.0, 0.0)
    state = OptimizerState(p0)
    state.t = 5
    cfg = LookAheadConfig(enabled=True, k=5, alpha=1.0)
    fast = vec(2.0, 4.0, -1.0)
    out = lookahead_step(fast, state, cfg)
    assert np.array_equal(out.values, fast.values)
    assert np.array_equal(state.slow_weights.values, fast.values)


def test_lookahead_half_interpolation():
    state = OptimizerState(vec(0.0, 0.0, 0.0))
    state.t = 5
    cfg = LookAheadConfig(enabled=True, k=5, alpha=0.5)
    out = lookahead_step(vec(2.0, 2.0, 2.0), state, cfg)
    assert np.allclose(out.values, 1.0)
    assert np.allclose(state.slow_weights.values, 1.0)


def test_lookahead_no_sync_between_multiples():
    state = OptimizerState(vec(0.0, 0.0, 0.0))
    state.t = 4
    cfg = LookAheadConfig(enabled=True, k=5, alpha=0.5)
    fast = vec(2.0, 2.0, 2.0)
    out = lookahead_step(fast, state, cfg)
    assert out is fast
    assert np.allclose(state.slow_weights.values, 0.0)


# -- full step ---------------------------------------------------------------------

def _plain_pipeline(epsilon=0.0):
    return SingPipelineConfig(
        standardize=StandardizeConfig(True, True, epsilon),
        host=HostOptimizerConfig(kind="sgd", momentum=0.0),
        lookahead=LookAheadConfig(enabled=False),
        weight_decay=0.0,
    )


def test_step_rank1_single_block_formula():
    part = BlockPartition.of([("x", (2,))])
    p = BlockedVector(np.array([1.0, 2.0]), part)
    g = BlockedVector(np.array([3.0, 4.0]), part)
    schedule = Schedule(kind="constant", base_lr=0.1, warmup_steps=0, total_steps=5)
    state = OptimizerState(p)
    out = step(p, g, state, _plain_pipeline(epsilon=1e-8), schedule)
    expected = p.values - 0.1 * g.values / (5.0 + 1e-8)
    np.testing.assert_array_equal(out.values, expected)


def test_step_with_standardize_disabled_is_plain_gd():
    part = BlockPartition.of([("x", (2,))])
    p = BlockedVector(np.array([1.0, 2.0]), part)
    g = BlockedVector(np.array([3.0, 4.0]), part)
    pipeline = SingPipelineConfig(
        standardize=StandardizeConfig.identity(),
        host=HostOptimizerConfig(kind="sgd", momentum=0.0),
    )
    schedule = Schedule(kind="constant", base_lr=0.1, warmup_steps=0, total_steps=5)
    out = step(p, g, OptimizerState(p), pipeline, schedule)
    np.testing.assert_array_equal(out.values, p.values - 0.1 * g.values)


def test_step_increments_t_once():
    part = BlockPartition.of([("x", (2,))])
    p = BlockedVector(np.array([1.0, 2.0]), part)
    state = OptimizerState(p)
    schedule = Schedule(kind="constant", base_lr=0.1, warmup_steps=0, total_steps=5)
    for expected_t in (1, 2, 3):
        p = step(p, BlockedVector(np.array([1.0, 1.0]), part), state, _plain_pipeline(1e-8), schedule)
        assert state.t == expected_t


def test_step_propagates_zero_block_error():
    from singopt.standardize import ZeroGradientBlockError

    part = BlockPartition.of([("x", (2,))])
    p = BlockedVector(np.array([1.0, 2.0]), part)
    g = BlockedVector(np.zeros(2), part)
    schedule = Schedule(kind="constant", base_lr=0.1, warmup_steps=0, total_steps=5)
    with pytest.raises(ZeroGradientBlockError):
        step(p, g, OptimizerState(p), _plain_pipeline(epsilon=0.0), schedule)


def test_step_weight_decay_before_update_order():
    # with a skip-all gradient contribution the result isolates the decay factor
    part = BlockPartition.of([("x", (1,))])
    p = BlockedVector(np.array([2.0]), part)
    g = BlockedVector(np.array([1.0]), part)
    pipeline = SingPipelineConfig(
        standardize=StandardizeConfig(False, True, 0.0),
        host=HostOptimizerConfig(kind="sgd", momentum=0.0),
        weight_decay=0.5,
    )
    schedule = Schedule(kind="constant", base_lr=0.1, warmup_steps=0, total_steps=5)
    out = step(p, g, OptimizerState(p), pipeline, schedule)
    # p*(1 - 0.05) - 0.1 * 1.0
    assert out.values[0] == pytest.approx(2.0 * 0.95 - 0.1, rel=1e-15)


def test_full_pipeline_deterministic():
    rng = np.random.default_rng(11)
    part = BlockPartition.of([("W", (3, 2)), ("b", (3,))])
    p0 = BlockedVector(rng.standard_normal(part.p), part)
    grads = [BlockedVector(rng.standard_normal(part.p), part) for _ in range(20)]
    pipeline = SingPipelineConfig(
        standardize=StandardizeConfig(True, True, 1e-8),
        host=HostOptimizerConfig(kind="adamw", softplus_enabled=True),
        lookahead=LookAheadConfig(enabled=True, k=5, alpha=0.5),
        weight_decay=0.01,
        weight_decay_skip=frozenset({"b"}),
    )
    schedule = Schedule(kind="cosine", base_lr=0.05, warmup_steps=2, total_steps=20)

    def run():
        p = p0.copy()
        state = OptimizerState(p)
        for g in grads:
            p = step(p, g.copy(), state, pipeline, schedule)
        return p.values

    assert np.array_equal(run(), run())
