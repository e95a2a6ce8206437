"""Experiment loop: build a task from a setup, run it, record a trace.

Per step the trace records the schedule learning rate, the loss the
update was computed from (minibatch loss for stochastic tasks), the
oracle full-gradient L2 and centralized pseudo-norm, the realized
parameter-update norm, the global parameter mean and per-block parameter
norms.  Oracle norms (rather than minibatch ones) are logged so
convergence audits can be evaluated directly from the trace.

Divergence (non-finite loss, gradient or parameters) stops the run; the
partial trace carries a ``diverged`` footer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocked import BlockedVector, BlockPartition
from .config import RunSetup, snapshot
from .landscapes import (
    EvaluationError,
    GaussianWells1D,
    Landscape,
    MlpTask,
    Quadratic,
    Rosenbrock,
    make_blobs,
)
from .optimizers import ConfigError, OptimizerState, lr_at, step
from .rng import Xoshiro256, derive_seed
from .standardize import centralize
from .trace import RunTrace

__all__ = ["RunResult", "build_task", "run_experiment", "run_setup"]


@dataclass
class RunResult:
    trace: RunTrace
    final_params: BlockedVector
    landscape: Landscape
    diverged: bool


class EpochBatcher:
    """Without-replacement minibatch order, reshuffled each epoch."""

    def __init__(self, n: int, batch_size: int, seed: int):
        if batch_size < 1:
            raise ConfigError("task.batch_size must be >= 1")
        self.n = n
        self.batch_size = min(batch_size, n)
        self.gen = Xoshiro256(derive_seed(seed, 0xBA7C4))
        self._order = self.gen.permutation(self.n)
        self._pos = 0

    def next_indices(self) -> np.ndarray:
        if self._pos >= self.n:
            self._order = self.gen.permutation(self.n)
            self._pos = 0
        idx = self._order[self._pos : self._pos + self.batch_size]
        self._pos += self.batch_size
        return idx


def _parse_start(text: str, p: int) -> np.ndarray:
    parts = [float(v) for v in text.split(",")]
    if len(parts) == 1 and p > 1:
        return np.full(p, parts[0])
    if len(parts) != p:
        raise ConfigError(f"task.start has {len(parts)} values, task needs {p}")
    return np.array(parts)


def build_task(setup: RunSetup) -> tuple[Landscape, BlockedVector, EpochBatcher | None]:
    """Instantiate the configured landscape, its start point and batch source."""
    task = setup.task
    kind = task["kind"].lower()
    if kind == "wells1d":
        landscape = GaussianWells1D.default()
        x0 = landscape.as_point(float(task["start"].split(",")[0]))
        return landscape, x0, None
    if kind == "rosenbrock":
        landscape = Rosenbrock()
        x0 = BlockedVector(_parse_start(task["start"], 2), landscape.partition)
        return landscape, x0, None
    if kind == "quadratic":
        blocks = int(task["blocks"])
        shape = tuple(int(d) for d in task["block_shape"].split("x"))
        partition = BlockPartition.of([(f"b{k}", shape) for k in range(blocks)])
        landscape = Quadratic(partition, smoothness=float(task["smoothness"]))
        gen = Xoshiro256(derive_seed(setup.seed, 0x900D))
        raw = gen.normals(partition.p)
        f0 = float(task["f0"])
        # scale so F(x0) = f0 (up to rounding); keeps the recipe's F0 an upper bound
        raw *= np.sqrt(2.0 * f0 / landscape.smoothness) / np.linalg.norm(raw)
        return landscape, BlockedVector(raw, partition), None
    if kind == "mlp":
        dataset = make_blobs(
            seed=setup.seed,
            n=int(task["n"]),
            classes=int(task["classes"]),
            dim=int(task["input_dim"]),
            spread=float(task["spread"]),
        )
        mlp = MlpTask(dataset, hidden=int(task["hidden"]), init_seed=setup.seed)
        batcher = EpochBatcher(dataset.n, int(task["batch_size"]), setup.seed)
        return mlp, mlp.initial_params(), batcher
    raise ConfigError(f"unknown task.kind {task['kind']!r}")


def run_experiment(
    landscape: Landscape,
    x0: BlockedVector,
    setup: RunSetup,
    batcher: EpochBatcher | None = None,
) -> RunResult:
    params = x0.copy()
    state = OptimizerState(params)
    trace = RunTrace(partition=params.partition, seed=setup.seed, config=snapshot(setup))
    schedule = setup.schedule

    for t in range(schedule.total_steps):
        lr = lr_at(schedule, t)
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                if batcher is not None:
                    loss, grad = landscape.minibatch(params, batcher.next_indices())
                    _, oracle_grad = landscape.evaluate(params)
                else:
                    loss, grad = landscape.evaluate(params)
                    oracle_grad = grad
        except EvaluationError:
            trace.diverged_at = t
            return RunResult(trace, params, landscape, diverged=True)
        if not np.isfinite(loss) or not np.all(np.isfinite(grad.values)):
            trace.diverged_at = t
            return RunResult(trace, params, landscape, diverged=True)

        new_params = step(params, grad, state, setup.pipeline, schedule)
        if not np.all(np.isfinite(new_params.values)):
            trace.diverged_at = t
            return RunResult(trace, params, landscape, diverged=True)

        update_l2 = float(np.linalg.norm(new_params.values - params.values))
        grad_phi = float(np.linalg.norm(centralize(oracle_grad).values))
        trace.append(
            step=t,
            lr=lr,
            loss=loss,
            grad_l2=oracle_grad.l2_norm(),
            grad_phi=grad_phi,
            update_l2=update_l2,
            param_mean=new_params.global_mean(),
            block_norms=[new_params.block_l2_norm(k) for k in range(params.partition.D)],
        )
        params = new_params

    return RunResult(trace, params, landscape, diverged=False)


def run_setup(setup: RunSetup) -> RunResult:
    landscape, x0, batcher = build_task(setup)
    return run_experiment(landscape, x0, setup, batcher)
