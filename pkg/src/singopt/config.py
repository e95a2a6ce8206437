"""Plain key-value run configuration files.

Format: one ``key = value`` pair per line, ``#`` comments and blank lines
ignored.  Recognized keys cover the optimizer pipeline
(``optimizer.*``, ``sing.*``, ``lookahead.*``, ``schedule.*``,
``weight_decay``, ``weight_decay_skip``), the task under optimization
(``task.*``) and the ``seed``.  Parse errors carry the line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .optimizers import (
    ConfigError,
    HostOptimizerConfig,
    LookAheadConfig,
    Schedule,
    SingPipelineConfig,
)
from .standardize import StandardizeConfig

__all__ = ["RunSetup", "parse_config", "parse_config_file", "snapshot"]

_DEFAULTS: dict[str, str] = {
    "optimizer.kind": "adamw",
    "optimizer.momentum": "0.0",
    "optimizer.beta1": "0.9",
    "optimizer.beta2": "0.999",
    "optimizer.eps": "1e-8",
    "optimizer.softplus": "false",
    "optimizer.softplus_beta": "50.0",
    "sing.enabled": "true",
    "sing.centralize": "true",
    "sing.epsilon": "1e-8",
    "lookahead.enabled": "false",
    "lookahead.k": "5",
    "lookahead.alpha": "0.5",
    "schedule.kind": "cosine",
    "schedule.base_lr": "0.05",
    "schedule.warmup_steps": "0",
    "schedule.total_steps": "100",
    "weight_decay": "0.0",
    "weight_decay_skip": "",
    "seed": "0",
    "task.kind": "wells1d",
    "task.start": "-6.0",
    "task.blocks": "1",
    "task.block_shape": "4",
    "task.smoothness": "2.0",
    "task.f0": "1.0",
    "task.n": "2000",
    "task.classes": "3",
    "task.input_dim": "2",
    "task.hidden": "16",
    "task.spread": "0.3",
    "task.batch_size": "128",
}


@dataclass(frozen=True)
class RunSetup:
    """Everything needed to reproduce a run, in parsed form."""

    pipeline: SingPipelineConfig
    schedule: Schedule
    seed: int
    task: dict[str, str]
    raw: dict[str, str] = field(default_factory=dict)


def _parse_bool(key: str, value: str, lineno: int | None = None) -> bool:
    if value.lower() in ("true", "1", "yes", "on"):
        return True
    if value.lower() in ("false", "0", "no", "off"):
        return False
    raise ConfigError(_msg(lineno, f"{key}: expected a boolean, got {value!r}"))


def _parse_float(key: str, value: str, lineno: int | None = None) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(_msg(lineno, f"{key}: expected a number, got {value!r}")) from None


def _parse_int(key: str, value: str, lineno: int | None = None) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(_msg(lineno, f"{key}: expected an integer, got {value!r}")) from None


def _msg(lineno: int | None, text: str) -> str:
    return f"line {lineno}: {text}" if lineno is not None else text


def parse_config(text: str, overrides: dict[str, str] | None = None) -> RunSetup:
    values = dict(_DEFAULTS)
    lineno_of: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = value
        lineno_of[key] = lineno
    if overrides:
        values.update(overrides)

    def ln(key: str) -> int | None:
        return lineno_of.get(key)

    sing_enabled = _parse_bool("sing.enabled", values["sing.enabled"], ln("sing.enabled"))
    sing_centralize = _parse_bool("sing.centralize", values["sing.centralize"], ln("sing.centralize"))
    standardize = StandardizeConfig(
        centralize_enabled=sing_enabled and sing_centralize,
        normalize_enabled=sing_enabled,
        epsilon=_parse_float("sing.epsilon", values["sing.epsilon"], ln("sing.epsilon")),
    )
    host = HostOptimizerConfig(
        kind=values["optimizer.kind"].lower(),
        momentum=_parse_float("optimizer.momentum", values["optimizer.momentum"], ln("optimizer.momentum")),
        beta1=_parse_float("optimizer.beta1", values["optimizer.beta1"], ln("optimizer.beta1")),
        beta2=_parse_float("optimizer.beta2", values["optimizer.beta2"], ln("optimizer.beta2")),
        eps_opt=_parse_float("optimizer.eps", values["optimizer.eps"], ln("optimizer.eps")),
        softplus_enabled=_parse_bool("optimizer.softplus", values["optimizer.softplus"], ln("optimizer.softplus")),
        softplus_beta=_parse_float(
            "optimizer.softplus_beta", values["optimizer.softplus_beta"], ln("optimizer.softplus_beta")
        ),
    )
    lookahead = LookAheadConfig(
        enabled=_parse_bool("lookahead.enabled", values["lookahead.enabled"], ln("lookahead.enabled")),
        k=_parse_int("lookahead.k", values["lookahead.k"], ln("lookahead.k")),
        alpha=_parse_float("lookahead.alpha", values["lookahead.alpha"], ln("lookahead.alpha")),
    )
    schedule = Schedule(
        kind=values["schedule.kind"].lower(),
        base_lr=_parse_float("schedule.base_lr", values["schedule.base_lr"], ln("schedule.base_lr")),
        warmup_steps=_parse_int("schedule.warmup_steps", values["schedule.warmup_steps"], ln("schedule.warmup_steps")),
        total_steps=_parse_int("schedule.total_steps", values["schedule.total_steps"], ln("schedule.total_steps")),
    )
    skip = frozenset(name.strip() for name in values["weight_decay_skip"].split(",") if name.strip())
    pipeline = SingPipelineConfig(
        standardize=standardize,
        host=host,
        lookahead=lookahead,
        weight_decay=_parse_float("weight_decay", values["weight_decay"], ln("weight_decay")),
        weight_decay_skip=skip,
    )
    task = {key[len("task."):]: value for key, value in values.items() if key.startswith("task.")}
    return RunSetup(
        pipeline=pipeline,
        schedule=schedule,
        seed=_parse_int("seed", values["seed"], ln("seed")),
        task=task,
        raw=values,
    )


def parse_config_file(path, overrides: dict[str, str] | None = None) -> RunSetup:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), overrides)


def snapshot(setup: RunSetup) -> dict[str, str]:
    """Normalized key-value form of a setup, for trace headers."""
    return dict(setup.raw)
