"""Gradient standardization: per-tensor centralization and normalization.

The transform applied to a raw gradient has two stages, each optional:

1. centralization: for every block of rank > 1, subtract from each
   first-axis slice its mean over the remaining axes (rank-1 blocks pass
   through unchanged);
2. normalization: divide every block by its L2 norm plus ``epsilon``.

With both stages on and ``epsilon = 0`` the output has exactly unit norm
per block, hence total L2 norm ``sqrt(D)``, and any per-block positive
rescaling of the input cancels out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocked import BlockedVector

__all__ = [
    "StandardizeConfig",
    "ZeroGradientBlockError",
    "centralize",
    "gamma",
    "sing_transform",
]


class ZeroGradientBlockError(ArithmeticError):
    """A block to be normalized with epsilon = 0 had zero norm."""

    def __init__(self, block_name: str):
        super().__init__(f"cannot normalize zero-norm gradient block {block_name!r} with epsilon=0")
        self.block_name = block_name


@dataclass(frozen=True)
class StandardizeConfig:
    """Toggles and the division guard for the gradient transform."""

    centralize_enabled: bool = True
    normalize_enabled: bool = True
    epsilon: float = 1e-8

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")

    @classmethod
    def identity(cls) -> "StandardizeConfig":
        return cls(centralize_enabled=False, normalize_enabled=False, epsilon=0.0)


def centralize(g: BlockedVector) -> BlockedVector:
    """Subtract per-first-axis-slice means from every block of rank > 1.

    The map is linear, idempotent and self-adjoint; rank-1 blocks are
    copied unchanged.
    """
    out = g.copy()
    part = g.partition
    for k in range(part.D):
        if part.rank(k) > 1:
            block = out.block(k)
            axes = tuple(range(1, block.ndim))
            block -= block.mean(axis=axes, keepdims=True)
    return out


def gamma(g: BlockedVector) -> BlockedVector:
    """Per-coordinate map to the L2 norm of the block containing it."""
    out = np.empty_like(g.values)
    part = g.partition
    for k in range(part.D):
        sl = part.slice_of(k)
        out[sl] = np.linalg.norm(g.values[sl])
    return BlockedVector(out, part)


def sing_transform(g: BlockedVector, cfg: StandardizeConfig) -> BlockedVector:
    """Centralize (optional) then normalize (optional) a gradient.

    Raises :class:`ZeroGradientBlockError` if normalization is on,
    ``epsilon`` is zero and some (centralized) block has zero norm.  With
    ``epsilon > 0`` a zero block yields a zero update for that block.
    """
    h = centralize(g) if cfg.centralize_enabled else g.copy()
    if not cfg.normalize_enabled:
        return h
    denom = gamma(h)
    if cfg.epsilon == 0.0:
        part = h.partition
        for k in range(part.D):
            if denom.values[part.offsets[k]] == 0.0:
                raise ZeroGradientBlockError(part.name(k))
    else:
        denom = BlockedVector(denom.values + cfg.epsilon, h.partition)
    h.values /= denom.values
    return h
