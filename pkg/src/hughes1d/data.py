"""Initial data used by the bundled scenarios."""

from __future__ import annotations

from .density import PiecewiseConstantDensity, make_density, shift

BLOCK_DENSITY = 0.9


def two_blocks() -> PiecewiseConstantDensity:
    """Two 0.9-blocks on [-1, -0.5) and [-0.4, 0), separated by a vacuum gap."""
    return make_density([(-1.0, -0.5, BLOCK_DENSITY), (-0.4, 0.0, BLOCK_DENSITY)], initial=True)


def shifted_two_blocks(delta: float) -> PiecewiseConstantDensity:
    """``two_blocks`` translated right by ``delta`` in [0, 1]."""
    return shift(two_blocks(), delta)


def widened_block(delta: float) -> PiecewiseConstantDensity:
    """Block of half-width ``delta`` centred at -0.5 (clipped to the corridor) plus [0.75, 1)."""
    blocks = [(0.75, 1.0, BLOCK_DENSITY)]
    if delta > 0:
        blocks.append((max(-1.0, -0.5 - delta), -0.5 + delta, BLOCK_DENSITY))
    return make_density(blocks, initial=True)


def exit_blocks() -> PiecewiseConstantDensity:
    """Symmetric well-separated datum: one 0.9-block against each exit."""
    return make_density([(-1.0, -0.8, BLOCK_DENSITY), (0.8, 1.0, BLOCK_DENSITY)], initial=True)


def uneven_exit_blocks() -> PiecewiseConstantDensity:
    """Asymmetric well-separated datum; the turning point drifts once the right block empties."""
    return make_density([(-1.0, -0.7, BLOCK_DENSITY), (0.8, 1.0, BLOCK_DENSITY)], initial=True)


FAMILIES = {
    "shifted_two_blocks": shifted_two_blocks,
    "widened_block": widened_block,
}
