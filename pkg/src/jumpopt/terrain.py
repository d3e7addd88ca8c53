"""Heightfield terrain and the spring-damper ground contact law.

Terrain is a height function z = h(x, y) plus contact-material constants.
The contact normal is always world z (the heights are desk-scale), so the
normal force is a one-sided spring-damper in penetration depth and the
tangential force is regularized Coulomb friction: linear in slip velocity
below a small threshold, capped at mu times the normal force above it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# Friction tuned for rubber feet on smooth flooring.  Higher values weld the
# feet at touchdown and the trunk settles back over them, erasing most of the
# translation a jump gained; 0.4 lets landings skid enough to keep it.
DEFAULT_MU = 0.4
DEFAULT_K_NORMAL = 30000.0
DEFAULT_D_NORMAL = 300.0
DEFAULT_V_SLIP = 0.01
DEFAULT_BLOCK_CELL = 0.08


@dataclass(frozen=True)
class Terrain:
    """A height function with contact-material parameters.

    height maps (x, y) arrays to heights; it must be vectorized and
    deterministic.
    """

    height: Callable[[np.ndarray, np.ndarray], np.ndarray]
    mu: float = DEFAULT_MU
    k_normal: float = DEFAULT_K_NORMAL
    d_normal: float = DEFAULT_D_NORMAL
    v_slip: float = DEFAULT_V_SLIP
    description: str = "flat"


def flat_terrain(mu: float = DEFAULT_MU, k_normal: float = DEFAULT_K_NORMAL,
                 d_normal: float = DEFAULT_D_NORMAL,
                 v_slip: float = DEFAULT_V_SLIP) -> Terrain:
    return Terrain(lambda x, y: np.zeros_like(np.asarray(x, dtype=float)),
                   mu, k_normal, d_normal, v_slip, description="flat")


def _mix_cells(ix: np.ndarray, iy: np.ndarray, seed: int) -> np.ndarray:
    """Deterministic 64-bit hash of integer cell coordinates.

    Multiplications wrap mod 2^64 on purpose; the errstate guard keeps
    numpy from warning about that.
    """
    with np.errstate(over="ignore"):
        h = (ix.astype(np.uint64) * np.uint64(0x9E3779B97F4A7C15)
             ^ iy.astype(np.uint64) * np.uint64(0xC2B2AE3D27D4EB4F)
             ^ np.uint64(seed & 0xFFFFFFFFFFFFFFFF) * np.uint64(0x165667B19E3779F9))
        h ^= h >> np.uint64(30)
        h *= np.uint64(0xBF58476D1CE4E5B9)
        h ^= h >> np.uint64(27)
        h *= np.uint64(0x94D049BB133111EB)
        h ^= h >> np.uint64(31)
    return h


def make_block_terrain(block_height: float, cell: float = DEFAULT_BLOCK_CELL,
                       seed: int = 0, mu: float = DEFAULT_MU,
                       k_normal: float = DEFAULT_K_NORMAL,
                       d_normal: float = DEFAULT_D_NORMAL,
                       v_slip: float = DEFAULT_V_SLIP) -> Terrain:
    """Random piecewise-constant block terrain.

    The plane is tiled into square cells of the given size; each cell picks
    one of the three levels {0, h/2, h} from a hash of its integer
    coordinates and the seed, so heights are reproducible at any point
    without storing a grid.
    """
    if block_height < 0.0:
        raise ValueError("block_height must be non-negative")
    if cell <= 0.0:
        raise ValueError("cell size must be positive")
    levels = np.array([0.0, 0.5 * block_height, block_height])

    def height(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ix = np.floor(x / cell).astype(np.int64)
        iy = np.floor(y / cell).astype(np.int64)
        pick = _mix_cells(ix, iy, seed) % np.uint64(3)
        return levels[pick.astype(np.int64)]

    return Terrain(height, mu, k_normal, d_normal, v_slip,
                   description=f"blocks:{block_height:g}")


def contact_force(foot_pos: np.ndarray, foot_vel: np.ndarray,
                  terrain: Terrain) -> np.ndarray:
    """Ground reaction force on a point foot, batched over leading dims.

    Zero when the foot is above the surface. The normal part never pulls;
    the tangential part opposes the slip velocity and respects the friction
    cone |Ft| <= mu * Fn.
    """
    foot_pos = np.asarray(foot_pos, dtype=float)
    foot_vel = np.asarray(foot_vel, dtype=float)
    pen = terrain.height(foot_pos[..., 0], foot_pos[..., 1]) - foot_pos[..., 2]
    in_contact = pen > 0.0

    fn = np.maximum(0.0, terrain.k_normal * pen - terrain.d_normal * foot_vel[..., 2])
    fn = np.where(in_contact, fn, 0.0)

    vt = foot_vel[..., :2]
    speed = np.linalg.norm(vt, axis=-1)
    ft_mag = terrain.mu * fn * np.minimum(speed / terrain.v_slip, 1.0)
    scale = np.where(speed > 0.0, ft_mag / np.maximum(speed, 1e-30), 0.0)

    out = np.zeros(foot_pos.shape)
    out[..., :2] = -scale[..., None] * vt
    out[..., 2] = fn
    return out
