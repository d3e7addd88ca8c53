"""Heightfield and penalty contact model tests."""

import numpy as np
import pytest

from jumpopt.terrain import (DEFAULT_BLOCK_CELL, Terrain, contact_force,
                             flat_terrain, make_block_terrain)


def test_flat_is_zero_everywhere():
    t = flat_terrain()
    xs = np.linspace(-5, 5, 17)
    assert np.all(t.height(xs, xs[::-1]) == 0.0)
    assert t.mu == 0.4
    assert t.k_normal == 30000.0
    assert t.d_normal == 300.0
    assert t.v_slip == 0.01


def test_blocks_take_three_levels():
    t = make_block_terrain(0.03, seed=7)
    rng = np.random.default_rng(0)
    xy = rng.uniform(-2, 2, size=(500, 2))
    h = t.height(xy[:, 0], xy[:, 1])
    levels = np.unique(h)
    np.testing.assert_allclose(levels, [0.0, 0.015, 0.03], atol=1e-15)
    # all three levels actually occur over a large patch
    assert len(levels) == 3


def test_blocks_constant_within_cell():
    t = make_block_terrain(0.05, cell=0.1, seed=3)
    # probe several points strictly inside one cell
    base = t.height(0.35, 0.35)
    for dx in (-0.04, 0.0, 0.04):
        for dy in (-0.04, 0.0, 0.04):
            assert t.height(0.35 + dx, 0.35 + dy) == base


def test_blocks_deterministic_and_seed_dependent():
    a = make_block_terrain(0.03, seed=11)
    b = make_block_terrain(0.03, seed=11)
    c = make_block_terrain(0.03, seed=12)
    xs = np.linspace(-1, 1, 40)
    ys = np.linspace(-1, 1, 40)
    np.testing.assert_array_equal(a.height(xs, ys), b.height(xs, ys))
    assert np.any(a.height(xs, ys) != c.height(xs, ys))


def test_blocks_zero_height_is_flat():
    t = make_block_terrain(0.0, seed=5)
    xs = np.linspace(-1, 1, 20)
    assert np.all(t.height(xs, xs) == 0.0)


def test_blocks_validation():
    with pytest.raises(ValueError):
        make_block_terrain(-0.01)
    with pytest.raises(ValueError):
        make_block_terrain(0.03, cell=0.0)


def test_no_contact_above_ground():
    t = flat_terrain()
    f = contact_force(np.array([0.0, 0.0, 0.001]), np.array([0.0, 0.0, -1.0]), t)
    np.testing.assert_array_equal(f, np.zeros(3))


def test_static_penetration_spring():
    t = flat_terrain()
    f = contact_force(np.array([0.2, -0.1, -0.001]), np.zeros(3), t)
    np.testing.assert_allclose(f, [0.0, 0.0, 30.0], atol=1e-12)


def test_normal_damping_and_no_pull():
    t = flat_terrain()
    down = contact_force(np.array([0, 0, -0.001]), np.array([0, 0, -0.05]), t)
    assert down[2] == pytest.approx(30.0 + 300.0 * 0.05)
    # fast upward motion would make the spring-damper pull; it must clamp
    up = contact_force(np.array([0, 0, -0.001]), np.array([0, 0, 0.5]), t)
    np.testing.assert_array_equal(up, np.zeros(3))


def test_friction_cone_cap_and_direction():
    t = flat_terrain()
    pos = np.array([0.0, 0.0, -100.0 / 30000.0])  # fn = 100 N
    vel = np.array([0.3, 0.4, 0.0])               # |vt| = 0.5 >> v_slip
    f = contact_force(pos, vel, t)
    assert f[2] == pytest.approx(100.0)
    ft = f[:2]
    assert np.linalg.norm(ft) == pytest.approx(40.0, rel=1e-12)
    # opposes the slip direction
    np.testing.assert_allclose(ft / np.linalg.norm(ft), [-0.6, -0.8], rtol=1e-12)


def test_friction_linear_below_slip_threshold():
    t = flat_terrain()
    pos = np.array([0.0, 0.0, -100.0 / 30000.0])
    v1 = contact_force(pos, np.array([0.002, 0.0, 0.0]), t)
    v2 = contact_force(pos, np.array([0.004, 0.0, 0.0]), t)
    assert v2[0] == pytest.approx(2.0 * v1[0], rel=1e-12)
    assert abs(v1[0]) == pytest.approx(0.4 * 100.0 * 0.002 / 0.01, rel=1e-12)


def test_contact_batched_matches_single():
    t = make_block_terrain(0.03, seed=2)
    rng = np.random.default_rng(9)
    pos = rng.uniform(-0.5, 0.5, size=(6, 3))
    pos[:, 2] = rng.uniform(-0.01, 0.05, size=6)
    vel = rng.normal(scale=0.3, size=(6, 3))
    batch = contact_force(pos, vel, t)
    for i in range(6):
        np.testing.assert_allclose(batch[i], contact_force(pos[i], vel[i], t),
                                   atol=1e-15)


def test_contact_on_raised_block():
    # A foot just below a raised block's surface but above z = 0 is loaded.
    t = make_block_terrain(0.05, cell=0.1, seed=3)
    # find a cell at full height
    found = None
    for x in np.arange(-1.0, 1.0, 0.1):
        for y in np.arange(-1.0, 1.0, 0.1):
            if t.height(x + 0.05, y + 0.05) == 0.05:
                found = (x + 0.05, y + 0.05)
                break
        if found:
            break
    assert found is not None
    f = contact_force(np.array([found[0], found[1], 0.049]), np.zeros(3), t)
    assert f[2] == pytest.approx(30000.0 * 0.001, rel=1e-9)


def test_description_strings():
    assert flat_terrain().description == "flat"
    assert make_block_terrain(0.03).description == "blocks:0.03"
