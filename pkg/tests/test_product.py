import numpy as np
import pytest

from bplab import (Boundary, BoxGeometry, Fiber, ProductConfig, is_inert,
                   neighbor_counts, plane_fixpoint, plane_flags,
                   product_fixpoint, sample_product, summarize)
from bplab.hamming import PlaneConfig


def test_geometry_rejects_degenerate_torus():
    with pytest.raises(ValueError):
        BoxGeometry(1, 4, Boundary.TORUS)
    with pytest.raises(ValueError):
        BoxGeometry(0, 4)


def test_sample_full_density_counts():
    geom = BoxGeometry(2, 2, Boundary.TORUS)
    cfg = sample_product(geom, Fiber.HAMMING_SQUARE, 3, 1.0, 4,
                         np.random.default_rng(0))
    assert cfg.occ.sum() == 36


def test_sample_zero_density_empty():
    geom = BoxGeometry(3, 3)
    cfg = sample_product(geom, Fiber.CLIQUE, 5, 0.0, 3,
                         np.random.default_rng(0))
    assert not cfg.occ.any()


def test_clique_mean_count():
    geom = BoxGeometry(8, 8)
    rng = np.random.default_rng(11)
    means = [sample_product(geom, Fiber.CLIQUE, 50, 1.0 / 50, 3, rng)
             .occ.sum(axis=2).mean() for _ in range(50)]
    sigma = (50 * (1 / 50) * (49 / 50) / 64) ** 0.5
    assert abs(np.mean(means) - 1.0) <= 5 * sigma / 50 ** 0.5


def test_threshold_one_fills_connected_graph():
    geom = BoxGeometry(2, 2, Boundary.TORUS)
    occ = np.zeros((2, 2, 3, 3), dtype=bool)
    occ[0, 0, 1, 2] = True
    final = product_fixpoint(ProductConfig(geom, Fiber.HAMMING_SQUARE, 3, 1,
                                           occ))
    assert final.occ.all()


def test_threshold_above_degree_is_inert():
    geom = BoxGeometry(3, 3, Boundary.TORUS)
    rng = np.random.default_rng(1)
    n = 4
    theta = 4 + 2 * (n - 1) + 1
    cfg = sample_product(geom, Fiber.HAMMING_SQUARE, n, 0.5, theta, rng)
    final = product_fixpoint(cfg)
    assert np.array_equal(final.occ, cfg.occ)


def test_fixpoint_monotone_in_initial_state():
    rng = np.random.default_rng(2)
    geom = BoxGeometry(4, 4, Boundary.TORUS)
    for _ in range(60):
        small = sample_product(geom, Fiber.HAMMING_SQUARE, 5, 0.12, 4, rng)
        extra = rng.random(small.occ.shape) < 0.05
        big = ProductConfig(geom, Fiber.HAMMING_SQUARE, 5, 4,
                            small.occ | extra)
        a = product_fixpoint(small).occ
        b = product_fixpoint(big).occ
        assert not (a & ~b).any()


def test_fixpoint_antitone_in_threshold():
    rng = np.random.default_rng(3)
    geom = BoxGeometry(4, 4, Boundary.TORUS)
    for _ in range(60):
        cfg = sample_product(geom, Fiber.HAMMING_SQUARE, 5, 0.12, 4, rng)
        harder = ProductConfig(geom, Fiber.HAMMING_SQUARE, 5, 5, cfg.occ)
        a = product_fixpoint(harder).occ
        b = product_fixpoint(cfg).occ
        assert not (a & ~b).any()


def test_restricted_dynamics_below_product_dynamics():
    rng = np.random.default_rng(4)
    geom = BoxGeometry(3, 3, Boundary.TORUS)
    for _ in range(40):
        cfg = sample_product(geom, Fiber.HAMMING_SQUARE, 6, 0.15, 4, rng)
        final = product_fixpoint(cfg)
        for x in range(3):
            for y in range(3):
                plane = plane_fixpoint(PlaneConfig(6, cfg.occ[x, y]), 4)
                assert not (plane.occ & ~final.occ[x, y]).any()


def test_empty_wall_below_torus_with_coupled_interior():
    rng = np.random.default_rng(5)
    for _ in range(40):
        occ = rng.random((4, 4, 5, 5)) < 0.15
        wall = product_fixpoint(ProductConfig(
            BoxGeometry(4, 4, Boundary.EMPTY_WALL), Fiber.HAMMING_SQUARE,
            5, 4, occ))
        torus = product_fixpoint(ProductConfig(
            BoxGeometry(4, 4, Boundary.TORUS), Fiber.HAMMING_SQUARE,
            5, 4, occ))
        assert not (wall.occ & ~torus.occ).any()


def test_is_inert_empty_everything():
    geom = BoxGeometry(3, 3)
    cfg = ProductConfig(geom, Fiber.HAMMING_SQUARE, 4, 2,
                        np.zeros((3, 3, 4, 4), dtype=bool))
    assert is_inert(cfg, (1, 1), 1)


def test_is_inert_direct_counterexample():
    geom = BoxGeometry(3, 3)
    occ = np.zeros((3, 3, 4, 4), dtype=bool)
    occ[1, 1, 0, 1] = occ[1, 1, 0, 2] = True  # (0,0) sees two row neighbors
    cfg = ProductConfig(geom, Fiber.HAMMING_SQUARE, 4, 2, occ)
    assert not is_inert(cfg, (1, 1), 2)
    assert is_inert(cfg, (1, 1), 3)


def test_inert_implies_internally_inert():
    rng = np.random.default_rng(6)
    for _ in range(60):
        cfg = sample_product(BoxGeometry(3, 3), Fiber.HAMMING_SQUARE, 5,
                             float(rng.uniform(0.05, 0.3)), 4, rng)
        r = int(rng.integers(1, 6))
        counts = neighbor_counts(cfg)
        for x in range(3):
            for y in range(3):
                if is_inert(cfg, (x, y), r, counts):
                    flags = plane_flags(PlaneConfig(5, cfg.occ[x, y]), r)
                    assert flags.internally_inert


def test_summarize_conservation():
    rng = np.random.default_rng(7)
    cfg = sample_product(BoxGeometry(4, 3), Fiber.HAMMING_SQUARE, 4, 0.3, 4,
                         rng)
    summary = summarize(cfg)
    assert summary.per_plane_occupied.sum() == cfg.occ.sum()
    full = sample_product(BoxGeometry(2, 2, Boundary.TORUS),
                          Fiber.HAMMING_SQUARE, 3, 1.0, 4, rng)
    assert summarize(full).fully_occupied_mask.all()
    empty = sample_product(BoxGeometry(2, 2, Boundary.TORUS), Fiber.CLIQUE,
                           3, 0.0, 3, rng)
    assert not summarize(empty).origin_point_occupied
