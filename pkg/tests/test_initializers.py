import math

import numpy as np
import pytest

from bplab import (VOID, Boundary, BoxGeometry, ClassifyMode, CliqueFlavor,
                   Fiber, HeteroGrid, LimitParams, LimitVariant, ProductConfig,
                   Rule, clash_sites, classify_grid, hetero_fixpoint,
                   init_clique_comparison, init_limit_grid, nz,
                   product_fixpoint, sample_product)


def _product(occ, theta=4, boundary=Boundary.EMPTY_WALL,
             fiber=Fiber.HAMMING_SQUARE):
    occ = np.asarray(occ, dtype=bool)
    n = occ.shape[2]
    geom = BoxGeometry(occ.shape[0], occ.shape[1], boundary)
    return ProductConfig(geom, fiber, n, theta, occ)


def test_classify_full_plane_label_zero_both_modes():
    occ = np.zeros((3, 3, 4, 4), dtype=bool)
    occ[1, 1] = True
    cfg = _product(occ)
    for mode in (ClassifyMode.LOWER_IS, ClassifyMode.UPPER_INERT):
        labels = classify_grid(cfg, mode).labels
        assert labels[1, 1] == 0


def test_classify_empty_plane_theta4_lower_label_four():
    # empty plane: not 1-IS, but the threshold-0 rung holds vacuously
    occ = np.zeros((3, 3, 4, 4), dtype=bool)
    cfg = _product(occ)
    labels = classify_grid(cfg, ClassifyMode.LOWER_IS).labels
    assert (labels == 4).all()


def test_classify_empty_window_upper_inert():
    # vacant cells with occupied walls absent: threshold-0 rung fires
    occ = np.zeros((3, 3, 4, 4), dtype=bool)
    cfg = _product(occ)
    labels = classify_grid(cfg, ClassifyMode.UPPER_INERT).labels
    assert (labels == 4).all()


def test_classify_ladder_is_monotone_in_occupancy():
    rng = np.random.default_rng(0)
    for _ in range(30):
        occ = rng.random((2, 2, 6, 6)) < 0.15
        denser = occ | (rng.random(occ.shape) < 0.1)
        lo = classify_grid(_product(occ), ClassifyMode.LOWER_IS).labels
        hi = classify_grid(_product(denser), ClassifyMode.LOWER_IS).labels
        assert (hi <= lo).all()


def test_classify_rejects_clique_fiber():
    occ = np.zeros((2, 2, 5), dtype=bool)
    cfg = _product(occ, theta=3, fiber=Fiber.CLIQUE)
    with pytest.raises(ValueError):
        classify_grid(cfg, ClassifyMode.LOWER_IS)


def test_lower_zero_planes_inside_upper_zero_planes():
    rng = np.random.default_rng(1)
    for _ in range(50):
        cfg = sample_product(BoxGeometry(4, 4, Boundary.EMPTY_WALL),
                             Fiber.HAMMING_SQUARE, 8,
                             float(rng.uniform(0.02, 0.12)), 4, rng)
        lower = classify_grid(cfg, ClassifyMode.LOWER_IS).to_hetero()
        upper = classify_grid(cfg, ClassifyMode.UPPER_INERT).to_hetero()
        lz = hetero_fixpoint(lower).states == 0
        uz = hetero_fixpoint(upper).states == 0
        assert not (lz & ~uz).any()


def test_nz_examples():
    assert nz(0, 5) == VOID
    assert nz(7, 5) == 0
    assert nz(1, 3) == 2
    assert nz(5, 5) == 0
    assert nz(1, 9) == 5
    with pytest.raises(ValueError):
        nz(-1, 5)
    with pytest.raises(ValueError):
        nz(1, 2)


def test_nz_nonincreasing_in_count():
    # order: VOID above 5 above 4 ... above 0
    rank = {VOID: 7, 5: 5, 4: 4, 3: 3, 2: 2, 1: 1, 0: 0}
    for theta in (3, 4, 5, 6, 9):
        vals = [rank[nz(m, theta)] for m in range(theta + 3)]
        assert vals == sorted(vals, reverse=True)


def test_limit_params_validation():
    with pytest.raises(ValueError):
        LimitParams(-1.0)
    with pytest.raises(ValueError):
        LimitParams(1.0, eps=1.0)
    with pytest.raises(ValueError):
        LimitParams(1.0, ell=0)


def test_xi_marginals_match_closed_forms():
    # ell=2, a=1: P(3) = e^{-1}, P(1) = (1 - e^{-1/2})^2
    params = LimitParams(1.0, 1e-4, 2)
    geom = BoxGeometry(200, 200)
    grid = init_limit_grid(params, LimitVariant.XI_AEPS, geom,
                           np.random.default_rng(2))
    freq3 = float((grid.states == 3).mean())
    freq1 = float((grid.states == 1).mean())
    assert abs(freq3 - math.exp(-1.0)) < 0.01
    assert abs(freq1 - (1 - math.exp(-0.5)) ** 2) < 0.01
    assert grid.rule is Rule.PLAIN


def test_xi_eps_admissible_range():
    q = math.exp(-1.0)
    bad = LimitParams(1.0, q - q * q + 1e-6, 1)
    with pytest.raises(ValueError):
        init_limit_grid(bad, LimitVariant.XI_AEPS, BoxGeometry(4, 4),
                        np.random.default_rng(0))


def test_chi_marginals_match_closed_forms():
    params = LimitParams(1.0, 1e-4, 1)
    geom = BoxGeometry(200, 200)
    grid = init_limit_grid(params, LimitVariant.CHI_AEPS, geom,
                           np.random.default_rng(3))
    freq1 = float((grid.states == 1).mean())
    assert abs(freq1 - (1 - 2 * math.exp(-1.0))) < 0.01
    assert grid.rule is Rule.HELPED3
    bad = LimitParams(1.0, 0.9, 1)
    with pytest.raises(ValueError):
        init_limit_grid(bad, LimitVariant.CHI_AEPS, geom,
                        np.random.default_rng(0))


def test_zeta_poisson_zero_intensity_all_void():
    params = LimitParams(0.0, 0.0, 1, theta=3)
    grid = init_limit_grid(params, LimitVariant.ZETA_POISSON,
                           BoxGeometry(10, 10), np.random.default_rng(4))
    assert (grid.states == VOID).all()
    assert grid.rule is Rule.HELPED


def test_zeta_poisson_needs_theta():
    params = LimitParams(1.0)
    with pytest.raises(ValueError):
        init_limit_grid(params, LimitVariant.ZETA_POISSON,
                        BoxGeometry(4, 4), np.random.default_rng(0))


def test_zeta_poisson_marginal_and_coupling():
    geom = BoxGeometry(120, 120)
    lo = init_limit_grid(LimitParams(0.7, 0.0, 1, 3),
                         LimitVariant.ZETA_POISSON, geom,
                         np.random.default_rng(5))
    hi = init_limit_grid(LimitParams(1.4, 0.0, 1, 3),
                         LimitVariant.ZETA_POISSON, geom,
                         np.random.default_rng(5))
    # shared uniforms: counts only grow with a, so states only move toward 0
    rank = {VOID: 7, 5: 5, 4: 4, 3: 3, 2: 2, 1: 1, 0: 0}
    lut = np.zeros(VOID + 1, dtype=int)
    for k, v in rank.items():
        lut[k] = v
    assert (lut[hi.states] <= lut[lo.states]).all()
    p0 = 1 - math.exp(-0.7) * (1 + 0.7 + 0.7 ** 2 / 2)  # P(Poisson >= 3)
    assert abs(float((lo.states == 0).mean()) - p0) < 0.01


def test_clash_sites_empty_and_full():
    occ = np.zeros((3, 3, 5), dtype=bool)
    cfg = _product(occ, theta=3, fiber=Fiber.CLIQUE)
    assert not clash_sites(cfg).any()
    occ = np.zeros((3, 3, 5), dtype=bool)
    occ[1, 1, :] = True  # one full plane, N >= theta
    cfg = _product(occ, theta=3, fiber=Fiber.CLIQUE)
    assert not clash_sites(cfg).any()


def test_clash_sites_shared_coordinate_pair():
    occ = np.zeros((4, 4, 5), dtype=bool)
    occ[1, 2, 3] = True
    occ[2, 2, 3] = True  # lattice neighbors sharing fiber coordinate 3
    cfg = _product(occ, theta=3, fiber=Fiber.CLIQUE)
    mask = clash_sites(cfg)
    assert mask[1, 2] and mask[2, 2]
    assert mask.sum() == 2


def test_clique_comparison_flavors():
    occ = np.zeros((4, 4, 5), dtype=bool)
    occ[1, 2, 3] = True
    occ[2, 2, 3] = True
    cfg = _product(occ, theta=3, fiber=Fiber.CLIQUE)
    fav = init_clique_comparison(cfg, CliqueFlavor.FAVORING)
    res = init_clique_comparison(cfg, CliqueFlavor.RESTRICTING)
    clash = clash_sites(cfg)
    assert (fav.states[clash] == 0).all()
    assert (res.states[clash] == VOID).all()
    assert np.array_equal(fav.states[~clash], res.states[~clash])


def test_clique_comparison_no_clash_equal():
    occ = np.zeros((3, 3, 6), dtype=bool)
    occ[0, 0, 1] = True  # a single occupied vertex cannot clash
    cfg = _product(occ, theta=3, fiber=Fiber.CLIQUE)
    fav = init_clique_comparison(cfg, CliqueFlavor.FAVORING)
    res = init_clique_comparison(cfg, CliqueFlavor.RESTRICTING)
    assert np.array_equal(fav.states, res.states)


def test_clique_sandwich_small_instances():
    rng = np.random.default_rng(6)
    for _ in range(40):
        cfg = sample_product(BoxGeometry(4, 4, Boundary.EMPTY_WALL),
                             Fiber.CLIQUE, 6, float(rng.uniform(0.05, 0.3)),
                             3, rng)
        final = product_fixpoint(cfg)
        plane_full = final.occ.all(axis=2)
        gained = (final.occ & ~cfg.occ).any(axis=2)
        rs = hetero_fixpoint(
            init_clique_comparison(cfg, CliqueFlavor.RESTRICTING))
        fv = hetero_fixpoint(
            init_clique_comparison(cfg, CliqueFlavor.FAVORING))
        assert not ((rs.states == 0) & ~plane_full).any()
        assert not (gained & (fv.states != 0)).any()


def test_lower_is_labels_are_site_independent():
    # i.i.d. field: neighboring labels should be uncorrelated
    rng = np.random.default_rng(7)
    a = []
    b = []
    for _ in range(200):
        cfg = sample_product(BoxGeometry(2, 1, Boundary.EMPTY_WALL),
                             Fiber.HAMMING_SQUARE, 6, 0.12, 4, rng)
        labels = classify_grid(cfg, ClassifyMode.LOWER_IS).labels
        a.append(int(labels[0, 0]))
        b.append(int(labels[1, 0]))
    corr = np.corrcoef(a, b)[0, 1]
    assert abs(corr) < 0.2
