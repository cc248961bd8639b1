"""Monte Carlo estimators, closed-form oracles, and bracket experiments.

Every estimator draws per-trial generators derived from (seed, trial index),
so records are reproducible and trials could run in any order.  Estimates
are plain frequencies with the Binomial standard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geometry import Boundary, BoxGeometry
from .hamming import (PlaneConfig, plane_spanned, plane_spanned_sparse,
                      sample_plane_cells)
from .hetero import HeteroGrid, Rule, hetero_fixpoint
from .initializers import (ClassifyMode, CliqueFlavor, LimitParams,
                           LimitVariant, classify_grid, init_clique_comparison,
                           init_limit_grid)
from .product import (Fiber, ProductConfig, is_inert, product_fixpoint,
                      sample_product)


class ResourceCapError(RuntimeError):
    """A single trial would exceed the configured cell budget."""


DEFAULT_MAX_CELLS = 200_000_000


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


@dataclass(frozen=True)
class EstimateRecord:
    experiment: str
    theta: int | None
    ell: int | None
    a: float | None
    n: int | None
    L: int | None
    rule: str
    mode: str
    boundary: str
    trials: int
    successes: int
    estimate: float
    stderr: float
    seed: int

    @classmethod
    def from_counts(cls, experiment: str, trials: int, successes: int,
                    seed: int, *, theta=None, ell=None, a=None, n=None,
                    L=None, rule="", mode="", boundary="") -> "EstimateRecord":
        p = successes / trials
        return cls(experiment, theta, ell, a, n, L, rule, mode, boundary,
                   trials, successes, p,
                   math.sqrt(p * (1.0 - p) / trials), seed)


# ---------------------------------------------------------------------------
# density scalings


def density_even(a: float, ell: int, n: int) -> float:
    """Critical scaling for threshold 2*ell + 2."""
    return a * math.log(n) ** (1.0 / ell) / n ** (1.0 + 1.0 / ell)


def density_odd(a: float, ell: int, n: int) -> float:
    """Critical scaling for threshold 2*ell + 1."""
    return a / n ** (1.0 + 1.0 / ell)


def density_clique(a: float, n: int) -> float:
    return a / n


def density_for(theta: int, a: float, n: int) -> float:
    if theta < 3:
        raise ValueError("needs theta >= 3")
    if theta % 2 == 0:
        return density_even(a, (theta - 2) // 2, n)
    return density_odd(a, (theta - 1) // 2, n)


# ---------------------------------------------------------------------------
# event registry


def _plane_spanning(params: dict, rng: np.random.Generator) -> bool:
    n, p, r = params["n"], params["p"], params["r"]
    rows, cols = sample_plane_cells(n, p, rng)
    try:
        return plane_spanned_sparse(n, rows, cols, r)
    except ValueError:
        occ = np.zeros((n, n), dtype=bool)
        occ[rows, cols] = True
        return plane_spanned(PlaneConfig(n, occ), r)


def _ev_plane_is(params, rng):
    return _plane_spanning(params, rng)


def _ev_plane_not_is(params, rng):
    return not _plane_spanning(params, rng)


def _plane_quiet(params: dict, rng: np.random.Generator) -> bool:
    """No vacant cell of a fresh plane meets the threshold (one-step)."""
    n, p, r = params["n"], params["p"], params["r"]
    rows, cols = sample_plane_cells(n, p, rng)
    if r <= 0:
        return len(rows) == n * n
    if len(rows) == 0:
        return True
    rc = np.bincount(rows, minlength=n)
    cc = np.bincount(cols, minlength=n)
    occupied = set(zip(rows.tolist(), cols.tolist()))
    row_cands = np.flatnonzero(rc).tolist()
    if len(row_cands) < n:
        row_cands.append(int(np.flatnonzero(rc == 0)[0]))
    col_order = np.argsort(cc)[::-1]
    for u in row_cands:
        for v in col_order:
            if (u, int(v)) in occupied:
                continue
            # the best vacant cell in this row; smaller cc can't do better
            if rc[u] + cc[v] >= r:
                return False
            break
    return True


def _ev_plane_ii(params, rng):
    return _plane_quiet(params, rng)


def _ev_plane_not_ii(params, rng):
    return not _plane_quiet(params, rng)


def _inert_config(params: dict, rng: np.random.Generator) -> bool:
    """Inertness of the center plane of a 3x3 sampled window."""
    geom = BoxGeometry(3, 3, Boundary.EMPTY_WALL)
    cfg = sample_product(geom, Fiber.HAMMING_SQUARE, params["n"], params["p"],
                         max(params["r"], 1), rng)
    return is_inert(cfg, (1, 1), params["r"])


def _ev_plane_inert(params, rng):
    return _inert_config(params, rng)


def _ev_plane_not_inert(params, rng):
    return not _inert_config(params, rng)


def _product_final(params: dict, rng: np.random.Generator) -> ProductConfig:
    geom = BoxGeometry(params["L"], params["L"],
                       params.get("boundary", Boundary.TORUS))
    fiber = params.get("fiber", Fiber.HAMMING_SQUARE)
    cfg = sample_product(geom, fiber, params["n"], params["p"],
                         params["theta"], rng)
    return product_fixpoint(cfg)


def _ev_origin_plane_full(params, rng):
    final = _product_final(params, rng)
    return bool(final.occ[0, 0].all())


def _ev_origin_point(params, rng):
    final = _product_final(params, rng)
    return bool(final.occ[(0,) * final.occ.ndim])


def _hetero_final(params: dict, rng: np.random.Generator) -> HeteroGrid:
    geom = BoxGeometry(params["L"], params["L"],
                       params.get("boundary", Boundary.EMPTY_WALL))
    lp = LimitParams(params["a"], params.get("eps", 0.0),
                     params.get("ell", 1), params.get("theta"))
    grid = init_limit_grid(lp, params["variant"], geom, rng)
    return hetero_fixpoint(grid)


def _ev_origin_zero(params, rng):
    final = _hetero_final(params, rng)
    w, h = final.geometry.shape
    return bool(final.states[w // 2, h // 2] == 0)


def _ev_cluster_diameter(params, rng):
    final = _hetero_final(params, rng)
    return _origin_cluster_diameter(final) > params["d"]


def _origin_cluster_diameter(g: HeteroGrid) -> int:
    from collections import deque
    w, h = g.geometry.shape
    ox, oy = w // 2, h // 2
    zero = g.states == 0
    if not zero[ox, oy]:
        return -1
    seen = np.zeros_like(zero)
    seen[ox, oy] = True
    queue = deque([(ox, oy)])
    xmin = xmax = ox
    ymin = ymax = oy
    while queue:
        x, y = queue.popleft()
        xmin, xmax = min(xmin, x), max(xmax, x)
        ymin, ymax = min(ymin, y), max(ymax, y)
        for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if 0 <= nx < w and 0 <= ny < h and zero[nx, ny] \
                    and not seen[nx, ny]:
                seen[nx, ny] = True
                queue.append((nx, ny))
    return max(xmax - xmin, ymax - ymin)


EVENTS = {
    "plane-is": _ev_plane_is,
    "plane-not-is": _ev_plane_not_is,
    "plane-ii": _ev_plane_ii,
    "plane-not-ii": _ev_plane_not_ii,
    "plane-inert": _ev_plane_inert,
    "plane-not-inert": _ev_plane_not_inert,
    "origin-plane-full": _ev_origin_plane_full,
    "origin-point": _ev_origin_point,
    "origin-zero": _ev_origin_zero,
    "cluster-diameter": _ev_cluster_diameter,
}


def _trial_cells(event: str, params: dict) -> int:
    if event.startswith("plane-"):
        if "inert" in event:
            return 9 * params["n"] ** 2
        return params["n"] ** 2
    if event in ("origin-plane-full", "origin-point"):
        fiber = params.get("fiber", Fiber.HAMMING_SQUARE)
        per = params["n"] ** 2 if fiber is Fiber.HAMMING_SQUARE else params["n"]
        return params["L"] ** 2 * per
    return params["L"] ** 2


def mc_probability(event: str, params: dict, trials: int, seed: int,
                   max_cells: int = DEFAULT_MAX_CELLS) -> EstimateRecord:
    """Frequency of a registered event over independent trials."""
    if trials < 1:
        raise ValueError("need at least one trial")
    try:
        fn = EVENTS[event]
    except KeyError:
        raise ValueError(f"unknown event {event!r}") from None
    if _trial_cells(event, params) > max_cells:
        raise ResourceCapError(f"trial for {event} exceeds {max_cells} cells")
    successes = sum(bool(fn(params, trial_rng(seed, i)))
                    for i in range(trials))
    boundary = params.get("boundary")
    variant = params.get("variant")
    return EstimateRecord.from_counts(
        event, trials, successes, seed,
        theta=params.get("theta", params.get("r")),
        ell=params.get("ell"), a=params.get("a"), n=params.get("n"),
        L=params.get("L"),
        rule=variant.value if variant is not None else "",
        mode="", boundary=boundary.value if boundary is not None else "")


# ---------------------------------------------------------------------------
# closed-form oracles


def _q(a: float, ell: int) -> float:
    return math.exp(-a ** ell / math.factorial(ell))


def oracle_formula(kind: str, a: float, ell: int,
                   n: int | None = None) -> float:
    """Leading-order value of one of the catalogued spanning/inertness
    probabilities, prefactors included."""
    need_n = kind not in ("odd-not-2lm1-is", "odd-2l-is")
    if need_n and (n is None or n < 2):
        raise ValueError(f"{kind} needs n >= 2")
    c = a ** (ell + 1) / math.factorial(ell + 1)
    if kind == "even-not-2lm1-is":
        if ell == 1:
            return n ** (-a)
        return n ** (-2.0 * a ** ell / math.factorial(ell))
    if kind == "even-not-2l-is":
        if ell == 1:
            return a * math.log(n) / n ** a
        return 2.0 * n ** (-a ** ell / math.factorial(ell))
    if kind == "even-2lp1-is":
        return 2.0 * c * math.log(n) ** (1.0 + 1.0 / ell) / n ** (1.0 / ell)
    if kind == "even-2lp2-is":
        return c * c * math.log(n) ** (2.0 + 2.0 / ell) / n ** (2.0 / ell)
    if kind == "odd-not-2lm1-is":
        if ell < 2:
            raise ValueError(f"{kind} needs ell >= 2")
        return _q(a, ell) ** 2
    if kind == "odd-2l-is":
        if ell < 2:
            raise ValueError(f"{kind} needs ell >= 2")
        return (1.0 - _q(a, ell)) ** 2
    if kind == "odd-not-2lp1-ii":
        return 2.0 * c * (1.0 - _q(a, ell)) / n ** (1.0 / ell)
    if kind == "odd-2lp1-is":
        return 2.0 * c * (1.0 - _q(a, ell)) ** 2 / n ** (1.0 / ell)
    if kind == "theta4-2-inert-lower":
        if ell != 1:
            raise ValueError(f"{kind} is an ell = 1 bound")
        return a * math.log(n) / n ** a
    raise ValueError(f"unknown oracle kind {kind!r}")


ORACLE_KINDS = ("even-not-2lm1-is", "even-not-2l-is", "even-2lp1-is",
                "even-2lp2-is", "odd-not-2lm1-is", "odd-2l-is",
                "odd-not-2lp1-ii", "odd-2lp1-is", "theta4-2-inert-lower")


# ---------------------------------------------------------------------------
# two-scale density brackets


class DensityMode(Enum):
    LOWER_IS = "lower-is"
    UPPER_INERT = "upper-inert"
    DIRECT = "direct"


def _span_label(n: int, rows: np.ndarray, cols: np.ndarray,
                theta: int) -> int:
    """Ladder label of one sparsely sampled plane (LOWER_IS rung)."""
    for k in range(5):
        r = theta - k
        if r <= 0:
            return k
        try:
            spanned = plane_spanned_sparse(n, rows, cols, r)
        except ValueError:
            occ = np.zeros((n, n), dtype=bool)
            occ[rows, cols] = True
            spanned = plane_spanned(PlaneConfig(n, occ), r)
        if spanned:
            return k
    return 5


def lower_label_marginal(theta: int, n: int, p: float, trials: int,
                         seed: int) -> np.ndarray:
    """MC estimate of the LOWER_IS label distribution of a single plane."""
    counts = np.zeros(6, dtype=np.int64)
    for i in range(trials):
        rows, cols = sample_plane_cells(n, p, trial_rng(seed, i))
        counts[_span_label(n, rows, cols, theta)] += 1
    return counts / trials


def two_scale_density(theta: int, a: float, n: int, L: int, mode: DensityMode,
                      trials: int, seed: int, plane_trials: int = 10_000,
                      max_cells: int = DEFAULT_MAX_CELLS) -> EstimateRecord:
    """Density of eventually-zero sites under one of three routes.

    LOWER_IS: the plane labels are i.i.d. across sites, so their marginal is
    estimated once by plane Monte Carlo and label grids are then drawn
    i.i.d.; label-1 sites are one rung below self-spanning and fill with
    minimal outside help, so they collapse to 0 before the PLAIN fixpoint,
    whose origin-zero frequency tracks the supercritical cascade of the
    product dynamics.  UPPER_INERT: samples a product window with a
    one-plane halo, classifies the interior, runs the PLAIN fixpoint (upper
    bound up to initially occupied cells).  DIRECT: full product dynamics,
    frequency of the origin plane filling up.
    """
    p = density_for(theta, a, n)
    ell = (theta - 2) // 2 if theta % 2 == 0 else (theta - 1) // 2
    common = dict(theta=theta, ell=ell, a=a, n=n, L=L, seed=seed)

    if mode is DensityMode.DIRECT:
        if L * L * n * n > max_cells:
            raise ResourceCapError("window too large for a direct solve")
        geom = BoxGeometry(L, L, Boundary.TORUS)
        successes = 0
        for i in range(trials):
            cfg = sample_product(geom, Fiber.HAMMING_SQUARE, n, p, theta,
                                 trial_rng(seed, i))
            successes += bool(product_fixpoint(cfg).occ[0, 0].all())
        return EstimateRecord.from_counts(
            "two-scale-density", trials, successes,
            mode=mode.value, boundary=Boundary.TORUS.value, **common)

    if mode is DensityMode.LOWER_IS:
        marginal = lower_label_marginal(theta, n, p, plane_trials, seed)
        edges = np.cumsum(marginal)
        geom = BoxGeometry(L, L, Boundary.EMPTY_WALL)
        successes = 0
        for i in range(trials):
            rng = trial_rng(seed, plane_trials + i)
            labels = np.searchsorted(edges, rng.random((L, L)), side="right")
            labels = np.minimum(labels, 5)
            labels[labels == 1] = 0  # one rung of slack: treated as seeded
            final = hetero_fixpoint(
                HeteroGrid(geom, labels, Rule.PLAIN))
            successes += bool(final.states[L // 2, L // 2] == 0)
        return EstimateRecord.from_counts(
            "two-scale-density", trials, successes,
            mode=mode.value, boundary=Boundary.EMPTY_WALL.value, **common)

    if (L + 2) * (L + 2) * n * n > max_cells:
        raise ResourceCapError("halo window too large")
    halo_geom = BoxGeometry(L + 2, L + 2, Boundary.EMPTY_WALL)
    geom = BoxGeometry(L, L, Boundary.EMPTY_WALL)
    successes = 0
    for i in range(trials):
        cfg = sample_product(halo_geom, Fiber.HAMMING_SQUARE, n, p, theta,
                             trial_rng(seed, i))
        full = classify_grid(cfg, ClassifyMode.UPPER_INERT)
        labels = full.labels[1:-1, 1:-1]
        final = hetero_fixpoint(HeteroGrid(geom, labels, Rule.PLAIN))
        successes += bool(final.states[L // 2, L // 2] == 0)
    return EstimateRecord.from_counts(
        "two-scale-density", trials, successes,
        mode=mode.value, boundary=Boundary.EMPTY_WALL.value, **common)


# ---------------------------------------------------------------------------
# phi(a) and the a_c scan


def phi_estimate(a: float, theta: int, L: int, trials: int, seed: int
                 ) -> tuple[EstimateRecord, EstimateRecord]:
    """Frequency of the origin reaching 0 under the Poisson-count rule.

    Returns (restrictive, permissive) wall records; the infinite-volume
    value lies between the two estimates up to sampling error.
    """
    lp = LimitParams(a, 0.0, 1, theta)
    hits = [0, 0]
    walls = (Boundary.EMPTY_WALL, Boundary.OCCUPIED_WALL)
    for i in range(trials):
        rng = trial_rng(seed, i)
        base = init_limit_grid(lp, LimitVariant.ZETA_POISSON,
                               BoxGeometry(L, L, walls[0]), rng)
        for j, wall in enumerate(walls):
            grid = HeteroGrid(BoxGeometry(L, L, wall), base.states,
                              Rule.HELPED, theta)
            final = hetero_fixpoint(grid)
            hits[j] += bool(final.states[L // 2, L // 2] == 0)
    return tuple(
        EstimateRecord.from_counts(
            "phi", trials, hits[j], seed, theta=theta, a=a, L=L,
            rule=Rule.HELPED.value, mode="bracket", boundary=wall.value)
        for j, wall in enumerate(walls))


@dataclass
class ScanResult:
    records: list[EstimateRecord] = field(default_factory=list)
    threshold: float = 0.05
    crossing: float | None = None


def ac_scan(ell: int, eps_list: list[float], a_grid: list[float], L: int,
            trials: int, seed: int, threshold: float = 0.05) -> ScanResult:
    """P(origin ends at 0) for the limiting plain-rule field over a grid of
    (a, eps); the empirical critical a is where the smallest-eps curve first
    crosses ``threshold`` (linear interpolation between grid points)."""
    if sorted(eps_list, reverse=True) != list(eps_list):
        raise ValueError("eps schedule must be decreasing")
    result = ScanResult(threshold=threshold)
    geom = BoxGeometry(L, L, Boundary.EMPTY_WALL)
    curves: dict[float, list[tuple[float, float]]] = {}
    for eps in eps_list:
        for a in a_grid:
            lp = LimitParams(a, eps, ell)
            successes = 0
            for i in range(trials):
                rng = trial_rng(seed, i)
                grid = init_limit_grid(lp, LimitVariant.XI_AEPS, geom, rng)
                final = hetero_fixpoint(grid)
                successes += bool(final.states[L // 2, L // 2] == 0)
            rec = EstimateRecord.from_counts(
                "ac-scan", trials, successes, seed, ell=ell, a=a, L=L,
                rule=Rule.PLAIN.value, mode=f"eps={eps:g}",
                boundary=Boundary.EMPTY_WALL.value)
            result.records.append(rec)
            curves.setdefault(eps, []).append((a, rec.estimate))
    lowest = curves[eps_list[-1]]
    prev_a, prev_v = None, None
    for a, v in lowest:
        if v >= threshold:
            if prev_a is None or prev_v is None or v == prev_v:
                result.crossing = a
            else:
                t = (threshold - prev_v) / (v - prev_v)
                result.crossing = prev_a + t * (a - prev_a)
            break
        prev_a, prev_v = a, v
    return result


# ---------------------------------------------------------------------------
# rate fitting


@dataclass
class RateFit:
    points: list[tuple[int, float]]
    exponent: float
    prefactor: float
    residuals: list[float]


def rate_fit(points: list[tuple[int, float]]) -> RateFit:
    """Least-squares slope of log(estimate) against log(n)."""
    if len(points) < 3:
        raise ValueError("need at least three points")
    if any(v <= 0 for _, v in points):
        raise ValueError("estimates must be positive")
    x = np.log([n for n, _ in points])
    y = np.log([v for _, v in points])
    slope, intercept = np.polyfit(x, y, 1)
    resid = (y - (slope * x + intercept)).tolist()
    return RateFit(list(points), float(slope), float(math.exp(intercept)),
                   resid)


# ---------------------------------------------------------------------------
# exact sandwich verification


@dataclass
class SandwichReport:
    ok: bool
    site: tuple[int, int] | None = None
    detail: str = ""


def sandwich_check(cfg: ProductConfig) -> SandwichReport:
    """Solve one window three ways and verify both inclusions exactly.

    Lower route: the single-site lower grid's zero planes must be fully
    occupied in the product fixpoint.  Upper route: planes ending nonzero in
    the upper grid must gain no vertex beyond their initial cells.
    """
    final = product_fixpoint(cfg)
    axes = tuple(range(2, cfg.occ.ndim))
    plane_full = final.occ.all(axis=axes)
    gained = (final.occ & ~cfg.occ).any(axis=axes)

    if cfg.fiber is Fiber.HAMMING_SQUARE:
        lower = classify_grid(cfg, ClassifyMode.LOWER_IS).to_hetero()
        upper = classify_grid(cfg, ClassifyMode.UPPER_INERT).to_hetero()
    else:
        lower = init_clique_comparison(cfg, CliqueFlavor.RESTRICTING)
        upper = init_clique_comparison(cfg, CliqueFlavor.FAVORING)
    lower_zero = hetero_fixpoint(lower).states == 0
    upper_zero = hetero_fixpoint(upper).states == 0

    bad = lower_zero & ~plane_full
    if bad.any():
        x, y = map(int, np.argwhere(bad)[0])
        return SandwichReport(False, (x, y),
                              "lower grid reached 0 but plane not filled")
    bad = gained & ~upper_zero
    if bad.any():
        x, y = map(int, np.argwhere(bad)[0])
        return SandwichReport(False, (x, y),
                              "plane gained vertices but upper grid nonzero")
    return SandwichReport(True)
