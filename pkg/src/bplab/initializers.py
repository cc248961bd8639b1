"""Random-field constructions that seed the automata.

Two families:

* plane classification of a product configuration into single-site labels,
  either by how much slack the plane's own cells have (LOWER_IS, an i.i.d.
  field) or by which thresholds leave it inert (UPPER_INERT, a 1-dependent
  field).  Running the PLAIN automaton on these label grids brackets the
  product dynamics from below and above;
* limit measures: the i.i.d. marginals the plane labels converge to at the
  critical density scalings, plus Poisson count fields and the clash-site
  comparison pair for the clique fiber.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import BoxGeometry
from .hamming import PlaneConfig, plane_spanned
from .hetero import VOID, HeteroGrid, Rule
from .product import Fiber, ProductConfig, _shifted, neighbor_counts


class ClassifyMode(Enum):
    LOWER_IS = "lower-is"
    UPPER_INERT = "upper-inert"


@dataclass
class ClassificationGrid:
    geometry: BoxGeometry
    labels: np.ndarray  # (W, H) values in 0..5
    mode: ClassifyMode

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int8)
        if self.labels.shape != self.geometry.shape:
            raise ValueError("label shape does not match the window")
        if self.labels.min() < 0 or self.labels.max() > 5:
            raise ValueError("labels must lie in 0..5")

    def to_hetero(self) -> HeteroGrid:
        return HeteroGrid(self.geometry, self.labels, Rule.PLAIN)


def classify_grid(cfg: ProductConfig, mode: ClassifyMode
                  ) -> ClassificationGrid:
    """Label every plane with its rung on the threshold ladder.

    LOWER_IS: the smallest k in 0..4 such that the plane fills itself at
    threshold theta - k (a rung with theta - k <= 0 holds vacuously), else 5.
    UPPER_INERT: the smallest k such that some vacant cell of the plane
    meets threshold theta - k counting the four neighbor planes, else 5.
    Fully occupied planes are labeled 0 in both modes.
    """
    if cfg.fiber is not Fiber.HAMMING_SQUARE:
        raise ValueError("classification needs the Hamming-square fiber")
    theta = cfg.theta
    w, h = cfg.geometry.shape

    if mode is ClassifyMode.LOWER_IS:
        labels = np.full((w, h), 5, dtype=np.int8)
        for x in range(w):
            for y in range(h):
                plane = PlaneConfig(cfg.n, cfg.occ[x, y])
                for k in range(5):
                    if theta - k <= 0 or plane_spanned(plane, theta - k):
                        labels[x, y] = k
                        break
        return ClassificationGrid(cfg.geometry, labels, mode)

    counts = neighbor_counts(cfg)
    vacant = ~cfg.occ
    full = ~vacant.any(axis=(2, 3))
    labels = np.full((w, h), 5, dtype=np.int8)
    for k in range(4, -1, -1):
        r = theta - k
        if r <= 0:
            # threshold never binds: every vacant cell qualifies
            awake = vacant.any(axis=(2, 3))
        else:
            awake = (vacant & (counts >= r)).any(axis=(2, 3))
        labels[awake] = k
    labels[full] = 0
    return ClassificationGrid(cfg.geometry, labels, mode)


# ---------------------------------------------------------------------------
# limit measures


def nz(m: int, theta: int) -> int:
    """State assigned to a fiber holding m occupied cells (clique rules)."""
    if m < 0:
        raise ValueError("count must be nonnegative")
    if theta < 3:
        raise ValueError("needs theta >= 3")
    if m == 0:
        return VOID
    if m >= theta:
        return 0
    k = theta - m
    return k if k <= 4 else 5


@dataclass(frozen=True)
class LimitParams:
    a: float
    eps: float = 0.0
    ell: int = 1
    theta: int | None = None

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError("a must be nonnegative")
        if not (0.0 <= self.eps < 1.0):
            raise ValueError("eps must lie in [0, 1)")
        if self.ell < 1:
            raise ValueError("ell must be a positive integer")


class LimitVariant(Enum):
    XI_AEPS = "xi-aeps"
    CHI_AEPS = "chi-aeps"
    ZETA_POISSON = "zeta-poisson"


def _categorical(probs: list[float], shape: tuple[int, ...],
                 rng: np.random.Generator) -> np.ndarray:
    if min(probs) < -1e-12:
        raise ValueError("marginals out of range; eps too large")
    edges = np.cumsum(probs)
    return np.searchsorted(edges, rng.random(shape), side="right")


def _poisson_inverse(u: np.ndarray, a: float) -> np.ndarray:
    """Quantile-coupled Poisson(a) counts from shared uniforms."""
    out = np.zeros(u.shape, dtype=np.int64)
    term = math.exp(-a)
    cdf = np.full(u.shape, term)
    pending = u > cdf
    k = 0
    while pending.any():
        k += 1
        out[pending] = k
        term *= a / k
        cdf += term
        if term < 1e-300:  # tail exhausted by float underflow
            break
        pending = u > cdf
    return out


def init_limit_grid(params: LimitParams, variant: LimitVariant,
                    geom: BoxGeometry, rng: np.random.Generator) -> HeteroGrid:
    """i.i.d. field with the limiting single-site marginals.

    XI_AEPS marginals (q = exp(-a^ell / ell!)): P(0) = eps,
    P(1) = (1 - q)^2, P(3) = q^2, P(2) = the rest; eps must stay below
    q - q^2 so the state-2 mass exceeds its limit share.  CHI_AEPS:
    P(0) = eps, P(1) = 1 - (a+1)e^-a, P(3) = e^-a, P(2) = the rest.
    ZETA_POISSON: nz of a Poisson(a) count, drawn by inverse transform so
    that runs with shared seeds are coupled across a.
    """
    shape = geom.shape
    if variant is LimitVariant.XI_AEPS:
        q = math.exp(-params.a ** params.ell / math.factorial(params.ell))
        if params.eps >= q - q * q:
            raise ValueError("eps outside the admissible range")
        p1 = (1.0 - q) ** 2
        p3 = q * q
        states = _categorical([params.eps, p1, 1.0 - params.eps - p1 - p3, p3],
                              shape, rng)
        return HeteroGrid(geom, states, Rule.PLAIN)
    if variant is LimitVariant.CHI_AEPS:
        e = math.exp(-params.a)
        p1 = 1.0 - (params.a + 1.0) * e
        p2 = params.a * e - params.eps
        if p2 < 0:
            raise ValueError("eps outside the admissible range")
        states = _categorical([params.eps, p1, p2, e], shape, rng)
        return HeteroGrid(geom, states, Rule.HELPED3)
    if params.theta is None:
        raise ValueError("ZETA_POISSON needs theta")
    counts = _poisson_inverse(rng.random(shape), params.a)
    lut = np.array([nz(m, params.theta)
                    for m in range(int(counts.max()) + 1)], dtype=np.int16)
    return HeteroGrid(geom, lut[counts], Rule.HELPED, params.theta)


# ---------------------------------------------------------------------------
# clique comparison pair


_CLOSED_NBHD = ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1))


def clash_sites(cfg: ProductConfig) -> np.ndarray:
    """Sites whose fiber count is below threshold and whose closed lattice
    neighborhood holds two distinct below-threshold planes sharing an
    occupied fiber coordinate."""
    if cfg.fiber is not Fiber.CLIQUE:
        raise ValueError("clash sites are defined for the clique fiber")
    boundary = cfg.geometry.boundary
    occs = {}
    lows = {}
    for d in _CLOSED_NBHD:
        if d == (0, 0):
            o = cfg.occ
        else:
            axis = 0 if d[0] else 1
            o = _shifted(cfg.occ, axis, d[axis], boundary)
        occs[d] = o
        lows[d] = o.sum(axis=2) < cfg.theta
    clash = np.zeros(cfg.geometry.shape, dtype=bool)
    nbhd = list(_CLOSED_NBHD)
    for i, d1 in enumerate(nbhd):
        for d2 in nbhd[i + 1:]:
            shared = (occs[d1] & occs[d2]).any(axis=2)
            clash |= shared & lows[d1] & lows[d2]
    return clash & lows[(0, 0)]


class CliqueFlavor(Enum):
    FAVORING = "favoring"
    RESTRICTING = "restricting"


def init_clique_comparison(cfg: ProductConfig,
                           flavor: CliqueFlavor) -> HeteroGrid:
    """Collapse a clique-fiber configuration to a single-site grid.

    Non-clash sites get nz of their fiber count; clash sites get 0 under
    FAVORING and the idle sentinel under RESTRICTING, so the two fixpoints
    bracket the product dynamics.
    """
    if cfg.fiber is not Fiber.CLIQUE:
        raise ValueError("comparison grids are defined for the clique fiber")
    counts = cfg.occ.sum(axis=2)
    lut = np.array([nz(m, cfg.theta) for m in range(cfg.n + 1)],
                   dtype=np.int16)
    states = lut[counts]
    clash = clash_sites(cfg)
    states[clash] = 0 if flavor is CliqueFlavor.FAVORING else VOID
    return HeteroGrid(cfg.geometry, states, Rule.HELPED, cfg.theta)
