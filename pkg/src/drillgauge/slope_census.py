"""Counting short slopes over moduli space and issuing filling certificates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .certificates import Certificate, Verdict
from .constants import (
    FILL_THRESHOLD,
    HDS_THRESHOLD,
    HDS_VOLUME_CHANGE,
    MULTI_CUSP_THRESHOLD,
    MULTI_CUSP_THRESHOLD_EXACT,
)
from .errors import BadConfig, ZeroClass
from .family_ode import (
    DEFAULT_ALPHA_START,
    TWO_PI,
    init_family,
    integrate_to,
    volume_change_bounds,
)
from .flat_torus import (
    ClassLike,
    CuspShape,
    Slope,
    WeightedClass,
    iter_short_reduced,
    normalized_length,
)
from .tube import RadiusFloor


def count_excluded(shape: CuspShape, bound: float) -> int:
    """Number of slopes with normalized length strictly below ``bound``."""
    return count_excluded_modulus(shape.x, shape.y, bound)


def count_excluded_modulus(x: float, y: float, bound: float) -> int:
    return sum(1 for _ in iter_short_reduced(x, y, bound))


def box_scan_count(x: float, y: float, bound: float) -> int:
    """Brute-force count over the integer box implied by the dual basis.

    A vector ``p*a + q*b`` of length < bound has ``|p| <= bound*|a*|`` and
    ``|q| <= bound*|b*|`` where ``a*, b*`` is the dual basis.
    """
    s = 1.0 / math.sqrt(y)
    a = np.array([s, 0.0])
    b = np.array([x * s, y * s])
    dual = np.linalg.inv(np.array([a, b])).T
    pmax = int(math.ceil(bound * np.linalg.norm(dual[0])))
    qmax = int(math.ceil(bound * np.linalg.norm(dual[1])))
    p, q = np.meshgrid(np.arange(-pmax, pmax + 1), np.arange(0, qmax + 1), indexing="ij")
    p, q = p.ravel(), q.ravel()
    half = (q > 0) | (p > 0)
    p, q = p[half], q[half]
    prim = np.gcd(p, q) == 1
    p, q = p[prim], q[prim]
    lengths = np.hypot(p + q * x, q * y) / math.sqrt(y)
    return int(np.count_nonzero(lengths < bound))


@dataclass(frozen=True)
class GridConfig:
    """Moduli-space search: an ``nx`` by ``ny`` grid, then local refinement rounds.

    ``y`` is sampled geometrically between the unit circle and ``y_cap``
    (default ``bound**2``).  Each round re-grids a shrinking window around the
    ``keep`` best samples.
    """

    nx: int = 101
    ny: int = 100
    refinement_rounds: int = 2
    refine_points: int = 11
    keep: int = 8
    y_cap: Optional[float] = None
    verify: bool = False

    def __post_init__(self):
        if min(self.nx, self.ny, self.refine_points) <= 0 or self.refinement_rounds < 0 or self.keep <= 0:
            raise BadConfig("grid resolution must be positive")


@dataclass
class ModuliSearchResult:
    max_count: int
    argmax_modulus: tuple
    samples_evaluated: int
    refinement_depth: int
    cap_count: int = 0
    mismatches: list = field(default_factory=list)


def _in_domain(x: float, y: float) -> bool:
    return abs(x) <= 0.5 and x * x + y * y >= 1.0 and y > 0


def _canonical(x: float, y: float) -> tuple:
    """Identify the boundary edges of the fundamental domain (ties go to x >= 0)."""
    if x < 0 and (x == -0.5 or x * x + y * y == 1.0):
        return -x, y
    return x, y


def max_excluded_over_moduli(bound: float, grid: GridConfig = GridConfig(),
                             oracle: Optional[Callable[[float, float, float], int]] = None
                             ) -> ModuliSearchResult:
    """Largest slope count below ``bound`` over the moduli space of unit-area tori.

    Above ``y_cap = bound**2`` every slope with a nonzero second reduced
    coordinate has length at least ``sqrt(y) >= bound``, so the count there is
    at most 1; the guard count at the cap is reported as ``cap_count``.
    With ``grid.verify`` every sample is cross-checked against
    :func:`box_scan_count` and disagreements are collected in ``mismatches``;
    passing ``oracle(x, y, bound)`` checks every sample against it instead.
    """
    if not isinstance(grid, GridConfig):
        raise BadConfig("grid must be a GridConfig")
    if bound <= 0:
        return ModuliSearchResult(0, (0.0, 1.0), 0, 0)
    y_cap = grid.y_cap if grid.y_cap is not None else max(bound * bound, 1.0)
    seen = {}
    mismatches = []
    check = oracle if oracle is not None else (box_scan_count if grid.verify else None)

    def evaluate(x, y):
        x, y = _canonical(x, y)
        key = (x, y)
        if key not in seen:
            c = count_excluded_modulus(x, y, bound)
            if check is not None:
                ref = check(x, y, bound)
                if ref != c:
                    mismatches.append((x, y, c, ref))
            seen[key] = c
        return seen[key]

    xs = np.linspace(-0.5, 0.5, grid.nx)
    t = np.linspace(0.0, 1.0, grid.ny)
    for x in xs:
        y0 = math.sqrt(1.0 - x * x)
        for y in y0 * (y_cap / y0) ** t:
            evaluate(float(x), float(y))

    dx = 1.0 / max(grid.nx - 1, 1)
    dlog = math.log(y_cap) / max(grid.ny - 1, 1) if y_cap > 1 else 0.1
    for _ in range(grid.refinement_rounds):
        best = sorted(seen.items(), key=lambda kv: (-kv[1], kv[0]))[: grid.keep]
        offsets = np.linspace(-1.0, 1.0, grid.refine_points)
        for (bx, by), _c in best:
            for ox in offsets:
                x = bx + ox * dx
                for oy in offsets:
                    y = by * math.exp(oy * dlog)
                    if _in_domain(x, y) and y <= y_cap:
                        evaluate(float(x), float(y))
        dx /= grid.refine_points - 1 or 2
        dlog /= grid.refine_points - 1 or 2

    (ax, ay), max_count = min(seen.items(), key=lambda kv: (-kv[1], kv[0]))
    cap_count = max(count_excluded_modulus(0.0, y_cap, bound),
                    count_excluded_modulus(0.5, y_cap, bound))
    return ModuliSearchResult(max_count, (ax, ay), len(seen), grid.refinement_rounds,
                              cap_count, mismatches)


@dataclass(frozen=True)
class CertifyConfig:
    multi_cusp: bool = False
    integrate: bool = False
    alpha_start: float = DEFAULT_ALPHA_START
    dalpha_max: float = 0.01
    rel_slack: float = 0.0
    floor: RadiusFloor = field(default_factory=RadiusFloor)


def _subject(shape: CuspShape, cls: ClassLike) -> dict:
    out = {"shape": shape.name, "modulus": list(shape.modulus)}
    if isinstance(cls, Slope):
        out["slope"] = [cls.p, cls.q]
    else:
        out["class"] = [float(c) for c in cls]
    return out


def certify_fill(shape: CuspShape, slope: ClassLike, config: CertifyConfig = CertifyConfig()) -> Certificate:
    """Certify that filling along ``slope`` yields a hyperbolic manifold.

    Slopes of normalized length at least 7.515 (or 7.515*sqrt(2) on every cusp
    of a multi-cusped manifold) are certified.  Weighted classes of length at
    least 7.583 are reported as lying in the Dehn surgery space region, where
    the volume changes by at most 0.306.  Everything else is Inconclusive.
    """
    c0, c1 = slope
    if c0 == 0 and c1 == 0:
        raise ZeroClass("cannot certify the zero class")
    integral = isinstance(slope, Slope) or (
        float(c0).is_integer() and float(c1).is_integer() and math.gcd(int(c0), int(c1)) == 1)
    lhat = normalized_length(shape, slope)
    threshold = MULTI_CUSP_THRESHOLD_EXACT if config.multi_cusp else FILL_THRESHOLD
    numbers = {"normalized_length": lhat, "extremal_length": lhat * lhat}
    thresholds = {"fill_threshold": threshold}
    if config.multi_cusp:
        thresholds["multi_cusp_threshold_printed"] = MULTI_CUSP_THRESHOLD
    provenance = []
    verdict = Verdict.INCONCLUSIVE
    if integral and lhat >= threshold:
        verdict = Verdict.CERTIFIED_HYPERBOLIC
        provenance.append("filling-multi-cusp" if config.multi_cusp else "filling-threshold")
    if not config.multi_cusp and lhat >= HDS_THRESHOLD:
        thresholds["hds_threshold"] = HDS_THRESHOLD
        numbers["dv_hi"] = HDS_VOLUME_CHANGE
        provenance.append("hds-region-volume")
        if verdict is Verdict.INCONCLUSIVE:
            verdict = Verdict.IN_HDS_REGION
    cert = Certificate(verdict, subject=_subject(shape, slope), numbers=numbers,
                       thresholds=thresholds, provenance=provenance)
    if config.integrate:
        state = init_family(lhat, config.alpha_start, config.rel_slack, config.floor)
        trace = integrate_to(state, TWO_PI, config.dalpha_max, config.floor)
        vol = volume_change_bounds(trace, lhat)
        summary = trace.summary()
        summary["nz_reference"] = vol.nz_reference
        cert.enclosures["family"] = summary
    return cert


@dataclass(frozen=True)
class HDSRegion:
    """Excluded ellipse ``{c : c^T A c < 1}`` in user coordinates."""

    matrix: tuple
    threshold: float
    semi_axes: tuple

    def contains(self, cls: ClassLike) -> bool:
        """True when the class lies in the certified region (outside the ellipse)."""
        c = np.asarray(tuple(cls), dtype=float)
        return float(c @ np.array(self.matrix) @ c) >= 1.0

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "threshold": self.threshold}


def hds_region(shape: CuspShape, threshold: float = HDS_THRESHOLD) -> HDSRegion:
    if not threshold > 0:
        raise BadConfig(f"threshold must be positive, got {threshold!r}")
    A = shape.gram() / threshold**2
    eig = np.linalg.eigvalsh(A)
    axes = tuple(float(a) for a in sorted(1.0 / np.sqrt(eig)))
    return HDSRegion(tuple(tuple(float(v) for v in row) for row in A), threshold, axes)


def in_hds_region(shape: CuspShape, cls: ClassLike, threshold: float = HDS_THRESHOLD) -> bool:
    return normalized_length(shape, cls) >= threshold


__all__ = [
    "CertifyConfig",
    "GridConfig",
    "HDSRegion",
    "ModuliSearchResult",
    "WeightedClass",
    "box_scan_count",
    "certify_fill",
    "count_excluded",
    "hds_region",
    "max_excluded_over_moduli",
]
