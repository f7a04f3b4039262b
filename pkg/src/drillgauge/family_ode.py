"""Certified envelopes along a cone-angle family.

The core length obeys ``d(ell)/d(alpha) = (ell/alpha) * (1 + E)`` with ``E``
bracketed by :func:`error_interval` at the current tube radius.  For a fixed
bracket the extremal solutions are power laws, so each step is propagated in
closed form: ``ell * (a/alpha)**(1 + e)``.  Volume follows Schläfli,
``dV/d(alpha) = -ell/2``, and is integrated exactly along the same power laws.

Integration runs in ``alpha``; the ``t = alpha**2`` convention only fixes the
scale of the model form inside :func:`harmonic_bounds.bmm`.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Optional

from .certificates import Certificate, Verdict
from .constants import (
    BOUNDARY_RADIUS,
    DRILL_LENGTH,
    DRILL_VOLUME_FLOOR,
    DRILL_VOLUME_LOSS,
    MIN_CUSPED_VOLUME,
)
from .errors import HypothesisViolated, NonPositiveInput
from .harmonic_bounds import error_interval
from .tube import RadiusFloor, radius_floor

TWO_PI = 2.0 * math.pi
DEFAULT_SLACK = 1e-12
DEFAULT_ALPHA_START = 1e-4
BISECT_TOL = 1e-6
MIN_STEP = 1e-12
_RADIUS_ITERATIONS = 64

#: E == 0, the model deformation
MODEL_BOUNDS = (0.0, 0.0)
#: E == -1 freezes the core length; used to check the volume integral
FROZEN_BOUNDS = (-1.0, -1.0)


class Status(str, Enum):
    OK = "Ok"
    HYPOTHESIS_VIOLATED = "HypothesisViolated"
    RADIUS_UNCERTIFIED = "RadiusUncertified"


@dataclass(frozen=True)
class ConeFamilyState:
    """Enclosures at one cone angle.

    ``dv_lo, dv_hi`` enclose ``V(alpha_start) - V(alpha)``; ``radius`` is the
    tube-radius floor used for the step that produced this state.
    """

    alpha: float
    ell_lo: float
    ell_hi: float
    dv_lo: float = 0.0
    dv_hi: float = 0.0
    radius: float = math.inf
    status: Status = Status.OK
    note: str = field(default="", compare=False)

    @property
    def product(self) -> float:
        return self.alpha * self.ell_hi

    @property
    def ell_mid(self) -> float:
        return 0.5 * (self.ell_lo + self.ell_hi)


@dataclass
class FamilyTrace:
    samples: list
    config: dict = field(default_factory=dict)

    @property
    def final(self) -> ConeFamilyState:
        return self.samples[-1]

    @property
    def status(self) -> Status:
        return self.final.status

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["alpha", "ell_lo", "ell_hi", "dv_lo", "dv_hi", "radius", "status"])
        for s in self.samples:
            writer.writerow(
                [f"{v:.12e}" for v in (s.alpha, s.ell_lo, s.ell_hi, s.dv_lo, s.dv_hi, s.radius)]
                + [s.status.value]
            )
        return buf.getvalue()

    def summary(self) -> dict:
        f = self.final
        return {
            "alpha": f.alpha,
            "ell_lo": f.ell_lo,
            "ell_hi": f.ell_hi,
            "dv_lo": f.dv_lo,
            "dv_hi": f.dv_hi,
            "min_radius": min(s.radius for s in self.samples),
            "max_product": max(s.product for s in self.samples),
            "status": f.status.value,
            "steps": len(self.samples) - 1,
            "note": f.note,
        }


@dataclass(frozen=True)
class ComplexLength:
    re: float
    im: float
    rigorous: bool = True

    def __post_init__(self):
        if not self.re > 0:
            raise NonPositiveInput(f"translation length must be positive, got {self.re!r}")


def init_family(lhat: float, alpha_start: float = DEFAULT_ALPHA_START, rel_slack: float = 0.0,
                floor: Optional[RadiusFloor] = None) -> ConeFamilyState:
    """State near the cusp, where alpha / ell is the extremal length lhat**2."""
    if not (lhat > 0 and alpha_start > 0):
        raise NonPositiveInput("normalized length and alpha_start must be positive")
    if not 0 <= rel_slack < 1:
        raise NonPositiveInput(f"rel_slack must lie in [0, 1), got {rel_slack!r}")
    ell = alpha_start / lhat**2
    state = ConeFamilyState(alpha_start, ell * (1.0 - rel_slack), ell * (1.0 + rel_slack))
    if floor is None:
        return state
    try:
        return replace(state, radius=radius_floor(floor, state.product))
    except HypothesisViolated as exc:
        return replace(state, radius=0.0, status=Status.HYPOTHESIS_VIOLATED, note=str(exc))


def power_integral(ell0: float, alpha0: float, ratio_log: float, e: float) -> float:
    """Integral of ``ell0 * (a/alpha0)**(1+e) / 2`` from alpha0 to alpha0*exp(ratio_log)."""
    k = 2.0 + e
    if k == 0.0:
        return 0.5 * ell0 * alpha0 * ratio_log
    return 0.5 * ell0 * alpha0 * math.expm1(k * ratio_log) / k


def propagate(state: ConeFamilyState, alpha_new: float, e_lo: float, e_hi: float,
              slack: float = DEFAULT_SLACK) -> ConeFamilyState:
    """Move the enclosure to ``alpha_new`` with E held in ``[e_lo, e_hi]``.

    Status and radius are copied from ``state``; callers set them.
    """
    a0 = state.alpha
    L = math.log(alpha_new / a0)
    # upper envelope takes the largest log-slope in the direction of travel
    up, down = (e_hi, e_lo) if alpha_new > a0 else (e_lo, e_hi)
    ell_hi = state.ell_hi * math.exp((1.0 + up) * L) * (1.0 + slack)
    ell_lo = state.ell_lo * math.exp((1.0 + down) * L) * (1.0 - slack)
    i_hi = power_integral(state.ell_hi, a0, L, up)
    i_lo = power_integral(state.ell_lo, a0, L, down)
    inc_lo, inc_hi = min(i_lo, i_hi), max(i_lo, i_hi)
    return replace(
        state,
        alpha=alpha_new,
        ell_lo=ell_lo,
        ell_hi=ell_hi,
        dv_lo=state.dv_lo + inc_lo - slack * abs(inc_lo),
        dv_hi=state.dv_hi + inc_hi + slack * abs(inc_hi),
    )


class _Unconverged(Exception):
    pass


def _advance(state, alpha_new, floor, error_bounds, slack):
    """One step, or raise HypothesisViolated / _Unconverged."""
    if error_bounds is not None:
        new = propagate(state, alpha_new, *error_bounds, slack=slack)
        if floor is not None:
            peak = max(state.product, new.product)
            if peak > floor.validity_cap:
                raise HypothesisViolated(peak, floor.validity_cap)
        return replace(new, radius=math.inf)

    # Along a power-law envelope alpha*ell is monotone, so its maximum over the
    # step sits at an endpoint.  The floor is non-increasing in alpha*ell, so a
    # radius R is certified for the step once floor(max product) >= R.
    R = radius_floor(floor, state.product)
    for _ in range(_RADIUS_ITERATIONS):
        e = error_interval(R)
        new = propagate(state, alpha_new, e.e_lo, e.e_hi, slack=slack)
        R_new = radius_floor(floor, max(state.product, new.product))
        if R_new >= R:
            return replace(new, radius=R)
        R = R_new
    raise _Unconverged(f"tube radius iteration did not settle at alpha={state.alpha!r}")


def _localize_violation(state, alpha_new, floor, error_bounds, slack, tol=BISECT_TOL):
    """Advance as far as possible before alpha*ell_hi crosses the cap."""
    a0 = state.alpha
    lo, hi = 0.0, 1.0
    safe = state
    # bisect on the fraction of the step; stop once the bracket is < tol/2 in alpha
    while (hi - lo) * abs(alpha_new - a0) > 0.5 * tol:
        mid = 0.5 * (lo + hi)
        try:
            safe_mid = _advance(state, a0 + mid * (alpha_new - a0), floor, error_bounds, slack)
        except (HypothesisViolated, _Unconverged):
            hi = mid
        else:
            lo, safe = mid, safe_mid
    crossing_hi = a0 + hi * (alpha_new - a0)
    note = (f"alpha*ell exceeds validity cap {floor.validity_cap} between "
            f"alpha={safe.alpha!r} and alpha={crossing_hi!r}")
    return replace(safe, status=Status.HYPOTHESIS_VIOLATED, note=note)


def step(state: ConeFamilyState, dalpha: float, floor: Optional[RadiusFloor] = None, *,
         error_bounds: Optional[tuple] = None, slack: float = DEFAULT_SLACK) -> ConeFamilyState:
    """Advance the family by ``dalpha``.

    ``error_bounds`` replaces the radius-derived bracket for E (``MODEL_BOUNDS``
    gives the model deformation); with it, ``floor`` is optional and only
    monitors the alpha*ell cap.  Hypothesis failures come back as a state with
    status ``HypothesisViolated``, localized to within 1e-6 in alpha.
    """
    if state.status is not Status.OK:
        raise ValueError(f"cannot step from a state with status {state.status.value}")
    alpha_new = state.alpha + dalpha
    if dalpha == 0 or not alpha_new > 0:
        raise NonPositiveInput(f"invalid step {dalpha!r} from alpha={state.alpha!r}")
    if floor is None and error_bounds is None:
        floor = RadiusFloor()
    try:
        return _advance(state, alpha_new, floor, error_bounds, slack)
    except HypothesisViolated:
        return _localize_violation(state, alpha_new, floor, error_bounds, slack)
    except _Unconverged as exc:
        return replace(state, status=Status.RADIUS_UNCERTIFIED, note=str(exc))


def integrate_to(state: ConeFamilyState, alpha_target: float, dalpha_max: float,
                 floor: Optional[RadiusFloor] = None, *, error_bounds: Optional[tuple] = None,
                 slack: float = DEFAULT_SLACK) -> FamilyTrace:
    """Step from ``state`` to ``alpha_target`` or until the status degrades.

    Steps are at most ``dalpha_max``; a step whose radius iteration does not
    settle is halved, and a step below 1e-12 ends the run as
    ``RadiusUncertified``.  Crossing 2*pi upward is allowed only while every
    recorded radius is at least arctanh(1/sqrt(3)).
    """
    if not alpha_target > 0 or not dalpha_max > 0:
        raise NonPositiveInput("alpha_target and dalpha_max must be positive")
    if floor is None and error_bounds is None:
        floor = RadiusFloor()
    config = {
        "dalpha_max": dalpha_max,
        "slack": slack,
        "floor": floor.to_json() if floor is not None else None,
        "error_bounds": list(error_bounds) if error_bounds is not None else None,
        "parametrization": "t = alpha^2",
    }
    samples = [state]
    h = dalpha_max

    def record(new):
        # a terminal status at an already-recorded alpha replaces that sample so
        # alpha stays strictly monotone along the trace
        if new.alpha == samples[-1].alpha and len(samples) > 1:
            samples[-1] = new
        else:
            samples.append(new)

    def stop(status, note):
        record(replace(samples[-1], status=status, note=note))

    while state.status is Status.OK and state.alpha != alpha_target:
        forward = alpha_target > state.alpha
        goal = alpha_target
        if forward and state.alpha < TWO_PI < alpha_target:
            goal = TWO_PI
        if forward and state.alpha >= TWO_PI:
            low = min(s.radius for s in samples)
            if low < BOUNDARY_RADIUS:
                stop(Status.RADIUS_UNCERTIFIED,
                     f"radius floor {low!r} below arctanh(1/sqrt(3)); cannot pass 2*pi")
                break
        if abs(goal - state.alpha) <= h:
            alpha_new = goal
        else:
            alpha_new = state.alpha + (h if forward else -h)
        try:
            new = _advance(state, alpha_new, floor, error_bounds, slack)
        except _Unconverged as exc:
            h *= 0.5
            if h < MIN_STEP:
                stop(Status.RADIUS_UNCERTIFIED, f"step size underflow: {exc}")
                break
            continue
        except HypothesisViolated:
            state = _localize_violation(state, alpha_new, floor, error_bounds, slack)
            record(state)
            break
        if new.alpha > TWO_PI and new.radius < BOUNDARY_RADIUS:
            stop(Status.RADIUS_UNCERTIFIED,
                 f"radius floor {new.radius!r} below arctanh(1/sqrt(3)) past 2*pi")
            break
        state = new
        samples.append(state)
        h = min(dalpha_max, 2.0 * h)
    return FamilyTrace(samples, config)


@dataclass(frozen=True)
class VolumeChange:
    dv_lo: float
    dv_hi: float
    nz_reference: float


def volume_change_bounds(trace: FamilyTrace, lhat: float) -> VolumeChange:
    """Final volume-decrease enclosure, with the asymptotic reference pi^2 / lhat^2."""
    if not trace.samples:
        raise ValueError("empty trace")
    f = trace.final
    return VolumeChange(f.dv_lo, f.dv_hi, math.pi**2 / lhat**2)


def drilling_certificate(shortest_geodesic: float,
                         cusped_volume_floor: Optional[float] = None) -> Certificate:
    """Volume lower bound for a closed manifold with a short geodesic.

    Geodesics of length at most 0.162 can be drilled; the volume then drops by
    at most 0.329 from the cusped complement, whose volume is at least the
    figure-eight value 2.0299.  Longer geodesics give no information.
    """
    if not shortest_geodesic > 0:
        raise NonPositiveInput(f"geodesic length must be positive, got {shortest_geodesic!r}")
    if cusped_volume_floor is not None and not cusped_volume_floor > 0:
        raise NonPositiveInput(f"cusped volume floor must be positive, got {cusped_volume_floor!r}")
    subject = {"shortest_geodesic": shortest_geodesic}
    thresholds = {"drill_length": DRILL_LENGTH}
    if shortest_geodesic > DRILL_LENGTH:
        return Certificate(Verdict.INCONCLUSIVE, subject=subject, thresholds=thresholds,
                           numbers={"shortest_geodesic": shortest_geodesic})
    universal = MIN_CUSPED_VOLUME - DRILL_VOLUME_LOSS
    numbers = {"shortest_geodesic": shortest_geodesic, "universal_volume_bound": universal}
    bound = universal
    if cusped_volume_floor is not None:
        numbers["relative_volume_bound"] = cusped_volume_floor - DRILL_VOLUME_LOSS
        bound = max(bound, numbers["relative_volume_bound"])
    numbers["volume_lower_bound"] = bound
    numbers["volume_lower_bound_rounded"] = round(bound, 3)
    thresholds.update(drill_volume_loss=DRILL_VOLUME_LOSS, min_cusped_volume=MIN_CUSPED_VOLUME,
                      drill_volume_floor=DRILL_VOLUME_FLOOR)
    return Certificate(Verdict.DRILLABLE, subject=subject, numbers=numbers,
                       thresholds=thresholds, provenance=["drilling-short-geodesic"])


def _wrap_angle(theta: float) -> float:
    w = math.remainder(theta, TWO_PI)
    return math.pi if w == -math.pi else w


def model_complex_length(L0: ComplexLength, alpha0: float, alpha: float) -> ComplexLength:
    """Exact solution of dL/d(alpha) = L/alpha; a model only, never rigorous."""
    if not (alpha0 > 0 and alpha > 0):
        raise NonPositiveInput("cone angles must be positive")
    ratio = alpha / alpha0
    return ComplexLength(L0.re * ratio, _wrap_angle(L0.im * ratio), rigorous=False)


def state_to_json(state: ConeFamilyState) -> dict:
    d = asdict(state)
    d["status"] = state.status.value
    return d
