"""Embedded tube around the core geodesic and pluggable tube-radius floors."""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .constants import PRODUCT_CAP, TUBE_RADIUS_FLOOR
from .errors import BadConfig, HypothesisViolated, InfiniteRadius, NonPositiveInput


def _check_positive(**values):
    for key, val in values.items():
        if not (val > 0):
            raise NonPositiveInput(f"{key} must be positive, got {val!r}")


def kappa(R: float) -> float:
    """Principal normal curvature coth(R) of the tube boundary; 1 at the cusp."""
    _check_positive(R=R)
    if math.isinf(R):
        return 1.0
    return 1.0 / math.tanh(R)


def meridian_length(alpha: float, R: float) -> float:
    _check_positive(alpha=alpha, R=R)
    if math.isinf(R):
        raise InfiniteRadius("meridian length diverges at R = inf")
    return alpha * math.sinh(R)


def boundary_area(alpha: float, ell: float, R: float) -> float:
    """Area of the equidistant torus: alpha * ell * sinh(R) * cosh(R)."""
    _check_positive(alpha=alpha, ell=ell, R=R)
    if math.isinf(R):
        raise InfiniteRadius("tube boundary area diverges at R = inf")
    return alpha * ell * math.sinh(R) * math.cosh(R)


@dataclass(frozen=True)
class TubeBoundary:
    radius: float
    cone_angle: float
    core_length: float
    meridian: float
    area: float
    kappa: float


def tube_boundary(alpha: float, ell: float, R: float) -> TubeBoundary:
    return TubeBoundary(
        radius=R,
        cone_angle=alpha,
        core_length=ell,
        meridian=meridian_length(alpha, R),
        area=boundary_area(alpha, ell, R),
        kappa=kappa(R),
    )


class FloorKind(str, Enum):
    CONSTANT = "ConstantFloor"
    TABULATED = "Tabulated"


@dataclass(frozen=True)
class RadiusFloor:
    """Lower bound for the tube radius as a function of alpha * ell.

    A constant floor asserts ``R >= floor_value`` whenever ``alpha*ell`` stays
    below ``validity_cap``.  A tabulated floor interpolates a user table of
    ``(alpha*ell, R_min)`` pairs; past the last entry it holds the last value up
    to the cap, and below the first entry it holds the first value.
    """

    kind: FloorKind = FloorKind.CONSTANT
    floor_value: float = TUBE_RADIUS_FLOOR
    table: tuple[tuple[float, float], ...] = ()
    validity_cap: float = PRODUCT_CAP

    def __post_init__(self):
        object.__setattr__(self, "kind", FloorKind(self.kind))
        if not self.validity_cap > 0:
            raise BadConfig(f"validity_cap must be positive, got {self.validity_cap!r}")
        if self.kind is FloorKind.CONSTANT:
            if not self.floor_value > 0:
                raise BadConfig(f"floor_value must be positive, got {self.floor_value!r}")
            return
        table = tuple(sorted((float(a), float(r)) for a, r in self.table))
        if not table:
            raise BadConfig("tabulated floor needs at least one entry")
        for (a0, r0), (a1, r1) in zip(table, table[1:]):
            if not (a1 > a0 and r1 < r0):
                raise BadConfig("floor table must be strictly decreasing in alpha*ell")
        if table[0][0] <= 0 or table[-1][1] <= 0:
            raise BadConfig("floor table entries must be positive")
        object.__setattr__(self, "table", table)

    @classmethod
    def constant(cls, value: float = TUBE_RADIUS_FLOOR, validity_cap: float = PRODUCT_CAP):
        return cls(FloorKind.CONSTANT, floor_value=value, validity_cap=validity_cap)

    @classmethod
    def tabulated(cls, table, validity_cap: float = PRODUCT_CAP):
        return cls(FloorKind.TABULATED, table=tuple(map(tuple, table)), validity_cap=validity_cap)

    @classmethod
    def from_json(cls, data: dict) -> "RadiusFloor":
        unknown = set(data) - {"kind", "floor_value", "table", "validity_cap"}
        if unknown:
            raise BadConfig(f"unknown floor keys: {sorted(unknown)}")
        cap = float(data.get("validity_cap", PRODUCT_CAP))
        if "table" in data and data.get("kind", FloorKind.TABULATED.value) == FloorKind.TABULATED.value:
            return cls.tabulated(data["table"], validity_cap=cap)
        return cls.constant(float(data.get("floor_value", TUBE_RADIUS_FLOOR)), validity_cap=cap)

    @classmethod
    def load(cls, path) -> "RadiusFloor":
        return cls.from_json(json.loads(Path(path).read_text()))

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "validity_cap": self.validity_cap}
        if self.kind is FloorKind.CONSTANT:
            out["floor_value"] = self.floor_value
        else:
            out["table"] = [list(row) for row in self.table]
        return out


def radius_floor(floor: RadiusFloor, product: float) -> float:
    """Certified tube radius for a given alpha*ell.

    Raises HypothesisViolated when the product exceeds the floor's cap.
    """
    _check_positive(product=product)
    if product > floor.validity_cap:
        raise HypothesisViolated(product, floor.validity_cap)
    if floor.kind is FloorKind.CONSTANT:
        return floor.floor_value
    table = floor.table
    keys = [a for a, _ in table]
    i = bisect.bisect_left(keys, product)
    if i < len(keys) and keys[i] == product:
        return table[i][1]
    if i == 0:
        return table[0][1]
    if i == len(keys):
        return table[-1][1]
    (a0, r0), (a1, r1) = table[i - 1], table[i]
    value = r0 + (r1 - r0) * (product - a0) / (a1 - a0)
    # interpolated values are pushed down one ulp so the floor never overstates
    return max(math.nextafter(value, -math.inf), r1)
