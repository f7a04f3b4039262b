"""Unit-area flat tori and the lengths of slopes on them.

A cusp shape is stored in reduced form: the modulus ``(x, y)`` of the lattice
spanned by ``1`` and ``x + iy`` (with ``|x| <= 1/2`` and ``x^2 + y^2 >= 1``),
together with an integer marking matrix ``M`` so that a class with user
coordinates ``c`` has reduced coordinates ``M @ c``.  The unit-area reduced
basis is ``(1, 0) / sqrt(y)`` and ``(x, y) / sqrt(y)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DegenerateLattice, DomainError, ZeroClass

DET_TOL = 1e-12
# boundary tolerance of the fundamental domain, used only for tie-breaking
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class Slope:
    """Primitive integer class ``(p, q)``, stored with canonical sign."""

    p: int
    q: int

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if (p, q) != (self.p, self.q):
            raise ValueError(f"slope entries must be integers, got {(self.p, self.q)!r}")
        if p == 0 and q == 0:
            raise ZeroClass("slope (0, 0) is not a curve")
        if math.gcd(p, q) != 1:
            raise DomainError(f"slope ({p}, {q}) is not primitive")
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def __iter__(self):
        yield self.p
        yield self.q


@dataclass(frozen=True)
class WeightedClass:
    """A point of H_1(T, R); a rational point is lambda * (p, q)."""

    x: float
    y: float

    def __iter__(self):
        yield self.x
        yield self.y

    @classmethod
    def from_slope(cls, slope: Slope, weight: float = 1.0) -> "WeightedClass":
        return cls(weight * slope.p, weight * slope.q)


ClassLike = Union[Slope, WeightedClass, Sequence[float]]


@dataclass(frozen=True)
class CuspShape:
    """Unit-area flat torus in reduced form plus the user marking."""

    modulus: tuple[float, float]
    marking: tuple[tuple[int, int], tuple[int, int]] = ((1, 0), (0, 1))
    name: str = field(default="", compare=False)

    @property
    def x(self) -> float:
        return self.modulus[0]

    @property
    def y(self) -> float:
        return self.modulus[1]

    @property
    def marking_array(self) -> np.ndarray:
        return np.array(self.marking, dtype=np.int64)

    def reduced_basis(self) -> np.ndarray:
        """Rows are the unit-area reduced basis vectors."""
        s = 1.0 / math.sqrt(self.y)
        return np.array([[s, 0.0], [self.x * s, self.y * s]])

    def user_basis(self) -> np.ndarray:
        """Rows are the unit-area images of the user basis (up to an isometry)."""
        return self.marking_array.T.astype(float) @ self.reduced_basis()

    def gram(self) -> np.ndarray:
        """Gram matrix of the unit-area metric in user coordinates."""
        b = self.user_basis()
        return b @ b.T

    def to_reduced(self, cls: ClassLike) -> tuple[float, float]:
        c0, c1 = _coords(cls)
        (m00, m01), (m10, m11) = self.marking
        return m00 * c0 + m01 * c1, m10 * c0 + m11 * c1

    def to_user(self, r0: int, r1: int) -> tuple[int, int]:
        (m00, m01), (m10, m11) = self.marking
        det = m00 * m11 - m01 * m10
        # inverse of a unimodular matrix is det * adjugate
        return det * (m11 * r0 - m01 * r1), det * (-m10 * r0 + m00 * r1)


def _coords(cls: ClassLike) -> tuple[float, float]:
    c0, c1 = cls
    return c0, c1


def _reduce_integer_basis(u: np.ndarray, v: np.ndarray):
    """Gauss reduction of the lattice spanned by rows ``u, v``.

    Returns the unimodular integer matrix ``H`` whose rows express the reduced
    basis in terms of ``(u, v)``, and the reduced modulus.
    """
    U = np.array([u, v], dtype=float)
    det = U[0, 0] * U[1, 1] - U[0, 1] * U[1, 0]
    if not math.isfinite(det) or abs(det) < DET_TOL:
        raise DegenerateLattice(f"basis determinant {det!r} is below {DET_TOL}")
    H = [[1, 0], [0, 1]]
    if det < 0:
        H[1] = [-H[1][0], -H[1][1]]

    def tau():
        a = complex(*(H[0][0] * U[0] + H[0][1] * U[1]))
        b = complex(*(H[1][0] * U[0] + H[1][1] * U[1]))
        return b / a

    for _ in range(10_000):
        t = tau()
        n = math.ceil(t.real - 0.5 - _EDGE_TOL)
        if n:
            H[1] = [H[1][0] - n * H[0][0], H[1][1] - n * H[0][1]]
            t = tau()
        if abs(t) ** 2 < 1.0 - _EDGE_TOL:
            H = [H[1], [-H[0][0], -H[0][1]]]
            continue
        break
    else:
        raise RuntimeError("lattice reduction did not terminate")

    # boundary ties go to x >= 0
    t = tau()
    if t.real < -0.5 + _EDGE_TOL:
        H[1] = [H[1][0] + H[0][0], H[1][1] + H[0][1]]
        t = tau()
    if abs(t) ** 2 < 1.0 + _EDGE_TOL and t.real < -_EDGE_TOL:
        H = [H[1], [-H[0][0], -H[0][1]]]
        t = tau()
    return H, (t.real + 0.0, t.imag)


def reduce_shape(raw_basis, name: str = "") -> CuspShape:
    """Canonicalize a flat torus given by two basis vectors (rows of ``raw_basis``)."""
    u, v = np.asarray(raw_basis, dtype=float).reshape(2, 2)
    H, modulus = _reduce_integer_basis(u, v)
    (h00, h01), (h10, h11) = H
    det = h00 * h11 - h01 * h10
    # marking = (H^-1)^T, with H^-1 = det * adj(H)
    marking = ((det * h11, -det * h10), (-det * h01, det * h00))
    return CuspShape(modulus=modulus, marking=marking, name=name)


def shape_from_modulus(x: float, y: float, name: str = "") -> CuspShape:
    if not y > 0:
        raise DegenerateLattice(f"modulus imaginary part must be positive, got {y!r}")
    return reduce_shape([[1.0, 0.0], [x, y]], name=name)


def shape_from_record(record: dict) -> CuspShape:
    """Build a shape from ``{"name", "basis"}`` or ``{"name", "modulus"}``."""
    name = str(record.get("name", ""))
    if "basis" in record:
        return reduce_shape(record["basis"], name=name)
    if "modulus" in record:
        x, y = record["modulus"]
        return shape_from_modulus(float(x), float(y), name=name)
    raise KeyError("shape record needs a 'basis' or a 'modulus' entry")


def _reduced_length(x: float, y: float, r0: float, r1: float) -> float:
    return math.hypot(r0 + r1 * x, r1 * y) / math.sqrt(y)


def normalized_length(shape: CuspShape, cls: ClassLike) -> float:
    c0, c1 = _coords(cls)
    if c0 == 0 and c1 == 0:
        raise ZeroClass("normalized length of the zero class is undefined")
    r0, r1 = shape.to_reduced((c0, c1))
    return _reduced_length(shape.x, shape.y, r0, r1)


def extremal_length(shape: CuspShape, cls: ClassLike) -> float:
    """Square of the normalized length; the limit of alpha / ell at the cusp."""
    return normalized_length(shape, cls) ** 2


def _canonical(p: int, q: int) -> tuple[int, int]:
    if q < 0 or (q == 0 and p < 0):
        return -p, -q
    return p, q


def iter_short_reduced(x: float, y: float, bound: float) -> Iterable[tuple[int, int, float]]:
    """Yield primitive reduced coordinates ``(r0, r1)``, one per +- pair, with length < bound."""
    if bound <= 0:
        return
    sy = math.sqrt(y)
    r1_max = int(math.floor(bound / sy)) + 1
    for r1 in range(0, r1_max + 1):
        rem = bound * bound * y - (r1 * y) ** 2
        if rem < 0:
            break
        w = math.sqrt(rem)
        if r1 == 0:
            lo, hi = 1, int(math.floor(w)) + 1
        else:
            lo = int(math.ceil(-r1 * x - w)) - 1
            hi = int(math.floor(-r1 * x + w)) + 1
        for r0 in range(lo, hi + 1):
            if math.gcd(r0, r1) != 1:
                continue
            length = _reduced_length(x, y, r0, r1)
            if length < bound:
                yield r0, r1, length


def enumerate_slopes(shape: CuspShape, bound: float) -> list[tuple[Slope, float]]:
    """All canonical primitive slopes of normalized length < bound, shortest first."""
    out = []
    for r0, r1, length in iter_short_reduced(shape.x, shape.y, bound):
        p, q = _canonical(*shape.to_user(r0, r1))
        out.append((Slope(p, q), length))
    out.sort(key=lambda item: (item[1], item[0].q, item[0].p))
    return out
