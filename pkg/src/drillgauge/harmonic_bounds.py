"""Boundary-term bounds for harmonic deformations of cone-manifolds.

All quantities depend only on the tube boundary torus: cone angle ``alpha``,
core length ``ell`` and tube radius ``R``.  The cone-angle family is
parametrized by ``t = alpha**2``, which fixes the scale of the model form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadSignature, NonPositiveInput, NonPositiveRadius
from .tube import boundary_area, meridian_length


def inv_sinh_squared(R: float) -> float:
    """1 / sinh(R)**2, stable for large R."""
    if math.isinf(R):
        return 0.0
    if R > 20.0:
        q = math.exp(-2.0 * R)
        return 4.0 * q / (1.0 - q) ** 2
    return 1.0 / math.sinh(R) ** 2


@dataclass(frozen=True)
class ErrorInterval:
    """Bracket for E in d(ell)/d(alpha) = (ell / alpha) * (1 + E)."""

    e_lo: float
    e_hi: float
    radius: float


def error_interval(R: float) -> ErrorInterval:
    if not R > 0:
        raise NonPositiveRadius(f"tube radius must be positive, got {R!r}")
    inv = inv_sinh_squared(R)
    if inv == 0.0:
        return ErrorInterval(-0.0, 0.0, R)
    s2 = 1.0 / inv
    e_lo = -inv * (2.0 * s2 + 1.0) / (2.0 * s2 + 3.0)
    return ErrorInterval(e_lo, inv, R)


def _check(alpha, ell, R):
    for key, val in (("alpha", alpha), ("ell", ell), ("R", R)):
        if not val > 0:
            raise NonPositiveInput(f"{key} must be positive, got {val!r}")


def bmm(alpha: float, ell: float, R: float) -> float:
    """Boundary term of the model deformation, area/(16 m^4) * (tanh R + tanh^3 R)."""
    _check(alpha, ell, R)
    m = meridian_length(alpha, R)
    t = math.tanh(R)
    return boundary_area(alpha, ell, R) / (16.0 * m**4) * (t + t**3)


def b00_upper(alpha: float, ell: float, R: float) -> float:
    """Upper bound area/(8 m^4) for the boundary term of the cusp-holonomy part."""
    _check(alpha, ell, R)
    m = meridian_length(alpha, R)
    return boundary_area(alpha, ell, R) / (8.0 * m**4)


@dataclass(frozen=True)
class L2BoundReport:
    bound: float
    alpha: float
    ell: float
    radius: float


def l2_upper(alpha: float, ell: float, R: float) -> L2BoundReport:
    """Bound on the squared L2 norm outside the tube plus the correction inside it."""
    return L2BoundReport(bound=b00_upper(alpha, ell, R), alpha=alpha, ell=ell, radius=R)


@dataclass(frozen=True)
class BoundaryForm:
    """Quadratic form on W = W_m + W_l, with the first axis spanning W_m."""

    matrix: tuple[tuple[float, float, float], ...]
    basis_labels: tuple[str, str, str] = ("m", "l1", "l2")

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        if a.shape != (3, 3) or not np.all(np.isfinite(a)):
            raise BadSignature("boundary form must be a finite 3x3 matrix")
        if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
            raise BadSignature("boundary form must be symmetric")
        a = 0.5 * (a + a.T)
        object.__setattr__(self, "matrix", tuple(tuple(map(float, row)) for row in a))
        if a[0, 0] <= 0:
            raise BadSignature("form must be positive on the W_m axis")
        if np.linalg.eigvalsh(a[1:, 1:]).max() >= 0:
            raise BadSignature("form must be negative definite on W_l")
        eig = np.linalg.eigvalsh(a)
        if not (np.sum(eig > 0) == 1 and np.sum(eig < 0) == 2):
            raise BadSignature(f"form signature is not (+,-,-): eigenvalues {eig}")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix)

    def __call__(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(v @ self.array @ v)

    @classmethod
    def from_json(cls, data: dict) -> "BoundaryForm":
        labels = tuple(data.get("basis", ("m", "l1", "l2")))
        if labels != ("m", "l1", "l2"):
            raise BadSignature(f"basis labels must be ['m', 'l1', 'l2'], got {list(labels)}")
        return cls(tuple(map(tuple, data["matrix"])), labels)


def slice_max(form: BoundaryForm, v_m) -> tuple[float, np.ndarray]:
    """Maximize Q(v_m + w) over w in W_l subject to Q(v_m + w) >= 0.

    Restricted to the affine plane ``v_m + W_l`` the form is a concave
    quadratic in ``w`` (the W_l block is negative definite), so the admissible
    set is a filled ellipse and the maximum is at its center.
    """
    v_m = np.asarray(v_m, dtype=float).reshape(-1)
    if v_m.size == 1:
        v_m = np.array([v_m[0], 0.0, 0.0])
    if v_m.shape != (3,) or np.any(v_m[1:] != 0.0):
        raise ValueError("v_m must lie on the W_m axis")
    q = form.array
    c = v_m[0]
    if q[0, 0] * c * c <= 0:
        raise ValueError("Q(v_m) must be positive")
    block = q[1:, 1:]
    lam, P = np.linalg.eigh(block)
    if lam.max() >= 0:
        raise BadSignature("form must be negative definite on W_l")
    # Q(v + w) = a c^2 + 2 c b.w + w^T C w; in eigen-coordinates z = P^T w
    g = P.T @ (c * q[0, 1:])
    z = -g / lam
    w = P @ z
    value = q[0, 0] * c * c - float(np.sum(g * g / lam))
    return value, np.concatenate(([c], w))
