import math

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from drillgauge.constants import BOUNDARY_RADIUS
from drillgauge.errors import BadSignature, NonPositiveInput, NonPositiveRadius
from drillgauge.harmonic_bounds import (
    BoundaryForm,
    b00_upper,
    bmm,
    error_interval,
    l2_upper,
    slice_max,
)

from oracles import grid_slice_max, random_signature_form

pos = st.floats(1e-2, 10.0)
radii = st.floats(1e-2, 12.0)


def test_error_interval_limits():
    e = error_interval(20.0)
    assert abs(e.e_lo) < 1e-16 and e.e_hi < 1e-16
    e = error_interval(math.inf)
    assert (e.e_lo, e.e_hi) == (0.0, 0.0)
    for R in (16.0, 17.5, 100.0, 800.0):
        e = error_interval(R)
        assert abs(e.e_lo) < 1e-12 and e.e_hi < 1e-12


def test_error_interval_high_precision():
    mpmath.mp.dps = 40
    R = mpmath.mpf("0.531")
    s2 = mpmath.sinh(R) ** 2
    e = error_interval(0.531)
    assert e.e_hi == pytest.approx(float(1 / s2), rel=1e-14)
    assert e.e_lo == pytest.approx(float(-(1 / s2) * (2 * s2 + 1) / (2 * s2 + 3)), rel=1e-14)


def test_error_interval_rejects():
    with pytest.raises(NonPositiveRadius):
        error_interval(0.0)
    with pytest.raises(NonPositiveInput):
        error_interval(-1.0)


@settings(max_examples=300, deadline=None)
@given(radii)
def test_error_interval_sign_structure(R):
    e = error_interval(R)
    assert e.e_lo <= 0 <= e.e_hi
    # e_lo > -1 exactly when sinh(R)^2 > 1/2, i.e. R > arctanh(1/sqrt 3)
    if R > BOUNDARY_RADIUS * (1 + 1e-12):
        assert e.e_lo > -1
    elif R < BOUNDARY_RADIUS * (1 - 1e-12):
        assert e.e_lo < -1


def test_e_lo_is_minus_one_at_boundary_radius():
    assert error_interval(BOUNDARY_RADIUS).e_lo == pytest.approx(-1.0, abs=1e-14)
    assert BOUNDARY_RADIUS == pytest.approx(0.65848, abs=1e-5)


def test_error_interval_monotone():
    Rs = np.linspace(0.05, 15, 2000)
    hi = [error_interval(R).e_hi for R in Rs]
    lo = [abs(error_interval(R).e_lo) for R in Rs]
    assert all(a > b for a, b in zip(hi, hi[1:]))
    assert all(a > b for a, b in zip(lo, lo[1:]))


def test_bmm_symbolic():
    a, l, R = sp.symbols("alpha ell R", positive=True)
    area = a * l * sp.sinh(R) * sp.cosh(R)
    m = a * sp.sinh(R)
    expr = sp.simplify(area / (16 * m**4) * (sp.tanh(R) + sp.tanh(R) ** 3))
    f = sp.lambdify((a, l, R), expr, "mpmath")
    mpmath.mp.dps = 30
    ref = float(f(2 * mpmath.pi, mpmath.mpf("0.05"), mpmath.mpf(1)))
    assert bmm(2 * math.pi, 0.05, 1.0) == pytest.approx(ref, rel=1e-13)


def test_l2_power_law_symbolic():
    a, l, R = sp.symbols("alpha ell R", positive=True)
    expr = sp.simplify(a * l * sp.sinh(R) * sp.cosh(R) / (8 * (a * sp.sinh(R)) ** 4) * a**3)
    assert not expr.has(a)
    for alpha in (0.5, 1.0, 3.0, 6.0):
        assert l2_upper(alpha, 0.2, 0.9).bound * alpha**3 == pytest.approx(
            float(expr.subs({l: 0.2, R: 0.9})), rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(pos, pos, radii)
def test_bound_identities(alpha, ell, R):
    t = math.tanh(R)
    b00 = b00_upper(alpha, ell, R)
    m = bmm(alpha, ell, R)
    assert m > 0 and b00 > 0
    assert m == pytest.approx(b00 * (t + t**3) / 2, rel=1e-12)
    assert m <= b00 * (1 + 1e-15)
    rep = l2_upper(alpha, ell, R)
    assert rep.bound == b00
    assert (rep.alpha, rep.ell, rep.radius) == (alpha, ell, R)
    assert bmm(alpha, 2 * ell, R) == pytest.approx(2 * m, rel=1e-14)


def test_b00_limits():
    vals = [b00_upper(2 * math.pi, l, 0.8) for l in (1e-1, 1e-2, 1e-3, 1e-4)]
    ratios = [a / b for a, b in zip(vals, vals[1:])]
    assert ratios == pytest.approx([10.0] * 3, rel=1e-12)
    far = [b00_upper(2 * math.pi, 0.1, R) for R in (5.0, 10.0, 20.0, 40.0)]
    assert all(a > b for a, b in zip(far, far[1:]))
    assert far[-1] < 1e-30


def test_l2_monotone_in_ell():
    ells = np.geomspace(1e-6, 1.0, 40)
    vals = [l2_upper(2 * math.pi, l, 0.65848).bound for l in ells]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[0] < 1e-8


def test_bounds_reject_nonpositive():
    for f in (bmm, b00_upper, l2_upper):
        with pytest.raises(NonPositiveInput):
            f(0.0, 1.0, 1.0)


def test_slice_max_diagonal():
    val, arg = slice_max(BoundaryForm(((1, 0, 0), (0, -1, 0), (0, 0, -1))), (1, 0, 0))
    assert val == 1.0 and np.allclose(arg, [1, 0, 0])
    val, arg = slice_max(BoundaryForm(((4, 0, 0), (0, -1, 0), (0, 0, -2))), (1, 0, 0))
    assert val == 4.0 and np.allclose(arg, [1, 0, 0])


def test_slice_max_scalar_vm():
    q = BoundaryForm(((2, 0.5, 0), (0.5, -1, 0), (0, 0, -1)))
    assert slice_max(q, 3.0)[0] == pytest.approx(slice_max(q, (3.0, 0, 0))[0])
    assert slice_max(q, 3.0)[0] == pytest.approx(9 * (2 + 0.25), rel=1e-14)


def test_slice_max_grid_oracle():
    rng = np.random.default_rng(11)
    for _ in range(25):
        q = random_signature_form(rng)
        c = rng.uniform(0.2, 2.0)
        form = BoundaryForm(tuple(map(tuple, q)))
        val, arg = slice_max(form, (c, 0, 0))
        ref, _ = grid_slice_max(q, c, n=200, rounds=4)
        assert val == pytest.approx(ref, abs=1e-6)
        assert val >= form((c, 0, 0))
        assert form(arg) == pytest.approx(val, rel=1e-12)


def test_slice_max_rotation_invariant():
    rng = np.random.default_rng(5)
    for _ in range(50):
        q = random_signature_form(rng)
        th = rng.uniform(0, 2 * math.pi)
        rot = np.eye(3)
        rot[1:, 1:] = [[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]]
        q2 = rot.T @ q @ rot
        v1 = slice_max(BoundaryForm(tuple(map(tuple, q))), 1.0)[0]
        v2 = slice_max(BoundaryForm(tuple(map(tuple, q2))), 1.0)[0]
        assert v1 == pytest.approx(v2, abs=1e-9)


def test_slice_max_monotone_under_psd_perturbation():
    rng = np.random.default_rng(9)
    for _ in range(50):
        q = random_signature_form(rng)
        lam_max = np.linalg.eigvalsh(q[1:, 1:]).max()
        u = rng.normal(size=2)
        P = np.outer(u, u)
        P *= 0.9 * (-lam_max) / np.linalg.eigvalsh(P).max()
        q2 = q.copy()
        q2[1:, 1:] += P
        v1 = slice_max(BoundaryForm(tuple(map(tuple, q))), 1.0)[0]
        v2 = slice_max(BoundaryForm(tuple(map(tuple, q2))), 1.0)[0]
        assert v2 >= v1 - 1e-12


@pytest.mark.parametrize("m", [
    ((-1, 0, 0), (0, -1, 0), (0, 0, -1)),
    ((1, 0, 0), (0, 1, 0), (0, 0, -1)),
    ((1, 0, 0), (0, -1, 2), (0, 2, -1)),
    ((1, 0.1, 0), (0, -1, 0), (0, 0, -1), (0, 0, 0)),
    ((1, 2, 0), (0, -1, 0), (0, 0, -1)),
])
def test_bad_signature(m):
    with pytest.raises(BadSignature):
        BoundaryForm(m)


def test_slice_max_rejects_off_axis():
    q = BoundaryForm(((1, 0, 0), (0, -1, 0), (0, 0, -1)))
    with pytest.raises(ValueError):
        slice_max(q, (1, 0.5, 0))
    with pytest.raises(ValueError):
        slice_max(q, (0, 0, 0))


def test_boundary_form_json():
    f = BoundaryForm.from_json({"matrix": [[2, 0, 0], [0, -1, 0], [0, 0, -3]], "basis": ["m", "l1", "l2"]})
    assert f((1, 1, 1)) == pytest.approx(2 - 1 - 3)
    with pytest.raises(BadSignature):
        BoundaryForm.from_json({"matrix": [[2, 0, 0], [0, -1, 0], [0, 0, -3]], "basis": ["a", "b", "c"]})
