"""Low-level numerics: 2x2 helpers, quadrature, Schwarzian, and the ODE core.

Every routine here is checked against an independent oracle: closed forms,
lgamma-based Beta values, numpy's generic linear algebra, or brute-force
matrix powers.
"""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxface import algebra as alg
from maxface.errors import DegenerateError, ValidationError

# ---------------------------------------------------------------------------
# strategies
# ---------------------------------------------------------------------------

finite = st.floats(min_value=-10.0, max_value=10.0,
                   allow_nan=False, allow_infinity=False)


@st.composite
def complex_nums(draw, min_mag=0.0, max_mag=10.0):
    re = draw(finite)
    im = draw(finite)
    z = complex(re, im)
    if abs(z) < min_mag or abs(z) > max_mag:
        z = complex(min_mag + 0.5, 0.25)
    return z


@st.composite
def gl2_matrices(draw):
    """Invertible 2x2 complex matrices with decent conditioning."""
    entries = [draw(complex_nums()) for _ in range(4)]
    a = alg.mat2(*entries)
    d = alg.det2(a)
    if abs(d) < 0.1:
        a = a + 1.5 * alg.EYE2
    return a


@st.composite
def su11_matrices(draw):
    """Exact-parametrization SU(1,1): [[a, b], [conj(b), conj(a)]]."""
    phi = draw(st.floats(min_value=-3.0, max_value=3.0))
    psi = draw(st.floats(min_value=-3.0, max_value=3.0))
    r = draw(st.floats(min_value=0.0, max_value=2.0))
    aa = cmath.exp(1j * phi) * math.cosh(r)
    bb = cmath.exp(1j * psi) * math.sinh(r)
    return alg.mat2(aa, bb, bb.conjugate(), aa.conjugate())


# ---------------------------------------------------------------------------
# 2x2 helpers
# ---------------------------------------------------------------------------

def test_mat2_layout():
    a = alg.mat2(1, 2, 3, 4)
    assert a[0, 0] == 1 and a[0, 1] == 2 and a[1, 0] == 3 and a[1, 1] == 4


@given(gl2_matrices())
@settings(max_examples=60, deadline=None)
def test_det_inv_against_numpy(a):
    assert alg.det2(a) == pytest.approx(complex(np.linalg.det(a)), rel=1e-9)
    assert np.allclose(alg.inv2(a), np.linalg.inv(a), atol=1e-9)
    assert np.allclose(alg.inv2(a) @ a, alg.EYE2, atol=1e-9)


def test_inv_singular_raises():
    with pytest.raises(DegenerateError):
        alg.inv2(alg.mat2(1, 2, 2, 4))


@given(gl2_matrices(), gl2_matrices(), complex_nums())
@settings(max_examples=60, deadline=None)
def test_moebius_composition(a, b, z):
    lhs = alg.moebius_apply(a @ b, z)
    rhs = alg.moebius_apply(a, alg.moebius_apply(b, z))
    if alg.is_infinity(lhs) or alg.is_infinity(rhs):
        assert alg.is_infinity(lhs) == alg.is_infinity(rhs) or \
            max(abs(lhs), abs(rhs)) > 1e8
    else:
        assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-6)


def test_moebius_identity_and_infinity():
    assert alg.moebius_apply(alg.EYE2, 3.5 + 1j) == 3.5 + 1j
    a = alg.mat2(2, 1, 1, 1)
    assert alg.moebius_apply(a, complex("inf")) == pytest.approx(2.0)
    assert alg.is_infinity(alg.moebius_apply(a, -1.0))


@given(su11_matrices())
@settings(max_examples=60, deadline=None)
def test_su11_defect_zero_on_members(a):
    assert alg.su11_defect(a).defect < 1e-12


def test_su11_defect_positive_off_group():
    rot = alg.mat2(math.cos(0.3), -math.sin(0.3),
                   math.sin(0.3), math.cos(0.3))  # SU(2), not SU(1,1)
    assert alg.su11_defect(rot).defect > 0.1
    assert alg.su2_defect(rot).defect < 1e-12


@given(su11_matrices(), su11_matrices())
@settings(max_examples=40, deadline=None)
def test_su11_closed_under_product(a, b):
    assert alg.su11_defect(a @ b).defect < 1e-10


# ---------------------------------------------------------------------------
# integer matrix powers (trig form) vs brute force
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("m", [-7, -2, -1, 0, 1, 2, 3, 8, 25])
def test_mat_power_trig_vs_brute_force(m):
    th = 0.7342
    rot = alg.mat2(math.cos(th), -math.sin(th), math.sin(th), math.cos(th))
    g = alg.mat2(1.3, 0.4 + 0.2j, -0.1j, (1 + (0.4 + 0.2j) * (-0.1j)) / 1.3)
    a = g @ rot @ alg.inv2(g)  # unimodular, real trace 2cos(th)
    want = np.linalg.matrix_power(a, m) if m >= 0 else \
        np.linalg.matrix_power(np.linalg.inv(a), -m)
    assert np.allclose(alg.mat_power_trig(a, m), want, atol=1e-9)


def test_mat_power_trig_rejects_hyperbolic():
    with pytest.raises(DegenerateError):
        alg.mat_power_trig(alg.mat2(2.0, 0, 0, 0.5), 3)


def test_mat_power_trig_rejects_nonunimodular():
    with pytest.raises(ValidationError):
        alg.mat_power_trig(alg.mat2(2.0, 0, 0, 1.0), 2)


# ---------------------------------------------------------------------------
# quadrature: Beta-function oracle through lgamma
# ---------------------------------------------------------------------------

def beta_lgamma(x, y):
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


@pytest.mark.parametrize("x,y", [
    (0.5, 0.5), (0.75, 0.25), (1.5, 2.5), (0.3333333333333333, 0.5),
    (2.0, 3.0), (0.1, 0.9),
])
def test_tanh_sinh_beta_oracle(x, y):
    spec = alg.QuadratureSpec(left_exponent=x - 1.0, right_exponent=y - 1.0,
                              tol=1e-12)
    val = alg.quad_singular(
        lambda a, b: a ** (x - 1.0) * b ** (y - 1.0), spec)
    assert complex(val).real == pytest.approx(beta_lgamma(x, y), rel=1e-11)
    assert abs(complex(val).imag) < 1e-12


def test_tanh_sinh_rejects_divergent_exponent():
    with pytest.raises(ValidationError):
        alg.QuadratureSpec(left_exponent=-1.0, right_exponent=0.0)


def test_gk_adaptive_oracles():
    val = alg.gk_adaptive(lambda s: math.exp(s), 0.0, 1.0, 1e-12)
    assert complex(val).real == pytest.approx(math.e - 1.0, rel=1e-12)
    val = alg.gk_adaptive(lambda s: cmath.exp(1j * s), 0.0, math.pi, 1e-12)
    assert complex(val) == pytest.approx(2j, rel=1e-11)


# ---------------------------------------------------------------------------
# Schwarzian derivative: closed-form oracles
# ---------------------------------------------------------------------------

def test_schwarzian_square():
    # S(z^2) = -3/(2 z^2)
    z = 1.7 - 0.4j
    got = alg.schwarzian_fd(lambda u: u * u, z)
    # FD noise floor ~ macheps / step^3 at the default step
    assert got == pytest.approx(-1.5 / z ** 2, rel=1e-5)


@pytest.mark.parametrize("nu", [0.5, 1.5, 2.0, 3.25])
def test_schwarzian_power(nu):
    # S(z^nu) = (1 - nu^2) / (2 z^2)
    z = 2.1 + 0.3j
    got = alg.schwarzian_fd(lambda u: u ** nu, z)
    assert got == pytest.approx((1.0 - nu * nu) / (2.0 * z * z), rel=5e-5)


def test_schwarzian_moebius_vanishes():
    a = alg.mat2(2.0, 1.0 + 1j, 0.5j, 1.0)
    got = alg.schwarzian_fd(lambda u: alg.moebius_apply(a, u), 1.3 + 0.9j)
    assert abs(got) < 1e-5


def test_schwarzian_exp():
    # S(e^z) = -1/2 everywhere
    got = alg.schwarzian_fd(cmath.exp, 0.4 - 1.1j)
    assert got == pytest.approx(-0.5, rel=1e-5)


def test_schwarzian_flags_critical_point():
    with pytest.raises(DegenerateError):
        alg.schwarzian_fd(lambda u: u * u, 0.0)


# ---------------------------------------------------------------------------
# Dormand-Prince: closed-form linear ODEs
# ---------------------------------------------------------------------------

def test_dp_scalar_exponential():
    y = alg.dormand_prince(lambda s, v: v, np.array([1.0 + 0j]), 0.0, 2.0,
                           rtol=1e-12, atol=1e-14)
    assert complex(y[0]) == pytest.approx(math.exp(2.0), rel=1e-10)


def test_dp_rotation():
    y = alg.dormand_prince(lambda s, v: 1j * v, np.array([1.0 + 0j]),
                           0.0, math.pi, rtol=1e-12, atol=1e-14)
    assert complex(y[0]) == pytest.approx(-1.0, abs=1e-10)


def test_dp_matrix_exponential():
    m = alg.mat2(0.3, 1.2 - 0.5j, -0.7j, -0.3)

    def rhs(s, v):
        return (m @ v.reshape(2, 2)).reshape(-1)

    y = alg.dormand_prince(rhs, alg.EYE2.reshape(-1).copy(), 0.0, 1.0,
                           rtol=1e-12, atol=1e-14).reshape(2, 2)
    # oracle: diagonalize m by hand through numpy's generic eig
    vals, vecs = np.linalg.eig(m)
    want = vecs @ np.diag(np.exp(vals)) @ np.linalg.inv(vecs)
    assert np.allclose(y, want, atol=1e-10)
    # det exp(m) = exp(tr m), tr m = 0 here
    assert alg.det2(y) == pytest.approx(1.0, rel=1e-10)


def test_dp_backward_integration():
    fwd = alg.dormand_prince(lambda s, v: v * s, np.array([1.0 + 0j]),
                             0.0, 1.5, rtol=1e-12, atol=1e-14)
    back = alg.dormand_prince(lambda s, v: v * s, fwd, 1.5, 0.0,
                              rtol=1e-12, atol=1e-14)
    assert complex(back[0]) == pytest.approx(1.0, rel=1e-9)


def test_dp_tolerance_scaling():
    loose = alg.dormand_prince(lambda s, v: v, np.array([1.0 + 0j]), 0.0, 5.0,
                               rtol=1e-6, atol=1e-8)
    tight = alg.dormand_prince(lambda s, v: v, np.array([1.0 + 0j]), 0.0, 5.0,
                               rtol=1e-13, atol=1e-15)
    exact = math.exp(5.0)
    assert abs(complex(tight[0]) - exact) < abs(complex(loose[0]) - exact)
    assert complex(tight[0]) == pytest.approx(exact, rel=1e-12)


def test_ensure_finite_catches_nan():
    with pytest.raises(Exception):
        alg.ensure_finite(np.array([1.0, float("nan")]))
