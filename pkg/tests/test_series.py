"""Series arithmetic tests against independent expansion/evaluation oracles."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bishopdiscs.errors import ParameterDimensionMismatch
from bishopdiscs.series import (
    BidegreeSeries, ComplexParam, ParamPoly, eval_matrix, quadric_series,
)


def S(values, nvars=0, max_degree=10):
    return BidegreeSeries.from_complex_dict(values, nvars, max_degree)


# --------------------------------------------------------------------------
# independent oracles
# --------------------------------------------------------------------------

def brute_force_product(a_vals, b_vals, max_degree):
    """Dense convolution of complex coefficient dicts, then truncation."""
    out = {}
    for (j1, k1), c1 in a_vals.items():
        for (j2, k2), c2 in b_vals.items():
            j, k = j1 + j2, k1 + k2
            if j + k <= max_degree:
                out[(j, k)] = out.get((j, k), 0.0) + c1 * c2
    return {jk: c for jk, c in out.items() if c != 0.0}


def horner_evaluate(values, z):
    """Row-by-row Horner evaluation, independent of BidegreeSeries.evaluate."""
    max_j = max(j for j, _ in values)
    max_k = max(k for _, k in values)
    total = 0.0 + 0.0j
    for j in range(max_j, -1, -1):
        row = 0.0 + 0.0j
        for k in range(max_k, -1, -1):
            row = row * np.conj(z) + values.get((j, k), 0.0)
        total = total * z + row
    return total


# --------------------------------------------------------------------------
# multiply
# --------------------------------------------------------------------------

def test_multiply_monomials():
    z = S({(1, 0): 1.0})
    zbar = S({(0, 1): 1.0})
    prod = z * zbar
    assert prod.coeffs.keys() == {(1, 1)}
    assert prod.coeff(1, 1).evaluate(np.zeros(0)) == 1.0


def test_multiply_difference_of_squares():
    a = S({(1, 0): 1.0, (0, 1): 1.0})
    b = S({(1, 0): 1.0, (0, 1): -1.0})
    prod = a * b
    vals = {jk: prod.coeff(*jk).evaluate(np.zeros(0)) for jk in prod.coeffs}
    assert vals == {(2, 0): 1.0, (0, 2): -1.0}


def test_multiply_quadric_square_against_expansion():
    # q = z zbar + 0.25 (z^2 + zbar^2); q*q expanded by hand:
    # 0.0625 z^4 + 0.5 z^3 zbar + 1.125 z^2 zbar^2 + 0.5 z zbar^3 + 0.0625 zbar^4
    q_vals = {(1, 1): 1.0, (2, 0): 0.25, (0, 2): 0.25}
    q = S(q_vals)
    sq = q * q
    expected = {(4, 0): 0.0625, (3, 1): 0.5, (2, 2): 1.125,
                (1, 3): 0.5, (0, 4): 0.0625}
    got = {jk: sq.coeff(*jk).evaluate(np.zeros(0)) for jk in sq.coeffs}
    assert got == expected
    assert got == brute_force_product(q_vals, q_vals, 10)


def test_multiply_truncates_to_min_degree():
    a = S({(3, 0): 1.0}, max_degree=4)
    b = S({(0, 3): 1.0}, max_degree=10)
    prod = a * b
    assert prod.max_degree == 4
    assert prod.coeffs == {}


def test_parameter_dimension_mismatch():
    a = BidegreeSeries.from_complex_dict({(1, 0): 1.0}, nvars=2, max_degree=4)
    b = BidegreeSeries.from_complex_dict({(1, 0): 1.0}, nvars=1, max_degree=4)
    with pytest.raises(ParameterDimensionMismatch):
        a * b


# --------------------------------------------------------------------------
# evaluate
# --------------------------------------------------------------------------

def test_evaluate_quadric_points():
    q0 = quadric_series(0.0, nvars=0)
    assert q0.evaluate(np.zeros(0), 0.5) == pytest.approx(0.25, abs=1e-15)
    q = quadric_series(0.25, nvars=0)
    assert q.evaluate(np.zeros(0), 1.0) == pytest.approx(1.5, abs=1e-15)


def test_evaluate_against_horner_oracle():
    rng = np.random.default_rng(7)
    for _ in range(20):
        vals = {}
        for j in range(5):
            for k in range(5):
                if rng.random() < 0.6:
                    vals[(j, k)] = complex(rng.normal(), rng.normal())
        if not vals:
            continue
        s = S(vals, max_degree=8)
        z = complex(rng.normal(), rng.normal()) * 0.4
        ours = s.evaluate(np.zeros(0), z)
        ref = horner_evaluate(vals, z)
        assert abs(ours - ref) < 1e-13 * (1.0 + abs(ref))


def test_evaluate_with_parameters():
    # coefficient (1,1) equal to 1 + x2: value at x2=0.5, z=2 is 1.5*4 = 6
    one_plus_x = ComplexParam(
        ParamPoly(2, 2, {(0, 0): 1.0, (1, 0): 1.0}), ParamPoly.zero(2, 2))
    s = BidegreeSeries(2, 4, 2, {(1, 1): one_plus_x})
    assert s.evaluate(np.array([0.5, 0.0]), 2.0) == pytest.approx(6.0, abs=1e-14)


def test_eval_matrix_matches_series_evaluate():
    rng = np.random.default_rng(3)
    vals = {(j, k): complex(rng.normal(), rng.normal())
            for j in range(4) for k in range(4)}
    s = S(vals, max_degree=6)
    z = rng.normal(size=8) * 0.3 + 1j * rng.normal(size=8) * 0.3
    direct = np.array([s.evaluate(np.zeros(0), zi) for zi in z])
    fast = eval_matrix(s.to_matrix(), z)
    assert np.max(np.abs(direct - fast)) < 1e-13


# --------------------------------------------------------------------------
# derivatives
# --------------------------------------------------------------------------

def test_derivative_zbar_monomial():
    s = S({(1, 1): 1.0})
    d = s.derivative_zbar()
    assert {jk: d.coeff(*jk).evaluate(np.zeros(0)) for jk in d.coeffs} == {(1, 0): 1.0}


def test_derivative_z_quadric():
    lam = 0.3
    q = quadric_series(lam, nvars=0)
    d = q.derivative_z()
    got = {jk: d.coeff(*jk).evaluate(np.zeros(0)) for jk in d.coeffs}
    assert got == {(0, 1): 1.0, (1, 0): 2 * lam}


def test_derivative_against_finite_differences():
    rng = np.random.default_rng(11)
    vals = {}
    for j in range(4):
        for k in range(j, 4):
            c = complex(rng.normal(), rng.normal())
            vals[(j, k)] = c
            vals[(k, j)] = np.conj(c)
    s = S(vals, max_degree=8)
    dzb = s.derivative_zbar()
    h = 1e-6
    x = np.zeros(0)
    for z in 0.3 * (rng.normal(size=5) + 1j * rng.normal(size=5)):
        fd_x = (s.evaluate(x, z + h) - s.evaluate(x, z - h)) / (2 * h)
        fd_y = (s.evaluate(x, z + 1j * h) - s.evaluate(x, z - 1j * h)) / (2 * h)
        wirtinger_zbar = 0.5 * (fd_x + 1j * fd_y)
        exact = dzb.evaluate(x, z)
        assert abs(wirtinger_zbar - exact) < 1e-7 * (1.0 + abs(exact))


# --------------------------------------------------------------------------
# structural properties (exact coefficient arithmetic)
# --------------------------------------------------------------------------

dyadic = st.integers(min_value=-8, max_value=8).map(lambda k: k / 16.0)


@st.composite
def small_series(draw, max_degree=4):
    n_terms = draw(st.integers(0, 5))
    vals = {}
    for _ in range(n_terms):
        j = draw(st.integers(0, 3))
        k = draw(st.integers(0, 3))
        vals[(j, k)] = complex(draw(dyadic), draw(dyadic))
    return S(vals, max_degree=max_degree)


@st.composite
def real_series(draw, max_degree=6):
    """Random real-valued series with arbitrary float coefficients."""
    vals = {}
    n_terms = draw(st.integers(1, 6))
    for _ in range(n_terms):
        j = draw(st.integers(0, 3))
        k = draw(st.integers(0, 3))
        re = draw(st.floats(-2, 2, allow_nan=False, width=32))
        im = draw(st.floats(-2, 2, allow_nan=False, width=32))
        if j == k:
            vals[(j, k)] = complex(re, 0.0)
        else:
            vals[(j, k)] = complex(re, im)
            vals[(k, j)] = complex(re, -im)
    return S(vals, max_degree=max_degree)


@settings(max_examples=100, deadline=None)
@given(small_series(), small_series())
def test_multiply_commutative_exact(a, b):
    assert (a * b).coeffs == (b * a).coeffs


@settings(max_examples=60, deadline=None)
@given(small_series(), small_series(), small_series())
def test_multiply_associative_exact_on_dyadics(a, b, c):
    # dyadic coefficients with small exponents stay exact in binary floats,
    # so association must be coefficient-exact
    assert ((a * b) * c).coeffs == (a * (b * c)).coeffs


@settings(max_examples=80, deadline=None)
@given(real_series(), real_series())
def test_multiply_preserves_reality_exactly(a, b):
    assert a.is_real()
    assert b.is_real()
    assert (a * b).is_real()


@settings(max_examples=60, deadline=None)
@given(small_series(), small_series())
def test_leibniz_rule_exact_on_dyadics(a, b):
    lhs = (a * b).derivative_z()
    rhs = a.derivative_z() * b + a * b.derivative_z()
    assert lhs.coeffs == rhs.coeffs


@settings(max_examples=50, deadline=None)
@given(real_series())
def test_real_series_evaluates_real(s):
    rng = np.random.default_rng(0)
    for z in 0.4 * (rng.normal(size=4) + 1j * rng.normal(size=4)):
        val = s.evaluate(np.zeros(0), z)
        assert abs(val.imag) < 1e-12 * (1.0 + abs(val))


def test_real_imag_split():
    rng = np.random.default_rng(5)
    vals = {(j, k): complex(rng.normal(), rng.normal())
            for j in range(3) for k in range(3)}
    s = S(vals, max_degree=6)
    re, im = s.real_part(), s.imag_part()
    assert re.is_real() and im.is_real()
    z = 0.3 + 0.2j
    v = s.evaluate(np.zeros(0), z)
    assert re.evaluate(np.zeros(0), z) == pytest.approx(v.real, abs=1e-14)
    assert im.evaluate(np.zeros(0), z) == pytest.approx(v.imag, abs=1e-14)


def test_serialization_round_trip():
    p = ParamPoly(2, 2, {(0, 0): 0.5, (1, 0): -1.25, (0, 2): 3.0})
    assert ParamPoly.from_list(p.to_list(), 2, 2) == p
    lam = ParamPoly(2, 2, {(0, 0): 0.2, (1, 0): 0.05})
    s = quadric_series(lam, nvars=2)
    back = BidegreeSeries.from_list(s.to_list(), 2, s.max_degree)
    assert back.coeffs == s.coeffs
