import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from levelcross import models as m
from levelcross import specfun as sf

# -- long-series oracle (extended precision, plain summation) -----------------

def oracle_2f1(p, q, r, z, dps=40, max_terms=400_000):
    with mp.workdps(dps):
        pp, qq, rr, zz = mp.mpf(p), mp.mpf(q), mp.mpf(r), mp.mpc(z)
        total = mp.mpc(1)
        term = mp.mpc(1)
        for k in range(max_terms):
            term *= (pp + k) * (qq + k) / ((rr + k) * (1 + k)) * zz
            total += term
            if abs(term) < mp.mpf(10) ** (-30) * abs(total):
                break
        # guard the oracle itself against truncation: library evaluation
        # must agree far below the 1e-12 comparison level
        lib = mp.hyp2f1(pp, qq, rr, zz)
        assert abs(total - lib) <= mp.mpf(10) ** (-16) * max(1, abs(lib))
        return complex(total)


# frozen from the dps=40 oracle above
F_QUARTER_HALF = 1.0586518057536175   # F(1/4, 3/4; 2; 1/2)
# Gauss summation at z=1: Gamma(2)Gamma(2)/(Gamma(3/2)Gamma(5/2)) = 8/(3 pi)
F_HALF_AT_ONE = 8.0 / (3.0 * math.pi)

# frozen mpmath value; the brute-force oracle below rechecks it coarsely
J_SUBLINEAR_1_025 = 1.4991796781651199


def test_hyp2f1_at_zero():
    assert sf.hyp2f1(0.25, 0.75, 2.0, 0.0) == 1.0


def test_hyp2f1_gauss_summation_at_one():
    val = sf.hyp2f1(0.5, -0.5, 2.0, 1.0)
    assert val.imag == 0.0
    assert val.real == pytest.approx(F_HALF_AT_ONE, rel=1e-14)


def test_hyp2f1_frozen_series_value():
    val = sf.hyp2f1(0.25, 0.75, 2.0, 0.5)
    assert val.real == pytest.approx(F_QUARTER_HALF, rel=1e-13)


_REAL_GRID = [0.0, 0.25, -0.25, 0.5, -0.5, 0.9, -0.9]
# only the r - p - q = 2 parameter set converges usefully on the unit
# circle (terms fall like k^-3); the other set is never evaluated there
_CIRCLE_GRID = [cmath.exp(0.5j), cmath.exp(2.0j)]


@pytest.mark.parametrize("params", [(0.25, 0.75, 2.0), (0.5, -0.5, 2.0)])
@pytest.mark.parametrize("z", _REAL_GRID)
def test_hyp2f1_matches_long_series_oracle(params, z):
    p, q, r = params
    ours = sf.hyp2f1(p, q, r, z)
    ref = oracle_2f1(p, q, r, z)
    assert abs(ours - ref) <= 1e-12 * max(1.0, abs(ref))


@pytest.mark.parametrize("z", _CIRCLE_GRID)
def test_hyp2f1_on_unit_circle(z):
    ours = sf.hyp2f1(0.5, -0.5, 2.0, z)
    ref = oracle_2f1(0.5, -0.5, 2.0, z)
    assert abs(ours - ref) <= 1e-12 * max(1.0, abs(ref))


def test_hyp2f1_slow_set_on_circle_raises():
    # r - p - q = 1 here: the plain series cannot reach the stopping
    # criterion within the term cap away from z = 1
    with pytest.raises(sf.SeriesConvergenceError):
        sf.hyp2f1(0.25, 0.75, 2.0, cmath.exp(2.0j))


def test_hyp2f1_symmetric_in_first_two_args():
    for z in (0.3, -0.77, 0.5 + 0.2j):
        assert sf.hyp2f1(0.25, 0.75, 2.0, z) == sf.hyp2f1(0.75, 0.25, 2.0, z)


def test_hyp2f1_errors():
    with pytest.raises(sf.SeriesConvergenceError):
        sf.hyp2f1(0.5, 0.5, 2.0, 1.2)
    with pytest.raises(ValueError):
        sf.hyp2f1(0.5, 0.5, -1.0, 0.3)
    with pytest.raises(sf.SeriesConvergenceError):
        sf.hyp2f1(1.0, 2.0, 2.5, 1.0)  # r - p - q < 0 on the circle


# -- turning-point constants ---------------------------------------------------

def test_nu_values_match_reference_digits():
    assert round(sf.nu_constant(1), 3) == 0.785
    assert sf.nu_constant(1) == pytest.approx(math.pi / 4, rel=1e-14)
    assert round(sf.nu_constant(3), 3) == 0.911
    assert round(sf.nu_constant(5), 3) == 0.944
    assert round(sf.nu_constant(7), 3) == 0.959


@pytest.mark.parametrize("n", [1, 3, 5, 7, 9])
def test_nu_closed_form_equals_quadrature(n):
    quad = sf.integrate_real(
        lambda x: math.sqrt(max(1.0 - x ** (2 * n), 0.0)), 0.0, 1.0, 1e-13
    )
    assert abs(sf.nu_constant(n) - quad.value.real) <= 1e-12


def test_nu_validation():
    with pytest.raises(ValueError):
        sf.nu_constant(2)
    with pytest.raises(ValueError):
        sf.nu_constant(-1)


# -- real-interval quadrature ---------------------------------------------------

def test_quarter_circle():
    res = sf.integrate_real(lambda x: math.sqrt(max(1 - x * x, 0.0)), 0, 1, 1e-12)
    assert abs(res.value.real - math.pi / 4) <= 1e-12
    assert res.evaluations >= 1


def test_inverse_sqrt_singularity():
    res = sf.integrate_real(
        lambda x: 1.0 / math.sqrt(x) if x > 0 else math.inf, 0.0, 1.0, 1e-6
    )
    assert abs(res.value.real - 2.0) <= max(1e-6, res.abs_error_estimate)


def test_sublinear_action_integrand_vs_brute_force():
    a, eps = 1.0, 0.25
    u = a * a * eps * eps
    y_c = a * math.sqrt(math.sqrt(4 * u * u + 1) - 2 * u)

    def integrand(y):
        return math.sqrt(max(a * a - y * y / math.sqrt(1 - 4 * eps * eps * y * y), 0.0))

    res = sf.integrate_real(integrand, 0.0, y_c, 1e-13)
    j_val = 2.0 * res.value.real
    assert j_val == pytest.approx(J_SUBLINEAR_1_025, abs=1e-12)

    # brute-force oracle: 10^6-point midpoint rule in extended precision
    n = 1_000_000
    h = np.longdouble(y_c) / n
    y = (np.arange(n, dtype=np.longdouble) + np.longdouble(0.5)) * h
    vals = np.sqrt(np.maximum(
        a * a - y * y / np.sqrt(1 - 4 * eps * eps * y * y), np.longdouble(0)))
    midpoint = float(2.0 * np.sum(vals) * h)
    # the midpoint rule itself is only ~1e-9 accurate at the sqrt turning point
    assert j_val == pytest.approx(midpoint, abs=5e-9)


def test_quadrature_max_refinement_error_carries_estimate():
    # a genuinely nasty integrand at an unreachable tolerance
    with pytest.raises(sf.QuadratureConvergenceError) as err:
        sf.integrate_real(
            lambda x: 1.0 / math.sqrt(x) if x > 0 else math.inf, 0.0, 1.0, 1e-15
        )
    assert err.value.result.abs_error_estimate > 0


def test_gauss_rule_on_smooth_integrand():
    from scipy.special import erf

    res = sf.integrate_real(lambda x: math.exp(-x * x), 0.0, 2.0, 1e-12,
                            rule="gauss")
    exact = math.sqrt(math.pi) / 2 * erf(2.0)
    assert abs(res.value.real - exact) <= 1e-12


def test_error_estimates_are_conservative():
    # (integrand, lo, hi, exact, attainable tol); the inverse-sqrt pole
    # cannot beat ~1e-8 in double precision, so it gets a looser request
    cases = [
        (lambda x: math.sin(x), 0.0, math.pi, 2.0, 1e-10),
        (lambda x: math.exp(x), 0.0, 1.0, math.e - 1.0, 1e-10),
        (lambda x: x ** 5, 0.0, 1.0, 1.0 / 6.0, 1e-10),
        (lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0, math.pi / 4, 1e-10),
        (lambda x: math.sqrt(max(x, 0.0)), 0.0, 1.0, 2.0 / 3.0, 1e-10),
        (lambda x: math.log(x) if x > 0 else -math.inf, 0.0, 1.0, -1.0, 1e-10),
        (lambda x: math.cos(10 * x), 0.0, 1.0, math.sin(10.0) / 10.0, 1e-10),
        (lambda x: math.sqrt(max(1 - x * x, 0.0)), -1.0, 1.0, math.pi / 2, 1e-10),
        (lambda x: x * math.exp(-x), 0.0, 5.0, 1.0 - 6.0 * math.exp(-5.0), 1e-10),
        (lambda x: 1.0 / math.sqrt(1 - x) if x < 1 else math.inf, 0.0, 1.0, 2.0, 1e-6),
    ]
    conservative = 0
    for f, lo, hi, exact, tol in cases:
        res = sf.integrate_real(f, lo, hi, tol)
        true_err = abs(res.value.real - exact)
        assert true_err <= 10.0 * max(res.abs_error_estimate, 1e-15)
        if true_err <= res.abs_error_estimate:
            conservative += 1
    assert conservative >= 0.95 * len(cases) - 1e-9


# -- complex segments -----------------------------------------------------------

def test_segment_constant():
    res = sf.integrate_segment(lambda z: 1.0, 0.0, 1j, 1e-12)
    assert abs(res.value - 1j) <= 1e-13


def test_segment_half_linear_action():
    res = sf.integrate_segment(lambda z: cmath.sqrt(1.0 + z * z), 0.0, 1j, 1e-13)
    assert abs(res.value - 1j * math.pi / 4) <= 1e-12


def test_segment_essential_action_closed_form():
    spec = m.ModelSpec.essential(1.0, 3)
    tc = [p.tau_c for p in m.transition_points(spec) if p.tau_c.real > 0][0]
    res = sf.integrate_segment(
        lambda z: 2.0 * cmath.sqrt(1.0 + (z ** 3) ** 2), 0.0, tc, 1e-13
    )
    target = 2.0 * sf.nu_constant(3) * cmath.exp(1j * math.pi / 6)
    assert abs(res.value - target) <= 1e-10 * abs(target)


def test_segment_of_even_function_along_imaginary_axis():
    # even analytic integrands with real coefficients (the quasienergy
    # shape) have odd antiderivatives, so the contour value is purely
    # imaginary; this is the symmetry behind every action integral here
    res = sf.integrate_segment(lambda z: cmath.cos(z) + z * z, 0.0, 1.7j, 1e-13)
    assert abs(res.value.real) <= 1e-13 * max(1.0, abs(res.value))
    exact = 1j * (math.sinh(1.7) - 1.7**3 / 3.0)
    assert abs(res.value - exact) <= 1e-12


def test_zero_length_inputs():
    assert sf.integrate_real(lambda x: 1.0, 2.0, 2.0).value == 0.0
    assert sf.integrate_segment(lambda z: 1.0, 1j, 1j).value == 0.0


def test_reversed_interval_flips_sign():
    fwd = sf.integrate_real(lambda x: x * x, 0.0, 1.0, 1e-12)
    rev = sf.integrate_real(lambda x: x * x, 1.0, 0.0, 1e-12)
    assert rev.value == pytest.approx(-fwd.value)
