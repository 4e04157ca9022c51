"""Special functions and quadrature used by the analytic formulas.

Contains a Gauss hypergeometric series for |z| <= 1, the closed
beta-function form of the turning-point constants nu_N, and adaptive
quadrature over real intervals and complex straight-line segments.  The
default quadrature is tanh-sinh (double exponential) because the action
integrands have inverse-square-root behavior in their derivatives at the
turning point; a panel-adaptive Gauss-Legendre rule is available for
smooth integrands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln

_SERIES_TERM_CAP = 1_000_000
_UNIT_CIRCLE_TOL = 1e-14


class SeriesConvergenceError(RuntimeError):
    """Hypergeometric series cannot converge for the given argument."""


class QuadratureConvergenceError(RuntimeError):
    """Refinement limit reached; the best estimate is attached."""

    def __init__(self, message: str, result: "QuadratureResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    abs_error_estimate: float
    evaluations: int


def hyp2f1(p: float, q: float, r: float, z: complex) -> complex:
    """Gauss hypergeometric series F(p, q; r; z) for |z| <= 1.

    Kahan-compensated summation; symmetric in p and q by construction.
    On the unit circle the series is used directly, which requires
    r - p - q > 0 for absolute convergence.  No analytic continuation is
    attempted for |z| > 1.
    """
    if r <= 0 and r == int(r):
        raise ValueError(f"r = {r} is a nonpositive integer")
    z = complex(z)
    az = abs(z)
    if az > 1.0 + _UNIT_CIRCLE_TOL:
        raise SeriesConvergenceError(f"|z| = {az:.6g} > 1: series diverges")
    if abs(az - 1.0) <= _UNIT_CIRCLE_TOL and r - p - q <= 0:
        raise SeriesConvergenceError(
            "series on |z| = 1 requires r - p - q > 0"
        )
    if z == 0:
        return 1.0 + 0.0j
    if abs(z - 1.0) <= _UNIT_CIRCLE_TOL:
        # Gauss summation at z = 1
        lg = gammaln(r) + gammaln(r - p - q) - gammaln(r - p) - gammaln(r - q)
        return complex(math.exp(lg))

    total = 1.0 + 0.0j
    comp = 0.0 + 0.0j  # Kahan compensation
    term = 1.0 + 0.0j
    for k in range(_SERIES_TERM_CAP):
        term = term * ((p + k) * (q + k)) / ((r + k) * (1.0 + k)) * z
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) <= 1e-16 * abs(total):
            return total
    raise SeriesConvergenceError(
        f"series did not converge within {_SERIES_TERM_CAP} terms"
    )


def nu_constant(n_power: int) -> float:
    """Turning-point constant: integral of sqrt(1 - x^(2N)) over [0, 1].

    Uses the closed form B(1/(2N), 3/2) / (2N).
    """
    if n_power < 1 or n_power % 2 == 0:
        raise ValueError("n_power must be odd and >= 1")
    n2 = 2.0 * n_power
    return math.exp(betaln(1.0 / n2, 1.5)) / n2


# -- tanh-sinh (double exponential) rule -------------------------------------

_TS_TMAX = 4.0
_TS_MAX_LEVEL = 11


def _tanh_sinh(f, lo: float, hi: float, tol: float):
    """Level-doubling tanh-sinh quadrature of a scalar (possibly
    complex-valued) function over the finite interval [lo, hi].

    Returns (value, error_estimate, evaluations, converged).  Node values
    that are not finite (endpoint overflow of an integrable singularity)
    are dropped; their weights are double-exponentially small.
    """
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    piov2 = 0.5 * math.pi
    # endpoint-singularity bookkeeping: [skipped_any, closest finite |f|
    # and its distance, per side]
    sing = {"skipped": False, "lo": (math.inf, 0.0), "hi": (math.inf, 0.0)}

    def node_sum(h, only_odd):
        s = 0.0 + 0.0j
        kmax = int(_TS_TMAX / h)
        ks = range(1, kmax + 1, 2) if only_odd else range(0, kmax + 1)
        n_eval = 0
        for k in ks:
            t = k * h
            u = piov2 * math.sinh(t)
            x_rel = math.tanh(u)
            w = piov2 * math.cosh(t) / math.cosh(u) ** 2
            if w == 0.0:
                continue
            for sgn in ((1.0,) if k == 0 else (1.0, -1.0)):
                x = mid + half * sgn * x_rel
                fx = f(x)
                n_eval += 1
                if fx == fx and abs(fx) != math.inf:  # finite (NaN-safe)
                    s += w * fx
                    side = "hi" if sgn > 0 else "lo"
                    d = abs((hi if sgn > 0 else lo) - x)
                    if d < sing[side][0]:
                        sing[side] = (d, abs(fx))
                else:
                    sing["skipped"] = True
        return s, n_eval

    def sing_floor():
        # unreachable-sliver bound for skipped endpoint poles: the region
        # inside the closest representable node behaves like an order
        # -1/2 singularity at worst, contributing ~ 2 |f| d
        if not sing["skipped"]:
            return 0.0
        out = 0.0
        for side in ("lo", "hi"):
            d, fval = sing[side]
            if math.isfinite(d):
                out += 2.0 * fval * d
        return out

    h = 0.5
    weighted, n_eval = node_sum(h, only_odd=False)
    value = half * h * weighted
    prev = value
    err = abs(value) + 1.0
    for _level in range(1, _TS_MAX_LEVEL + 1):
        h *= 0.5
        add, n = node_sum(h, only_odd=True)
        weighted += add
        n_eval += n
        value = half * h * weighted
        err = abs(value - prev) + sing_floor()
        floor = 8.0 * np.finfo(float).eps * (abs(value) + 1e-300)
        if err <= max(tol, floor):
            return value, max(err, floor), n_eval, True
        prev = value
    return value, err, n_eval, False


def _gauss_adaptive(f, lo: float, hi: float, tol: float):
    """Panel-adaptive Gauss-Legendre quadrature for smooth integrands."""
    nodes, weights = np.polynomial.legendre.leggauss(20)

    def panel(a, b):
        c = 0.5 * (a + b)
        r = 0.5 * (b - a)
        s = 0.0 + 0.0j
        for x, w in zip(nodes, weights):
            s += w * f(c + r * x)
        return r * s

    n_eval = [0]

    def recurse(a, b, whole, depth):
        c = 0.5 * (a + b)
        left = panel(a, c)
        right = panel(c, b)
        n_eval[0] += 40
        err = abs(left + right - whole)
        if err <= tol * max(1.0, abs(b - a) / abs(hi - lo)) or depth >= 24:
            return left + right, err, depth >= 24
        lv, le, lfail = recurse(a, c, left, depth + 1)
        rv, re, rfail = recurse(c, b, right, depth + 1)
        return lv + rv, le + re, lfail or rfail

    whole = panel(lo, hi)
    n_eval[0] += 20
    value, err, failed = recurse(lo, hi, whole, 0)
    return value, max(err, 8.0 * np.finfo(float).eps * abs(value)), n_eval[0], not failed


def integrate_real(f, lo: float, hi: float, tol: float = 1e-12,
                   rule: str = "tanh-sinh") -> QuadratureResult:
    """Integrate f over [lo, hi] with error control.

    tanh-sinh (default) handles endpoint algebraic singularities of order
    >= -1/2; note that for actual inverse-square-root endpoint poles the
    achievable absolute accuracy is limited to about 1e-8 by double
    precision placement of nodes next to the endpoint, and the reported
    estimate reflects that.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if lo == hi:
        return QuadratureResult(0.0, 0.0, 0)
    if lo > hi:
        res = integrate_real(f, hi, lo, tol, rule)
        return QuadratureResult(-res.value, res.abs_error_estimate, res.evaluations)
    if rule == "tanh-sinh":
        value, err, n_eval, ok = _tanh_sinh(f, lo, hi, tol)
    elif rule == "gauss":
        value, err, n_eval, ok = _gauss_adaptive(f, lo, hi, tol)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    result = QuadratureResult(value, err, n_eval)
    if not ok:
        raise QuadratureConvergenceError(
            f"quadrature stalled at estimated error {err:.3g} (tol {tol:.3g})",
            result,
        )
    return result


def integrate_segment(f, z0: complex, z1: complex, tol: float = 1e-12,
                      rule: str = "tanh-sinh") -> QuadratureResult:
    """Contour integral of f along the straight segment z0 -> z1.

    The integrand must be analytic on the open segment (caller's
    responsibility); error control is as for integrate_real.
    """
    dz = complex(z1) - complex(z0)
    if dz == 0:
        return QuadratureResult(0.0, 0.0, 0)

    def g(x: float):
        return f(z0 + x * dz) * dz

    return integrate_real(g, 0.0, 1.0, tol, rule)
