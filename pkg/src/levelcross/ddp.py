"""Dykhne-Davis-Pechukas transition probabilities.

Each model's probability for nonadiabatic transitions is available two
ways: through the closed forms (hypergeometric / turning-point-constant
expressions, asymptotic branches) and through generic contour quadrature
of the action D(tau_c) = 2 * integral of the quasienergy from 0 to the
transition point.  Coherent sums over several transition points carry
residue factors gamma_k of unit magnitude.

Probabilities from coherent sums are reported raw (they can exceed 1
outside the validity range) with a warning attached instead of clipping.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass, field

from . import models as _models
from .models import ModelKind, ModelSpec, TransitionPoint
from .specfun import hyp2f1, integrate_segment, nu_constant

#: closed-form branch switches exactly at xi = 1; inside this band the two
#: transition points are too close for either branch to be trusted
COALESCENCE_BAND = 0.1

#: warn when a transition point sits within this distance of a detuning
#: singularity (scaled units)
SINGULARITY_PROXIMITY = 1.0

ACTION_TOL = 1e-12


class ValidityWarning(UserWarning):
    """Emitted when a formula is evaluated outside its stated range."""


class AmbiguousLowestPointError(ValueError):
    """Two transition points tie for lowest imaginary part."""


class DegenerateZeroError(ValueError):
    """Quasienergy zero is not simple (coalescing transition points)."""


class DdpBranch(enum.Enum):
    SINGLE_POINT = "single-point"
    COHERENT_SUM = "coherent-sum"
    CLOSED_FORM_SMALL_XI = "closed-form-small-xi"
    CLOSED_FORM_LARGE_XI = "closed-form-large-xi"
    SUBLINEAR_QUADRATURE = "sublinear-quadrature"
    SUBLINEAR_SMALL = "sublinear-small"
    SUBLINEAR_LARGE = "sublinear-large"
    ESSENTIAL_SUM = "essential-sum"
    PERTURBATIVE_UNIVERSAL = "perturbative-universal"
    LZ_EXACT = "lz-exact"


@dataclass
class DdpResult:
    probability: float
    branch: DdpBranch
    warnings: tuple[str, ...] = ()
    points_used: tuple[TransitionPoint, ...] = ()
    diagnostics: dict = field(default_factory=dict)


def p_lz(a: float) -> float:
    """Exact linear-crossing probability exp(-pi a^2)."""
    if a < 0:
        raise ValueError("a must be >= 0")
    return math.exp(-math.pi * a * a)


def xi_parameter(model: ModelSpec) -> float:
    """Composite parameter 2 sqrt(2) a eps controlling the superlinear
    branch structure."""
    return 2.0 * math.sqrt(2.0) * model.a * model.eps


def action_integral(model: ModelSpec, tau_c: complex, tol: float = ACTION_TOL) -> complex:
    """D(tau_c): twice the quasienergy integrated along 0 -> tau_c."""
    res = integrate_segment(
        lambda z: 2.0 * _models.quasienergy(model, complex(z)), 0.0, tau_c, tol
    )
    return res.value


def _proximity_warnings(model: ModelSpec, taus) -> list[str]:
    out = []
    for s in _models.singularities(model):
        for t in taus:
            d = abs(t - s)
            if d < SINGULARITY_PROXIMITY:
                out.append(
                    f"near-singularity: |tau_c - tau_0| = {d:.3g} < "
                    f"{SINGULARITY_PROXIMITY:g}"
                )
    return out


def gamma_factor(model: ModelSpec, tau_c: complex) -> complex:
    """Residue prefactor of one transition point's contribution.

    For constant coupling the nonadiabatic coupling is
    -a d'(tau) / (2 (a^2 + d(tau)^2)), so the residue at a simple zero of
    the squared quasienergy g = a^2 + d^2 gives
    gamma = -2i a d'(tau_c) / g'(tau_c).
    """
    d = _models.eval_detuning(model, complex(tau_c), 1)
    dval = complex(d.value)
    dprime = complex(d.derivative(1))
    g_prime = 2.0 * dval * dprime
    scale = max(model.a, abs(dval))
    if abs(g_prime) < 1e-10 * scale:
        raise DegenerateZeroError(
            "d(E^2)/dtau vanishes at tau_c: coalescing transition points"
        )
    return -2.0j * model.a * dprime / g_prime


def ddp_single(model: ModelSpec, tol: float = ACTION_TOL) -> DdpResult:
    """Probability from the transition point closest to the real axis."""
    pts = _models.transition_points(model)
    if len(pts) > 1:
        gap = pts[1].tau_c.imag - pts[0].tau_c.imag
        if gap <= 1e-12 * (1.0 + abs(pts[0].tau_c.imag)):
            raise AmbiguousLowestPointError(
                "two transition points tie for lowest imaginary part; "
                "use ddp_coherent"
            )
    tp = pts[0]
    tp.action = action_integral(model, tp.tau_c, tol)
    tp.gamma_k = gamma_factor(model, tp.tau_c)
    warns = _proximity_warnings(model, [tp.tau_c])
    prob = math.exp(-2.0 * tp.action.imag)
    if prob > 1.0:
        warns.append(f"probability-exceeds-1: {prob:.3g}")
    return DdpResult(prob, DdpBranch.SINGLE_POINT, tuple(warns), (tp,))


def _default_coherent_points(model: ModelSpec) -> list[TransitionPoint]:
    pts = _models.transition_points(model)
    if model.kind is ModelKind.SUPERLINEAR and 0 < xi_parameter(model) < 1:
        # The upper point lies on the imaginary axis directly behind the
        # lower one; the straight contour to it crosses a quasienergy zero,
        # so its coherent contribution is not well defined here.  Keep the
        # dominant point only.
        pts = pts[:1]
    return pts


def ddp_coherent(model: ModelSpec, points: list[TransitionPoint] | None = None,
                 lowest_only: bool = False, tol: float = ACTION_TOL) -> DdpResult:
    """Coherent sum over transition points.

    By default all upper-half-plane points are included (except the
    superlinear shadowed point, see `_default_coherent_points`); with
    ``lowest_only`` the sum is restricted to the points sharing the lowest
    imaginary part.
    """
    if points is None:
        points = _default_coherent_points(model)
    if not points:
        raise ValueError("ddp_coherent needs at least one transition point")
    if lowest_only:
        im0 = min(p.tau_c.imag for p in points)
        points = [p for p in points if p.tau_c.imag <= im0 * (1 + 1e-12) + 1e-300]
    total = 0.0 + 0.0j
    for tp in points:
        if tp.action is None:
            tp.action = action_integral(model, tp.tau_c, tol)
        if tp.gamma_k is None:
            tp.gamma_k = gamma_factor(model, tp.tau_c)
        total += tp.gamma_k * cmath.exp(1j * tp.action)
    prob = abs(total) ** 2
    warns = _proximity_warnings(model, [p.tau_c for p in points])
    if prob > 1.0:
        warns.append(f"probability-exceeds-1: {prob:.3g}")
    return DdpResult(prob, DdpBranch.COHERENT_SUM, tuple(warns), tuple(points))


def superlinear_closed_form(model: ModelSpec) -> DdpResult:
    """Closed-form superlinear probability with its branch structure.

    Below the branch point (xi < 1) the exponent is
    pi a^2 F(1/4, 3/4; 2; xi^2); above it the two complex transition
    points interfere and P = 4 exp(-2 Di) cos^2(Dr).
    """
    if model.kind is not ModelKind.SUPERLINEAR:
        raise _models.UnsupportedModelError("superlinear_closed_form needs a superlinear model")
    a = model.a
    xi = xi_parameter(model)
    warns: list[str] = []
    if abs(xi - 1.0) < COALESCENCE_BAND:
        warns.append(
            f"coalescence: |xi - 1| = {abs(xi - 1.0):.3g} < {COALESCENCE_BAND:g}"
        )
    pts = tuple(_models.transition_points(model)) if a > 0 else ()
    # proximity matters only for the points the formula keeps: below the
    # branch point that is the lowest one alone
    used = pts[:1] if xi <= 1.0 else pts
    warns.extend(_proximity_warnings(model, [p.tau_c for p in used]))

    if xi <= 1.0:
        f = hyp2f1(0.25, 0.75, 2.0, xi * xi).real
        prob = math.exp(-math.pi * a * a * f)
        return DdpResult(
            prob, DdpBranch.CLOSED_FORM_SMALL_XI, tuple(warns), pts,
            {"hyp2f1": f},
        )

    u = math.sqrt(xi * xi - 1.0)
    z_plus = (1 + 1j * u) / (1 - 1j * u)
    z_minus = (1 - 1j * u) / (1 + 1j * u)
    # points sorted by (Im, Re): pts[0] has Re < 0 and belongs to the
    # z_plus hypergeometric argument (verified against contour quadrature)
    tau_plus = pts[0].tau_c
    tau_minus = pts[1].tau_c
    d_minus = 0.5 * math.pi * a * tau_minus * hyp2f1(0.5, -0.5, 2.0, z_minus)
    d_plus = 0.5 * math.pi * a * tau_plus * hyp2f1(0.5, -0.5, 2.0, z_plus)
    d_i = 0.5 * (d_minus.imag + d_plus.imag)
    d_r = 0.5 * abs(d_minus.real - d_plus.real)
    pts[0].action = d_plus
    pts[1].action = d_minus
    prob = 4.0 * math.exp(-2.0 * d_i) * math.cos(d_r) ** 2
    if prob > 1.0:
        warns.append(f"probability-exceeds-1: {prob:.3g}")
    return DdpResult(
        prob, DdpBranch.CLOSED_FORM_LARGE_XI, tuple(warns), pts,
        {"d_real": d_r, "d_imag": d_i},
    )


def superlinear_small_xi_expansion(a: float, eps: float) -> float:
    """Two-term exponent expansion exp(-pi a^2 (1 + 3/4 a^2 eps^2))."""
    xi = 2.0 * math.sqrt(2.0) * a * eps
    if xi > 0.5:
        warnings.warn(
            f"xi = {xi:.3g} > 0.5: expansion outside its validity range",
            ValidityWarning,
            stacklevel=2,
        )
    return math.exp(-math.pi * a * a * (1.0 + 0.75 * a * a * eps * eps))


def sublinear_probability(model: ModelSpec, tol: float = ACTION_TOL) -> DdpResult:
    """Sublinear probability from quadrature of the turning-point action.

    The main value integrates
    2 * sqrt(a^2 - y^2 / sqrt(1 - 4 eps^2 y^2)) over [0, y_c]; both
    asymptotic branches are attached as diagnostics.
    """
    if model.kind is not ModelKind.SUBLINEAR:
        raise _models.UnsupportedModelError("sublinear_probability needs a sublinear model")
    a, eps = model.a, model.eps
    pts = _models.transition_points(model)
    tp = pts[0]
    y_c = tp.tau_c.imag

    def integrand(y: float) -> float:
        val = a * a - y * y / math.sqrt(max(1.0 - 4.0 * eps * eps * y * y, 1e-300))
        return math.sqrt(max(val, 0.0))

    from .specfun import integrate_real

    quad = integrate_real(integrand, 0.0, y_c, tol)
    j_action = 2.0 * quad.value.real
    tp.action = 1j * j_action
    tp.gamma_k = gamma_factor(model, tp.tau_c) if a > 0 else None
    prob = math.exp(-2.0 * j_action)

    p_small = math.exp(-math.pi * a * a * (1.0 - 0.75 * a * a * eps * eps))
    p_large = None
    if eps > 0 and a > 0:
        exponent = -2.0 * a / eps + math.pi / (16.0 * a * eps**3)
        # the strong-nonlinearity branch only means anything when the
        # composite parameter is of order one; tiny eps overflows it
        if exponent < 700.0:
            p_large = math.exp(exponent)
    warns = _proximity_warnings(model, [tp.tau_c])
    return DdpResult(
        prob,
        DdpBranch.SUBLINEAR_QUADRATURE,
        tuple(warns),
        (tp,),
        {"action": j_action, "p_asymp_small": p_small, "p_asymp_large": p_large},
    )


def perturbative_deviation(omega: float, slope_beta: float, gamma_cubic: float) -> float:
    """Universal perturbative probability in physical units.

    P = P_LZ * exp(-(3/4) pi omega^4 gamma / beta^8); the linear-crossing
    value is recovered for gamma = 0.  Valid while |omega^2 gamma / beta^6|
    is at most of order one.
    """
    validity = abs(omega**2 * gamma_cubic / slope_beta**6)
    if validity > 1.0:
        warnings.warn(
            f"|omega^2 gamma / beta^6| = {validity:.3g} > 1: outside the "
            "perturbative regime",
            ValidityWarning,
            stacklevel=2,
        )
    a = omega / slope_beta
    return math.exp(
        -math.pi * a * a
        - 0.75 * math.pi * omega**4 * gamma_cubic / slope_beta**8
    )


def _log_cosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - math.log(2.0)


def aeh_exact(A: float, B: float, T: float) -> float:
    """Exact probability of the width-limited tangent crossing model.

    P = cosh^2(pi sqrt(B^2 - A^2) T) / cosh^2(pi B T); for A > B the
    square root turns imaginary and cosh becomes cos.  Evaluated in log
    space so large arguments do not overflow.
    """
    if A < 0 or B <= 0 or T <= 0:
        raise ValueError("need A >= 0 and B, T > 0")
    log_den = 2.0 * _log_cosh(math.pi * B * T)
    if A <= B:
        log_num = 2.0 * _log_cosh(math.pi * math.sqrt(B * B - A * A) * T)
        return math.exp(log_num - log_den)
    c = math.cos(math.pi * math.sqrt(A * A - B * B) * T)
    return c * c * math.exp(-log_den)


def essential_closed_form(model: ModelSpec) -> DdpResult:
    """Coherent-sum closed form for the essential (t^N) crossing.

    eta = 2 nu_N a^((N+1)/N); pairs of transition points contribute
    damped cosines and the purely imaginary middle point a plain
    exponential.  Vanishes in an oscillatory manner as the coupling
    grows, and P(a -> 0) = 1.
    """
    if model.kind is not ModelKind.ESSENTIAL:
        raise _models.UnsupportedModelError("essential_closed_form needs an essential model")
    n = model.n_power
    a = model.a
    eta = 2.0 * nu_constant(n) * a ** ((n + 1) / n)
    total = 0.0
    for k in range(1, (n - 1) // 2 + 1):
        theta = (2 * k - 1) * math.pi / (2 * n)
        total += (
            2.0
            * (-1.0) ** k
            * math.exp(-eta * math.sin(theta))
            * math.cos(eta * math.cos(theta))
        )
    total += (-1.0) ** ((n + 1) // 2) * math.exp(-eta)
    prob = total * total
    warns: list[str] = []
    if prob > 1.0:
        warns.append(f"probability-exceeds-1: {prob:.3g}")
    pts = tuple(_models.transition_points(model)) if a > 0 else ()
    return DdpResult(
        prob, DdpBranch.ESSENTIAL_SUM, tuple(warns), pts, {"eta": eta}
    )


def analytic_probability(model: ModelSpec, tol: float = ACTION_TOL) -> DdpResult:
    """The model-appropriate analytic curve (what the figures plot)."""
    kind = model.kind
    if kind is ModelKind.LZ:
        return DdpResult(p_lz(model.a), DdpBranch.LZ_EXACT)
    if kind is ModelKind.SUPERLINEAR:
        if model.eps == 0:
            return DdpResult(p_lz(model.a), DdpBranch.LZ_EXACT)
        return superlinear_closed_form(model)
    if kind is ModelKind.SUBLINEAR:
        if model.eps == 0:
            return DdpResult(p_lz(model.a), DdpBranch.LZ_EXACT)
        return sublinear_probability(model, tol)
    if kind is ModelKind.ESSENTIAL:
        return essential_closed_form(model)
    if kind is ModelKind.AEH_TANGENT:
        return DdpResult(
            aeh_exact(model.aeh_A, model.aeh_B, model.aeh_T),
            DdpBranch.PERTURBATIVE_UNIVERSAL,
        )
    raise _models.UnsupportedModelError(f"unknown kind {kind}")
