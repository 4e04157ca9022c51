"""Two-state level-crossing models in dimensionless variables.

Every model has a constant coupling ``a`` and a detuning that is an odd
function of the scaled time tau.  Detunings and couplings are exposed as
jets so the superadiabatic recursion can consume exact derivatives.

Kinds
-----
lz            linear crossing, detuning tau
superlinear   tau * sqrt(1 + 2 eps^2 tau^2)   (passes resonance faster)
sublinear     tau / (1 + 4 eps^2 tau^2)^(1/4) (passes resonance slower)
essential     tau^N with odd N >= 3 (not linearizable at the crossing)
aeh           width-limited tangent crossing, Ts * tan(tau / Ts); used as
              an exactly solvable cross-check, no transition points here
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .jets import MAX_JET_ORDER, Jet


class ModelKind(enum.Enum):
    LZ = "lz"
    SUPERLINEAR = "superlinear"
    SUBLINEAR = "sublinear"
    ESSENTIAL = "essential"
    AEH_TANGENT = "aeh"


class UnsupportedModelError(ValueError):
    """Operation not defined for this model kind."""


@dataclass(frozen=True)
class ModelSpec:
    """Immutable description of one crossing model (dimensionless)."""

    kind: ModelKind
    a: float
    eps: float = 0.0
    n_power: int = 3
    aeh_A: Optional[float] = None
    aeh_B: Optional[float] = None
    aeh_T: Optional[float] = None

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("coupling a must be >= 0")
        if self.eps < 0:
            raise ValueError("nonlinearity eps must be >= 0")
        if self.eps > 0 and self.kind not in (
            ModelKind.SUPERLINEAR,
            ModelKind.SUBLINEAR,
        ):
            raise ValueError("eps is only meaningful for superlinear/sublinear")
        if self.kind is ModelKind.ESSENTIAL:
            if self.n_power < 3 or self.n_power % 2 == 0:
                raise ValueError("essential model needs odd n_power >= 3")
        if self.kind is ModelKind.AEH_TANGENT:
            if not all(
                v is not None and v > 0 for v in (self.aeh_A, self.aeh_B, self.aeh_T)
            ):
                raise ValueError("aeh model needs positive A, B, T")

    # -- constructors --------------------------------------------------------

    @classmethod
    def lz(cls, a: float) -> "ModelSpec":
        return cls(ModelKind.LZ, a)

    @classmethod
    def superlinear(cls, a: float, eps: float) -> "ModelSpec":
        return cls(ModelKind.SUPERLINEAR, a, eps=eps)

    @classmethod
    def sublinear(cls, a: float, eps: float) -> "ModelSpec":
        return cls(ModelKind.SUBLINEAR, a, eps=eps)

    @classmethod
    def essential(cls, a: float, n_power: int) -> "ModelSpec":
        return cls(ModelKind.ESSENTIAL, a, n_power=n_power)

    @classmethod
    def aeh(cls, A: float, B: float, T: float) -> "ModelSpec":
        # scaled coupling a = A sqrt(T/B); scaled width Ts = sqrt(B T)
        return cls(
            ModelKind.AEH_TANGENT,
            A * math.sqrt(T / B),
            aeh_A=A,
            aeh_B=B,
            aeh_T=T,
        )

    @classmethod
    def from_physical(
        cls, omega: float, slope_beta: float, gamma_cubic: float
    ) -> "ModelSpec":
        """Map physical coupling/slope/cubic-nonlinearity onto a model.

        Uses a = omega/beta, eps = sqrt(|gamma|)/beta^2; positive cubic
        terms give the superlinear model, negative the sublinear one.
        """
        a = omega / slope_beta
        if gamma_cubic == 0:
            return cls.lz(a)
        eps = math.sqrt(abs(gamma_cubic)) / slope_beta**2
        if gamma_cubic > 0:
            return cls.superlinear(a, eps)
        return cls.sublinear(a, eps)

    # -- derived quantities ---------------------------------------------------

    @property
    def tan_width(self) -> float:
        """Scaled half-period parameter Ts of the tangent detuning."""
        if self.kind is not ModelKind.AEH_TANGENT:
            raise UnsupportedModelError("tan_width only defined for aeh kind")
        return math.sqrt(self.aeh_B * self.aeh_T)

    @property
    def detuning_growth_power(self) -> float:
        """Large-|tau| power of the detuning's divergence."""
        if self.kind is ModelKind.LZ:
            return 1.0
        if self.kind is ModelKind.SUPERLINEAR:
            return 2.0 if self.eps > 0 else 1.0
        if self.kind is ModelKind.SUBLINEAR:
            return 0.5 if self.eps > 0 else 1.0
        if self.kind is ModelKind.ESSENTIAL:
            return float(self.n_power)
        raise UnsupportedModelError("no power-law growth for aeh kind")

    @property
    def label(self) -> str:
        return self.kind.value


@dataclass
class TransitionPoint:
    """Upper-half-plane zero of the quasienergy with its contour data."""

    tau_c: complex
    action: Optional[complex] = None
    gamma_k: Optional[complex] = None


def _check_order(order: int) -> None:
    if order < 0:
        raise ValueError("jet order must be >= 0")
    if order > MAX_JET_ORDER:
        raise ValueError(f"jet order {order} exceeds cap {MAX_JET_ORDER}")


def eval_detuning(model: ModelSpec, tau, order: int) -> Jet:
    """Detuning and its first ``order`` derivatives at scaled time tau."""
    _check_order(order)
    x = Jet.variable(tau, order)
    kind = model.kind
    if kind is ModelKind.LZ:
        return x
    if kind is ModelKind.SUPERLINEAR:
        if model.eps == 0:
            return x
        return x * (1.0 + (2.0 * model.eps**2) * x * x).sqrt()
    if kind is ModelKind.SUBLINEAR:
        if model.eps == 0:
            return x
        return x * (1.0 + (4.0 * model.eps**2) * x * x) ** (-0.25)
    if kind is ModelKind.ESSENTIAL:
        return x**model.n_power
    if kind is ModelKind.AEH_TANGENT:
        ts = model.tan_width
        if not isinstance(tau, complex) and abs(tau) >= 0.5 * math.pi * ts:
            raise ValueError(
                f"tangent detuning has poles at |tau| = {0.5 * math.pi * ts:.6g}"
            )
        return ts * (x / ts).tan()
    raise UnsupportedModelError(f"unknown kind {kind}")


def eval_coupling(model: ModelSpec, tau, order: int) -> Jet:
    """Coupling jet; constant ``a`` for every kind in scope."""
    _check_order(order)
    return Jet.constant(model.a, order)


def detuning_value(model: ModelSpec, tau):
    """Scalar detuning (works for complex tau as well)."""
    return eval_detuning(model, tau, 0).value


def quasienergy(model: ModelSpec, tau):
    """E(tau) = sqrt(a^2 + detuning^2); >= a on the real axis."""
    d = detuning_value(model, tau)
    if isinstance(tau, complex) or np.iscomplexobj(d):
        return cmath.sqrt(model.a**2 + d * d)
    return math.sqrt(model.a**2 + d * d)


def transition_points(model: ModelSpec) -> list[TransitionPoint]:
    """Upper-half-plane quasienergy zeros, sorted by (Im, Re) ascending.

    Raises for the tangent model, whose check path is handled by closed
    forms instead.
    """
    a = model.a
    if a <= 0:
        raise ValueError("transition points require a > 0")
    kind = model.kind
    if kind is ModelKind.AEH_TANGENT:
        raise UnsupportedModelError("transition points not computed for aeh kind")

    if kind is ModelKind.LZ or (
        kind in (ModelKind.SUPERLINEAR, ModelKind.SUBLINEAR) and model.eps == 0
    ):
        taus = [1j * a]
    elif kind is ModelKind.SUPERLINEAR:
        xi = 2.0 * math.sqrt(2.0) * a * model.eps
        sp = cmath.sqrt(1.0 + xi)
        # for xi > 1 take sqrt(1-xi) = i sqrt(xi-1) so the pair has equal
        # imaginary parts and opposite real parts
        sm = cmath.sqrt(complex(1.0 - xi))
        taus = [(1j * a / xi) * (sp - sm), (1j * a / xi) * (sp + sm)]
    elif kind is ModelKind.SUBLINEAR:
        u = a**2 * model.eps**2
        y_c = a * math.sqrt(math.sqrt(4.0 * u**2 + 1.0) - 2.0 * u)
        taus = [1j * y_c]
    elif kind is ModelKind.ESSENTIAL:
        n = model.n_power
        r = a ** (1.0 / n)
        taus = [
            r * cmath.exp(1j * math.pi * (2 * k - 1) / (2 * n))
            for k in range(1, n + 1)
        ]
    else:
        raise UnsupportedModelError(f"unknown kind {kind}")

    taus.sort(key=lambda t: (t.imag, t.real))
    return [TransitionPoint(t) for t in taus]


def singularities(model: ModelSpec) -> list[complex]:
    """Upper-half-plane branch points / poles of the detuning."""
    if model.kind is ModelKind.SUPERLINEAR and model.eps > 0:
        return [1j / (model.eps * math.sqrt(2.0))]
    if model.kind is ModelKind.SUBLINEAR and model.eps > 0:
        return [1j / (2.0 * model.eps)]
    return []
