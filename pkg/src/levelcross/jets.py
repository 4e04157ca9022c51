"""Truncated Taylor-series (jet) arithmetic.

A jet carries the value of a smooth function and its first K derivatives
at one expansion point.  Arithmetic is exact truncated-Taylor algebra:
products are Cauchy-product truncations, quotients and fractional powers
use the standard recurrences.  The superadiabatic recursion consumes one
derivative order per level, so derivatives must be propagated exactly
rather than approximated by finite differences.

Coefficient arrays may be real or complex; complex jets are used when a
detuning is evaluated at a complex transition point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Enough orders for superadiabatic order 3 plus algebraic closure.
MAX_JET_ORDER = 7


def _taylor_mul(a, b):
    n = min(len(a), len(b))
    out = np.zeros(n, dtype=np.result_type(a, b))
    for k in range(n):
        out[k] = np.dot(a[: k + 1], b[k::-1])
    return out


def _taylor_div(num, den):
    # den[0] must be nonzero
    n = min(len(num), len(den))
    out = np.zeros(n, dtype=np.result_type(num, den, 1.0))
    for k in range(n):
        s = num[k]
        for j in range(k):
            s = s - out[j] * den[k - j]
        out[k] = s / den[0]
    return out


def _taylor_pow(a, p):
    # b = a**p with a[0] != 0; recurrence from a*b' = p*a'*b
    n = len(a)
    out = np.zeros(n, dtype=np.result_type(a, 1.0 if p == int(p) else p, 1.0))
    if np.iscomplexobj(a):
        out = out.astype(complex)
    out[0] = a[0] ** p
    for k in range(1, n):
        s = 0.0
        for j in range(1, k + 1):
            s = s + ((p + 1) * j - k) * a[j] * out[k - j]
        out[k] = s / (k * a[0])
    return out


def _taylor_tan(u):
    # g = tan(u) via g' = (1 + g^2) u'; w = 1 + g^2 built progressively
    n = len(u)
    out = np.zeros(n, dtype=np.result_type(u, 1.0))
    w = np.zeros(n, dtype=out.dtype)
    out[0] = np.tan(u[0])
    w[0] = 1.0 + out[0] * out[0]
    for k in range(n - 1):
        s = 0.0
        for j in range(k + 1):
            s = s + w[j] * (k - j + 1) * u[k - j + 1]
        out[k + 1] = s / (k + 1)
        w[k + 1] = np.dot(out[: k + 2], out[k + 1 :: -1])
    return out


_FACTORIALS = np.array([math.factorial(k) for k in range(MAX_JET_ORDER + 3)])


@dataclass(frozen=True)
class Jet:
    """Value plus derivatives of a function at a point.

    ``coeffs[k]`` is the k-th derivative (``coeffs[0]`` the value).
    """

    coeffs: np.ndarray = field()

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs))
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def variable(cls, value, order):
        c = np.zeros(order + 1, dtype=np.result_type(value, 1.0))
        c[0] = value
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order):
        c = np.zeros(order + 1, dtype=np.result_type(value, 1.0))
        c[0] = value
        return cls(c)

    @classmethod
    def from_taylor(cls, taylor):
        t = np.asarray(taylor)
        return cls(t * _FACTORIALS[: len(t)])

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self):
        return self.coeffs[0]

    def derivative(self, k: int):
        return self.coeffs[k]

    @property
    def taylor(self) -> np.ndarray:
        return self.coeffs / _FACTORIALS[: len(self.coeffs)]

    # -- algebra -----------------------------------------------------------

    def _coerce(self, other, n):
        if isinstance(other, Jet):
            return other.taylor
        t = np.zeros(n, dtype=np.result_type(other, 1.0))
        t[0] = other
        return t

    def __add__(self, other):
        t = self.taylor
        o = self._coerce(other, len(t))
        n = min(len(t), len(o))
        return Jet.from_taylor(t[:n] + o[:n])

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        t = self.taylor
        if isinstance(other, Jet):
            return Jet.from_taylor(_taylor_mul(t, other.taylor))
        return Jet(self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        t = self.taylor
        if isinstance(other, Jet):
            return Jet.from_taylor(_taylor_div(t, other.taylor))
        return Jet(self.coeffs / other)

    def __rtruediv__(self, other):
        o = self._coerce(other, len(self.coeffs))
        return Jet.from_taylor(_taylor_div(o, self.taylor))

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            # integer powers by repeated multiplication: exact even when
            # the value vanishes (fractional-power recurrence would not be)
            out = Jet.constant(1.0, self.order)
            for _ in range(p):
                out = out * self
            return out
        return Jet.from_taylor(_taylor_pow(self.taylor, p))

    def sqrt(self):
        return self ** 0.5

    def tan(self):
        return Jet.from_taylor(_taylor_tan(self.taylor))

    def deriv(self) -> "Jet":
        """Jet of the derivative function; drops one order."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet(self.coeffs[1:])

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot extend a jet by truncation")
        return Jet(self.coeffs[: order + 1])
