"""Split-complex (hyperbolic) numbers, 3-vectors over them, and Taylor jets.

The split-complex unit j satisfies j^2 = +1.  Every number z = re + j*im has
two equivalent views:

* Cartesian: the pair (re, im), with re = Re(z) and im = Im(z);
* null (idempotent): u = re + im and v = re - im, the coordinates along the
  idempotents e+ = (1+j)/2 and e- = (1-j)/2, which satisfy e+*e- = 0.

In null coordinates multiplication is componentwise, so split-holomorphic
evaluation reduces to two independent real evaluations.  That decomposition
is the internal canonical form everywhere in this package; the Cartesian
view is the API form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DomainError, ZeroDivisor

Real = Union[int, float]


@dataclass(frozen=True)
class SplitScalar:
    """A hyperbolic number re + j*im with j^2 = 1."""

    re: float
    im: float = 0.0

    @property
    def u(self) -> float:
        """Null coordinate along e+ = (1+j)/2."""
        return self.re + self.im

    @property
    def v(self) -> float:
        """Null coordinate along e- = (1-j)/2."""
        return self.re - self.im

    @classmethod
    def from_null(cls, u: float, v: float) -> "SplitScalar":
        return cls((u + v) / 2.0, (u - v) / 2.0)

    @property
    def modulus(self) -> float:
        """The quadratic form re^2 - im^2 = u*v (may be negative)."""
        return self.u * self.v

    def conj(self) -> "SplitScalar":
        return SplitScalar(self.re, -self.im)

    def is_null(self) -> bool:
        """True on the null cone, where the number has no inverse."""
        return self.u == 0.0 or self.v == 0.0

    def _coerce(self, other) -> "SplitScalar":
        if isinstance(other, SplitScalar):
            return other
        if isinstance(other, (int, float)):
            return SplitScalar(float(other), 0.0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return SplitScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return SplitScalar(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return SplitScalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return SplitScalar(
            self.re * o.re + self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def inv(self) -> "SplitScalar":
        """Multiplicative inverse conj(z)/(re^2 - im^2).

        Raises ZeroDivisor on the null cone; null values mark geometric
        degeneracy and must surface explicitly rather than as infinities.
        """
        if self.is_null():
            raise ZeroDivisor(f"{self} lies on the null cone (u={self.u}, v={self.v})")
        m = self.modulus
        return SplitScalar(self.re / m, -self.im / m)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inv()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        out = SplitScalar(1.0, 0.0)
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __str__(self) -> str:
        return f"{self.re:g} {'+' if self.im >= 0 else '-'} {abs(self.im):g}j"


J = SplitScalar(0.0, 1.0)
ONE = SplitScalar(1.0, 0.0)


def mul(a: SplitScalar, b: SplitScalar) -> SplitScalar:
    """Product (a.re + a.im j)(b.re + b.im j) with j^2 = 1."""
    return a * b


def inv(a: SplitScalar) -> SplitScalar:
    return a.inv()


def extend_analytic(F: Callable[[float], float], z: SplitScalar) -> SplitScalar:
    """Unique split-holomorphic extension of a real-analytic F, at z.

    F(z) = (F(u) + F(v))/2 + j (F(u) - F(v))/2 with u, v the null
    coordinates of z; this agrees with F on the real axis and is annihilated
    by d/dz-bar.  Raises DomainError when u or v leaves F's domain.
    """
    try:
        fu = F(z.u)
        fv = F(z.v)
    except (ValueError, OverflowError) as exc:
        raise DomainError(f"cannot evaluate at u={z.u:.6g}, v={z.v:.6g}: {exc}") from exc
    if not (math.isfinite(fu) and math.isfinite(fv)):
        raise DomainError(f"non-finite value at u={z.u:.6g} or v={z.v:.6g}")
    return SplitScalar.from_null(fu, fv)


@dataclass(frozen=True)
class SplitVec3:
    """A 3-vector with SplitScalar entries (an element of C'^3)."""

    x: SplitScalar
    y: SplitScalar
    z: SplitScalar

    @classmethod
    def from_real(cls, arr) -> "SplitVec3":
        a = np.asarray(arr, dtype=float)
        return cls(SplitScalar(a[0]), SplitScalar(a[1]), SplitScalar(a[2]))

    def conj(self) -> "SplitVec3":
        return SplitVec3(self.x.conj(), self.y.conj(), self.z.conj())

    def __add__(self, other: "SplitVec3") -> "SplitVec3":
        return SplitVec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "SplitVec3") -> "SplitVec3":
        return SplitVec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, s) -> "SplitVec3":
        return SplitVec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def real_part(self) -> np.ndarray:
        return np.array([self.x.re, self.y.re, self.z.re])

    def imag_part(self) -> np.ndarray:
        return np.array([self.x.im, self.y.im, self.z.im])


# ---------------------------------------------------------------------------
# Taylor jets
# ---------------------------------------------------------------------------
# Coefficient convention: coeffs[k] = f^(k)(s0) / k!  (Taylor coefficients).
# The helpers below operate on numpy arrays with the coefficient index as the
# LEADING axis, so the same code serves scalar jets (shape (K+1,)) and jets
# over sample grids (shape (K+1, n)).  They are also the reference
# implementation that the compiled tape kernels must reproduce.


def jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = a.shape[0]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for i in range(k):
        for j in range(k - i):
            out[i + j] += a[i] * b[j]
    return out


def jet_div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = a.shape[0]
    a, b = np.broadcast_arrays(a, b)
    out = np.zeros(a.shape)
    out[0] = a[0] / b[0]
    for i in range(1, k):
        acc = a[i].copy() if isinstance(a[i], np.ndarray) else a[i]
        for j in range(i):
            acc = acc - out[j] * b[i - j]
        out[i] = acc / b[0]
    return out


def jet_pow_int(a: np.ndarray, n: int) -> np.ndarray:
    one = np.zeros_like(a)
    one[0] = 1.0
    if n < 0:
        return jet_div(one, jet_pow_int(a, -n))
    out = one
    base = a
    k = n
    while k:
        if k & 1:
            out = jet_mul(out, base)
        base = jet_mul(base, base)
        k >>= 1
    return out


def jet_exp(a: np.ndarray) -> np.ndarray:
    k = a.shape[0]
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for i in range(1, k):
        acc = 0.0
        for j in range(1, i + 1):
            acc = acc + j * a[j] * out[i - j]
        out[i] = acc / i
    return out


def jet_log(a: np.ndarray) -> np.ndarray:
    k = a.shape[0]
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for i in range(1, k):
        acc = i * a[i]
        for j in range(1, i):
            acc = acc - j * out[j] * a[i - j]
        out[i] = acc / (i * a[0])
    return out


def _jet_circular(a: np.ndarray, f0, g0, sign: float):
    """Shared recurrence for (sin, cos) with sign=-1 and (sinh, cosh) with +1."""
    k = a.shape[0]
    s = np.zeros_like(a)
    c = np.zeros_like(a)
    s[0] = f0
    c[0] = g0
    for i in range(1, k):
        sa = 0.0
        ca = 0.0
        for j in range(1, i + 1):
            sa = sa + j * a[j] * c[i - j]
            ca = ca + j * a[j] * s[i - j]
        s[i] = sa / i
        c[i] = sign * ca / i
    return s, c


def jet_sin_cos(a: np.ndarray):
    return _jet_circular(a, np.sin(a[0]), np.cos(a[0]), -1.0)


def jet_sinh_cosh(a: np.ndarray):
    return _jet_circular(a, np.sinh(a[0]), np.cosh(a[0]), 1.0)


DEFAULT_JET_ORDER = 4


@dataclass(frozen=True)
class Jet:
    """Truncated Taylor expansion of a real function at a base point.

    coeffs[k] is the k-th Taylor coefficient f^(k)/k!; arithmetic implements
    truncated series algebra (the Leibniz rule for products).  Default order
    is 4, enough to feed fourth derivatives of a data curve into the
    pre-geodesic criterion.
    """

    coeffs: np.ndarray

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @classmethod
    def constant(cls, value: float, order: int = DEFAULT_JET_ORDER) -> "Jet":
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, value: float, order: int = DEFAULT_JET_ORDER) -> "Jet":
        c = np.zeros(order + 1)
        c[0] = value
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def derivative(self, k: int) -> float:
        """The k-th derivative f^(k) = k! * coeffs[k]."""
        return float(self.coeffs[k]) * math.factorial(k)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        if isinstance(other, (int, float)):
            return Jet.constant(float(other), self.order)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(self.coeffs + o.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(self.coeffs - o.coeffs)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(jet_mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.coeffs[0] == 0.0:
            raise ZeroDivisor("jet division by a jet with zero value")
        return Jet(jet_div(self.coeffs, o.coeffs))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0 and self.coeffs[0] == 0.0:
            raise ZeroDivisor("negative power of a jet with zero value")
        return Jet(jet_pow_int(self.coeffs, n))

    def sin(self) -> "Jet":
        return Jet(jet_sin_cos(self.coeffs)[0])

    def cos(self) -> "Jet":
        return Jet(jet_sin_cos(self.coeffs)[1])

    def sinh(self) -> "Jet":
        return Jet(jet_sinh_cosh(self.coeffs)[0])

    def cosh(self) -> "Jet":
        return Jet(jet_sinh_cosh(self.coeffs)[1])

    def exp(self) -> "Jet":
        return Jet(jet_exp(self.coeffs))

    def log(self) -> "Jet":
        if self.coeffs[0] <= 0.0:
            raise DomainError(f"log of non-positive jet value {self.coeffs[0]:.6g}")
        return Jet(jet_log(self.coeffs))
