"""Truncated Taylor arithmetic ("jets").

A :class:`Jet` of order N stores normalized Taylor coefficients
``c[k] = f^(k)(s) / k!`` for k = 0..N.  Coefficient arrays carry trailing
batch axes, so one jet can hold a whole grid of evaluation points, or the
three components of a vector along a grid.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NonSmooth


def _first_bad(mask) -> str:
    idx = np.argwhere(np.atleast_1d(mask))
    return "" if idx.size == 0 else f" (batch index {tuple(int(i) for i in idx[0])})"


def _align(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # batch axes broadcast from the right, behind the leading coefficient axis
    d = a.ndim - b.ndim
    if d > 0:
        b = b.reshape(b.shape[:1] + (1,) * d + b.shape[1:])
    elif d < 0:
        a = a.reshape(a.shape[:1] + (1,) * -d + a.shape[1:])
    return a, b


def _cauchy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = _align(a, b)
    n = min(a.shape[0], b.shape[0])
    shape = (n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.zeros(shape)
    for k in range(n):
        out[k] = np.sum(a[: k + 1] * b[k::-1], axis=0) if k else a[0] * b[0]
    return out


def _factorials(n: int) -> np.ndarray:
    return np.array([math.factorial(k) for k in range(n + 1)], dtype=float)


class Jet:
    __slots__ = ("c",)
    __array_priority__ = 1000  # make ndarray <op> Jet defer to Jet

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)
        if self.c.ndim == 0:
            self.c = self.c[None]

    # construction
    @classmethod
    def variable(cls, x, order: int) -> "Jet":
        x = np.asarray(x, dtype=float)
        c = np.zeros((order + 1,) + x.shape)
        c[0] = x
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int, shape=()) -> "Jet":
        c = np.zeros((order + 1,) + tuple(shape))
        c[0] = value
        return cls(c)

    @classmethod
    def from_derivatives(cls, derivs) -> "Jet":
        d = np.asarray(derivs, dtype=float)
        f = _factorials(d.shape[0] - 1).reshape((-1,) + (1,) * (d.ndim - 1))
        return cls(d / f)

    # inspection
    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def shape(self) -> tuple:
        return self.c.shape[1:]

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    def derivatives(self) -> np.ndarray:
        """Array of actual derivatives ``f, f', ..., f^(N)``."""
        f = _factorials(self.order).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return self.c * f

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.c[(slice(None),) + idx])

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c[: order + 1])

    def derivative(self) -> "Jet":
        """Jet of f' (one order lower)."""
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(self.c[1:] * k)

    def integral(self, value) -> "Jet":
        """Jet of the antiderivative taking ``value`` at the base point."""
        k = np.arange(1, self.order + 2).reshape((-1,) + (1,) * (self.c.ndim - 1))
        c = np.zeros((self.order + 2,) + self.shape)
        c[0] = value
        c[1:] = self.c / k
        return Jet(c)

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, shape={self.shape})"

    # arithmetic
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(np.asarray(other, dtype=float), self.order, np.shape(other))

    def __add__(self, other):
        o = self._coerce(other)
        n = min(self.order, o.order) + 1
        a, b = _align(self.c[:n], o.c[:n])
        return Jet(a + b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            a, b = _align(self.c, np.asarray(other, dtype=float)[None])
            return Jet(a * b)
        return Jet(_cauchy(self.c, other.c))

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        a = self.c
        if np.any(a[0] == 0):
            raise DomainError("division by zero" + _first_bad(a[0] == 0))
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for k in range(1, a.shape[0]):
            b[k] = -np.sum(a[1 : k + 1] * b[k - 1 :: -1][:k], axis=0) / a[0]
        return Jet(b)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            if np.any(other == 0):
                raise DomainError("division by zero")
            a, b = _align(self.c, other[None])
            return Jet(a / b)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        if float(p).is_integer():
            return ipow(self, int(p))
        return rpow(self, float(p))


def ipow(x: Jet, n: int) -> Jet:
    """Integer power by repeated squaring (exact for polynomial jets)."""
    if n < 0:
        return ipow(x.reciprocal(), -n)
    result = Jet.constant(1.0, x.order, x.shape)
    base = x
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def rpow(x: Jet, p: float) -> Jet:
    if np.any(x.c[0] <= 0):
        raise DomainError(f"real power {p!r} of a non-positive base" + _first_bad(x.c[0] <= 0))
    return exp(p * log(x))


def exp(x: Jet) -> Jet:
    a = x.c
    b = np.zeros_like(a)
    with np.errstate(over="ignore"):
        b[0] = np.exp(a[0])
    if not np.all(np.isfinite(b[0])):
        raise DomainError("exp overflow")
    for k in range(1, a.shape[0]):
        j = np.arange(1, k + 1).reshape((-1,) + (1,) * (a.ndim - 1))
        b[k] = np.sum(j * a[1 : k + 1] * b[k - 1 :: -1][:k], axis=0) / k
    return Jet(b)


def log(x: Jet) -> Jet:
    a = x.c
    if np.any(a[0] <= 0):
        raise DomainError("log of a non-positive value" + _first_bad(a[0] <= 0))
    b = np.zeros_like(a)
    b[0] = np.log(a[0])
    for k in range(1, a.shape[0]):
        j = np.arange(1, k).reshape((-1,) + (1,) * (a.ndim - 1))
        acc = np.sum(j * b[1:k] * a[k - 1 : 0 : -1], axis=0) if k > 1 else 0.0
        b[k] = (a[k] - acc / k) / a[0]
    return Jet(b)


def sqrt(x: Jet) -> Jet:
    a = x.c
    if np.any(a[0] < 0):
        raise DomainError("sqrt of a negative value" + _first_bad(a[0] < 0))
    if x.order >= 1 and np.any(a[0] == 0):
        raise DomainError("sqrt is not differentiable at 0" + _first_bad(a[0] == 0))
    b = np.zeros_like(a)
    b[0] = np.sqrt(a[0])
    for k in range(1, a.shape[0]):
        acc = np.sum(b[1:k] * b[k - 1 : 0 : -1], axis=0) if k > 1 else 0.0
        b[k] = (a[k] - acc) / (2 * b[0])
    return Jet(b)


def _sincos(x: Jet, hyperbolic: bool) -> tuple[Jet, Jet]:
    a = x.c
    s = np.zeros_like(a)
    c = np.zeros_like(a)
    if hyperbolic:
        s[0], c[0] = np.sinh(a[0]), np.cosh(a[0])
    else:
        s[0], c[0] = np.sin(a[0]), np.cos(a[0])
    sign = 1.0 if hyperbolic else -1.0
    for k in range(1, a.shape[0]):
        j = np.arange(1, k + 1).reshape((-1,) + (1,) * (a.ndim - 1))
        ja = j * a[1 : k + 1]
        s[k] = np.sum(ja * c[k - 1 :: -1][:k], axis=0) / k
        c[k] = sign * np.sum(ja * s[k - 1 :: -1][:k], axis=0) / k
    return Jet(s), Jet(c)


def sin(x: Jet) -> Jet:
    return _sincos(x, False)[0]


def cos(x: Jet) -> Jet:
    return _sincos(x, False)[1]


def sinh(x: Jet) -> Jet:
    return _sincos(x, True)[0]


def cosh(x: Jet) -> Jet:
    return _sincos(x, True)[1]


def tanh(x: Jet) -> Jet:
    s, c = _sincos(x, True)
    return s / c


def abs_(x: Jet) -> Jet:
    v = x.c[0]
    if x.order >= 1 and np.any(v == 0):
        raise NonSmooth("abs is not differentiable at 0" + _first_bad(v == 0))
    return Jet(x.c * np.where(v < 0, -1.0, 1.0))


def compose(f: Jet, g: Jet) -> Jet:
    """Jet of ``f(g(s))`` where ``f`` is expanded around ``g``'s base value."""
    n = min(f.order, g.order)
    dg = Jet(g.c[: n + 1].copy())
    dg.c[0] = 0.0
    out = Jet.constant(f.c[n], n, np.broadcast_shapes(f.shape, g.shape))
    for j in range(n - 1, -1, -1):
        out = out * dg + f.c[j]
    return out


def revert(g: Jet) -> Jet:
    """Inverse series: given the jet of s(t) at t0, return the jet of t(s) at s(t0).

    The base value of the result is zero; callers add t0 themselves.
    """
    a1 = g.c[1]
    if np.any(a1 == 0):
        raise DomainError("series is not invertible (zero first derivative)")
    n = g.order
    shifted = Jet(g.c.copy())
    shifted.c[0] = 0.0
    b = np.zeros_like(g.c)
    b[1] = 1.0 / a1
    for k in range(2, n + 1):
        comp = compose(shifted, Jet(b[: k + 1]))
        b[k] = -comp.c[k] / a1
    return Jet(b)


def inner(a: Jet, b: Jet) -> Jet:
    """Minkowski pairing of two vector jets whose first batch axis is the component."""
    return a[0] * b[0] + a[1] * b[1] - a[2] * b[2]


def cross(a: Jet, b: Jet) -> Jet:
    c0 = a[1] * b[2] - a[2] * b[1]
    c1 = a[2] * b[0] - a[0] * b[2]
    c2 = -(a[0] * b[1] - a[1] * b[0])
    return stack([c0, c1, c2])


def stack(parts) -> Jet:
    n = min(p.order for p in parts)
    shape = np.broadcast_shapes(*(p.shape for p in parts))
    return Jet(np.stack([np.broadcast_to(p.c[: n + 1], (n + 1,) + shape) for p in parts], axis=1))
