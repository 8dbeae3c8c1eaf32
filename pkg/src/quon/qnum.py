"""q-numbers and exact integer polynomials in the deformation parameter.

The bracket used throughout is the asymmetric one,
``[N] = 1 + q + ... + q**(N-1)``, always evaluated as a geometric sum so
that ``q = 1`` needs no special casing.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence, Union

import numpy as np

Number = Union[int, float, np.ndarray]


def check_q(q: float) -> float:
    """Validate a deformation parameter and return it as a float."""
    q = float(q)
    if not -1.0 <= q <= 1.0 or math.isnan(q):
        raise ValueError(f"deformation parameter q={q!r} outside [-1, 1]")
    return q


class QPoly:
    """Polynomial in ``q`` with exact integer coefficients.

    ``coeffs[k]`` is the coefficient of ``q**k``. Instances are immutable
    and hashable; trailing zeros are stripped so the zero polynomial has an
    empty coefficient tuple.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self._c = tuple(c)

    @classmethod
    def constant(cls, value: int) -> "QPoly":
        return cls((value,))

    @classmethod
    def monomial(cls, power: int, coeff: int = 1) -> "QPoly":
        return cls((0,) * power + (coeff,))

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self._c

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self._c) - 1

    def is_zero(self) -> bool:
        return not self._c

    def _coerce(self, other) -> "QPoly":
        if isinstance(other, QPoly):
            return other
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return QPoly((int(other),))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, x in enumerate(b):
            out[k] += x
        return QPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "QPoly":
        return QPoly(-x for x in self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._c, other._c
        if not a or not b:
            return QPoly()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return QPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QPoly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result, base = QPoly((1,)), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> "QPoly":
        """Multiply by ``q**k``."""
        if not self._c:
            return self
        return QPoly((0,) * k + self._c)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(("QPoly", self._c))

    def __call__(self, q: Number) -> Number:
        """Horner evaluation at ``q`` (scalar or array)."""
        acc = 0.0 * q if isinstance(q, np.ndarray) else 0
        for c in reversed(self._c):
            acc = acc * q + c
        return acc

    evaluate = __call__

    def __bool__(self) -> bool:
        return bool(self._c)

    def __repr__(self) -> str:
        return f"QPoly({list(self._c)})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for k, c in enumerate(self._c):
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                var = "q" if k == 1 else f"q^{k}"
                body = var if mag == 1 else f"{mag}{var}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)


ZERO = QPoly()
ONE = QPoly((1,))
Q = QPoly((0, 1))


# Function forms of the ring operations.

def add(a: QPoly, b: QPoly) -> QPoly:
    return a + b


def mul(a: QPoly, b: QPoly) -> QPoly:
    return a * b


def evaluate(p: QPoly, q: Number) -> Number:
    return p(q)


def equals(a: QPoly, b: QPoly) -> bool:
    return a == b


def q_bracket(n: int, q: Number) -> Number:
    """``[n] = 1 + q + ... + q**(n-1)``; ``[0] = 0`` and ``[n](1) = n``."""
    if n < 0:
        raise ValueError("q-bracket needs n >= 0")
    acc = 0.0 * q if isinstance(q, np.ndarray) else 0.0
    for _ in range(n):
        acc = acc * q + 1.0
    return acc


def q_bracket_poly(n: int) -> QPoly:
    if n < 0:
        raise ValueError("q-bracket needs n >= 0")
    return QPoly((1,) * n)


def q_factorial(n: int, q: Number) -> Number:
    """``[n]! = [n][n-1]...[1]`` with ``[0]! = 1``."""
    if n < 0:
        raise ValueError("q-factorial needs n >= 0")
    acc = 1.0 + 0.0 * q if isinstance(q, np.ndarray) else 1.0
    for k in range(1, n + 1):
        acc = acc * q_bracket(k, q)
    return acc


def q_factorial_poly(n: int) -> QPoly:
    if n < 0:
        raise ValueError("q-factorial needs n >= 0")
    acc = ONE
    for k in range(1, n + 1):
        acc = acc * q_bracket_poly(k)
    return acc


def poly_product(factors: Sequence[QPoly]) -> QPoly:
    acc = ONE
    for f in factors:
        acc = acc * f
    return acc
