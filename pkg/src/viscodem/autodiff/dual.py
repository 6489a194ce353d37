"""Forward-mode dual numbers with a fixed-width tangent block.

A DualScalar carries a value plus one tangent per spatial input direction
(two for plane problems).  Arithmetic follows the chain rule exactly, so a
function evaluated on duals seeded with identity tangents returns both the
value and its spatial gradient to machine precision.  This class is the
semantic reference for the vectorized executors and is also used directly
in tests as an independent route for derivative checks.
"""
from __future__ import annotations

import math
from typing import Union

Number = Union[int, float]


class DualScalar:
    __slots__ = ("value", "tangents")

    def __init__(self, value: float, tangents=(0.0, 0.0)):
        self.value = float(value)
        self.tangents = tuple(float(t) for t in tangents)

    @property
    def width(self) -> int:
        return len(self.tangents)

    def _coerce(self, x) -> "DualScalar":
        if isinstance(x, DualScalar):
            if x.width != self.width:
                raise ValueError("tangent width mismatch")
            return x
        return DualScalar(x, (0.0,) * self.width)

    def __add__(self, other):
        o = self._coerce(other)
        return DualScalar(self.value + o.value,
                          tuple(a + b for a, b in zip(self.tangents, o.tangents)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return DualScalar(self.value - o.value,
                          tuple(a - b for a, b in zip(self.tangents, o.tangents)))

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __mul__(self, other):
        o = self._coerce(other)
        return DualScalar(self.value * o.value,
                          tuple(a * o.value + self.value * b
                                for a, b in zip(self.tangents, o.tangents)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        inv = 1.0 / o.value
        val = self.value * inv
        return DualScalar(val, tuple((a - val * b) * inv
                                     for a, b in zip(self.tangents, o.tangents)))

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def __neg__(self):
        return DualScalar(-self.value, tuple(-a for a in self.tangents))

    def __pow__(self, c: Number):
        c = float(c)
        val = self.value ** c
        d = c * self.value ** (c - 1.0)
        return DualScalar(val, tuple(d * a for a in self.tangents))

    def exp(self):
        e = math.exp(self.value)
        return DualScalar(e, tuple(e * a for a in self.tangents))

    def log(self):
        inv = 1.0 / self.value
        return DualScalar(math.log(self.value), tuple(inv * a for a in self.tangents))

    def tanh(self):
        y = math.tanh(self.value)
        d = 1.0 - y * y
        return DualScalar(y, tuple(d * a for a in self.tangents))

    def sqrt(self):
        r = math.sqrt(self.value)
        d = 0.5 / r
        return DualScalar(r, tuple(d * a for a in self.tangents))

    def sin(self):
        d = math.cos(self.value)
        return DualScalar(math.sin(self.value), tuple(d * a for a in self.tangents))

    def cos(self):
        d = -math.sin(self.value)
        return DualScalar(math.cos(self.value), tuple(d * a for a in self.tangents))

    def __repr__(self):
        return f"DualScalar({self.value!r}, {self.tangents!r})"


def lift_spatial(x: float, y: float) -> tuple[DualScalar, DualScalar]:
    """Seed a coordinate pair with identity tangent directions."""
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite coordinates ({x}, {y})")
    return DualScalar(x, (1.0, 0.0)), DualScalar(y, (0.0, 1.0))
