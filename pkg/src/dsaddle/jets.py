"""Third-order jets: a value with its first three derivatives.

Catalog closed forms are written once as jet expressions in s; the H, a, b, c
evaluators then all come from a single code path, which keeps them mutually
consistent to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Jet:
    f0: complex
    f1: complex = 0.0
    f2: complex = 0.0
    f3: complex = 0.0

    @staticmethod
    def variable(s) -> "Jet":
        return Jet(complex(s), 1.0, 0.0, 0.0)

    @staticmethod
    def const(v) -> "Jet":
        return Jet(complex(v))

    def __add__(self, other):
        o = _lift(other)
        return Jet(self.f0 + o.f0, self.f1 + o.f1, self.f2 + o.f2, self.f3 + o.f3)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.f0, -self.f1, -self.f2, -self.f3)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) + (-self)

    def __mul__(self, other):
        o = _lift(other)
        return Jet(
            self.f0 * o.f0,
            self.f1 * o.f0 + self.f0 * o.f1,
            self.f2 * o.f0 + 2 * self.f1 * o.f1 + self.f0 * o.f2,
            self.f3 * o.f0 + 3 * self.f2 * o.f1 + 3 * self.f1 * o.f2 + self.f0 * o.f3,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * _lift(other).reciprocal()

    def __rtruediv__(self, other):
        return _lift(other) * self.reciprocal()

    def reciprocal(self) -> "Jet":
        w0, w1, w2, w3 = self.f0, self.f1, self.f2, self.f3
        r0 = 1.0 / w0
        return Jet(
            r0,
            -w1 * r0 * r0,
            (2 * w1 * w1 - w0 * w2) * r0 ** 3,
            (-6 * w1 ** 3 + 6 * w0 * w1 * w2 - w0 * w0 * w3) * r0 ** 4,
        )

    def exp(self) -> "Jet":
        e = np.exp(self.f0)
        w1, w2, w3 = self.f1, self.f2, self.f3
        return Jet(e, w1 * e, (w2 + w1 * w1) * e, (w3 + 3 * w1 * w2 + w1 ** 3) * e)

    def log(self) -> "Jet":
        w0, w1, w2, w3 = self.f0, self.f1, self.f2, self.f3
        q = w1 / w0
        return Jet(
            np.log(w0),
            q,
            w2 / w0 - q * q,
            w3 / w0 - 3 * w1 * w2 / (w0 * w0) + 2 * q ** 3,
        )

    def ipow(self, k: int) -> "Jet":
        if k < 0:
            return self.reciprocal().ipow(-k)
        out = Jet.const(1.0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out


def _lift(v):
    return v if isinstance(v, Jet) else Jet.const(v)


def power_jet(base: float, s) -> Jet:
    """base^{-s} as a jet in s (base > 0)."""
    L = np.log(base)
    v = np.exp(-complex(s) * L)
    return Jet(v, -L * v, L * L * v, -L ** 3 * v)


def cexpm1(z):
    """exp(z) - 1 for complex z, stable near 0; accepts arrays."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    ex = np.expm1(x)
    cy = np.cos(y)
    out = (ex * cy - 2.0 * np.sin(y / 2.0) ** 2) + 1j * ((ex + 1.0) * np.sin(y))
    return out if out.shape else complex(out)


def one_minus_power_jet(base: float, s) -> Jet:
    """1 - base^{-s} as a jet, with the value computed without cancellation."""
    L = np.log(base)
    v0 = -cexpm1(-complex(s) * L)  # 1 - base^{-s}
    w = 1.0 - v0                   # base^{-s}, consistent with v0
    return Jet(v0, L * w, -L * L * w, L ** 3 * w)
