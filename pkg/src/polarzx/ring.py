"""Exact arithmetic in Z[1/2, sqrt(2), i].

Values are ``(a + b*sqrt2 + i*(c + d*sqrt2)) / 2**exp`` with integer
coefficients checked against the signed 64-bit range.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

INT64_MAX = (1 << 63) - 1
SQRT2 = math.sqrt(2.0)


class RingOverflowError(OverflowError):
    pass


def _check(*coeffs: int) -> None:
    for x in coeffs:
        if x > INT64_MAX or x < -INT64_MAX - 1:
            raise RingOverflowError(f"ring coefficient {x} exceeds 64-bit range")


@dataclass(frozen=True, slots=True)
class RingQuad:
    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0
    exp: int = 0

    def __post_init__(self) -> None:
        a, b, c, d, e = self.a, self.b, self.c, self.d, self.exp
        g = a | b | c | d
        if g == 0:
            e = 0
        elif e > 0 and not g & 1:
            shift = min((g & -g).bit_length() - 1, e)
            a >>= shift
            b >>= shift
            c >>= shift
            d >>= shift
            e -= shift
        elif e < 0:
            scale = -e
            a, b, c, d, e = a << scale, b << scale, c << scale, d << scale, 0
        _check(a, b, c, d)
        set_ = object.__setattr__
        set_(self, "a", a)
        set_(self, "b", b)
        set_(self, "c", c)
        set_(self, "d", d)
        set_(self, "exp", e)

    @classmethod
    def from_int(cls, n: int) -> RingQuad:
        return cls(n)

    @property
    def coeffs(self) -> tuple[int, int, int, int, int]:
        return (self.a, self.b, self.c, self.d, self.exp)

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: RingQuad | int) -> RingQuad:
        if isinstance(other, int):
            other = RingQuad(other)
        return ring_add(self, other)

    __radd__ = __add__

    def __mul__(self, other: RingQuad | int) -> RingQuad:
        if isinstance(other, int):
            other = RingQuad(other)
        return ring_mul(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> RingQuad:
        return RingQuad(-self.a, -self.b, -self.c, -self.d, self.exp)

    def __sub__(self, other: RingQuad | int) -> RingQuad:
        return self + (-other)

    def __rsub__(self, other: int) -> RingQuad:
        return (-self) + other

    def __pow__(self, n: int) -> RingQuad:
        if n < 0:
            raise ValueError("negative powers are not supported")
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> RingQuad:
        return RingQuad(self.a, self.b, -self.c, -self.d, self.exp)

    def halve(self, times: int = 1) -> RingQuad:
        return RingQuad(self.a, self.b, self.c, self.d, self.exp + times)

    def abs2(self) -> RingQuad:
        return self * self.conj()

    def to_complex(self) -> complex:
        scale = math.ldexp(1.0, -self.exp)
        return complex((self.a + self.b * SQRT2) * scale, (self.c + self.d * SQRT2) * scale)

    def to_dict(self) -> dict[str, int]:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d, "exp": self.exp}

    @classmethod
    def from_dict(cls, data: dict) -> RingQuad:
        return cls(int(data["a"]), int(data["b"]), int(data["c"]), int(data["d"]), int(data["exp"]))

    def __str__(self) -> str:
        z = self.to_complex()
        return f"{z.real:.12g}{z.imag:+.12g}j"


ZERO = RingQuad(0)
ONE = RingQuad(1)
I = RingQuad(0, 0, 1, 0)
INV_SQRT2 = RingQuad(0, 1, 0, 0, 1)
SQRT2_Q = RingQuad(0, 1)
HALF = RingQuad(1, 0, 0, 0, 1)


def ring_add(x: RingQuad, y: RingQuad) -> RingQuad:
    e = max(x.exp, y.exp)
    sx, sy = e - x.exp, e - y.exp
    return RingQuad(
        (x.a << sx) + (y.a << sy),
        (x.b << sx) + (y.b << sy),
        (x.c << sx) + (y.c << sy),
        (x.d << sx) + (y.d << sy),
        e,
    )


def ring_mul(x: RingQuad, y: RingQuad) -> RingQuad:
    a1, b1, c1, d1 = x.a, x.b, x.c, x.d
    a2, b2, c2, d2 = y.a, y.b, y.c, y.d
    return RingQuad(
        a1 * a2 + 2 * b1 * b2 - c1 * c2 - 2 * d1 * d2,
        a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2,
        a1 * c2 + 2 * b1 * d2 + c1 * a2 + 2 * d1 * b2,
        a1 * d2 + b1 * c2 + c1 * b2 + d1 * a2,
        x.exp + y.exp,
    )


# e^{i k pi/4}, k = 0..7
PHASE_TABLE: tuple[RingQuad, ...] = (
    RingQuad(1, 0, 0, 0, 0),
    RingQuad(0, 1, 0, 1, 1),
    RingQuad(0, 0, 1, 0, 0),
    RingQuad(0, -1, 0, 1, 1),
    RingQuad(-1, 0, 0, 0, 0),
    RingQuad(0, -1, 0, -1, 1),
    RingQuad(0, 0, -1, 0, 0),
    RingQuad(0, 1, 0, -1, 1),
)


def phase_to_ring(k: int) -> RingQuad:
    if not 0 <= k <= 7:
        raise ValueError(f"phase index {k} outside [0, 7]")
    return PHASE_TABLE[k]


def omega(k: int) -> RingQuad:
    """e^{i k pi/4} for any integer k."""
    return PHASE_TABLE[k % 8]


def sqrt2_power(n: int) -> RingQuad:
    """sqrt(2)**n for any integer n."""
    if n >= 0:
        return RingQuad(0, 1 << (n // 2)) if n % 2 else RingQuad(1 << (n // 2))
    m = -n
    # 1/sqrt2 = sqrt2/2
    if m % 2:
        return RingQuad(0, 1, 0, 0, (m + 1) // 2)
    return RingQuad(1, 0, 0, 0, m // 2)


def approx_equal(x: RingQuad, z: complex, tol: float = 1e-12) -> bool:
    return cmath.isclose(x.to_complex(), z, abs_tol=tol)
