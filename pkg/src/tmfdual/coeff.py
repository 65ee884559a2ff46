"""Truncated coefficient rings.

``GaloisRingElement`` is an element of W(F4)/2^N = (Z/2^N)[w]/(w^2 + w + 1),
stored as the pair (a, b) for a + b*w.  ``TruncatedSeries`` is a power series
in j over that ring, truncated at j^M.

The raw helpers ``gr_*`` operate on plain ``(a, b)`` tuples and a modulus; the
algebra layer uses them directly to avoid object churn in hot loops.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence


class PrecisionError(ValueError):
    pass


# -- raw pair arithmetic ------------------------------------------------------

def gr_add(x, y, mod):
    return ((x[0] + y[0]) % mod, (x[1] + y[1]) % mod)


def gr_neg(x, mod):
    return ((-x[0]) % mod, (-x[1]) % mod)


def gr_mul_raw(x, y, mod):
    # (a + bw)(c + dw) = ac + (ad + bc)w + bd w^2,  w^2 = -1 - w
    a, b = x
    c, d = y
    bd = b * d
    return ((a * c - bd) % mod, (a * d + b * c - bd) % mod)


def gr_frobenius_raw(x, mod):
    a, b = x
    return ((a - b) % mod, (-b) % mod)


def gr_is_unit_raw(x):
    # norm a^2 - ab + b^2 is odd unless a and b are both even
    return bool((x[0] | x[1]) & 1)


def gr_inverse_raw(x, mod):
    a, b = x
    n = (a * a - a * b + b * b) % mod
    if not n & 1:
        raise ZeroDivisionError(f"{a}+{b}w is not a unit")
    ninv = pow(n, -1, mod)
    fa, fb = gr_frobenius_raw(x, mod)
    return (fa * ninv % mod, fb * ninv % mod)


def valuation2(n: int, cap: int) -> int:
    """2-adic valuation of n, capped at ``cap`` (n == 0 gives cap)."""
    if n == 0:
        return cap
    return min((n & -n).bit_length() - 1, cap)


# -- Galois ring ------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class GaloisRingElement:
    a: int
    b: int
    N: int = 4

    def __post_init__(self):
        if self.N < 1:
            raise PrecisionError("precision N must be >= 1")
        mod = 1 << self.N
        object.__setattr__(self, "a", self.a % mod)
        object.__setattr__(self, "b", self.b % mod)

    @classmethod
    def from_int(cls, n: int, N: int = 4) -> GaloisRingElement:
        return cls(n, 0, N)

    @classmethod
    def omega(cls, N: int = 4) -> GaloisRingElement:
        return cls(0, 1, N)

    @classmethod
    def random(cls, N: int = 4, rng: random.Random | None = None) -> GaloisRingElement:
        rng = rng or random
        mod = 1 << N
        return cls(rng.randrange(mod), rng.randrange(mod), N)

    @property
    def modulus(self) -> int:
        return 1 << self.N

    @property
    def pair(self) -> tuple[int, int]:
        return (self.a, self.b)

    def _check(self, other) -> GaloisRingElement:
        if isinstance(other, int):
            return GaloisRingElement(other, 0, self.N)
        if not isinstance(other, GaloisRingElement):
            return NotImplemented
        if other.N != self.N:
            raise PrecisionError(f"precision mismatch: {self.N} vs {other.N}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return GaloisRingElement(self.a + other.a, self.b + other.b, self.N)

    __radd__ = __add__

    def __neg__(self):
        return GaloisRingElement(-self.a, -self.b, self.N)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return GaloisRingElement(self.a - other.a, self.b - other.b, self.N)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        a, b = gr_mul_raw(self.pair, other.pair, self.modulus)
        return GaloisRingElement(a, b, self.N)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = GaloisRingElement(1, 0, self.N)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return bool(self.a or self.b)

    def is_unit(self) -> bool:
        return gr_is_unit_raw(self.pair)

    def inverse(self) -> GaloisRingElement:
        a, b = gr_inverse_raw(self.pair, self.modulus)
        return GaloisRingElement(a, b, self.N)

    def frobenius(self) -> GaloisRingElement:
        a, b = gr_frobenius_raw(self.pair, self.modulus)
        return GaloisRingElement(a, b, self.N)

    def valuation(self) -> int:
        """Largest v <= N with 2^v dividing both coordinates."""
        return min(valuation2(self.a, self.N), valuation2(self.b, self.N))

    def reduce(self, N: int) -> GaloisRingElement:
        return GaloisRingElement(self.a, self.b, N)

    def signed(self) -> tuple[int, int]:
        """Coordinates lifted to the symmetric range around 0."""
        mod, half = self.modulus, self.modulus >> 1
        return tuple(v - mod if v >= half and mod > 2 else v for v in (self.a, self.b))

    def __str__(self):
        return format_gr(self.pair, self.modulus)

    def __repr__(self):
        return f"GaloisRingElement({self.a}, {self.b}, N={self.N})"


def format_gr(x, mod) -> str:
    a, b = x
    half = mod >> 1

    def s(v):
        return v - mod if v > half and mod > 2 else v

    a, b = s(a), s(b)
    if b == 0:
        return str(a)
    wb = "w" if b == 1 else "-w" if b == -1 else f"{b}w"
    if a == 0:
        return wb
    return f"{a}+{wb}" if b > 0 else f"{a}{wb}"


def gr_mul(x: GaloisRingElement, y: GaloisRingElement) -> GaloisRingElement:
    return x * y


def frobenius(x: GaloisRingElement) -> GaloisRingElement:
    return x.frobenius()


# -- truncated series ---------------------------------------------------------

class TruncatedSeries:
    """Power series in j over W(F4)/2^N, truncated at j^M."""

    __slots__ = ("coeffs", "N", "M")

    def __init__(self, coeffs: Iterable, N: int = 4, M: int = 16):
        if M < 1:
            raise PrecisionError("precision M must be >= 1")
        mod = 1 << N
        out = []
        for c in coeffs:
            if isinstance(c, GaloisRingElement):
                if c.N != N:
                    raise PrecisionError(f"precision mismatch: {c.N} vs {N}")
                out.append(c.pair)
            elif isinstance(c, int):
                out.append((c % mod, 0))
            else:
                out.append((c[0] % mod, c[1] % mod))
        out = out[:M]
        out.extend([(0, 0)] * (M - len(out)))
        self.coeffs: tuple[tuple[int, int], ...] = tuple(out)
        self.N = N
        self.M = M

    @classmethod
    def constant(cls, c, N: int = 4, M: int = 16) -> TruncatedSeries:
        return cls([c], N, M)

    @classmethod
    def random(cls, N: int = 4, M: int = 16, rng: random.Random | None = None,
               unit: bool = False) -> TruncatedSeries:
        rng = rng or random
        mod = 1 << N
        cs = [(rng.randrange(mod), rng.randrange(mod)) for _ in range(M)]
        if unit:
            while not gr_is_unit_raw(cs[0]):
                cs[0] = (rng.randrange(mod), rng.randrange(mod))
        return cls(cs, N, M)

    @property
    def modulus(self) -> int:
        return 1 << self.N

    def coefficient(self, i: int) -> GaloisRingElement:
        a, b = self.coeffs[i]
        return GaloisRingElement(a, b, self.N)

    def _check(self, other) -> TruncatedSeries:
        if isinstance(other, (int, GaloisRingElement)):
            return TruncatedSeries.constant(other, self.N, self.M)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if (other.N, other.M) != (self.N, self.M):
            raise PrecisionError(
                f"precision mismatch: (N,M)=({self.N},{self.M}) vs ({other.N},{other.M})")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        mod = self.modulus
        return TruncatedSeries([gr_add(x, y, mod) for x, y in zip(self.coeffs, other.coeffs)],
                               self.N, self.M)

    __radd__ = __add__

    def __neg__(self):
        mod = self.modulus
        return TruncatedSeries([gr_neg(x, mod) for x in self.coeffs], self.N, self.M)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        mod, M = self.modulus, self.M
        out = [[0, 0] for _ in range(M)]
        for i, x in enumerate(self.coeffs):
            if x == (0, 0):
                continue
            for k, y in enumerate(other.coeffs[: M - i]):
                if y == (0, 0):
                    continue
                p = gr_mul_raw(x, y, mod)
                out[i + k][0] += p[0]
                out[i + k][1] += p[1]
        return TruncatedSeries(out, self.N, self.M)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, GaloisRingElement)):
            other = TruncatedSeries.constant(other, self.N, self.M)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.N, self.M, self.coeffs) == (other.N, other.M, other.coeffs)

    def __hash__(self):
        return hash((self.N, self.M, self.coeffs))

    def __bool__(self):
        return any(c != (0, 0) for c in self.coeffs)

    def is_unit(self) -> bool:
        return gr_is_unit_raw(self.coeffs[0])

    def inverse(self) -> TruncatedSeries:
        """Inverse to precision (N, M); raises ZeroDivisionError for non-units."""
        mod, M = self.modulus, self.M
        c0inv = gr_inverse_raw(self.coeffs[0], mod)
        inv = [c0inv]
        for n in range(1, M):
            acc = [0, 0]
            for i in range(1, n + 1):
                p = gr_mul_raw(self.coeffs[i], inv[n - i], mod)
                acc[0] += p[0]
                acc[1] += p[1]
            inv.append(gr_mul_raw(gr_neg((acc[0] % mod, acc[1] % mod), mod), c0inv, mod))
        return TruncatedSeries(inv, self.N, self.M)

    def degree(self) -> int:
        """Index of the last nonzero coefficient, -1 for zero."""
        for i in range(self.M - 1, -1, -1):
            if self.coeffs[i] != (0, 0):
                return i
        return -1

    def shift(self, k: int) -> TruncatedSeries:
        """Multiply by j^k (k >= 0), dropping terms at or beyond j^M."""
        return TruncatedSeries([(0, 0)] * k + list(self.coeffs), self.N, self.M)

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == (0, 0):
                continue
            cs = format_gr(c, self.modulus)
            if i == 0:
                parts.append(cs)
            else:
                jp = "j" if i == 1 else f"j^{i}"
                parts.append(jp if cs == "1" else f"({cs})*{jp}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"TruncatedSeries({self}, N={self.N}, M={self.M})"


def is_unit_series(f: TruncatedSeries) -> bool:
    return f.is_unit()


def invert_series(f: TruncatedSeries) -> TruncatedSeries:
    return f.inverse()


def series_from_pairs(pairs: Sequence[tuple[int, int]], N: int, M: int) -> TruncatedSeries:
    return TruncatedSeries(pairs, N, M)
