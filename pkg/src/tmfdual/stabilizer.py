"""The quaternionic order W(F4)<S>/(S^2 = 2, aS = S phi(a)) at finite precision.

Elements of the extended stabilizer group are pairs (a + bS, phi^e) with the
semidirect product

    (x, phi^e)(y, phi^f) = (x * phi^e(y), phi^(e+f)),

where phi acts on a + bS coefficientwise.  Inside the order,

    (a + bS)(c + dS) = (ac + 2 b phi(d)) + (ad + b phi(c)) S.

Everything is reduced modulo 2^N, which is a two-sided ideal, so the
arithmetic is exact at that precision.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .coeff import GaloisRingElement, PrecisionError


class StabilizerError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class StabilizerElement:
    a: GaloisRingElement
    b: GaloisRingElement
    galois: int = 0

    def __post_init__(self):
        if self.a.N != self.b.N:
            raise PrecisionError("a and b must share a precision")
        object.__setattr__(self, "galois", self.galois % 2)

    @property
    def N(self) -> int:
        return self.a.N

    @classmethod
    def make(cls, a=(1, 0), b=(0, 0), galois: int = 0, N: int = 4) -> StabilizerElement:
        def gr(x):
            if isinstance(x, GaloisRingElement):
                return x.reduce(N)
            if isinstance(x, int):
                return GaloisRingElement(x, 0, N)
            return GaloisRingElement(x[0], x[1], N)
        return cls(gr(a), gr(b), galois)

    @classmethod
    def one(cls, N: int = 4) -> StabilizerElement:
        return cls.make(1, 0, 0, N)

    @classmethod
    def omega(cls, N: int = 4) -> StabilizerElement:
        return cls.make((0, 1), 0, 0, N)

    @classmethod
    def S(cls, N: int = 4) -> StabilizerElement:
        return cls.make(0, 1, 0, N)

    @classmethod
    def phi(cls, N: int = 4) -> StabilizerElement:
        return cls.make(1, 0, 1, N)

    @classmethod
    def random(cls, N: int = 4, rng: random.Random | None = None, unit: bool = True,
               galois: bool = False) -> StabilizerElement:
        rng = rng or random
        while True:
            a = GaloisRingElement.random(N, rng)
            if not unit or a.is_unit():
                break
        return cls(a, GaloisRingElement.random(N, rng), rng.randrange(2) if galois else 0)

    def twist(self) -> StabilizerElement:
        """phi applied to the coefficients (the Galois part is unchanged)."""
        return StabilizerElement(self.a.frobenius(), self.b.frobenius(), self.galois)

    def __mul__(self, other: StabilizerElement) -> StabilizerElement:
        if not isinstance(other, StabilizerElement):
            return NotImplemented
        if other.N != self.N:
            raise PrecisionError(f"precision mismatch: {self.N} vs {other.N}")
        y = other.twist() if self.galois else other
        a, b, c, d = self.a, self.b, y.a, y.b
        return StabilizerElement(a * c + 2 * b * d.frobenius(),
                                 a * d + b * c.frobenius(),
                                 self.galois + other.galois)

    def __neg__(self):
        return StabilizerElement(-self.a, -self.b, self.galois)

    def __pow__(self, e: int) -> StabilizerElement:
        if e < 0:
            return self.inverse() ** (-e)
        out = StabilizerElement.one(self.N)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def is_unit(self) -> bool:
        return self.a.is_unit()

    def conjugate(self) -> StabilizerElement:
        """The order-part conjugate phi(a) - bS, with x * conj(x) = norm."""
        return StabilizerElement(self.a.frobenius(), -self.b, 0)

    def inverse(self) -> StabilizerElement:
        if not self.is_unit():
            raise StabilizerError(f"{self} is not a unit")
        n = _norm_scalar(self).inverse()
        xbar = self.conjugate()
        inv = StabilizerElement(xbar.a * n, xbar.b * n, 0)
        if self.galois:
            inv = inv.twist()
            inv = StabilizerElement(inv.a, inv.b, 1)
        return inv

    def key(self) -> tuple:
        return (self.a.a, self.a.b, self.b.a, self.b.b, self.galois)

    def is_identity(self) -> bool:
        return self.key() == (1, 0, 0, 0, 0)

    def reduce(self, N: int) -> StabilizerElement:
        return StabilizerElement(self.a.reduce(N), self.b.reduce(N), self.galois)

    def __str__(self):
        s = f"({self.a}) + ({self.b})S"
        return s + " . phi" if self.galois else s


@dataclass(frozen=True)
class NormValue:
    scalar: GaloisRingElement
    galois: int = 0

    def __post_init__(self):
        if self.scalar.b != 0:
            raise StabilizerError(f"norm {self.scalar} is not in the prime subring")

    def __mul__(self, other: NormValue) -> NormValue:
        return NormValue(self.scalar * other.scalar, (self.galois + other.galois) % 2)

    def __str__(self):
        s = str(GaloisRingElement(*self.scalar.signed(), self.scalar.N))
        return s + " . phi" if self.galois else s


def _norm_scalar(x: StabilizerElement) -> GaloisRingElement:
    return x.a * x.a.frobenius() - 2 * x.b * x.b.frobenius()


def norm(x: StabilizerElement) -> NormValue:
    """(a + bS, phi^e) -> (a phi(a) - 2 b phi(b), phi^e)."""
    return NormValue(_norm_scalar(x), x.galois)


# -- order-4 elements ---------------------------------------------------------------

def _lift_search(N: int, conditions, seeds_precision: int = 2, galois: int = 0,
                 first_only: bool = False) -> list[StabilizerElement]:
    """Solve conditions digit by digit.

    ``conditions(x, k)`` is true when x satisfies the equations mod 2^k.  All
    elements mod 2^seeds_precision are tried as seeds; each seed is lifted
    depth first (one binary digit per coordinate per step) and the first
    complete lift is kept.
    """
    m = 1 << seeds_precision
    out, seen = [], set()
    for a0, a1, b0, b1 in itertools.product(range(m), repeat=4):
        x = StabilizerElement.make((a0, a1), (b0, b1), galois, N)
        if not conditions(x, seeds_precision):
            continue
        sol = _lift(x, seeds_precision, N, conditions)
        if sol is not None and sol.key() not in seen:
            seen.add(sol.key())
            out.append(sol)
            if first_only:
                break
    return out


def _lift(x: StabilizerElement, k: int, N: int, conditions):
    if k >= N:
        return x
    step = 1 << k
    a0, a1, b0, b1 = x.a.a, x.a.b, x.b.a, x.b.b
    for d in itertools.product((0, 1), repeat=4):
        y = StabilizerElement.make((a0 + d[0] * step, a1 + d[1] * step),
                                   (b0 + d[2] * step, b1 + d[3] * step), x.galois, N)
        if conditions(y, k + 1):
            got = _lift(y, k + 1, N, conditions)
            if got is not None:
                return got
    return None


def _eq_mod(x: StabilizerElement, y: StabilizerElement, k: int) -> bool:
    m = (1 << k) - 1
    return all((u - v) & m == 0 for u, v in zip(x.key()[:4], y.key()[:4]))


def find_order4(N: int = 8) -> list[StabilizerElement]:
    """Elements with x^2 = -1 mod 2^N, lifted from every seed mod 4."""
    if N < 2:
        raise StabilizerError("need N >= 2")
    minus_one = StabilizerElement.make(-1, 0, 0, N)

    def cond(x, k):
        return _eq_mod(x * x, minus_one, k)

    sols = _lift_search(N, cond)
    if len(sols) < 2:
        raise StabilizerError(f"found only {len(sols)} solutions of x^2 = -1 mod 2^{N}")
    return sols


def find_q8_generators(N: int = 8) -> tuple[StabilizerElement, StabilizerElement]:
    """(i, j) with i^2 = -1, j = w i w^-1 and ij = -ji, lifted digit by digit."""
    if N < 2:
        raise StabilizerError("need N >= 2")
    minus_one = StabilizerElement.make(-1, 0, 0, N)
    w = StabilizerElement.omega(N)
    winv = w.inverse()

    def cond(x, k):
        if not _eq_mod(x * x, minus_one, k):
            return False
        y = w * x * winv
        return _eq_mod(x * y, -(y * x), k)

    sols = _lift_search(N, cond)
    if not sols:
        raise StabilizerError(f"no anticommuting pair found mod 2^{N}")
    i = sols[0]
    return i, w * i * winv


# -- closures and subgroups ---------------------------------------------------------------

@dataclass
class ClosureResult:
    elements: list[StabilizerElement]
    stabilized: bool
    N: int

    @property
    def order(self) -> int:
        return len(self.elements)

    def contains(self, x: StabilizerElement) -> bool:
        keys = {e.key() for e in self.elements}
        return x.key() in keys

    def __str__(self):
        return f"order {self.order}, {'stabilized' if self.stabilized else 'not stabilized (bound reached)'}"


def subgroup_closure(gens: list[StabilizerElement], bound: int = 1000) -> ClosureResult:
    """Breadth-first closure under multiplication by the generators."""
    if not gens:
        return ClosureResult([], True, 0)
    N = gens[0].N
    for g in gens:
        if not g.is_unit():
            raise StabilizerError(f"generator {g} is not a unit")
    one = StabilizerElement.one(N)
    seen = {one.key(): one}
    frontier = [one]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y.key() not in seen:
                    if len(seen) >= bound:
                        return ClosureResult(list(seen.values()), False, N)
                    seen[y.key()] = y
                    nxt.append(y)
        frontier = nxt
    elems = sorted(seen.values(), key=lambda e: e.key())
    return ClosureResult(elems, True, N)


def normalizes(g: StabilizerElement, group: ClosureResult) -> bool:
    ginv = g.inverse()
    return all(group.contains(g * x * ginv) for x in group.elements)


def standard_generators(N: int = 8) -> dict[str, StabilizerElement]:
    """Named elements used for the finite subgroups: w, i, j, -1 and a
    Galois element g normalizing G24 (giving G48)."""
    i, j = find_q8_generators(N)
    w = StabilizerElement.omega(N)
    minus = StabilizerElement.make(-1, 0, 0, N)
    g24 = subgroup_closure([i, j, w])

    def in_g24_mod(x, k):
        return any(_eq_mod(x, y, k) for y in g24.elements)

    def cond(h, k):
        # h = (g, phi): conjugation preserves G24 and h^2 lies in G24, mod 2^k
        if not h.a.is_unit():
            return False
        for x in (i, j, w):
            hx = h * x
            if not any(_eq_mod(hx, y * h, k) for y in g24.elements):
                return False
        return in_g24_mod(h * h, k)

    sols = _lift_search(N, cond, galois=1, first_only=True)
    if not sols:
        raise StabilizerError("no Galois element normalizing G24 found")
    gal = sols[0]
    return {"w": w, "i": i, "j": j, "-1": minus, "g": gal}


SUBGROUP_GENERATORS = {
    "trivial": [],
    "C2": ["-1"],
    "C3": ["w"],
    "C4": ["i"],
    "C6": ["-1", "w"],
    "Q8": ["i", "j"],
    "G24": ["i", "j", "w"],
    "G48": ["i", "j", "w", "g"],
}

SUBGROUP_ORDERS = {"trivial": 1, "C2": 2, "C3": 3, "C4": 4, "C6": 6, "Q8": 8, "G24": 24, "G48": 48}


def named_subgroup(name: str, N: int = 8, gens: dict | None = None) -> ClosureResult:
    if name not in SUBGROUP_GENERATORS:
        raise StabilizerError(f"unknown subgroup {name!r}; known: {', '.join(SUBGROUP_GENERATORS)}")
    gens = gens or standard_generators(N)
    if name == "trivial":
        return ClosureResult([StabilizerElement.one(N)], True, N)
    return subgroup_closure([gens[g] for g in SUBGROUP_GENERATORS[name]], bound=200)


# -- reduced norm ------------------------------------------------------------------------------

@dataclass(frozen=True)
class NormClass:
    """Class of a norm in (Z/2^N)^x / {+-1}, written as the exponent e of 5^e."""

    exponent: int
    N: int

    @property
    def trivial(self) -> bool:
        return self.exponent == 0

    @property
    def digits(self) -> str:
        """Binary digits of e, least significant first, N-2 of them."""
        width = max(self.N - 2, 0)
        return "".join(str((self.exponent >> k) & 1) for k in range(width))

    def __str__(self):
        return "trivial" if self.trivial else f"5^{self.exponent} (digits {self.digits})"


def reduced_norm_class(x: StabilizerElement) -> NormClass:
    """The norm of x modulo {+-1}; trivial iff x lies in the norm-one subgroup to precision N."""
    if not x.is_unit():
        raise StabilizerError(f"{x} is not a unit")
    N = x.N
    mod = 1 << N
    n = norm(x).scalar.a
    if N <= 2:
        return NormClass(0, N)
    if n % 4 == 3:
        n = (-n) % mod
    # (Z/2^N)^x = {+-1} x <5>, and <5> is cyclic of order 2^(N-2)
    e, p = 0, 1
    while p != n:
        p = p * 5 % mod
        e += 1
        if e > mod:
            raise StabilizerError("discrete log failed")
    return NormClass(e, N)
