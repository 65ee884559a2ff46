"""Bigraded commutative algebras given by generators and oriented rewrite rules.

Elements are stored in normal form as maps from exponent vectors (one entry
per generator, the invertible generator may carry a negative exponent) to
coefficients (a, b) in W(F4)/2^N.  The polynomial generator ``j`` is an
ordinary generator internally; ``AlgebraElement.series_terms`` regroups the
terms as j-power series when the caller wants the coefficient-ring view.

Relations come in two flavours:

* torsion relations ``2^k * m = 0``: a monomial divisible by m has additive
  order dividing 2^k;
* rewrite rules ``m -> rhs`` with a monic monomial left-hand side.

A monomial is normal when no rewrite left-hand side divides it.  Normal form
of a sum is computed by rewriting every monomial to normal monomials and then
reducing each coefficient modulo the additive order of its monomial.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

from .coeff import (GaloisRingElement, TruncatedSeries, format_gr, gr_mul_raw,
                    valuation2)
from .expr import ExpressionError, format_monomial, parse_expr, parse_relation


class PresentationError(ValueError):
    pass


class RewriteBudgetExceeded(RuntimeError):
    pass


class BidegreeError(PresentationError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    s: int | None
    t: int | None
    order: int | None = None  # power of 2, None for free
    invertible: bool = False

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.s, self.t)

    @property
    def stem(self) -> int:
        return self.t - self.s


@dataclass(frozen=True)
class RewriteRule:
    lhs: tuple[int, ...]
    rhs: tuple[tuple[tuple[int, ...], tuple[int, int]], ...]
    text: str
    kind: str = "given"
    note: str = ""


@dataclass(frozen=True)
class TorsionRule:
    pattern: tuple[int, ...]
    exponent: int  # 2^exponent * pattern = 0
    text: str


@dataclass(frozen=True)
class Window:
    """Truncation window for basis enumeration.

    ``jmax`` bounds the j-exponent (exclusive).  ``delta_range`` optionally
    bounds the exponent of the invertible generator; ``None`` leaves it free,
    which is safe because the bidegree already determines it up to finitely
    many choices.
    """

    smax: int = 28
    jmax: int = 16
    delta_range: tuple[int, int] | None = None

    def __post_init__(self):
        if self.smax < 0 or self.jmax < 1:
            raise PresentationError("window must allow s >= 0 and at least one j-power")
        if self.delta_range is not None and self.delta_range[0] > self.delta_range[1]:
            raise PresentationError(f"empty delta range {self.delta_range}")


@dataclass(frozen=True)
class BasisElement:
    monomial: tuple[int, ...]
    order_exp: int  # additive order is 2^order_exp; == N means free to precision

    def order(self, N: int) -> int | str:
        return f">=2^{N}" if self.order_exp >= N else 1 << self.order_exp


class AlgebraPresentation:
    """Generators, bidegrees, torsion and an oriented rewriting system."""

    def __init__(self, generators: list[GeneratorSpec], relations: list[dict | str],
                 N: int = 4, name: str = "", step_budget: int = 200_000):
        if N < 1:
            raise PresentationError("N must be >= 1")
        self.name = name
        self.N = N
        self.mod = 1 << N
        self.step_budget = step_budget
        self.generators = list(generators)
        self.names = [g.name for g in self.generators]
        if len(set(self.names)) != len(self.names):
            raise PresentationError("duplicate generator names")
        self.index = {n: i for i, n in enumerate(self.names)}
        self.n = len(self.names)
        self.invertible = tuple(i for i, g in enumerate(self.generators) if g.invertible)
        self.rules: list[RewriteRule] = []
        self.torsion: list[TorsionRule] = []
        self.relation_texts: list[str] = []
        for g in self.generators:
            if g.order is not None:
                e = g.order.bit_length() - 1
                if g.order != 1 << e:
                    raise PresentationError(f"order of {g.name} must be a power of 2")
                self.torsion.append(TorsionRule(self._unit_vector(g.name), e, f"{g.order}*{g.name} = 0"))
        for k, rel in enumerate(relations, start=1):
            if isinstance(rel, str):
                rel = {"rule": rel}
            self._add_relation(rel, line=k)
        self.generators = infer_bidegrees(self.generators, self.rules)
        self.bidegrees = [g.bidegree for g in self.generators]
        self.stems = [t - s for s, t in self.bidegrees]
        self.t_odd = [t % 2 for _, t in self.bidegrees]
        for r in self.rules:
            lb = self.bidegree(r.lhs)
            for m, _ in r.rhs:
                if self.bidegree(m) != lb:
                    raise BidegreeError(f"rule {r.text!r} is not homogeneous")
        self._nf_cache: dict[tuple[int, ...], dict] = {}
        self._pos_cache: dict[int, list] = {}
        self._rules_by_gen: dict[int, list[RewriteRule]] = {}
        for r in self.rules:
            first = next(i for i, e in enumerate(r.lhs) if e > 0)
            self._rules_by_gen.setdefault(first, []).append(r)

    # -- loading -------------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict, N: int = 4) -> AlgebraPresentation:
        gens = []
        for g in data["generators"]:
            s = g.get("s", "infer")
            t = g.get("t", "infer")
            order = g.get("order", "free")
            gens.append(GeneratorSpec(
                name=g["name"],
                s=None if s == "infer" else int(s),
                t=None if t == "infer" else int(t),
                order=None if order == "free" else int(order),
                invertible=bool(g.get("invertible", False)),
            ))
        return cls(gens, data.get("relations", []), N=N, name=data.get("name", ""))

    @classmethod
    def from_file(cls, path: str | Path, N: int = 4) -> AlgebraPresentation:
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PresentationError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(data, N=N)

    @classmethod
    def default(cls, N: int = 4) -> AlgebraPresentation:
        ref = resources.files("tmfdual") / "data" / "g24.json"
        return cls.from_dict(json.loads(ref.read_text(encoding="utf-8")), N=N)

    def _unit_vector(self, name: str) -> tuple[int, ...]:
        v = [0] * self.n
        v[self.index[name]] = 1
        return tuple(v)

    def _poly_to_terms(self, poly: dict, text: str, line: int) -> list[tuple[tuple[int, ...], tuple[int, int]]]:
        out = []
        for mono, c in poly.items():
            v = [0] * self.n
            w = 0
            for name, e in mono:
                if name == "w":
                    w += e
                    continue
                if name not in self.index:
                    raise ExpressionError(f"unknown symbol {name!r}", text, 0, line)
                i = self.index[name]
                if e < 0 and i not in self.invertible:
                    raise ExpressionError(f"negative power of non-invertible {name!r}", text, 0, line)
                v[i] = e
            coeff = (c % self.mod, 0)
            for _ in range(w % 3):
                coeff = gr_mul_raw(coeff, (0, 1), self.mod)
            if coeff != (0, 0):
                out.append((tuple(v), coeff))
        return out

    def _add_relation(self, rel: dict, line: int):
        text = rel["rule"]
        allowed = set(self.names) | {"w"}
        lhs, rhs = parse_relation(text, allowed, line)
        lterms = self._poly_to_terms(lhs, text, line)
        rterms = self._poly_to_terms(rhs, text, line)
        if len(lterms) != 1:
            raise PresentationError(f"line {line}: left side of {text!r} must be a single term")
        (lm, lc), = lterms
        if any(e < 0 for e in lm) or not any(lm):
            raise PresentationError(f"line {line}: left side of {text!r} must be a non-unit monomial")
        self.relation_texts.append(text)
        if lc == (1, 0):
            merged: dict = {}
            for m, c in rterms:
                prev = merged.get(m, (0, 0))
                merged[m] = ((prev[0] + c[0]) % self.mod, (prev[1] + c[1]) % self.mod)
            rhs_t = tuple(sorted((m, c) for m, c in merged.items() if c != (0, 0)))
            self.rules.append(RewriteRule(lm, rhs_t, text, rel.get("kind", "given"), rel.get("note", "")))
            return
        a, b = lc
        e = valuation2(a, self.N)
        if b != 0 or a != 1 << e or rterms:
            raise PresentationError(
                f"line {line}: {text!r} must be 'm -> rhs' or '2^k*m = 0'")
        self.torsion.append(TorsionRule(lm, e, text))

    # -- monomial helpers ------------------------------------------------------

    def bidegree(self, m: tuple[int, ...]) -> tuple[int, int]:
        s = t = 0
        for e, (gs, gt) in zip(m, self.bidegrees):
            if e:
                s += e * gs
                t += e * gt
        return (s, t)

    def stem(self, m: tuple[int, ...]) -> int:
        s, t = self.bidegree(m)
        return t - s

    def divides(self, d: tuple[int, ...], m: tuple[int, ...]) -> bool:
        inv = self.invertible
        for i, (a, b) in enumerate(zip(d, m)):
            if a > b and i not in inv:
                return False
        return True

    def applicable_rules(self, m: tuple[int, ...]) -> list[RewriteRule]:
        return [r for r in self.rules if self.divides(r.lhs, m)]

    def is_normal(self, m: tuple[int, ...]) -> bool:
        for i, e in enumerate(m):
            if e > 0:
                for r in self._rules_by_gen.get(i, ()):
                    if self.divides(r.lhs, m):
                        return False
        return True

    def order_exp(self, m: tuple[int, ...]) -> int:
        """log2 of the additive order of a monomial (N when free to precision)."""
        k = self.N
        for tr in self.torsion:
            if tr.exponent < k and self.divides(tr.pattern, m):
                k = tr.exponent
        return k

    def koszul_sign(self, m1: tuple[int, ...], m2: tuple[int, ...]) -> int:
        """Sign from reordering m1*m2 into sorted generator order.

        Uses (-1)^{t t'} on internal degrees.
        """
        odd = self.t_odd
        if not any(odd):
            return 1
        parity = 0
        acc = 0
        for i in range(self.n - 1, -1, -1):
            if odd[i]:
                parity ^= (m2[i] & 1) & (acc & 1)
                acc += m1[i]
        return -1 if parity else 1

    # -- normal forms ------------------------------------------------------------

    def _find_rule(self, m: tuple[int, ...]) -> RewriteRule | None:
        for i, e in enumerate(m):
            if e > 0:
                for r in self._rules_by_gen.get(i, ()):
                    if self.divides(r.lhs, m):
                        return r
        return None

    def nf_monomial(self, m: tuple[int, ...]) -> dict:
        """Normal form of a single monomial (coefficients not yet torsion-reduced)."""
        cached = self._nf_cache.get(m)
        if cached is not None:
            return cached
        steps = [0]
        result = self._nf_monomial(m, steps, 0)
        return result

    def _nf_monomial(self, m, steps, depth):
        cached = self._nf_cache.get(m)
        if cached is not None:
            return cached
        steps[0] += 1
        if steps[0] > self.step_budget or depth > 10_000:
            raise RewriteBudgetExceeded(f"rewriting {format_monomial(self.named(m))} exceeded step budget")
        rule = self._find_rule(m)
        if rule is None:
            out = {m: (1, 0)}
        else:
            q = tuple(a - b for a, b in zip(m, rule.lhs))
            acc: dict = {}
            for rm, rc in rule.rhs:
                sub = self._nf_monomial(tuple(a + b for a, b in zip(rm, q)), steps, depth + 1)
                for sm, sc in sub.items():
                    c = gr_mul_raw(rc, sc, self.mod)
                    prev = acc.get(sm)
                    if prev is not None:
                        c = ((prev[0] + c[0]) % self.mod, (prev[1] + c[1]) % self.mod)
                    acc[sm] = c
            out = self._reduce_terms(acc)
        self._nf_cache[m] = out
        return out

    def _reduce_terms(self, terms: dict) -> dict:
        out = {}
        for m, (a, b) in terms.items():
            k = self.order_exp(m)
            if k < self.N:
                mask = (1 << k) - 1
                a &= mask
                b &= mask
            if a or b:
                out[m] = (a, b)
        return out

    def normal_form_terms(self, terms: dict) -> dict:
        acc: dict = {}
        mod = self.mod
        for m, c in terms.items():
            if c == (0, 0):
                continue
            for sm, sc in self.nf_monomial(m).items():
                p = gr_mul_raw(c, sc, mod)
                prev = acc.get(sm)
                if prev is not None:
                    p = ((prev[0] + p[0]) % mod, (prev[1] + p[1]) % mod)
                acc[sm] = p
        return self._reduce_terms(acc)

    def normal_form_randomized(self, terms: dict, rng: random.Random) -> dict:
        """Normal form by a randomized strategy, bypassing the cache.

        At each step a random term is picked; if it is reducible a random
        applicable rule fires, otherwise (with some probability) its coefficient
        is reduced by a random applicable torsion relation.  Used to test
        confluence independently of ``normal_form_terms``.
        """
        mod = self.mod
        work = {m: c for m, c in terms.items() if c != (0, 0)}
        steps = 0
        while True:
            steps += 1
            if steps > self.step_budget:
                raise RewriteBudgetExceeded("randomized rewriting exceeded step budget")
            reducible = [m for m in work if self.applicable_rules(m)]
            if not reducible:
                break
            m = rng.choice(sorted(reducible))
            c = work.pop(m)
            if rng.random() < 0.3:
                tors = [tr for tr in self.torsion if self.divides(tr.pattern, m)]
                if tors:
                    tr = rng.choice(tors)
                    mask = (1 << tr.exponent) - 1
                    c = (c[0] & mask, c[1] & mask)
                    if c == (0, 0):
                        continue
            rule = rng.choice(self.applicable_rules(m))
            q = tuple(a - b for a, b in zip(m, rule.lhs))
            for rm, rc in rule.rhs:
                nm = tuple(a + b for a, b in zip(rm, q))
                p = gr_mul_raw(c, rc, mod)
                prev = work.get(nm, (0, 0))
                s = ((prev[0] + p[0]) % mod, (prev[1] + p[1]) % mod)
                if s == (0, 0):
                    work.pop(nm, None)
                else:
                    work[nm] = s
        return self._reduce_terms(work)

    # -- element construction -----------------------------------------------------

    def element(self, terms: dict | None = None) -> AlgebraElement:
        return AlgebraElement(self, self.normal_form_terms(terms or {}))

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, {})

    def one(self) -> AlgebraElement:
        return AlgebraElement(self, {tuple([0] * self.n): (1, 0)})

    def monomial(self, m: tuple[int, ...], coeff=(1, 0)) -> AlgebraElement:
        if isinstance(coeff, int):
            coeff = (coeff % self.mod, 0)
        elif isinstance(coeff, GaloisRingElement):
            coeff = coeff.pair
        return self.element({tuple(m): coeff})

    def gen(self, name: str) -> AlgebraElement:
        return self.monomial(self._unit_vector(name))

    def parse(self, text: str) -> AlgebraElement:
        poly = parse_expr(text, set(self.names) | {"w"})
        terms: dict = {}
        for m, c in self._poly_to_terms(poly, text, 1):
            prev = terms.get(m, (0, 0))
            terms[m] = ((prev[0] + c[0]) % self.mod, (prev[1] + c[1]) % self.mod)
        return self.element(terms)

    def from_series(self, m: tuple[int, ...], f: TruncatedSeries) -> AlgebraElement:
        """The element f(j) * m."""
        if f.N != self.N:
            raise PresentationError(f"series precision {f.N} != algebra precision {self.N}")
        ji = self.index["j"]
        terms = {}
        for k, c in enumerate(f.coeffs):
            if c != (0, 0):
                v = list(m)
                v[ji] += k
                terms[tuple(v)] = c
        return self.element(terms)

    def named(self, m: tuple[int, ...]) -> tuple[tuple[str, int], ...]:
        return tuple((self.names[i], e) for i, e in enumerate(m) if e)

    def format_monomial(self, m: tuple[int, ...]) -> str:
        return format_monomial(self.named(m), self.names)

    # -- bases --------------------------------------------------------------------

    @cached_property
    def _positive_s_gens(self) -> list[int]:
        return [i for i, (s, _) in enumerate(self.bidegrees) if s > 0]

    @cached_property
    def _power_bounds(self) -> dict[int, int]:
        """For s=0 non-invertible generators: smallest e with g^e reducible."""
        bounds = {}
        for i, (s, _) in enumerate(self.bidegrees):
            if s == 0 and i not in self.invertible:
                best = None
                for r in self.rules:
                    if r.lhs[i] > 0 and sum(1 for e in r.lhs if e) == 1:
                        best = r.lhs[i] if best is None else min(best, r.lhs[i])
                bounds[i] = best
        return bounds

    def _positive_part(self, s: int) -> list[tuple[tuple[int, ...], int]]:
        """Normal monomials in the positive-filtration generators, with their t."""
        cached = self._pos_cache.get(s)
        if cached is not None:
            return cached
        gens = self._positive_s_gens
        svals = [self.bidegrees[i][0] for i in gens]

        def rec(k, remaining):
            if k == len(gens):
                if remaining == 0:
                    yield ()
                return
            for e in range(remaining // svals[k] + 1):
                for rest in rec(k + 1, remaining - e * svals[k]):
                    yield (e,) + rest

        out = []
        for exps in rec(0, s):
            v = [0] * self.n
            for i, e in zip(gens, exps):
                v[i] = e
            v = tuple(v)
            if self.is_normal(v) and self.order_exp(v) > 0:
                out.append((v, self.bidegree(v)[1]))
        self._pos_cache[s] = out
        return out

    def basis(self, s: int, t: int, window: Window | None = None) -> list[BasisElement]:
        """Normal monomials of bidegree (s, t) in the window, sorted."""
        window = window or Window()
        if s < 0 or s > window.smax:
            return []
        if len(self.invertible) != 1:
            raise PresentationError("basis enumeration needs exactly one invertible generator")
        (di,) = self.invertible
        dt = self.bidegrees[di][1]
        ji = self.index.get("j")
        free0 = [i for i, (gs, _) in enumerate(self.bidegrees)
                 if gs == 0 and i not in self.invertible and i != ji]
        for i in free0:
            if self._power_bounds.get(i) is None:
                raise PresentationError(f"no pure-power rule bounds generator {self.names[i]}")
        out = []
        for p, tp in self._positive_part(s):
            ranges = [range(self._power_bounds[i]) for i in free0]
            for exps in itertools.product(*ranges):
                v = list(p)
                t0 = tp
                for i, e in zip(free0, exps):
                    v[i] = e
                    t0 += e * self.bidegrees[i][1]
                if (t - t0) % dt:
                    continue
                k = (t - t0) // dt
                if window.delta_range and not (window.delta_range[0] <= k <= window.delta_range[1]):
                    continue
                v[di] = k
                jrange = range(window.jmax) if ji is not None else (0,)
                for a in jrange:
                    if ji is not None:
                        v[ji] = a
                    m = tuple(v)
                    if not self.is_normal(m):
                        # higher j-powers of a reducible monomial stay reducible
                        break
                    k2 = self.order_exp(m)
                    if k2 > 0:
                        out.append(BasisElement(m, k2))
        out.sort(key=lambda b: self._sort_key(b.monomial))
        return out

    def _sort_key(self, m):
        return tuple(m)

    # -- confluence ------------------------------------------------------------------

    def critical_pairs(self) -> list[dict]:
        """Check every overlap of two rules (and of a rule with a torsion relation).

        Returns the list of failures; an empty list certifies local confluence.
        """
        fails = []
        mod = self.mod

        def lcm(a, b):
            return tuple(max(x, y) for x, y in zip(a, b))

        def overlap(a, b):
            return any(x > 0 and y > 0 for x, y in zip(a, b))

        def apply(rule, m, coeff=(1, 0)):
            q = tuple(x - y for x, y in zip(m, rule.lhs))
            terms = {}
            for rm, rc in rule.rhs:
                nm = tuple(x + y for x, y in zip(rm, q))
                terms[nm] = gr_mul_raw(coeff, rc, mod)
            return self.normal_form_terms(terms)

        for r1, r2 in itertools.combinations_with_replacement(self.rules, 2):
            if r1 is r2 or not overlap(r1.lhs, r2.lhs):
                continue
            L = lcm(r1.lhs, r2.lhs)
            a, b = apply(r1, L), apply(r2, L)
            if a != b:
                fails.append({"kind": "rule/rule", "rules": (r1.text, r2.text),
                              "monomial": self.format_monomial(L),
                              "left": self.element(a).to_string(), "right": self.element(b).to_string()})
        for tr in self.torsion:
            for r in self.rules:
                if not overlap(tr.pattern, r.lhs):
                    continue
                L = lcm(tr.pattern, r.lhs)
                c = ((1 << tr.exponent) % mod, 0)
                got = apply(r, L, c)
                if got:
                    fails.append({"kind": "torsion/rule", "rules": (tr.text, r.text),
                                  "monomial": self.format_monomial(L),
                                  "left": "0", "right": self.element(got).to_string()})
        return fails


def infer_bidegrees(gens: list[GeneratorSpec], rules: list[RewriteRule]) -> list[GeneratorSpec]:
    """Fill in unknown bidegrees from homogeneity of the rewrite rules.

    Raises BidegreeError when the linear system is inconsistent or does not
    determine every unknown.
    """
    unknown = [i for i, g in enumerate(gens) if g.s is None or g.t is None]
    if not unknown:
        return list(gens)
    col = {i: k for k, i in enumerate(unknown)}
    rows = []  # (coefficients over unknowns, rhs_s, rhs_t)
    for r in rules:
        for m, _ in r.rhs:
            diff = [a - b for a, b in zip(r.lhs, m)]
            coeffs = [Fraction(0)] * len(unknown)
            rs = rt = Fraction(0)
            for i, d in enumerate(diff):
                if not d:
                    continue
                if i in col:
                    coeffs[col[i]] += d
                else:
                    rs -= d * gens[i].s
                    rt -= d * gens[i].t
            if any(coeffs) or rs or rt:
                rows.append((coeffs, rs, rt))
    # Gaussian elimination over Q
    n = len(unknown)
    mat = [list(c) + [s, t] for c, s, t in rows]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((k for k in range(r, len(mat)) if mat[k][c] != 0), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for k in range(len(mat)):
            if k != r and mat[k][c] != 0:
                f = mat[k][c]
                mat[k] = [x - f * y for x, y in zip(mat[k], mat[r])]
        piv_cols.append(c)
        r += 1
    for row in mat[r:]:
        if row[n] != 0 or row[n + 1] != 0:
            raise BidegreeError("inconsistent bidegree constraints (mistyped relation?)")
    if len(piv_cols) < n:
        free = [gens[unknown[c]].name for c in range(n) if c not in piv_cols]
        raise BidegreeError(f"bidegrees not determined for: {', '.join(free)}")
    out = list(gens)
    for k, c in enumerate(piv_cols):
        s, t = mat[k][n], mat[k][n + 1]
        g = gens[unknown[c]]
        if s.denominator != 1 or t.denominator != 1:
            raise BidegreeError(f"non-integral bidegree for {g.name}: ({s}, {t})")
        out[unknown[c]] = GeneratorSpec(g.name, int(s), int(t), g.order, g.invertible)
    return out


class AlgebraElement:
    """Normal-form element: map monomial -> (a, b) coefficient."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres: AlgebraPresentation, terms: dict):
        self.pres = pres
        self.terms = terms

    def _coerce(self, other) -> AlgebraElement:
        if isinstance(other, AlgebraElement):
            if other.pres is not self.pres:
                raise PresentationError("elements from different presentations")
            return other
        if isinstance(other, (int, GaloisRingElement)):
            return self.pres.one() * other
        if isinstance(other, TruncatedSeries):
            return self.pres.from_series(tuple([0] * self.pres.n), other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        mod = self.pres.mod
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m, (0, 0))
            out[m] = ((prev[0] + c[0]) % mod, (prev[1] + c[1]) % mod)
        return AlgebraElement(self.pres, self.pres._reduce_terms(out))

    __radd__ = __add__

    def __neg__(self):
        mod = self.pres.mod
        return AlgebraElement(self.pres, self.pres._reduce_terms(
            {m: ((-a) % mod, (-b) % mod) for m, (a, b) in self.terms.items()}))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pres = self.pres
        if isinstance(other, int):
            other = (other % pres.mod, 0)
        elif isinstance(other, GaloisRingElement):
            other = other.pair
        if isinstance(other, tuple):
            out = {m: gr_mul_raw(c, other, pres.mod) for m, c in self.terms.items()}
            return AlgebraElement(pres, pres._reduce_terms(out))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict = {}
        mod = pres.mod
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                c = gr_mul_raw(c1, c2, mod)
                if pres.koszul_sign(m1, m2) < 0:
                    c = ((-c[0]) % mod, (-c[1]) % mod)
                m = tuple(a + b for a, b in zip(m1, m2))
                prev = acc.get(m)
                if prev is not None:
                    c = ((prev[0] + c[0]) % mod, (prev[1] + c[1]) % mod)
                acc[m] = c
        return AlgebraElement(pres, pres.normal_form_terms(acc))

    def __rmul__(self, other):
        return self * other

    def __pow__(self, e: int):
        if e < 0:
            if len(self.terms) == 1:
                (m, c), = self.terms.items()
                if all(x == 0 for i, x in enumerate(m) if i not in self.pres.invertible) and c == (1, 0):
                    return self.pres.monomial(tuple(-x for x in m)) ** (-e)
            raise PresentationError("only invertible monomials have negative powers")
        out = self.pres.one()
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def bidegree(self) -> tuple[int, int] | str:
        degs = {self.pres.bidegree(m) for m in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return "inhomogeneous" if degs else "zero"

    def is_homogeneous(self) -> bool:
        return len({self.pres.bidegree(m) for m in self.terms}) <= 1

    def series_terms(self, M: int | None = None) -> dict[tuple[int, ...], TruncatedSeries]:
        """Regroup as {j-free monomial: coefficient series in j}."""
        pres = self.pres
        ji = pres.index["j"]
        M = M or 1 + max((m[ji] for m in self.terms), default=0)
        grouped: dict = {}
        for m, c in self.terms.items():
            base = list(m)
            k = base[ji]
            base[ji] = 0
            if k >= M:
                raise PresentationError(f"j-exponent {k} beyond series precision {M}")
            grouped.setdefault(tuple(base), [(0, 0)] * M)[k] = c
        return {m: TruncatedSeries(cs, pres.N, M) for m, cs in grouped.items()}

    def coefficient(self, m: tuple[int, ...]) -> GaloisRingElement:
        a, b = self.terms.get(tuple(m), (0, 0))
        return GaloisRingElement(a, b, self.pres.N)

    def to_string(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = format_gr(self.terms[m], self.pres.mod)
            ms = self.pres.format_monomial(m)
            if ms == "1":
                parts.append(c if "+" not in c[1:] and "-" not in c[1:] else f"({c})")
            elif c == "1":
                parts.append(ms)
            elif c == "-1":
                parts.append(f"-{ms}")
            elif "+" in c[1:] or "-" in c[1:]:
                parts.append(f"({c})*{ms}")
            else:
                parts.append(f"{c}*{ms}")
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"AlgebraElement({self.to_string()})"


def normal_form(x: AlgebraElement) -> AlgebraElement:
    return x.pres.element(x.terms)
