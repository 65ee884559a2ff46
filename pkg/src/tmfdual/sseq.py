"""Pages of the homotopy fixed point spectral sequence as slices over Z/2^N.

A slice is the group in one bidegree (s, t).  Its coordinates are two per
basis monomial (the 1- and the omega-component of the coefficient), and the
torsion of the monomials is carried as a subgroup T.  A page stores for each
slice the cycles Z_r and boundaries B_r as subgroups containing T, so
E_r(s, t) = Z_r / B_r and its F2-dimension is log2|Z_r| - log2|B_r|.

Differentials are given on generators (or on a power of a generator) and
extended by the Leibniz rule.  Turning a page computes, slice by slice,

    Z_{r+1}(X) = {z in Z_r(X) : d_r z in B_r(Y)}
    B_{r+1}(Y) = B_r(Y) + d_r Z_r(X)

for X = (s, t) and Y = (s + r, t + r - 1).

Truncation.  The computation runs on a window wider than the reported core
(stems +-1, filtration +7, j-exponent +``margin_j``).  Within the core the
groups are exact: boundaries in filtration s only involve cycles of lower
filtration, cycles in filtration s only involve boundaries up to s + 7, and a
slice at stem x only talks to stems x - 1 and x + 1.  Slices outside the core
are marked edge-unreliable and never reported.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .coeff import TruncatedSeries, gr_mul_raw, is_unit_series
from .presentation import (AlgebraElement, AlgebraPresentation, BasisElement,
                           PresentationError, Window)
from .zmod import DTYPE, Subgroup, kernel_rows, matmul

ASSUMPTION = "d_r = 0 for r > 7 (no further differentials are encoded); E_8 is reported as E_infinity"


class DifferentialError(ValueError):
    """Bad differential data: inconsistent values, d^2 != 0, or a class that is not a cycle."""


class WindowError(ValueError):
    pass


# -- differentials --------------------------------------------------------------


@dataclass
class DifferentialSpec:
    """Values of d_r on generators (or on one power of a generator).

    ``values`` maps a generator name to d_r(g); missing generators have
    d_r(g) = 0.  ``power_values`` maps a generator to ``(p, d_r(g^p))`` for
    classes where only a power carries a named differential; then
    d_r(g^e) := floor(e/p) * g^(e-p) * d_r(g^p), i.e. g^e is split as
    (g^p)^floor(e/p) * g^(e mod p) with the remainder treated as a cycle.
    """

    r: int
    pres: AlgebraPresentation
    values: dict[str, AlgebraElement] = field(default_factory=dict)
    power_values: dict[str, tuple[int, AlgebraElement]] = field(default_factory=dict)
    linear_scalars: list[str] = field(default_factory=list)
    notes: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.r < 2:
            raise DifferentialError("page number must be >= 2")
        self._cache: dict[tuple[int, ...], dict] = {}
        self._vals: list = [None] * self.pres.n
        self._pows: list = [None] * self.pres.n
        for name, v in self.values.items():
            self._check_value(name, 1, v)
            if not v.is_zero():
                self._vals[self.pres.index[name]] = v
        for name, (p, v) in self.power_values.items():
            if p < 1:
                raise DifferentialError(f"bad power {p} for {name}")
            self._check_value(name, p, v)
            if name in self.values:
                raise DifferentialError(f"{name} has both a value and a power value")
            if not v.is_zero():
                self._pows[self.pres.index[name]] = (p, v)
        for text in self.linear_scalars:
            x = self.pres.parse(text)
            d = self.apply(x)
            if not d.is_zero():
                raise DifferentialError(f"d_{self.r}({text}) = {d} but {text} is declared a linear scalar")

    def _check_value(self, name: str, p: int, v: AlgebraElement):
        if name not in self.pres.index:
            raise DifferentialError(f"unknown generator {name!r}")
        if v.is_zero():
            return
        gs, gt = self.pres.generators[self.pres.index[name]].bidegree
        want = (p * gs + self.r, p * gt + self.r - 1)
        if not v.is_homogeneous() or v.bidegree != want:
            raise DifferentialError(
                f"d_{self.r}({name}^{p}) = {v} has bidegree {v.bidegree}, expected {want}")

    @classmethod
    def from_entries(cls, pres: AlgebraPresentation, r: int, entries: list[dict],
                     linear_scalars: list[str] = ()) -> DifferentialSpec:
        values, powers, notes = {}, {}, {}
        for e in entries:
            src = e["source"].replace(" ", "")
            val = pres.parse(e["value"])
            name, _, p = src.partition("^")
            p = int(p) if p else 1
            if name not in pres.index:
                raise DifferentialError(f"source {src!r} is not a generator power")
            if p == 1:
                values[name] = val
            else:
                powers[name] = (p, val)
            if e.get("note"):
                notes[src] = e["note"]
        return cls(r, pres, values, powers, list(linear_scalars), notes)

    def d_monomial(self, m: tuple[int, ...]) -> dict:
        """d_r of a monomial (need not be normal), as normal-form terms."""
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        pres = self.pres
        mod = pres.mod
        acc: dict = {}
        parity = 0
        for i, e in enumerate(m):
            if e == 0:
                continue
            mult, rest, val = 0, None, None
            if self._vals[i] is not None:
                mult = (e & 1) if pres.stems[i] % 2 else e
                val = self._vals[i]
                rest = list(m)
                rest[i] -= 1
            elif self._pows[i] is not None:
                p, val = self._pows[i]
                mult = e // p
                rest = list(m)
                rest[i] -= p
            if mult:
                if parity:
                    mult = -mult
                for vm, vc in val.terms.items():
                    nm = tuple(a + b for a, b in zip(rest, vm))
                    for sm, sc in pres.nf_monomial(nm).items():
                        c = ((mult * vc[0]) % mod, (mult * vc[1]) % mod)
                        c = gr_mul_raw(c, sc, mod)
                        prev = acc.get(sm)
                        if prev is not None:
                            c = ((prev[0] + c[0]) % mod, (prev[1] + c[1]) % mod)
                        acc[sm] = c
            parity ^= (e * pres.stems[i]) & 1
        out = pres._reduce_terms(acc)
        self._cache[m] = out
        return out

    def apply(self, x: AlgebraElement) -> AlgebraElement:
        """d_r(x) by the Leibniz rule, in normal form."""
        if not x.is_homogeneous():
            raise DifferentialError(f"{x} is not homogeneous")
        pres = self.pres
        mod = pres.mod
        acc: dict = {}
        for m, c in x.terms.items():
            for sm, sc in self.d_monomial(m).items():
                p = gr_mul_raw(c, sc, mod)
                prev = acc.get(sm)
                if prev is not None:
                    p = ((prev[0] + p[0]) % mod, (prev[1] + p[1]) % mod)
                acc[sm] = p
        return AlgebraElement(pres, pres._reduce_terms(acc))

    def to_dict(self) -> dict:
        entries = [{"source": n, "value": v.to_string()} for n, v in self.values.items()]
        entries += [{"source": f"{n}^{p}", "value": v.to_string()} for n, (p, v) in self.power_values.items()]
        return {"r": self.r, "values": entries, "linear_scalars": list(self.linear_scalars)}


def load_differentials(pres: AlgebraPresentation, path: str | Path | None = None) -> list[DifferentialSpec]:
    if path is None:
        text = (resources.files("tmfdual") / "data" / "differentials.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DifferentialError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    specs = [DifferentialSpec.from_entries(pres, p["r"], p.get("values", []), p.get("linear_scalars", []))
             for p in data["pages"]]
    rs = [s.r for s in specs]
    if rs != sorted(set(rs)):
        raise DifferentialError(f"pages must be listed once each in increasing order, got {rs}")
    return specs


def apply_differential(spec: DifferentialSpec, x: AlgebraElement, page: Page | None = None) -> AlgebraElement:
    """d_r(x).  With ``page`` given, x must also be a cycle on that page."""
    if page is not None:
        if page.r != spec.r:
            raise DifferentialError(f"page is E_{page.r}, differential is d_{spec.r}")
        if not page.is_cycle(x):
            raise DifferentialError(f"{x} is not a class on E_{page.r}")
    return spec.apply(x)


# -- windows and slices ---------------------------------------------------------


@dataclass(frozen=True)
class SSWindow:
    """Reported core of the computation, plus the margins that make it exact."""

    stems: tuple[int, int] = (-8, 208)
    smax: int = 28
    M: int = 16
    margin_s: int = 7
    margin_j: int = 4
    margin_stem: int = 1
    delta_range: tuple[int, int] | None = None

    def __post_init__(self):
        if self.stems[0] > self.stems[1]:
            raise WindowError(f"empty stem range {self.stems}")
        if self.smax < 0 or self.M < 1:
            raise WindowError("need smax >= 0 and M >= 1")
        if min(self.margin_s, self.margin_j, self.margin_stem) < 0:
            raise WindowError("margins must be non-negative")

    @property
    def comp_stems(self) -> range:
        return range(self.stems[0] - self.margin_stem, self.stems[1] + self.margin_stem + 1)

    @property
    def comp_smax(self) -> int:
        return self.smax + self.margin_s

    @property
    def comp_jmax(self) -> int:
        return self.M + self.margin_j

    def in_core(self, s: int, stem: int) -> bool:
        return 0 <= s <= self.smax and self.stems[0] <= stem <= self.stems[1]

    def to_dict(self) -> dict:
        return {"stems": list(self.stems), "smax": self.smax, "M": self.M,
                "margins": {"s": self.margin_s, "j": self.margin_j, "stem": self.margin_stem}}


class Slice:
    """One bidegree: basis, torsion, and the current cycles / boundaries."""

    __slots__ = ("s", "t", "basis", "index", "torsion", "Z", "B", "core_mask", "edge", "N",
                 "_core")

    def __init__(self, s, t, basis: list[BasisElement], N: int, jindex: int, M: int, edge: str | None):
        self.s, self.t = s, t
        self.basis = basis
        self.N = N
        self.index = {b.monomial: k for k, b in enumerate(basis)}
        n = 2 * len(basis)
        rows = []
        for k, b in enumerate(basis):
            if b.order_exp < N:
                for c in (2 * k, 2 * k + 1):
                    r = np.zeros(n, dtype=DTYPE)
                    r[c] = 1 << b.order_exp
                    rows.append(r)
        self.torsion = Subgroup.generated_by(np.array(rows, dtype=DTYPE).reshape(-1, n), n, N)
        self.Z = Subgroup.generated_by(np.eye(n, dtype=DTYPE), n, N)
        self.B = self.torsion
        self.core_mask = np.array([b.monomial[jindex] < M for b in basis for _ in (0, 1)], dtype=bool)
        self.edge = edge
        self._core = None

    @property
    def stem(self) -> int:
        return self.t - self.s

    @property
    def n(self) -> int:
        return 2 * len(self.basis)

    def copy_with(self, Z: Subgroup, B: Subgroup) -> Slice:
        new = object.__new__(Slice)
        for k in Slice.__slots__:
            setattr(new, k, getattr(self, k))
        new.Z, new.B, new._core = Z, B, None
        return new

    def dimension(self) -> int:
        return self.Z.log_order() - self.B.log_order()

    # core parts: elements supported on coordinates with j < M

    def _restrict(self, H: Subgroup) -> Subgroup:
        n, N = self.n, self.N
        out_idx = np.flatnonzero(~self.core_mask)
        if len(out_idx) == 0:
            return H
        images = H.rows[:, out_idx] if len(H.rows) else np.zeros((0, len(out_idx)), dtype=DTYPE)
        t_rows = self.torsion.rows[:, out_idx] if len(self.torsion.rows) else np.zeros((0, len(out_idx)), DTYPE)
        modulo = Subgroup.generated_by(t_rows, len(out_idx), N)
        ker = kernel_rows(images, H.rows.reshape(-1, n), modulo, N)
        ker = ker.copy()
        ker[:, out_idx] = 0
        core_t = self.torsion.rows.copy()
        if len(core_t):
            core_t[:, out_idx] = 0
        return Subgroup.generated_by(np.vstack([ker, core_t]), n, N)

    def core(self) -> tuple[Subgroup, Subgroup]:
        if self._core is None:
            self._core = (self._restrict(self.Z), self._restrict(self.B))
        return self._core

    def core_dimension(self) -> int:
        zc, bc = self.core()
        return zc.log_order() - bc.log_order()

    def vector(self, x: AlgebraElement) -> np.ndarray:
        """Coordinates of a homogeneous element of this bidegree."""
        v = np.zeros(self.n, dtype=DTYPE)
        for m, (a, b) in x.terms.items():
            k = self.index.get(m)
            if k is None:
                raise WindowError(f"monomial {x.pres.format_monomial(m)} is not in slice ({self.s}, {self.t})")
            v[2 * k] = a
            v[2 * k + 1] = b
        return v


def _element_of(pres: AlgebraPresentation, sl: Slice, v) -> AlgebraElement:
    terms = {}
    for k, b in enumerate(sl.basis):
        a, c = int(v[2 * k]), int(v[2 * k + 1])
        if a or c:
            terms[b.monomial] = (a, c)
    return AlgebraElement(pres, pres._reduce_terms(terms))


class Page:
    """E_r in a window: slices keyed by (s, t)."""

    def __init__(self, r: int, pres: AlgebraPresentation, window: SSWindow, slices: dict,
                 infinite: bool = False, stats: dict | None = None):
        self.r = r
        self.pres = pres
        self.window = window
        self.slices: dict[tuple[int, int], Slice] = slices
        self.infinite = infinite
        self.stats = stats or {}
        self._ops: dict = {}

    @property
    def label(self) -> str:
        return "E_inf" if self.infinite else f"E_{self.r}"

    def slice(self, s: int, stem: int) -> Slice | None:
        return self.slices.get((s, stem + s))

    def relabel(self, r: int, infinite: bool = False) -> Page:
        return Page(r, self.pres, self.window, self.slices, infinite, dict(self.stats))

    def is_cycle(self, x: AlgebraElement) -> bool:
        if x.is_zero():
            return True
        s, t = x.bidegree
        sl = self.slices.get((s, t))
        if sl is None:
            raise WindowError(f"bidegree {(s, t)} outside the window")
        return sl.Z.contains(sl.vector(x))

    def class_is_zero(self, x: AlgebraElement) -> bool:
        """True when x is a cycle that is a boundary on this page."""
        if x.is_zero():
            return True
        s, t = x.bidegree
        sl = self.slices.get((s, t))
        if sl is None:
            raise WindowError(f"bidegree {(s, t)} outside the window")
        return sl.B.contains(sl.vector(x))

    # multiplication operators on coordinates; induced maps on homology

    def operator(self, x: AlgebraElement | str, s: int, t: int) -> tuple[np.ndarray, tuple[int, int]]:
        """Matrix of multiplication by x from slice (s, t) to its target slice."""
        if isinstance(x, str):
            x = self.pres.parse(x)
        key = (frozenset(x.terms.items()), s, t)
        hit = self._ops.get(key)
        if hit is not None:
            return hit
        xs, xt = x.bidegree
        src = self.slices[(s, t)]
        tgt = self.slices.get((s + xs, t + xt))
        ncol = tgt.n if tgt else 0
        mat = np.zeros((src.n, ncol), dtype=DTYPE)
        if tgt is not None:
            _fill_matrix(self.pres, src, tgt, mat, lambda m: (self.pres.monomial(m) * x).terms)
        self._ops[key] = (mat, (s + xs, t + xt))
        return self._ops[key]

    def induced_iso(self, x: AlgebraElement | str, s: int, t: int) -> bool:
        """Does multiplication by x induce an isomorphism of core homology?"""
        mat, tgt = self.operator(x, s, t)
        a = self.slices[(s, t)]
        b = self.slices.get(tgt)
        if b is None:
            return False
        za, ba = a.core()
        zb, bb = b.core()
        N = self.pres.N
        img_z = matmul(za.rows, mat, N)
        img_b = matmul(ba.rows, mat, N)
        if not all(zb.contains(r) for r in img_z) or not all(bb.contains(r) for r in img_b):
            return False
        if za.log_order() - ba.log_order() != zb.log_order() - bb.log_order():
            return False
        return Subgroup.generated_by(np.vstack([img_z, bb.rows]), b.n, N).log_order() == zb.log_order()

    # core homology

    def generators(self, s: int, stem: int) -> list[tuple[AlgebraElement, int]]:
        """Generators of core E_r(s, stem) with the order of each in the
        successive quotients (so sum of log2 orders is the F2-dimension)."""
        sl = self.slice(s, stem)
        if sl is None:
            return []
        zc, bc = sl.core()
        N = self.pres.N
        H = bc
        out = []
        for row in zc.rows:
            rep = H.reduce(row)
            if not rep.any():
                continue
            e = 1
            while e < N and not H.contains((rep << DTYPE(e)) & DTYPE((1 << N) - 1)):
                e += 1
            out.append((_element_of(self.pres, sl, rep), e))
            H = Subgroup.generated_by(np.vstack([H.rows, rep[None, :]]), sl.n, N)
        return out


def _fill_matrix(pres, src: Slice, tgt: Slice, mat: np.ndarray, image_terms) -> list[str]:
    """Rows 2k, 2k+1 of ``mat`` = images of b_k and omega*b_k.

    Terms landing outside the target basis are dropped when they lie beyond
    the window (j too large); anything else is an error.  Returns the list
    of dropped-term descriptions for the core coordinates.
    """
    mod = pres.mod
    ji = pres.index["j"]
    jcap = None
    dropped = []
    for k, b in enumerate(src.basis):
        for m, (a, c) in image_terms(b.monomial).items():
            q = tgt.index.get(m)
            if q is None:
                if jcap is None:
                    jcap = max((bb.monomial[ji] for bb in tgt.basis), default=-1)
                if pres.is_normal(m) and pres.order_exp(m) > 0 and m[ji] <= jcap:
                    raise WindowError(f"normal monomial {pres.format_monomial(m)} missing from basis")
                if src.core_mask[2 * k]:
                    dropped.append(pres.format_monomial(m))
                continue
            mat[2 * k, 2 * q] = a
            mat[2 * k, 2 * q + 1] = c
            # omega * (a + c w) = -c + (a - c) w
            mat[2 * k + 1, 2 * q] = (-c) % mod
            mat[2 * k + 1, 2 * q + 1] = (a - c) % mod
    return dropped


# -- building and turning pages -----------------------------------------------------


def e2_page(pres: AlgebraPresentation, window: SSWindow) -> Page:
    """E_2 = the algebra itself, every monomial a cycle, boundaries = torsion."""
    if "j" not in pres.index:
        raise PresentationError("the presentation needs a generator named j")
    bw = Window(smax=window.comp_smax, jmax=window.comp_jmax, delta_range=window.delta_range)
    ji = pres.index["j"]
    slices = {}
    for s in range(window.comp_smax + 1):
        for stem in window.comp_stems:
            basis = pres.basis(s, stem + s, bw)
            if not basis:
                continue
            edge = None if window.in_core(s, stem) else ("filtration margin" if s > window.smax else "stem margin")
            slices[(s, stem + s)] = Slice(s, stem + s, basis, pres.N, ji, window.M, edge)
    return Page(2, pres, window, slices)


class _Turn:
    """Work shared by the workers of one page turn (read-only during the turn)."""

    def __init__(self, page: Page, spec: DifferentialSpec):
        self.page = page
        self.spec = spec
        self.mats: dict = {}
        self.truncated: dict = {}

    def matrix(self, key) -> np.ndarray | None:
        if key in self.mats:
            return self.mats[key]
        s, t = key
        r = self.spec.r
        src = self.page.slices[key]
        tgt = self.page.slices.get((s + r, t + r - 1))
        if tgt is None:
            self.mats[key] = None
            return None
        mat = np.zeros((src.n, tgt.n), dtype=DTYPE)
        dropped = _fill_matrix(self.page.pres, src, tgt, mat, self.spec.d_monomial)
        if dropped:
            self.truncated[key] = dropped
        self.mats[key] = mat
        return mat


def page_turn(page: Page, spec: DifferentialSpec, jobs: int = 1, verify: bool = True) -> Page:
    """E_{r+1} from E_r and d_r."""
    if spec.r != page.r:
        raise DifferentialError(f"d_{spec.r} cannot act on E_{page.r}")
    r = spec.r
    N = page.pres.N
    turn = _Turn(page, spec)
    keys = sorted(page.slices)
    for k in keys:
        turn.matrix(k)
    problems = []

    def target(key):
        return (key[0] + r, key[1] + r - 1)

    def new_z(key):
        sl = page.slices[key]
        mat = turn.mats[key]
        if mat is None:
            return sl.Z
        tgt = page.slices[target(key)]
        images = matmul(sl.Z.rows, mat, N)
        ker = kernel_rows(images, sl.Z.rows, tgt.B, N)
        return Subgroup.generated_by(np.vstack([ker, sl.torsion.rows]), sl.n, N)

    def new_b(key):
        sl = page.slices[key]
        src_key = (key[0] - r, key[1] - r + 1)
        src = page.slices.get(src_key)
        if src is None or turn.mats.get(src_key) is None:
            return sl.B
        images = matmul(src.Z.rows, turn.mats[src_key], N)
        return Subgroup.generated_by(np.vstack([sl.B.rows, images]), sl.n, N)

    def check(key):
        # on the part supported in j < M; margin coordinates may see
        # truncated differentials and are not reported anyway
        sl = page.slices[key]
        mat = turn.mats[key]
        if mat is None:
            return None
        tgt = page.slices[target(key)]
        zc, bc = sl.core()
        if not all(tgt.B.contains(x) for x in matmul(bc.rows, mat, N)):
            return "d does not preserve boundaries"
        zimg = matmul(zc.rows, mat, N)
        if not all(tgt.Z.contains(x) for x in zimg):
            return "d of a cycle is not a cycle"
        mat2 = turn.mats.get(target(key))
        if mat2 is not None:
            tgt2 = page.slices[target(target(key))]
            if not all(tgt2.B.contains(x) for x in matmul(zimg, mat2, N)):
                return "d o d != 0"
        return None

    def work(key):
        return key, new_z(key), new_b(key), (check(key) if verify else None)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(work, keys))
    else:
        results = [work(k) for k in keys]
    slices = {}
    edge_failures = 0
    for key, Z, B, bad in results:
        sl = page.slices[key]
        if bad:
            if sl.edge is None:
                problems.append(f"({key[0]}, {key[1]}) stem {key[1] - key[0]}: {bad}")
            else:
                edge_failures += 1
        slices[key] = sl.copy_with(Z, B)
    for key, dropped in turn.truncated.items():
        sl = page.slices[key]
        if sl.edge is None:
            problems.append(f"({key[0]}, {key[1]}): d_{r} leaves the j-window from core coordinates: "
                            + ", ".join(dropped[:3]))
    if problems:
        raise DifferentialError(f"page turn d_{r} failed in the core:\n  " + "\n  ".join(problems))
    stats = dict(page.stats)
    stats[f"d{r}"] = {"slices": len(keys), "edge_check_failures": edge_failures,
                      "nonzero_matrices": sum(1 for m in turn.mats.values() if m is not None and m.any())}
    return Page(r + 1, page.pres, page.window, slices, stats=stats)


def run_pages(pres: AlgebraPresentation, specs: list[DifferentialSpec], window: SSWindow | None = None,
              jobs: int = 1, verify: bool = True) -> list[Page]:
    """All pages E_2, ..., E_inf.  Page r is E_r; intermediate identical pages share slices."""
    window = window or SSWindow()
    if any(s.pres is not pres for s in specs):
        raise DifferentialError("differential specs belong to a different presentation")
    page = e2_page(pres, window)
    pages = [page]
    for spec in sorted(specs, key=lambda s: s.r):
        if spec.r < page.r:
            raise DifferentialError(f"d_{spec.r} listed after E_{page.r}")
        if spec.r > page.r:
            page = page.relabel(spec.r)
            pages.append(page)
        page = page_turn(page, spec, jobs=jobs, verify=verify)
        pages.append(page)
    pages.append(page.relabel(page.r, infinite=True))
    return pages


def run_to_Einfty(pres: AlgebraPresentation, specs: list[DifferentialSpec], window: SSWindow | None = None,
                  jobs: int = 1, verify: bool = True) -> Page:
    return run_pages(pres, specs, window, jobs, verify)[-1]


# -- detection ------------------------------------------------------------------------


@dataclass
class Contribution:
    filtration: int
    name: str
    order: int
    free: bool = False  # order reached the coefficient precision

    def to_dict(self) -> dict:
        return {"filtration": self.filtration, "name": self.name, "order": self.order, "free": self.free}


@dataclass
class DetectionReport:
    stem: int
    contributions: list[Contribution]
    page: str = "E_inf"
    assumption: str = ASSUMPTION

    @property
    def dimension(self) -> int:
        """F2-dimension of the associated graded (a class of order 2^k counts k)."""
        return sum(int(math.log2(c.order)) for c in self.contributions)

    @property
    def filtrations(self) -> list[int]:
        return sorted({c.filtration for c in self.contributions})

    def is_empty(self) -> bool:
        return not self.contributions

    def to_dict(self) -> dict:
        return {"stem": self.stem, "page": self.page, "assumption": self.assumption,
                "dimension": self.dimension,
                "contributions": [c.to_dict() for c in self.contributions]}

    @classmethod
    def from_dict(cls, d: dict) -> DetectionReport:
        rep = cls(d["stem"], [Contribution(**c) for c in d["contributions"]],
                  d.get("page", "E_inf"), d.get("assumption", ASSUMPTION))
        if rep.dimension != d.get("dimension", rep.dimension):
            raise ValueError("dimension field disagrees with contributions")
        return rep


def detect(page: Page, stem: int) -> DetectionReport:
    w = page.window
    if not (w.stems[0] <= stem <= w.stems[1]):
        raise WindowError(f"stem {stem} is outside the reliable stems {w.stems}")
    contribs = []
    N = page.pres.N
    for s in range(w.smax + 1):
        for x, e in page.generators(s, stem):
            contribs.append(Contribution(s, x.to_string(), 1 << e, free=(e >= N)))
    return DetectionReport(stem, contribs, page.label)


# -- checks built on pages ----------------------------------------------------------------


@dataclass
class PeriodicityResult:
    shift: str
    page: str
    checked: int
    passed: int
    exceptions: list[dict]

    @property
    def fraction(self) -> float:
        return self.passed / self.checked if self.checked else 1.0

    def to_dict(self) -> dict:
        return {"shift": self.shift, "page": self.page, "checked": self.checked,
                "passed": self.passed, "exceptions": self.exceptions}


def periodicity(page: Page, shift: str = "D", jobs: int = 1) -> PeriodicityResult:
    """Check that multiplication by a power of D is a bijection between core slices."""
    pres = page.pres
    x = pres.parse(shift)
    xs, xt = x.bidegree
    if xs != 0:
        raise ValueError("periodicity shift must have filtration 0")
    w = page.window
    pairs = []
    for s in range(w.smax + 1):
        for stem in range(w.stems[0], w.stems[1] - xt + 1):
            if page.slice(s, stem) is not None or page.slice(s, stem + xt) is not None:
                pairs.append((s, stem))

    def one(p):
        s, stem = p
        a, b = page.slice(s, stem), page.slice(s, stem + xt)
        if a is None or b is None:
            da = a.core_dimension() if a else 0
            db = b.core_dimension() if b else 0
            return p, da == db == 0, None
        return p, page.induced_iso(x, s, stem + s), None

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            res = list(ex.map(one, pairs))
    else:
        res = [one(p) for p in pairs]
    exc = []
    for (s, stem), ok, _ in res:
        if not ok:
            edge = page.slice(s, stem).edge if page.slice(s, stem) else None
            exc.append({"s": s, "stem": stem, "edge": edge})
    return PeriodicityResult(shift, page.label, len(res), len(res) - len(exc), exc)


def verify_lemma54(a: int, G: TruncatedSeries, spec: DifferentialSpec) -> tuple[AlgebraElement, AlgebraElement]:
    """d_3(D^2 eta j^(a-1) G(j) c6 c4 eta) against D^2 j^a G(j) kbar eta."""
    pres = spec.pres
    if spec.r != 3:
        raise DifferentialError("the computation uses d_3")
    if a < 1:
        raise ValueError("a must be >= 1")
    if not is_unit_series(G):
        raise ValueError("G must be a unit series")
    zero = tuple([0] * pres.n)
    g = pres.from_series(zero, G)
    src = pres.parse(f"D^2*eta^2*c6*c4*j^{a - 1}") * g
    lhs = spec.apply(src)
    rhs = pres.parse(f"D^2*kbar*eta*j^{a}") * g
    if lhs != rhs:
        raise DifferentialError(f"d_3 of the source is {lhs}, expected {rhs}")
    return lhs, rhs


@dataclass
class PermanentCycleCertificate:
    monomial: str
    permanent: bool
    entries: list[dict]
    note: str = ""

    def to_dict(self) -> dict:
        return {"monomial": self.monomial, "permanent": self.permanent,
                "entries": self.entries, "note": self.note, "assumption": ASSUMPTION}


def check_permanent_cycle(m: AlgebraElement | str, specs: list[DifferentialSpec],
                          pages: list[Page] | None = None) -> PermanentCycleCertificate:
    """Is m a permanent cycle?  Evaluates d_r(m) on each configured page.

    Without ``pages`` a small window around m's bidegree is computed; that
    window is exact at m (stems x-1..x+1 and filtration s+7 suffice).
    """
    pres = specs[0].pres
    if isinstance(m, str):
        m = pres.parse(m)
    if m.is_zero() or not m.is_homogeneous():
        raise ValueError("need a nonzero homogeneous element")
    s, t = m.bidegree
    stem = t - s
    ji = pres.index["j"]
    jtop = max(mm[ji] for mm in m.terms)
    if pages is None:
        w = SSWindow(stems=(stem, stem), smax=s, M=jtop + 1)
        pages = run_pages(pres, specs, w)
    by_r = {}
    for p in pages:
        if not p.infinite:
            by_r.setdefault(p.r, p)
    entries = []
    permanent = True
    note = ""
    for spec in sorted(specs, key=lambda x: x.r):
        page = by_r.get(spec.r)
        if page is None:
            raise WindowError(f"no E_{spec.r} page available")
        if not page.is_cycle(m):
            entries.append({"page": spec.r, "survives": False, "reason": "not a cycle on this page"})
            permanent = False
            break
        if page.class_is_zero(m):
            entries.append({"page": spec.r, "survives": False, "reason": "hit by an earlier differential"})
            note = f"{m} is a boundary by E_{spec.r}"
            break
        d = spec.apply(m)
        zero = d.is_zero() or pages_class_zero(by_r[spec.r], d)
        entries.append({"page": spec.r, "survives": True, "d": d.to_string(), "zero_on_page": zero})
        if not zero:
            permanent = False
            break
    return PermanentCycleCertificate(m.to_string(), permanent, entries, note)


def pages_class_zero(page: Page, x: AlgebraElement) -> bool:
    try:
        return page.class_is_zero(x)
    except WindowError:
        # target beyond the computed filtrations: nothing there to be hit
        return False


# -- module structure helpers --------------------------------------------------------


def product_class_nonzero(page: Page, x: AlgebraElement | str, y: AlgebraElement | str) -> bool:
    """Is x*y a nonzero class on the page (x, y cycles, x*y in the core)?"""
    pres = page.pres
    x = pres.parse(x) if isinstance(x, str) else x
    y = pres.parse(y) if isinstance(y, str) else y
    if not page.is_cycle(x):
        raise DifferentialError(f"{x} is not a cycle on {page.label}")
    p = x * y
    if p.is_zero():
        return False
    if not page.is_cycle(p):
        raise DifferentialError(f"{p} is not a cycle on {page.label}")
    return not page.class_is_zero(p)


def j_tower(page: Page, s: int, stem: int, x: AlgebraElement) -> bool:
    """Whether j*x is still nonzero on the page (x is the start of a j-tower)."""
    jx = x * page.pres.gen("j")
    sl = page.slice(s, stem)
    if jx.is_zero():
        return False
    try:
        return not sl.B.contains(sl.vector(jx))
    except WindowError:
        return True
