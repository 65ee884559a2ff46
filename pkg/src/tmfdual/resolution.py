"""Degree bookkeeping for the duality tower and the final suspension shift.

The tower has four fibers

    F_0 = E^hG24,  F_1 = S^-1 E^hC6,  F_2 = S^-2 E^hC6,  F_3 = S^45 E^hG24

and mapping E^hG24 into it gives a spectral sequence with

    E_1^{s,t} = pi_{t-s} F(E^hG24, F_s)  =>  pi_{t-s} F(E^hG24, E^hS2^1),

d_r : (s, t) -> (s + r, t + r - 1).  The group at (s, t) is read from a
table for F(E^hG24, E^hH) in degree t - s - shift_s.

F(E^hG24, E^hH) splits as a product of E^hK over double cosets, with K
running through subgroups of H containing the central C2.  So it vanishes in
a degree as soon as every possible E^hK does:

    F(E^hG24, E^hC6):   K in {C2, C6}
    F(E^hG24, E^hG24):  K in {C2, C4, C6, Q8, G24}

Homotopy of E^hQ8 is the sum of the G24 table in degrees k, k - 64, k - 128.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

ZERO, UNKNOWN = "zero", "unknown"


class TableError(ValueError):
    pass


@dataclass
class HomotopyTable:
    name: str
    periodicity: int
    entries: dict[int, str] = field(default_factory=dict)
    provenance: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.periodicity <= 0:
            raise TableError("periodicity must be positive")
        self.entries = {d % self.periodicity: v for d, v in self.entries.items()}
        self.provenance = {d % self.periodicity: v for d, v in self.provenance.items()}

    def lookup(self, degree: int) -> tuple[str, str]:
        d = degree % self.periodicity
        if d not in self.entries:
            return UNKNOWN, "no entry"
        return self.entries[d], self.provenance.get(d, "")

    @classmethod
    def from_dict(cls, data: dict) -> HomotopyTable:
        try:
            per = int(data["periodicity"])
            entries, prov = {}, {}
            for e in data["entries"]:
                d = int(e["degree"]) % per
                v = str(e["value"])
                if d in entries and entries[d] != v:
                    raise TableError(f"{data['name']}: conflicting entries in degree {d}")
                entries[d] = v
                prov[d] = e.get("provenance", "")
            return cls(data.get("group", data["name"]), per, entries, prov)
        except KeyError as exc:
            raise TableError(f"table is missing field {exc}") from exc

    @classmethod
    def from_file(cls, path: str | Path) -> HomotopyTable:
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise TableError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc

    def to_dict(self) -> dict:
        return {"name": self.name, "group": self.name, "periodicity": self.periodicity,
                "entries": [{"degree": d, "value": v, "provenance": self.provenance.get(d, "")}
                            for d, v in sorted(self.entries.items())]}


def load_tables(directory: str | Path | None = None) -> dict[str, HomotopyTable]:
    if directory is None:
        root = resources.files("tmfdual") / "data" / "tables"
        files = [f for f in root.iterdir() if f.name.endswith(".json")]
        tables = [HomotopyTable.from_dict(json.loads(f.read_text(encoding="utf-8"))) for f in files]
    else:
        tables = [HomotopyTable.from_file(p) for p in sorted(Path(directory).glob("*.json"))]
    return {t.name: t for t in tables}


# -- function-spectrum tables -------------------------------------------------------

class FixedPointLookup:
    """pi_k E^hK for the groups needed, including the derived Q8 entry."""

    def __init__(self, tables: dict[str, HomotopyTable]):
        self.tables = tables

    def lookup(self, group: str, k: int) -> tuple[str, str]:
        if group == "Q8":
            parts = [self.lookup("G24", k - off) for off in (0, 64, 128)]
            vals = [v for v, _ in parts]
            prov = f"derived: G24 in degrees {k}, {k - 64}, {k - 128} -> {', '.join(vals)}"
            if all(v == ZERO for v in vals):
                return ZERO, prov
            return (UNKNOWN if UNKNOWN in vals else "nonzero"), prov
        t = self.tables.get(group)
        if t is None:
            raise TableError(f"missing table for {group}")
        return t.lookup(k)


FUNCTION_SPECTRA = {
    "C6": ["C2", "C6"],
    "G24": ["C2", "C4", "C6", "Q8", "G24"],
}


def function_spectrum_lookup(fp: FixedPointLookup, target: str, k: int) -> dict:
    """pi_k F(E^hG24, E^h<target>): zero when every piece is zero."""
    if target not in FUNCTION_SPECTRA:
        raise TableError(f"no decomposition recorded for F(E^hG24, E^h{target})")
    pieces = []
    for K in FUNCTION_SPECTRA[target]:
        v, prov = fp.lookup(K, k)
        pieces.append({"group": K, "degree": k, "value": v, "provenance": prov})
    vals = [p["value"] for p in pieces]
    value = ZERO if all(v == ZERO for v in vals) else UNKNOWN
    return {"value": value, "pieces": pieces}


# -- the tower ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fiber:
    s: int
    shift: int
    target: str  # H in F(E^hG24, S^shift E^hH)

    def label(self) -> str:
        sh = "" if self.shift == 0 else f"S^{self.shift} "
        return f"F(E^hG24, {sh}E^h{self.target})"


@dataclass(frozen=True)
class TowerSpec:
    fibers: tuple[Fiber, ...]
    periodicity: int = 192

    def __post_init__(self):
        ss = sorted(f.s for f in self.fibers)
        if ss != list(range(len(ss))):
            raise TableError(f"fiber filtrations must be 0..{len(ss) - 1} once each, got {ss}")

    @classmethod
    def default(cls) -> TowerSpec:
        return cls((Fiber(0, 0, "G24"), Fiber(1, -1, "C6"), Fiber(2, -2, "C6"), Fiber(3, 45, "G24")))

    def fiber(self, s: int) -> Fiber | None:
        for f in self.fibers:
            if f.s == s:
                return f
        return None

    @property
    def length(self) -> int:
        return len(self.fibers)


@dataclass
class E1Entry:
    s: int
    t: int
    group: str
    degree: int  # degree in the unshifted function spectrum
    targets: list[tuple[int, int, int]]  # (r, s', t')

    def to_dict(self) -> dict:
        return {"s": self.s, "t": self.t, "group": self.group, "degree": self.degree,
                "targets": [{"r": r, "s": s, "t": t} for r, s, t in self.targets]}


def tower_e1(spec: TowerSpec, stem: int) -> list[E1Entry]:
    out = []
    for f in sorted(spec.fibers, key=lambda f: f.s):
        t = stem + f.s
        targets = [(r, f.s + r, t + r - 1) for r in range(1, spec.length - f.s)]
        out.append(E1Entry(f.s, t, f"pi_{stem} {f.label()}", stem - f.shift, targets))
    return out


@dataclass
class CollapseVerdict:
    location: tuple[int, int]
    verdict: str  # "collapses" or "inconclusive"
    certificate: list[dict]

    def to_dict(self) -> dict:
        return {"location": list(self.location), "verdict": self.verdict, "certificate": self.certificate}


def check_collapse(spec: TowerSpec, tables: dict[str, HomotopyTable], location: tuple[int, int]) -> CollapseVerdict:
    """Do all differentials leaving ``location`` land in zero groups?"""
    s, t = location
    src = spec.fiber(s)
    if src is None:
        raise TableError(f"no fiber in filtration {s}")
    fp = FixedPointLookup(tables)
    cert = []
    for r in range(1, spec.length - s):
        s2, t2 = s + r, t + r - 1
        f = spec.fiber(s2)
        k = (t2 - s2) - f.shift
        res = function_spectrum_lookup(fp, f.target, k)
        cert.append({"r": r, "target": [s2, t2], "group": f"pi_{t2 - s2} {f.label()}",
                     "lookup": f"pi_{k} F(E^hG24, E^h{f.target})", "value": res["value"],
                     "pieces": res["pieces"]})
    verdict = "collapses" if all(c["value"] == ZERO for c in cert) else "inconclusive"
    return CollapseVerdict((s, t), verdict, cert)


# -- the shift ledger ----------------------------------------------------------------------

@dataclass
class LedgerStep:
    description: str
    shift: int
    anchor: str

    def to_dict(self) -> dict:
        return {"description": self.description, "shift": self.shift, "anchor": self.anchor}


@dataclass
class ShiftLedger:
    steps: list[LedgerStep]
    annotations: list[str] = field(default_factory=list)
    prerequisites: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(s.shift for s in self.steps)

    def partial_sums(self) -> list[int]:
        out, acc = [], 0
        for s in self.steps:
            acc += s.shift
            out.append(acc)
        return out

    def to_dict(self) -> dict:
        return {"steps": [s.to_dict() for s in self.steps], "partial_sums": self.partial_sums(),
                "total": self.total, "annotations": self.annotations, "prerequisites": self.prerequisites}


class PrerequisiteError(RuntimeError):
    pass


def ledger_prerequisites() -> dict:
    """The computations the k = 2 step rests on, rerun on small windows."""
    from .coeff import TruncatedSeries
    from .presentation import AlgebraPresentation
    from .sseq import (SSWindow, detect, load_differentials, product_class_nonzero,
                       run_to_Einfty, verify_lemma54)

    pres = AlgebraPresentation.default()
    specs = load_differentials(pres)
    out = {}
    try:
        verify_lemma54(1, TruncatedSeries.constant((1, 0), pres.N, 4), specs[0])
        out["d3_contradiction"] = True
    except Exception as exc:  # reported, then raised below
        out["d3_contradiction"] = f"failed: {exc}"
    E = run_to_Einfty(pres, specs, SSWindow(stems=(45, 66), smax=10, M=2))
    rep = detect(E, 45)
    f5 = sorted(c.name for c in rep.contributions if c.filtration == 5)
    out["stem45_filtration5"] = f5
    out["detects_eta_kbar_D"] = f5 == ["eta*kbar*D", "w*eta*kbar*D"]
    out["product_with_kbar_eta_nonzero"] = product_class_nonzero(E, "eta*kbar*D", "kbar*eta")
    v = check_collapse(TowerSpec.default(), load_tables(), (0, 45))
    out["collapse_0_45"] = v.verdict
    return out


def duality_ledger(k: int = 2, check: bool = True) -> ShiftLedger:
    """Compose the suspension shifts ending in D E^hG48 = S^(-4+24k) E^hG48."""
    prereq = {}
    if check and k == 2:
        prereq = ledger_prerequisites()
        ok = (prereq["d3_contradiction"] is True and prereq["detects_eta_kbar_D"]
              and prereq["product_with_kbar_eta_nonzero"] and prereq["collapse_0_45"] == "collapses")
        if not ok:
            raise PrerequisiteError(f"permanent-cycle input not established: {prereq}")
    steps = [
        LedgerStep("E_2-term of F(E^hG24, E^hG2^1) is H*(G24, pi_* S^-3 E)[[G2/G2^1]]", -3,
                   "function spectrum F(E, E^hG2^1) is a (-3)-fold desuspension"),
        LedgerStep(f"permanent cycle D^{k} g(j) in H^0(G24, E_(-3+24*{k})) gives "
                   f"F(E^hG24, E^hG2^1) = S^(-3+{24 * k}) E^hG24[[Z2]]", 24 * k,
                   "D^k g(j) a permanent cycle with g(0) a unit"),
        LedgerStep("cofiber of psi - 1 on E^hG2^1 is S L_K(2) S^0", -1,
                   "fiber sequence E^hG2^1 -> E^hG2^1 -> S L_K(2) S^0"),
    ]
    notes = ["Galois descent: Gal(F4/F2)_+ ^ E^hG48 = E^hG24, so G48 and G24 have the same shift"]
    if k == 0:
        notes.append("k = 0 reproduces F(E, E^hG2) = S^-4 E for the full group")
    return ShiftLedger(steps, notes, prereq)


# -- restriction to subgroups -----------------------------------------------------------------

REGISTRY = ("G48", "G24", "Q8", "C6", "C4", "C3", "C2", "trivial")


@dataclass
class RestrictResult:
    group: str
    shift: int
    certificate: list[str]

    def to_dict(self) -> dict:
        return {"group": self.group, "shift": self.shift, "certificate": self.certificate}


def validate_registry(N: int = 8) -> dict[str, bool]:
    """Each registered group is a subgroup of G48 (checked by closure)."""
    from .stabilizer import SUBGROUP_ORDERS, named_subgroup, standard_generators

    gens = standard_generators(N)
    g48 = named_subgroup("G48", N, gens)
    out = {}
    for name in REGISTRY:
        H = named_subgroup(name, N, gens)
        out[name] = (H.stabilized and H.order == SUBGROUP_ORDERS[name]
                     and all(g48.contains(x) for x in H.elements))
    return out


def restrict_shift(group: str, N: int = 8, registry: dict[str, bool] | None = None) -> RestrictResult:
    registry = registry if registry is not None else validate_registry(N)
    if group not in registry:
        raise TableError(f"{group} is not registered as a subgroup of G48 (known: {', '.join(REGISTRY)})")
    if not registry[group]:
        raise TableError(f"{group} failed the containment check in G48")
    cert = [f"{group} is contained in G48 (closure check at precision {N})",
            "restriction of permanent cycle: the image of D^2 g(j) in the F-fixed points stays a permanent cycle",
            "D E^hF = (D E)^hF and the shift 44 restricts"]
    if group == "trivial":
        cert.append("for F trivial this reads D E = S^44 E; with F(E, E^hG2) = S^-4 E the two agree "
                    "because 44 - (-4) = 48 is a multiple of the periodicity of E")
    return RestrictResult(group, 44, cert)
