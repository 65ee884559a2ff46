"""Command line interface.

Exit codes: 0 when every assertion passes, 1 when an assertion fails,
2 for unreadable input (bad relation file, bad differential file, bad flags).
"""

from __future__ import annotations

import json
import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import click

from .chart import ChartError, ChartSpec, build_chart, render_ascii, render_svg, select_page
from .coeff import GaloisRingElement
from .expr import ExpressionError, parse_expr
from .presentation import AlgebraPresentation, PresentationError
from .resolution import (PrerequisiteError, TableError, duality_ledger, restrict_shift)
from .sseq import (DetectionReport, DifferentialError, SSWindow, WindowError, detect,
                   load_differentials, run_pages)
from .stabilizer import (StabilizerElement, StabilizerError, find_order4, named_subgroup,
                         norm, standard_generators, subgroup_closure)

EXIT_OK, EXIT_ASSERT, EXIT_INPUT = 0, 1, 2

DEFAULT_DETECT = (45, -1, 63, 127)
DEFAULT_ASSERTIONS = (
    "stem 45 dimension 2",
    "stem 45 filtrations 5",
    "stem -1 empty",
    "stem 63 empty",
    "stem 127 empty",
)


@dataclass
class RunConfig:
    N: int = 4
    M: int = 16
    stems: tuple[int, int] = (-8, 208)
    smax: int = 28
    presentation: str | None = None
    differentials: str | None = None
    out: str | None = None
    jobs: int = 1
    detect: list[int] = field(default_factory=lambda: list(DEFAULT_DETECT))
    assertions: list[str] = field(default_factory=lambda: list(DEFAULT_ASSERTIONS))

    def __post_init__(self):
        if self.N < 2:
            raise click.BadParameter("N must be at least 2", param_hint="-N")
        if self.M < 1:
            raise click.BadParameter("M must be at least 1", param_hint="-M")
        if self.stems[0] > self.stems[1]:
            raise click.BadParameter("empty stem window", param_hint="--stems")
        if self.jobs < 1:
            raise click.BadParameter("jobs must be positive", param_hint="--jobs")

    def window(self) -> SSWindow:
        return SSWindow(stems=tuple(self.stems), smax=self.smax, M=self.M)


def _parse_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:\.\.|:)\s*(-?\d+)\s*", text)
    if not m:
        raise click.BadParameter(f"expected LO..HI, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma separated list of integers, got {text!r}") from None


# -- assertions ---------------------------------------------------------------------------

_ASSERT = re.compile(r"stem\s+(-?\d+)\s+(dimension\s+(\d+)|filtrations\s+([\d,\s]+)|empty|contains\s+(\S+))$")


def check_assertion(text: str, reports: dict[int, DetectionReport]) -> tuple[bool, str]:
    m = _ASSERT.match(text.strip())
    if not m:
        raise click.BadParameter(f"cannot read assertion {text!r}")
    stem = int(m.group(1))
    rep = reports.get(stem)
    if rep is None:
        raise click.BadParameter(f"assertion {text!r} refers to stem {stem}, which was not detected")
    if m.group(3) is not None:
        want = int(m.group(3))
        return rep.dimension == want, f"dimension {rep.dimension}"
    if m.group(4) is not None:
        want = sorted({int(x) for x in m.group(4).replace(" ", "").split(",") if x})
        return rep.filtrations == want, f"filtrations {rep.filtrations}"
    if m.group(5) is not None:
        names = [c.name for c in rep.contributions]
        return m.group(5) in names, f"classes {names}"
    return rep.is_empty(), f"{len(rep.contributions)} classes"


# -- helpers ----------------------------------------------------------------------------------

def _load(cfg: RunConfig):
    if cfg.presentation:
        pres = AlgebraPresentation.from_file(cfg.presentation, N=cfg.N)
    else:
        pres = AlgebraPresentation.default(N=cfg.N)
    specs = load_differentials(pres, cfg.differentials)
    return pres, specs


def _write(out: str | None, name: str, text: str):
    if out is None:
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text, encoding="utf-8")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _input_errors():
    return (PresentationError, ExpressionError, DifferentialError, TableError, json.JSONDecodeError,
            FileNotFoundError, KeyError)


def _fail_input(exc: Exception):
    click.echo(f"input error: {exc}", err=True)
    sys.exit(EXIT_INPUT)


def _window_options(f):
    f = click.option("--jobs", default=1, show_default=True, help="Worker threads for page turns.")(f)
    f = click.option("--smax", default=28, show_default=True, help="Largest filtration reported.")(f)
    f = click.option("--stems", default="-8..208", show_default=True, help="Reported stem window LO..HI.")(f)
    f = click.option("-M", "M", default=16, show_default=True, help="j-adic precision (powers of j below M).")(f)
    f = click.option("-N", "N", default=4, show_default=True, help="Coefficients modulo 2^N.")(f)
    f = click.option("--presentation", type=click.Path(), help="Presentation file (default: bundled g24.json).")(f)
    f = click.option("--differentials", type=click.Path(), help="Differential file (default: bundled).")(f)
    return f


# -- commands ----------------------------------------------------------------------------------

@click.group()
def main():
    """Homotopy fixed point spectral sequence for E^hG24 and the duality shift."""


@main.group()
def sseq():
    """Spectral sequence runs and charts."""


@sseq.command("run")
@_window_options
@click.option("--detect", "detect_stems", default=",".join(map(str, DEFAULT_DETECT)), show_default=True,
              help="Stems to report.")
@click.option("--assert", "assertions", multiple=True,
              help='Assertion such as "stem 45 dimension 2"; replaces the defaults.')
@click.option("--no-assert", is_flag=True, help="Skip the default assertions.")
@click.option("--config", type=click.Path(), help="JSON file with RunConfig fields.")
@click.option("--out", type=click.Path(), help="Directory for JSON reports.")
def sseq_run(presentation, differentials, N, M, stems, smax, jobs, detect_stems, assertions, no_assert,
             config, out):
    """Compute E_inf and write a detection report per stem."""
    try:
        fields = {}
        if config:
            fields = json.loads(Path(config).read_text(encoding="utf-8"))
            if "stems" in fields:
                fields["stems"] = tuple(fields["stems"])
        cfg = RunConfig(**{"N": N, "M": M, "stems": _parse_range(stems), "smax": smax, "jobs": jobs,
                           "presentation": presentation, "differentials": differentials, "out": out,
                           "detect": _parse_ints(detect_stems),
                           **({"assertions": list(assertions)} if assertions else {}),
                           **fields})
        if no_assert:
            cfg.assertions = []
        pres, specs = _load(cfg)
    except _input_errors() as exc:
        _fail_input(exc)
    except TypeError as exc:
        _fail_input(exc)
    pages = run_pages(pres, specs, cfg.window(), jobs=cfg.jobs)
    E = pages[-1]
    reports = {}
    for stem in cfg.detect:
        try:
            rep = detect(E, stem)
        except WindowError as exc:
            _fail_input(exc)
        reports[stem] = rep
        text = _dumps(rep.to_dict())
        _write(cfg.out, f"detect_{stem}.json", text)
        names = ", ".join(f"{c.name} (s={c.filtration}, order {c.order})" for c in rep.contributions) or "empty"
        click.echo(f"stem {stem}: dimension {rep.dimension}: {names}")
    _write(cfg.out, "run.json", _dumps({"config": asdict(cfg), "window": cfg.window().to_dict(),
                                        "stats": E.stats}))
    ok = True
    for a in cfg.assertions:
        try:
            passed, got = check_assertion(a, reports)
        except click.BadParameter as exc:
            _fail_input(exc)
        ok &= passed
        click.echo(f"{'PASS' if passed else 'FAIL'}: {a} (got {got})")
    sys.exit(EXIT_OK if ok else EXIT_ASSERT)


@sseq.command("chart")
@_window_options
@click.option("--page", default="inf", show_default=True, help="Page number (2..8) or inf.")
@click.option("--chart-stems", default="0..48", show_default=True, help="Stem range drawn.")
@click.option("--chart-smax", default=12, show_default=True, help="Top filtration drawn.")
@click.option("--out", type=click.Path(), help="Directory for the .svg and .txt files.")
def sseq_chart(presentation, differentials, N, M, stems, smax, jobs, page, chart_stems, chart_smax, out):
    """Draw a page as ASCII (stdout) and SVG."""
    try:
        lo, hi = _parse_range(chart_stems)
        wlo, whi = _parse_range(stems)
        cfg = RunConfig(N=N, M=M, stems=(wlo, whi), smax=smax, jobs=jobs,
                        presentation=presentation, differentials=differentials, out=out)
        pres, specs = _load(cfg)
    except _input_errors() as exc:
        _fail_input(exc)
    # compute only what the chart needs
    win = SSWindow(stems=(max(lo, wlo), min(hi, whi)) if lo <= hi else (wlo, wlo),
                   smax=min(chart_smax, smax), M=M)
    pages = run_pages(pres, specs, win, jobs=jobs)
    try:
        p = select_page(pages, page)
        chart = build_chart(p, ChartSpec(page, (lo, hi), chart_smax))
    except ChartError as exc:
        _fail_input(exc)
    text = render_ascii(chart)
    click.echo(text, nl=False)
    name = p.label.replace("E_", "E")
    _write(out, f"chart_{name}.svg", render_svg(chart))
    _write(out, f"chart_{name}.txt", text)


# -- stabilizer -------------------------------------------------------------------------------

def _parse_gr(text: str, N: int) -> GaloisRingElement:
    try:
        poly = parse_expr(text, {"w"})
    except ExpressionError as exc:
        raise click.BadParameter(str(exc)) from None
    out = GaloisRingElement(0, 0, N)
    w = GaloisRingElement.omega(N)
    for m, c in poly.items():
        e = dict(m).get("w", 0)
        out = out + (w ** e) * GaloisRingElement.from_int(c, N)
    return out


@main.group()
def stab():
    """Morava stabilizer group arithmetic."""


@stab.command("norm")
@click.option("--a", "a_text", default="1", show_default=True, help="Coefficient a, e.g. 1+2*w.")
@click.option("--b", "b_text", default="0", show_default=True, help="Coefficient b of S.")
@click.option("--galois", type=click.IntRange(0, 1), default=0, show_default=True)
@click.option("-N", "N", default=8, show_default=True)
def stab_norm(a_text, b_text, galois, N):
    """Norm of (a + bS, phi^e)."""
    x = StabilizerElement(_parse_gr(a_text, N), _parse_gr(b_text, N), galois)
    click.echo(str(norm(x)))


@stab.command("find-order4")
@click.option("-N", "N", default=8, show_default=True)
def stab_find_order4(N):
    """Elements with x^2 = -1 modulo 2^N, found by lifting."""
    sols = find_order4(N)
    minus_one = -StabilizerElement.one(N)
    for x in sols:
        sq = x * x
        click.echo(f"{x}    x^2 = {sq}    {'ok' if sq == minus_one else 'FAILED'}")
    click.echo(f"{len(sols)} solutions modulo 2^{N}")
    sys.exit(EXIT_OK if sols and all(x * x == minus_one for x in sols) else EXIT_ASSERT)


@stab.command("closure")
@click.option("--gens", default="i,j,w", show_default=True,
              help="Comma separated names among w, i, j, -1, g.")
@click.option("-N", "N", default=8, show_default=True)
@click.option("--bound", default=1000, show_default=True)
def stab_closure(gens, N, bound):
    """Order of the subgroup generated by standard elements."""
    table = standard_generators(N)
    names = [g.strip() for g in gens.split(",") if g.strip()]
    bad = [g for g in names if g not in table]
    if bad:
        _fail_input(StabilizerError(f"unknown generators {bad}; known: {', '.join(table)}"))
    click.echo(str(subgroup_closure([table[g] for g in names], bound=bound)))


@stab.command("subgroup")
@click.argument("name")
@click.option("-N", "N", default=8, show_default=True)
def stab_subgroup(name, N):
    """Order of a named finite subgroup."""
    try:
        click.echo(str(named_subgroup(name, N)))
    except StabilizerError as exc:
        _fail_input(exc)


# -- duality ------------------------------------------------------------------------------------

@main.group()
def dual():
    """Suspension-shift bookkeeping."""


@dual.command("ledger")
@click.option("--k", "k", default=2, show_default=True, help="Power of D in the permanent cycle.")
@click.option("--no-check", is_flag=True, help="Skip the prerequisite computations.")
@click.option("--json", "as_json", is_flag=True)
def dual_ledger(k, no_check, as_json):
    """Compose the shifts into the final suspension."""
    try:
        led = duality_ledger(k, check=not no_check)
    except PrerequisiteError as exc:
        click.echo(f"FAIL: {exc}", err=True)
        sys.exit(EXIT_ASSERT)
    if as_json:
        click.echo(_dumps(led.to_dict()), nl=False)
        return
    for step, acc in zip(led.steps, led.partial_sums()):
        click.echo(f"{step.shift:+4d}  -> {acc:4d}   {step.description}")
    for note in led.annotations:
        click.echo(f"note: {note}")
    for key, val in led.prerequisites.items():
        click.echo(f"prerequisite {key}: {val}")
    click.echo(f"total {led.total}")


@dual.command("restrict")
@click.option("--group", required=True, help="Finite subgroup of G48, e.g. C6.")
@click.option("-N", "N", default=8, show_default=True)
def dual_restrict(group, N):
    """Shift of the dual of E^hF for F inside G48."""
    try:
        res = restrict_shift(group, N)
    except TableError as exc:
        _fail_input(exc)
    for line in res.certificate:
        click.echo(f"# {line}")
    click.echo(str(res.shift))


if __name__ == "__main__":
    main()
