"""ASCII and SVG charts of a page.

Horizontal axis t - s, vertical axis s.  Glyphs come from the computed
successive quotients of each slice:

    □  free class carrying a j-tower      ○  order 2 class carrying a j-tower
    ⊗  order 8                            ⊙  order 4
    •  order 2

A W-module class contributes a pair of Z/2^N generators (x and w*x), so a
slice shows one glyph per pair, and classes j^k*x with k > 0 are left to the
glyph of x.  Lines of slope 1 are eta multiplications
and lines of slope 1/3 are nu multiplications; an eta line is dashed when
the product only involves monomials divisible by j (j*y = x*eta).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .sseq import Page, WindowError, j_tower

GLYPHS = {"free": "□", "free-j": "□", "2-j": "○", "8": "⊗", "4": "⊙", "2": "•"}
LEGEND = [("□", "free, j-tower"), ("○", "order 2, j-tower"), ("⊗", "order 8"),
          ("⊙", "order 4"), ("•", "order 2")]


class ChartError(ValueError):
    pass


@dataclass
class ChartSpec:
    page: str = "inf"  # "2".."8" or "inf"
    stems: tuple[int, int] = (0, 48)
    smax: int = 12
    lines: bool = True


@dataclass
class Mark:
    stem: int
    s: int
    glyph: str
    name: str


@dataclass
class Line:
    src: tuple[int, int]
    dst: tuple[int, int]
    kind: str  # "eta", "nu"
    dashed: bool = False


@dataclass
class Chart:
    label: str
    stems: tuple[int, int]
    smax: int
    marks: list[Mark] = field(default_factory=list)
    lines: list[Line] = field(default_factory=list)


def select_page(pages: list[Page], which: str) -> Page:
    if which in ("inf", "E_inf", "infinity"):
        return pages[-1]
    try:
        r = int(which)
    except ValueError:
        raise ChartError(f"unknown page {which!r}") from None
    for p in pages:
        if not p.infinite and p.r == r:
            return p
    avail = sorted({p.r for p in pages if not p.infinite})
    raise ChartError(f"page {r} out of range (computed pages: {avail} and inf)")


def _glyph(page: Page, s: int, stem: int, x, e: int) -> str:
    N = page.pres.N
    try:
        tower = j_tower(page, s, stem, x)
    except WindowError:
        tower = False
    if e >= N:
        return GLYPHS["free"]
    if e == 1:
        return GLYPHS["2-j"] if tower else GLYPHS["2"]
    if e == 2:
        return GLYPHS["4"]
    return GLYPHS["8"]


def _hits(page: Page, x, y) -> tuple[bool, bool]:
    """(x*y is a nonzero class, every monomial of x*y is divisible by j)."""
    p = x * y
    if p.is_zero():
        return False, False
    s, t = p.bidegree
    sl = page.slices.get((s, t))
    if sl is None or not page.window.in_core(s, t - s):
        return False, False
    try:
        v = sl.vector(p)
    except WindowError:
        return False, False
    if sl.B.contains(v):
        return False, False
    ji = page.pres.index["j"]
    return True, all(m[ji] > 0 for m in p.terms)


def build_chart(page: Page, spec: ChartSpec) -> Chart:
    lo, hi = spec.stems
    w = page.window
    if lo > hi:
        return Chart(page.label, spec.stems, spec.smax)
    if lo < w.stems[0] or hi > w.stems[1] or spec.smax > w.smax:
        raise ChartError(f"chart range stems {spec.stems}, s <= {spec.smax} exceeds the computed core")
    chart = Chart(page.label, spec.stems, spec.smax)
    eta, nu = page.pres.gen("eta"), page.pres.gen("nu")
    ji = page.pres.index["j"]
    for s in range(spec.smax + 1):
        for stem in range(lo, hi + 1):
            gens = page.generators(s, stem)
            # one glyph per W-module pair; j-multiples belong to a tower already drawn
            heads = [(x, e) for x, e in gens if not all(m[ji] > 0 for m in x.terms)]
            for x, e in heads[::2]:
                chart.marks.append(Mark(stem, s, _glyph(page, s, stem, x, e), x.to_string()))
            if not spec.lines:
                continue
            for kind, g, ds in (("eta", eta, 1), ("nu", nu, 3)):
                if s + 1 > spec.smax or stem + ds > hi:
                    continue
                hit = [_hits(page, x, g) for x, _ in gens]
                if any(h for h, _ in hit):
                    dashed = kind == "eta" and all(d for h, d in hit if h)
                    chart.lines.append(Line((stem, s), (stem + ds, s + 1), kind, dashed))
    return chart


def render_ascii(chart: Chart) -> str:
    lo, hi = chart.stems
    cells: dict[tuple[int, int], list[str]] = {}
    for m in chart.marks:
        cells.setdefault((m.stem, m.s), []).append(m.glyph)
    out = [f"{chart.label}  (horizontal t-s, vertical s)"]
    for s in range(chart.smax, -1, -1):
        row = f"{s:>3} |"
        for stem in range(lo, hi + 1):
            g = cells.get((stem, s), [])
            if not g:
                row += " . "
            elif len(g) == 1:
                row += f" {g[0]} "
            else:
                row += f"{g[0]}{len(g):<2d}"[:3]
        out.append(row.rstrip())
    out.append("    +" + "---" * (hi - lo + 1))
    axis = "     "
    for stem in range(lo, hi + 1):
        axis += f"{stem:^3d}" if stem % 4 == 0 else "   "
    out.append(axis.rstrip())
    out.append("legend: " + ", ".join(f"{g} {d}" for g, d in LEGEND))
    nlines = {k: sum(1 for ln in chart.lines if ln.kind == k) for k in ("eta", "nu")}
    out.append(f"eta lines: {nlines['eta']}, nu lines: {nlines['nu']}")
    return "\n".join(out) + "\n"


def render_svg(chart: Chart, unit: int = 24) -> str:
    lo, hi = chart.stems
    width = max(hi - lo + 1, 1) * unit + 3 * unit
    height = (chart.smax + 1) * unit + 3 * unit

    def xy(stem, s):
        return 2 * unit + (stem - lo) * unit + unit // 2, height - 2 * unit - s * unit - unit // 2

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}" font-family="monospace">',
             f'<title>{escape(chart.label)}</title>',
             '<rect width="100%" height="100%" fill="white"/>']
    x0, y0 = 2 * unit, height - 2 * unit
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{width - unit}" y2="{y0}" stroke="black"/>')
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{unit}" stroke="black"/>')
    for stem in range(lo, hi + 1):
        if stem % 4 == 0:
            x, _ = xy(stem, 0)
            parts.append(f'<text x="{x}" y="{y0 + unit - 6}" font-size="10" text-anchor="middle">{stem}</text>')
    for s in range(0, chart.smax + 1, 2):
        _, y = xy(lo, s)
        parts.append(f'<text x="{x0 - 6}" y="{y + 4}" font-size="10" text-anchor="end">{s}</text>')
    for ln in chart.lines:
        (ax, ay), (bx, by) = xy(*ln.src), xy(*ln.dst)
        color = "black" if ln.kind == "eta" else "#1f5fbf"
        dash = ' stroke-dasharray="3,2"' if ln.dashed else ""
        parts.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke="{color}"{dash} class="{ln.kind}"/>')
    seen: dict[tuple[int, int], int] = {}
    for m in chart.marks:
        k = seen.get((m.stem, m.s), 0)
        seen[(m.stem, m.s)] = k + 1
        x, y = xy(m.stem, m.s)
        x += 5 * k
        parts.append(f'<text x="{x}" y="{y + 4}" font-size="12" text-anchor="middle">'
                     f'<title>{escape(m.name)}</title>{escape(m.glyph)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
