import json
import random

import numpy as np
import pytest

from tmfdual.coeff import TruncatedSeries
from tmfdual.sseq import (DetectionReport, DifferentialError, DifferentialSpec, SSWindow, WindowError,
                          _element_of, apply_differential, check_permanent_cycle, detect,
                          load_differentials, periodicity, product_class_nonzero, run_pages,
                          verify_lemma54)
from tmfdual.zmod import DTYPE


def spec_for(specs, r):
    return next(s for s in specs if s.r == r)


def page_for(pages, r):
    return next(p for p in pages if p.r == r and not p.infinite)


def test_generator_values(pres, specs):
    d3, d5, d7 = (spec_for(specs, r) for r in (3, 5, 7))
    assert d3.apply(pres.gen("c6")) == pres.parse("c4*eta^3")
    assert d3.apply(pres.gen("mu")) == pres.parse("eta^4")
    assert d5.apply(pres.gen("D")) == pres.parse("kbar*nu")
    assert d7.apply(pres.parse("D^2")) == pres.parse("D*kbar*eta^3")


def test_power_rule(pres, specs):
    d7 = spec_for(specs, 7)
    # floor(e/2) copies of the named value; odd remainder treated as a cycle
    assert d7.apply(pres.parse("D^3")) == pres.parse("D^2*kbar*eta^3")
    assert d7.apply(pres.parse("D^4")).is_zero()
    assert d7.apply(pres.parse("D^6")) == pres.parse("D^5*kbar*eta^3")


def test_eq_d3_on_c6c4eta(pres, specs):
    d3 = spec_for(specs, 3)
    got = apply_differential(d3, pres.parse("c6*c4*eta"))
    assert got == pres.parse("j*kbar")
    assert pres.parse("c4^2*eta^4") == pres.parse("j*kbar")


def test_wrong_bidegree_rejected(pres):
    with pytest.raises(DifferentialError, match="bidegree"):
        DifferentialSpec(3, pres, {"c6": pres.parse("eta^3")})


def test_linear_scalars_are_checked(pres):
    with pytest.raises(DifferentialError, match="linear scalar"):
        DifferentialSpec(3, pres, {"c6": pres.parse("c4*eta^3")}, linear_scalars=["c6"])


def test_inhomogeneous_input(pres, specs):
    with pytest.raises(DifferentialError):
        spec_for(specs, 3).apply(pres.parse("eta + nu"))


def test_bad_differential_file(pres, tmp_path):
    p = tmp_path / "d.json"
    p.write_text('{"pages": [ {"r": 3,, } ]}')
    with pytest.raises(DifferentialError, match="line 1"):
        load_differentials(pres, p)
    p.write_text(json.dumps({"pages": [{"r": 5, "values": []}, {"r": 3, "values": []}]}))
    with pytest.raises(DifferentialError, match="increasing"):
        load_differentials(pres, p)


def random_cycle(page, sl, rng):
    zc, _ = sl.core()
    if len(zc.rows) == 0:
        return None
    coeffs = np.array([rng.randrange(1 << page.pres.N) for _ in zc.rows], dtype=DTYPE)
    v = (coeffs @ zc.rows) & DTYPE((1 << page.pres.N) - 1)
    x = _element_of(page.pres, sl, v)
    return None if x.is_zero() else x


def in_boundaries(page, x):
    if x.is_zero():
        return True
    return page.class_is_zero(x)


def sample_pairs(page, rng, count):
    """Random pairs of cycles whose product stays inside the computed window."""
    w = page.window
    keys = [k for k, sl in page.slices.items() if w.in_core(sl.s, sl.stem) and len(sl.core()[0].rows)]
    out, tries = [], 0
    while len(out) < count and tries < 50 * count:
        tries += 1
        a, b = page.slices[rng.choice(keys)], page.slices[rng.choice(keys)]
        s, stem = a.s + b.s, a.stem + b.stem
        if not w.in_core(s, stem) or not w.in_core(s + page.r, stem - 1):
            continue
        x, y = random_cycle(page, a, rng), random_cycle(page, b, rng)
        if x is None or y is None:
            continue
        if any(m[page.pres.index["j"]] >= w.M for m in (x * y).terms):
            continue
        out.append((x, y))
    return out


@pytest.mark.parametrize("r", [3, 5, 7])
def test_leibniz_and_j_linearity(small_pages, specs, r):
    page = page_for(small_pages, r)
    spec = spec_for(specs, r)
    pres = page.pres
    j = pres.gen("j")
    rng = random.Random(r)
    pairs = sample_pairs(page, rng, 1000)
    assert len(pairs) == 1000
    for x, y in pairs:
        sx = x.bidegree[1] - x.bidegree[0]
        lhs = spec.apply(x * y)
        rhs = spec.apply(x) * y + (-1) ** (sx % 2) * (x * spec.apply(y))
        assert in_boundaries(page_for(small_pages, r), lhs - rhs) or (lhs - rhs).is_zero(), (x, y)
        assert spec.apply(j * x) == j * spec.apply(x)


@pytest.mark.parametrize("r", [3, 5, 7])
def test_d_squared_vanishes(small_pages, specs, r):
    page = page_for(small_pages, r)
    spec = spec_for(specs, r)
    w = page.window
    for sl in page.slices.values():
        if not w.in_core(sl.s, sl.stem) or not w.in_core(sl.s + 2 * r, sl.stem - 2):
            continue
        zc, _ = sl.core()
        for row in zc.rows:
            x = _element_of(page.pres, sl, row)
            dd = spec.apply(spec.apply(x))
            if any(m[page.pres.index["j"]] >= w.M for m in dd.terms):
                continue
            assert in_boundaries(page, dd), x


def test_j_margin_does_not_change_the_core(pres, specs):
    a = run_pages(pres, specs, SSWindow(stems=(40, 50), smax=10, M=3, margin_j=4))[-1]
    b = run_pages(pres, specs, SSWindow(stems=(40, 50), smax=10, M=3, margin_j=6))[-1]
    for s in range(11):
        for stem in range(40, 51):
            da = a.slice(s, stem).core_dimension() if a.slice(s, stem) else 0
            db = b.slice(s, stem).core_dimension() if b.slice(s, stem) else 0
            assert da == db, (s, stem)


def test_detect_stem_45_small_window(small_pages):
    rep = detect(small_pages[-1], 45)
    f5 = sorted(c.name for c in rep.contributions if c.filtration == 5)
    assert f5 == ["eta*kbar*D", "w*eta*kbar*D"]
    assert all(c.order == 2 for c in rep.contributions if c.filtration == 5)


def test_detect_outside_window(small_pages):
    with pytest.raises(WindowError):
        detect(small_pages[-1], 200)


def test_report_round_trip(small_pages):
    rep = detect(small_pages[-1], 3)
    again = DetectionReport.from_dict(json.loads(json.dumps(rep.to_dict())))
    assert again.to_dict() == rep.to_dict()
    bad = rep.to_dict()
    bad["dimension"] += 1
    with pytest.raises(ValueError):
        DetectionReport.from_dict(bad)


def test_product_with_kbar_eta(small_pages):
    assert product_class_nonzero(small_pages[-1], "eta*kbar*D", "kbar*eta")


def test_e2_delta_periodicity_small(small_pages):
    res = periodicity(small_pages[0], "D")
    assert res.checked > 0
    assert res.passed == res.checked


def test_permanent_cycles(pres, specs):
    assert check_permanent_cycle("D^8", specs).permanent
    cert = check_permanent_cycle("D", specs)
    assert not cert.permanent
    assert cert.entries[-1]["page"] == 5
    # d5(D^2) = 2*nu*kbar*D is already nonzero, so the named d7 value is never reached
    cert = check_permanent_cycle("D^2", specs)
    assert not cert.permanent and cert.entries[-1]["page"] == 5
    assert check_permanent_cycle("eta*kbar*D", specs).permanent


def test_lemma54_rejects_bad_input(pres, specs):
    d3 = spec_for(specs, 3)
    with pytest.raises(ValueError):
        verify_lemma54(0, TruncatedSeries.constant(1, 4, 4), d3)
    with pytest.raises(ValueError):
        verify_lemma54(1, TruncatedSeries([2, 1], 4, 4), d3)
    with pytest.raises(DifferentialError):
        verify_lemma54(1, TruncatedSeries.constant(1, 4, 4), spec_for(specs, 5))


def test_parallel_turn_matches_serial(pres, specs):
    w = SSWindow(stems=(20, 30), smax=8, M=2)
    a = run_pages(pres, specs, w, jobs=1)[-1]
    b = run_pages(pres, specs, w, jobs=4)[-1]
    for key, sl in a.slices.items():
        assert sl.dimension() == b.slices[key].dimension()
