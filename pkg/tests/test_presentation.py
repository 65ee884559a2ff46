import json
import random
from importlib import resources

import pytest

from tmfdual.expr import ExpressionError, parse_expr
from tmfdual.presentation import (AlgebraPresentation, BidegreeError, GeneratorSpec,
                                  PresentationError, Window, normal_form)


def bundled():
    return json.loads((resources.files("tmfdual") / "data" / "g24.json").read_text(encoding="utf-8"))


def test_inferred_bidegrees(pres):
    got = {g.name: g.bidegree for g in pres.generators}
    assert got["mu"] == (1, 6)
    assert got["eps"] == (2, 10)
    assert got["kappa"] == (2, 16)


def test_inference_needs_enough_relations():
    data = bundled()
    # every rule mentioning kappa removed: its bidegree is no longer pinned down
    data["relations"] = [r for r in data["relations"] if "kappa" not in r["rule"]]
    with pytest.raises(BidegreeError, match="kappa"):
        AlgebraPresentation.from_dict(data)


def test_inference_detects_inconsistency():
    data = bundled()
    data["relations"].append({"rule": "mu*eta -> nu"})
    with pytest.raises(BidegreeError):
        AlgebraPresentation.from_dict(data)


def test_critical_pairs_resolve(pres):
    assert pres.critical_pairs() == []


def test_eta_nu_and_torsion(pres):
    assert pres.parse("eta*nu").is_zero()
    assert pres.parse("2*eta").is_zero()
    assert not pres.parse("2*nu").is_zero()
    assert pres.parse("4*nu").is_zero()
    assert pres.parse("2*nu^2").is_zero()


def test_named_relations(pres):
    assert pres.parse("c4^3") == pres.parse("j*D")
    assert pres.parse("eta*eps") == pres.parse("nu^3")
    assert pres.parse("nu^2*kappa") == pres.parse("4*kbar")
    assert pres.parse("c6^2") == pres.parse("j*D - 1728*D")


def test_j_kbar_normal_form(pres):
    # the rule is oriented so that c4^2*eta^4 is the normal representative
    assert pres.parse("j*kbar").to_string() == "eta^4*c4^2"
    assert pres.parse("c4^2*eta^4") == pres.parse("j*kbar")


def test_invertible_generator(pres):
    assert pres.parse("D*D^-1") == pres.one()
    assert pres.parse("D^-1").bidegree == (0, -24)
    with pytest.raises(PresentationError):
        pres.parse("eta") ** -1


def test_graded_commutativity(pres):
    nu, mu = pres.gen("nu"), pres.gen("mu")
    eta = pres.gen("eta")
    assert eta * mu == -(mu * eta)
    assert nu * nu == nu * nu
    # eta has order 2 so the sign is invisible; nu has order 4 and nu*nu is symmetric
    kbar = pres.gen("kbar")
    assert nu * kbar == kbar * nu


def random_monomial(pres, rng):
    m = [rng.randrange(4) for _ in range(pres.n)]
    m[pres.index["D"]] = rng.randrange(-2, 3)
    m[pres.index["j"]] = rng.randrange(3)
    m[pres.index["kbar"]] = rng.randrange(3)
    return tuple(m)


def test_confluence_on_random_monomials(pres):
    rng = random.Random(2024)
    for _ in range(1000):
        m = random_monomial(pres, rng)
        c = (rng.randrange(1, 16), rng.randrange(16))
        a = pres.normal_form_terms({m: c})
        b = pres.normal_form_randomized({m: c}, rng)
        assert a == b, pres.format_monomial(m)


def test_normal_form_idempotent(pres):
    rng = random.Random(7)
    for _ in range(200):
        x = pres.element({random_monomial(pres, rng): (1, 0)})
        assert normal_form(x) == x
        assert all(pres.is_normal(m) for m in x.terms)


def test_basis_is_normal_and_homogeneous(pres):
    w = Window(jmax=3, smax=6)
    for s in range(4):
        for stem in range(0, 30):
            for b in pres.basis(s, stem + s, w):
                assert pres.is_normal(b.monomial)
                assert pres.bidegree(b.monomial) == (s, stem + s)


def test_parse_errors_have_positions(pres):
    with pytest.raises(ExpressionError) as exc:
        pres.parse("eta * * nu")
    assert exc.value.column == 7
    with pytest.raises(ExpressionError):
        pres.parse("zeta")


def test_bad_relation_reports_line():
    data = bundled()
    data["relations"][3] = {"rule": "eta*eps -> (nu^3"}
    with pytest.raises(ExpressionError, match="line 4"):
        AlgebraPresentation.from_dict(data)


def test_unicode_aliases(pres):
    assert pres.parse("κ̄*η") == pres.parse("kbar*eta")
    assert pres.parse("Δ") == pres.gen("D")


def test_inhomogeneous_rule_rejected():
    gens = [GeneratorSpec("x", 0, 2, None, False), GeneratorSpec("y", 0, 4, None, True),
            GeneratorSpec("j", 0, 0, None, False)]
    with pytest.raises(BidegreeError):
        AlgebraPresentation(gens, ["x^3 -> y"])


def test_expr_polynomial():
    assert parse_expr("(a+b)^2", {"a", "b"}) == {(("a", 2),): 1, (("a", 1), ("b", 1)): 2, (("b", 2),): 1}
