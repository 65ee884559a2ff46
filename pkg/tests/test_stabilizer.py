import random

import pytest

from tmfdual.stabilizer import (StabilizerElement, StabilizerError, find_order4, find_q8_generators,
                                named_subgroup, norm, normalizes, reduced_norm_class,
                                standard_generators, subgroup_closure)

N = 8


@pytest.fixture(scope="module")
def gens():
    return standard_generators(N)


def test_norm_values():
    assert str(norm(StabilizerElement.omega(N))) == "1"
    assert str(norm(StabilizerElement.S(N))) == "-2"
    assert str(norm(StabilizerElement.phi(N))) == "1 . phi"


def test_norm_is_multiplicative():
    rng = random.Random(11)
    for _ in range(1000):
        x = StabilizerElement.random(N, rng, galois=True)
        y = StabilizerElement.random(N, rng, galois=True)
        assert norm(x * y) == norm(x) * norm(y)


def test_group_laws():
    rng = random.Random(5)
    one = StabilizerElement.one(N)
    for _ in range(200):
        x, y, z = (StabilizerElement.random(N, rng, galois=True) for _ in range(3))
        assert (x * y) * z == x * (y * z)
        assert x * x.inverse() == one
        assert x.inverse() * x == one


def test_s_squared_is_two():
    S = StabilizerElement.S(N)
    assert S * S == StabilizerElement.make(2, 0, 0, N)
    w = StabilizerElement.omega(N)
    # S w = phi(w) S
    assert S * w == StabilizerElement.make((0, 1), 0, 0, N).twist() * S


def test_find_order4():
    sols = find_order4(N)
    assert len(sols) >= 2
    minus = StabilizerElement.make(-1, 0, 0, N)
    assert all(x * x == minus for x in sols)


def test_find_order4_needs_precision():
    with pytest.raises(StabilizerError):
        find_order4(1)


def test_q8_pair():
    i, j = find_q8_generators(N)
    assert i * j == -(j * i)
    assert (i * j) * (i * j) == StabilizerElement.make(-1, 0, 0, N)


@pytest.mark.parametrize("gen_names,order", [(["w"], 3), (["i", "j"], 8), (["i", "j", "w"], 24),
                                             (["-1"], 2), (["i"], 4), (["-1", "w"], 6)])
def test_closure_orders(gens, gen_names, order):
    res = subgroup_closure([gens[g] for g in gen_names])
    assert res.stabilized and res.order == order


def test_closure_text(gens):
    assert str(subgroup_closure([gens["i"], gens["j"], gens["w"]])) == "order 24, stabilized"


def test_closure_bound():
    S1 = StabilizerElement.make(1, 1, 0, N)
    res = subgroup_closure([S1], bound=20)
    assert not res.stabilized


def test_closure_rejects_non_units():
    with pytest.raises(StabilizerError):
        subgroup_closure([StabilizerElement.S(N)])


def test_g48(gens):
    g48 = named_subgroup("G48", N, gens)
    g24 = named_subgroup("G24", N, gens)
    assert g48.order == 48
    assert gens["g"].galois == 1
    assert normalizes(gens["g"], g24)
    assert all(g48.contains(x) for x in g24.elements)


def test_finite_subgroups_have_trivial_reduced_norm(gens):
    for x in named_subgroup("G24", N, gens).elements:
        assert reduced_norm_class(x).trivial


def test_reduced_norm_of_three():
    c = reduced_norm_class(StabilizerElement.make(3, 0, 0, N))
    assert not c.trivial
    assert str(c) == "5^6 (digits 011000)"


def test_unknown_subgroup():
    with pytest.raises(StabilizerError):
        named_subgroup("C5", N)
