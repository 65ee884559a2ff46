import json

import pytest

from tmfdual.resolution import (FixedPointLookup, HomotopyTable, TableError, TowerSpec, check_collapse,
                                duality_ledger, load_tables, restrict_shift, tower_e1,
                                validate_registry)


@pytest.fixture(scope="module")
def tables():
    return load_tables()


@pytest.fixture(scope="module")
def registry():
    return validate_registry(8)


def test_tower_spec_validation():
    TowerSpec.default()
    from tmfdual.resolution import Fiber
    with pytest.raises(TableError):
        TowerSpec((Fiber(0, 0, "G24"), Fiber(2, -2, "C6")))


def test_e1_degrees_follow_the_convention():
    spec = TowerSpec.default()
    for stem in range(192):
        for e in tower_e1(spec, stem):
            assert e.t == stem + e.s
            for r, s2, t2 in e.targets:
                assert (s2 - e.s, t2 - e.t) == (r, r - 1)


def test_e1_at_45():
    entries = tower_e1(TowerSpec.default(), 45)
    assert entries[0].group == "pi_45 F(E^hG24, E^hG24)"
    assert [(s, t) for _, s, t in entries[0].targets] == [(1, 45), (2, 46), (3, 47)]
    assert entries[3].group == "pi_45 F(E^hG24, S^45 E^hG24)"
    assert entries[3].degree == 0


def test_collapse_at_45(tables):
    v = check_collapse(TowerSpec.default(), tables, (0, 45))
    assert v.verdict == "collapses"
    assert [c["lookup"] for c in v.certificate] == [
        "pi_45 F(E^hG24, E^hC6)", "pi_46 F(E^hG24, E^hC6)", "pi_-1 F(E^hG24, E^hG24)"]


def test_collapse_is_periodic(tables):
    spec = TowerSpec.default()
    for n in range(-2, 3):
        assert check_collapse(spec, tables, (0, 45 + 192 * n)).verdict == "collapses"


def test_unknown_blocks_the_verdict(tables):
    v = check_collapse(TowerSpec.default(), tables, (0, 44))
    assert v.verdict == "inconclusive"


def test_missing_table(tables):
    partial = {k: v for k, v in tables.items() if k != "C6"}
    with pytest.raises(TableError, match="C6"):
        check_collapse(TowerSpec.default(), partial, (0, 45))


def test_adding_entries_never_breaks_a_collapse(tables):
    spec = TowerSpec.default()
    bigger = {k: HomotopyTable(t.name, t.periodicity, dict(t.entries), dict(t.provenance))
              for k, t in tables.items()}
    bigger["C2"].entries[10] = "zero"
    bigger["G24"].entries[3] = "Z/24"
    assert check_collapse(spec, bigger, (0, 45)).verdict == "collapses"


def test_q8_derived_from_g24(tables):
    fp = FixedPointLookup(tables)
    v, prov = fp.lookup("Q8", -1)
    assert v == "zero"
    assert "-65" in prov and "-129" in prov


def test_table_degrees_reduced():
    t = HomotopyTable.from_dict({"name": "X", "periodicity": 192,
                                 "entries": [{"degree": -1, "value": "zero", "provenance": "p"}]})
    assert t.lookup(191) == ("zero", "p")
    assert t.lookup(0)[0] == "unknown"


def test_table_conflict_and_json_errors(tmp_path):
    with pytest.raises(TableError):
        HomotopyTable.from_dict({"name": "X", "periodicity": 4, "entries": [
            {"degree": 1, "value": "zero"}, {"degree": 5, "value": "Z/2"}]})
    p = tmp_path / "t.json"
    p.write_text("{ nope")
    with pytest.raises(TableError, match="line 1"):
        HomotopyTable.from_file(p)


def test_tables_round_trip(tables):
    for t in tables.values():
        again = HomotopyTable.from_dict(json.loads(json.dumps(t.to_dict())))
        assert again.entries == t.entries


def test_every_zero_has_provenance(tables):
    for t in tables.values():
        for d, v in t.entries.items():
            if v == "zero":
                assert t.provenance[d]


def test_ledger():
    led = duality_ledger(2)
    assert led.total == 44
    assert led.partial_sums() == [-3, 45, 44]
    assert led.prerequisites["collapse_0_45"] == "collapses"
    assert any("G48" in a for a in led.annotations)


def test_ledger_k0():
    assert duality_ledger(0, check=False).total == -4


def test_ledger_order_does_not_matter():
    led = duality_ledger(2, check=False)
    led.steps.reverse()
    assert led.total == 44


@pytest.mark.parametrize("group", ["G48", "G24", "C6", "Q8", "C2", "trivial"])
def test_restrict(group, registry):
    assert restrict_shift(group, registry=registry).shift == 44


def test_restrict_trivial_note(registry):
    res = restrict_shift("trivial", registry=registry)
    assert any("48" in line for line in res.certificate)


def test_restrict_unknown(registry):
    with pytest.raises(TableError):
        restrict_shift("C5", registry=registry)


def test_registry_checked_by_closure(registry):
    assert all(registry.values())
