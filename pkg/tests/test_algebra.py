import os
from fractions import Fraction

import pytest

from biquiver.algebra import (AlgebraTable, build_coadjoint_box, dual_name,
                              load_algebra, multiply, validate_algebra)
from biquiver.box import BoxError, BTStructure, boxes_equivalent, recognize_bt
from biquiver.family import FAMILY, brick_family, evaluate_family
from biquiver.fields import PrimeField
from biquiver.freecat import GradedElement
from biquiver.rep import enumerate_bricks, is_brick

from corpus import commutator_loop_box, polynomial_box, two_loop_box

DATA = os.path.join(os.path.dirname(__file__), "data")


def fixture(name):
    return load_algebra(os.path.join(DATA, name + ".json"))


def table(**kw):
    kw.setdefault("name", "test")
    kw.setdefault("placement", {})
    kw.setdefault("gamma", [])
    t = AlgebraTable.from_json(kw)
    return t


# ---------------------------------------------------------------------------
# table loading and validation

def test_fixture_tables_are_valid():
    for name in ("k", "kxk", "dual", "a2", "eps3", "tri3"):
        report = validate_algebra(fixture(name))
        assert report.ok, f"{name}: {report}"


def test_json_round_trip():
    t = fixture("eps3")
    again = AlgebraTable.from_json(t.to_json())
    assert again.basis == t.basis
    assert again.placement == t.placement
    assert again.gamma == t.gamma


def test_from_json_rejects_garbage():
    with pytest.raises(ValueError):
        AlgebraTable.from_json({"basis": ["e"]})
    with pytest.raises(ValueError):
        table(basis=["e"], idempotents=["e"], typo=1)
    with pytest.raises(ValueError):
        table(basis=["e", "a"], idempotents=["e"],
              placement={"a": ["e", "e"]}, gamma=[["a", "a", "a", 0.5]])


def test_multiply_follows_placement():
    t = fixture("a2")
    assert multiply(t, "e1", "e1") == {"e1": Fraction(1)}
    assert multiply(t, "e1", "e2") == {}
    # al = e2 al e1 absorbs e2 on the left, e1 on the right
    assert multiply(t, "e2", "al") == {"al": Fraction(1)}
    assert multiply(t, "al", "e1") == {"al": Fraction(1)}
    assert multiply(t, "e1", "al") == {}
    assert multiply(t, "al", "al") == {}


def test_multiply_gamma():
    t = fixture("eps3")
    assert multiply(t, "eps", "eps") == {"eps2": Fraction(1)}
    assert multiply(t, "eps", "eps2") == {}


def test_associativity_violation():
    t = table(basis=["e", "a", "b", "c"], idempotents=["e"],
              placement={"a": ["e", "e"], "b": ["e", "e"], "c": ["e", "e"]},
              gamma=[["a", "a", "b", 1], ["a", "b", "c", 1]])
    report = validate_algebra(t)
    assert not report.ok
    assert any("associativity" in v for v in report.violations)


def test_nilpotency_violation():
    t = table(basis=["e", "a"], idempotents=["e"],
              placement={"a": ["e", "e"]}, gamma=[["a", "a", "a", 1]])
    report = validate_algebra(t)
    assert any("nilpotent" in v for v in report.violations)


def test_placement_chain_violation():
    t = table(basis=["e1", "e2", "x", "y", "z"], idempotents=["e1", "e2"],
              placement={"x": ["e1", "e2"], "y": ["e1", "e2"],
                         "z": ["e1", "e2"]},
              gamma=[["x", "y", "z", 1]])
    report = validate_algebra(t)
    assert any("chain" in v for v in report.violations)


def test_misplaced_product_violation():
    t = table(basis=["e1", "e2", "x", "y", "z"], idempotents=["e1", "e2"],
              placement={"x": ["e1", "e2"], "y": ["e2", "e1"],
                         "z": ["e2", "e2"]},
              gamma=[["x", "y", "z", 1]])
    report = validate_algebra(t)
    assert any("sits at" in v for v in report.violations)


def test_duplicate_and_idempotent_gamma_violations():
    t = table(basis=["e", "a", "b"], idempotents=["e"],
              placement={"a": ["e", "e"], "b": ["e", "e"]},
              gamma=[["a", "a", "b", 1], ["a", "a", "b", 2]])
    assert any("duplicate" in v for v in validate_algebra(t).violations)
    t = table(basis=["e", "a"], idempotents=["e"],
              placement={"a": ["e", "e"]}, gamma=[["e", "a", "a", 1]])
    assert any("idempotent" in v for v in validate_algebra(t).violations)


# ---------------------------------------------------------------------------
# box construction

def test_base_field_algebra_gives_polynomial_loop():
    box = build_coadjoint_box(fixture("k"))
    assert boxes_equivalent(box, polynomial_box()) is not None


def test_product_field_gives_disjoint_loops():
    box = build_coadjoint_box(fixture("kxk"))
    assert sorted(box.vertices) == ["e1", "e2"]
    assert box.solid_ids() == ["e1", "e2"]
    assert box.dotted_ids() == []
    assert all(box.diff[a].is_zero() for a in box.arrows)


def test_dual_numbers_give_commutator_box():
    box = build_coadjoint_box(fixture("dual"))
    match = boxes_equivalent(box, commutator_loop_box())
    assert match is not None
    assert match["arrows"]["e"] == "a"
    assert match["arrows"]["eps"] == "b"


def test_a2_gives_two_loop_box():
    box = build_coadjoint_box(fixture("a2"))
    match = boxes_equivalent(box, two_loop_box())
    assert match is not None
    assert match["arrows"]["al"] == "b"
    assert match["vertices"] == {"e1": "2", "e2": "1"}


def test_eps3_differentials():
    box = build_coadjoint_box(fixture("eps3"))
    eps = box.arrow("eps")
    eps2 = box.arrow("eps2")
    s1 = box.arrow(dual_name("eps"))
    s2 = box.arrow(dual_name("eps2"))
    one = Fraction(1)
    assert box.diff["eps"] == GradedElement.build(
        "e", "e", [(one, [s1, eps2]), (-one, [eps2, s1])])
    assert box.diff["eps2"].is_zero()
    assert box.diff[dual_name("eps")].is_zero()
    assert box.diff[dual_name("eps2")] == GradedElement.build(
        "e", "e", [(one, [s1, s1])])
    assert box.diff["e"] == GradedElement.build(
        "e", "e", [(one, [eps, s1]), (one, [eps2, s2]),
                   (-one, [s1, eps]), (-one, [s2, eps2])])


def test_tri3_differentials():
    box = build_coadjoint_box(fixture("tri3"))
    u12, u23, u13 = (box.arrow(x) for x in ("u12", "u23", "u13"))
    s12, s23, s13 = (box.arrow(dual_name(x)) for x in ("u12", "u23", "u13"))
    one = Fraction(1)
    assert u12.source == "e2" and u12.target == "e1"
    assert box.diff["u12"] == GradedElement.build(
        "e2", "e1", [(-one, [u13, s23])])
    assert box.diff["u23"] == GradedElement.build(
        "e3", "e2", [(one, [s12, u13])])
    assert box.diff["u13"].is_zero()
    assert box.diff[dual_name("u13")] == GradedElement.build(
        "e1", "e3", [(one, [s23, s12])])


def test_coadjoint_boxes_are_bt():
    for name in ("k", "kxk", "dual", "a2", "eps3", "tri3"):
        t = fixture(name)
        box = build_coadjoint_box(t)
        bt = recognize_bt(box)
        assert isinstance(bt, BTStructure), f"{name}: {bt}"
        assert bt.loops == {e: e for e in t.idempotents}
        assert bt.pairing == {b: dual_name(b) for b in t.radical()}


def test_build_rejects_invalid_table():
    t = table(basis=["e", "a"], idempotents=["e"],
              placement={"a": ["e", "e"]}, gamma=[["a", "a", "a", 1]])
    with pytest.raises(BoxError):
        build_coadjoint_box(t)


# ---------------------------------------------------------------------------
# families over coadjoint boxes

def test_base_field_bricks_are_jordan_cells():
    box = build_coadjoint_box(fixture("k"))
    res = brick_family(box, {"e": 1})
    assert res.status == FAMILY
    assert is_brick(box, evaluate_family(res, Fraction(7)))


def test_a2_family_matches_two_loop():
    box = build_coadjoint_box(fixture("a2"))
    field = PrimeField(2)
    res = brick_family(box, {"e1": 1, "e2": 1}, field)
    assert res.status == FAMILY
    classes = enumerate_bricks(box, {"e1": 1, "e2": 1}, field)
    assert len(classes) == 2
    evals = [evaluate_family(res, x) for x in field.elements()]
    for e in evals:
        assert is_brick(box, e)
