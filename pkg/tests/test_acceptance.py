"""Acceptance gate: nine end-to-end checks, one pass/fail line each.

Run as `pytest tests/test_acceptance.py -s` to see the summary lines.
Each check is independent and finishes well under a minute.
"""

import functools
import json
import pathlib
import random

from biquiver.box import (BTStructure, NEITHER, Triangulation,
                          boxes_equivalent, classify_quiver, delete_vertex,
                          element, find_triangulation, norm, omit_free_dotted,
                          recognize_bt, validate_box)
from biquiver.dsl import box_from_json, box_to_json, parse_box, print_box
from biquiver.family import brick_family, evaluate_family
from biquiver.fields import PrimeField
from biquiver.reduction import (MinimalEdgeStep, RegularizationStep,
                                eliminate_pair, pullback_chain,
                                reduce_minimal_edge, regularize_all,
                                self_reproduce)
from biquiver.rep import (Representation, are_isomorphic, compose_morphisms,
                          enumerate_bricks, hom_space, is_brick, is_morphism,
                          validate_representation)
from biquiver.algebra import build_coadjoint_box, load_algebra

from corpus import (chain_stage1_golden, chain_stage2_golden,
                    commutator_loop_box, pair_box, split_edge_golden,
                    three_loop_box, three_loop_full_box, two_loop_box)

DATA = pathlib.Path(__file__).parent / "data"


def criterion(n, label):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"\ncriterion {n}: FAIL  {label}")
                raise
            print(f"\ncriterion {n}: PASS  {label}")
        return wrapper
    return deco


def _random_rep(box, field, dims, rng):
    mats = {}
    for aid in box.solid_ids():
        a = box.arrow(aid)
        mats[aid] = tuple(
            tuple(field.random_element(rng) for _ in range(dims[a.source]))
            for _ in range(dims[a.target]))
    return Representation(field, dict(dims), mats)


@criterion(1, "golden boxes validate with the expected structures")
def test_criterion_1():
    box = two_loop_box()
    assert validate_box(box).ok
    tri = find_triangulation(box, "solid")
    assert isinstance(tri, Triangulation)
    assert tri.heights == {"b": 0, "a1": 1, "a2": 1}
    bt = recognize_bt(box)
    assert isinstance(bt, BTStructure)
    assert bt.loops == {"1": "a1", "2": "a2"}
    assert bt.pairing == {"b": "v"}

    for make in (three_loop_full_box, three_loop_box):
        box = make()
        assert validate_box(box).ok
        assert isinstance(find_triangulation(box, "solid"), Triangulation)
        bt = recognize_bt(box)
        assert isinstance(bt, BTStructure)
        assert bt.loops == {"1": "a1", "0": "a0", "2": "a2"}
        assert bt.pairing == {"b1": "eta", "b2": "xi"}


@criterion(2, "minimal edge splitting and self-reproduction")
def test_criterion_2():
    box = two_loop_box()
    split, _ = reduce_minimal_edge(box, "b")
    # the split must match the golden box exactly, with no cross terms
    assert split == split_edge_golden()

    full, steps = self_reproduce(box, "b")
    assert [type(s) for s in steps][0] is MinimalEdgeStep
    match = boxes_equivalent(full, three_loop_full_box())
    assert match is not None
    # the surviving dotted arrow maps onto v and is free
    assert match["arrows"]["v_21"] == "v"
    assert "v_21" in full.arrows
    assert "v_21" not in omit_free_dotted(full).arrows


@criterion(3, "two-stage chain ends in a wild factored quiver")
def test_criterion_3():
    g1 = chain_stage1_golden()
    assert g1.diff["b2"] == element(g1, [(-1, ["tb0", "b3"])])
    assert g1.diff["b0"] == element(g1, [(1, ["b3", "tb2"])])
    g2 = chain_stage2_golden()
    assert g2.diff["b1"] == element(g2, [(1, ["b5", "tb3"])])
    coeffs = {p.word(): c for p, c in g2.diff["b3"].terms}
    assert coeffs[("tb1", "b5")] == -1

    s1, _ = self_reproduce(three_loop_box(), "b1")
    s1 = omit_free_dotted(s1)
    lookup = boxes_equivalent(chain_stage1_golden(), s1)
    assert lookup is not None

    s2, _ = self_reproduce(s1, lookup["arrows"]["b3"])
    s2, _ = regularize_all(s2)
    s2 = omit_free_dotted(s2)
    assert boxes_equivalent(s2, g2) is not None

    bt = recognize_bt(g2)
    assert isinstance(bt, BTStructure)
    edges = [(g2.arrow(x).source, g2.arrow(x).target)
             for x in bt.paired_solids() if x != "b5"]
    assert classify_quiver(g2.vertices, edges) == NEITHER


@criterion(4, "pullback preserves hom dimensions exactly")
def test_criterion_4():
    box = two_loop_box()
    configs = []
    out, step = reduce_minimal_edge(box, "b")
    configs.append((box, out, [step]))
    out, steps = self_reproduce(box, "b")
    configs.append((box, out, steps))
    pb = pair_box()
    out, steps = eliminate_pair(pb, "b")
    configs.append((pb, out, steps))
    tl = three_loop_box()
    out, steps = self_reproduce(tl, "b1")
    configs.append((tl, out, steps))

    rng = random.Random(20260822)
    checked = 0
    for p in (2, 3):
        field = PrimeField(p)
        for source, reduced, steps in configs:
            for _ in range(26):
                while True:
                    dims = {v: rng.randrange(0, 3) for v in reduced.vertices}
                    if 0 < sum(dims.values()) <= 6:
                        break
                n1 = _random_rep(reduced, field, dims, rng)
                n2 = _random_rep(reduced, field, dims, rng)
                m1 = pullback_chain(steps, n1)
                m2 = pullback_chain(steps, n2)
                validate_representation(source, m1)
                validate_representation(source, m2)
                assert len(hom_space(source, m1, m2)) == \
                    len(hom_space(reduced, n1, n2))
                checked += 1
    assert checked >= 200


@criterion(5, "reductions strictly decrease the norm")
def test_criterion_5():
    units = []
    for source, edge in [(two_loop_box(), "b"), (three_loop_box(), "b1")]:
        _, steps = self_reproduce(source, edge)
        units.append(steps)
    _, steps = eliminate_pair(pair_box(), "b")
    units.append(steps)
    split, _ = reduce_minimal_edge(two_loop_box(), "b")
    _, regs = regularize_all(split)
    units.append(regs)

    rng = random.Random(5)
    checked = 0
    for steps in units:
        dropping = [s for s in steps
                    if isinstance(s, (MinimalEdgeStep, RegularizationStep))]
        assert dropping
        for step in dropping:
            source, target = step.source_box, step.target_box
            for _ in range(10):
                dims = {v: rng.randrange(1, 3) for v in target.vertices}
                back = step.pullback(_random_rep(target, PrimeField(2),
                                                 dims, rng))
                assert norm(target, dims) < norm(source, back.dims)
                checked += 1
    assert checked >= 80

    # the family recursion records its norm trace; it must fall strictly
    for box, dims in [(two_loop_box(), {"1": 2, "2": 1}),
                      (three_loop_box(), {"1": 1, "0": 1, "2": 1})]:
        res = brick_family(box, dims, PrimeField(3))
        norms = [n for _, _, n in res.trace]
        assert all(a > b for a, b in zip(norms, norms[1:]))


@criterion(6, "family evaluations match brute-force brick classes")
def test_criterion_6():
    box = two_loop_box()
    d = {"1": 1, "2": 1}
    for p in (2, 3):
        field = PrimeField(p)
        res = brick_family(box, d, field)
        assert res
        evals = [evaluate_family(res, x) for x in field.elements()]
        for i, rep in enumerate(evals):
            assert is_brick(box, rep)
            for other in evals[:i]:
                assert not are_isomorphic(box, rep, other)
        classes = enumerate_bricks(box, d, field)
        assert len(classes) == p
        for cls in classes:
            assert any(are_isomorphic(box, cls, rep) for rep in evals)

    # 2^7 = 128 raw representations behind this enumeration
    field = PrimeField(2)
    d = {"1": 2, "2": 1}
    res = brick_family(box, d, field)
    assert res
    evals = [evaluate_family(res, x) for x in field.elements()]
    for cls in enumerate_bricks(box, d, field):
        assert any(are_isomorphic(box, cls, rep) for rep in evals)


@criterion(7, "obstructed dimension vectors come back empty")
def test_criterion_7():
    res = brick_family(commutator_loop_box(), {"1": 1})
    assert not res and res.family is None
    res = brick_family(pair_box(), {"1": 1, "2": 1})
    assert not res and res.family is None
    for p in (2, 3):
        field = PrimeField(p)
        assert enumerate_bricks(commutator_loop_box(), {"1": 1}, field) == []
        assert enumerate_bricks(pair_box(), {"1": 1, "2": 1}, field) == []


@criterion(8, "coadjoint boxes are valid and match the known shapes")
def test_criterion_8():
    expected = {"k.json": None, "kxk.json": None,
                "dual.json": commutator_loop_box(),
                "a2.json": two_loop_box()}
    for fname, target in expected.items():
        table = load_algebra(str(DATA / fname))
        box = build_coadjoint_box(table)
        assert validate_box(box).ok, fname
        assert isinstance(recognize_bt(box), BTStructure), fname
        if target is not None:
            assert boxes_equivalent(box, target) is not None, fname


@criterion(9, "structural invariants hold across the corpus")
def test_criterion_9():
    # square-zero closure after every kind of transformation
    transformed = [
        reduce_minimal_edge(two_loop_box(), "b")[0],
        self_reproduce(two_loop_box(), "b")[0],
        regularize_all(reduce_minimal_edge(two_loop_box(), "b")[0])[0],
        eliminate_pair(pair_box(), "b")[0],
        delete_vertex(three_loop_full_box(), "0"),
        omit_free_dotted(self_reproduce(three_loop_box(), "b1")[0]),
    ]
    for fname in ("k.json", "kxk.json", "dual.json", "a2.json",
                  "eps3.json", "tri3.json"):
        transformed.append(build_coadjoint_box(load_algebra(str(DATA / fname))))
    for box in transformed:
        assert validate_box(box).ok, box.name

    # hom solutions really are morphisms, and composition is associative
    rng = random.Random(9)
    for box in (two_loop_box(), pair_box()):
        field = PrimeField(3)
        dims = {v: 2 for v in box.vertices}
        m = _random_rep(box, field, dims, rng)
        n = _random_rep(box, field, dims, rng)
        for sol in hom_space(box, m, n):
            assert is_morphism(box, m, n, sol)
        ends = hom_space(box, m, m)
        for f in ends:
            for g in ends:
                for h in ends:
                    left = compose_morphisms(
                        box, m, m, m, compose_morphisms(box, m, m, m, f, g), h)
                    right = compose_morphisms(
                        box, m, m, m, f, compose_morphisms(box, m, m, m, g, h))
                    assert left == right

    # text and JSON round-trips are bit-exact
    fixtures = [two_loop_box(), three_loop_box(), three_loop_full_box(),
                commutator_loop_box(), pair_box(), split_edge_golden(),
                chain_stage1_golden(), chain_stage2_golden()] + transformed
    for box in fixtures:
        assert parse_box(print_box(box)) == box
        assert box_from_json(json.loads(json.dumps(box_to_json(box)))) == box
