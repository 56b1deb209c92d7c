from fractions import Fraction

import pytest

from biquiver.box import BoxError, norm
from biquiver.family import (EMPTY, FAMILY, FamilyResult, brick_exists,
                             brick_family, evaluate_family)
from biquiver.fields import PolyRing, PrimeField, RationalField
from biquiver.reduction import MinimalEdgeStep, VertexDeletionStep
from biquiver.rep import are_isomorphic, enumerate_bricks, is_brick

from corpus import (commutator_loop_box, pair_box, three_loop_box,
                    three_loop_full_box, two_loop_box)


F2 = PrimeField(2)
F3 = PrimeField(3)
F5 = PrimeField(5)
Q = RationalField()


def crosscheck(box, dims, p):
    """Family evaluations over F_p against the brute-force classes."""
    field = PrimeField(p)
    res = brick_family(box, dims, field)
    classes = enumerate_bricks(box, dims, field)
    if res.status == EMPTY:
        assert classes == []
        return res
    evals = [evaluate_family(res, x) for x in field.elements()]
    for e in evals:
        assert is_brick(box, e)
    for i, e in enumerate(evals):
        for f in evals[i + 1:]:
            assert not are_isomorphic(box, e, f)
    for cls in classes:
        assert any(are_isomorphic(box, cls, e) for e in evals)
    return res


# ---------------------------------------------------------------------------
# the two-loop box

def test_two_loop_dim_one_one_family_matrices():
    res = brick_family(two_loop_box(), {"1": 1, "2": 1})
    assert res.status == FAMILY
    ring = res.family.field
    assert isinstance(ring, PolyRing) and ring.base == Q
    assert res.family.mats["a1"] == ((ring.zero,),)
    assert res.family.mats["a2"] == ((ring.variable(),),)
    assert res.family.mats["b"] == ((ring.one,),)


def test_two_loop_dim_one_one_chain_shape():
    res = brick_family(two_loop_box(), {"1": 1, "2": 1})
    # one minimal edge, three forced regularizations, two deletions
    kinds = [type(s) for s in res.chain]
    assert kinds[0] is MinimalEdgeStep
    assert kinds.count(VertexDeletionStep) == 2
    assert len(res.chain) == 6
    norms = [t[2] for t in res.trace]
    assert norms == sorted(norms, reverse=True)
    assert len(set(norms)) == len(norms)


def test_two_loop_dim_two_one_family_matrices():
    res = brick_family(two_loop_box(), {"1": 2, "2": 1})
    assert res.status == FAMILY
    ring = res.family.field
    z, o, t = ring.zero, ring.one, ring.variable()
    assert res.family.mats["a1"] == ((z, o), (z, z))
    assert res.family.mats["a2"] == ((t,),)
    assert res.family.mats["b"] == ((z,), (o,))


def test_two_loop_dim_one_two_family_exists():
    res = brick_family(two_loop_box(), {"1": 1, "2": 2}, F3)
    assert res.status == FAMILY
    for x in F3.elements():
        assert is_brick(two_loop_box(), evaluate_family(res, x))


def test_rational_evaluations_are_distinct_bricks():
    box = two_loop_box()
    res = brick_family(box, {"1": 1, "2": 1})
    evals = [evaluate_family(res, Fraction(k)) for k in range(5)]
    for e in evals:
        assert is_brick(box, e)
    for i, e in enumerate(evals):
        for f in evals[i + 1:]:
            assert not are_isomorphic(box, e, f)
    again = evaluate_family(res, Fraction(3))
    assert again == evals[3]


def test_crosscheck_two_loop_one_one():
    crosscheck(two_loop_box(), {"1": 1, "2": 1}, 2)
    crosscheck(two_loop_box(), {"1": 1, "2": 1}, 3)


def test_crosscheck_two_loop_two_one():
    crosscheck(two_loop_box(), {"1": 2, "2": 1}, 2)


def test_crosscheck_two_loop_one_two():
    crosscheck(two_loop_box(), {"1": 1, "2": 2}, 2)


# ---------------------------------------------------------------------------
# obstructions

def test_commutator_loop_empty():
    res = brick_family(commutator_loop_box(), {"1": 1})
    assert res.status == EMPTY
    assert "b" in res.reason
    assert enumerate_bricks(commutator_loop_box(), {"1": 1}, F2) == []


def test_pair_box_empty_by_splitting():
    res = brick_family(pair_box(), {"1": 1, "2": 1})
    assert res.status == EMPTY
    assert "components" in res.reason
    # one pair elimination happened before the split showed
    assert len(res.chain) == 2


def test_free_dotted_arrow_empty():
    res = brick_family(three_loop_full_box(), {"1": 1, "0": 1, "2": 1})
    assert res.status == EMPTY
    assert "v" in res.reason
    assert enumerate_bricks(three_loop_full_box(),
                            {"1": 1, "0": 1, "2": 1}, F2) == []


def test_zero_dimension_vector_empty():
    res = brick_family(two_loop_box(), {"1": 0, "2": 0})
    assert res.status == EMPTY
    assert not brick_exists(two_loop_box(), {"1": 0, "2": 0})


def test_jordan_blocks_beyond_one_empty():
    # a single k[t] vertex at dimension d>1 is never a brick
    res = brick_family(two_loop_box(), {"1": 2, "2": 2})
    # reduction first strips to one loop, then the size-2 block remains
    assert res.status == EMPTY
    assert "Jordan" in res.reason
    assert enumerate_bricks(two_loop_box(), {"1": 2, "2": 2}, F2) == []


# ---------------------------------------------------------------------------
# deeper recursion and bookkeeping

def test_three_loop_all_ones():
    box = three_loop_box()
    res = brick_family(box, {"1": 1, "0": 1, "2": 1}, F5)
    assert res.status == FAMILY
    for x in (0, 1, 2):
        assert is_brick(box, evaluate_family(res, x))
    assert not are_isomorphic(box, evaluate_family(res, 0),
                              evaluate_family(res, 1))


def test_brick_exists_projection():
    assert brick_exists(two_loop_box(), {"1": 1, "2": 1})
    assert not brick_exists(commutator_loop_box(), {"1": 1})
    assert not brick_exists(pair_box(), {"1": 1, "2": 1})


def test_family_dims_match_request():
    res = brick_family(two_loop_box(), {"1": 2, "2": 1})
    assert res.family.dims == {"1": 2, "2": 1}
    assert norm(two_loop_box(), res.family.dims) == res.trace[0][2]


def test_dimension_validation():
    with pytest.raises(BoxError):
        brick_family(two_loop_box(), {"1": -1, "2": 1})
    with pytest.raises(BoxError):
        brick_family(two_loop_box(), {"1": 1, "2": 1, "9": 1})


def test_bool_projection():
    assert bool(brick_family(two_loop_box(), {"1": 1, "2": 1}))
    assert not bool(brick_family(pair_box(), {"1": 1, "2": 1}))


def test_evaluate_family_requires_family():
    res = brick_family(pair_box(), {"1": 1, "2": 1})
    assert isinstance(res, FamilyResult)
    with pytest.raises(BoxError):
        evaluate_family(res, 0)
