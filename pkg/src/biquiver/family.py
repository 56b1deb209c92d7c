"""Brick existence and one-parameter brick families over BT boxes.

The driver peels the box down one reduction at a time, transporting the
dimension vector alongside, until a single polynomial loop is left (a
family exists) or an obstruction fires (no bricks at this dimension).
The family itself is the one-dimensional representation t of the final
loop, pulled back through the recorded chain; its entries are univariate
polynomials in the parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Mapping, Optional, Tuple

from .box import (Box, BoxError, CycleWitness, find_triangulation, norm,
                  solid_components)
from .fields import PolyRing, RationalField
from .reduction import (ReductionStep, _bt_or_raise, delete_vertex_step,
                        eliminate_pair, pullback_chain, self_reproduce)
from .rep import Representation, evaluate_parametric, validate_representation

EMPTY = "empty"
FAMILY = "family"


class UnsupportedConfiguration(BoxError):
    """Raised for box/dimension shapes the recursion declines to decide."""


@dataclass
class FamilyResult:
    status: str                       # EMPTY or FAMILY
    box: Box
    dims: Dict[str, int]
    chain: List[ReductionStep] = dc_field(default_factory=list)
    trace: List[Tuple[str, Dict[str, int], int]] = dc_field(default_factory=list)
    family: Optional[Representation] = None
    reason: Optional[str] = None

    def __bool__(self):
        return self.status == FAMILY


def _checked_dims(box: Box, d: Mapping[str, int]) -> Dict[str, int]:
    dims = {v: int(d.get(v, 0)) for v in box.vertices}
    extra = set(d) - set(box.vertices)
    if extra:
        raise BoxError(f"dimensions for unknown vertices: {sorted(extra)}")
    if any(n < 0 for n in dims.values()):
        raise BoxError("negative dimension")
    return dims


def _unused_dotted(box: Box) -> List[str]:
    """Dotted arrows that occur in no solid differential."""
    used = set()
    for aid in box.solid_ids():
        for p, _ in box.diff[aid].terms:
            used.update(x.id for x in p.arrows)
    return [v for v in box.dotted_ids() if v not in used]


def _reduce(box: Box, dims: Dict[str, int], chain: List[ReductionStep],
            trace: List[Tuple[str, Dict[str, int], int]]):
    """One recursion level; returns (EMPTY, reason) or (base_box, loop_id)."""
    if all(n == 0 for n in dims.values()):
        return EMPTY, "zero dimension vector"

    for v in sorted(v for v, n in dims.items() if n == 0):
        box, step = delete_vertex_step(box, v)
        chain.append(step)
        dims = {w: n for w, n in dims.items() if w != v}

    bt = _bt_or_raise(box)
    trace.append((box.name, dict(dims), norm(box, dims)))

    # a dotted arrow no solid differential sees makes End too big at any
    # dimension vector supported on both its endpoints
    free = _unused_dotted(box)
    if free:
        return EMPTY, f"dotted arrow {free[0]} occurs in no differential"

    comps = solid_components(box)
    if len(comps) > 1:
        comp_of = {v: i for i, c in enumerate(comps) for v in c}
        crossing = [a.id for a in box.arrows.values() if a.kind == "dotted"
                    and comp_of[a.source] != comp_of[a.target]]
        if crossing:
            # such an arrow survived the sweep, so it couples the
            # components through some differential; out of scope
            raise UnsupportedConfiguration(
                f"support spans solid components coupled by {sorted(crossing)}")
        return EMPTY, "support splits across solid components"

    if len(box.vertices) == 1 and len(box.arrows) == 1:
        aid = next(iter(box.arrows))
        if box.arrow(aid).kind == "solid" and box.diff[aid].is_zero():
            d = dims[box.vertices[0]]
            if d == 1:
                return box, aid
            return EMPTY, f"Jordan block of size {d} has endomorphisms"

    distinguished = set(bt.loops.values())
    for aid in box.solid_ids():
        a = box.arrow(aid)
        if (a.source == a.target and aid not in distinguished
                and box.diff[aid].is_zero()):
            return EMPTY, f"solid loop {aid} with zero differential"

    tri = find_triangulation(box, "solid")
    if isinstance(tri, CycleWitness):
        raise BoxError(f"box {box.name} has no solid triangulation: {tri}")
    paired = bt.paired_solids()
    if not paired:
        raise BoxError(f"box {box.name} has no reducible arrow left")
    b = min(paired,
            key=lambda aid: (tri.h(aid), 1 if box.diff[aid].is_zero() else 0,
                             aid))

    before = norm(box, dims)
    if not box.diff[b].is_zero():
        new_box, steps = eliminate_pair(box, b)
        new_dims = dims
    else:
        a = box.arrow(b)
        new_box, steps = self_reproduce(box, b)
        n0 = steps[0].new_vertex
        m = min(dims[a.target], dims[a.source])
        new_dims = dict(dims)
        new_dims[a.target] -= m
        new_dims[a.source] -= m
        new_dims[n0] = m
    if norm(new_box, new_dims) >= before:
        raise BoxError(f"norm did not drop reducing {b} in {box.name}")
    chain.extend(steps)
    return _reduce(new_box, new_dims, chain, trace)


def brick_family(box: Box, d: Mapping[str, int], field=None) -> FamilyResult:
    """Decide brick existence at dimension vector d and, when bricks exist,
    return the one-parameter family containing all of them.

    The family is a representation over field[t]; evaluate_family
    specializes the parameter. field defaults to the rationals.
    """
    field = RationalField() if field is None else field
    dims = _checked_dims(box, d)
    _bt_or_raise(box)

    chain: List[ReductionStep] = []
    trace: List[Tuple[str, Dict[str, int], int]] = []
    out = _reduce(box, dict(dims), chain, trace)
    if out[0] == EMPTY:
        return FamilyResult(EMPTY, box, dims, chain, trace, reason=out[1])

    base_box, loop = out
    ring = PolyRing(field)
    base = Representation(ring, {base_box.vertices[0]: 1},
                          {loop: ((ring.variable(),),)})
    fam = pullback_chain(chain, base)
    if fam.dims != dims:
        raise BoxError(f"transported dimensions {fam.dims} != {dims}")
    validate_representation(box, fam)
    return FamilyResult(FAMILY, box, dims, chain, trace, family=fam)


def brick_exists(box: Box, d: Mapping[str, int]) -> bool:
    return brick_family(box, d).status == FAMILY


def evaluate_family(result, value) -> Representation:
    """A member of the family at a parameter value."""
    rep = result.family if isinstance(result, FamilyResult) else result
    if rep is None:
        raise BoxError("no family to evaluate")
    return evaluate_parametric(rep, value)
