"""The reduction calculus: regularization, minimal-edge splitting, pair
elimination, and the pullback of representations along each step.

Every operation returns the reduced box together with step records; a step
knows how to transport a representation of its target back to its source,
so chains of steps pull back by folding from the far end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from . import linalg
from .box import (Box, BoxError, BTStructure, GeneratorChange, assert_valid,
                  change_generators, delete_vertex, find_triangulation,
                  recognize_bt)
from .freecat import (ArrowRef, GradedElement, GradedMatrix, Path,
                      identity_path, substitute_matrix)
from .rep import Representation, evaluate_solid_element


# ---------------------------------------------------------------------------
# step records

@dataclass
class GeneratorChangeStep:
    source_box: Box
    target_box: Box
    change: GeneratorChange

    kind = "change"

    def describe(self) -> str:
        return "change generators: " + ", ".join(sorted(self.change.phi))

    def pullback(self, rep: Representation) -> Representation:
        mats = {}
        for aid in self.source_box.solid_ids():
            psi = self.change.inverse.get(aid)
            if psi is None:
                mats[aid] = rep.mats[aid]
            else:
                mats[aid] = evaluate_solid_element(rep, psi)
        return Representation(rep.field, dict(rep.dims), mats)


@dataclass
class RegularizationStep:
    source_box: Box
    target_box: Box
    solid: str
    dotted: str
    change: GeneratorChange

    kind = "regularize"

    def describe(self) -> str:
        return f"regularize {self.solid} (removes dotted {self.dotted})"

    def pullback(self, rep: Representation) -> Representation:
        # the internal normalization only remaps the dotted arrow, so solid
        # matrices transfer unchanged; the deleted arrow represents as zero
        a = self.source_box.arrow(self.solid)
        mats = dict(rep.mats)
        mats[self.solid] = linalg.zeros(
            rep.field, rep.dims[a.target], rep.dims[a.source])
        return Representation(rep.field, dict(rep.dims), mats)


@dataclass(frozen=True)
class SplitTable:
    row_labels: Tuple[str, ...]
    col_labels: Tuple[str, ...]
    ids: Tuple[Tuple[str, ...], ...]


@dataclass
class MinimalEdgeStep:
    source_box: Box
    target_box: Box
    edge: str
    vertex_one: str    # target of the edge
    vertex_two: str    # source of the edge
    new_vertex: str
    splits: Dict[str, SplitTable]
    eta: str
    xi: str

    kind = "minimal-edge"

    def describe(self) -> str:
        return (f"minimal-edge {self.edge}: split {self.vertex_one},"
                f"{self.vertex_two} along new vertex {self.new_vertex}")

    def pullback(self, rep: Representation) -> Representation:
        field = rep.field
        fresh = rep.dims[self.new_vertex]
        dims = {v: rep.dims[v] for v in self.source_box.vertices}
        dims[self.vertex_one] += fresh
        dims[self.vertex_two] += fresh
        mats = {}
        for aid in self.source_box.solid_ids():
            if aid == self.edge:
                d1, d2 = rep.dims[self.vertex_one], rep.dims[self.vertex_two]
                blocks = [[linalg.zeros(field, d1, d2),
                           linalg.zeros(field, d1, fresh)],
                          [linalg.zeros(field, fresh, d2),
                           linalg.identity(field, fresh)]]
                mats[aid] = linalg.block_matrix(
                    field, blocks, (d1, fresh), (d2, fresh))
                continue
            t = self.splits[aid]
            rows = [rep.dims[lbl] for lbl in t.row_labels]
            cols = [rep.dims[lbl] for lbl in t.col_labels]
            blocks = [[rep.mats[t.ids[r][c]] for c in range(len(cols))]
                      for r in range(len(rows))]
            mats[aid] = linalg.block_matrix(field, blocks, rows, cols)
        return Representation(field, dims, mats)


@dataclass
class VertexDeletionStep:
    source_box: Box
    target_box: Box
    vertex: str

    kind = "delete-vertex"

    def describe(self) -> str:
        return f"delete vertex {self.vertex}"

    def pullback(self, rep: Representation) -> Representation:
        dims = {v: rep.dims.get(v, 0) for v in self.source_box.vertices}
        dims[self.vertex] = 0
        mats = {}
        for aid in self.source_box.solid_ids():
            a = self.source_box.arrow(aid)
            if aid in rep.mats:
                mats[aid] = rep.mats[aid]
            else:
                mats[aid] = linalg.zeros(
                    rep.field, dims[a.target], dims[a.source])
        return Representation(rep.field, dims, mats)


ReductionStep = object  # any of the step classes above


def pullback_chain(steps: Sequence[ReductionStep],
                   rep: Representation) -> Representation:
    for step in reversed(list(steps)):
        rep = step.pullback(rep)
    return rep


# ---------------------------------------------------------------------------
# regularization

def _linear_dotted_candidates(e: GradedElement) -> List[str]:
    """Dotted generators occurring as a bare length-1 term and nowhere else
    in e, in sorted order."""
    singles = [p.arrows[0].id for p, _ in e.terms
               if len(p.arrows) == 1 and p.arrows[0].kind == "dotted"]
    out = []
    for v in sorted(singles):
        others = [p for p, _ in e.terms if p.word() != (v,)]
        if all(v not in p.word() for p in others):
            out.append(v)
    return out


def can_regularize(box: Box, aid: str) -> bool:
    a = box.arrow(aid)
    if a.kind != "solid":
        return False
    return bool(_linear_dotted_candidates(box.diff[aid]))


def _delete_arrows(box: Box, ids) -> Box:
    ids = set(ids)
    kept = [a for a in box.arrows.values() if a.id not in ids]
    new_diff = {}
    for a in kept:
        e = box.diff[a.id]
        new_diff[a.id] = GradedElement(
            e.source, e.target,
            [(p, c) for p, c in e.terms
             if not (set(p.word()) & ids)])
    return Box(box.name, box.vertices, kept, new_diff)


def regularize(box: Box, aid: str) -> Tuple[Box, RegularizationStep]:
    """Remove a solid arrow whose differential is a dotted generator up to
    lower-order terms, together with that generator."""
    a = box.arrow(aid)
    if a.kind != "solid":
        raise BoxError(f"{aid} is not solid")
    db = box.diff[aid]
    if db.is_zero():
        raise BoxError(f"cannot regularize {aid}: its differential vanishes")
    cands = _linear_dotted_candidates(db)
    if not cands:
        raise BoxError(
            f"cannot regularize {aid}: no dotted generator occurs linearly "
            f"in its differential")
    v = cands[0]
    mid, change = change_generators(box, {v: db})
    if mid.diff[aid] != GradedElement.from_arrow(mid.arrow(v)):
        raise BoxError(f"normalization failed for {aid}")
    out = assert_valid(_delete_arrows(mid, (aid, v)))
    return out, RegularizationStep(box, out, aid, v, change)


def regularize_all(box: Box) -> Tuple[Box, List[RegularizationStep]]:
    """Sweep: repeatedly regularize the first eligible solid arrow (sorted
    order) until none remains."""
    steps: List[RegularizationStep] = []
    cur = box
    while True:
        aid = next((x for x in sorted(cur.solid_ids())
                    if can_regularize(cur, x)), None)
        if aid is None:
            return cur, steps
        cur, st = regularize(cur, aid)
        steps.append(st)


# ---------------------------------------------------------------------------
# minimal edge

def _fresh_vertex(vertices) -> str:
    n = 0
    while str(n) in vertices:
        n += 1
    return str(n)


def _fresh_id(base: str, used) -> str:
    if base not in used:
        return base
    k = 2
    while f"{base}{k}" in used:
        k += 1
    return f"{base}{k}"


def reduce_minimal_edge(box: Box, edge: str) -> Tuple[Box, MinimalEdgeStep]:
    """Split along a solid edge with vanishing differential and distinct
    endpoints.

    Both endpoints acquire a second component carried by a fresh vertex;
    every other arrow splits into the corresponding blocks, the edge itself
    becomes the identity on the fresh component, and the differentials of
    the blocks pick up boundary terms through the two new dotted arrows.
    """
    b = box.arrow(edge)
    if b.kind != "solid":
        raise BoxError(f"{edge} is not solid")
    if not box.diff[edge].is_zero():
        raise BoxError(f"the differential of {edge} must vanish")
    if b.source == b.target:
        raise BoxError(f"{edge} is a loop; minimal-edge needs distinct endpoints")
    v1, v2 = b.target, b.source
    n0 = _fresh_vertex(box.vertices)
    labels = {v: (v,) for v in box.vertices}
    labels[v1] = (v1, n0)
    labels[v2] = (v2, n0)

    used = set(box.arrows)
    new_arrows: List[ArrowRef] = []
    splits: Dict[str, SplitTable] = {}
    for aid, a in box.arrows.items():
        if aid == edge:
            continue
        rl, cl = labels[a.target], labels[a.source]
        if len(rl) == 1 and len(cl) == 1:
            ids = ((aid,),)
            new_arrows.append(a)
        else:
            grid = []
            for r in rl:
                row = []
                for c in cl:
                    if len(rl) > 1 and len(cl) > 1:
                        name = f"{aid}_{r}{c}"
                    elif len(rl) > 1:
                        name = f"{aid}_{r}"
                    else:
                        name = f"{aid}_{c}"
                    name = _fresh_id(name, used)
                    used.add(name)
                    row.append(name)
                    new_arrows.append(ArrowRef(name, c, r, a.kind))
                grid.append(tuple(row))
            ids = tuple(grid)
        splits[aid] = SplitTable(rl, cl, ids)

    eta = _fresh_id("eta", used)
    used.add(eta)
    xi = _fresh_id("xi", used)
    used.add(xi)
    new_arrows.append(ArrowRef(eta, v1, n0, "dotted"))
    new_arrows.append(ArrowRef(xi, n0, v2, "dotted"))

    # images of the old generators as matrices over the new box
    images: Dict[str, GradedMatrix] = {}
    arrow_refs = {a.id: a for a in new_arrows}
    for aid, t in splits.items():
        images[aid] = GradedMatrix(
            t.row_labels, t.col_labels,
            [[GradedElement.from_arrow(arrow_refs[t.ids[r][c]])
              for c in range(len(t.col_labels))]
             for r in range(len(t.row_labels))])
    edge_entries = [[GradedElement.zero(c, r) for c in labels[v2]]
                    for r in labels[v1]]
    edge_entries[1][1] = GradedElement.from_path(identity_path(n0))
    images[edge] = GradedMatrix(labels[v1], labels[v2], edge_entries)

    omega: Dict[str, GradedMatrix] = {
        v: GradedMatrix.zeros(labels[v], labels[v]) for v in box.vertices}
    om1 = [[GradedElement.zero(c, r) for c in labels[v1]] for r in labels[v1]]
    om1[1][0] = GradedElement.from_arrow(arrow_refs[eta])
    omega[v1] = GradedMatrix(labels[v1], labels[v1], om1)
    om2 = [[GradedElement.zero(c, r) for c in labels[v2]] for r in labels[v2]]
    om2[0][1] = GradedElement.from_arrow(arrow_refs[xi])
    omega[v2] = GradedMatrix(labels[v2], labels[v2], om2)

    diffs: Dict[str, GradedElement] = {}
    for aid, a in box.arrows.items():
        if aid == edge:
            continue
        fx = images[aid]
        dmat = substitute_matrix(box.diff[aid], images, labels)
        boundary = (fx @ omega[a.source]).map(
            lambda e: e if a.degree % 2 == 0 else -e)
        dmat = dmat + boundary - (omega[a.target] @ fx)
        t = splits[aid]
        for r in range(len(t.row_labels)):
            for c in range(len(t.col_labels)):
                diffs[t.ids[r][c]] = dmat.entries[r][c]

    out = assert_valid(Box(f"{box.name}_{edge}", tuple(box.vertices) + (n0,),
                           new_arrows, diffs))
    return out, MinimalEdgeStep(box, out, edge, v1, v2, n0, splits, eta, xi)


# ---------------------------------------------------------------------------
# pair elimination

def _bt_or_raise(box: Box) -> BTStructure:
    bt = recognize_bt(box)
    if not isinstance(bt, BTStructure):
        raise BoxError(f"box {box.name} is not recognized as BT: {bt}")
    return bt


def normalize_partner(box: Box, aid: str
                      ) -> Tuple[Box, str, List[GeneratorChangeStep]]:
    """Bring d(b) for a paired solid arrow b to a single dual generator.

    Requires d(b) to be a sum of duals of paired solid arrows; the partner
    c is the one of least height (ties by id). After the change d(b) equals
    the dual of c on the nose, and d(c) = -dual(b) + theta.
    """
    bt = _bt_or_raise(box)
    if aid not in bt.pairing:
        raise BoxError(f"{aid} is not a paired solid arrow")
    db = box.diff[aid]
    if db.is_zero():
        raise BoxError(f"the differential of {aid} vanishes")
    inv_pairing = {d: s for s, d in bt.pairing.items()}
    partners: List[Tuple[str, str, Fraction]] = []
    for p, c in db.terms:
        if len(p.arrows) != 1 or p.arrows[0].kind != "dotted":
            raise BoxError(f"d({aid}) is not a sum of dotted generators")
        dot = p.arrows[0].id
        if dot not in inv_pairing:
            raise BoxError(f"d({aid}) involves the unpaired dotted arrow {dot}")
        partners.append((inv_pairing[dot], dot, c))

    tri = find_triangulation(box, "solid")
    target = min(partners, key=lambda t: (tri.heights[t[0]], t[0]))
    cid, ctilde = target[0], target[1]

    steps: List[GeneratorChangeStep] = []
    cur = box

    phi0: Dict[str, GradedElement] = {}
    for sid, dot, coeff in partners:
        if coeff == 1:
            continue
        phi0[dot] = GradedElement.from_arrow(cur.arrow(dot), coeff)
        phi0[sid] = GradedElement.from_arrow(cur.arrow(sid), 1 / coeff)
    if phi0:
        nxt, change = change_generators(cur, phi0)
        steps.append(GeneratorChangeStep(cur, nxt, change))
        cur = nxt

    if len(partners) > 1:
        phi1: Dict[str, GradedElement] = {}
        for sid, dot, _ in partners:
            if sid != cid:
                phi1[sid] = (GradedElement.from_arrow(cur.arrow(sid))
                             - GradedElement.from_arrow(cur.arrow(cid)))
        acc = GradedElement.zero(cur.arrow(ctilde).source,
                                 cur.arrow(ctilde).target)
        for _, dot, _c in partners:
            acc = acc + GradedElement.from_arrow(cur.arrow(dot))
        phi1[ctilde] = acc
        nxt, change = change_generators(cur, phi1)
        steps.append(GeneratorChangeStep(cur, nxt, change))
        cur = nxt

    if cur.diff[aid] != GradedElement.from_arrow(cur.arrow(ctilde)):
        raise BoxError(f"partner normalization failed for {aid}")
    btilde = bt.pairing[aid]
    if cur.diff[cid].coefficient(Path((cur.arrow(btilde),))) != -1:
        raise BoxError(
            f"d({cid}) does not contain -{btilde}; the pair is not dual")
    return cur, cid, steps


def eliminate_pair(box: Box, aid: str) -> Tuple[Box, List[ReductionStep]]:
    """Remove a paired solid arrow with nonvanishing differential together
    with its partner and both dual arrows. Dimensions are untouched."""
    cur, cid, steps0 = normalize_partner(box, aid)
    steps: List[ReductionStep] = list(steps0)
    bt = _bt_or_raise(cur)
    btilde = bt.pairing[aid]

    dc = cur.diff[cid]
    if dc != -GradedElement.from_arrow(cur.arrow(btilde)):
        phi3 = {btilde: -dc}
        nxt, change = change_generators(cur, phi3)
        steps.append(GeneratorChangeStep(cur, nxt, change))
        cur = nxt
        if cur.diff[cid] != -GradedElement.from_arrow(cur.arrow(btilde)):
            raise BoxError(f"could not straighten d({cid})")

    cur, st = regularize(cur, aid)
    steps.append(st)
    cur, st = regularize(cur, cid)
    steps.append(st)
    _bt_or_raise(cur)
    return cur, steps


# ---------------------------------------------------------------------------
# self-reproduction

def self_reproduce(box: Box, edge: str) -> Tuple[Box, List[ReductionStep]]:
    """Minimal-edge split followed by the three regularizations that remove
    the redundant diagonal pieces of the endpoint loops."""
    bt = _bt_or_raise(box)
    if edge not in bt.pairing:
        raise BoxError(f"{edge} is not a paired solid arrow")
    nxt, me = reduce_minimal_edge(box, edge)
    steps: List[ReductionStep] = [me]
    v1, v2, n0 = me.vertex_one, me.vertex_two, me.new_vertex

    t1 = me.splits[bt.loops[v1]]
    t2 = me.splits[bt.loops[v2]]
    a_nv = t1.ids[t1.row_labels.index(n0)][t1.col_labels.index(v1)]
    a_nn = t1.ids[t1.row_labels.index(n0)][t1.col_labels.index(n0)]
    c_vn = t2.ids[t2.row_labels.index(v2)][t2.col_labels.index(n0)]

    cur = nxt
    for aid in (a_nv, a_nn, c_vn):
        cur, st = regularize(cur, aid)
        steps.append(st)
    _bt_or_raise(cur)
    return cur, steps


def delete_vertex_step(box: Box, v: str) -> Tuple[Box, VertexDeletionStep]:
    out = delete_vertex(box, v)
    return out, VertexDeletionStep(box, out, v)
