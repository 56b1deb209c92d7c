"""Representations of boxes over exact fields.

A representation assigns a finite-dimensional space to each vertex and a
matrix to each solid arrow. Morphisms additionally carry a matrix per
dotted arrow; the defining equations come from the differential. All
solving is exact (prime fields or rationals); the polynomial "field" is
used only to carry one-parameter families, which are evaluated before any
linear algebra runs.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .box import Box, BoxError, CycleWitness, find_triangulation
from .fields import PolyRing, PrimeField, RationalField
from .freecat import GradedElement, Path


class RepError(Exception):
    pass


class BudgetExceeded(Exception):
    pass


class IsoUndecidable(Exception):
    """Sampling failed and exact certification is out of budget."""


@dataclass
class Representation:
    field: object
    dims: Dict[str, int]
    mats: Dict[str, linalg.Matrix]

    def dim_total(self) -> int:
        return sum(self.dims.values())

    def mat(self, aid: str) -> linalg.Matrix:
        return self.mats[aid]

    def __eq__(self, other):
        return (isinstance(other, Representation)
                and self.field == other.field
                and self.dims == other.dims
                and self.mats == other.mats)


def validate_representation(box: Box, rep: Representation) -> None:
    if set(rep.dims) != set(box.vertices):
        raise RepError("dimension vector does not match the vertex set")
    for aid in box.solid_ids():
        a = box.arrow(aid)
        m = rep.mats.get(aid)
        if m is None:
            raise RepError(f"no matrix for solid arrow {aid}")
        dt, ds = rep.dims[a.target], rep.dims[a.source]
        if len(m) != dt or any(len(row) != ds for row in m):
            raise RepError(f"matrix for {aid} is not {dt}x{ds}")
    extra = set(rep.mats) - set(box.solid_ids())
    if extra:
        raise RepError(f"matrices for non-solid arrows: {sorted(extra)}")


def zero_representation(box: Box, field, dims: Mapping[str, int]) -> Representation:
    dims = {v: int(dims.get(v, 0)) for v in box.vertices}
    mats = {}
    for aid in box.solid_ids():
        a = box.arrow(aid)
        mats[aid] = linalg.zeros(field, dims[a.target], dims[a.source])
    return Representation(field, dims, mats)


def evaluate_solid_element(rep: Representation, e: GradedElement) -> linalg.Matrix:
    """Matrix of a degree-0 combination of solid paths (empty path = identity)."""
    field = rep.field
    out = linalg.zeros(field, rep.dims[e.target], rep.dims[e.source])
    for path, coeff in e.terms:
        if path.degree != 0:
            raise RepError(f"path {path} is not solid")
        m = _path_matrix(rep, path)
        out = linalg.mat_add(field, out, linalg.mat_scale(
            field, field.from_fraction(coeff), m))
    return out


def _path_matrix(rep: Representation, path: Path) -> linalg.Matrix:
    if not path.arrows:
        return linalg.identity(rep.field, rep.dims[path.at])
    # a zero-dimensional intermediate vertex kills the product; the fold
    # below would silently lose the column count there
    if any(rep.dims[a.source] == 0 for a in path.arrows[:-1]):
        return linalg.zeros(rep.field, rep.dims[path.target],
                            rep.dims[path.source])
    m = None
    for arrow in path.arrows:
        a = rep.mats[arrow.id]
        m = a if m is None else linalg.mat_mul(rep.field, m, a)
    return m


def _mm(field, a: linalg.Matrix, b: linalg.Matrix, cols: int) -> linalg.Matrix:
    """Product that keeps its width when the inner dimension is zero."""
    if not b:
        return linalg.zeros(field, len(a), cols)
    return linalg.mat_mul(field, a, b)


# ---------------------------------------------------------------------------
# morphisms

@dataclass
class MorphismData:
    vertex_maps: Dict[str, linalg.Matrix]   # S_i : M_i -> N_i
    dotted_maps: Dict[str, linalg.Matrix]   # S(v): M_i -> N_j for v: i..>j

    def __eq__(self, other):
        return (isinstance(other, MorphismData)
                and self.vertex_maps == other.vertex_maps
                and self.dotted_maps == other.dotted_maps)


def _unknown_layout(box: Box, M: Representation, N: Representation):
    """Flatten all S_i and S(v) entries into one coefficient vector."""
    slots = []  # (kind, key, rows, cols, offset)
    offset = 0
    for v in box.vertices:
        r, c = N.dims[v], M.dims[v]
        slots.append(("vertex", v, r, c, offset))
        offset += r * c
    for aid in sorted(box.dotted_ids()):
        a = box.arrow(aid)
        r, c = N.dims[a.target], M.dims[a.source]
        slots.append(("dotted", aid, r, c, offset))
        offset += r * c
    return slots, offset


def _split_dotted(path: Path):
    """For a degree-1 path: (solid prefix, dotted arrow, solid suffix)."""
    idx = next(k for k, a in enumerate(path.arrows) if a.kind == "dotted")
    return path.arrows[:idx], path.arrows[idx], path.arrows[idx + 1:]


def _segment_matrix(rep: Representation, arrows, source: str) -> linalg.Matrix:
    if not arrows:
        return linalg.identity(rep.field, rep.dims[source])
    return _path_matrix(rep, Path(tuple(arrows)))


def hom_space(box: Box, M: Representation, N: Representation
              ) -> List[MorphismData]:
    """Exact basis of morphisms M -> N.

    For each solid a: i->j the defining equation is
        S_j M(a) - N(a) S_i = sum over terms c * p' u p of d(a) of
                               c * N(p') S(u) M(p).
    """
    if M.field != N.field:
        raise RepError("mixed fields")
    field = M.field
    slots, width = _unknown_layout(box, M, N)
    index = {(kind, key): (r, c, off) for kind, key, r, c, off in slots}

    rows: List[List[object]] = []
    for aid in box.solid_ids():
        a = box.arrow(aid)
        i, j = a.source, a.target
        Ma, Na = M.mats[aid], N.mats[aid]
        nrows, ncols = N.dims[j], M.dims[i]
        # coefficient tables per unknown slot for this arrow's equation block
        for alpha in range(nrows):
            for beta in range(ncols):
                row = [field.zero] * width
                rj, cj, offj = index[("vertex", j)]
                for c in range(cj):
                    # (S_j M(a))[alpha, beta] picks S_j[alpha, c] * M(a)[c, beta]
                    row[offj + alpha * cj + c] = field.add(
                        row[offj + alpha * cj + c], Ma[c][beta])
                ri, ci, offi = index[("vertex", i)]
                for r in range(ri):
                    # -(N(a) S_i)[alpha, beta] picks N(a)[alpha, r] * S_i[r, beta]
                    row[offi + r * ci + beta] = field.sub(
                        row[offi + r * ci + beta], Na[alpha][r])
                for path, coeff in box.diff[aid].terms:
                    pre, u, suf = _split_dotted(path)
                    lam = field.from_fraction(coeff)
                    npre = _segment_matrix(N, pre, u.target)
                    msuf = _segment_matrix(M, suf, path.source)
                    ru, cu, offu = index[("dotted", u.id)]
                    for r in range(ru):
                        for c in range(cu):
                            contrib = field.mul(
                                lam, field.mul(npre[alpha][r], msuf[c][beta]))
                            row[offu + r * cu + c] = field.sub(
                                row[offu + r * cu + c], contrib)
                rows.append(row)

    basis_vectors = linalg.nullspace(field, rows, ncols=width)
    out = []
    for vec in basis_vectors:
        vmaps, dmaps = {}, {}
        for kind, key, r, c, off in slots:
            m = tuple(tuple(vec[off + a * c + b] for b in range(c))
                      for a in range(r))
            if kind == "vertex":
                vmaps[key] = m
            else:
                dmaps[key] = m
        out.append(MorphismData(vmaps, dmaps))
    return out


def morphism_residual(box: Box, M: Representation, N: Representation,
                      S: MorphismData) -> Dict[str, linalg.Matrix]:
    """Left side minus right side of every defining equation; all-zero
    matrices iff S is a morphism."""
    field = M.field
    out = {}
    for aid in box.solid_ids():
        a = box.arrow(aid)
        wid = M.dims[a.source]
        lhs = linalg.mat_sub(
            field,
            _mm(field, S.vertex_maps[a.target], M.mats[aid], wid),
            _mm(field, N.mats[aid], S.vertex_maps[a.source], wid))
        rhs = linalg.zeros(field, N.dims[a.target], wid)
        for path, coeff in box.diff[aid].terms:
            pre, u, suf = _split_dotted(path)
            term = _mm(field, _segment_matrix(N, pre, u.target),
                       _mm(field, S.dotted_maps[u.id],
                           _segment_matrix(M, suf, path.source), wid), wid)
            rhs = linalg.mat_add(field, rhs, linalg.mat_scale(
                field, field.from_fraction(coeff), term))
        out[aid] = linalg.mat_sub(field, lhs, rhs)
    return out


def is_morphism(box: Box, M: Representation, N: Representation,
                S: MorphismData) -> bool:
    return all(linalg.is_zero_matrix(M.field, m)
               for m in morphism_residual(box, M, N, S).values())


def identity_morphism(box: Box, M: Representation) -> MorphismData:
    field = M.field
    vmaps = {v: linalg.identity(field, M.dims[v]) for v in box.vertices}
    dmaps = {}
    for aid in box.dotted_ids():
        a = box.arrow(aid)
        dmaps[aid] = linalg.zeros(field, M.dims[a.target], M.dims[a.source])
    return MorphismData(vmaps, dmaps)


def _split_two_dotted(path: Path):
    """For a degree-2 path: (p1, u', p2, u, p3) with u' left of u."""
    idxs = [k for k, a in enumerate(path.arrows) if a.kind == "dotted"]
    k1, k2 = idxs
    return (path.arrows[:k1], path.arrows[k1], path.arrows[k1 + 1:k2],
            path.arrows[k2], path.arrows[k2 + 1:])


def compose_morphisms(box: Box, M: Representation, N: Representation,
                      L: Representation, S: MorphismData, S2: MorphismData
                      ) -> MorphismData:
    """Composite of S: M -> N and S2: N -> L.

    T_i = S2_i S_i;  for v: i..>j,
    T(v) = S2_j S(v) + S2(v) S_i
           + sum over terms c * p1 u' p2 u p3 of d(v) of
             c * L(p1) S2(u') N(p2) S(u) M(p3).
    """
    field = M.field
    vmaps = {v: _mm(field, S2.vertex_maps[v], S.vertex_maps[v], M.dims[v])
             for v in box.vertices}
    dmaps = {}
    for aid in box.dotted_ids():
        a = box.arrow(aid)
        i, j = a.source, a.target
        wid = M.dims[i]
        acc = linalg.mat_add(
            field,
            _mm(field, S2.vertex_maps[j], S.dotted_maps[aid], wid),
            _mm(field, S2.dotted_maps[aid], S.vertex_maps[i], wid))
        for path, coeff in box.diff[aid].terms:
            p1, u2, p2, u1, p3 = _split_two_dotted(path)
            term = _mm(field, _segment_matrix(L, p1, u2.target),
                       S2.dotted_maps[u2.id], N.dims[u2.source])
            term = _mm(field, term, _segment_matrix(N, p2, u1.target),
                       N.dims[u1.target])
            term = _mm(field, term, S.dotted_maps[u1.id], M.dims[u1.source])
            term = _mm(field, term, _segment_matrix(M, p3, path.source), wid)
            acc = linalg.mat_add(field, acc, linalg.mat_scale(
                field, field.from_fraction(coeff), term))
        dmaps[aid] = acc
    return MorphismData(vmaps, dmaps)


# ---------------------------------------------------------------------------
# bricks and isomorphism

def end_dimension(box: Box, M: Representation) -> int:
    return len(hom_space(box, M, M))


def is_brick(box: Box, M: Representation) -> bool:
    return end_dimension(box, M) == 1


def _combine(field, basis: Sequence[MorphismData],
             coeffs: Sequence[object]) -> MorphismData:
    vmaps, dmaps = {}, {}
    first = basis[0]
    for v, m in first.vertex_maps.items():
        acc = linalg.zeros(field, len(m), len(m[0]) if m else 0)
        for S, c in zip(basis, coeffs):
            acc = linalg.mat_add(field, acc, linalg.mat_scale(
                field, c, S.vertex_maps[v]))
        vmaps[v] = acc
    for u, m in first.dotted_maps.items():
        acc = linalg.zeros(field, len(m), len(m[0]) if m else 0)
        for S, c in zip(basis, coeffs):
            acc = linalg.mat_add(field, acc, linalg.mat_scale(
                field, c, S.dotted_maps[u]))
        dmaps[u] = acc
    return MorphismData(vmaps, dmaps)


def _all_vertex_maps_invertible(field, S: MorphismData) -> bool:
    return all(linalg.invertible(field, m) for m in S.vertex_maps.values())


def _coefficient_space(field, dim: int, total_dim: int, budget: int):
    """Exhaustive coefficient vectors for the negative certificate.

    Over F_p the whole space; over Q a grid large enough that the product of
    the determinants (degree <= total vertex dimension per variable) cannot
    vanish identically on it without vanishing identically.
    """
    if isinstance(field, PrimeField):
        if field.p ** dim > budget:
            return None
        return itertools.product(field.elements(), repeat=dim)
    if isinstance(field, RationalField):
        from fractions import Fraction
        side = total_dim + 1
        if side ** dim > budget:
            return None
        return itertools.product([Fraction(k) for k in range(side)],
                                 repeat=dim)
    return None


def are_isomorphic(box: Box, M: Representation, N: Representation, *,
                   samples: int = 8, dim_threshold: int = 12,
                   budget: int = 1 << 18, rng: Optional[random.Random] = None
                   ) -> bool:
    """Decide M ~ N.

    With a full triangulation (all arrows layered), a morphism is an
    isomorphism iff all its vertex maps are invertible, so it suffices to
    look for such an element of Hom(M, N): random samples first, then an
    exhaustive sweep of coefficient space for the negative certificate.
    Without a full triangulation, search for an explicit two-sided inverse.
    Raises IsoUndecidable when neither sampling nor the exhaustive budget
    settles the question.
    """
    if M.field != N.field:
        raise RepError("mixed fields")
    if M.dims != N.dims:
        return False
    field = M.field
    total = M.dim_total()
    if total == 0:
        return True
    rng = rng or random.Random(20260822)
    roiter = not isinstance(find_triangulation(box, "full"), CycleWitness)
    basis = hom_space(box, M, N)
    if not basis:
        return False
    dim = len(basis)

    if roiter:
        for _ in range(samples):
            coeffs = [field.random_element(rng) for _ in range(dim)]
            if _all_vertex_maps_invertible(field, _combine(field, basis, coeffs)):
                return True
        if dim <= dim_threshold:
            space = _coefficient_space(field, dim, total, budget)
            if space is not None:
                for coeffs in space:
                    if _all_vertex_maps_invertible(
                            field, _combine(field, basis, list(coeffs))):
                        return True
                return False
        raise IsoUndecidable(
            f"sampling found no isomorphism and the {dim}-dimensional "
            f"Hom space exceeds the certification budget")

    # fallback: explicit two-sided inverse via composition
    back = hom_space(box, N, M)
    if not back:
        return False
    id_M = identity_morphism(box, M)
    id_N = identity_morphism(box, N)

    def is_two_sided(S):
        for T_coeffs in _candidate_space(field, len(back), total, budget):
            T = _combine(field, back, list(T_coeffs))
            if (compose_morphisms(box, M, N, M, S, T) == id_M
                    and compose_morphisms(box, N, M, N, T, S) == id_N):
                return True
        return False

    space = _coefficient_space(field, dim, total, budget)
    if space is None:
        raise IsoUndecidable("Hom space too large for the inverse search")
    for coeffs in space:
        S = _combine(field, basis, list(coeffs))
        if _all_vertex_maps_invertible(field, S) and is_two_sided(S):
            return True
    return False


def _candidate_space(field, dim, total, budget):
    space = _coefficient_space(field, dim, total, budget)
    if space is None:
        raise IsoUndecidable("inverse-search space too large")
    return space


# ---------------------------------------------------------------------------
# brute-force enumeration oracle

def enumerate_bricks(box: Box, d: Mapping[str, int], field,
                     budget: int = 1 << 17) -> List[Representation]:
    """All isomorphism classes of bricks of dimension d over a finite field,
    by exhaustive enumeration; representatives are the lexicographically
    least matrix tuples (deterministic)."""
    if not isinstance(field, PrimeField):
        raise RepError("enumeration needs a finite field")
    from .box import norm as box_norm
    dims = {v: int(d.get(v, 0)) for v in box.vertices}
    entries = box_norm(box, dims)
    count = field.p ** entries
    if count > budget:
        raise BudgetExceeded(
            f"{field.p}^{entries} representations exceed the budget {budget}")
    solid = sorted(box.solid_ids())
    shapes = []
    for aid in solid:
        a = box.arrow(aid)
        shapes.append((aid, dims[a.target], dims[a.source]))
    reps: List[Representation] = []
    for tup in itertools.product(field.elements(), repeat=entries):
        mats = {}
        pos = 0
        for aid, r, c in shapes:
            mats[aid] = tuple(tuple(tup[pos + a * c + b] for b in range(c))
                              for a in range(r))
            pos += r * c
        rep = Representation(field, dict(dims), mats)
        if not is_brick(box, rep):
            continue
        if any(are_isomorphic(box, rep, seen) for seen in reps):
            continue
        reps.append(rep)
    return reps


# ---------------------------------------------------------------------------
# parametric representations

def evaluate_parametric(rep: Representation, value) -> Representation:
    """Evaluate a representation with polynomial entries at a scalar."""
    ring = rep.field
    if not isinstance(ring, PolyRing):
        raise RepError("not a parametric representation")
    base = ring.base
    mats = {aid: tuple(tuple(ring.evaluate(e, value) for e in row)
                       for row in m)
            for aid, m in rep.mats.items()}
    return Representation(base, dict(rep.dims), mats)
