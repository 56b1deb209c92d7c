"""Coadjoint boxes from finite-dimensional algebra data.

An algebra is handed over as a multiplication table on a distinguished
basis: a complete set of orthogonal primitive idempotents plus a basis of
the radical, each placed between two idempotents, with structure
constants for the radical products only (products against idempotents
are forced by placement). The box built from the table has the basis as
solid arrows, idempotents as distinguished loops, and one dotted dual
per radical element; its differential encodes the multiplication.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Tuple

from . import linalg
from .box import Box, BoxError, assert_valid
from .fields import RationalField
from .freecat import ArrowRef, GradedElement

_Q = RationalField()


def dual_name(b: str) -> str:
    return f"{b}_star"


def _coeff(x) -> Fraction:
    if isinstance(x, bool):
        raise ValueError(f"bad coefficient {x!r}")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise ValueError(f"bad coefficient {x!r}")


@dataclass
class AlgebraTable:
    basis: List[str]
    idempotents: List[str]
    placement: Dict[str, Tuple[str, str]]      # b -> (i, j) with b = e_i b e_j
    gamma: List[Tuple[str, str, str, Fraction]]  # (x, y, b, c): xy has c*b
    name: str = "algebra"

    @classmethod
    def from_json(cls, data: Mapping) -> "AlgebraTable":
        known = {"basis", "idempotents", "placement", "gamma", "name"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown keys {sorted(unknown)}")
        for key in ("basis", "idempotents", "placement", "gamma"):
            if key not in data:
                raise ValueError(f"missing key {key!r}")
        basis = [str(b) for b in data["basis"]]
        idem = [str(e) for e in data["idempotents"]]
        placement = {}
        for b, pair in data["placement"].items():
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ValueError(f"placement of {b!r} is not a pair")
            placement[str(b)] = (str(pair[0]), str(pair[1]))
        for e in idem:
            placement.setdefault(e, (e, e))
        gamma = []
        for row in data["gamma"]:
            if len(row) != 4:
                raise ValueError(f"gamma row {row!r} is not [x, y, b, coeff]")
            x, y, b, c = row
            gamma.append((str(x), str(y), str(b), _coeff(c)))
        return cls(basis, idem, placement, gamma,
                   str(data.get("name", "algebra")))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "basis": list(self.basis),
            "idempotents": list(self.idempotents),
            "placement": {b: list(p) for b, p in sorted(self.placement.items())},
            "gamma": [[x, y, b, str(c)] for x, y, b, c in self.gamma],
        }

    def radical(self) -> List[str]:
        idem = set(self.idempotents)
        return [b for b in self.basis if b not in idem]


def load_algebra(path: str) -> AlgebraTable:
    with open(path) as fh:
        return AlgebraTable.from_json(json.load(fh))


@dataclass(frozen=True)
class AlgebraReport:
    violations: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        return "valid" if self.ok else "\n".join(self.violations)


def _gamma_map(t: AlgebraTable) -> Dict[Tuple[str, str], Dict[str, Fraction]]:
    out: Dict[Tuple[str, str], Dict[str, Fraction]] = {}
    for x, y, b, c in t.gamma:
        prods = out.setdefault((x, y), {})
        prods[b] = prods.get(b, Fraction(0)) + c
    return out


def multiply(t: AlgebraTable, x: str, y: str) -> Dict[str, Fraction]:
    """Product of two basis elements as a sparse basis combination."""
    idem = set(t.idempotents)
    if x in idem and y in idem:
        return {x: Fraction(1)} if x == y else {}
    if x in idem:
        return {y: Fraction(1)} if t.placement[y][0] == x else {}
    if y in idem:
        return {x: Fraction(1)} if t.placement[x][1] == y else {}
    prods = _gamma_map(t).get((x, y), {})
    return {b: c for b, c in prods.items() if c != 0}


def _mult_vector(t: AlgebraTable, vec: Mapping[str, Fraction],
                 y: str) -> Dict[str, Fraction]:
    out: Dict[str, Fraction] = {}
    for x, c in vec.items():
        for b, d in multiply(t, x, y).items():
            out[b] = out.get(b, Fraction(0)) + c * d
    return {b: c for b, c in out.items() if c != 0}


def validate_algebra(t: AlgebraTable) -> AlgebraReport:
    out: List[str] = []
    if not t.basis:
        out.append("empty basis")
    if len(set(t.basis)) != len(t.basis):
        out.append("duplicate basis labels")
    if not t.idempotents:
        out.append("no idempotents")
    if len(set(t.idempotents)) != len(t.idempotents):
        out.append("duplicate idempotent labels")
    missing = [e for e in t.idempotents if e not in t.basis]
    if missing:
        out.append(f"idempotents not in basis: {missing}")
    if out:
        return AlgebraReport(tuple(out))

    idem = set(t.idempotents)
    for b in t.basis:
        pair = t.placement.get(b)
        if pair is None:
            out.append(f"no placement for {b}")
        elif pair[0] not in idem or pair[1] not in idem:
            out.append(f"placement of {b} uses non-idempotent labels {pair}")
        elif b in idem and pair != (b, b):
            out.append(f"idempotent {b} placed at {pair}, expected ({b}, {b})")
    if out:
        return AlgebraReport(tuple(out))

    seen = set()
    for x, y, b, c in t.gamma:
        for z in (x, y, b):
            if z not in t.basis:
                out.append(f"gamma mentions unknown element {z}")
                break
        else:
            if x in idem or y in idem or b in idem:
                out.append(f"gamma entry ({x}, {y}, {b}) involves an idempotent")
            elif c == 0:
                out.append(f"gamma entry ({x}, {y}, {b}) has zero coefficient")
            elif (x, y, b) in seen:
                out.append(f"duplicate gamma entry ({x}, {y}, {b})")
            else:
                seen.add((x, y, b))
                # e_i x e_k * e_k' y e_j vanishes unless k = k', and the
                # product then lives in e_i . e_j
                xi, xk = t.placement[x]
                yk, yj = t.placement[y]
                bi, bj = t.placement[b]
                if xk != yk:
                    out.append(f"gamma entry ({x}, {y}, {b}): placements "
                               f"do not chain")
                elif (bi, bj) != (xi, yj):
                    out.append(f"gamma entry ({x}, {y}, {b}): product placed "
                               f"at ({xi}, {yj}) but {b} sits at ({bi}, {bj})")
    if out:
        return AlgebraReport(tuple(out))

    rad = t.radical()
    for x in rad:
        for y in rad:
            xy = multiply(t, x, y)
            for z in rad:
                left = _mult_vector(t, xy, z)
                right: Dict[str, Fraction] = {}
                for b, c in multiply(t, y, z).items():
                    for w, d in multiply(t, x, b).items():
                        right[w] = right.get(w, Fraction(0)) + c * d
                right = {b: c for b, c in right.items() if c != 0}
                if left != right:
                    out.append(f"associativity fails on ({x}, {y}, {z})")

    # the radical span must be nilpotent: multiply the current power by the
    # radical until the span dies or stops shrinking
    if rad and not out:
        index = {b: k for k, b in enumerate(rad)}
        rows = [tuple(Fraction(1) if k == index[b] else Fraction(0)
                      for k in range(len(rad))) for b in rad]
        dim = len(rad)
        while dim > 0:
            nxt = []
            for row in rows:
                vec = {b: row[index[b]] for b in rad if row[index[b]] != 0}
                for y in rad:
                    prod = _mult_vector(t, vec, y)
                    if prod:
                        nxt.append(tuple(prod.get(b, Fraction(0))
                                         for b in rad))
            if not nxt:
                break
            reduced, pivots = linalg.rref(_Q, nxt)
            rows = [reduced[k] for k in range(len(pivots))]
            if len(pivots) >= dim:
                out.append("radical span is not nilpotent")
                break
            dim = len(pivots)

    return AlgebraReport(tuple(out))


def build_coadjoint_box(t: AlgebraTable, name: str = None) -> Box:
    """The box whose representations carry the coadjoint action data of the
    algebra: one vertex per idempotent, the basis as solid arrows with the
    idempotents as distinguished loops, and a dotted dual for each radical
    element. Differentials encode multiplication against the radical."""
    report = validate_algebra(t)
    if not report.ok:
        raise BoxError(f"invalid algebra table {t.name}:\n{report}")

    rad = t.radical()
    vertices = list(t.idempotents)
    arrows = [ArrowRef(e, e, e, "solid") for e in t.idempotents]
    for b in rad:
        i, j = t.placement[b]
        # b = e_i b e_j acts j -> i; its dual runs the other way
        arrows.append(ArrowRef(b, j, i, "solid"))
        arrows.append(ArrowRef(dual_name(b), i, j, "dotted"))
    ref = {a.id: a for a in arrows}
    gm = _gamma_map(t)

    diffs = {}
    for e in t.idempotents:
        terms = []
        for x in rad:
            if t.placement[x][0] == e:
                terms.append((Fraction(1), [ref[x], ref[dual_name(x)]]))
        for y in rad:
            if t.placement[y][1] == e:
                terms.append((Fraction(-1), [ref[dual_name(y)], ref[y]]))
        diffs[e] = GradedElement.build(e, e, terms)

    for b in rad:
        a = ref[b]
        terms = []
        for (x, y), prods in sorted(gm.items()):
            for w, c in sorted(prods.items()):
                if c == 0:
                    continue
                if y == b:
                    # x sends b to w: left multiplication contributes x* w
                    terms.append((c, [ref[dual_name(x)], ref[w]]))
                if x == b:
                    # b sends y to w: right multiplication, sign reversed
                    terms.append((-c, [ref[w], ref[dual_name(y)]]))
        diffs[b] = GradedElement.build(a.source, a.target, terms)

        star = ref[dual_name(b)]
        terms = []
        for (x, y), prods in sorted(gm.items()):
            c = prods.get(b, Fraction(0))
            if c != 0:
                terms.append((c, [ref[dual_name(y)], ref[dual_name(x)]]))
        diffs[dual_name(b)] = GradedElement.build(star.source, star.target,
                                                  terms)

    return assert_valid(Box(name or f"L_{t.name}", vertices, arrows, diffs))
