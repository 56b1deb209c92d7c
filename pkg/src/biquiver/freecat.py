"""Free graded path category of a biquiver.

Arrows are solid (degree 0) or dotted (degree 1). Paths compose right to
left: in the word ``b v`` the arrow ``v`` acts first, so a tuple of arrows
(a_0, ..., a_{n-1}) is a path iff a_k.source == a_{k+1}.target; its source
is a_{n-1}.source and its target a_0.target. Length-0 paths are the vertex
idempotents e_v.

Linear combinations keep exact rational coefficients regardless of the field
representations are later taken over; specialization happens only when
matrices over a concrete field are built.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Tuple


@dataclass(frozen=True)
class ArrowRef:
    id: str
    source: str
    target: str
    kind: str  # "solid" | "dotted"

    def __post_init__(self):
        if self.kind not in ("solid", "dotted"):
            raise ValueError(f"bad arrow kind: {self.kind!r}")

    @property
    def degree(self) -> int:
        return 0 if self.kind == "solid" else 1


@dataclass(frozen=True)
class Path:
    """A composable word of arrows, or a vertex idempotent when empty."""

    arrows: Tuple[ArrowRef, ...]
    at: Optional[str] = None  # vertex, only for the empty path

    def __post_init__(self):
        if self.arrows:
            if self.at is not None:
                raise ValueError("nonempty path carries no vertex marker")
            for left, right in zip(self.arrows, self.arrows[1:]):
                if left.source != right.target:
                    raise ValueError(
                        f"non-composable: {left.id}:{left.source}->{left.target} "
                        f"after {right.id}:{right.source}->{right.target}"
                    )
        elif self.at is None:
            raise ValueError("empty path needs a vertex")

    @property
    def source(self) -> str:
        return self.at if not self.arrows else self.arrows[-1].source

    @property
    def target(self) -> str:
        return self.at if not self.arrows else self.arrows[0].target

    @property
    def degree(self) -> int:
        return sum(a.degree for a in self.arrows)

    def __len__(self) -> int:
        return len(self.arrows)

    def sort_key(self):
        return (len(self.arrows), tuple(a.id for a in self.arrows))

    def word(self) -> Tuple[str, ...]:
        return tuple(a.id for a in self.arrows)

    def __str__(self):
        if not self.arrows:
            return f"e_{self.at}"
        return "*".join(a.id for a in self.arrows)


def identity_path(vertex: str) -> Path:
    return Path((), at=vertex)


class GradedElement:
    """A rational linear combination of parallel paths.

    Immutable; terms are kept sorted with zero coefficients dropped, so
    equality is structural.
    """

    __slots__ = ("source", "target", "terms")

    def __init__(self, source: str, target: str,
                 terms: Iterable[Tuple[Path, Fraction]] = ()):
        merged: dict = {}
        for path, coeff in terms:
            if path.source != source or path.target != target:
                raise ValueError(
                    f"path {path} is {path.source}->{path.target}, "
                    f"expected {source}->{target}"
                )
            c = merged.get(path, Fraction(0)) + coeff
            if c:
                merged[path] = c
            else:
                merged.pop(path, None)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(
            self, "terms",
            tuple(sorted(merged.items(), key=lambda t: t[0].sort_key())))

    def __setattr__(self, name, value):
        raise AttributeError("GradedElement is immutable")

    @classmethod
    def zero(cls, source: str, target: str) -> "GradedElement":
        return cls(source, target, ())

    @classmethod
    def from_arrow(cls, arrow: ArrowRef,
                   coeff: Fraction = Fraction(1)) -> "GradedElement":
        return cls(arrow.source, arrow.target, [(Path((arrow,)), coeff)])

    @classmethod
    def from_path(cls, path: Path,
                  coeff: Fraction = Fraction(1)) -> "GradedElement":
        return cls(path.source, path.target, [(path, coeff)])

    @classmethod
    def build(cls, source: str, target: str,
              terms: Iterable[Tuple[Fraction, Sequence[ArrowRef]]],
              ) -> "GradedElement":
        """From (coeff, arrow sequence) pairs; empty sequence means e_source."""
        if source != target:
            pairs = [(Path(tuple(seq)), c) for c, seq in terms]
        else:
            pairs = [(Path(tuple(seq)) if seq else identity_path(source), c)
                     for c, seq in terms]
        return cls(source, target, pairs)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {p.degree for p, _ in self.terms}

    def homogeneous_degree(self) -> Optional[int]:
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def coefficient(self, path: Path) -> Fraction:
        for p, c in self.terms:
            if p == path:
                return c
        return Fraction(0)

    def arrow_ids(self) -> set:
        return {a.id for p, _ in self.terms for a in p.arrows}

    def __add__(self, other: "GradedElement") -> "GradedElement":
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("sum of non-parallel elements")
        return GradedElement(self.source, self.target,
                             list(self.terms) + list(other.terms))

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return self + (-other)

    def __neg__(self) -> "GradedElement":
        return GradedElement(self.source, self.target,
                             [(p, -c) for p, c in self.terms])

    def scale(self, coeff: Fraction) -> "GradedElement":
        coeff = Fraction(coeff)
        return GradedElement(self.source, self.target,
                             [(p, coeff * c) for p, c in self.terms])

    def __mul__(self, other: "GradedElement") -> "GradedElement":
        """Composition: (self * other) applies other first."""
        if other.target != self.source:
            raise ValueError(
                f"cannot compose: left expects source {self.source}, "
                f"right has target {other.target}")
        out = []
        for p, c in self.terms:
            for q, d in other.terms:
                arrows = p.arrows + q.arrows
                path = Path(arrows) if arrows else identity_path(q.source)
                out.append((path, c * d))
        return GradedElement(other.source, self.target, out)

    def __eq__(self, other):
        return (isinstance(other, GradedElement)
                and self.source == other.source
                and self.target == other.target
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.source, self.target, self.terms))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for p, c in self.terms:
            body = str(p)
            if c == 1:
                s = body
            elif c == -1:
                s = f"-{body}"
            else:
                s = f"{c}*{body}"
            parts.append(s)
        text = parts[0]
        for s in parts[1:]:
            text += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
        return text

    __repr__ = __str__


def compose(left: GradedElement, right: GradedElement) -> GradedElement:
    return left * right


def leibniz_extend(diff: Mapping[str, GradedElement],
                   element: GradedElement) -> GradedElement:
    """Extend a differential on generators to the element, by the graded
    Leibniz rule d(xy) = d(x) y + (-1)^{|x|} x d(y)."""
    out = GradedElement.zero(element.source, element.target)
    for path, coeff in element.terms:
        sign = Fraction(1)
        for k, arrow in enumerate(path.arrows):
            da = diff.get(arrow.id)
            if da is None or da.is_zero():
                sign *= (-1) ** arrow.degree
                continue
            prefix = path.arrows[:k]
            suffix = path.arrows[k + 1:]
            for q, d in da.terms:
                arrows = prefix + q.arrows + suffix
                new = Path(arrows) if arrows else identity_path(element.source)
                out = out + GradedElement.from_path(new, coeff * sign * d)
            sign *= (-1) ** arrow.degree
    return out


def substitute(element: GradedElement,
               images: Mapping[str, GradedElement],
               vertex_map: Optional[Mapping[str, str]] = None,
               ) -> GradedElement:
    """Replace every arrow by its image element (default: itself).

    vertex_map relabels the endpoints; arrows missing from images must then
    be mapped explicitly or the relabeling would produce dangling arrows.
    """
    vm = vertex_map or {}
    src = vm.get(element.source, element.source)
    tgt = vm.get(element.target, element.target)
    out = GradedElement.zero(src, tgt)
    for path, coeff in element.terms:
        acc = None
        for arrow in reversed(path.arrows):
            img = images.get(arrow.id)
            if img is None:
                if arrow.source in vm or arrow.target in vm:
                    raise KeyError(
                        f"no image for arrow {arrow.id} under a vertex relabeling")
                img = GradedElement.from_arrow(arrow)
            acc = img if acc is None else img * acc
        if acc is None:
            acc = GradedElement.from_path(identity_path(src))
        out = out + acc.scale(coeff)
    return out


class GradedMatrix:
    """Matrix of graded elements with vertex-labeled rows and columns.

    Entry (k, l) is an element from col_labels[l] to row_labels[k]. Products
    follow plain matrix algebra over the path category; no Koszul signs are
    inserted here (callers handle signs).
    """

    __slots__ = ("row_labels", "col_labels", "entries")

    def __init__(self, row_labels: Sequence[str], col_labels: Sequence[str],
                 entries: Sequence[Sequence[GradedElement]]):
        row_labels = tuple(row_labels)
        col_labels = tuple(col_labels)
        if len(entries) != len(row_labels):
            raise ValueError("row count mismatch")
        rows = []
        for k, row in enumerate(entries):
            if len(row) != len(col_labels):
                raise ValueError("column count mismatch")
            for l, e in enumerate(row):
                if e.source != col_labels[l] or e.target != row_labels[k]:
                    raise ValueError(
                        f"entry ({k},{l}) is {e.source}->{e.target}, "
                        f"expected {col_labels[l]}->{row_labels[k]}")
            rows.append(tuple(row))
        object.__setattr__(self, "row_labels", row_labels)
        object.__setattr__(self, "col_labels", col_labels)
        object.__setattr__(self, "entries", tuple(rows))

    def __setattr__(self, name, value):
        raise AttributeError("GradedMatrix is immutable")

    @classmethod
    def zeros(cls, row_labels: Sequence[str],
              col_labels: Sequence[str]) -> "GradedMatrix":
        return cls(row_labels, col_labels,
                   [[GradedElement.zero(c, r) for c in col_labels]
                    for r in row_labels])

    @classmethod
    def identity(cls, labels: Sequence[str]) -> "GradedMatrix":
        return cls(labels, labels,
                   [[GradedElement.from_path(identity_path(c)) if k == l
                     else GradedElement.zero(c, r)
                     for l, c in enumerate(labels)]
                    for k, r in enumerate(labels)])

    def __matmul__(self, other: "GradedMatrix") -> "GradedMatrix":
        if self.col_labels != other.row_labels:
            raise ValueError("label mismatch in matrix product")
        out = []
        for k, r in enumerate(self.row_labels):
            row = []
            for l, c in enumerate(other.col_labels):
                acc = GradedElement.zero(c, r)
                for m in range(len(self.col_labels)):
                    acc = acc + self.entries[k][m] * other.entries[m][l]
                row.append(acc)
            out.append(row)
        return GradedMatrix(self.row_labels, other.col_labels, out)

    def __add__(self, other: "GradedMatrix") -> "GradedMatrix":
        if (self.row_labels != other.row_labels
                or self.col_labels != other.col_labels):
            raise ValueError("label mismatch in matrix sum")
        return GradedMatrix(
            self.row_labels, self.col_labels,
            [[a + b for a, b in zip(ra, rb)]
             for ra, rb in zip(self.entries, other.entries)])

    def __neg__(self) -> "GradedMatrix":
        return GradedMatrix(self.row_labels, self.col_labels,
                            [[-e for e in row] for row in self.entries])

    def __sub__(self, other: "GradedMatrix") -> "GradedMatrix":
        return self + (-other)

    def map(self, fn) -> "GradedMatrix":
        return GradedMatrix(self.row_labels, self.col_labels,
                            [[fn(e) for e in row] for row in self.entries])

    def __eq__(self, other):
        return (isinstance(other, GradedMatrix)
                and self.row_labels == other.row_labels
                and self.col_labels == other.col_labels
                and self.entries == other.entries)

    def __str__(self):
        return "[" + "; ".join(
            ", ".join(str(e) for e in row) for row in self.entries) + "]"


def substitute_matrix(element: GradedElement,
                      images: Mapping[str, GradedMatrix],
                      vertex_labels: Mapping[str, Sequence[str]],
                      ) -> GradedMatrix:
    """Replace arrows by matrices; the empty path becomes an identity block.

    vertex_labels assigns each old vertex its tuple of new row/column labels.
    """
    rows = tuple(vertex_labels[element.target])
    cols = tuple(vertex_labels[element.source])
    out = GradedMatrix.zeros(rows, cols)
    for path, coeff in element.terms:
        if not path.arrows:
            acc = GradedMatrix.identity(cols)
        else:
            acc = None
            for arrow in path.arrows:
                m = images[arrow.id]
                acc = m if acc is None else acc @ m
        out = out + acc.map(lambda e: e.scale(coeff))
    return out
