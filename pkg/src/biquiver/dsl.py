"""Plain-text and JSON formats for boxes, chains, and families.

The text format::

    box two_loop {
      vertices 1, 2;
      solid a1: 1 -> 1;
      solid a2: 2 -> 2;
      solid b: 2 -> 1;
      dotted v: 1 ..> 2;
      d(a1) = b*v;
      d(a2) = -v*b;
    }

Words multiply left to right with the rightmost arrow acting first, so
``b*v`` is the path that applies v and then b.  Coefficients are rationals
(``3/2*a``); a coefficient of 1 is omitted.  Unlisted differentials are
zero, and ``d(x) = 0;`` is accepted but never printed.  ``#`` starts a
comment that runs to the end of the line.

print_box emits a canonical form: the vertex line first, then solid arrows
sorted by id, then dotted arrows sorted by id, then nonzero differentials
sorted by arrow id with terms in path order.  parse_box(print_box(b))
rebuilds b exactly, and printing a canonically formatted text reproduces it
character for character.

The JSON side serializes boxes, reduction chains (which replay_chain can
re-run step by step), and brick families.
"""

import re
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .box import Box, BoxError, change_generators, delete_vertex
from .fields import PrimeField, RationalField, PolyRing
from .freecat import ArrowRef, GradedElement


class DslError(Exception):
    """Parse or print failure, carrying a 1-based text position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# tokenizer

class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind    # "word" | "punct" | "end"
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind!r}, {self.text!r}, {self.line}, {self.col})"


_WORD = re.compile(r"[A-Za-z0-9_]+")
_PUNCT = ("..>", "->", "{", "}", "(", ")", ":", ";", ",", "=", "+", "-", "*", "/")


def _tokenize(text: str) -> List[Token]:
    toks: List[Token] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            col += 1
            i += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = _WORD.match(text, i)
        if m:
            toks.append(Token("word", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(Token("punct", p, line, col))
                col += len(p)
                i += len(p)
                break
        else:
            raise DslError(f"unexpected character {c!r}", line, col)
    toks.append(Token("end", "", line, col))
    return toks


class _Cursor:
    def __init__(self, toks: List[Token]):
        self.toks = toks
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        j = min(self.i + ahead, len(self.toks) - 1)
        return self.toks[j]

    def next(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "end":
            self.i += 1
        return tok

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text

    def expect_punct(self, text: str) -> Token:
        tok = self.next()
        if tok.kind != "punct" or tok.text != text:
            raise DslError(f"expected {text!r}, got {self._show(tok)}",
                           tok.line, tok.col)
        return tok

    def expect_word(self, what: str = "identifier") -> Token:
        tok = self.next()
        if tok.kind != "word":
            raise DslError(f"expected {what}, got {self._show(tok)}",
                           tok.line, tok.col)
        return tok

    @staticmethod
    def _show(tok: Token) -> str:
        return "end of input" if tok.kind == "end" else repr(tok.text)


# ---------------------------------------------------------------------------
# parsing

# (coefficient, [(arrow id, token), ...]) pairs; ids are resolved after the
# whole file is read so differentials may precede the arrow declarations.
_RawTerm = Tuple[Fraction, List[Tuple[str, Token]]]


def _parse_term(cur: _Cursor, sign: int) -> _RawTerm:
    coeff = Fraction(1)
    tok = cur.peek()
    if tok.kind == "word" and tok.text.isdigit():
        nxt = cur.peek(1)
        if nxt.kind == "punct" and nxt.text == "/":
            cur.next()
            cur.next()
            den = cur.expect_word("integer denominator")
            if not den.text.isdigit():
                raise DslError(f"expected integer denominator, got {den.text!r}",
                               den.line, den.col)
            if int(den.text) == 0:
                raise DslError("zero denominator", den.line, den.col)
            coeff = Fraction(int(tok.text), int(den.text))
            cur.expect_punct("*")
        elif nxt.kind == "punct" and nxt.text == "*":
            # an all-digit word followed by '*' reads as a coefficient;
            # print_box refuses all-digit arrow ids so this is unambiguous
            cur.next()
            cur.next()
            coeff = Fraction(int(tok.text))
    factors: List[Tuple[str, Token]] = []
    w = cur.expect_word("arrow id")
    factors.append((w.text, w))
    while cur.at_punct("*"):
        cur.next()
        w = cur.expect_word("arrow id")
        factors.append((w.text, w))
    return (sign * coeff, factors)


def _parse_expr(cur: _Cursor) -> List[_RawTerm]:
    tok = cur.peek()
    if tok.kind == "word" and tok.text == "0":
        nxt = cur.peek(1)
        if nxt.kind == "punct" and nxt.text == ";":
            cur.next()
            return []
    terms: List[_RawTerm] = []
    sign = 1
    if cur.at_punct("-"):
        cur.next()
        sign = -1
    while True:
        terms.append(_parse_term(cur, sign))
        if cur.at_punct("+"):
            cur.next()
            sign = 1
        elif cur.at_punct("-"):
            cur.next()
            sign = -1
        else:
            return terms


def parse_box(text: str) -> Box:
    """Parse the text form of a box.  Raises DslError with position info."""
    cur = _Cursor(_tokenize(text))
    head = cur.expect_word("'box'")
    if head.text != "box":
        raise DslError(f"expected 'box', got {head.text!r}", head.line, head.col)
    name_tok = cur.expect_word("box name")
    cur.expect_punct("{")

    vertices: List[str] = []
    seen_vertices: set = set()
    arrows: List[ArrowRef] = []
    by_id: Dict[str, ArrowRef] = {}
    raw_diffs: List[Tuple[Token, List[_RawTerm]]] = []

    while True:
        tok = cur.peek()
        if tok.kind == "punct" and tok.text == "}":
            cur.next()
            break
        if tok.kind == "end":
            raise DslError("unexpected end of input, expected declaration or '}'",
                           tok.line, tok.col)
        head = cur.expect_word("declaration")
        if head.text == "vertices":
            while True:
                v = cur.expect_word("vertex name")
                if v.text in seen_vertices:
                    raise DslError(f"duplicate vertex {v.text!r}", v.line, v.col)
                seen_vertices.add(v.text)
                vertices.append(v.text)
                tok = cur.next()
                if tok.kind == "punct" and tok.text == ",":
                    continue
                if tok.kind == "punct" and tok.text == ";":
                    break
                raise DslError(f"expected ',' or ';', got {_Cursor._show(tok)}",
                               tok.line, tok.col)
        elif head.text in ("solid", "dotted"):
            idt = cur.expect_word("arrow id")
            if idt.text in by_id:
                raise DslError(f"duplicate arrow id {idt.text!r}",
                               idt.line, idt.col)
            cur.expect_punct(":")
            src = cur.expect_word("vertex name")
            conn = cur.next()
            want = "->" if head.text == "solid" else "..>"
            if conn.kind != "punct" or conn.text not in ("->", "..>"):
                raise DslError(f"expected {want!r}, got {_Cursor._show(conn)}",
                               conn.line, conn.col)
            if conn.text != want:
                raise DslError(f"{head.text} arrows use {want!r}",
                               conn.line, conn.col)
            tgt = cur.expect_word("vertex name")
            cur.expect_punct(";")
            ref = ArrowRef(idt.text, src.text, tgt.text, head.text)
            by_id[idt.text] = ref
            arrows.append(ref)
        elif head.text == "d":
            cur.expect_punct("(")
            aidt = cur.expect_word("arrow id")
            cur.expect_punct(")")
            cur.expect_punct("=")
            terms = _parse_expr(cur)
            cur.expect_punct(";")
            raw_diffs.append((aidt, terms))
        else:
            raise DslError(
                f"expected 'vertices', 'solid', 'dotted' or 'd', got {head.text!r}",
                head.line, head.col)

    tok = cur.peek()
    if tok.kind != "end":
        raise DslError(f"trailing input after '}}': {_Cursor._show(tok)}",
                       tok.line, tok.col)

    diffs: Dict[str, GradedElement] = {}
    for aidt, terms in raw_diffs:
        if aidt.text not in by_id:
            raise DslError(f"differential for undeclared arrow {aidt.text!r}",
                           aidt.line, aidt.col)
        if aidt.text in diffs:
            raise DslError(f"duplicate differential for {aidt.text!r}",
                           aidt.line, aidt.col)
        owner = by_id[aidt.text]
        built = []
        for coeff, factors in terms:
            refs = []
            for w, wtok in factors:
                if w not in by_id:
                    raise DslError(f"unknown arrow {w!r}", wtok.line, wtok.col)
                refs.append(by_id[w])
            built.append((coeff, refs))
        try:
            diffs[aidt.text] = GradedElement.build(owner.source, owner.target,
                                                   built)
        except ValueError as exc:
            raise DslError(f"in d({aidt.text}): {exc}", aidt.line, aidt.col)
    return Box(name_tok.text, vertices, arrows, diffs)


# ---------------------------------------------------------------------------
# printing

_IDENT = re.compile(r"[A-Za-z0-9_]+\Z")
_RESERVED = ("box", "vertices", "solid", "dotted", "d")


def _check_arrow_id(aid: str) -> str:
    if not _IDENT.match(aid):
        raise BoxError(f"arrow id {aid!r} cannot be written in box text")
    if aid.isdigit():
        raise BoxError(f"all-digit arrow id {aid!r} would read as a coefficient")
    if aid in _RESERVED:
        raise BoxError(f"arrow id {aid!r} is a reserved word")
    return aid


def _format_element(e: GradedElement) -> str:
    bits: List[str] = []
    for path, coeff in e.terms:
        if not path.arrows:
            raise BoxError("identity terms have no text form")
        word = "*".join(a.id for a in path.arrows)
        mag = abs(coeff)
        body = word if mag == 1 else f"{mag}*{word}"
        if not bits:
            bits.append(("-" if coeff < 0 else "") + body)
        else:
            bits.append((" - " if coeff < 0 else " + ") + body)
    return "".join(bits)


def print_box(box: Box) -> str:
    """Render a box in canonical text form."""
    name = re.sub(r"[^A-Za-z0-9_]", "_", box.name) or "unnamed"
    for v in box.vertices:
        if not _IDENT.match(v):
            raise BoxError(f"vertex name {v!r} cannot be written in box text")
    lines = [f"box {name} {{"]
    if box.vertices:
        lines.append("  vertices " + ", ".join(box.vertices) + ";")
    for aid in sorted(box.solid_ids()):
        a = box.arrow(aid)
        lines.append(f"  solid {_check_arrow_id(aid)}: {a.source} -> {a.target};")
    for aid in sorted(box.dotted_ids()):
        a = box.arrow(aid)
        lines.append(f"  dotted {_check_arrow_id(aid)}: {a.source} ..> {a.target};")
    for aid in sorted(box.arrows):
        e = box.diff[aid]
        if not e.is_zero():
            lines.append(f"  d({aid}) = {_format_element(e)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_box(path: str) -> Box:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_box(fh.read())


def save_box(path: str, box: Box) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(print_box(box))


# ---------------------------------------------------------------------------
# JSON: boxes

def element_to_json(e: GradedElement) -> list:
    return [[str(c), list(p.word())] for p, c in e.terms]


def _element_from_json(arrows: Dict[str, ArrowRef], source: str, target: str,
                       data: Sequence) -> GradedElement:
    terms = []
    for coeff_s, word in data:
        refs = []
        for w in word:
            if w not in arrows:
                raise BoxError(f"element references unknown arrow {w!r}")
            refs.append(arrows[w])
        terms.append((Fraction(str(coeff_s)), refs))
    return GradedElement.build(source, target, terms)


def box_to_json(box: Box) -> dict:
    solid = [[aid, box.arrow(aid).source, box.arrow(aid).target]
             for aid in sorted(box.solid_ids())]
    dotted = [[aid, box.arrow(aid).source, box.arrow(aid).target]
              for aid in sorted(box.dotted_ids())]
    diffs = {aid: element_to_json(box.diff[aid])
             for aid in sorted(box.arrows) if not box.diff[aid].is_zero()}
    return {"name": box.name, "vertices": list(box.vertices),
            "solid": solid, "dotted": dotted, "differentials": diffs}


def box_from_json(data: dict) -> Box:
    required = {"name", "vertices", "solid", "dotted", "differentials"}
    if not isinstance(data, dict):
        raise BoxError("box record must be an object")
    missing = required - set(data)
    if missing:
        raise BoxError(f"box record is missing {sorted(missing)}")
    extra = set(data) - required
    if extra:
        raise BoxError(f"box record has unknown keys {sorted(extra)}")
    arrows: List[ArrowRef] = []
    by_id: Dict[str, ArrowRef] = {}
    for kind, rows in (("solid", data["solid"]), ("dotted", data["dotted"])):
        for row in rows:
            if not isinstance(row, (list, tuple)) or len(row) != 3:
                raise BoxError(f"{kind} arrow rows are [id, source, target]")
            aid, src, tgt = (str(x) for x in row)
            if aid in by_id:
                raise BoxError(f"duplicate arrow id {aid!r}")
            ref = ArrowRef(aid, src, tgt, kind)
            by_id[aid] = ref
            arrows.append(ref)
    diffs: Dict[str, GradedElement] = {}
    for aid, val in data["differentials"].items():
        if aid not in by_id:
            raise BoxError(f"differential for unknown arrow {aid!r}")
        owner = by_id[aid]
        diffs[aid] = _element_from_json(by_id, owner.source, owner.target, val)
    return Box(str(data["name"]), [str(v) for v in data["vertices"]],
               arrows, diffs)


# ---------------------------------------------------------------------------
# JSON: reduction chains

def step_to_json(step) -> dict:
    from .reduction import (GeneratorChangeStep, MinimalEdgeStep,
                            RegularizationStep, VertexDeletionStep)
    if isinstance(step, MinimalEdgeStep):
        return {"kind": "minimal-edge", "edge": step.edge}
    if isinstance(step, RegularizationStep):
        return {"kind": "regularization", "solid": step.solid,
                "dotted": step.dotted}
    if isinstance(step, GeneratorChangeStep):
        sub = {aid: element_to_json(e)
               for aid, e in sorted(step.change.phi.items())}
        return {"kind": "generator-change", "substitution": sub}
    if isinstance(step, VertexDeletionStep):
        return {"kind": "vertex-deletion", "vertex": step.vertex}
    raise BoxError(f"cannot serialize step {type(step).__name__}")


def chain_to_json(source: Box, target: Box, steps: Sequence) -> dict:
    return {"source": box_to_json(source), "target": box_to_json(target),
            "steps": [step_to_json(s) for s in steps]}


def replay_chain(data: dict) -> Box:
    """Re-run a logged chain from its source box; returns the final box.

    Deterministic steps are re-executed from their parameters, so the result
    matches the logged target exactly when the log is intact."""
    from .reduction import reduce_minimal_edge, regularize
    box = box_from_json(data["source"])
    for rec in data["steps"]:
        kind = rec.get("kind")
        if kind == "minimal-edge":
            box = reduce_minimal_edge(box, rec["edge"])[0]
        elif kind == "regularization":
            box, step = regularize(box, rec["solid"])
            if step.dotted != rec["dotted"]:
                raise BoxError(
                    f"regularizing {rec['solid']} removed {step.dotted}, "
                    f"log says {rec['dotted']}")
        elif kind == "generator-change":
            phi = {}
            for aid, val in rec["substitution"].items():
                a = box.arrow(aid)
                phi[aid] = _element_from_json(box.arrows, a.source, a.target,
                                              val)
            box = change_generators(box, phi)[0]
        elif kind == "vertex-deletion":
            box = delete_vertex(box, rec["vertex"])
        else:
            raise BoxError(f"unknown step kind {kind!r}")
    return box


# ---------------------------------------------------------------------------
# JSON: fields and families

def field_to_json(field) -> dict:
    if isinstance(field, PrimeField):
        return {"kind": "prime", "p": field.p}
    if isinstance(field, RationalField):
        return {"kind": "rational"}
    raise BoxError(f"cannot serialize field {field!r}")


def field_from_json(data: dict):
    kind = data.get("kind")
    if kind == "prime":
        return PrimeField(int(data["p"]))
    if kind == "rational":
        return RationalField()
    raise BoxError(f"unknown field kind {kind!r}")


def family_to_json(result) -> dict:
    """Serialize a FamilyResult, including the parametric matrices if any."""
    data: dict = {
        "status": result.status,
        "box": result.box.name,
        "dims": {v: result.dims[v] for v in sorted(result.dims)},
        "trace": [[name, {v: d[v] for v in sorted(d)}, n]
                  for name, d, n in result.trace],
        "steps": [step_to_json(s) for s in result.chain],
    }
    if result.reason is not None:
        data["reason"] = result.reason
    if result.family is not None:
        rep = result.family
        ring = rep.field
        if not isinstance(ring, PolyRing):
            raise BoxError("family matrices live over a polynomial ring")
        mats = {}
        for aid in sorted(rep.mats):
            mats[aid] = [[[str(c) for c in poly] for poly in row]
                         for row in rep.mats[aid]]
        data["family"] = {
            "base_field": field_to_json(ring.base),
            "dims": {v: rep.dims[v] for v in sorted(rep.dims)},
            "matrices": mats,
        }
    return data
