"""Command line front end.

Subcommands operate on box files in the text format of the dsl module.
Exit codes: 0 success, 1 validation failure, 2 unsupported configuration,
3 budget exceeded.
"""

import argparse
import json
import sys
from typing import List, Optional

from .box import (BoxError, BTFailure, BTStructure, CycleWitness,
                  Triangulation, classify_quiver, find_triangulation,
                  recognize_bt, validate_box)
from .dsl import (DslError, chain_to_json, family_to_json, load_box,
                  print_box, save_box)
from .family import UnsupportedConfiguration, brick_family, evaluate_family
from .fields import PrimeField, RationalField
from .rep import (BudgetExceeded, IsoUndecidable, RepError, are_isomorphic,
                  enumerate_bricks)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # keep argparse from calling sys.exit so main can return an int
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _load(path: str):
    box = load_box(path)
    report = validate_box(box)
    if not report.ok:
        raise BoxError(f"{box.name} is not a valid box:\n{report}")
    return box


def _parse_dims(box, spec: str):
    parts = [p.strip() for p in spec.split(",")]
    if len(parts) != len(box.vertices):
        raise BoxError(
            f"--dim wants {len(box.vertices)} entries for vertices "
            f"{', '.join(box.vertices)}, got {len(parts)}")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise BoxError(f"--dim entries must be integers: {spec!r}")
    return dict(zip(box.vertices, values))


def _field_from_args(args):
    if getattr(args, "rational", False):
        return RationalField()
    if getattr(args, "field", None) is not None:
        return PrimeField(args.field)
    return RationalField()


def _write_box(box, path: str) -> None:
    report = validate_box(box)
    if not report.ok:
        raise BoxError(f"refusing to write invalid box {box.name}:\n{report}")
    save_box(path, box)


def _poly_str(coeffs) -> str:
    if not coeffs:
        return "0"
    bits = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        if k == 0:
            bits.append(str(c))
        else:
            t = "t" if k == 1 else f"t^{k}"
            bits.append(t if c == 1 else f"{c}*{t}")
    return " + ".join(bits) if bits else "0"


def _print_family_matrices(rep) -> None:
    for aid in sorted(rep.mats):
        rows = ["[" + ", ".join(_poly_str(poly) for poly in row) + "]"
                for row in rep.mats[aid]]
        print(f"  {aid}: [{'; '.join(rows)}]")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_validate(args) -> int:
    box = load_box(args.file)
    report = validate_box(box)
    if not report.ok:
        print(report)
        return 1
    print(f"{box.name}: ok ({len(box.vertices)} vertices, "
          f"{len(box.solid_ids())} solid, {len(box.dotted_ids())} dotted)")
    return 0


def _cmd_bt(args) -> int:
    box = _load(args.file)
    result = recognize_bt(box)
    if isinstance(result, BTFailure):
        print(f"{box.name}: not brick-tame: {result}")
        return 1
    assert isinstance(result, BTStructure)
    for v in box.vertices:
        print(f"loop {v}: {result.loops[v]}")
    for b in result.paired_solids():
        print(f"pair {b}: {result.pairing[b]}")
    return 0


def _cmd_triangulate(args) -> int:
    box = _load(args.file)
    mode = "full" if args.full else "solid"
    result = find_triangulation(box, mode)
    if isinstance(result, CycleWitness):
        print(f"{box.name}: no {mode} triangulation, cycle {result}")
        return 1
    assert isinstance(result, Triangulation)
    for aid in sorted(result.heights):
        print(f"h({aid}) = {result.heights[aid]}")
    return 0


def _cmd_classify(args) -> int:
    box = _load(args.file)
    edges = [(a.source, a.target)
             for a in (box.arrow(aid) for aid in box.solid_ids())]
    print(classify_quiver(box.vertices, edges))
    return 0


def _cmd_reduce(args) -> int:
    from .reduction import reduce_minimal_edge, regularize_all
    box = _load(args.file)
    out, step = reduce_minimal_edge(box, args.edge)
    steps = [step]
    if args.regularize_after:
        out, more = regularize_all(out)
        steps.extend(more)
    _write_box(out, args.out)
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            json.dump(chain_to_json(box, out, steps), fh, indent=2)
            fh.write("\n")
    print(f"{box.name} -> {out.name}: {len(steps)} step(s), wrote {args.out}")
    return 0


def _cmd_regularize(args) -> int:
    from .reduction import regularize
    box = _load(args.file)
    out, step = regularize(box, args.arrow)
    _write_box(out, args.out)
    print(f"{box.name} -> {out.name}: removed {step.solid} and {step.dotted}, "
          f"wrote {args.out}")
    return 0


def _cmd_eliminate_pair(args) -> int:
    from .reduction import eliminate_pair
    box = _load(args.file)
    out, steps = eliminate_pair(box, args.arrow)
    _write_box(out, args.out)
    print(f"{box.name} -> {out.name}: {len(steps)} step(s), wrote {args.out}")
    return 0


def _cmd_family(args) -> int:
    box = _load(args.file)
    dims = _parse_dims(box, args.dim)
    result = brick_family(box, dims, _field_from_args(args))
    if result:
        print(f"family at {args.dim} over {result.family.field.name}:")
        _print_family_matrices(result.family)
    else:
        print(f"empty at {args.dim}: {result.reason}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(family_to_json(result), fh, indent=2)
            fh.write("\n")
    return 0


def _cmd_oracle(args) -> int:
    box = _load(args.file)
    dims = _parse_dims(box, args.dim)
    kwargs = {}
    if args.budget is not None:
        kwargs["budget"] = args.budget
    classes = enumerate_bricks(box, dims, PrimeField(args.field), **kwargs)
    print(f"classes: {len(classes)}")
    return 0


def _cmd_crosscheck(args) -> int:
    box = _load(args.file)
    dims = _parse_dims(box, args.dim)
    field = PrimeField(args.field)
    result = brick_family(box, dims, field)
    evals = []
    if result:
        for x in field.elements():
            rep = evaluate_family(result, x)
            if not any(are_isomorphic(box, rep, other) for other in evals):
                evals.append(rep)
    kwargs = {}
    if args.budget is not None:
        kwargs["budget"] = args.budget
    classes = enumerate_bricks(box, dims, field, **kwargs)
    print(f"{len(evals)} = {len(classes)}")
    if len(evals) != len(classes):
        print("mismatch: family and enumeration disagree")
        return 1
    for cls in classes:
        if not any(are_isomorphic(box, cls, rep) for rep in evals):
            print("mismatch: an enumerated brick is not an evaluation")
            return 1
    return 0


def _cmd_from_algebra(args) -> int:
    from .algebra import build_coadjoint_box, load_algebra
    table = load_algebra(args.file)
    box = build_coadjoint_box(table)
    _write_box(box, args.out)
    print(f"{box.name}: {len(box.vertices)} vertices, "
          f"{len(box.solid_ids())} solid, {len(box.dotted_ids())} dotted, "
          f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="biquiver",
                     description="Differential biquiver toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a box file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("bt", help="recognize the loop/pairing structure")
    p.add_argument("file")
    p.set_defaults(func=_cmd_bt)

    p = sub.add_parser("triangulate", help="layer arrows by differential order")
    p.add_argument("file")
    p.add_argument("--full", action="store_true",
                   help="layer dotted arrows as well")
    p.set_defaults(func=_cmd_triangulate)

    p = sub.add_parser("classify", help="classify the solid quiver shape")
    p.add_argument("file")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("reduce", help="split a minimal solid edge")
    p.add_argument("file")
    p.add_argument("--edge", required=True)
    p.add_argument("--regularize-after", action="store_true",
                   help="run all regularizations on the result")
    p.add_argument("--out", required=True)
    p.add_argument("--log", help="write the step log as JSON")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("regularize", help="remove one regular solid arrow")
    p.add_argument("file")
    p.add_argument("--arrow", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_regularize)

    p = sub.add_parser("eliminate-pair",
                       help="remove a paired solid arrow with nonzero differential")
    p.add_argument("file")
    p.add_argument("--arrow", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eliminate_pair)

    p = sub.add_parser("family", help="compute the brick family at a dimension")
    p.add_argument("file")
    p.add_argument("--dim", required=True,
                   help="comma separated, in vertex order")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--field", type=int, help="prime order of the base field")
    g.add_argument("--rational", action="store_true",
                   help="work over the rationals (default)")
    p.add_argument("--out", help="write the family record as JSON")
    p.set_defaults(func=_cmd_family)

    p = sub.add_parser("oracle",
                       help="enumerate brick classes over a finite field")
    p.add_argument("file")
    p.add_argument("--dim", required=True)
    p.add_argument("--field", type=int, required=True)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("crosscheck",
                       help="compare family evaluations against enumeration")
    p.add_argument("file")
    p.add_argument("--dim", required=True)
    p.add_argument("--field", type=int, required=True)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=_cmd_crosscheck)

    p = sub.add_parser("from-algebra",
                       help="build the coadjoint box of an algebra table")
    p.add_argument("file", help="algebra table as JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_from_algebra)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except UnsupportedConfiguration as exc:
        print(f"unsupported configuration: {exc}", file=sys.stderr)
        return 2
    except (BudgetExceeded, IsoUndecidable) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (DslError, BoxError, RepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
