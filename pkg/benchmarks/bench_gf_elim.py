"""Compare the compiled elimination kernel against the pure Python one.

The backend is chosen when biquiver.linalg is imported, so this script
spawns itself twice, once per backend, and prints a side-by-side table.

    python3 benchmarks/bench_gf_elim.py
    python3 benchmarks/bench_gf_elim.py --sizes 40,80,160 --hom-dim 8
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _time(fn, repeat):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def child_main(args) -> None:
    import random

    import numpy as np

    from biquiver import linalg
    from biquiver.fields import PrimeField
    from biquiver.rep import Representation, hom_space
    from biquiver.box import Box
    from biquiver.freecat import ArrowRef, GradedElement

    p = args.prime
    field = PrimeField(p)
    rng = np.random.default_rng(0)
    rows = {}
    results = {"backend": linalg.kernel_backend(), "rref": {}, "nullspace": {},
               "hom": {}}

    for n in args.sizes:
        a = rng.integers(0, p, size=(n, n), dtype=np.int64)
        rows[n] = tuple(tuple(int(x) for x in row) for row in a)
    for n in args.sizes:
        results["rref"][n] = _time(lambda: linalg.rref(field, rows[n]),
                                   args.repeat)
        results["nullspace"][n] = _time(
            lambda: linalg.nullspace(field, rows[n]), args.repeat)

    # a hom computation on the two-loop box; the constraint matrix it
    # eliminates is what the kernel spends its time on in real use
    v = ArrowRef("v", "1", "2", "dotted")
    b = ArrowRef("b", "2", "1", "solid")
    a1 = ArrowRef("a1", "1", "1", "solid")
    a2 = ArrowRef("a2", "2", "2", "solid")
    box = Box("bench", ["1", "2"], [a1, a2, b, v], {
        "a1": GradedElement.build("1", "1", [(1, [b, v])]),
        "a2": GradedElement.build("2", "2", [(-1, [v, b])]),
    })
    d = args.hom_dim
    pr = random.Random(1)

    def rand_rep():
        dims = {"1": d, "2": d}
        mats = {}
        for aid in ("a1", "a2", "b"):
            arrow = box.arrow(aid)
            mats[aid] = tuple(
                tuple(pr.randrange(p) for _ in range(dims[arrow.source]))
                for _ in range(dims[arrow.target]))
        return Representation(field, dims, mats)

    m, n_ = rand_rep(), rand_rep()
    results["hom"][d] = _time(lambda: hom_space(box, m, n_), args.repeat)
    print(json.dumps(results))


def run_backend(pure: bool, args) -> dict:
    env = dict(os.environ)
    env.pop("BIQUIVER_PURE", None)
    if pure:
        env["BIQUIVER_PURE"] = "1"
    cmd = [sys.executable, __file__, "--child",
           "--sizes", ",".join(str(n) for n in args.sizes),
           "--prime", str(args.prime), "--repeat", str(args.repeat),
           "--hom-dim", str(args.hom_dim)]
    out = subprocess.run(cmd, env=env, check=True, capture_output=True,
                         text=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="40,80,160")
    parser.add_argument("--prime", type=int, default=5)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--hom-dim", type=int, default=8)
    parser.add_argument("--child", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args()
    args.sizes = [int(s) for s in args.sizes.split(",")]

    if args.child:
        child_main(args)
        return 0

    fast = run_backend(False, args)
    slow = run_backend(True, args)
    if fast["backend"] == slow["backend"]:
        print(f"only the {fast['backend']} backend is available")

    print(f"prime p = {args.prime}, best of {args.repeat}")
    print(f"{'benchmark':<18} {fast['backend']:>12} {slow['backend']:>12} "
          f"{'speedup':>8}")
    for section in ("rref", "nullspace", "hom"):
        for key in fast[section]:
            tf, ts = fast[section][key], slow[section][key]
            label = f"{section} n={key}" if section != "hom" \
                else f"hom d=({key},{key})"
            ratio = ts / tf if tf > 0 else float("inf")
            print(f"{label:<18} {tf * 1e3:>10.2f}ms {ts * 1e3:>10.2f}ms "
                  f"{ratio:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
