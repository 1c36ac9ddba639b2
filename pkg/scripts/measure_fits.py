"""Measure compiled size and depth for every catalogue term.

Prints one line per term with sizes across widths, the tightest
constant for each candidate degree, and the depth column; used to pick
the frozen size fits in the catalogue.
"""

import time

from ldc.circuits import metrics
from ldc.compiler import compile_term
from ldc.stdlib import catalogue
from ldc.terms import arity

NS = [8, 16, 32, 64, 128, 256, 512]


def main() -> None:
    for name, entry in catalogue().items():
        r = arity(entry.term)
        sizes, depths, stages = [], [], []
        t0 = time.time()
        for n in NS:
            res = compile_term(entry.term, [n] * r)
            m = metrics(res.circuit)
            sizes.append(m.size)
            depths.append(m.depth)
            stages.append(res.stages)
        dt = time.time() - t0
        c1 = max(s / n for s, n in zip(sizes, NS))
        c2 = max(s / n**2 for s, n in zip(sizes, NS))
        dflat = "FLAT" if len(set(depths)) == 1 else "VARIES"
        print(f"{name}: sizes={sizes}")
        print(
            f"  c1={c1:.2f} c2={c2:.3f} depths={depths} [{dflat}]"
            f" stages={stages} frozen=({entry.size_c},{entry.size_deg}) {dt:.1f}s",
            flush=True,
        )


if __name__ == "__main__":
    main()
