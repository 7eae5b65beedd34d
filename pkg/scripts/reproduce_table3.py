"""ADI spatial convergence on ex5.3 at tau = 1/1000.

h is the true mesh width on [0, 2], so h = 1/32 uses 64 intervals per
direction. ``--with-256`` adds the h = 1/256 row (512 intervals, minutes).
``--half-grid`` additionally runs the ladder with half the intervals
(h = 1/16 .. 1/128) for comparison with the printed errors.
"""

import argparse

from fracwsgd.harness import emit_table, run_convergence

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--with-256", action="store_true", dest="with_256")
parser.add_argument("--half-grid", action="store_true")
args = parser.parse_args()

steps = [1 / 32, 1 / 64, 1 / 128] + ([1 / 256] if args.with_256 else [])
ladders = [("true spacing", steps)]
if args.half_grid:
    ladders.append(("half the intervals", [2 * h for h in steps]))
for name, ladder in ladders:
    for alpha, beta in ((1.22, 1.31), (1.3, 1.5)):
        table = run_convergence("ex5.3", "spatial", ladder, 1 / 1000, alpha=alpha, beta=beta)
        print(f"## {name}, (alpha, beta) = ({alpha}, {beta})")
        print(emit_table(table, "markdown"))
