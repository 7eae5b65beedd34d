"""Temporal convergence on ex5.1 with h = 1/500, alpha = 1.5."""

import argparse

from fracwsgd.harness import emit_table, run_convergence

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--format", choices=["csv", "markdown"], default="markdown")
parser.add_argument("--out")
args = parser.parse_args()

table = run_convergence("ex5.1", "temporal", [1 / 10, 1 / 20, 1 / 40, 1 / 80], 1 / 500, alpha=1.5)
text = emit_table(table, args.format, args.out)
if args.out is None:
    print(text)
