"""Spatial convergence on ex5.1 at tau = 1/1000 for alpha in {1.03, 1.1, 1.5}.

Prints the side-by-side markdown table; ``--write`` refreshes the golden
file under docs/expected, ``--check`` diffs against it.
"""

import argparse
import difflib
import sys
from pathlib import Path

from fracwsgd.harness import combined_markdown, run_convergence

GOLDEN = Path(__file__).resolve().parents[1] / "docs" / "expected" / "table1.md"
STEPS = [1 / 32, 1 / 64, 1 / 128, 1 / 256]


def build() -> str:
    tables = [run_convergence("ex5.1", "spatial", STEPS, 1 / 1000, alpha=a) for a in (1.03, 1.1, 1.5)]
    return combined_markdown(tables)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--write", action="store_true")
    group.add_argument("--check", action="store_true")
    args = parser.parse_args()
    text = build()
    if args.write:
        GOLDEN.parent.mkdir(parents=True, exist_ok=True)
        GOLDEN.write_text(text)
        print(f"wrote {GOLDEN}")
        return 0
    if args.check:
        diff = list(difflib.unified_diff(GOLDEN.read_text().splitlines(), text.splitlines(), "golden", "run", lineterm=""))
        print("\n".join(diff) or "identical")
        return 1 if diff else 0
    print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
