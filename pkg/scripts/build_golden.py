#!/usr/bin/env python3
"""
Build golden files for the regression tests.

Outputs:
- tests/golden/kernel_origin_n{N}.txt: exact comb kernel from the origin,
  one `x y prob` line per reachable vertex, sorted by (x, y)
- tests/golden/csv_header.txt: schema line and column header of result CSVs

Kernel entries come from the rational program, so every value is an exact
dyadic fraction and the files do not depend on floating point rounding.

Usage:
    python scripts/build_golden.py [--force] [--steps 2 3]
"""

import argparse
import sys
from pathlib import Path

# Paths
SCRIPT_DIR = Path(__file__).parent
PROJECT_ROOT = SCRIPT_DIR.parent
sys.path.insert(0, str(PROJECT_ROOT))

from app.kernel import EXACT_MAX_STEPS, comb_kernel_dp_exact, write_golden  # noqa: E402
from app.settings import CSV_COLUMNS, CSV_SCHEMA_VERSION, GOLDEN_DIR  # noqa: E402
from app.walks import CombVertex  # noqa: E402

DEFAULT_STEPS = (2, 3)
CSV_HEADER_FILE = GOLDEN_DIR / "csv_header.txt"


def kernel_file(n: int) -> Path:
    return GOLDEN_DIR / f"kernel_origin_n{n}.txt"


def check_outputs_exist(steps: list[int]) -> list[Path]:
    """Check which output files already exist."""
    outputs = [kernel_file(n) for n in steps] + [CSV_HEADER_FILE]
    return [f for f in outputs if f.exists()]


def build_kernel(n: int) -> Path:
    exact = comb_kernel_dp_exact(CombVertex(0, 0), n)
    total = sum(exact.values())
    if total != 1:
        raise RuntimeError(f"kernel for n={n} has mass {total}")
    path = kernel_file(n)
    write_golden({v: float(p) for v, p in exact.items()}, path)
    print(f"Wrote {len(exact)} entries to {path}")
    return path


def build_csv_header() -> Path:
    CSV_HEADER_FILE.parent.mkdir(parents=True, exist_ok=True)
    with open(CSV_HEADER_FILE, "w", encoding="utf-8") as f:
        f.write(f"# schema_version={CSV_SCHEMA_VERSION}\n")
        f.write(",".join(CSV_COLUMNS) + "\n")
    print(f"Wrote CSV header to {CSV_HEADER_FILE}")
    return CSV_HEADER_FILE


def main():
    parser = argparse.ArgumentParser(
        description="Build golden files for the regression tests"
    )
    parser.add_argument(
        "--force",
        action="store_true",
        help="Overwrite existing output files",
    )
    parser.add_argument(
        "--steps",
        type=int,
        nargs="+",
        default=list(DEFAULT_STEPS),
        help="Step counts for origin kernel tables (default: 2 3)",
    )
    args = parser.parse_args()

    too_long = [n for n in args.steps if not 0 <= n <= EXACT_MAX_STEPS]
    if too_long:
        print(f"Error: step counts must lie in [0, {EXACT_MAX_STEPS}], got {too_long}")
        sys.exit(1)

    # Check for existing outputs
    existing = check_outputs_exist(args.steps)
    if existing and not args.force:
        print("Error: Output files already exist:")
        for f in existing:
            print(f"  - {f}")
        print("\nUse --force to overwrite.")
        sys.exit(1)

    written = [build_kernel(n) for n in args.steps]
    written.append(build_csv_header())

    print("\n✓ Golden files complete!")
    for path in written:
        print(f"  - {path}")


if __name__ == "__main__":
    main()
