#!/usr/bin/env python3
"""Survey the filled-region apparatus on small grids.

Enumerates every filled region with small boundary, tabulates counts per
(boundary length, type), checks the per-type area ceilings and the
boundary-indexed count ceilings, and prints the self-avoiding-polygon
census used by the refined series constant.
"""

import argparse
from collections import Counter

from gridsign.census import count_saps
from gridsign.graphs import build_grid
from gridsign.regions import enumerate_filled_regions

# area ceilings per type as a function of boundary length i
AREA_CEILING = {
    1: lambda i, n: (i * i) // 16,
    2: lambda i, n: (i * i) // 8,
    3: lambda i, n: (i * i) // 4,
    4: lambda i, n: n,  # four-sided regions can be macroscopic
    5: lambda i, n: n,  # complement of a small region
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=5)
    ap.add_argument("--cols", type=int, default=5)
    ap.add_argument("--max-boundary", type=int, default=12)
    ap.add_argument("--max-perimeter", type=int, default=12)
    args = ap.parse_args()

    g = build_grid(args.rows, args.cols)
    n = g.n_vertices
    groups = enumerate_filled_regions(g, args.max_boundary)
    tally: Counter = Counter()
    violations = 0
    for (blen, _), regions in groups.items():
        for fr in regions:
            tally[(blen, fr.region_type)] += 1
            ceiling = AREA_CEILING[fr.region_type](blen, n)
            if len(fr.vertices) > max(ceiling, 1) and fr.region_type <= 3:
                violations += 1
                print(f"AREA VIOLATION type {fr.region_type} boundary {blen} "
                      f"area {len(fr.vertices)}")

    print(f"{args.rows}x{args.cols} grid, boundary <= {args.max_boundary}")
    print("boundary  type  count")
    for (blen, rtype), cnt in sorted(tally.items()):
        print(f"{blen:8d}  {rtype:4d}  {cnt:5d}")
    odd_type1 = sum(c for (b, t), c in tally.items() if t == 1 and b % 2)
    print(f"type-1 regions at odd boundary: {odd_type1} (must be 0)")
    print(f"area ceiling violations: {violations}")

    census = count_saps(args.max_perimeter)
    print("\npolygon census (perimeter: count, area-weighted)")
    for per in census.perimeters():
        print(f"{per:4d}: {census.total(per):6d}  {census.area_weighted_total(per):7d}")


if __name__ == "__main__":
    main()
