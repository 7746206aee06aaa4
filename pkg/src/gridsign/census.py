"""Census of simple cycles in the infinite square lattice, counted up to
translation by perimeter and enclosed area.

The enumerator walks self-avoiding loops anchored at their lexicographically
smallest vertex: from the anchor the loop must step to (0, 1) and return
through (1, 0), so every translation class is generated exactly once in one
orientation. Enclosed area comes from the shoelace sum of the walk.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .errors import CapacityError

SAP_PERIMETER_CAP = 16

CENSUS_CSV_HEADER = ("perimeter", "area", "count")


@dataclass(frozen=True)
class CycleCensus:
    """Counts of translation-distinct simple lattice cycles.

    counts maps (perimeter, area) to the number of cycles; perimeters are
    even and at least 4, and area never exceeds perimeter^2 / 16.
    """

    max_perimeter: int
    counts: dict[tuple[int, int], int]

    def __post_init__(self):
        for (per, area), c in self.counts.items():
            if per % 2 or per < 4 or per > self.max_perimeter:
                raise ValueError(f"invalid perimeter {per}")
            if not (1 <= area <= per * per / 16):
                raise ValueError(f"area {area} out of range for perimeter {per}")
            if c < 1:
                raise ValueError("counts must be positive")

    def count(self, perimeter: int, area: int) -> int:
        return self.counts.get((perimeter, area), 0)

    def total(self, perimeter: int) -> int:
        return sum(c for (per, _), c in self.counts.items() if per == perimeter)

    def area_weighted_total(self, perimeter: int) -> int:
        """Sum of area * count over all cycles of the given perimeter."""
        return sum(a * c for (per, a), c in self.counts.items() if per == perimeter)

    def perimeters(self) -> list[int]:
        return sorted({per for per, _ in self.counts})


def count_saps(max_perimeter: int, *, perimeter_cap: int = SAP_PERIMETER_CAP) -> CycleCensus:
    """Enumerate all simple lattice cycles with perimeter <= max_perimeter."""
    if max_perimeter < 0 or max_perimeter % 2:
        raise ValueError(f"max_perimeter must be even and non-negative, got {max_perimeter}")
    if max_perimeter > perimeter_cap:
        raise CapacityError(f"max_perimeter {max_perimeter} exceeds cap {perimeter_cap}")
    counts: dict[tuple[int, int], int] = {}
    if max_perimeter < 4:
        return CycleCensus(max_perimeter, counts)

    # Walk state: current vertex, visited set, edge count, shoelace sum.
    # Every non-anchor vertex must be lexicographically greater than (0, 0);
    # reaching (1, 0) closes the loop (no continuation can ever close).
    visited = {(0, 0), (0, 1)}

    def step(x, y, edges, shoelace):
        for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nx == 1 and ny == 0:
                per = edges + 2
                if per >= 4:
                    area2 = shoelace + (x * ny - nx * y)
                    counts[(per, abs(area2) // 2)] = counts.get((per, abs(area2) // 2), 0) + 1
                continue
            if nx < 0 or (nx == 0 and ny <= 0) or (nx, ny) in visited:
                continue
            if edges + 1 + abs(nx) + abs(ny) > max_perimeter:
                continue
            visited.add((nx, ny))
            step(nx, ny, edges + 1, shoelace + (x * ny - nx * y))
            visited.discard((nx, ny))

    step(0, 1, 1, 0)
    return CycleCensus(max_perimeter, counts)


def write_census(census: CycleCensus, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CENSUS_CSV_HEADER)
        for (per, area) in sorted(census.counts):
            writer.writerow([per, area, census.counts[(per, area)]])


def read_census(path: str) -> CycleCensus:
    counts: dict[tuple[int, int], int] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CENSUS_CSV_HEADER:
            raise ValueError(f"unexpected census header: {header!r}")
        for row in reader:
            per, area, c = (int(x) for x in row)
            key = (per, area)
            if key in counts:
                raise ValueError(f"duplicate census row {key}")
            counts[key] = c
    max_per = max((per for per, _ in counts), default=0)
    return CycleCensus(max_per, counts)
