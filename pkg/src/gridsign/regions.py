"""Connected grid regions: side-touching classification, fill-in, and
exhaustive enumeration of filled regions by boundary size.

Type classes by which perimeter sides a connected set touches (a corner
vertex touches both of its sides):

  1: no side; 2: one side; 3: two adjacent sides; 4: two opposite sides;
  5: three sides; 6: all four sides.

The fill-in of a connected, not-type-6 set s absorbs every component of the
complement except one retained component touching at least three sides. The
family of all filled sets coincides with the sets F whose induced subgraph
and complement subgraph are both connected and whose type is not 6; their
boundaries are exactly the simple cycles of the grid's dual graph, which is
what the enumerator walks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapacityError
from .graphs import DualGraph, GridGraph, boundary, connected_components

ENUM_BOUNDARY_CAP = 14
ENUM_GRID_CAP = 8

TOP, BOTTOM, LEFT, RIGHT = 1, 2, 4, 8


def _vertex_sides(g: GridGraph, v: int) -> int:
    r, c = g.coords(v)
    s = 0
    if r == 0:
        s |= TOP
    if r == g.rows - 1:
        s |= BOTTOM
    if c == 0:
        s |= LEFT
    if c == g.cols - 1:
        s |= RIGHT
    return s


def sides_touched(g: GridGraph, s) -> int:
    mask = 0
    for v in s:
        mask |= _vertex_sides(g, v)
    return mask


def _type_of_mask(mask: int) -> int:
    n = bin(mask).count("1")
    if n == 0:
        return 1
    if n == 1:
        return 2
    if n == 2:
        # opposite pairs: top+bottom or left+right
        if mask in (TOP | BOTTOM, LEFT | RIGHT):
            return 4
        return 3
    if n == 3:
        return 5
    return 6


def classify_region(g: GridGraph, s) -> int:
    """Type class 1-6 of a non-empty connected vertex set."""
    sset = frozenset(s)
    if not sset:
        raise ValueError("empty region")
    for v in sset:
        if not (0 <= v < g.n_vertices):
            raise ValueError(f"vertex {v} out of range")
    comps = connected_components(g, sset)
    if len(comps) != 1:
        raise ValueError("region must be connected")
    return _type_of_mask(sides_touched(g, sset))


@dataclass(frozen=True)
class RegionSet:
    """A connected vertex set with its boundary and type class."""

    vertices: frozenset[int]
    boundary: frozenset[tuple[int, int]]
    region_type: int
    connected: bool = True


def region_set(g: GridGraph, s) -> RegionSet:
    t = classify_region(g, s)  # validates connectivity and range
    return RegionSet(frozenset(s), boundary(g, s), t)


@dataclass(frozen=True)
class FilledRegion:
    """A filled set F together with the set it was filled from."""

    origin: RegionSet
    vertices: frozenset[int]
    boundary: frozenset[tuple[int, int]]
    region_type: int


def fill_in(g: GridGraph, s) -> FilledRegion:
    """Absorb all complement components except one retained component that
    touches at least three sides.

    When two qualify (possible only for type-4 sets), the one containing the
    smallest vertex id is retained. The result is connected, has a connected
    complement, never has type 6, and its boundary is a subset of the
    original boundary.
    """
    origin = region_set(g, s)
    if origin.region_type == 6:
        raise ValueError("type-6 regions have no fill-in")
    complement = set(range(g.n_vertices)) - origin.vertices
    comps = connected_components(g, complement)
    three_sided = [c for c in comps
                   if bin(sides_touched(g, c)).count("1") >= 3]
    if not three_sided:
        raise AssertionError("not-type-6 region lacks a three-sided complement component")
    keep = min(three_sided, key=min)
    filled = set(origin.vertices)
    for c in comps:
        if c is not keep:
            filled |= c
    fb = boundary(g, filled)
    ft = _type_of_mask(sides_touched(g, filled))
    assert ft != 6 and fb <= origin.boundary
    return FilledRegion(origin, frozenset(filled), fb, ft)


# ---------------------------------------------------------------------------
# enumeration of all filled regions with small boundary


def _cell_adjacency(rows: int, cols: int):
    """Adjacency of the (rows-1)x(cols-1) cell grid; each cell-cell edge is
    tagged with the primal edge it crosses."""
    cr, cc = rows - 1, cols - 1
    adj = [[] for _ in range(cr * cc)]

    def vid(r, c):
        return r * cols + c

    for i in range(cr):
        for j in range(cc):
            a = i * cc + j
            if j + 1 < cc:  # right neighbor crosses vertical primal edge (i, j+1)-(i+1, j+1)
                b = i * cc + j + 1
                e = (vid(i, j + 1), vid(i + 1, j + 1))
                adj[a].append((b, e))
                adj[b].append((a, e))
            if i + 1 < cr:  # down neighbor crosses horizontal primal edge (i+1, j)-(i+1, j+1)
                b = (i + 1) * cc + j
                e = (vid(i + 1, j), vid(i + 1, j + 1))
                adj[a].append((b, e))
                adj[b].append((a, e))
    return adj


def _perimeter_edges_of_cell(g: GridGraph, i: int, j: int):
    """Primal perimeter edges on the border of cell (i, j), i.e. dual edges
    joining the cell to z."""
    out = []
    if i == 0:
        out.append((g.vertex(0, j), g.vertex(0, j + 1)))
    if i == g.rows - 2:
        out.append((g.vertex(g.rows - 1, j), g.vertex(g.rows - 1, j + 1)))
    if j == 0:
        out.append((g.vertex(i, 0), g.vertex(i + 1, 0)))
    if j == g.cols - 2:
        out.append((g.vertex(i, g.cols - 1), g.vertex(i + 1, g.cols - 1)))
    return out


def _cuts_from_interior_cycles(g: GridGraph, max_boundary: int):
    """Simple cycles in the cell grid (z not used): each is the boundary of a
    type-1 region. Cycles are enumerated once via the minimum-cell anchor."""
    adj = _cell_adjacency(g.rows, g.cols)
    n_cells = len(adj)
    cuts = []
    path_edges = []

    def extend(start, current, visited, first_step):
        for nxt, e in adj[current]:
            if nxt == start and len(path_edges) >= 2:
                # close; dedupe orientation: second vertex < last vertex
                if first_step < current:
                    cuts.append(frozenset(path_edges) | {e})
                continue
            if nxt <= start or nxt in visited:
                continue
            if len(path_edges) + 1 >= max_boundary:
                continue
            visited.add(nxt)
            path_edges.append(e)
            extend(start, nxt, visited, nxt if first_step is None else first_step)
            path_edges.pop()
            visited.discard(nxt)

    for start in range(n_cells):
        for nxt, e in adj[start]:
            if nxt <= start:
                continue
            path_edges.append(e)
            extend(start, nxt, {start, nxt}, nxt)
            path_edges.pop()
    # the anchored DFS above visits each cycle once per (first-step) branch;
    # orientation dedupe leaves exactly one copy, but different first steps
    # can rebuild the same edge set, so dedupe defensively
    return set(cuts)


def _cuts_through_outer_vertex(g: GridGraph, max_boundary: int):
    """Simple dual cycles through z: a z-edge, a simple path in the cell
    grid, and a distinct z-edge back. Length = path edges + 2."""
    adj = _cell_adjacency(g.rows, g.cols)
    cr, cc = g.rows - 1, g.cols - 1
    zedges = [_perimeter_edges_of_cell(g, i, j) for i in range(cr) for j in range(cc)]
    cuts = set()
    path_edges = []

    def record(a, b):
        if a == b:
            pairs = [(e1, e2) for i1, e1 in enumerate(zedges[a])
                     for e2 in zedges[a][i1 + 1:]]
        else:
            pairs = [(e1, e2) for e1 in zedges[a] for e2 in zedges[b]]
        for e1, e2 in pairs:
            cuts.add(frozenset(path_edges) | {e1, e2})

    def extend(start, current, visited):
        if len(path_edges) + 2 <= max_boundary and zedges[current] and current >= start:
            record(start, current)
        for nxt, e in adj[current]:
            if nxt in visited or len(path_edges) + 3 > max_boundary:
                continue
            visited.add(nxt)
            path_edges.append(e)
            extend(start, nxt, visited)
            path_edges.pop()
            visited.discard(nxt)

    for start in range(cr * cc):
        if zedges[start]:
            extend(start, start, {start})
    return cuts


def _sides_of_cut(g: GridGraph, cut):
    """Split the grid by removing the cut edges; returns the two components."""
    blocked = set(cut)
    adj = g.adjacency
    seen = bytearray(g.n_vertices)
    comps = []
    for s0 in range(g.n_vertices):
        if seen[s0]:
            continue
        comp = [s0]
        seen[s0] = 1
        stack = [s0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                e = (x, y) if x < y else (y, x)
                if e in blocked or seen[y]:
                    continue
                seen[y] = 1
                comp.append(y)
                stack.append(y)
        comps.append(frozenset(comp))
    return comps


def enumerate_filled_regions(
    g: GridGraph,
    max_boundary: int,
    *,
    boundary_cap: int = ENUM_BOUNDARY_CAP,
    grid_cap: int = ENUM_GRID_CAP,
) -> dict[tuple[int, bool], list[FilledRegion]]:
    """All filled regions with |boundary| <= max_boundary, grouped by
    (boundary size, is_type_1).

    Every returned region has a connected complement; its boundary is a
    minimal cut realized by a simple dual cycle (through z exactly when the
    region touches the perimeter). Both sides of one cut are returned when
    neither is type 6.
    """
    if max_boundary > boundary_cap:
        raise CapacityError(
            f"max_boundary {max_boundary} exceeds cap {boundary_cap}")
    if max(g.rows, g.cols) > grid_cap:
        raise CapacityError(
            f"grid {g.rows}x{g.cols} exceeds enumeration cap {grid_cap}x{grid_cap}")
    if g.rows < 2 or g.cols < 2:
        raise ValueError("enumeration needs a grid of at least 2x2")

    cuts = _cuts_from_interior_cycles(g, max_boundary)
    cuts |= _cuts_through_outer_vertex(g, max_boundary)

    groups: dict[tuple[int, bool], list[FilledRegion]] = {}
    for cut in cuts:
        comps = _sides_of_cut(g, cut)
        assert len(comps) == 2, "dual cycle must split the grid in two"
        for side in comps:
            t = _type_of_mask(sides_touched(g, side))
            if t == 6:
                continue
            rs = RegionSet(side, frozenset(cut), t)
            fr = FilledRegion(rs, side, frozenset(cut), t)
            groups.setdefault((len(cut), t == 1), []).append(fr)
    for key in groups:
        groups[key].sort(key=lambda fr: sorted(fr.vertices))
    return dict(sorted(groups.items()))


def dual_cycle_of_boundary(g: GridGraph, region) -> list[int]:
    """Verify the boundary's dual edges form one simple cycle; returns the
    cycle's dual vertices (z included exactly when the region is not type 1).

    Raises ValueError when the dual edges do not close into a single simple
    cycle, which happens whenever the region or its complement is
    disconnected.
    """
    dual = DualGraph(g)
    cut = boundary(g, region)
    idx = g.edge_index
    # multigraph incidence restricted to the cut
    inc: dict[int, list[int]] = {}
    dual_edges = []
    for e in cut:
        a, b = dual.dual_endpoints[idx[e]]
        k = len(dual_edges)
        dual_edges.append((a, b))
        inc.setdefault(a, []).append(k)
        inc.setdefault(b, []).append(k)
    if any(len(ks) != 2 for ks in inc.values()):
        raise ValueError("boundary dual edges do not form a simple cycle")
    # walk the cycle
    start = min(inc)
    order = [start]
    used = set()
    current = start
    while True:
        ks = [k for k in inc[current] if k not in used]
        if not ks:
            break
        k = ks[0]
        used.add(k)
        a, b = dual_edges[k]
        current = b if a == current else a
        if current == start:
            break
        order.append(current)
    if len(used) != len(dual_edges) or current != start:
        raise ValueError("boundary dual edges form more than one cycle")
    return order
