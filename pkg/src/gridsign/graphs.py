"""Graph containers: finite grids, general simple graphs, and the grid dual.

Vertices are integers 0..N-1. Grid vertices are numbered row-major from the
top-left corner: vertex = r * cols + c. Edges are canonical (u, v) pairs with
u < v, listed in a fixed deterministic order, so an edge index is a stable
identity for observations aligned to a graph.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CapacityError

EXPANSION_CAP = 20  # brute-force subset enumeration beyond this is unreasonable


@dataclass(frozen=True)
class Graph:
    """Simple connected undirected graph.

    Edges are validated at construction: no self-loops, no duplicates, all
    endpoints in range, and the graph must be connected.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    degree: int | None = None  # common degree if the graph is regular

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        canon = []
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u},{v}) out of range")
            canon.append((u, v) if u < v else (v, u))
        if len(set(canon)) != len(canon):
            raise ValueError("parallel edges are not allowed")
        object.__setattr__(self, "edges", tuple(canon))
        if not _connected(self.n_vertices, self.edges):
            raise ValueError("graph must be connected")
        if self.degree is not None:
            degs = degrees(self)
            if not all(d == self.degree for d in degs):
                raise ValueError(f"graph is not {self.degree}-regular")

    @functools.cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @functools.cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: k for k, e in enumerate(self.edges)}


@dataclass(frozen=True)
class GridGraph:
    """rows x cols grid. Vertex (r, c) has id r * cols + c.

    Edge order: for each vertex in id order, its rightward edge (if any) then
    its downward edge (if any).
    """

    rows: int
    cols: int
    edges: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid dimensions must be positive")
        es = []
        for r in range(self.rows):
            for c in range(self.cols):
                v = r * self.cols + c
                if c + 1 < self.cols:
                    es.append((v, v + 1))
                if r + 1 < self.rows:
                    es.append((v, v + self.cols))
        object.__setattr__(self, "edges", tuple(es))

    @property
    def n_vertices(self) -> int:
        return self.rows * self.cols

    def vertex(self, r: int, c: int) -> int:
        return r * self.cols + c

    def coords(self, v: int) -> tuple[int, int]:
        return divmod(v, self.cols)

    @functools.cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @functools.cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: k for k, e in enumerate(self.edges)}

    @functools.cached_property
    def horizontal_edge_ids(self) -> np.ndarray:
        """(rows, cols-1) array: index of edge (r,c)-(r,c+1)."""
        out = np.empty((self.rows, max(self.cols - 1, 0)), dtype=np.int64)
        for r in range(self.rows):
            for c in range(self.cols - 1):
                out[r, c] = self.edge_index[(self.vertex(r, c), self.vertex(r, c + 1))]
        return out

    @functools.cached_property
    def vertical_edge_ids(self) -> np.ndarray:
        """(rows-1, cols) array: index of edge (r,c)-(r+1,c)."""
        out = np.empty((max(self.rows - 1, 0), self.cols), dtype=np.int64)
        for r in range(self.rows - 1):
            for c in range(self.cols):
                out[r, c] = self.edge_index[(self.vertex(r, c), self.vertex(r + 1, c))]
        return out


def build_grid(rows: int, cols: int) -> GridGraph:
    return GridGraph(rows, cols)


def degrees(g) -> list[int]:
    d = [0] * g.n_vertices
    for u, v in g.edges:
        d[u] += 1
        d[v] += 1
    return d


def _connected(n: int, edges) -> bool:
    if n == 1:
        return True
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = bytearray(n)
    stack = [0]
    seen[0] = 1
    count = 1
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if not seen[y]:
                seen[y] = 1
                count += 1
                stack.append(y)
    return count == n


def boundary(g, s) -> frozenset[tuple[int, int]]:
    """Edge boundary: edges of g with exactly one endpoint in s."""
    sset = frozenset(s)
    for v in sset:
        if not (0 <= v < g.n_vertices):
            raise ValueError(f"vertex {v} out of range")
    return frozenset(e for e in g.edges if (e[0] in sset) != (e[1] in sset))


def connected_components(g, vertices) -> list[frozenset[int]]:
    """Components of the subgraph induced by `vertices`, each as a frozenset.

    Deterministic order: by smallest contained vertex.
    """
    vs = set(vertices)
    comps = []
    while vs:
        start = min(vs)
        comp = {start}
        stack = [start]
        vs.discard(start)
        while stack:
            x = stack.pop()
            for y in g.adjacency[x]:
                if y in vs:
                    vs.discard(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    return comps


# ---------------------------------------------------------------------------
# dual graph of a grid


@dataclass(frozen=True)
class DualGraph:
    """Planar dual of a grid: one vertex per interior cell plus the outer
    vertex z. Parallel edges occur between z and corner cells; a dual edge is
    identified by the primal edge index it crosses.

    Cell (i, j) is the unit square with top-left grid vertex (i, j); cells are
    numbered i * (cols-1) + j; z = n_cells.
    """

    grid: GridGraph
    # dual_endpoints[k] = (a, b) cell-or-z endpoints of the dual of edge k
    dual_endpoints: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        g = self.grid
        if g.rows < 2 or g.cols < 2:
            raise ValueError("dual graph needs a grid of at least 2x2")
        cr, cc = g.rows - 1, g.cols - 1

        def cell(i, j):
            if 0 <= i < cr and 0 <= j < cc:
                return i * cc + j
            return cr * cc  # z

        ends = []
        for u, v in g.edges:
            r, c = g.coords(u)
            if v == u + 1:  # horizontal edge (r,c)-(r,c+1): cells above/below
                ends.append((cell(r - 1, c), cell(r, c)))
            else:  # vertical edge (r,c)-(r+1,c): cells left/right
                ends.append((cell(r, c - 1), cell(r, c)))
        object.__setattr__(self, "dual_endpoints", tuple(ends))

    @property
    def n_cells(self) -> int:
        return (self.grid.rows - 1) * (self.grid.cols - 1)

    @property
    def z(self) -> int:
        return self.n_cells

    def z_degree(self) -> int:
        return sum(1 for a, b in self.dual_endpoints if a == self.z or b == self.z)


# ---------------------------------------------------------------------------
# expansion constant and global min cut


def expansion_constant(g: Graph, cap: int = EXPANSION_CAP) -> Fraction:
    """c = min over non-empty S, |S| <= N/2, of |boundary(S)| / (d |S|).

    Brute force over all subsets; exact rational result. Requires a d-regular
    graph (pass degree= at construction or have uniform degrees).
    """
    n = g.n_vertices
    if n > cap:
        raise CapacityError(f"expansion_constant caps at {cap} vertices, got {n}")
    degs = degrees(g)
    d = degs[0]
    if any(x != d for x in degs):
        raise ValueError("expansion_constant requires a regular graph")
    adj_mask = [0] * n
    for u, v in g.edges:
        adj_mask[u] |= 1 << v
        adj_mask[v] |= 1 << u
    best = None
    half = n // 2
    for s in range(1, 1 << n):
        size = s.bit_count()
        if size > half:
            continue
        cut = 0
        t = s
        while t:
            v = (t & -t).bit_length() - 1
            t &= t - 1
            cut += (adj_mask[v] & ~s).bit_count()
        ratio = Fraction(cut, d * size)
        if best is None or ratio < best:
            best = ratio
    return best


def min_cut(g) -> int:
    """Global minimum edge cut size (Stoer-Wagner, unit weights)."""
    n = g.n_vertices
    if n < 2:
        raise ValueError("min cut needs at least two vertices")
    # weight matrix over contracted super-vertices
    w = [[0] * n for _ in range(n)]
    for u, v in g.edges:
        w[u][v] += 1
        w[v][u] += 1
    active = list(range(n))
    best = None
    while len(active) > 1:
        # maximum adjacency order
        a = [active[0]]
        weights = {v: w[active[0]][v] for v in active[1:]}
        while weights:
            nxt = max(sorted(weights), key=lambda v: weights[v])
            a.append(nxt)
            del weights[nxt]
            for v in weights:
                weights[v] += w[nxt][v]
        s, t = a[-2], a[-1]
        cut_of_phase = sum(w[t][v] for v in active if v != t)
        if best is None or cut_of_phase < best:
            best = cut_of_phase
        # contract t into s
        for v in active:
            if v not in (s, t):
                w[s][v] += w[t][v]
                w[v][s] = w[s][v]
        active.remove(t)
    return best


def random_regular_graph(n: int, d: int, seed: int, max_tries: int = 10000) -> Graph:
    """Random simple connected d-regular graph via the pairing model.

    Stubs are matched uniformly at random; matchings with self-loops,
    parallel edges, or a disconnected result are rejected and resampled.
    Deterministic for a fixed seed.
    """
    if n * d % 2 != 0:
        raise ValueError("n*d must be even")
    rng = np.random.Generator(np.random.Philox(key=np.array(
        [seed & 0xFFFFFFFFFFFFFFFF, 0x9E3779B97F4A7C15], dtype=np.uint64)))
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        edges = set()
        ok = True
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v:
                ok = False
                break
            e = (u, v) if u < v else (v, u)
            if e in edges:
                ok = False
                break
            edges.add(e)
        if ok and _connected(n, edges):
            return Graph(n, tuple(sorted(edges)), degree=d)
    raise RuntimeError("failed to sample a simple connected regular graph")


# ---------------------------------------------------------------------------
# plain-text serialization


def write_graph(g, path) -> None:
    """Edge-list format: 'N M' then M lines 'u v'. Grids get a leading
    'grid R C' line as well."""
    lines = []
    if isinstance(g, GridGraph):
        lines.append(f"grid {g.rows} {g.cols}")
    lines.append(f"{g.n_vertices} {len(g.edges)}")
    lines.extend(f"{u} {v}" for u, v in g.edges)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_graph(path):
    """Inverse of write_graph: returns GridGraph for 'grid' files else Graph."""
    with open(path) as fh:
        tokens = [ln.split() for ln in fh if ln.strip()]
    if tokens[0][0] == "grid":
        rows, cols = int(tokens[0][1]), int(tokens[0][2])
        g = GridGraph(rows, cols)
        n, m = int(tokens[1][0]), int(tokens[1][1])
        if n != g.n_vertices or m != len(g.edges):
            raise ValueError("grid header does not match edge list")
        return g
    n, m = int(tokens[0][0]), int(tokens[0][1])
    edges = tuple((int(a), int(b)) for a, b in tokens[1:1 + m])
    return Graph(n, edges)
