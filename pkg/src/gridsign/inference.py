"""Recovery algorithms: exact edge-agreement maximization on grids by a
frontier sweep, the two-stage estimator built on it, exact weighted MAP,
exact posterior marginals, and an exhaustive variant for small non-grid
graphs.

The frontier sweep visits cells column by column, top to bottom, so cell
t = c*rows + r is vertex (r, c). The state is the labels of the last `rows`
cells, newest at the top bit; appending a cell drops the oldest bit, which
is the label of the left neighbor, while the vertical neighbor sits at the
second-highest bit of the new state. Work and memory scale as 2^rows per
cell, hence the row caps.

Edge-only scores are exact int16 arithmetic (rerouted to float64 when the
edge count approaches the int16 range); weighted and marginal sweeps run in
float64 with a documented 1e-9 comparison tolerance. Tie-breaking is
deterministic everywhere: between the two predecessors of a state the
smaller one wins, and the final argmax takes the smallest state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numba import njit

from .errors import CapacityError, DegenerateNoiseError
from .graphs import GridGraph
from .noise import Observations

FRONTIER_ROW_CAP = 22
MARGINAL_ROW_CAP = 16
EXHAUSTIVE_CAP = 24
INT16_EDGE_LIMIT = 32000
SCORE_TOL = 1e-9

_CHUNK = 1 << 16


@dataclass(frozen=True)
class GammaWeight:
    """Relative weight of one node observation against one edge observation."""

    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0.0):
            raise ValueError(f"gamma weight must be finite and >= 0, got {self.value}")

    def __float__(self) -> float:
        return self.value


def gamma(p: float, q: float) -> GammaWeight:
    """log((1-q)/q) / log((1-p)/p).

    p in {0, 1/2} makes the denominator degenerate and q = 0 the numerator;
    those cases need a hard-constraint or edge-only formulation instead, so
    they raise DegenerateNoiseError. q = 1/2 is fine and gives weight 0.
    """
    if not (0.0 <= p <= 0.5 and 0.0 <= q <= 0.5):
        raise ValueError(f"p and q must be in [0, 1/2], got p={p}, q={q}")
    if p == 0.0 or p == 0.5 or q == 0.0:
        raise DegenerateNoiseError(
            f"gamma is undefined at p={p}, q={q}; use an edge-only or "
            f"hard-constraint formulation")
    return GammaWeight(math.log((1.0 - q) / q) / math.log((1.0 - p) / p))


@dataclass(frozen=True)
class MarginalTable:
    """Per-vertex posterior probability of label +1 given the observations."""

    prob_plus: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.prob_plus, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("prob_plus must be a 1-d vector")
        if not (np.isfinite(arr).all() and (arr >= 0.0).all() and (arr <= 1.0).all()):
            raise ValueError("marginal probabilities must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "prob_plus", arr)


@dataclass(frozen=True)
class FirstStageResult:
    """Edge-stage output: a maximizing labeling, its score, and whether the
    solver certifies global optimality (both signs achieve the same score)."""

    labeling: np.ndarray
    score: Union[int, float]
    certificate: bool

    def __post_init__(self):
        arr = np.ascontiguousarray(self.labeling, dtype=np.int8)
        if arr.ndim != 1 or not np.isin(arr, (-1, 1)).all():
            raise ValueError("labeling must be a 1-d vector of +/-1 values")
        arr.setflags(write=False)
        object.__setattr__(self, "labeling", arr)


def agreement_score(g, obs: Observations, labeling, gamma_value: float = 0.0):
    """sum_e X_e*Y_u*Y_v + gamma * sum_v X_v*Y_v for a given labeling."""
    lab = np.ascontiguousarray(labeling, dtype=np.int64)
    m = len(g.edges)
    us = np.fromiter((u for u, _ in g.edges), dtype=np.int64, count=m)
    vs = np.fromiter((v for _, v in g.edges), dtype=np.int64, count=m)
    edge_part = int((lab[us] * lab[vs]) @ obs.edge_obs.astype(np.int64))
    gv = float(gamma_value)
    if gv == 0.0:
        return edge_part
    return edge_part + gv * int(lab @ obs.node_obs.astype(np.int64))


# ---------------------------------------------------------------------------
# cell-order preparation

def _cell_arrays(g: GridGraph, obs: Observations):
    """Per-cell observation triples (left edge, up edge, node) in sweep order.

    Entries for edges that do not exist (first column, first row) are zero,
    which makes the transition gain formula uniform across all cells.
    """
    rows, cols = g.rows, g.cols
    xh = np.zeros((rows, cols), dtype=np.int8)
    if cols > 1:
        xh[:, 1:] = obs.edge_obs[g.horizontal_edge_ids]
    xv = np.zeros((rows, cols), dtype=np.int8)
    if rows > 1:
        xv[1:, :] = obs.edge_obs[g.vertical_edge_ids]
    xn = obs.node_obs.reshape(rows, cols)
    return xh.T.ravel(), xv.T.ravel(), xn.T.ravel()


def _cells_to_vertices(labels_cells: np.ndarray, rows: int, cols: int) -> np.ndarray:
    return np.ascontiguousarray(labels_cells.reshape(cols, rows).T.ravel())


# ---------------------------------------------------------------------------
# maximization sweeps

@njit(cache=True)
def _quad_max_i16(pair32, g0, g1, out, ch):
    # pair32 views two int16 predecessor scores per new state; slices are
    # pre-cut by the caller because offset arithmetic here defeats SIMD.
    # The halves are extracted by masking: shift tricks do not survive
    # numba's promotion of int32 scalars to int64.
    for i in range(pair32.shape[0]):
        v = pair32[i]
        lo = (v & 0xFFFF) - ((v & 0x8000) << 1)
        hi = v >> 16
        x = lo + g0
        y = hi + g1
        out[i] = np.int16(max(x, y))
        ch[i] = np.uint8(y > x)


def _sweep_max(rows: int, xh, xv, xn, gv: float, use_int16: bool):
    """Forward maximization over all cells; returns final state scores and
    one packed choice row per steady step for the backtrack."""
    n_cells = xh.shape[0]
    assert not use_int16 or gv == 0.0, "integer sweep is edge-only"
    dtype = np.int16 if use_int16 else np.float64

    def node_term(t, yb):
        return (2 * yb - 1) * gv * float(xn[t])

    # growing phase: column 0, state width t+1 after cell t, bit j = cell j
    cur = np.zeros(1, dtype=dtype)
    for t in range(min(rows, n_cells)):
        w = 1 << t
        hw = w >> 1
        new = np.empty(w << 1, dtype=dtype)
        for yb in (0, 1):
            y = 2 * yb - 1
            if t == 0:
                new[yb] = 0 if use_int16 else node_term(0, yb)
                continue
            for vb in (0, 1):
                gain = y * int(xv[t]) * (2 * vb - 1)
                total = gain if use_int16 else gain + node_term(t, yb)
                new[yb * w + vb * hw: yb * w + (vb + 1) * hw] = cur[vb * hw:(vb + 1) * hw] + total
        cur = new

    n_states = 1 << rows
    half = n_states >> 1
    quarter = n_states >> 2
    packed = []
    if n_cells > rows:
        nxt = np.empty(n_states, dtype=dtype)
        ch = np.empty(n_states, dtype=np.uint8)
        for t in range(rows, n_cells):
            xh_t = int(xh[t])
            xv_t = int(xv[t])

            def gain(yb, vb, d):
                y = 2 * yb - 1
                g = y * (xh_t * (2 * d - 1) + xv_t * (2 * vb - 1))
                return g if use_int16 else g + node_term(t, yb)

            if use_int16:
                pair = cur.view(np.int32)
                _quad_max_i16(pair[:quarter], gain(0, 0, 0), gain(0, 0, 1),
                              nxt[:quarter], ch[:quarter])
                _quad_max_i16(pair[quarter:], gain(0, 1, 0), gain(0, 1, 1),
                              nxt[quarter:half], ch[quarter:half])
                _quad_max_i16(pair[:quarter], gain(1, 0, 0), gain(1, 0, 1),
                              nxt[half:half + quarter], ch[half:half + quarter])
                _quad_max_i16(pair[quarter:], gain(1, 1, 0), gain(1, 1, 1),
                              nxt[half + quarter:], ch[half + quarter:])
            else:
                c0 = cur[0::2]
                c1 = cur[1::2]
                for k, (yb, vb) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
                    lo = slice(0, quarter) if vb == 0 else slice(quarter, half)
                    out = slice(k * quarter, (k + 1) * quarter)
                    a = c0[lo] + gain(yb, vb, 0)
                    b = c1[lo] + gain(yb, vb, 1)
                    np.maximum(a, b, out=nxt[out])
                    ch[out] = b > a
            packed.append(np.packbits(ch))
            cur, nxt = nxt, cur
    return cur, packed


def _backtrack(rows: int, n_cells: int, final_scores, packed) -> np.ndarray:
    s = int(np.argmax(final_scores))
    labels = np.empty(n_cells, dtype=np.int8)
    for j in range(rows):
        labels[n_cells - rows + j] = 2 * ((s >> j) & 1) - 1
    half_mask = (1 << (rows - 1)) - 1
    for t in range(n_cells - 1, rows - 1, -1):
        row_bytes = packed[t - rows]
        d = (row_bytes[s >> 3] >> (7 - (s & 7))) & 1
        labels[t - rows] = 2 * int(d) - 1
        s = ((s & half_mask) << 1) | int(d)
    return labels


def _path_max(xe, xn, gv: float):
    """Chain maximization; xe[t] is the edge between positions t-1 and t."""
    n = xn.shape[0]
    cur = np.array([-gv * float(xn[0]), gv * float(xn[0])], dtype=np.float64)
    choices = np.empty((n, 2), dtype=np.uint8)
    for t in range(1, n):
        new = np.empty(2, dtype=np.float64)
        for yb in (0, 1):
            y = 2 * yb - 1
            node = gv * float(xn[t]) * y
            c0 = cur[0] - y * float(xe[t]) + node
            c1 = cur[1] + y * float(xe[t]) + node
            new[yb] = max(c0, c1)
            choices[t, yb] = c1 > c0
        cur = new
    s = int(np.argmax(cur))
    score = float(cur[s])
    labels = np.empty(n, dtype=np.int8)
    labels[n - 1] = 2 * s - 1
    for t in range(n - 1, 0, -1):
        s = int(choices[t, s])
        labels[t - 1] = 2 * s - 1
    return labels, score


def _solve_grid(g: GridGraph, obs: Observations, gv: float, use_int16: bool):
    if obs.n_vertices != g.n_vertices or obs.n_edges != len(g.edges):
        raise ValueError("observations do not match the graph")
    if g.rows > FRONTIER_ROW_CAP:
        raise CapacityError(
            f"frontier sweep capped at {FRONTIER_ROW_CAP} rows, got {g.rows}")
    if use_int16 and len(g.edges) > INT16_EDGE_LIMIT:
        use_int16 = False
    xh, xv, xn = _cell_arrays(g, obs)
    if g.rows == 1:
        xe = np.zeros(g.cols, dtype=np.int8)
        xe[1:] = xh[1:]
        labels_cells, score = _path_max(xe, xn, gv)
        return labels_cells.copy(), score
    final_scores, packed = _sweep_max(g.rows, xh, xv, xn, gv, use_int16)
    labels_cells = _backtrack(g.rows, g.n_vertices, final_scores, packed)
    return _cells_to_vertices(labels_cells, g.rows, g.cols), float(np.max(final_scores))


def max_agreement_edges(g: GridGraph, obs: Observations) -> FirstStageResult:
    """Exact maximizer of sum_e X_e*Y_u*Y_v over all labelings.

    The score is sign-symmetric, so the returned labeling is one of a +/-
    pair; both are certified global maximizers.
    """
    labeling, score = _solve_grid(g, obs, 0.0, use_int16=True)
    return FirstStageResult(labeling, int(score), True)


def map_full(g: GridGraph, obs: Observations, gamma_weight) -> np.ndarray:
    """Exact maximizer of sum_e X_e*Y_u*Y_v + gamma * sum_v X_v*Y_v."""
    gv = float(gamma_weight)
    if not (math.isfinite(gv) and gv >= 0.0):
        raise ValueError(f"gamma weight must be finite and >= 0, got {gv}")
    labeling, _ = _solve_grid(g, obs, gv, use_int16=False)
    return labeling


def two_step(g: GridGraph, obs: Observations) -> np.ndarray:
    """Edge-stage maximizer, then a global sign fix by node-observation vote:
    the negation wins only when it agrees strictly better with the nodes."""
    first = max_agreement_edges(g, obs)
    vote = int(obs.node_obs.astype(np.int64) @ first.labeling.astype(np.int64))
    if vote < 0:
        return -first.labeling
    return first.labeling.copy()


def max_agreement_exhaustive(g, obs: Observations) -> FirstStageResult:
    """Edge-agreement maximizer for arbitrary graphs by enumerating the
    2^(N-1) sign classes. Intended for small expander experiments."""
    n = g.n_vertices
    if n > EXHAUSTIVE_CAP:
        raise CapacityError(
            f"exhaustive maximization capped at {EXHAUSTIVE_CAP} vertices, got {n}")
    if obs.n_vertices != n or obs.n_edges != len(g.edges):
        raise ValueError("observations do not match the graph")
    w = np.zeros((n, n), dtype=np.int32)
    for k, (u, v) in enumerate(g.edges):
        w[u, v] += int(obs.edge_obs[k])
        w[v, u] += int(obs.edge_obs[k])
    best_score = None
    best_labels = None
    shifts = np.arange(n - 1, dtype=np.int64)
    for start in range(0, 1 << (n - 1), _CHUNK):
        stop = min(start + _CHUNK, 1 << (n - 1))
        codes = np.arange(start, stop, dtype=np.int64)
        bits = (codes[:, None] >> shifts) & 1
        labels = np.ones((codes.shape[0], n), dtype=np.int32)
        labels[:, :-1] = 2 * bits - 1
        scores = ((labels @ w) * labels).sum(axis=1) // 2
        k = int(np.argmax(scores))
        if best_score is None or scores[k] > best_score:
            best_score = int(scores[k])
            best_labels = labels[k].astype(np.int8)
    return FirstStageResult(best_labels, best_score, True)


# ---------------------------------------------------------------------------
# exact marginals

def _marginal_potentials(p: float, q: float) -> tuple[float, float]:
    if not (0.0 <= p <= 0.5 and 0.0 <= q <= 0.5):
        raise ValueError(f"p and q must be in [0, 1/2], got p={p}, q={q}")
    if p == 0.0 or q == 0.0:
        raise DegenerateNoiseError(
            f"exact marginals need p, q > 0 (hard constraints at p={p}, q={q})")
    return 0.5 * math.log((1.0 - p) / p), 0.5 * math.log((1.0 - q) / q)


def _path_marginals(xe, xn, a: float, b: float) -> np.ndarray:
    n = xn.shape[0]
    fwd = [np.zeros(1)]
    cur = np.array([-b * float(xn[0]), b * float(xn[0])])
    fwd.append(cur)
    for t in range(1, n):
        e = a * float(xe[t])
        new = np.empty(2)
        for yb in (0, 1):
            y = 2 * yb - 1
            node = b * float(xn[t]) * y
            new[yb] = np.logaddexp(cur[0] - y * e, cur[1] + y * e) + node
        cur = new
        fwd.append(cur)
    probs = np.empty(n)
    bwd = np.zeros(2)
    for t in range(n - 1, -1, -1):
        arr = fwd[t + 1] + bwd
        m_minus, m_plus = arr[0], arr[1]
        probs[t] = math.exp(m_plus - np.logaddexp(m_plus, m_minus))
        if t > 0:
            e = a * float(xe[t])
            node = b * float(xn[t])
            new = np.empty(2)
            for d in (0, 1):
                ds = 2 * d - 1
                new[d] = np.logaddexp(bwd[0] - (ds * e) - node, bwd[1] + (ds * e) + node)
            bwd = new
    return probs


def marginals(g: GridGraph, obs: Observations, p: float, q: float) -> MarginalTable:
    """Exact posterior P(Y_v = +1 | X) under the uniform prior, by a
    forward/backward frontier sweep in the log domain.

    Accepts p, q in (0, 1/2]; the boundary value 1/2 just zeroes the
    corresponding potential. Hard-constraint noise (p or q equal to 0) is
    rejected.
    """
    if obs.n_vertices != g.n_vertices or obs.n_edges != len(g.edges):
        raise ValueError("observations do not match the graph")
    if g.rows > MARGINAL_ROW_CAP:
        raise CapacityError(
            f"exact marginals capped at {MARGINAL_ROW_CAP} rows, got {g.rows}")
    a, b = _marginal_potentials(p, q)
    xh_c, xv_c, xn_c = _cell_arrays(g, obs)
    if g.rows == 1:
        xe = np.zeros(g.cols, dtype=np.int8)
        xe[1:] = xh_c[1:]
        return MarginalTable(_path_marginals(xe, xn_c, a, b))

    rows = g.rows
    n_cells = g.n_vertices
    xh = a * xh_c.astype(np.float64)
    xv = a * xv_c.astype(np.float64)
    xn = b * xn_c.astype(np.float64)

    n_states = 1 << rows
    half = n_states >> 1
    quarter = n_states >> 2

    # forward pass, storing the message after every cell
    fwd = [np.zeros(1)]
    cur = fwd[0]
    for t in range(min(rows, n_cells)):
        w = 1 << t
        hw = w >> 1
        new = np.empty(w << 1)
        for yb in (0, 1):
            y = 2 * yb - 1
            if t == 0:
                new[yb] = y * xn[0]
                continue
            for vb in (0, 1):
                gain = y * (xv[t] * (2 * vb - 1) + xn[t])
                new[yb * w + vb * hw: yb * w + (vb + 1) * hw] = cur[vb * hw:(vb + 1) * hw] + gain
        cur = new
        fwd.append(cur)
    for t in range(rows, n_cells):
        c0 = cur[0::2]
        c1 = cur[1::2]
        new = np.empty(n_states)
        for k, (yb, vb) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
            y = 2 * yb - 1
            base = y * (xv[t] * (2 * vb - 1) + xn[t])
            lo = slice(0, quarter) if vb == 0 else slice(quarter, half)
            out = slice(k * quarter, (k + 1) * quarter)
            np.logaddexp(c0[lo] + (base - y * xh[t]), c1[lo] + (base + y * xh[t]),
                         out=new[out])
        cur = new
        fwd.append(cur)

    # backward pass, consuming fwd and emitting one marginal per cell
    probs_cells = np.empty(n_cells)

    def emit(t, bwd_after):
        arr = fwd[t + 1] + bwd_after
        h = arr.shape[0] >> 1
        m_minus = _logsumexp(arr[:h])
        m_plus = _logsumexp(arr[h:])
        probs_cells[t] = math.exp(m_plus - np.logaddexp(m_plus, m_minus))

    bwd = np.zeros(fwd[n_cells].shape[0])
    d_sign = np.tile(np.array([-1.0, 1.0]), half)
    v_sign = np.repeat(np.array([-1.0, 1.0]), half)
    for t in range(n_cells - 1, rows - 1, -1):
        emit(t, bwd)
        b0 = np.repeat(bwd[:half], 2)
        b1 = np.repeat(bwd[half:], 2)
        g_minus = -(xh[t] * d_sign + xv[t] * v_sign + xn[t])
        bwd = np.logaddexp(b0 + g_minus, b1 - g_minus)
    for t in range(min(rows, n_cells) - 1, -1, -1):
        emit(t, bwd)
        w = 1 << t
        if t == 0:
            break
        vs = np.repeat(np.array([-1.0, 1.0]), w >> 1)
        g_minus = -(xv[t] * vs + xn[t])
        bwd = np.logaddexp(bwd[:w] + g_minus, bwd[w:] - g_minus)

    return MarginalTable(_cells_to_vertices(probs_cells, rows, g.cols))


def _logsumexp(arr: np.ndarray) -> float:
    m = float(np.max(arr))
    return m + math.log(float(np.exp(arr - m).sum()))


def marginal_predict(table) -> np.ndarray:
    """+1 where the posterior favors +1, with the tie at exactly 1/2 going
    to +1."""
    probs = np.asarray(getattr(table, "prob_plus", table), dtype=np.float64)
    return np.where(probs >= 0.5, 1, -1).astype(np.int8)
