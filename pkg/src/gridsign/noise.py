"""Ground-truth construction, the noisy observation process, and error
metrics.

Corruption locations are drawn first from counter-based streams keyed by
(seed, stream tag), one uniform draw per element index, so results never
depend on iteration order. The adversary only chooses labels on corrupted
elements: the default mode negates them; a pluggable rule receives the bad
sets and the truth and may relabel bad elements arbitrarily.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .graphs import Graph, GridGraph

EDGE_STREAM_TAG = 0
NODE_STREAM_TAG = 1
TRUTH_STREAM_TAG = 2

CONSISTENT_FLIP = "consistent-flip"

AdversaryFn = Callable[..., tuple[np.ndarray, np.ndarray]]


def _stream(seed: int, tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, tag]))


@dataclass(frozen=True)
class NoiseParams:
    """Edge noise p, node noise q, and the adversary mode.

    adversary is either the literal "consistent-flip" (bad elements carry
    the negation of the truthful value) or a callable
    (g, truth, edge_obs, node_obs, bad_edges, bad_nodes) -> (edge_obs, node_obs)
    that may rewrite entries of the bad elements only.
    """

    p: float
    q: float
    adversary: Union[str, AdversaryFn] = CONSISTENT_FLIP

    def __post_init__(self):
        if not (0.0 <= self.p <= 0.5):
            raise ValueError(f"p must be in [0, 1/2], got {self.p}")
        if not (0.0 <= self.q <= 0.5):
            raise ValueError(f"q must be in [0, 1/2], got {self.q}")
        if self.adversary != CONSISTENT_FLIP and not callable(self.adversary):
            raise ValueError(f"unknown adversary mode: {self.adversary!r}")


@dataclass(frozen=True)
class Observations:
    """One sampled instance: signed observations and the realized bad sets.

    edge_obs[k] is the observation of the k-th edge in the graph's edge
    order; node_obs[v] is the observation of vertex v. The bad sets are
    retained for analysis checks and are None when unknown (for instance
    after reading observations from disk); inference never looks at them.
    """

    edge_obs: np.ndarray
    node_obs: np.ndarray
    bad_edges: frozenset[int] | None = None
    bad_nodes: frozenset[int] | None = None

    def __post_init__(self):
        for name in ("edge_obs", "node_obs"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.int8)
            if arr.ndim != 1 or not np.isin(arr, (-1, 1)).all():
                raise ValueError(f"{name} must be a 1-d vector of +/-1 values")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.bad_edges is not None:
            object.__setattr__(self, "bad_edges", frozenset(self.bad_edges))
        if self.bad_nodes is not None:
            object.__setattr__(self, "bad_nodes", frozenset(self.bad_nodes))

    @property
    def n_edges(self) -> int:
        return self.edge_obs.shape[0]

    @property
    def n_vertices(self) -> int:
        return self.node_obs.shape[0]


def validate_labeling(g, labeling) -> np.ndarray:
    arr = np.ascontiguousarray(labeling, dtype=np.int8)
    if arr.shape != (g.n_vertices,):
        raise ValueError(
            f"labeling has shape {arr.shape}, expected ({g.n_vertices},)")
    if not np.isin(arr, (-1, 1)).all():
        raise ValueError("labeling entries must be +/-1")
    return arr


def all_plus_truth(g) -> np.ndarray:
    return np.ones(g.n_vertices, dtype=np.int8)


def random_truth(g, seed: int) -> np.ndarray:
    u = _stream(seed, TRUTH_STREAM_TAG).random(g.n_vertices)
    return np.where(u < 0.5, -1, 1).astype(np.int8)


def checkerboard_truth(g: GridGraph, seed: int) -> np.ndarray:
    """Chessboard truth: black cells fixed to +1, white cells uniform.

    A vertex is black when its row+column parity is even, so vertex 0 is
    always black.
    """
    if not isinstance(g, GridGraph):
        raise ValueError("checkerboard_truth needs a grid")
    r, c = np.divmod(np.arange(g.n_vertices), g.cols)
    white = (r + c) % 2 == 1
    u = _stream(seed, TRUTH_STREAM_TAG).random(g.n_vertices)
    truth = np.ones(g.n_vertices, dtype=np.int8)
    truth[white] = np.where(u[white] < 0.5, -1, 1)
    return truth


def checkerboard_white_mask(g: GridGraph) -> np.ndarray:
    r, c = np.divmod(np.arange(g.n_vertices), g.cols)
    return (r + c) % 2 == 1


def sample_observations(g, truth, params: NoiseParams, seed: int) -> Observations:
    """Sample one noisy instance of the observation process.

    Each edge is independently bad with probability p and each node with
    probability q; good elements carry the truthful value. Bad-element
    labels come from the adversary; the bad sets themselves are
    adversary-independent for a fixed seed.
    """
    truth = validate_labeling(g, truth)
    m = len(g.edges)
    bad_e = _stream(seed, EDGE_STREAM_TAG).random(m) < params.p
    bad_n = _stream(seed, NODE_STREAM_TAG).random(g.n_vertices) < params.q

    us = np.fromiter((u for u, _ in g.edges), dtype=np.int64, count=m)
    vs = np.fromiter((v for _, v in g.edges), dtype=np.int64, count=m)
    edge_obs = (truth[us] * truth[vs]).astype(np.int8)
    node_obs = truth.copy()
    edge_obs[bad_e] = -edge_obs[bad_e]
    node_obs[bad_n] = -node_obs[bad_n]

    bad_edges = frozenset(np.flatnonzero(bad_e).tolist())
    bad_nodes = frozenset(np.flatnonzero(bad_n).tolist())

    if params.adversary != CONSISTENT_FLIP:
        new_e, new_n = params.adversary(
            g, truth, edge_obs.copy(), node_obs.copy(), bad_edges, bad_nodes)
        new_e = np.ascontiguousarray(new_e, dtype=np.int8)
        new_n = np.ascontiguousarray(new_n, dtype=np.int8)
        good_e = np.setdiff1d(np.arange(m), np.fromiter(bad_edges, dtype=np.int64, count=len(bad_edges)))
        good_n = np.setdiff1d(np.arange(g.n_vertices),
                              np.fromiter(bad_nodes, dtype=np.int64, count=len(bad_nodes)))
        if not (np.array_equal(new_e[good_e], edge_obs[good_e])
                and np.array_equal(new_n[good_n], node_obs[good_n])):
            raise ValueError("adversary modified a good element")
        edge_obs, node_obs = new_e, new_n

    return Observations(edge_obs, node_obs, bad_edges, bad_nodes)


def hamming_error(pred, truth) -> int:
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {truth.shape}")
    return int(np.count_nonzero(pred != truth))


def sign_symmetric_error(pred, truth) -> int:
    """Error of the better of pred and -pred."""
    h = hamming_error(pred, truth)
    return min(h, len(np.asarray(truth)) - h)


# ---------------------------------------------------------------------------
# plain-text serialization


def write_observations(g, obs: Observations, path: str) -> None:
    """Lines "node v x" then "edge u v x". Bad sets are not written."""
    if obs.n_vertices != g.n_vertices or obs.n_edges != len(g.edges):
        raise ValueError("observations do not match the graph")
    with open(path, "w") as fh:
        for v in range(obs.n_vertices):
            fh.write(f"node {v} {int(obs.node_obs[v])}\n")
        for k, (u, v) in enumerate(g.edges):
            fh.write(f"edge {u} {v} {int(obs.edge_obs[k])}\n")


def read_observations(path: str, g) -> Observations:
    """Read observations written by write_observations.

    Every vertex and edge of g must appear exactly once. The bad sets are
    not on the wire, so they come back as None.
    """
    node_obs = np.zeros(g.n_vertices, dtype=np.int8)
    edge_obs = np.zeros(len(g.edges), dtype=np.int8)
    seen_nodes = np.zeros(g.n_vertices, dtype=bool)
    seen_edges = np.zeros(len(g.edges), dtype=bool)
    index = g.edge_index
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "node" and len(parts) == 3:
                v, x = int(parts[1]), int(parts[2])
                if not (0 <= v < g.n_vertices) or x not in (-1, 1) or seen_nodes[v]:
                    raise ValueError(f"{path}:{ln}: bad node line")
                node_obs[v] = x
                seen_nodes[v] = True
            elif parts[0] == "edge" and len(parts) == 4:
                u, v, x = int(parts[1]), int(parts[2]), int(parts[3])
                e = (u, v) if u < v else (v, u)
                if e not in index or x not in (-1, 1) or seen_edges[index[e]]:
                    raise ValueError(f"{path}:{ln}: bad edge line")
                edge_obs[index[e]] = x
                seen_edges[index[e]] = True
            else:
                raise ValueError(f"{path}:{ln}: unrecognized line {line!r}")
    if not seen_nodes.all() or not seen_edges.all():
        raise ValueError(f"{path}: missing node or edge observations")
    return Observations(edge_obs, node_obs, None, None)


def write_labeling(labeling, path: str) -> None:
    arr = np.ascontiguousarray(labeling, dtype=np.int8)
    if not np.isin(arr, (-1, 1)).all():
        raise ValueError("labeling entries must be +/-1")
    with open(path, "w") as fh:
        for x in arr:
            fh.write(f"{int(x)}\n")


def read_labeling(path: str) -> np.ndarray:
    values = []
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            x = int(s)
            if x not in (-1, 1):
                raise ValueError(f"{path}:{ln}: labels must be +/-1")
            values.append(x)
    return np.array(values, dtype=np.int8)
