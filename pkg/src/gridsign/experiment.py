"""Monte-Carlo experiment harness: sweep edge-noise levels over a fixed
grid, run the selected recovery algorithms on shared sampled instances, and
emit the error table as CSV plus an optional self-contained SVG chart.

Determinism contract: the whole pipeline is a pure function of the config.
Trial seeds are derived as seed XOR trial index, observations are sampled
once per trial and shared across algorithms, and wall-clock measurement is
off by default so that repeated runs are byte-identical.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import CapacityError
from .graphs import build_grid
from .inference import (
    FRONTIER_ROW_CAP,
    MARGINAL_ROW_CAP,
    gamma,
    map_full,
    marginal_predict,
    marginals,
    max_agreement_edges,
    two_step,
)
from .noise import (
    CONSISTENT_FLIP,
    NoiseParams,
    all_plus_truth,
    checkerboard_truth,
    hamming_error,
    random_truth,
    sample_observations,
    sign_symmetric_error,
)
from .oracles import BRUTE_MAX_CAP, brute_force_max

ALGORITHMS = ("two-step", "marginal", "map-full", "edge-only", "oracle")
TRUTH_MODES = ("plus", "checkerboard", "random")

CSV_HEADER = "algorithm,p,q,rows,cols,trials,mean_error,stderr,wall_ms"

# algorithms whose output is only defined up to a global sign
SIGN_SYMMETRIC_ALGORITHMS = frozenset({"edge-only", "oracle"})


@dataclass(frozen=True)
class ExperimentConfig:
    rows: int = 20
    cols: int = 20
    p_values: tuple[float, ...] = (0.01, 0.02, 0.04, 0.08)
    q: float = 0.4
    trials: int = 100
    seed: int = 0
    algorithms: tuple[str, ...] = ("two-step",)
    adversary: Union[str, Callable] = CONSISTENT_FLIP
    truth: str = "plus"
    out: Union[str, None] = None
    record_timing: bool = False

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid dimensions must be positive")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.p_values:
            raise ValueError("p_values must be non-empty")
        for p in self.p_values:
            if not (0.0 <= p <= 0.5):
                raise ValueError(f"p values must be in [0, 1/2], got {p}")
        if not (0.0 <= self.q <= 0.5):
            raise ValueError(f"q must be in [0, 1/2], got {self.q}")
        if not self.algorithms:
            raise ValueError("algorithms must be non-empty")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}; choose from {ALGORITHMS}")
        if self.truth not in TRUTH_MODES:
            raise ValueError(f"unknown truth mode {self.truth!r}; choose from {TRUTH_MODES}")
        # fail on capacity at config time so the offending algorithm is named
        if self.rows > FRONTIER_ROW_CAP:
            for a in self.algorithms:
                if a in ("two-step", "map-full", "edge-only"):
                    raise CapacityError(
                        f"{a} is capped at {FRONTIER_ROW_CAP} rows, config has {self.rows}")
        if "marginal" in self.algorithms and self.rows > MARGINAL_ROW_CAP:
            raise CapacityError(
                f"marginal is capped at {MARGINAL_ROW_CAP} rows, config has {self.rows}")
        if "oracle" in self.algorithms and self.rows * self.cols > BRUTE_MAX_CAP:
            raise CapacityError(
                f"oracle is capped at {BRUTE_MAX_CAP} vertices, config has "
                f"{self.rows * self.cols}")


@dataclass(frozen=True)
class ErrorRow:
    algorithm: str
    p: float
    q: float
    rows: int
    cols: int
    trials: int
    mean_error: float
    stderr: float
    wall_ms: float

    def __post_init__(self):
        n = self.rows * self.cols
        if not (0.0 <= self.mean_error <= n):
            raise ValueError(f"mean error {self.mean_error} outside [0, {n}]")


@dataclass(frozen=True)
class ErrorTable:
    entries: tuple[ErrorRow, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def sorted_entries(self) -> list[ErrorRow]:
        return sorted(self.entries, key=lambda r: (r.algorithm, r.p))

    def rows_for(self, algorithm: str) -> list[ErrorRow]:
        return [r for r in self.sorted_entries() if r.algorithm == algorithm]

    def __len__(self) -> int:
        return len(self.entries)


def _truth_for(g, mode: str, trial_seed: int):
    if mode == "plus":
        return all_plus_truth(g)
    if mode == "checkerboard":
        return checkerboard_truth(g, trial_seed)
    return random_truth(g, trial_seed)


def _run_algorithm(algo: str, g, obs, truth, p: float, q: float) -> int:
    if algo == "two-step":
        return hamming_error(two_step(g, obs), truth)
    if algo == "marginal":
        return hamming_error(marginal_predict(marginals(g, obs, p, q)), truth)
    if algo == "map-full":
        if q == 0.5:
            # zero node weight: the weighted objective collapses to the
            # edge-only one, so run that pipeline explicitly
            return hamming_error(max_agreement_edges(g, obs).labeling, truth)
        return hamming_error(map_full(g, obs, gamma(p, q)), truth)
    if algo == "edge-only":
        return sign_symmetric_error(max_agreement_edges(g, obs).labeling, truth)
    if algo == "oracle":
        _, labeling = brute_force_max(g, obs, 0.0)
        return sign_symmetric_error(labeling, truth)
    raise ValueError(f"unknown algorithm {algo!r}")


def run_experiment(cfg: ExperimentConfig) -> ErrorTable:
    """Sample trials per edge-noise level and score every selected
    algorithm on the same instances. Deterministic given the config."""
    g = build_grid(cfg.rows, cfg.cols)
    errors: dict[tuple[str, float], list[int]] = {
        (a, p): [] for a in cfg.algorithms for p in cfg.p_values}
    wall: dict[tuple[str, float], float] = dict.fromkeys(errors, 0.0)

    for p in cfg.p_values:
        params = NoiseParams(p, cfg.q, cfg.adversary)
        for trial in range(cfg.trials):
            trial_seed = cfg.seed ^ trial
            truth = _truth_for(g, cfg.truth, trial_seed)
            obs = sample_observations(g, truth, params, trial_seed)
            for algo in cfg.algorithms:
                t0 = time.perf_counter() if cfg.record_timing else 0.0
                try:
                    err = _run_algorithm(algo, g, obs, truth, p, cfg.q)
                except CapacityError as exc:
                    raise CapacityError(f"{algo}: {exc}") from exc
                if cfg.record_timing:
                    wall[(algo, p)] += (time.perf_counter() - t0) * 1000.0
                errors[(algo, p)].append(err)

    entries = []
    for algo in cfg.algorithms:
        for p in cfg.p_values:
            errs = np.array(errors[(algo, p)], dtype=np.float64)
            stderr = float(errs.std(ddof=1) / np.sqrt(len(errs))) if len(errs) > 1 else 0.0
            entries.append(ErrorRow(
                algorithm=algo, p=p, q=cfg.q, rows=cfg.rows, cols=cfg.cols,
                trials=cfg.trials, mean_error=float(errs.mean()), stderr=stderr,
                wall_ms=wall[(algo, p)] if cfg.record_timing else 0.0,
            ))
    return ErrorTable(tuple(entries))


def merge_tables(*tables: ErrorTable) -> ErrorTable:
    rows: list[ErrorRow] = []
    for t in tables:
        rows.extend(t.entries)
    return ErrorTable(tuple(rows))


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def emit_csv(table: ErrorTable, path: str) -> None:
    """Header plus one line per (algorithm, p), sorted, 6 significant
    digits; re-emitting the same table is byte-identical."""
    try:
        with open(path, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for r in table.sorted_entries():
                fh.write(
                    f"{r.algorithm},{_fmt(r.p)},{_fmt(r.q)},{r.rows},{r.cols},"
                    f"{r.trials},{_fmt(r.mean_error)},{_fmt(r.stderr)},{_fmt(r.wall_ms)}\n")
    except OSError as exc:
        raise OSError(f"cannot write error table to {path}: {exc}") from exc


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_PLOT_W, _PLOT_H = 640, 440
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 20, 20, 50


def emit_plot(table: ErrorTable, path: str) -> None:
    """Self-contained SVG line chart of mean error vs p, one series per
    algorithm, axes spanning [0, max p] x [0, 1.1 * max error]."""
    if len(table) == 0:
        raise ValueError("cannot plot an empty error table")
    algos = sorted({r.algorithm for r in table.entries})
    max_p = max(r.p for r in table.entries)
    max_e = max(r.mean_error for r in table.entries) * 1.1
    x_span = max_p if max_p > 0 else 1.0
    y_span = max_e if max_e > 0 else 1.0
    inner_w = _PLOT_W - _MARGIN_L - _MARGIN_R
    inner_h = _PLOT_H - _MARGIN_T - _MARGIN_B

    def sx(p):
        return _MARGIN_L + inner_w * (p / x_span)

    def sy(e):
        return _MARGIN_T + inner_h * (1.0 - e / y_span)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_PLOT_W}" height="{_PLOT_H}" '
        f'viewBox="0 0 {_PLOT_W} {_PLOT_H}">',
        f'<rect width="{_PLOT_W}" height="{_PLOT_H}" fill="white"/>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T + inner_h}" x2="{_MARGIN_L + inner_w}" '
        f'y2="{_MARGIN_T + inner_h}" stroke="black"/>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{_MARGIN_T + inner_h}" stroke="black"/>',
        f'<text x="{_MARGIN_L + inner_w / 2:.1f}" y="{_PLOT_H - 12}" '
        f'text-anchor="middle" font-size="13">edge noise p</text>',
        f'<text x="16" y="{_MARGIN_T + inner_h / 2:.1f}" text-anchor="middle" '
        f'font-size="13" transform="rotate(-90 16 {_MARGIN_T + inner_h / 2:.1f})">'
        f'mean hamming error</text>',
        f'<text x="{_MARGIN_L - 6}" y="{_MARGIN_T + inner_h + 4}" text-anchor="end" '
        f'font-size="11">0</text>',
        f'<text x="{_MARGIN_L + inner_w}" y="{_MARGIN_T + inner_h + 16}" '
        f'text-anchor="middle" font-size="11">{_fmt(x_span)}</text>',
        f'<text x="{_MARGIN_L - 6}" y="{_MARGIN_T + 4}" text-anchor="end" '
        f'font-size="11">{_fmt(y_span)}</text>',
    ]
    for k, algo in enumerate(algos):
        color = _PALETTE[k % len(_PALETTE)]
        pts = [(r.p, r.mean_error) for r in table.rows_for(algo)]
        coords = " ".join(f"{sx(p):.2f},{sy(e):.2f}" for p, e in pts)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                     f'stroke-width="2"/>')
        for p, e in pts:
            parts.append(f'<circle cx="{sx(p):.2f}" cy="{sy(e):.2f}" r="3" '
                         f'fill="{color}"/>')
        ly = _MARGIN_T + 16 + 18 * k
        lx = _MARGIN_L + inner_w - 150
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 30}" y="{ly}" font-size="12">{algo}</text>')
    parts.append("</svg>")
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write plot to {path}: {exc}") from exc
