"""Closed-form bound calculators: tail bounds on a region being bad, the
two-part error series over region types, the census-refined leading
constant, the checkerboard lower-bound estimator, and the expander and
min-cut conditions.

Series are evaluated by geometric and arithmetic-geometric closed forms;
divergence is reported through flags rather than exceptions so sweeps can
cross the convergence threshold without try/except scaffolding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .census import CycleCensus
from .graphs import GridGraph
from .noise import NoiseParams, checkerboard_truth, checkerboard_white_mask, sample_observations

# stand-in slope for log((1-p)/p) at a hard-constraint endpoint
_BIG_LOG_ODDS = 1e18

# every closed self-avoiding boundary walk of length i on the grid encloses
# at least one cell, and counts grow like mu^i with mu < 2.65
SAP_GROWTH_RATE = 2.65


def exact_bad_region_prob(i: int, p: float) -> float:
    """P(at least half of i independent edges are bad), the exact tail."""
    _check_ip(i, p)
    k0 = (i + 1) // 2
    return float(sum(math.comb(i, k) * p**k * (1.0 - p) ** (i - k)
                     for k in range(k0, i + 1)))


def bad_region_prob_bound(i: int, p: float, tight: bool = False) -> float:
    """Closed-form upper bound on a boundary of size i being at least half
    bad: (3*sqrt(p))^i, or the tighter (2*e*p)^(i/2) when tight is set."""
    _check_ip(i, p)
    if tight:
        return float((2.0 * math.e * p) ** (i / 2.0))
    return float((3.0 * math.sqrt(p)) ** i)


def _check_ip(i: int, p: float) -> None:
    if i < 1:
        raise ValueError(f"boundary size must be >= 1, got {i}")
    if not (0.0 <= p <= 0.5):
        raise ValueError(f"p must be in [0, 1/2], got {p}")


@dataclass(frozen=True)
class SeriesBound:
    """The two-part series bound on expected error: N times the interior
    coefficient plus sqrt(N) times the boundary coefficient."""

    p: float
    n: int
    type1_coefficient: float
    boundary_coefficient: float
    converged: bool

    @property
    def value(self) -> float:
        return self.n * self.type1_coefficient + math.sqrt(self.n) * self.boundary_coefficient


def series_error_bound(p: float, n: int) -> SeriesBound:
    """sum_{i>=2} (i/16)(81p)^i per vertex plus sum_{j>=2} (2j^2/9)(9 sqrt(p))^j
    per boundary unit, in closed form.

    Both series are geometric-derived and converge exactly when p < 1/81;
    otherwise the coefficients are reported as infinite with the flag down.
    """
    if n < 4:
        raise ValueError(f"series bound needs N >= 4, got {n}")
    if not (0.0 <= p <= 0.5):
        raise ValueError(f"p must be in [0, 1/2], got {p}")
    x = 81.0 * p
    y = 9.0 * math.sqrt(p)
    converged = x < 1.0 and y < 1.0
    if not converged:
        return SeriesBound(p, n, math.inf, math.inf, False)
    # sum_{i>=2} i x^i = x^2 (2 - x) / (1 - x)^2
    t1 = (x * x * (2.0 - x) / (1.0 - x) ** 2) / 16.0
    # sum_{j>=2} j^2 y^j = y (1 + y) / (1 - y)^3 - y
    bc = (2.0 / 9.0) * (y * (1.0 + y) / (1.0 - y) ** 3 - y)
    return SeriesBound(p, n, t1, bc, True)


@dataclass(frozen=True)
class RefinedConstant:
    """Census-refined constant C(p): expected interior error is at most
    C(p) * p^2 * N. The explicit term sums exact tails against
    area-weighted loop counts up to perimeter i_max; the remainder bounds
    everything beyond the census."""

    p: float
    i_max: int
    explicit_term: float
    remainder_term: float
    total: float
    remainder_ratio: float
    converged: bool

    def report(self) -> str:
        return (
            f"p {self.p:.17g}\n"
            f"i_max {self.i_max}\n"
            f"explicit {self.explicit_term:.17g}\n"
            f"remainder {self.remainder_term:.17g}\n"
            f"total {self.total:.17g}\n"
            f"remainder_ratio {self.remainder_ratio:.17g}\n"
            f"converged {int(self.converged)}\n"
        )


def refined_constant(p: float, census: CycleCensus, i_max: int) -> RefinedConstant:
    """Refine the interior constant using enumerated loop counts.

    Per unit N the explicit term is sum over even perimeters i <= i_max of
    (exact tail at i) * (sum over loops of perimeter i of enclosed area).
    The remainder uses the geometric tail bound m^2 b^m / (1-b)^3 with
    m = i_max/2 + 1 and b = 2*e*p*SAP_GROWTH_RATE^2; it diverges (flag
    down, value inf) once b >= 1. The total constant C(p) divides the sum
    by p^2.
    """
    if not (0.0 < p <= 0.5):
        raise ValueError(f"p must be in (0, 1/2], got {p}")
    if i_max < 4 or i_max % 2:
        raise ValueError(f"i_max must be an even integer >= 4, got {i_max}")
    if census.max_perimeter < i_max:
        raise ValueError(
            f"census covers perimeters up to {census.max_perimeter}, need {i_max}")
    explicit = sum(exact_bad_region_prob(i, p) * census.area_weighted_total(i)
                   for i in range(4, i_max + 1, 2))
    b = 2.0 * math.e * p * SAP_GROWTH_RATE**2
    m = i_max // 2 + 1
    converged = b < 1.0
    remainder = (m * m * b**m / (1.0 - b) ** 3) if converged else math.inf
    total = (explicit + remainder) / (p * p)
    return RefinedConstant(p, i_max, float(explicit), float(remainder),
                           float(total), float(b), converged)


def ambiguous_node_rate(p: float) -> float:
    """Probability that an interior white node sees exactly two +1 edges."""
    if not (0.0 <= p <= 0.5):
        raise ValueError(f"p must be in [0, 1/2], got {p}")
    return 6.0 * p * p * (1.0 - p) ** 2


@dataclass(frozen=True)
class LowerBoundStats:
    """Monte-Carlo statistics for the checkerboard lower-bound argument.

    Errors count white nodes only (black nodes are revealed). Ambiguity is
    exactly two +1 incident edge observations; the degree-4 restriction
    isolates the nodes whose edge evidence exactly cancels, which is the
    population the closed-form rate describes.
    """

    p: float
    q: float
    trials: int
    rows: int
    cols: int
    n_white: int
    n_white_deg4: int
    total_ambiguous: int
    total_ambiguous_deg4: int
    total_error: int
    total_error_ambiguous_deg4: int
    mean_error: float
    stderr_error: float

    @property
    def ambiguous_deg4_rate(self) -> float:
        return self.total_ambiguous_deg4 / (self.trials * self.n_white_deg4)

    @property
    def error_rate_on_ambiguous(self) -> float:
        if self.total_ambiguous_deg4 == 0:
            return math.nan
        return self.total_error_ambiguous_deg4 / self.total_ambiguous_deg4


def _log_odds(x: float) -> float:
    if x == 0.0:
        return _BIG_LOG_ODDS
    return math.log((1.0 - x) / x)


def lower_bound_estimate(g: GridGraph, p: float, q: float, trials: int,
                         seed: int) -> LowerBoundStats:
    """Sample checkerboard truths and score the conditionally optimal
    white-node predictor.

    Black nodes are fixed to +1 and treated as revealed, so each white node
    is judged from its incident edge observations and its own node
    observation via the exact log-odds rule (ties to +1). Reported errors
    are per-trial counts of wrong white nodes.
    """
    if not isinstance(g, GridGraph):
        raise ValueError("lower_bound_estimate needs a grid")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    params = NoiseParams(p, q)
    white = np.flatnonzero(checkerboard_white_mask(g))
    if white.size == 0:
        raise ValueError("grid has no white nodes")
    degs = np.array([len(g.adjacency[int(v)]) for v in white], dtype=np.int64)
    max_deg = int(degs.max())
    inc = np.zeros((white.size, max_deg), dtype=np.int64)
    inc_mask = np.zeros((white.size, max_deg), dtype=bool)
    for j, wv in enumerate(white):
        for k, u in enumerate(g.adjacency[int(wv)]):
            e = (int(wv), u) if wv < u else (u, int(wv))
            inc[j, k] = g.edge_index[e]
            inc_mask[j, k] = True

    a = _log_odds(p)
    b = _log_odds(q)
    deg4 = degs == 4

    total_amb = 0
    total_amb4 = 0
    total_err_amb4 = 0
    per_trial_err = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        trial_seed = seed ^ t
        truth = checkerboard_truth(g, trial_seed)
        obs = sample_observations(g, truth, params, trial_seed)
        eo = obs.edge_obs[inc] * inc_mask
        n_plus = ((eo == 1) & inc_mask).sum(axis=1)
        ambiguous = n_plus == 2
        log_odds = a * eo.sum(axis=1) + b * obs.node_obs[white]
        pred = np.where(log_odds >= 0.0, 1, -1).astype(np.int8)
        wrong = pred != truth[white]
        total_amb += int(ambiguous.sum())
        total_amb4 += int((ambiguous & deg4).sum())
        total_err_amb4 += int((wrong & ambiguous & deg4).sum())
        per_trial_err[t] = int(wrong.sum())

    mean_err = float(per_trial_err.mean())
    stderr = float(per_trial_err.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return LowerBoundStats(
        p=p, q=q, trials=trials, rows=g.rows, cols=g.cols,
        n_white=int(white.size), n_white_deg4=int(deg4.sum()),
        total_ambiguous=total_amb, total_ambiguous_deg4=total_amb4,
        total_error=int(per_trial_err.sum()),
        total_error_ambiguous_deg4=total_err_amb4,
        mean_error=mean_err, stderr_error=stderr,
    )


def expander_error_bound(c, d: int, p: float, n: int) -> float:
    """Expected-error bound (3p/c)*N for first-stage recovery on a
    connected d-regular expander with edge expansion c."""
    _check_expander_args(c, d)
    if not (0.0 <= p <= 0.5):
        raise ValueError(f"p must be in [0, 1/2], got {p}")
    return float(3.0 * p * n / float(c))


def expander_error_given_bad(c, d: int, n_bad: int) -> float:
    """Deterministic form: misclassified nodes of the better sign are at
    most (2/(c*d)) times the realized bad edge count."""
    _check_expander_args(c, d)
    if n_bad < 0:
        raise ValueError(f"bad edge count must be >= 0, got {n_bad}")
    return float(2.0 * n_bad / (float(c) * d))


def _check_expander_args(c, d: int) -> None:
    if not float(c) > 0.0:
        raise ValueError(f"expansion constant must be positive, got {c}")
    if d < 3:
        raise ValueError(f"degree must be >= 3, got {d}")


def mincut_region_count_bound(cstar: int, n: int, i: int) -> float:
    """At most N^(2i/cstar) regions with boundary i when the min cut is
    cstar."""
    if cstar < 1:
        raise ValueError(f"min cut must be >= 1, got {cstar}")
    if n < 2:
        raise ValueError(f"N must be >= 2, got {n}")
    if i < 0:
        raise ValueError(f"boundary size must be >= 0, got {i}")
    return float(n ** (2.0 * i / cstar))


def mincut_recovery_condition(cstar: int, n: int, c: float) -> bool:
    """Whether the min cut clears c * log2(N), the threshold at which the
    region-count bound becomes summable."""
    if cstar < 1:
        raise ValueError(f"min cut must be >= 1, got {cstar}")
    if n < 2:
        raise ValueError(f"N must be >= 2, got {n}")
    if c <= 0:
        raise ValueError(f"constant must be positive, got {c}")
    return cstar >= c * math.log2(n)
