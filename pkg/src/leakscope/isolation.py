"""Multi-data-point isolation of the leaking pipe.

Two complementary procedures: candidate-consistency across hydraulic
states (the leak must not move as the pressures vary), and power-law leak
function fitting against each pipe's apparent leak head (resolves the
otherwise hopeless all-linear case).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .headloss import PipeSet
from .hydraulics import DataPoint
from .localization import NoLeakError, all_candidates
from .sensitivity import detect_inherent_ambiguity


class TooFewPointsError(ValueError):
    """Isolation needs at least two distinct hydraulic states."""


@dataclass(frozen=True)
class IsolationVerdict:
    candidate_series: dict[int, tuple[float, ...]]  # pipe -> x_j per data point
    spreads: dict[int, float]  # pipe -> max - min of its series
    isolated: bool
    k_hat: int | None = None
    x_hat: float | None = None
    candidate_pipes: frozenset[int] = frozenset()
    reason: str = ""


def isolate_by_consistency(
    pipes: PipeSet, data: list[DataPoint], eps_spread: float = 1e-6
) -> IsolationVerdict:
    """The leaking pipe is the one whose candidate position stays put."""
    if len(data) < 2:
        raise TooFewPointsError(
            f"need at least 2 data points to isolate, got {len(data)}"
        )
    for d in data:
        if d.q_in == d.q_out:
            raise NoLeakError("a data point has q_in == q_out; nothing to isolate")

    series: dict[int, list[float]] = {j: [] for j in range(1, pipes.n + 1)}
    for d in data:
        for cand in all_candidates(pipes, d):
            series[cand.j].append(cand.x_j)
    spreads = {j: max(s) - min(s) for j, s in series.items()}
    plausible = sorted(j for j, sp in spreads.items() if sp <= eps_spread)

    frozen_series = {j: tuple(s) for j, s in series.items()}
    if len(plausible) == 1:
        k_hat = plausible[0]
        return IsolationVerdict(
            candidate_series=frozen_series,
            spreads=spreads,
            isolated=True,
            k_hat=k_hat,
            x_hat=sum(series[k_hat]) / len(series[k_hat]),
        )
    if not plausible:
        reason = "no pipe has a consistent candidate position"
    else:
        ambiguous = detect_inherent_ambiguity(pipes)
        pair_reasons = [
            f"pipes {a}-{b} {why}" for (a, b), why in ambiguous
            if a in plausible and b in plausible
        ]
        reason = (
            "; ".join(pair_reasons)
            if pair_reasons
            else "multiple pipes have consistent candidate positions"
        )
    return IsolationVerdict(
        candidate_series=frozen_series,
        spreads=spreads,
        isolated=False,
        candidate_pipes=frozenset(plausible),
        reason=reason,
    )


def apparent_leak_head(pipes: PipeSet, j: int, x_j: float, d: DataPoint) -> float:
    """Head at the hypothesized leak in pipe j, from the inlet side."""
    U_j = pipes.pipe(j)
    G = pipes.admittance_excluding(j, d.dh)
    return d.h_in - x_j * U_j.evaluate(d.q_in - G)


def apparent_leak_flow(d: DataPoint) -> float:
    """Leak flow implied by the boundary flows; pipe-independent."""
    return d.q_in - d.q_out


@dataclass(frozen=True)
class LeakFitResult:
    j: int
    C_j: float
    beta_j: float
    rmse: float
    negative_head: bool
    accepted: bool


def fit_leak_function(
    samples: list[tuple[float, float]], h_y: float = 0.0, eps_fit: float = 1e-6
) -> LeakFitResult:
    """Least-squares power-law fit q = C (h - h_y)^beta in log-log space.

    Samples with non-positive pressure head are physically unreasonable
    (outflow against no pressure) and cause outright rejection.
    """
    if len(samples) < 3:
        raise ValueError(f"need at least 3 samples, got {len(samples)}")
    heads = np.array([h for h, _ in samples], dtype=float)
    flows = np.array([q for _, q in samples], dtype=float)
    if len(set(flows.tolist())) < 3:
        raise ValueError("need at least 3 distinct leak flows")
    if np.any(heads - h_y <= 0.0):
        return LeakFitResult(
            j=0, C_j=math.nan, beta_j=math.nan, rmse=math.inf,
            negative_head=True, accepted=False,
        )
    log_h = np.log(heads - h_y)
    if np.ptp(log_h) == 0.0:
        raise ValueError("zero variance in log pressure head; fit is degenerate")
    log_q = np.log(flows)
    A = np.column_stack([np.ones_like(log_h), log_h])
    (log_C, beta), *_ = np.linalg.lstsq(A, log_q, rcond=None)
    C, beta = math.exp(log_C), float(beta)
    pred = C * (heads - h_y) ** beta
    rmse = float(np.sqrt(np.mean((flows - pred) ** 2)))
    return LeakFitResult(
        j=0, C_j=C, beta_j=beta, rmse=rmse,
        negative_head=False, accepted=rmse <= eps_fit,
    )


def isolate_by_leak_fit(
    pipes: PipeSet,
    data: list[DataPoint],
    candidates: dict[int, float],
    h_y: dict[int, float] | float = 0.0,
    eps_fit: float = 1e-6,
) -> list[LeakFitResult]:
    """Fit a power-law leak per pipe hypothesis; rank by fit quality.

    `candidates` maps each pipe to its (constant) candidate position.
    Rejected fits (negative pressure head) rank last; ties break on pipe
    index for determinism.
    """
    if len(data) < 3:
        raise TooFewPointsError(f"need at least 3 data points, got {len(data)}")
    results: list[LeakFitResult] = []
    for j in sorted(candidates):
        x_j = candidates[j]
        hy_j = h_y[j] if isinstance(h_y, dict) else h_y
        samples = [
            (apparent_leak_head(pipes, j, x_j, d), apparent_leak_flow(d)) for d in data
        ]
        fit = fit_leak_function(samples, h_y=hy_j, eps_fit=eps_fit)
        results.append(
            LeakFitResult(
                j=j, C_j=fit.C_j, beta_j=fit.beta_j, rmse=fit.rmse,
                negative_head=fit.negative_head, accepted=fit.accepted,
            )
        )
    return sorted(results, key=lambda r: (r.negative_head, r.rmse, r.j))
