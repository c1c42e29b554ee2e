"""Single-data-point leak inference.

Each data point pins down exactly one consistent leak position per pipe.
Two equivalent residuals measure how far a hypothesized (pipe, position)
pair is from explaining the data: one in head space, one in flow space.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .headloss import PipeSet
from .hydraulics import DataPoint
from .rootfind import bisect, expand_bracket


class NoLeakError(ValueError):
    """q_in equals q_out: the data carries no leak to localize."""


@dataclass(frozen=True)
class LeakCandidate:
    """The unique position in pipe j consistent with one data point."""

    j: int
    x_j: float
    residual_check: float


@dataclass(frozen=True)
class PartialDataPoint:
    """A data point with exactly one of the four sensors missing."""

    h_in: float | None = None
    h_out: float | None = None
    q_in: float | None = None
    q_out: float | None = None

    def __post_init__(self):
        missing = [
            name
            for name in ("h_in", "h_out", "q_in", "q_out")
            if getattr(self, name) is None
        ]
        if len(missing) != 1:
            raise ValueError(f"exactly one field must be missing, got {missing}")

    @property
    def missing(self) -> str:
        for name in ("h_in", "h_out", "q_in", "q_out"):
            if getattr(self, name) is None:
                return name
        raise AssertionError


def residual(pipes: PipeSet, j: int, x_j: float, d: DataPoint) -> float:
    """Head-space residual of the hypothesis "leak in pipe j at x_j"."""
    U_j = pipes.pipe(j)
    dh = d.dh
    G = pipes.admittance_excluding(j, dh)
    return (
        dh
        - x_j * U_j.evaluate(d.q_in - G)
        - (1.0 - x_j) * U_j.evaluate(d.q_out - G)
    )


def candidate_position(pipes: PipeSet, j: int, d: DataPoint) -> float:
    """The unique x_j in (0,1) zeroing the pipe-j residual."""
    if d.q_in == d.q_out:
        raise NoLeakError("q_in equals q_out; no leak position can be inferred")
    U_j = pipes.pipe(j)
    dh = d.dh
    G = pipes.admittance_excluding(j, dh)
    head_in = U_j.evaluate(d.q_in - G)
    head_out = U_j.evaluate(d.q_out - G)
    x_j = (dh - head_out) / (head_in - head_out)
    if not 0.0 < x_j < 1.0:
        warnings.warn(
            f"candidate position {x_j} for pipe {j} falls outside (0,1); "
            "the data point is not consistent with a single leak",
            stacklevel=2,
        )
    return x_j


def all_candidates(pipes: PipeSet, d: DataPoint) -> list[LeakCandidate]:
    """One leak candidate per pipe, with its residual check."""
    out = []
    for j in range(1, pipes.n + 1):
        x_j = candidate_position(pipes, j, d)
        out.append(LeakCandidate(j=j, x_j=x_j, residual_check=residual(pipes, j, x_j, d)))
    return out


def estimate_outflow(
    pipes: PipeSet, j: int, x_j: float, dh: float, q_in: float
) -> float:
    """Outflow implied by (dh, q_in) under the hypothesis (j, x_j)."""
    U_j = pipes.pipe(j)
    G = pipes.admittance_excluding(j, dh)
    head_out = dh / (1.0 - x_j) - (x_j / (1.0 - x_j)) * U_j.evaluate(q_in - G)
    return U_j.invert(head_out) + G


def estimate_inflow(
    pipes: PipeSet, j: int, x_j: float, dh: float, q_out: float
) -> float:
    """Inflow implied by (dh, q_out) under the hypothesis (j, x_j)."""
    U_j = pipes.pipe(j)
    G = pipes.admittance_excluding(j, dh)
    head_in = dh / x_j - ((1.0 - x_j) / x_j) * U_j.evaluate(q_out - G)
    return U_j.invert(head_in) + G


def residual_bar(pipes: PipeSet, j: int, x_j: float, d: DataPoint) -> float:
    """Flow-space residual: measured minus estimated outflow."""
    return d.q_out - estimate_outflow(pipes, j, x_j, d.dh, d.q_in)


def complete_data_point(
    pipes: PipeSet, j: int, x_j: float, p: PartialDataPoint
) -> DataPoint:
    """Fill in the one missing sensor so the pipe-j residual vanishes.

    Flows are closed-form; heads need a bracketed root-find on the strictly
    monotone residual.
    """
    if not 0.0 < x_j < 1.0:
        raise ValueError(f"x_j must be in (0,1), got {x_j}")
    missing = p.missing
    if missing == "q_out":
        q_out = estimate_outflow(pipes, j, x_j, p.h_in - p.h_out, p.q_in)
        return DataPoint(p.h_in, p.h_out, p.q_in, q_out)
    if missing == "q_in":
        q_in = estimate_inflow(pipes, j, x_j, p.h_in - p.h_out, p.q_out)
        return DataPoint(p.h_in, p.h_out, q_in, p.q_out)

    if missing == "h_in":
        def f(h: float) -> float:
            return residual(pipes, j, x_j, DataPoint(h, p.h_out, p.q_in, p.q_out))
        seed = p.h_out
    else:  # h_out
        def f(h: float) -> float:
            return residual(pipes, j, x_j, DataPoint(p.h_in, h, p.q_in, p.q_out))
        seed = p.h_in
    lo, hi, _, _ = expand_bracket(f, seed - 1.0, seed + 1.0)
    h = bisect(f, lo, hi, xtol=1e-11, max_iter=200)
    if missing == "h_in":
        return DataPoint(h, p.h_out, p.q_in, p.q_out)
    return DataPoint(p.h_in, h, p.q_in, p.q_out)
