"""Pipe head loss laws and admittance sums over a set of parallel pipes.

All loss laws are odd, strictly increasing bijections of the real line,
so the inverse exists everywhere. Closed-form inverses are used for every
supported law; `rootfind.solve_monotone` is the fallback for laws without
one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .rootfind import solve_monotone


class UnboundedDerivativeError(ValueError):
    """The loss law has no finite derivative at the requested flow."""


@dataclass(frozen=True)
class HeadLossFn:
    """Base class for odd, strictly increasing flow -> head-loss laws."""

    def evaluate(self, q: float) -> float:
        raise NotImplementedError

    def invert(self, h: float) -> float:
        # generic bracketed fallback; subclasses override with closed forms
        return solve_monotone(lambda q: self.evaluate(q) - h, -1.0, 1.0, xtol=1e-12)

    def derivative(self, q: float) -> float:
        raise NotImplementedError

    def zero_flow_resistance(self) -> float:
        """Slope at q=0 (the no-leak, no-flow resistance)."""
        return self.derivative(0.0)

    def is_linear(self) -> bool:
        return False

    def shape_key(self) -> tuple:
        """Canonical shape identifier; two laws with equal keys are
        proportional to each other (differ by a positive constant)."""
        raise NotImplementedError


@dataclass(frozen=True)
class Linear(HeadLossFn):
    """U(q) = R q."""

    R: float

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError(f"R must be positive, got {self.R}")

    def evaluate(self, q: float) -> float:
        return self.R * q

    def invert(self, h: float) -> float:
        return h / self.R

    def derivative(self, q: float) -> float:
        return self.R

    def is_linear(self) -> bool:
        return True

    def shape_key(self) -> tuple:
        return ("power", 1.0)


@dataclass(frozen=True)
class SignedQuadratic(HeadLossFn):
    """U(q) = c |q| q."""

    c: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError(f"c must be positive, got {self.c}")

    def evaluate(self, q: float) -> float:
        return self.c * abs(q) * q

    def invert(self, h: float) -> float:
        return math.copysign(math.sqrt(abs(h) / self.c), h)

    def derivative(self, q: float) -> float:
        return 2.0 * self.c * abs(q)

    def shape_key(self) -> tuple:
        return ("power", 2.0)


@dataclass(frozen=True)
class QuadraticPlusLinear(HeadLossFn):
    """U(q) = c (q |q| + q)."""

    c: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError(f"c must be positive, got {self.c}")

    def evaluate(self, q: float) -> float:
        return self.c * (q * abs(q) + q)

    def invert(self, h: float) -> float:
        # for h >= 0 solve q^2 + q - h/c = 0, positive branch; odd extension
        a = abs(h) / self.c
        q = 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * a))
        return math.copysign(q, h)

    def derivative(self, q: float) -> float:
        return self.c * (2.0 * abs(q) + 1.0)

    def shape_key(self) -> tuple:
        return ("quadratic_plus_linear",)


@dataclass(frozen=True)
class PowerLaw(HeadLossFn):
    """U(q) = c sign(q) |q|^gamma."""

    c: float
    gamma: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    def evaluate(self, q: float) -> float:
        return math.copysign(self.c * abs(q) ** self.gamma, q)

    def invert(self, h: float) -> float:
        return math.copysign((abs(h) / self.c) ** (1.0 / self.gamma), h)

    def derivative(self, q: float) -> float:
        if q == 0.0:
            if self.gamma < 1.0:
                raise UnboundedDerivativeError(
                    f"power law with gamma={self.gamma} < 1 has unbounded slope at q=0"
                )
            if self.gamma > 1.0:
                return 0.0
            return self.c
        return self.c * self.gamma * abs(q) ** (self.gamma - 1.0)

    def is_linear(self) -> bool:
        return self.gamma == 1.0

    def shape_key(self) -> tuple:
        return ("power", self.gamma)


@dataclass(frozen=True)
class PipeSet:
    """Ordered parallel pipes between a shared inlet and outlet.

    Pipe indices are 1-based throughout the public API.
    """

    pipes: tuple[HeadLossFn, ...]
    lengths: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "pipes", tuple(self.pipes))
        if len(self.pipes) < 1:
            raise ValueError("need at least one pipe")
        if self.lengths is not None:
            object.__setattr__(self, "lengths", tuple(self.lengths))
            if len(self.lengths) != len(self.pipes):
                raise ValueError("lengths must match number of pipes")
            if any(L <= 0 for L in self.lengths):
                raise ValueError("pipe lengths must be positive")

    @property
    def n(self) -> int:
        return len(self.pipes)

    def pipe(self, j: int) -> HeadLossFn:
        if not 1 <= j <= self.n:
            raise IndexError(f"pipe index {j} out of range 1..{self.n}")
        return self.pipes[j - 1]

    def others(self, j: int) -> Iterator[HeadLossFn]:
        self.pipe(j)  # range check
        return (p for i, p in enumerate(self.pipes, start=1) if i != j)

    def admittance_excluding(self, j: int, dh: float) -> float:
        """Total flow through all pipes except j at head loss dh."""
        return sum(p.invert(dh) for p in self.others(j))

    def admittance_derivative_excluding(self, j: int, dh: float) -> float:
        """Slope of the admittance sum, via the inverse function rule."""
        total = 0.0
        for p in self.others(j):
            try:
                slope = p.derivative(p.invert(dh))
            except UnboundedDerivativeError:
                continue  # infinite slope contributes zero admittance slope
            if slope == 0.0:
                raise ZeroDivisionError(
                    f"loss law {p} has zero slope at head loss {dh}"
                )
            total += 1.0 / slope
        return total
