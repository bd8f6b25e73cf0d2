"""Sample-point statistics and parameter functionals.

Statistics are plain functions GraphPair -> float.  The alignment
strength family adopts the convention value CONVENTION_VALUE at the
two degenerate points (both vectors all zeros, or both all ones),
where its denominator vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

from .model import GraphPair, ModelParams

# Value assigned to str-family statistics at the two degenerate points.
# Any value in [0, 1] is admissible; 0 is fixed here and exposed so
# sensitivity tests can evaluate other choices.
CONVENTION_VALUE = 0.0


class Tern(IntEnum):
    """Ternary component labels, in lexicographic order (STAR sorts as 1/2)."""

    ZERO = 0
    STAR = 1
    ONE = 2


@dataclass(frozen=True)
class DisagreementVector:
    """Per-component ternary summary of a sample point."""

    h: tuple[Tern, ...]

    @property
    def delta(self) -> int:
        return sum(1 for t in self.h if t == Tern.STAR)

    @property
    def n(self) -> int:
        return len(self.h)

    def lex_index(self) -> int:
        """Base-3 index, leftmost component most significant."""
        idx = 0
        for t in self.h:
            idx = 3 * idx + int(t)
        return idx

    def class_size(self) -> int:
        return 1 << self.delta


class Densities(NamedTuple):
    d_x: float
    d_y: float
    d_xy: float
    d_cap: float
    d_cup: float


@dataclass(frozen=True)
class ParamFunctionals:
    mu: float
    sigma2: float
    rho_h: float
    rho_t: float
    expected_delta: float


def disagreement_vector(point: GraphPair) -> DisagreementVector:
    h = []
    for xi, yi in zip(point.x, point.y):
        if xi != yi:
            h.append(Tern.STAR)
        else:
            h.append(Tern.ONE if xi == 1 else Tern.ZERO)
    return DisagreementVector(tuple(h))


def densities(point: GraphPair) -> Densities:
    n = point.n
    sx = sum(point.x)
    sy = sum(point.y)
    scap = sum(xi * yi for xi, yi in zip(point.x, point.y))
    d_x = sx / n
    d_y = sy / n
    d_cap = scap / n
    return Densities(
        d_x=d_x,
        d_y=d_y,
        d_xy=0.5 * (d_x + d_y),
        d_cap=d_cap,
        d_cup=d_x + d_y - d_cap,
    )


def delta_stat(point: GraphPair) -> int:
    """Number of components where x and y disagree."""
    return sum((xi - yi) ** 2 for xi, yi in zip(point.x, point.y))


def is_degenerate(point: GraphPair) -> bool:
    """True at the two all-equal points where the str family needs a convention."""
    return all(b == 0 for b in (*point.x, *point.y)) or all(
        b == 1 for b in (*point.x, *point.y)
    )


def alignment_strength(point: GraphPair, convention: float = CONVENTION_VALUE) -> float:
    """1 - (Delta/N) / (dX(1-dY) + (1-dX)dY), convention at degenerate points.

    Equivalently (dCap - dX*dY) / (dXY - dX*dY); both denominators vanish
    exactly at the two degenerate points.
    """
    if is_degenerate(point):
        return convention
    d = densities(point)
    denom = d.d_x * (1.0 - d.d_y) + (1.0 - d.d_x) * d.d_y
    return 1.0 - (delta_stat(point) / point.n) / denom


def alignment_strength_ratio_form(
    point: GraphPair, convention: float = CONVENTION_VALUE
) -> float:
    """The covariance-ratio form of alignment strength (same function)."""
    if is_degenerate(point):
        return convention
    d = densities(point)
    dxdy = d.d_x * d.d_y
    return (d.d_cap - dxdy) / (d.d_xy - dxdy)


def param_functionals(params: ModelParams) -> ParamFunctionals:
    """mu, sigma^2 (population), rho_H, rho_T, and E(Delta).

    rho_H and rho_T take the convention value 0 when mu is 0 or 1.
    """
    n = params.n_components
    mu = sum(params.p) / n
    sigma2 = sum((pi - mu) ** 2 for pi in params.p) / n
    s = sum((1.0 - ri) * pi * (1.0 - pi) for pi, ri in zip(params.p, params.rho))
    if mu in (0.0, 1.0):
        rho_h = 0.0
        rho_t = 0.0
    else:
        denom = mu * (1.0 - mu)
        rho_h = sigma2 / denom
        rho_t = 1.0 - s / (n * denom)
    return ParamFunctionals(
        mu=mu,
        sigma2=sigma2,
        rho_h=rho_h,
        rho_t=rho_t,
        expected_delta=2.0 * s,
    )
