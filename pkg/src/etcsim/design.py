"""Closed-form design and rate formulas.

Everything here is a pure function of the plant constants and the design knobs
``(J, rho0, b, gamma)``. Two packet-size notions coexist:

* the real-valued sufficient bound ``max{0, 1 + log2(A b gamma / (A delta))}``
  and its integer version ``max{1, ceil(.)}`` (:func:`packet_size_bound`);
* the constructive size actually used by the codec
  (:func:`constructive_packet_size`), which guarantees a unique decoding
  candidate.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

from .errors import ConfigError, InfeasibleDesignError
from .model import PlantParams

LN2 = math.log(2.0)


def _check_rho0(rho0: float) -> None:
    if not 0.0 < rho0 < 1.0:
        raise ConfigError(f"rho0 must lie in (0, 1), got {rho0}")


def min_J(p: PlantParams, rho0: float, gamma: float) -> float:
    """Feasibility limit ``(M / (A rho0)) (e^{A gamma} - 1)``; J must exceed it strictly."""
    _check_rho0(rho0)
    if gamma < 0:
        raise ConfigError(f"gamma must be >= 0, got {gamma}")
    return p.M / (p.A * rho0) * math.expm1(p.A * gamma)


def check_feasible(p: PlantParams, J: float, rho0: float, gamma: float) -> None:
    limit = min_J(p, rho0, gamma)
    if not J > limit:
        raise InfeasibleDesignError(
            f"J = {J!r} is infeasible: it must exceed min_J = {limit!r}", min_J=limit
        )


def resolution_log_term(p: PlantParams, J: float, rho0: float, gamma: float) -> float:
    """``ln(1 + (rho0 - (M/(J A))(e^{A gamma} - 1)) / e^{A gamma})``, i.e. ``A * delta``."""
    check_feasible(p, J, rho0, gamma)
    grow = math.expm1(p.A * gamma)
    arg = (rho0 - p.M / (J * p.A) * grow) / math.exp(p.A * gamma)
    if not arg > 0:
        # rounding can push a barely-feasible J over the edge
        raise InfeasibleDesignError(
            f"J = {J!r} leaves no timing budget (log argument {1 + arg!r} <= 1)",
            min_J=min_J(p, rho0, gamma),
        )
    return math.log1p(arg)


def constructive_packet_size(gamma: float, delta: float) -> tuple[int, int]:
    """Cell count ``N`` and packet size ``g`` of the wrap-around timestamp quantizer.

    One sign bit suffices when ``gamma <= delta``; otherwise the wrap period
    ``N delta`` must cover the decoding window ``gamma + delta`` with one spare cell.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if gamma <= delta:
        return 1, 1
    N = math.ceil(gamma / delta) + 2
    return N, 1 + math.ceil(math.log2(N))


def packet_size_bound(p: PlantParams, J: float, rho0: float, b: float, gamma: float,
                      clamp: bool = True) -> float:
    """Real-valued sufficient packet size in bits.

    Clamped at 0 by default; ``clamp=False`` returns the raw ``1 + log2(.)``
    (``-inf`` at ``gamma == 0``).
    """
    if not b > 1:
        raise ConfigError(f"slack factor b must exceed 1, got {b}")
    log_term = resolution_log_term(p, J, rho0, gamma)
    if gamma == 0:
        return 0.0 if clamp else -math.inf
    raw = 1.0 + math.log2(p.A * b * gamma / log_term)
    return max(0.0, raw) if clamp else raw


def packet_size_bound_int(p: PlantParams, J: float, rho0: float, b: float, gamma: float) -> int:
    """Integer packet size: ``max{1, ceil(1 + log2(A b gamma / ln(...)))}``."""
    if not b > 1:
        raise ConfigError(f"slack factor b must exceed 1, got {b}")
    log_term = resolution_log_term(p, J, rho0, gamma)
    if gamma == 0:
        return 1
    return max(1, math.ceil(1.0 + math.log2(p.A * b * gamma / log_term)))


def _contraction_log(p: PlantParams, J: float, rho0: float) -> float:
    _check_rho0(rho0)
    if not J > 0:
        raise ConfigError(f"J must be positive, got {J}")
    drift = p.M / p.A
    return math.log((J + drift) / (rho0 * J + drift))


def min_inter_event(p: PlantParams, J: float, rho0: float) -> float:
    """Lower bound on the time between consecutive triggers."""
    return _contraction_log(p, J, rho0) / p.A


def max_trigger_rate(p: PlantParams, J: float, rho0: float) -> float:
    """Upper bound on triggers per second (reciprocal of :func:`min_inter_event`)."""
    return p.A / _contraction_log(p, J, rho0)


def sufficient_rate(p: PlantParams, J: float, rho0: float, b: float, gamma: float) -> float:
    """Sufficient information rate in bits/s: trigger-rate bound times packet-size bound."""
    return max_trigger_rate(p, J, rho0) * packet_size_bound(p, J, rho0, b, gamma)


def datarate_threshold(p: PlantParams) -> float:
    """Classical data-rate threshold ``A / ln 2`` in bits/s."""
    return p.A / LN2


@dataclass(frozen=True)
class JRule:
    """Threshold schedule ``J(gamma) = min_J(gamma) + offset``."""

    offset: float

    def __post_init__(self):
        if not self.offset > 0:
            raise ConfigError(f"J-rule offset must be positive, got {self.offset}")

    def __call__(self, p: PlantParams, rho0: float, gamma: float) -> float:
        return min_J(p, rho0, gamma) + self.offset


J_RULES = {
    "wide": JRule(0.1),
    "narrow": JRule(0.005),
}


def resolve_j_rule(name_or_offset: str | float) -> JRule:
    if isinstance(name_or_offset, str) and name_or_offset in J_RULES:
        return J_RULES[name_or_offset]
    try:
        return JRule(float(name_or_offset))
    except ValueError:
        raise ConfigError(
            f"unknown J rule {name_or_offset!r}; use one of {sorted(J_RULES)} or a positive offset"
        ) from None


@dataclass(frozen=True)
class RateCurvePoint:
    gamma: float
    J: float
    delta: float
    g_paper_real: float
    g_paper_int: int
    g_constructive: int
    tau_min: float
    Rtr_bound: float
    Rs_bound: float
    datarate_threshold: float

    @property
    def sufficient_rate(self) -> float:
        return self.Rs_bound

    def as_row(self) -> dict:
        return asdict(self)


SWEEP_COLUMNS = (
    "gamma", "J", "delta", "g_paper_real", "g_paper_int", "g_constructive",
    "tau_min", "Rtr_bound", "Rs_bound", "datarate_threshold",
)


def rate_curve_point(p: PlantParams, rho0: float, b: float, J: float, gamma: float) -> RateCurvePoint:
    delta = resolution_log_term(p, J, rho0, gamma) / p.A
    _, g_c = constructive_packet_size(gamma, delta)
    return RateCurvePoint(
        gamma=gamma,
        J=J,
        delta=delta,
        g_paper_real=packet_size_bound(p, J, rho0, b, gamma),
        g_paper_int=packet_size_bound_int(p, J, rho0, b, gamma),
        g_constructive=g_c,
        tau_min=min_inter_event(p, J, rho0),
        Rtr_bound=max_trigger_rate(p, J, rho0),
        Rs_bound=sufficient_rate(p, J, rho0, b, gamma),
        datarate_threshold=datarate_threshold(p),
    )


def rate_curve_sweep(
    p: PlantParams,
    rho0: float,
    b: float,
    J_rule: Callable[[PlantParams, float, float], float],
    gamma_grid: Sequence[float] | Iterable[float],
) -> list[RateCurvePoint]:
    """Evaluate the design formulas along an increasing grid of delay bounds."""
    grid = [float(g) for g in gamma_grid]
    if not grid:
        raise ConfigError("gamma grid is empty")
    if any(b2 <= a for a, b2 in zip(grid, grid[1:])):
        raise ConfigError("gamma grid must be strictly increasing")
    points = []
    for i, gamma in enumerate(grid):
        try:
            points.append(rate_curve_point(p, rho0, b, J_rule(p, rho0, gamma), gamma))
        except InfeasibleDesignError as exc:
            raise InfeasibleDesignError(f"grid point {i} (gamma={gamma}): {exc}", exc.min_J) from exc
    return points


def rate_crossing(
    p: PlantParams,
    rho0: float,
    b: float,
    J_rule: Callable[[PlantParams, float, float], float],
    lo: float,
    hi: float,
    level: float | None = None,
    tol: float = 1e-10,
) -> float:
    """Bisect for the delay bound where the sufficient rate reaches ``level``.

    ``level`` defaults to the data-rate threshold. The curve must be below the
    level at ``lo`` and at or above it at ``hi``.
    """
    level = datarate_threshold(p) if level is None else level

    def f(gamma: float) -> float:
        return sufficient_rate(p, J_rule(p, rho0, gamma), rho0, b, gamma) - level

    if not (f(lo) < 0 <= f(hi)):
        raise ValueError(f"level {level} is not bracketed by [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return hi
