"""Scalar plant, controller-side estimator and error-growth bounds.

All propagation uses the exact solution of ``dx/dt = A x + B u + w`` for inputs
held constant over the step, so simulated trajectories never leave the
continuous-time envelopes the design formulas rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class PlantParams:
    """Scalar unstable plant ``dx/dt = A x + B u + w`` with ``|w| <= M``, ``|x(0)| <= L``."""

    A: float
    B: float
    M: float = 0.0
    L: float = 1.0

    def __post_init__(self):
        if not self.A > 0:
            raise ConfigError(f"A must be positive (unstable mode), got {self.A}")
        if self.M < 0:
            raise ConfigError(f"disturbance bound M must be >= 0, got {self.M}")
        if not self.L > 0:
            raise ConfigError(f"initial bound L must be positive, got {self.L}")


@dataclass(frozen=True)
class ControllerGain:
    K: float
    alpha: float

    @classmethod
    def from_gain(cls, K: float, p: PlantParams) -> "ControllerGain":
        alpha = p.B * K - p.A
        if not alpha > 0:
            raise ConfigError(f"gain K={K} does not stabilize A={p.A}, B={p.B} (alpha={alpha})")
        return cls(K=K, alpha=alpha)

    @classmethod
    def pole_mirror(cls, p: PlantParams) -> "ControllerGain":
        """Place the closed-loop pole at ``-A``."""
        if p.B == 0:
            raise ConfigError("B = 0: the plant is not stabilizable")
        return cls.from_gain(2.0 * p.A / p.B, p)


def input_gain(lam, h: float):
    """``(e^{lam h} - 1) / lam`` elementwise, equal to ``h`` where ``lam == 0``."""
    lam = np.asarray(lam, dtype=float)
    safe = np.where(lam == 0.0, 1.0, lam)
    return np.where(lam == 0.0, h, np.expm1(lam * h) / safe)


def _check_step(h: float) -> None:
    if not h > 0:
        raise ValueError(f"step length must be positive, got {h}")


def step_plant_exact(x: float, u: float, w: float, h: float, p: PlantParams) -> float:
    """Advance the plant by ``h`` seconds with ``u`` and ``w`` held constant."""
    _check_step(h)
    if abs(w) > p.M:
        raise ValueError(f"|w| = {abs(w)} exceeds the disturbance bound M = {p.M}")
    growth = math.exp(p.A * h)
    return growth * x + math.expm1(p.A * h) / p.A * (p.B * u + w)


def step_estimator(xhat: float, u: float, h: float, p: PlantParams) -> float:
    """Controller-side estimate between receptions: the plant map with ``w = 0``."""
    _check_step(h)
    growth = math.exp(p.A * h)
    return growth * xhat + math.expm1(p.A * h) / p.A * (p.B * u + 0.0)


def z_growth_bound(z0: float, tau: float, p: PlantParams) -> float:
    """Worst-case ``|z|`` after ``tau`` seconds without reception, starting from ``|z| = z0``."""
    if tau < 0:
        raise ValueError(f"elapsed time must be >= 0, got {tau}")
    if z0 < 0:
        raise ValueError(f"z0 is a magnitude, got {z0}")
    return z0 * math.exp(p.A * tau) + p.M / p.A * math.expm1(p.A * tau)


def error_peak(J: float, gamma: float, p: PlantParams) -> float:
    """Largest ``|z|`` reachable while a packet triggered at ``|z| = J`` is in flight."""
    return z_growth_bound(J, gamma, p)
