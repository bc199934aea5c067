"""Single-slot delay channel with a bounded, policy-driven delay."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import Packet
from .errors import ChannelProtocolError, ConfigError

DELAY_KINDS = ("constant", "uniform-random", "adversarial-max")


@dataclass(frozen=True)
class DelayPolicy:
    kind: str = "uniform-random"
    gamma: float = 0.005
    seed: int = 0

    def __post_init__(self):
        if self.kind not in DELAY_KINDS:
            raise ConfigError(f"unknown delay kind {self.kind!r}; expected one of {DELAY_KINDS}")
        if self.gamma < 0:
            raise ConfigError(f"delay bound gamma must be >= 0, got {self.gamma}")


def sample_delays(policy: DelayPolicy, n: int, margin: float = 0.0, rng=None) -> np.ndarray:
    """Draw ``n`` delays in ``[0, gamma - margin]`` according to ``policy``."""
    bound = policy.gamma - margin
    if bound < -1e-15:
        raise ConfigError(
            f"delay bound gamma={policy.gamma} is below the grid margin {margin}"
        )
    bound = max(bound, 0.0)
    if policy.kind == "uniform-random":
        rng = np.random.default_rng(policy.seed) if rng is None else rng
        return rng.uniform(0.0, bound, size=n)
    return np.full(n, bound)


class Channel:
    """Carries at most one packet; delivers it unmodified after the sampled delay.

    ``margin`` is subtracted from ``gamma`` before sampling. A simulator that
    delivers at the first grid instant after ``t_c`` passes its step length here
    so that rounding up to the grid never exceeds ``gamma``.
    """

    def __init__(self, policy: DelayPolicy, margin: float = 0.0):
        if policy.gamma - margin < -1e-15:
            raise ConfigError(
                f"delay bound gamma={policy.gamma} must be at least one grid step ({margin})"
            )
        self.policy = policy
        self.margin = margin
        self._rng = np.random.default_rng(policy.seed)
        self.in_flight: tuple[Packet, float, float] | None = None
        self.delivered = 0

    def sample_delay(self) -> float:
        return float(sample_delays(self.policy, 1, self.margin, self._rng)[0])

    def submit(self, pkt: Packet, t_s: float) -> float:
        """Accept ``pkt`` sent at ``t_s``; return its scheduled delivery time."""
        if self.in_flight is not None:
            raise ChannelProtocolError(
                f"packet submitted at t={t_s} while another is in flight until t={self.in_flight[1]}"
            )
        t_c = t_s + self.sample_delay()
        self.in_flight = (pkt, t_c, t_s)
        return t_c

    def poll(self, t: float, eps: float = 1e-12) -> Packet | None:
        """Return the in-flight packet if it is due at time ``t``, else ``None``."""
        if self.in_flight is None:
            return None
        pkt, t_c, _ = self.in_flight
        if t_c <= t + eps:
            self.in_flight = None
            self.delivered += 1
            return pkt
        return None

    @property
    def scheduled(self) -> float | None:
        return None if self.in_flight is None else self.in_flight[1]
