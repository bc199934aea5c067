"""Triggering rule, sign + wrapped-timestamp packets, and the jump update.

The sensor fires when ``|z| = J`` and sends the sign of ``z`` plus the index of
the cell containing ``t_s`` in a cyclic quantizer of period ``P = N * delta``.
Knowing the reception time and the delay bound, the controller picks the one
cell edge inside ``(t_c - gamma - delta, t_c]`` and ages ``+-J`` to ``t_c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .design import check_feasible, constructive_packet_size, resolution_log_term
from .errors import ConfigError, DecoderAmbiguityError
from .model import PlantParams


@dataclass(frozen=True)
class TriggerDesign:
    J: float
    rho0: float
    b: float
    gamma: float
    delta: float
    N: int
    P: float
    g: int

    @property
    def sign_only(self) -> bool:
        return self.g == 1


def should_trigger(z: float, design: TriggerDesign, in_flight: bool) -> bool:
    """Grid-level check of the triggering condition, suppressed while a packet is in flight."""
    return (not in_flight) and abs(z) >= design.J


def quantizer_resolution(p: PlantParams, J: float, rho0: float, gamma: float) -> float:
    """Largest timestamp error ``|t_s - q|`` that still keeps the post-jump error below ``rho0 J``."""
    return resolution_log_term(p, J, rho0, gamma) / p.A


def build_design(p: PlantParams, J: float, rho0: float, b: float, gamma: float) -> TriggerDesign:
    if not b > 1:
        raise ConfigError(f"slack factor b must exceed 1, got {b}")
    check_feasible(p, J, rho0, gamma)
    delta = quantizer_resolution(p, J, rho0, gamma)
    N, g = constructive_packet_size(gamma, delta)
    return TriggerDesign(J=J, rho0=rho0, b=b, gamma=gamma, delta=delta, N=N, P=N * delta, g=g)


@dataclass(frozen=True)
class Packet:
    sign: int
    cell_index: int | None
    bits: int
    # bookkeeping for logs and tests; decode() never looks at it
    meta_t_send: float = field(default=math.nan, compare=False)

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if (self.bits == 1) != (self.cell_index is None):
            raise ValueError("a 1-bit packet carries no cell index and vice versa")

    def to_wire(self) -> str:
        """``g,sign,cell`` with sign as ``+``/``-`` and an empty cell for sign-only packets."""
        cell = "" if self.cell_index is None else str(self.cell_index)
        return f"{self.bits},{'+' if self.sign > 0 else '-'},{cell}"

    @classmethod
    def from_wire(cls, text: str) -> "Packet":
        bits, sign, cell = text.split(",")
        return cls(
            sign=1 if sign == "+" else -1,
            cell_index=int(cell) if cell else None,
            bits=int(bits),
        )

    def to_bits(self) -> str:
        """Bit string of length ``bits``: the sign bit followed by the cell index."""
        head = "1" if self.sign > 0 else "0"
        if self.cell_index is None:
            return head
        return head + format(self.cell_index, f"0{self.bits - 1}b")

    @classmethod
    def from_bits(cls, bits: str) -> "Packet":
        sign = 1 if bits[0] == "1" else -1
        cell = int(bits[1:], 2) if len(bits) > 1 else None
        return cls(sign=sign, cell_index=cell, bits=len(bits))


def encode(t_s: float, z_sign: int, design: TriggerDesign) -> Packet:
    if design.sign_only:
        return Packet(sign=z_sign, cell_index=None, bits=1, meta_t_send=t_s)
    r = t_s % design.P
    cell = int(math.floor(r / design.delta))
    # snap rounding residue on a cell edge up to that edge
    if (cell + 1) * design.delta - r <= 1e-12 * (1.0 + abs(t_s)):
        cell += 1
    cell = max(cell, 0) % design.N
    return Packet(sign=z_sign, cell_index=cell, bits=design.g, meta_t_send=t_s)


def decode(pkt: Packet, t_c: float, design: TriggerDesign) -> float:
    """Reconstruct the quantized trigger time from the cell index and the reception time."""
    if pkt.cell_index is None:
        return t_c - design.gamma
    eps = 1e-12 * (1.0 + abs(t_c))
    lo = t_c - design.gamma - design.delta
    edge = pkt.cell_index * design.delta
    m_hi = math.floor((t_c + eps - edge) / design.P)
    found = [
        edge + m * design.P
        for m in (m_hi, m_hi - 1, m_hi - 2)
        if lo - eps < edge + m * design.P <= t_c + eps
    ]
    if len(found) != 1:
        raise DecoderAmbiguityError(
            f"{len(found)} candidates for cell {pkt.cell_index} in ({lo}, {t_c}]: {found}"
        )
    return found[0]


def reconstruct_zbar(z_sign: int, J: float, A: float, t_c: float, q: float) -> float:
    return z_sign * J * math.exp(A * (t_c - q))


def apply_jump(xhat: float, zbar: float) -> float:
    return xhat + zbar
