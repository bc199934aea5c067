"""Closed-loop event-triggered simulation on a fixed grid.

The engine works on a diagonal (modal) system with one unstable mode ``m``.
A scalar plant is the one-mode case; the pendulum is four modes of which only
mode ``m`` is event-triggered while the others are estimated open loop.

Timing model
------------
* ``u`` is held over each grid step (``u_k = -kt . shat_k``); plant and
  estimator use exact exponential updates, so ``z = s - shat`` obeys
  ``dz/dt = lam z + w`` between receptions regardless of ``u``.
* The sensor watches ``|z_m|`` continuously: the trigger instant is the exact
  crossing of ``J`` inside the step, not the next grid point.
* The controller acts on grid instants: a packet scheduled for ``t_c`` is
  processed at the first grid time ``>= t_c``. Delays are sampled in
  ``[0, gamma - h]`` so the effective delay never exceeds ``gamma``.
* No new trigger is allowed while a packet is in flight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import _kernels
from .channel import Channel, DelayPolicy
from .codec import (
    Packet, TriggerDesign, apply_jump, build_design, decode, encode, reconstruct_zbar,
)
from .design import (
    JRule, datarate_threshold, max_trigger_rate, min_inter_event, sufficient_rate,
)
from .errors import ConfigError, InvariantViolation
from .model import ControllerGain, PlantParams, error_peak, input_gain
from .pendulum import PendulumModel, reference_model
from .stability import Certificate, grid_certificate, modal_error_bounds

DISTURBANCE_POLICIES = ("zero", "uniform", "adversarial", "opposing")
DISTURBANCE_FRAMES = ("modal", "physical")

CONTRACT_RTOL = 1e-9


@dataclass(frozen=True)
class ModalSystem:
    lam: np.ndarray
    Bt: np.ndarray
    kt: np.ndarray
    Pmat: np.ndarray
    Pinv: np.ndarray
    m: int

    @property
    def n(self) -> int:
        return len(self.lam)

    @classmethod
    def scalar(cls, plant: PlantParams, gain: ControllerGain) -> "ModalSystem":
        one = np.eye(1)
        return cls(np.array([plant.A]), np.array([plant.B]), np.array([gain.K]), one, one, 0)

    @classmethod
    def from_model(cls, model: PendulumModel) -> "ModalSystem":
        return cls(model.eigvals.copy(), model.Btil.copy(), model.ktil.copy(),
                   model.Pmat.copy(), model.Pinv.copy(), model.unstable)

    def discretize(self, h: float) -> tuple[np.ndarray, np.ndarray]:
        return np.exp(self.lam * h), input_gain(self.lam, h)


@dataclass(frozen=True)
class Disturbance:
    """Disturbance generator.

    ``frame="modal"`` bounds each modal component ``|w~_i| <= M``;
    ``frame="physical"`` bounds each physical component ``|w_i| <= M`` and the
    modal disturbance is ``Pinv @ w``. The two coincide for scalar plants.
    ``adversarial`` pushes the triggered mode's error outward
    (``w = M sign(z)``), ``opposing`` pulls it inward.
    """

    policy: str = "uniform"
    M: float = 0.0
    seed: int = 1
    frame: str = "modal"

    def __post_init__(self):
        if self.policy not in DISTURBANCE_POLICIES:
            raise ConfigError(f"unknown disturbance policy {self.policy!r}; use {DISTURBANCE_POLICIES}")
        if self.frame not in DISTURBANCE_FRAMES:
            raise ConfigError(f"unknown disturbance frame {self.frame!r}; use {DISTURBANCE_FRAMES}")
        if self.M < 0:
            raise ConfigError(f"disturbance bound must be >= 0, got {self.M}")

    def modal_bounds(self, system: ModalSystem) -> np.ndarray:
        """Tight per-mode bound on ``|w~_i|``."""
        if self.frame == "modal":
            return np.full(system.n, self.M)
        return self.M * np.abs(system.Pinv).sum(axis=1)

    def table(self, system: ModalSystem, n_steps: int) -> np.ndarray:
        if self.policy != "uniform" or self.M == 0:
            return np.zeros((n_steps, system.n))
        rng = np.random.default_rng(self.seed)
        draws = rng.uniform(-self.M, self.M, size=(n_steps, system.n))
        if self.frame == "physical":
            return draws @ system.Pinv.T
        return draws

    def adversary(self, system: ModalSystem) -> tuple[np.ndarray, int]:
        if self.policy not in ("adversarial", "opposing"):
            return np.zeros(system.n), 0
        if self.frame == "modal":
            direction = np.full(system.n, self.M)
        else:
            direction = system.Pinv @ (self.M * np.sign(system.Pinv[system.m]))
        return direction, 1 if self.policy == "adversarial" else -1

    def input_map(self, system: ModalSystem, gam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Physical-coordinate map from the held disturbance to the state increment, and its bounds."""
        bounds = np.zeros(system.n) if self.policy == "zero" else np.full(system.n, self.M)
        Gd = system.Pmat * gam
        if self.frame == "physical":
            Gd = Gd @ system.Pinv
        return Gd, bounds


@dataclass
class Event:
    k: int
    t_s: float
    sign: int
    cell_index: int | None
    g: int
    row_s: int
    t_sched: float = math.nan
    t_c: float = math.nan
    row_c: int = -1
    q: float = math.nan
    z_pre: float = math.nan
    z_post: float = math.nan

    @property
    def delivered(self) -> bool:
        return self.row_c >= 0

    @property
    def delay(self) -> float:
        return self.t_c - self.t_s

    @property
    def packet(self) -> Packet:
        return Packet(sign=self.sign, cell_index=self.cell_index, bits=self.g, meta_t_send=self.t_s)


@dataclass
class SimTrace:
    t: np.ndarray
    s: np.ndarray
    shat: np.ndarray
    u: np.ndarray
    w: np.ndarray
    system: ModalSystem
    design: TriggerDesign
    plant: PlantParams
    T: float
    h: float
    events: list[Event] = field(default_factory=list)
    w_bound: float = 0.0
    label: str = ""
    backend: str = ""

    @property
    def m(self) -> int:
        return self.system.m

    @property
    def z(self) -> np.ndarray:
        return self.s - self.shat

    @property
    def physical(self) -> np.ndarray:
        return self.s @ self.system.Pmat.T

    @property
    def n_triggers(self) -> int:
        return len(self.events)

    @property
    def bits_total(self) -> int:
        return sum(e.g for e in self.events)

    def intervals(self) -> np.ndarray:
        """Triggering intervals; the last one is closed at the horizon ``T``."""
        ts = np.array([e.t_s for e in self.events] + [self.T])
        return np.diff(ts) if len(self.events) else np.zeros(0)

    def trigger_rows(self) -> np.ndarray:
        flags = np.zeros(len(self.t), dtype=bool)
        flags[[e.row_s for e in self.events]] = True
        return flags

    def reception_rows(self) -> np.ndarray:
        flags = np.zeros(len(self.t), dtype=bool)
        flags[[e.row_c for e in self.events if e.delivered]] = True
        return flags


def _grid_index(t: float, h: float) -> int:
    """First grid index whose time is at or after ``t``."""
    k = int(round(t / h))
    if k * h < t - 1e-12 * (1.0 + abs(t)):
        k += 1
    return k


def simulate(system: ModalSystem, design: TriggerDesign, plant: PlantParams, delay: DelayPolicy,
             disturbance: Disturbance, T: float, h: float, s0, shat0, label: str = "",
             kernel=None) -> SimTrace:
    """Run the event-triggered loop and return the full trace (no invariant checks)."""
    if not h > 0:
        raise ConfigError(f"grid step h must be positive, got {h}")
    if T < h:
        raise ConfigError(f"horizon T={T} shorter than one step h={h}")
    if delay.gamma < h * (1 - 1e-9):
        raise ConfigError(
            f"delay bound gamma={delay.gamma} must be at least one grid step h={h}"
        )
    if delay.gamma > design.gamma * (1 + 1e-12):
        raise ConfigError(f"channel delay bound {delay.gamma} exceeds the design bound {design.gamma}")
    n_steps = int(round(T / h))
    if abs(n_steps * h - T) > 1e-9 * T:
        raise ConfigError(f"horizon T={T} is not a multiple of h={h}")
    m = system.m
    if abs(plant.A - system.lam[m]) > 1e-12 * plant.A:
        raise ConfigError("design plant does not match the triggered mode")

    n = system.n
    s = np.zeros((n_steps + 1, n))
    shat = np.zeros((n_steps + 1, n))
    s[0] = s0
    shat[0] = shat0
    if abs(s[0, m] - shat[0, m]) >= design.J:
        raise ConfigError(
            f"initial estimation error {abs(s[0, m] - shat[0, m])} must be below J={design.J}"
        )
    u = np.zeros(n_steps)
    w = np.zeros((n_steps, n))
    phi, gam = system.discretize(h)
    w_table = disturbance.table(system, n_steps)
    adv_dir, adv_mode = disturbance.adversary(system)
    propagate = _kernels.propagate if kernel is None else kernel
    J = design.J
    lam_m = float(system.lam[m])
    lam, Bt, kt = system.lam, system.Bt, system.kt

    channel = Channel(delay, margin=h)
    events: list[Event] = []
    k = 0
    while k < n_steps:
        k_end, tau, sgn = propagate(k, n_steps, h, True, m, J, lam, phi, gam, Bt, kt,
                                    w_table, adv_dir, adv_mode, s, shat, u, w)
        if sgn == 0:
            break
        t_s = (k_end - 1) * h + tau
        pkt = encode(t_s, int(sgn), design)
        t_sched = channel.submit(pkt, t_s)
        ev = Event(k=len(events) + 1, t_s=t_s, sign=pkt.sign, cell_index=pkt.cell_index,
                   g=pkt.bits, row_s=k_end, t_sched=t_sched)
        events.append(ev)
        kc = max(_grid_index(t_sched, h), k_end)
        propagate(k_end, min(kc, n_steps), h, False, m, J, lam, phi, gam, Bt, kt,
                  w_table, adv_dir, adv_mode, s, shat, u, w)
        if kc > n_steps:
            break
        t_c = kc * h
        got = channel.poll(t_c)
        assert got is pkt
        q = decode(got, t_c, design)
        zbar = reconstruct_zbar(got.sign, J, lam_m, t_c, q)
        ev.z_pre = s[kc, m] - shat[kc, m]
        shat[kc, m] = apply_jump(shat[kc, m], zbar)
        ev.z_post = s[kc, m] - shat[kc, m]
        ev.t_c, ev.row_c, ev.q = t_c, kc, q
        k = kc

    return SimTrace(
        t=np.arange(n_steps + 1) * h, s=s, shat=shat, u=u, w=w, system=system,
        design=design, plant=plant, T=n_steps * h, h=h, events=events,
        w_bound=float(disturbance.modal_bounds(system)[m]), label=label,
        backend=_kernels.BACKEND if kernel is None else getattr(kernel, "__name__", "custom"),
    )


# --------------------------------------------------------------------------- rates

@dataclass(frozen=True)
class RateStats:
    R_s: float
    R_tr: float
    Rtr_bound: float
    Rs_bound: float
    Rs_sufficient: float
    datarate_threshold: float
    n_triggers: int
    bits_total: int
    horizon: float

    @property
    def rtr_within_bound(self) -> bool:
        return self.R_tr <= self.Rtr_bound + 1.0 / self.horizon

    @property
    def rs_within_bound(self) -> bool:
        return self.R_s <= self.Rs_bound + self.bits_per_packet / self.horizon

    @property
    def bits_per_packet(self) -> float:
        return self.bits_total / self.n_triggers if self.n_triggers else 0.0

    def as_dict(self) -> dict:
        return {
            "R_s": self.R_s, "R_tr": self.R_tr, "Rtr_bound": self.Rtr_bound,
            "Rs_bound": self.Rs_bound, "Rs_sufficient": self.Rs_sufficient,
            "datarate_threshold": self.datarate_threshold, "n_triggers": self.n_triggers,
            "bits_total": self.bits_total, "horizon": self.horizon,
        }


def measure_rates(trace: SimTrace) -> RateStats:
    """Finite-horizon rates: bits and triggers over the elapsed horizon ``T``."""
    d, p = trace.design, trace.plant
    Rtr_bound = max_trigger_rate(p, d.J, d.rho0)
    return RateStats(
        R_s=trace.bits_total / trace.T,
        R_tr=trace.n_triggers / trace.T,
        Rtr_bound=Rtr_bound,
        Rs_bound=d.g * Rtr_bound,
        Rs_sufficient=sufficient_rate(p, d.J, d.rho0, d.b, d.gamma),
        datarate_threshold=datarate_threshold(p),
        n_triggers=trace.n_triggers,
        bits_total=trace.bits_total,
        horizon=trace.T,
    )


# --------------------------------------------------------------------------- invariants

def certificate_for(trace: SimTrace, disturbance: Disturbance, settle: float = 1.0) -> Certificate:
    system, h, d = trace.system, trace.h, trace.design
    m = system.m
    phi, gam = system.discretize(h)
    P, Pinv = system.Pmat, system.Pinv
    Phi = (P * phi) @ Pinv
    Gu = P @ (gam * system.Bt)
    F = Phi - np.outer(Gu, system.kt @ Pinv)
    Gd, v_bounds = disturbance.input_map(system, gam)
    w_modal = np.zeros(system.n) if disturbance.policy == "zero" else disturbance.modal_bounds(system)
    true_plant = replace(trace.plant, M=float(w_modal[m]))
    Z_peak = error_peak(d.J, d.gamma, true_plant)
    z_bounds = modal_error_bounds(system.lam, trace.z[0], w_modal, m, Z_peak, trace.T)
    cert = grid_certificate(F, Gu, system.kt, Gd, v_bounds, z_bounds, P @ trace.s[0], h, settle)
    if system.n == 1:
        BK = abs(system.Bt[0] * system.kt[0])
        alpha = system.Bt[0] * system.kt[0] - system.lam[0]
        cert = replace(cert, kappa_continuous=float((BK * Z_peak + w_modal[0]) / alpha))
    return cert


def check_invariants(trace: SimTrace, certificate: Certificate | None = None) -> list[InvariantViolation]:
    """Evaluate the per-run guarantees; returns the violations found (empty when all hold)."""
    d, p, h = trace.design, trace.plant, trace.h
    out: list[InvariantViolation] = []
    slack = CONTRACT_RTOL * d.J
    for e in trace.events:
        if not e.delivered:
            continue
        if e.delay > d.gamma + 1e-12:
            out.append(InvariantViolation("delay-bound", e.k, f"delay {e.delay} > gamma {d.gamma}"))
        if abs(e.z_post) > d.rho0 * d.J + slack:
            out.append(InvariantViolation(
                "jump-contract", e.k, f"|z(t_c+)| = {abs(e.z_post)} > rho0*J = {d.rho0 * d.J}"))
    tau_min = min_inter_event(p, d.J, d.rho0)
    for i, gap in enumerate(np.diff([e.t_s for e in trace.events])):
        if gap < tau_min - h:
            out.append(InvariantViolation(
                "inter-event", i + 2, f"interval {gap} < tau_min - h = {tau_min - h}"))
    true_plant = replace(p, M=trace.w_bound)
    z_peak = error_peak(d.J, d.gamma, true_plant) + slack
    zm = np.abs(trace.z[:, trace.m])
    pre = [abs(e.z_pre) for e in trace.events if e.delivered]
    worst = max([float(zm.max())] + pre)
    if worst > z_peak:
        out.append(InvariantViolation("error-envelope", None, f"max |z| = {worst} > {z_peak}"))
    stats = measure_rates(trace)
    if not stats.rtr_within_bound:
        out.append(InvariantViolation(
            "trigger-rate", None, f"R_tr = {stats.R_tr} > {stats.Rtr_bound} + 1/T"))
    if not stats.rs_within_bound:
        out.append(InvariantViolation(
            "bit-rate", None, f"R_s = {stats.R_s} > g * ({stats.Rtr_bound} + 1/T)"))
    if certificate is not None:
        k0 = int(round(certificate.T0 / h))
        phys = np.abs(trace.physical[k0:])
        ratio = phys / (certificate.kappa * (1 + 1e-9))
        if not np.all(np.isfinite(phys)) or np.any(ratio > 1):
            row = int(np.argmax(ratio.max(axis=1))) + k0
            out.append(InvariantViolation(
                "boundedness", None, f"|s| exceeds kappa at t = {row * h}"))
    return out


# --------------------------------------------------------------------------- sensor mirror

@dataclass(frozen=True)
class MirrorReport:
    consistent: bool
    max_abs_diff: float
    first_divergence: int | None


def mirror_estimates(trace: SimTrace, fault: str | None = None) -> np.ndarray:
    """Rebuild the controller estimate at the sensor from its own packets and observed receptions.

    ``fault="t_s"`` makes the sensor assume each packet is received the
    moment it is sent (it ignores the channel delay).
    """
    system, d, h = trace.system, trace.design, trace.h
    phi, gam = system.discretize(h)
    n, m = system.n, system.m
    lam_m = float(system.lam[m])
    jumps = {}
    for e in trace.events:
        if fault == "t_s":
            row = _grid_index(e.t_s, h)
            t_c = e.t_s
        elif e.delivered:
            row, t_c = e.row_c, e.t_c
        else:
            continue
        if row > len(trace.t) - 1:
            continue
        q = decode(e.packet, t_c, d)
        jumps[row] = reconstruct_zbar(e.sign, d.J, lam_m, t_c, q)

    est = np.zeros_like(trace.shat)
    cur = [float(v) for v in trace.shat[0]]
    est[0] = cur
    for k in range(len(trace.t) - 1):
        uk = 0.0
        for i in range(n):
            uk -= system.kt[i] * cur[i]
        cur = [phi[i] * cur[i] + gam[i] * (system.Bt[i] * uk) for i in range(n)]
        if k + 1 in jumps:
            cur[m] = apply_jump(cur[m], jumps[k + 1])
        est[k + 1] = cur
    return est


def compare_mirror(trace: SimTrace, fault: str | None = None) -> MirrorReport:
    diff = np.abs(mirror_estimates(trace, fault) - trace.shat).max(axis=1)
    bad = np.flatnonzero(diff != 0.0)
    return MirrorReport(
        consistent=len(bad) == 0,
        max_abs_diff=float(diff.max()),
        first_divergence=int(bad[0]) if len(bad) else None,
    )


# --------------------------------------------------------------------------- scalar runs

@dataclass(frozen=True)
class SimConfig:
    plant: PlantParams
    design: TriggerDesign
    gain: ControllerGain
    delay: DelayPolicy
    disturbance: Disturbance
    T: float = 5.0
    h: float = 0.005
    x0: float | None = None
    xhat0: float | None = None

    def __post_init__(self):
        if not self.h > 0:
            raise ConfigError(f"grid step h must be positive, got {self.h}")
        if self.T < self.h:
            raise ConfigError(f"horizon T={self.T} shorter than one step h={self.h}")
        if self.delay.gamma < self.h * (1 - 1e-9):
            raise ConfigError(
                f"delay bound gamma={self.delay.gamma} must be at least one grid step h={self.h}"
            )
        if self.disturbance.M > self.plant.M:
            raise ConfigError(
                f"disturbance bound {self.disturbance.M} exceeds the design bound {self.plant.M}"
            )

    @classmethod
    def build(cls, A: float, B: float, M: float = 0.0, L: float = 1.0, rho0: float = 0.9,
              b: float = 1.0001, gamma: float = 0.005, J: float | None = None,
              J_rule: JRule = JRule(0.005), K: float | None = None, T: float = 5.0,
              h: float = 0.005, delay_kind: str = "uniform-random", delay_seed: int = 0,
              disturbance: str = "uniform", disturbance_seed: int = 1,
              x0: float | None = None, xhat0: float | None = None) -> "SimConfig":
        plant = PlantParams(A=A, B=B, M=M, L=L)
        if J is None:
            J = J_rule(plant, rho0, gamma)
        design = build_design(plant, J, rho0, b, gamma)
        gain = ControllerGain.pole_mirror(plant) if K is None else ControllerGain.from_gain(K, plant)
        return cls(plant=plant, design=design, gain=gain,
                   delay=DelayPolicy(delay_kind, gamma, delay_seed),
                   disturbance=Disturbance(disturbance, M, disturbance_seed, "modal"),
                   T=T, h=h, x0=x0, xhat0=xhat0)

    def initial_state(self) -> tuple[float, float]:
        x0 = self.plant.L if self.x0 is None else self.x0
        xhat0 = x0 - 0.5 * self.design.J if self.xhat0 is None else self.xhat0
        return x0, xhat0


@dataclass
class RunResult:
    trace: SimTrace
    stats: RateStats
    certificate: Certificate
    violations: list[InvariantViolation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __iter__(self):
        # allows ``trace, stats = run_scalar(cfg)``
        return iter((self.trace, self.stats))


def _finish(trace: SimTrace, disturbance: Disturbance, strict: bool) -> RunResult:
    cert = certificate_for(trace, disturbance)
    violations = check_invariants(trace, cert)
    if strict and violations:
        raise violations[0]
    return RunResult(trace, measure_rates(trace), cert, violations)


def run_scalar(cfg: SimConfig, strict: bool = False, kernel=None) -> RunResult:
    x0, xhat0 = cfg.initial_state()
    system = ModalSystem.scalar(cfg.plant, cfg.gain)
    trace = simulate(system, cfg.design, cfg.plant, cfg.delay, cfg.disturbance, cfg.T, cfg.h,
                     [x0], [xhat0], label="scalar", kernel=kernel)
    return _finish(trace, cfg.disturbance, strict)


def run_sensor_mirror(cfg, fault: str | None = None) -> MirrorReport:
    """Run ``cfg`` (scalar or pendulum) and compare the sensor's estimate copy with the controller's."""
    result = run_pendulum(cfg) if isinstance(cfg, PendulumConfig) else run_scalar(cfg)
    return compare_mirror(result.trace, fault)


# --------------------------------------------------------------------------- pendulum

SCENARIOS = {
    "a": {"M": 0.0, "gamma": 0.005},
    "b": {"M": 0.05, "gamma": 0.005},
    "c": {"M": 0.05, "gamma": 0.1},
}


@dataclass(frozen=True)
class PendulumConfig:
    M: float = 0.0
    gamma: float = 0.005
    rho0: float = 0.9
    b: float = 1.0001
    J_offset: float = 0.005
    T: float = 5.0
    h: float = 0.005
    delay_kind: str = "uniform-random"
    delay_seed: int = 0
    disturbance: str = "uniform"
    disturbance_seed: int = 1
    frame: str = "modal"
    design_bound: str = "transformed"
    s0: tuple = (0.0, 0.0, 0.0, 0.1001)
    shat0: tuple = (0.0, 0.0, 0.0, 0.10)
    scenario: str = ""

    @classmethod
    def scenario_preset(cls, name: str, **overrides) -> "PendulumConfig":
        if name not in SCENARIOS:
            raise ConfigError(f"unknown scenario {name!r}; use one of {sorted(SCENARIOS)}")
        return cls(**{**SCENARIOS[name], "scenario": name, **overrides})

    def design_M(self, system: ModalSystem) -> float:
        """Disturbance bound used to design the triggered mode."""
        if self.design_bound == "raw":
            return self.M
        if self.design_bound != "transformed":
            raise ConfigError(f"design_bound must be 'transformed' or 'raw', got {self.design_bound!r}")
        return float(self.make_disturbance().modal_bounds(system)[system.m])

    def make_disturbance(self) -> Disturbance:
        return Disturbance(self.disturbance, self.M, self.disturbance_seed, self.frame)


@lru_cache(maxsize=1)
def _pendulum_system() -> tuple[PendulumModel, ModalSystem]:
    model = reference_model()
    return model, ModalSystem.from_model(model)


def pendulum_design(cfg: PendulumConfig) -> tuple[PlantParams, TriggerDesign]:
    _, system = _pendulum_system()
    m = system.m
    s0 = system.Pinv @ np.asarray(cfg.s0, dtype=float)
    plant = PlantParams(A=float(system.lam[m]), B=float(system.Bt[m]), M=cfg.design_M(system),
                        L=max(abs(float(s0[m])), 1e-12))
    J = JRule(cfg.J_offset)(plant, cfg.rho0, cfg.gamma)
    return plant, build_design(plant, J, cfg.rho0, cfg.b, cfg.gamma)


def run_pendulum(scenario: str | PendulumConfig = "a", strict: bool = False, kernel=None,
                 **overrides) -> RunResult:
    """Event-triggered stabilization of the pendulum through its unstable mode."""
    cfg = (scenario if isinstance(scenario, PendulumConfig)
           else PendulumConfig.scenario_preset(scenario, **overrides))
    _, system = _pendulum_system()
    plant, design = pendulum_design(cfg)
    disturbance = cfg.make_disturbance()
    trace = simulate(
        system, design, plant, DelayPolicy(cfg.delay_kind, cfg.gamma, cfg.delay_seed),
        disturbance, cfg.T, cfg.h,
        system.Pinv @ np.asarray(cfg.s0, dtype=float),
        system.Pinv @ np.asarray(cfg.shat0, dtype=float),
        label=f"pendulum-{cfg.scenario}" if cfg.scenario else "pendulum", kernel=kernel,
    )
    return _finish(trace, disturbance, strict)
