import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from etcsim import _kernels
from etcsim.design import min_inter_event
from etcsim.errors import ConfigError, InvariantViolation
from etcsim.model import error_peak
from etcsim.simulator import (
    Disturbance, ModalSystem, PendulumConfig, SimConfig, check_invariants, compare_mirror,
    measure_rates, run_pendulum, run_scalar, run_sensor_mirror, simulate,
)

A, B = 5.5651, 2.2513


def scalar_cfg(**kw):
    base = dict(A=A, B=B, M=0.05, gamma=0.1, delay_kind="uniform-random", disturbance="uniform")
    base.update(kw)
    return SimConfig.build(**base)


@pytest.mark.parametrize("scenario", ["a", "b", "c"])
def test_backends_agree_bitwise(scenario):
    r_py = run_pendulum(scenario, kernel=_kernels.propagate_py)
    r_jit = run_pendulum(scenario, kernel=_kernels.propagate_jit)
    assert np.array_equal(r_py.trace.s, r_jit.trace.s)
    assert np.array_equal(r_py.trace.shat, r_jit.trace.shat)
    assert [e.t_s for e in r_py.trace.events] == [e.t_s for e in r_jit.trace.events]


def test_deterministic():
    a, b = run_scalar(scalar_cfg()), run_scalar(scalar_cfg())
    assert np.array_equal(a.trace.s, b.trace.s) and np.array_equal(a.trace.u, b.trace.u)
    c = run_scalar(scalar_cfg(delay_seed=5))
    assert [e.t_c for e in c.trace.events] != [e.t_c for e in a.trace.events]


def test_no_trigger_without_error():
    cfg = scalar_cfg(M=0.0, disturbance="zero", gamma=0.005, x0=1.0, xhat0=1.0)
    res = run_scalar(cfg)
    assert res.trace.n_triggers == 0
    assert np.all(res.trace.z == 0.0)
    stats = measure_rates(res.trace)
    assert (stats.R_s, stats.R_tr) == (0.0, 0.0)
    assert run_sensor_mirror(cfg).consistent


def test_trace_shape_and_unpacking():
    trace, stats = run_scalar(scalar_cfg(T=1.0))
    assert trace.s.shape == (201, 1) and trace.u.shape == (200,)
    assert stats.horizon == pytest.approx(1.0)
    ts = [e.t_s for e in trace.events]
    assert np.allclose(trace.intervals(), np.diff(ts + [1.0]))


@pytest.mark.parametrize("policy", ["uniform", "adversarial", "opposing"])
@pytest.mark.parametrize("delay", ["uniform-random", "constant", "adversarial-max"])
def test_scalar_invariants_hold(policy, delay):
    res = run_scalar(scalar_cfg(disturbance=policy, delay_kind=delay), strict=True)
    d = res.trace.design
    for e in res.trace.events:
        assert e.delivered and e.delay <= d.gamma
        assert abs(e.z_post) <= d.rho0 * d.J * (1 + 1e-9)
    tau = min_inter_event(res.trace.plant, d.J, d.rho0)
    assert np.all(np.diff([e.t_s for e in res.trace.events]) >= tau - res.trace.h)
    assert np.abs(res.trace.z).max() <= error_peak(d.J, d.gamma, res.trace.plant) * (1 + 1e-9)
    assert res.stats.rtr_within_bound and res.stats.rs_within_bound


def test_adversarial_disturbance_forces_triggers():
    res = run_scalar(scalar_cfg(disturbance="adversarial", delay_kind="adversarial-max"))
    assert res.trace.n_triggers >= 5
    assert np.all(np.abs(res.trace.w) == pytest.approx(0.05))


def test_scalar_kappa_example():
    """Zero noise, one-step delay, pole-mirror gain: |x| stays below both certificates."""
    res = run_scalar(scalar_cfg(M=0.0, disturbance="zero", gamma=0.005), strict=True)
    cert = res.certificate
    d, p = res.trace.design, res.trace.plant
    Zmax = d.J * math.exp(A * d.gamma)
    assert cert.kappa_continuous == pytest.approx(B * (2 * A / B) * Zmax / A, rel=1e-12)
    k0 = int(round(cert.T0 / res.trace.h))
    assert np.all(np.abs(res.trace.s[k0:, 0]) <= cert.kappa[0])


@pytest.mark.parametrize("scenario", ["a", "b", "c"])
def test_pendulum_scenarios(scenario):
    res = run_pendulum(scenario, strict=True)
    assert res.ok and res.trace.n_triggers > 0
    assert res.trace.design.g == {"a": 1, "b": 1, "c": 4}[scenario]
    assert np.all(np.isfinite(res.trace.physical))
    assert compare_mirror(res.trace).consistent


def test_scenario_b_without_noise_reduces_to_a():
    a = run_pendulum("a")
    b = run_pendulum("b", M=0.0)
    assert np.array_equal(a.trace.s, b.trace.s)


def test_mirror_fault_is_detected():
    res = run_pendulum("c")
    assert compare_mirror(res.trace).max_abs_diff == 0.0
    bad = compare_mirror(res.trace, fault="t_s")
    assert not bad.consistent and bad.first_divergence is not None
    scalar = run_scalar(scalar_cfg(delay_kind="adversarial-max"))
    assert not compare_mirror(scalar.trace, fault="t_s").consistent


def test_corrupted_trace_is_flagged():
    res = run_scalar(scalar_cfg())
    ev = res.trace.events[0]
    ev.z_post = res.trace.design.J
    found = {v.invariant for v in check_invariants(res.trace)}
    assert "jump-contract" in found


def test_strict_mode_raises():
    res = run_scalar(scalar_cfg())
    res.trace.events[1].t_s = res.trace.events[0].t_s + 1e-6
    violations = check_invariants(res.trace)
    assert any(v.invariant == "inter-event" for v in violations)
    assert isinstance(violations[0], InvariantViolation)


def test_physical_frame_pendulum():
    cfg = PendulumConfig.scenario_preset("c", frame="physical")
    res = run_pendulum(cfg, strict=True)
    assert res.trace.design.g == 5
    cfg_raw = PendulumConfig.scenario_preset("c", design_bound="raw", disturbance="zero")
    assert run_pendulum(cfg_raw).trace.design.g == 4


def test_config_validation():
    with pytest.raises(ConfigError):
        scalar_cfg(gamma=0.001)
    with pytest.raises(ConfigError):
        scalar_cfg(T=0.001)
    with pytest.raises(ConfigError):
        run_scalar(scalar_cfg(T=1.0012))
    with pytest.raises(ConfigError):
        run_scalar(scalar_cfg(x0=1.0, xhat0=0.0))
    with pytest.raises(ConfigError):
        Disturbance("gusty", 0.1)
    with pytest.raises(ConfigError):
        run_pendulum("d")
    cfg = scalar_cfg()
    with pytest.raises(ConfigError):
        dataclasses.replace(cfg, disturbance=Disturbance("uniform", 1.0))


def test_modal_system_discretize():
    sysm = ModalSystem(np.array([0.0, -1.0, 2.0]), np.ones(3), np.zeros(3), np.eye(3), np.eye(3), 2)
    phi, gam = sysm.discretize(0.1)
    assert phi == pytest.approx(np.exp([0.0, -0.1, 0.2]))
    assert gam[0] == 0.1


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), gamma_steps=st.integers(1, 30),
       policy=st.sampled_from(["uniform", "adversarial", "opposing"]))
def test_random_scalar_runs_hold_contracts(seed, gamma_steps, policy):
    cfg = scalar_cfg(gamma=0.005 * gamma_steps, delay_seed=seed, disturbance_seed=seed + 1,
                     disturbance=policy, T=2.0)
    assert run_scalar(cfg).violations == []


def test_env_flag_selects_python_backend():
    import os
    import subprocess
    import sys

    code = "from etcsim import _kernels; print(_kernels.BACKEND, _kernels.propagate is _kernels.propagate_py)"
    env = dict(os.environ, ETCSIM_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.split() == ["numpy", "True"]
    env.pop("ETCSIM_DISABLE_NUMBA")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.split() == ["numba", "False"]
