import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from etcsim.codec import (
    Packet, TriggerDesign, apply_jump, build_design, decode, encode, quantizer_resolution,
    reconstruct_zbar, should_trigger,
)
from etcsim.errors import ConfigError, DecoderAmbiguityError, InfeasibleDesignError
from etcsim.model import PlantParams

import oracles as o

A = 5.5651
PA = PlantParams(A=A, B=2.2513)
PC = PlantParams(A=A, B=2.2513, M=0.05)
JC = 0.0124335

# frozen from the 50-digit oracle
DELTA_C = 0.033878214772313051
DELTA_A = 0.11298446572113101
Q_EXAMPLE = 1.2196157318032698
ZBAR_EXAMPLE = 0.019885709012305349


@pytest.fixture(scope="module")
def design_c():
    return build_design(PC, JC, 0.9, 1.0001, 0.1)


def test_should_trigger():
    d = build_design(PA, 0.005, 0.9, 1.0001, 0.005)
    assert not should_trigger(0.0, d, False)
    assert should_trigger(0.005, d, False)
    assert should_trigger(-0.005, d, False)
    assert not should_trigger(1.2 * 0.005, d, True)
    assert not should_trigger(0.0049999, d, False)


def test_quantizer_resolution_examples():
    assert quantizer_resolution(PC, JC, 0.9, 0.1) == pytest.approx(DELTA_C, rel=1e-13)
    # 0.033871 is a low-precision approximation of the same quantity
    assert quantizer_resolution(PC, JC, 0.9, 0.1) == pytest.approx(0.033871, rel=5e-4)
    assert quantizer_resolution(PA, 0.005, 0.9, 0.005) == pytest.approx(DELTA_A, rel=1e-13)
    assert quantizer_resolution(PA, 0.005, 0.9, 0.005) == pytest.approx(0.112986, abs=5e-6)
    assert quantizer_resolution(PA, 1.0, 0.9, 0.0) == pytest.approx(math.log(1.9) / A, rel=1e-14)
    with pytest.raises(InfeasibleDesignError):
        quantizer_resolution(PC, 0.005, 0.9, 0.1)


def test_build_design_scenarios(design_c):
    assert build_design(PA, 0.005, 0.9, 1.0001, 0.005).g == 1
    assert (design_c.N, design_c.g) == (5, 4)
    assert design_c.P == pytest.approx(5 * DELTA_C, rel=1e-13)
    assert build_design(PC, 0.05, 0.9, 1.0001, 0.0).g == 1
    with pytest.raises(ConfigError):
        build_design(PC, JC, 0.9, 1.0, 0.1)


def test_encode_examples(design_c):
    pkt = encode(1.234, 1, design_c)
    assert pkt.cell_index == 1 and pkt.bits == 4 and pkt.sign == 1
    assert encode(0.0, -1, design_c).cell_index == 0
    d1 = build_design(PA, 0.005, 0.9, 1.0001, 0.005)
    for t in (0.0, 0.77, 123.4):
        pkt = encode(t, -1, d1)
        assert pkt.cell_index is None and pkt.bits == 1 and pkt.to_bits() == "0"


def test_decode_examples(design_c):
    q = decode(encode(1.234, 1, design_c), 1.304, design_c)
    assert q == pytest.approx(Q_EXAMPLE, abs=1e-12)
    assert 0 <= 1.234 - q <= design_c.delta
    d1 = build_design(PA, 0.005, 0.9, 1.0001, 0.005)
    assert decode(encode(1.99, 1, d1), 2.0, d1) == pytest.approx(1.995, abs=1e-15)
    for j in (0, 3, 17, 40):
        t_edge = j * design_c.delta
        assert decode(encode(t_edge, 1, design_c), t_edge, design_c) == pytest.approx(t_edge, abs=1e-12)


def test_decode_rejects_impossible_reception(design_c):
    # a reception long after gamma leaves the true edge outside the window
    with pytest.raises(DecoderAmbiguityError):
        decode(Packet(1, 1, 4), 1.234 + 0.1 + design_c.P * 0.3, TriggerDesign(
            J=JC, rho0=0.9, b=1.0001, gamma=0.1, delta=design_c.delta, N=5,
            P=design_c.delta * 3, g=4))


def test_reconstruct_zbar_examples():
    assert reconstruct_zbar(1, 0.3, A, 2.0, 2.0) == 0.3
    assert reconstruct_zbar(-1, 0.3, A, 2.0, 2.0) == -0.3
    assert reconstruct_zbar(-1, 1.0, 1.0, math.log(2), 0.0) == pytest.approx(-2.0, rel=1e-15)
    assert reconstruct_zbar(1, JC, A, 1.304, Q_EXAMPLE) == pytest.approx(ZBAR_EXAMPLE, rel=1e-12)
    assert reconstruct_zbar(1, JC, A, 0.084644, 0.0) == pytest.approx(0.019914, rel=2e-4)


def test_apply_jump():
    assert apply_jump(0.7, 0.0) == 0.7
    # zero noise, zero delay, t_s on an edge: perfect reconstruction
    d = build_design(PA, 0.005, 0.9, 1.0001, 0.2)
    t_s = 4 * d.delta
    q = decode(encode(t_s, 1, d), t_s, d)
    x, xhat = 1.0 + 0.005, 1.0
    assert x - apply_jump(xhat, reconstruct_zbar(1, 0.005, A, t_s, q)) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("w_sign", [1, -1])
def test_jump_contract_against_oracle(design_c, w_sign):
    """Sweep the delay over [0, gamma] and the trigger phase inside a cell."""
    d = design_c
    worst = 0.0
    for Delta in np.linspace(0.0, d.gamma, 101):
        for frac in np.linspace(0.0, 0.999, 12):
            t_s = 3.0 + frac * d.delta - (3.0 % d.delta)
            pkt = encode(t_s, 1, d)
            t_c = t_s + Delta
            q = decode(pkt, t_c, d)
            z_true = o.rk4_z(JC, Delta, A, lambda z: w_sign * 0.05 * (1.0 if z >= 0 else -1.0), 200)
            resid = z_true - reconstruct_zbar(1, JC, A, t_c, q)
            worst = max(worst, abs(resid))
    assert worst <= 0.9 * JC * (1 + 1e-9)


def test_jump_contract_sign_only():
    d = build_design(PC, 0.06, 0.9, 1.0001, 0.02)
    assert d.g == 1
    for Delta in np.linspace(0.0, d.gamma, 41):
        for w_sign in (1, -1):
            r = o.jump_residual(A, 0.05, d.J, d.gamma, None, Delta, 0.0, w_sign)
            assert abs(r) <= 0.9 * d.J * (1 + 1e-9)


def _feasible_design(A_, M, rho0, gamma, offset):
    p = PlantParams(A=A_, B=1.0, M=M)
    from etcsim.design import min_J
    try:
        return build_design(p, min_J(p, rho0, gamma) + offset, rho0, 1.0001, gamma)
    except InfeasibleDesignError:
        return None


@settings(max_examples=300)
@given(A_=st.floats(0.5, 10), M=st.floats(0, 0.3), rho0=st.floats(0.05, 0.95),
       gamma=st.floats(0.0, 0.5), offset=st.floats(1e-3, 1.0),
       t_s=st.floats(0, 1e3), frac=st.floats(0, 1), sign=st.sampled_from([1, -1]))
def test_round_trip(A_, M, rho0, gamma, offset, t_s, frac, sign):
    d = _feasible_design(A_, M, rho0, gamma, offset)
    assume(d is not None)
    pkt = encode(t_s, sign, d)
    assert pkt.sign == sign and pkt.bits == d.g
    assert Packet.from_wire(pkt.to_wire()) == pkt
    assert Packet.from_bits(pkt.to_bits()) == pkt
    assert len(pkt.to_bits()) == d.g
    t_c = t_s + frac * gamma
    q = decode(pkt, t_c, d)
    if d.g > 1:
        assert -1e-9 <= t_s - q <= d.delta + 1e-9
    else:
        assert q == t_c - gamma


@given(t1=st.floats(0, 100), dt=st.floats(0, 100))
def test_cell_index_is_periodic_and_bounded(t1, dt):
    d = build_design(PC, JC, 0.9, 1.0001, 0.1)
    c = encode(t1, 1, d).cell_index
    assert 0 <= c < d.N
    assert encode(t1 + d.P * 7, 1, d).cell_index in (c, (c + 1) % d.N, (c - 1) % d.N)


def test_packet_validation():
    with pytest.raises(ValueError):
        Packet(0, None, 1)
    with pytest.raises(ValueError):
        Packet(1, 2, 1)
    with pytest.raises(ValueError):
        Packet(1, None, 3)
    assert Packet(1, 2, 4, meta_t_send=1.0) == Packet(1, 2, 4, meta_t_send=9.0)
    assert Packet.from_wire("4,-,5").to_bits() == "0101"
