import numpy as np
import pytest

from etcsim.channel import Channel, DelayPolicy, sample_delays
from etcsim.codec import Packet
from etcsim.errors import ChannelProtocolError, ConfigError
from etcsim.simulator import _grid_index

PKT = Packet(1, None, 1)


def test_constant_delay():
    ch = Channel(DelayPolicy("constant", 0.1))
    assert ch.submit(PKT, 1.0) == pytest.approx(1.1)


def test_zero_gamma_delivers_immediately():
    ch = Channel(DelayPolicy("constant", 0.0))
    assert ch.submit(PKT, 2.5) == 2.5
    assert ch.poll(2.5) is PKT


def test_uniform_is_reproducible_and_bounded():
    pol = DelayPolicy("uniform-random", 0.1, seed=42)
    a = sample_delays(pol, 1000)
    assert np.array_equal(a, sample_delays(pol, 1000))
    assert not np.array_equal(a, sample_delays(DelayPolicy("uniform-random", 0.1, seed=43), 1000))
    assert a.min() >= 0 and a.max() <= 0.1
    b = sample_delays(pol, 1000, margin=0.005)
    assert b.max() <= 0.095


def test_channel_sequence_matches_policy_stream():
    pol = DelayPolicy("uniform-random", 0.1, seed=7)
    ch = Channel(pol)
    got = []
    for k in range(20):
        t_c = ch.submit(PKT, float(k))
        got.append(t_c - k)
        assert ch.poll(t_c) is PKT
    assert np.allclose(got, sample_delays(pol, 20), rtol=0, atol=1e-12)


def test_adversarial_max():
    ch = Channel(DelayPolicy("adversarial-max", 0.1), margin=0.005)
    assert ch.submit(PKT, 0.0) == pytest.approx(0.095)


def test_poll_timing_and_single_slot():
    ch = Channel(DelayPolicy("constant", 0.1))
    t_c = ch.submit(PKT, 1.0)
    assert ch.in_flight is not None and ch.scheduled == t_c
    with pytest.raises(ChannelProtocolError):
        ch.submit(PKT, 1.01)
    assert ch.poll(1.05) is None
    assert ch.poll(t_c) is PKT
    assert ch.poll(t_c) is None
    assert ch.delivered == 1 and ch.scheduled is None


def test_grid_rounding_rule():
    assert _grid_index(1.0001, 0.005) * 0.005 == pytest.approx(1.005)
    assert _grid_index(1.0, 0.005) == 200
    assert _grid_index(1.0 + 1e-14, 0.005) == 200


def test_policy_validation():
    with pytest.raises(ConfigError):
        DelayPolicy("lossy", 0.1)
    with pytest.raises(ConfigError):
        DelayPolicy("constant", -0.1)
    with pytest.raises(ConfigError):
        Channel(DelayPolicy("constant", 0.001), margin=0.005)
