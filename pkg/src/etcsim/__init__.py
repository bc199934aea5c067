"""Event-triggered control of an unstable scalar mode over a delayed bit channel."""

__version__ = "0.1.0"

from .codec import Packet, TriggerDesign, build_design, decode, encode
from .design import (
    J_RULES, JRule, datarate_threshold, max_trigger_rate, min_inter_event, min_J,
    packet_size_bound, packet_size_bound_int, rate_crossing, rate_curve_sweep, sufficient_rate,
)
from .errors import (
    ChannelProtocolError, ConfigError, DecoderAmbiguityError, EtcError, InfeasibleDesignError,
    InvariantViolation,
)
from .model import ControllerGain, PlantParams
from .pendulum import reference_model
from .simulator import (
    SCENARIOS, PendulumConfig, SimConfig, run_pendulum, run_scalar, run_sensor_mirror,
)

__all__ = [
    "__version__", "Packet", "TriggerDesign", "build_design", "decode", "encode", "J_RULES",
    "JRule", "datarate_threshold", "max_trigger_rate", "min_inter_event", "min_J",
    "packet_size_bound", "packet_size_bound_int", "rate_crossing", "rate_curve_sweep",
    "sufficient_rate", "ChannelProtocolError", "ConfigError", "DecoderAmbiguityError", "EtcError",
    "InfeasibleDesignError", "InvariantViolation", "ControllerGain", "PlantParams",
    "reference_model", "SCENARIOS", "PendulumConfig", "SimConfig", "run_pendulum", "run_scalar",
    "run_sensor_mirror",
]
