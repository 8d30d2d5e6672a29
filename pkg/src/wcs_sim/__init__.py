"""Co-simulator of distributed self-triggered control over round-based
multi-hop low-power wireless networking."""

__version__ = "0.1.0"

from .lqr import CostSpec, GainPartition, build_augmented, synthesize
from .net import MessagePayload, ProtocolConfig, RoundSchedule
from .plant import CartPoleParams, ContinuousModel, DiscreteModel, Disturbance
from .sim import ExperimentConfig, Summary, TraceRecord, run_experiment
from .stc import ErrorMoments, TriggerState, find_next_trigger

__all__ = [
    "CartPoleParams",
    "ContinuousModel",
    "CostSpec",
    "DiscreteModel",
    "Disturbance",
    "ErrorMoments",
    "ExperimentConfig",
    "GainPartition",
    "MessagePayload",
    "ProtocolConfig",
    "RoundSchedule",
    "Summary",
    "TraceRecord",
    "TriggerState",
    "build_augmented",
    "find_next_trigger",
    "run_experiment",
    "synthesize",
    "__version__",
]
