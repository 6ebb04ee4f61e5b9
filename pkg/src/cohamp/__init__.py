"""Autonomous two-qubit thermal machine that amplifies energetic coherence in a stream of qubits."""

from .atomchannel import AtomChannel, ChannelRegimeError, apply_channel
from .cascade import StageError, Trajectory, converge, fixed_point, propagate
from .coherence import bipartite_report, full_dephase, mutual_information, partial_dephase, rea, rec
from .machine import (
    MachineParams,
    MachineSteadyState,
    RegimeWarning,
    SteadyStateError,
    build_liouvillian,
    machine_steady_state,
    steady_state,
    validate_regime,
)
from .qstate import qubit_state, trace_distance, von_neumann_entropy
from .thermo import FlowInvariantError, FlowReport, flow_report

__version__ = "0.1.0"
