"""Atoms crossing an array of stationary machines.

Each machine sits in the steady state induced by the atoms arriving at it,
so stage ``i`` depends only on the atom state leaving stage ``i - 1``.
Correlations between machines (and between atoms) are not modelled.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .atomchannel import AtomChannel, apply_channel
from .machine import MachineParams, SteadyStateError, block_steady_state, gibbs_qubit, machine_steady_state
from .qstate import trace_distance
from .thermo import FlowReport, flow_report


class StageError(RuntimeError):
    def __init__(self, stage: int, cause: Exception):
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class Trajectory:
    states: list
    flows: list = field(default_factory=list)
    converged: bool = False
    stages_run: int = 0

    @property
    def coherences(self) -> np.ndarray:
        """``|<0|rho|1>|`` along the trajectory."""
        return np.array([abs(s[0, 1]) for s in self.states])

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _qubit_distance(a, b) -> float:
    """Trace norm of a Hermitian 2x2 difference, in closed form."""
    d = a - b
    mean = (d[0, 0].real + d[1, 1].real) / 2
    half = np.sqrt(((d[0, 0].real - d[1, 1].real) / 2) ** 2 + abs(d[0, 1]) ** 2)
    return abs(mean + half) + abs(mean - half)


def fixed_point(p: MachineParams) -> np.ndarray:
    """Incoherent Gibbs state of the atom at the virtual temperature."""
    return gibbs_qubit(p.beta_v, p.omega)


def stage_map(p: MachineParams, rho_a, variant: str = "perturbative", fast: bool = True) -> np.ndarray:
    """Output of one stationary machine for input ``rho_a``."""
    if fast:
        rho_m = block_steady_state(p, rho_a)
    else:
        rho_m = machine_steady_state(p, rho_a).rho
    return apply_channel(AtomChannel(rho_m, p.phi, variant), rho_a)


def _params_for(p, i: int) -> MachineParams:
    if isinstance(p, MachineParams):
        return p
    return p[i]


def propagate(rho_a0, p: MachineParams | Sequence[MachineParams], n: int, record_flows: bool = True,
              variant: str = "perturbative") -> Trajectory:
    """Send ``rho_a0`` through ``n`` machines.

    ``p`` may be a list with one parameter set per stage. Per-stage flows are
    per-atom quantities (rates divided by ``r``).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rho = np.array(rho_a0, dtype=complex)
    traj = Trajectory(states=[rho])
    for i in range(1, n + 1):
        pi = _params_for(p, i - 1)
        try:
            if record_flows:
                ss = machine_steady_state(pi, rho)
                if pi.r == 0:
                    raise ValueError("per-atom flows need r > 0")
                traj.flows.append(flow_report(pi, rho, ss=ss).scaled(1.0 / pi.r))
                rho = apply_channel(AtomChannel(ss.rho, pi.phi, variant), rho)
            else:
                rho = stage_map(pi, rho, variant)
        except (SteadyStateError, ValueError, ArithmeticError) as exc:
            raise StageError(i, exc) from exc
        traj.states.append(rho)
    traj.stages_run = n
    return traj


def converge(rho_a0, p: MachineParams, tol: float = 1e-6, max_stages: int = 500_000,
             variant: str = "perturbative") -> Trajectory:
    """Propagate until the trace distance to the fixed point drops below ``tol``.

    Non-convergence within ``max_stages`` is reported through
    ``Trajectory.converged``; nothing is raised for it.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    target = fixed_point(p)
    rho = np.array(rho_a0, dtype=complex)
    traj = Trajectory(states=[rho])
    stage = 0
    while _qubit_distance(rho, target) >= tol and stage < max_stages:
        stage += 1
        try:
            rho = stage_map(p, rho, variant)
        except (SteadyStateError, ValueError) as exc:
            raise StageError(stage, exc) from exc
        traj.states.append(rho)
    traj.stages_run = stage
    traj.converged = _qubit_distance(rho, target) < tol
    return traj


def kick_magnitude(rho_a, p: MachineParams, variant: str = "perturbative") -> float:
    """Trace norm of the one-machine change ``A(rho) - rho`` in units of ``phi^2``."""
    out = stage_map(p, rho_a, variant)
    return trace_distance(out, rho_a) / p.phi**2


def stage_flows(traj: Trajectory) -> list[FlowReport]:
    return traj.flows
