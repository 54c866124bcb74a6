"""One complete run: coefficient table, trajectory and decoherence report."""

from __future__ import annotations

from dataclasses import dataclass

from decoq.coefficients import CoefficientTable, build_coefficient_table
from decoq.config import RunConfig
from decoq.evolver import Trajectory, integrate
from decoq.model import MODEL_PARAMETERS, bloch_from_angles
from decoq.observables import DecoherenceReport, decoherence_report


@dataclass
class RunResult:
    config: RunConfig
    table: CoefficientTable
    trajectory: Trajectory
    report: DecoherenceReport


def describe_channel(ch) -> str:
    params = ", ".join(f"{p}={getattr(ch, p)!r}" for p in MODEL_PARAMETERS[ch.model])
    return f"{ch.model.value}({params})" if params else ch.model.value


def coefficient_table(config: RunConfig) -> CoefficientTable:
    s = config.integration
    return build_coefficient_table(config.channels, config.hamiltonian, s.t_max, s.h_coeff)


def simulate(config: RunConfig, table: CoefficientTable | None = None) -> RunResult:
    s = config.integration
    if table is None:
        table = coefficient_table(config)
    traj = integrate(bloch_from_angles(config.initial_state), table, config.hamiltonian, s.t_max, s.dt, s.output_stride)
    traj.metadata["noise"] = {ch.axis.label: describe_channel(ch) for ch in config.channels}
    report = decoherence_report(traj, config.channels, config.hamiltonian, config.threshold)
    for axis, text in traj.metadata["noise"].items():
        report.extras[f"noise_{axis}"] = text
    report.extras.update({"dt": s.dt, "h_coeff": s.h_coeff, "t_max": s.t_max, "output_stride": s.output_stride})
    return RunResult(config, table, traj, report)
