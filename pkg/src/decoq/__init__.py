"""Decoherence of a driven qubit under longitudinal and transverse Ohmic and 1/f noise."""

from decoq.coefficients import CoefficientSet, CoefficientTable, build_coefficient_table, coefficients_at
from decoq.evolver import BlochGenerator, Trajectory, assemble_generator, integrate, rhs_dense
from decoq.frame import FrameRotation, frame_rotation
from decoq.model import (
    Axis,
    HamiltonianParams,
    InitialStateSpec,
    NoiseChannelSpec,
    NoiseModel,
    NumericalError,
    QubitState,
    ValidationError,
    bloch_from_angles,
    bloch_from_density,
    density_from_bloch,
    purity,
)
from decoq.observables import (
    DecoherenceReport,
    analytic_td_estimate,
    bloch_norm_series,
    coherence_series,
    envelope_decoherence_time,
)

__version__ = "0.1.0"
