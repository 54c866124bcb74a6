"""Parameter and state types for the driven qubit.

Units: hbar = k_B = 1 and the level splitting ``delta`` sets the energy scale,
so every rate, temperature and cutoff is expressed in units of delta and every
time as ``delta * t``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

# tolerated excess of |r| over 1 before a state is rejected as unphysical
BLOCH_NORM_SLACK = 1e-6


class ValidationError(ValueError):
    """Raised when a parameter or state violates its physical constraints."""


class NumericalError(RuntimeError):
    """Raised when a quadrature or an integration cannot produce a finite result."""


@dataclass(frozen=True)
class HamiltonianParams:
    """Effective rotating-frame Hamiltonian ``(delta sz + omega_x sx + omega_y sy) / 2``."""

    delta: float = 1.0
    omega_r: float = 0.0
    phi_r: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValidationError(f"delta must be positive, got {self.delta}")
        if not (math.isfinite(self.omega_r) and self.omega_r >= 0):
            raise ValidationError(f"omega_r must be >= 0, got {self.omega_r}")
        if not math.isfinite(self.phi_r):
            raise ValidationError(f"phi_r must be finite, got {self.phi_r}")

    @property
    def omega_x(self) -> float:
        return self.omega_r * math.cos(self.phi_r)

    @property
    def omega_y(self) -> float:
        return self.omega_r * math.sin(self.phi_r)

    @property
    def field(self) -> np.ndarray:
        """Precession vector ``(omega_x, omega_y, delta)``; the free motion is ``dr/dt = field x r``."""
        return np.array([self.omega_x, self.omega_y, self.delta])

    @property
    def generalized_rabi(self) -> float:
        """``sqrt(omega_r**2 + delta**2)``."""
        return math.hypot(self.omega_r, self.delta)

    @property
    def period(self) -> float:
        """Period ``2 pi / sqrt(omega_r**2 + delta**2)`` of the free Bloch precession."""
        return 2 * math.pi / self.generalized_rabi


@dataclass(frozen=True)
class InitialStateSpec:
    """Pure initial state ``cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>``."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise ValidationError(f"theta must lie in [0, pi], got {self.theta}")
        if not math.isfinite(self.phi):
            raise ValidationError(f"phi must be finite, got {self.phi}")


@dataclass(frozen=True)
class QubitState:
    """A qubit state held as its Bloch vector; ``rho`` is a derived view."""

    bloch: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.bloch, dtype=float).reshape(3).copy()
        if not np.all(np.isfinite(r)):
            raise ValidationError(f"Bloch vector must be finite, got {r}")
        if np.linalg.norm(r) > 1 + BLOCH_NORM_SLACK:
            raise ValidationError(f"unphysical state: |r| = {np.linalg.norm(r):.12g} > 1")
        r.flags.writeable = False
        object.__setattr__(self, "bloch", r)

    @classmethod
    def from_density(cls, rho) -> QubitState:
        return cls(bloch_from_density(rho))

    @property
    def rho(self) -> np.ndarray:
        return density_from_bloch(self.bloch)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.bloch))

    @property
    def coherence(self) -> complex:
        """Off-diagonal element ``rho_01 = (r_x - i r_y) / 2``."""
        return complex(self.bloch[0], -self.bloch[1]) / 2


class Axis(enum.IntEnum):
    """Coupling direction, indexed as in the interaction Hamiltonian."""

    LONGITUDINAL = 0
    TRANSVERSE_X = 1
    TRANSVERSE_Y = 2

    @property
    def label(self) -> str:
        return ("z", "x", "y")[self]


class NoiseModel(str, enum.Enum):
    NONE = "none"
    OHMIC_HIGH_T = "ohmic_high_t"
    OHMIC_FINITE_T = "ohmic_finite_t"
    OHMIC_ZERO_T = "ohmic_zero_t"
    ONE_OVER_F = "one_over_f"

    @property
    def is_ohmic(self) -> bool:
        return self.value.startswith("ohmic")


# parameters read by each model; the config loader rejects the rest
MODEL_PARAMETERS = {
    NoiseModel.NONE: (),
    NoiseModel.OHMIC_HIGH_T: ("gamma", "temperature"),
    NoiseModel.OHMIC_FINITE_T: ("gamma", "cutoff", "temperature"),
    NoiseModel.OHMIC_ZERO_T: ("gamma", "cutoff"),
    NoiseModel.ONE_OVER_F: ("sigma", "zeta"),
}


@dataclass(frozen=True)
class NoiseChannelSpec:
    """Environment coupled to the qubit along one axis.

    ``gamma`` is the dimensionless Ohmic coupling, ``cutoff`` the ultraviolet
    cutoff Lambda, ``temperature`` the bath temperature, and ``sigma``/``zeta``
    the amplitude and switching rate of the 1/f (fluctuator ensemble) noise.
    """

    axis: Axis
    model: NoiseModel = NoiseModel.NONE
    gamma: float = 0.0
    cutoff: float | None = None
    temperature: float | None = None
    sigma: float = 0.0
    zeta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis(self.axis))
        object.__setattr__(self, "model", NoiseModel(self.model))
        m = self.model
        needs = MODEL_PARAMETERS[m]
        if self.gamma < 0 or not math.isfinite(self.gamma):
            raise ValidationError(f"gamma must be >= 0, got {self.gamma}")
        if self.sigma < 0 or not math.isfinite(self.sigma):
            raise ValidationError(f"sigma must be >= 0, got {self.sigma}")
        if "cutoff" in needs and not (self.cutoff is not None and self.cutoff > 0):
            raise ValidationError(f"{m.value} requires cutoff > 0, got {self.cutoff}")
        if "temperature" in needs:
            if self.temperature is None or self.temperature < 0:
                raise ValidationError(f"{m.value} requires temperature >= 0, got {self.temperature}")
            if m in (NoiseModel.OHMIC_HIGH_T, NoiseModel.OHMIC_FINITE_T) and self.temperature == 0:
                raise ValidationError(f"{m.value} requires temperature > 0; use ohmic_zero_t for T = 0")
        if "zeta" in needs:
            if not (self.zeta is not None and self.zeta > 0):
                raise ValidationError(f"one_over_f requires zeta > 0, got {self.zeta}")
            if self.sigma >= self.zeta:
                warnings.warn(
                    f"axis {self.axis.label}: sigma={self.sigma} >= zeta={self.zeta}; "
                    "memory effects are not negligible and the weak-coupling equation may be unreliable",
                    RuntimeWarning,
                    stacklevel=3,
                )

    @property
    def is_active(self) -> bool:
        """False when the channel cannot affect the dynamics."""
        if self.model is NoiseModel.NONE:
            return False
        if self.model is NoiseModel.ONE_OVER_F:
            return self.sigma > 0
        return self.gamma > 0


def bloch_from_angles(spec: InitialStateSpec) -> QubitState:
    """Pure state on the Bloch sphere at polar angle ``theta`` and azimuth ``phi``."""
    if not (0.0 <= spec.theta <= math.pi):
        raise ValidationError(f"theta must lie in [0, pi], got {spec.theta}")
    s = math.sin(spec.theta)
    return QubitState(np.array([s * math.cos(spec.phi), s * math.sin(spec.phi), math.cos(spec.theta)]))


def density_from_bloch(r) -> np.ndarray:
    """``rho = (I + r . sigma) / 2``."""
    r = np.asarray(r, dtype=float).reshape(3)
    norm = np.linalg.norm(r)
    if norm > 1 + BLOCH_NORM_SLACK:
        raise ValidationError(f"unphysical state: |r| = {norm:.12g} > 1")
    return 0.5 * np.array(
        [[1 + r[2], r[0] - 1j * r[1]], [r[0] + 1j * r[1], 1 - r[2]]],
        dtype=complex,
    )


def bloch_from_density(rho) -> np.ndarray:
    """Inverse of :func:`density_from_bloch`, ``r_k = Tr(rho sigma_k)``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValidationError(f"density matrix must be 2x2, got shape {rho.shape}")
    return np.array([2 * rho[1, 0].real, 2 * rho[1, 0].imag, (rho[0, 0] - rho[1, 1]).real])


def purity(state: QubitState) -> float:
    """``Tr rho**2 = (1 + |r|**2) / 2``."""
    r = state.bloch
    return 0.5 * (1.0 + float(r @ r))
