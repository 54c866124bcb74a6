"""Time-dependent diffusion and dissipation coefficients of the master equation.

Each coupling axis contributes three diffusion entries, the cumulative
integrals ``int_0^t nu_a(s) F(-s) ds`` of its noise kernel against the rotated
Pauli components ``F = X_a, Y_a, Z_a``:

    axis x (a=1) -> d_xx, f_xy, f_xz
    axis y (a=2) -> f_yx, d_yy, f_yz
    axis z (a=0) -> f_zx, f_zy, d_zz

The integrals are tabulated once on a uniform grid by cumulative Simpson
accumulation and interpolated linearly in between.
"""

from __future__ import annotations

import csv
import math
import warnings
from collections.abc import Callable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from decoq import kernels
from decoq.frame import frame_components
from decoq.model import Axis, HamiltonianParams, NoiseChannelSpec, NoiseModel, NumericalError, ValidationError

DIFFUSION_LABELS = ("xx", "yy", "zz")
ANOMALOUS_LABELS = ("xy", "xz", "zx", "zy", "yx", "yz")
DISSIPATION_LABELS = kernels.DISSIPATION_LABELS
CSV_COLUMNS = (
    ["t"]
    + [f"d_{k}" for k in DIFFUSION_LABELS]
    + [f"f_{k}" for k in ANOMALOUS_LABELS]
    + [f"g_{k}" for k in DISSIPATION_LABELS]
)

# largest cutoff * h_coeff for which Simpson still resolves an Ohmic kernel
KERNEL_RESOLUTION = 0.5

# (diffusion index, anomalous index, anomalous index) filled by the x, y and z components of each axis
_AXIS_SLOTS = {
    Axis.TRANSVERSE_X: (("d", 0), ("f", 0), ("f", 1)),
    Axis.TRANSVERSE_Y: (("f", 4), ("d", 1), ("f", 5)),
    Axis.LONGITUDINAL: (("f", 2), ("f", 3), ("d", 2)),
}


@dataclass(frozen=True)
class CoefficientSet:
    """All fifteen coefficients at one time; ``d``, ``f`` and ``g`` follow the label tuples."""

    t: float
    d: np.ndarray
    f: np.ndarray
    g: np.ndarray

    @classmethod
    def zero(cls, t: float = 0.0) -> CoefficientSet:
        return cls(t, np.zeros(3), np.zeros(6), np.zeros(6))

    def as_dict(self) -> dict[str, float]:
        out = {f"d_{k}": float(v) for k, v in zip(DIFFUSION_LABELS, self.d)}
        out.update({f"f_{k}": float(v) for k, v in zip(ANOMALOUS_LABELS, self.f)})
        out.update({f"g_{k}": float(v) for k, v in zip(DISSIPATION_LABELS, self.g)})
        return out


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients on the uniform grid ``t_k = k * step``; rows are ``(t, 15)`` arrays."""

    times: np.ndarray
    d: np.ndarray
    f: np.ndarray
    g: np.ndarray

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def row(self, k: int) -> CoefficientSet:
        return CoefficientSet(float(self.times[k]), self.d[k].copy(), self.f[k].copy(), self.g[k].copy())

    def interpolate(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorised linear interpolation, returning ``(d, f, g)`` with a leading time axis."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        eps = 1e-12 * max(1.0, self.t_max)
        if np.any(t < -eps) or np.any(t > self.t_max + eps):
            raise ValidationError(f"time outside the tabulated range [0, {self.t_max}]")
        u = np.clip(t / self.step, 0, len(self.times) - 1)
        k = np.minimum(np.floor(u).astype(int), len(self.times) - 2)
        w = (u - k)[:, None]
        return tuple((1 - w) * arr[k] + w * arr[k + 1] for arr in (self.d, self.f, self.g))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for k, t in enumerate(self.times):
                values = [t, *self.d[k], *self.f[k], *self.g[k]]
                writer.writerow([f"{v + 0.0:.17g}" for v in values])


def coefficients_at(table: CoefficientTable, t: float) -> CoefficientSet:
    """Coefficients at ``t``, exact at grid nodes and linear in between."""
    if not (0.0 <= t <= table.t_max):
        raise ValidationError(f"t={t} outside the tabulated range [0, {table.t_max}]")
    u = t / table.step
    k = round(u)
    if abs(u - k) < 1e-9 and k < len(table.times):
        return table.row(k)
    d, f, g = table.interpolate(t)
    return CoefficientSet(float(t), d[0], f[0], g[0])


def max_coefficient_step(h: HamiltonianParams) -> float:
    """Largest grid step allowed: 20 points per half-period of the frame rotation."""
    return math.pi / h.generalized_rabi / 20


def default_coefficient_step(h: HamiltonianParams) -> float:
    return min(0.002 / h.delta, h.period / 200)


def kernel_function(channel: NoiseChannelSpec) -> Callable[[np.ndarray], np.ndarray] | None:
    """Vectorised noise kernel of a channel, or ``None`` when it is not tabulated."""
    m = channel.model
    if m is NoiseModel.OHMIC_ZERO_T:
        return lambda s: kernels.noise_kernel_ohmic_zero_t(s, channel.gamma, channel.cutoff)
    if m is NoiseModel.ONE_OVER_F:
        return lambda s: kernels.noise_kernel_1f(s, channel.sigma, channel.zeta)
    if m is NoiseModel.OHMIC_FINITE_T:
        def nu(s):
            out = np.empty(np.shape(s))
            for i, si in enumerate(np.ravel(s)):
                out.flat[i] = kernels.noise_kernel_ohmic_finite_t(si, channel.gamma, channel.cutoff, channel.temperature)
            return out
        return nu
    return None


def cumulative_diffusion(nu, a, h: HamiltonianParams, times: np.ndarray) -> np.ndarray:
    """``int_0^t nu(s) (X_a, Y_a, Z_a)(-s) ds`` on ``times``; returns a ``(len(times), 3)`` array.

    ``nu`` is a vectorised kernel.  Evaluation failures are re-raised naming
    the axis and time.
    """
    try:
        values = np.asarray(nu(times), dtype=float)
    except NumericalError as exc:
        raise NumericalError(f"kernel evaluation failed on axis {Axis(a).label}: {exc}") from None
    bad = ~np.isfinite(values)
    if bad.any():
        s = times[np.argmax(bad)]
        raise NumericalError(f"non-finite kernel value on axis {Axis(a).label} at s={s!r}")
    components = frame_components(a, -times, h)
    out = np.empty((len(times), 3))
    for j, comp in enumerate(components):
        out[:, j] = cumulative_simpson(values * comp, x=times, initial=0.0)
    return out


def _channel_contribution(channel: NoiseChannelSpec, h: HamiltonianParams, times: np.ndarray) -> np.ndarray:
    if not channel.is_active:
        return np.zeros((len(times), 3))
    if channel.model is NoiseModel.OHMIC_HIGH_T:
        kernel = kernels.noise_kernel_high_t_delta(channel.gamma, channel.temperature)
        out = np.zeros((len(times), 3))
        diag = {Axis.TRANSVERSE_X: 0, Axis.TRANSVERSE_Y: 1, Axis.LONGITUDINAL: 2}[channel.axis]
        out[:, diag] = kernel.diffusion
        return out
    return cumulative_diffusion(kernel_function(channel), channel.axis, h, times)


def _normalise_channels(channels) -> dict[Axis, NoiseChannelSpec]:
    if isinstance(channels, Mapping):
        items = channels.values()
    else:
        items = channels
    out = {}
    for ch in items:
        if ch.axis in out:
            raise ValidationError(f"duplicate channel for axis {ch.axis.label}")
        out[ch.axis] = ch
    for axis in Axis:
        out.setdefault(axis, NoiseChannelSpec(axis))
    return out


def dissipation_constants(channels, h: HamiltonianParams) -> np.ndarray:
    """The six dissipation coefficients; only Ohmic channels contribute."""
    chans = _normalise_channels(channels)
    g = [chans[a].gamma if chans[a].model.is_ohmic else 0.0 for a in (Axis.LONGITUDINAL, Axis.TRANSVERSE_X, Axis.TRANSVERSE_Y)]
    return kernels.ohmic_dissipation_rates(h, *g)


def build_coefficient_table(
    channels,
    h: HamiltonianParams,
    t_max: float,
    h_coeff: float | None = None,
    jobs: int = 1,
) -> CoefficientTable:
    """Tabulate all coefficients on ``[0, t_max]`` with grid step ``h_coeff``.

    Parameters
    ----------
    channels : iterable or mapping of NoiseChannelSpec
        At most one channel per axis; missing axes are uncoupled.
    h : HamiltonianParams
    t_max : float
        End of the table; the grid is extended to the next whole step.
    h_coeff : float, optional
        Grid step, by default ``min(0.002, period / 200)``.  It must resolve
        the frame rotation with at least 20 points per half-period.
    jobs : int
        Axes are independent and may be tabulated in parallel threads.
    """
    if not t_max > 0:
        raise ValidationError(f"t_max must be > 0, got {t_max}")
    if h_coeff is None:
        h_coeff = default_coefficient_step(h)
    if not h_coeff > 0:
        raise ValidationError(f"h_coeff must be > 0, got {h_coeff}")
    limit = max_coefficient_step(h)
    if h_coeff > limit * (1 + 1e-12):
        raise ValidationError(f"h_coeff={h_coeff} exceeds {limit:.6g} (20 points per frame half-period)")
    chans = _normalise_channels(channels)
    for ch in chans.values():
        if ch.is_active and ch.cutoff is not None and ch.model is not NoiseModel.OHMIC_HIGH_T:
            if ch.cutoff * h_coeff > KERNEL_RESOLUTION:
                warnings.warn(
                    f"axis {ch.axis.label}: cutoff * h_coeff = {ch.cutoff * h_coeff:.3g} exceeds {KERNEL_RESOLUTION}; "
                    "the kernel is under-resolved and the coefficients are unreliable",
                    RuntimeWarning,
                    stacklevel=2,
                )
    n = max(2, math.ceil(t_max / h_coeff - 1e-9))
    times = h_coeff * np.arange(n + 1)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=min(jobs, 3)) as pool:
            parts = dict(zip(chans, pool.map(lambda a: _channel_contribution(chans[a], h, times), chans)))
    else:
        parts = {a: _channel_contribution(chans[a], h, times) for a in chans}

    d = np.zeros((len(times), 3))
    f = np.zeros((len(times), 6))
    for axis, contribution in parts.items():
        for j, (kind, idx) in enumerate(_AXIS_SLOTS[axis]):
            (d if kind == "d" else f)[:, idx] = contribution[:, j]
    g = np.tile(dissipation_constants(chans, h), (len(times), 1))
    for arr in (d, f, g):
        arr.flags.writeable = False
    times.flags.writeable = False
    return CoefficientTable(times, d, f, g)
