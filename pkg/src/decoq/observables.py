"""Decoherence measures extracted from trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from decoq.evolver import POSITIVITY_FLAG, Trajectory
from decoq.model import Axis, HamiltonianParams, NoiseModel, ValidationError

DEFAULT_THRESHOLD = math.exp(-1)


def coherence_series(traj: Trajectory) -> np.ndarray:
    """``(t, |rho_01|)`` pairs, ``|rho_01| = sqrt(r_x**2 + r_y**2) / 2``."""
    if len(traj.times) == 0:
        raise ValidationError("empty trajectory")
    return np.column_stack([traj.times, 0.5 * np.hypot(traj.bloch[:, 0], traj.bloch[:, 1])])


def bloch_norm_series(traj: Trajectory) -> np.ndarray:
    if len(traj.times) == 0:
        raise ValidationError("empty trajectory")
    return np.column_stack([traj.times, traj.norms])


def local_maxima(series) -> np.ndarray:
    """Strict local maxima of a sampled series, endpoints included.

    A plateau that rises above both of its neighbours contributes its first
    point.  Endpoints are compared with their single neighbour.
    """
    s = np.asarray(series, dtype=float)
    t, v = s[:, 0], s[:, 1]
    n = len(v)
    if n == 1:
        return s.copy()
    keep = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and v[j + 1] == v[i]:
            j += 1
        left_ok = i == 0 or v[i - 1] < v[i]
        right_ok = j == n - 1 or v[j + 1] < v[i]
        if left_ok and right_ok:
            keep.append(i)
        i = j + 1
    return np.column_stack([t[keep], v[keep]])


def envelope_decoherence_time(series, threshold: float = DEFAULT_THRESHOLD) -> float | None:
    """First time the upper envelope of ``series`` drops below ``threshold * v0``.

    The envelope is the tightest non-increasing curve above the samples,
    ``E(t) = max_{s >= t} v(s)``.  It passes through every local maximum that
    is never exceeded later, and it coincides with the series on monotonically
    decaying stretches.  The sampled envelope is interpolated linearly and
    the crossing lies between its last value at or above the level and the
    next one.  Returns
    ``None`` when the envelope never crosses.
    """
    s = np.asarray(series, dtype=float)
    t, v = s[:, 0], s[:, 1]
    v0 = v[0]
    if not v0 > 0:
        raise ValidationError("undefined baseline: series starts at zero")
    level = threshold * v0
    hull = np.maximum.accumulate(v[::-1])[::-1]
    k = int(np.nonzero(hull >= level)[0][-1])
    if k == len(v) - 1:
        return None
    frac = (hull[k] - level) / (hull[k] - hull[k + 1])
    return float(t[k] + frac * (t[k + 1] - t[k]))


@dataclass
class DecoherenceReport:
    t_d_measured: float | None
    threshold: float = DEFAULT_THRESHOLD
    method: str = "envelope_threshold"
    t_d_analytic: float | None = None
    analytic_formula: str | None = None
    envelope: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    extras: dict = field(default_factory=dict)

    def to_text(self) -> str:
        def fmt(x):
            if x is None:
                return "none"
            if isinstance(x, bool):
                return str(x).lower()
            if isinstance(x, float):
                return f"{x:.17g}"
            return str(x)

        lines = [
            f"method = {self.method}",
            f"threshold = {fmt(self.threshold)}",
            f"t_d_measured = {fmt(self.t_d_measured)}",
            f"t_d_analytic = {fmt(self.t_d_analytic)}",
            f"analytic_formula = {fmt(self.analytic_formula)}",
            f"envelope_points = {len(self.envelope)}",
        ]
        lines += [f"{k} = {fmt(v)}" for k, v in self.extras.items()]
        return "\n".join(lines) + "\n"


def analytic_td_estimate(channels, h: HamiltonianParams | None = None) -> tuple[float, str] | None:
    """Pure-dephasing estimate of the decoherence time from the longitudinal channel.

    Recognised regimes and their tags:

    ``high_t``       ``2 / (T gamma_0)``
    ``zero_t_bound`` ``2 / (gamma_0 cutoff pi)``, a lower bound valid for ``cutoff t >= 1``
    ``1f_short``     ``sqrt(2) / sigma_0`` when ``zeta_0 t_D <= 1``
    ``1f_long``      ``1 / zeta_0`` otherwise

    Returns ``None`` when the longitudinal channel is absent or in another model.
    """
    by_axis = {c.axis: c for c in (channels.values() if isinstance(channels, dict) else channels)}
    ch = by_axis.get(Axis.LONGITUDINAL)
    if ch is None or not ch.is_active:
        return None
    if ch.model is NoiseModel.OHMIC_HIGH_T:
        return 2 / (ch.temperature * ch.gamma), "high_t"
    if ch.model is NoiseModel.OHMIC_ZERO_T:
        return 2 / (ch.gamma * ch.cutoff * math.pi), "zero_t_bound"
    if ch.model is NoiseModel.ONE_OVER_F:
        short = math.sqrt(2) / ch.sigma
        if ch.zeta * short <= 1:
            return short, "1f_short"
        return 1 / ch.zeta, "1f_long"
    return None


def decoherence_report(traj: Trajectory, channels=None, h=None, threshold: float = DEFAULT_THRESHOLD) -> DecoherenceReport:
    series = coherence_series(traj)
    estimate = analytic_td_estimate(channels, h) if channels is not None else None
    report = DecoherenceReport(
        t_d_measured=envelope_decoherence_time(series, threshold) if series[0, 1] > 0 else None,
        threshold=threshold,
        envelope=local_maxima(series),
    )
    if estimate is not None:
        report.t_d_analytic, report.analytic_formula = estimate
    k = int(np.argmax(traj.norms))
    report.extras.update({
        "final_bloch_norm": float(traj.norms[-1]),
        "final_abs_rho01": float(series[-1, 1]),
        "max_bloch_norm": float(traj.norms[k]),
        "max_bloch_norm_time": float(traj.times[k]),
        "positivity_flag": bool(traj.norms[k] > 1 + POSITIVITY_FLAG),
    })
    return report
