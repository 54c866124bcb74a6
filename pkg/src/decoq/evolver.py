"""Master-equation generator in Bloch form and its fixed-step integrator.

With ``rho = (I + r . sigma) / 2`` the master equation closes on the affine
system ``dr/dt = A(t) r + b(t)``:

* unitary part: ``field x r`` with ``field = (omega_x, omega_y, delta)``;
* ``-d_ii [s_i, [s_i, rho]]`` damps the two components orthogonal to ``i`` at rate ``4 d_ii``;
* ``-f_ij [s_i, [s_j, rho]]`` feeds ``dr_j/dt += 4 f_ij r_i``;
* ``+i g_ij [s_i, {s_j, rho}]`` adds the constant drift ``dr_k/dt -= 4 g_ij eps_ijk``.

:func:`rhs_dense` evaluates the same equation with explicit 2x2 matrix
algebra and serves as the oracle for :func:`assemble_generator`.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from decoq.coefficients import CoefficientSet, CoefficientTable
from decoq.model import PAULI, HamiltonianParams, NumericalError, QubitState, ValidationError

log = logging.getLogger(__name__)

# (i, j) axis pairs of the anomalous and dissipation labels xy, xz, zx, zy, yx, yz
PAIRS = ((0, 1), (0, 2), (2, 0), (2, 1), (1, 0), (1, 2))
POSITIVITY_FLAG = 1e-3
# steps whose affine maps are built at once
_CHUNK = 20_000
TRAJECTORY_COLUMNS = ("t", "r_x", "r_y", "r_z", "bloch_norm", "re_rho01", "im_rho01", "abs_rho01", "purity")


def _levi_civita(i, j):
    k = 3 - i - j
    return k, (1.0 if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1.0)


@dataclass(frozen=True)
class BlochGenerator:
    t: float
    a_matrix: np.ndarray
    b_vector: np.ndarray

    def __call__(self, r) -> np.ndarray:
        return self.a_matrix @ np.asarray(r, dtype=float) + self.b_vector


def _cross_matrix(v) -> np.ndarray:
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def _generator_arrays(d, f, g, h: HamiltonianParams):
    """Batched ``A`` and ``b`` for coefficient arrays with a leading time axis."""
    n = d.shape[0]
    a = np.broadcast_to(_cross_matrix(h.field), (n, 3, 3)).copy()
    for i in range(3):
        for j in range(3):
            if j != i:
                a[:, j, j] -= 4 * d[:, i]
    b = np.zeros((n, 3))
    for idx, (i, j) in enumerate(PAIRS):
        a[:, j, i] += 4 * f[:, idx]
        k, eps = _levi_civita(i, j)
        b[:, k] -= 4 * eps * g[:, idx]
    return a, b


def assemble_generator(c: CoefficientSet, h: HamiltonianParams) -> BlochGenerator:
    a, b = _generator_arrays(c.d[None, :], c.f[None, :], c.g[None, :], h)
    return BlochGenerator(c.t, a[0], b[0])


def _comm(x, y):
    return x @ y - y @ x


def _anti(x, y):
    return x @ y + y @ x


def rhs_dense(rho, c: CoefficientSet, h: HamiltonianParams) -> np.ndarray:
    """Right-hand side of the master equation by literal commutator algebra."""
    rho = np.asarray(rho, dtype=complex)
    sx, sy, sz = PAULI
    h_eff = 0.5 * (h.delta * sz + h.omega_x * sx + h.omega_y * sy)
    out = -1j * _comm(h_eff, rho)
    for i, s in enumerate(PAULI):
        out -= c.d[i] * _comm(s, _comm(s, rho))
    for idx, (i, j) in enumerate(PAIRS):
        out -= c.f[idx] * _comm(PAULI[i], _comm(PAULI[j], rho))
        out += 1j * c.g[idx] * _comm(PAULI[i], _anti(PAULI[j], rho))
    return out


@dataclass
class Trajectory:
    """Sampled Bloch vectors of one run."""

    times: np.ndarray
    bloch: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.bloch, axis=1)

    @property
    def coherences(self) -> np.ndarray:
        """Complex ``rho_01`` along the trajectory."""
        return 0.5 * (self.bloch[:, 0] - 1j * self.bloch[:, 1])

    @property
    def states(self) -> list[QubitState]:
        return [QubitState(r) for r in self.bloch]

    @property
    def max_norm(self) -> float:
        return float(self.norms.max())

    @property
    def positivity_violated(self) -> bool:
        return self.max_norm > 1 + POSITIVITY_FLAG

    def rows(self):
        norms = self.norms
        rho01 = self.coherences
        for t, r, n, c in zip(self.times, self.bloch, norms, rho01):
            yield (t, r[0], r[1], r[2], n, c.real, c.imag, abs(c), 0.5 * (1 + n * n))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRAJECTORY_COLUMNS)
            for row in self.rows():
                writer.writerow([f"{v + 0.0:.17g}" for v in row])


def _rk4_affine_maps(table: CoefficientTable, h: HamiltonianParams, start: int, stop: int, dt: float):
    """Per-step maps ``r -> M r + c`` equivalent to one classical RK4 step each.

    The equation is linear in ``r`` and the coefficients do not depend on the
    state, so the four stages collapse into one affine map per step that can
    be built for all steps at once.
    """
    n_steps = stop - start
    t0 = dt * np.arange(start, stop)
    stage_times = np.concatenate([t0, t0 + 0.5 * dt, t0 + dt])
    stage_times[-1] = min(stage_times[-1], table.t_max)
    a, b = _generator_arrays(*table.interpolate(stage_times), h)
    a0, am, a1 = a[:n_steps], a[n_steps : 2 * n_steps], a[2 * n_steps :]
    b0, bm, b1 = b[:n_steps], b[n_steps : 2 * n_steps], b[2 * n_steps :]

    eye = np.eye(3)
    mv = np.matmul
    # stage k_i = P_i r + q_i
    p1, q1 = a0, b0
    p2 = mv(am, eye + 0.5 * dt * p1)
    q2 = mv(am, 0.5 * dt * q1[..., None])[..., 0] + bm
    p3 = mv(am, eye + 0.5 * dt * p2)
    q3 = mv(am, 0.5 * dt * q2[..., None])[..., 0] + bm
    p4 = mv(a1, eye + dt * p3)
    q4 = mv(a1, dt * q3[..., None])[..., 0] + b1
    m = eye + dt / 6 * (p1 + 2 * p2 + 2 * p3 + p4)
    c = dt / 6 * (q1 + 2 * q2 + 2 * q3 + q4)
    return m, c


def integrate(
    initial: QubitState,
    table: CoefficientTable,
    h: HamiltonianParams,
    t_max: float,
    dt: float,
    output_stride: int = 1,
) -> Trajectory:
    """Integrate ``dr/dt = A(t) r + b(t)`` from ``t = 0`` with fixed-step RK4.

    The state is recorded every ``output_stride`` steps and at the final step.

    Raises
    ------
    ValidationError
        If ``dt`` exceeds the coefficient grid step or ``t_max`` the table range.
    NumericalError
        On the first non-finite state, naming the step.
    """
    if not dt > 0:
        raise ValidationError(f"dt must be > 0, got {dt}")
    if dt > table.step * (1 + 1e-12):
        raise ValidationError(f"dt={dt} exceeds the coefficient grid step {table.step}")
    if not 0 < t_max <= table.t_max * (1 + 1e-12):
        raise ValidationError(f"t_max={t_max} outside the tabulated range (0, {table.t_max}]")
    if output_stride < 1:
        raise ValidationError(f"output_stride must be >= 1, got {output_stride}")
    # the last step may overshoot t_max by less than dt, dt itself is never altered
    n_steps = math.ceil(t_max / dt - 1e-9)
    if n_steps * dt > table.t_max * (1 + 1e-12):
        raise ValidationError(f"{n_steps} steps of dt={dt} run past the tabulated range {table.t_max}")
    ratio = table.step / dt
    if abs(ratio - round(ratio)) > 1e-9:
        log.warning("dt=%g does not divide the coefficient step %g; convergence order drops", dt, table.step)

    r = np.array(initial.bloch, dtype=float)
    out_idx = list(range(0, n_steps + 1, output_stride))
    if out_idx[-1] != n_steps:
        out_idx.append(n_steps)
    samples = np.empty((len(out_idx), 3))
    samples[0] = r
    next_out = 1
    x, y, z = r
    for start in range(0, n_steps, _CHUNK):
        stop = min(start + _CHUNK, n_steps)
        # non-finite entries are reported per step below
        with np.errstate(invalid="ignore", over="ignore"):
            m, c = _rk4_affine_maps(table, h, start, stop, dt)
        for step, ((m0, m1, m2), (c0, c1, c2)) in enumerate(zip(m.tolist(), c.tolist()), start + 1):
            x, y, z = (
                m0[0] * x + m0[1] * y + m0[2] * z + c0,
                m1[0] * x + m1[1] * y + m1[2] * z + c1,
                m2[0] * x + m2[1] * y + m2[2] * z + c2,
            )
            if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
                raise NumericalError(f"non-finite state at step {step} (t={step * dt:.6g})")
            if next_out < len(out_idx) and out_idx[next_out] == step:
                samples[next_out] = (x, y, z)
                next_out += 1

    traj = Trajectory(
        times=dt * np.asarray(out_idx, dtype=float),
        bloch=samples,
        metadata={"dt": dt, "t_max": t_max, "output_stride": output_stride, "h_coeff": table.step},
    )
    if traj.positivity_violated:
        k = int(np.argmax(traj.norms))
        log.warning(
            "positivity violated: max |r| = %.9f at t = %.6g (flag threshold 1 + %g)",
            traj.max_norm, traj.times[k], POSITIVITY_FLAG,
        )
    return traj
