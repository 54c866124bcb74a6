"""Noise and dissipation kernels of the supported environments.

The noise kernel ``nu_a(t)`` is the symmetrised bath correlation along axis
``a``.  Ohmic baths use ``J(w) = gamma w exp(-w / cutoff)``; the finite
temperature kernel is a frequency integral evaluated by adaptive Gauss-Kronrod
quadrature, the zero temperature and high temperature limits use closed forms.
1/f noise is the Gaussian limit of a fluctuator ensemble, with exponential
correlation and no dissipation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from decoq.model import HamiltonianParams, NumericalError, ValidationError

# 15-point Kronrod rule with its embedded 7-point Gauss rule, on [-1, 1]
_XK = np.array([
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144845693013, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.zeros(15)
_WG[1::2] = [
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
]

QUAD_RTOL = 1e-8
QUAD_ATOL = 1e-14
MAX_REFINEMENTS = 40
MAX_PANELS = 2_000_000
# coth(x) is 1 to double precision beyond this argument
_COTH_SATURATION = 20.0
# below this |cutoff * t| the zero temperature kernel uses its Taylor series
_ZERO_T_TAYLOR = 1e-4


def adaptive_gauss_kronrod(f, edges, rtol=QUAD_RTOL, atol=QUAD_ATOL):
    """Integrate a vectorised ``f`` over the partition ``edges`` with panel bisection.

    Every panel is evaluated with the 15-point Kronrod rule; the difference to
    the embedded Gauss rule serves as its error estimate.  Panels whose error
    exceeds their length-proportional share of the global tolerance are halved
    until the summed error meets ``max(atol, rtol * |I|)``.

    Returns ``(integral, error_estimate, n_panels)``.
    """
    lo = np.asarray(edges[:-1], dtype=float)
    hi = np.asarray(edges[1:], dtype=float)
    length = float(hi[-1] - lo[0])

    def panels(a, b):
        half = 0.5 * (b - a)
        fx = f((0.5 * (a + b))[:, None] + half[:, None] * _XK)
        kronrod = half * (fx @ _WK)
        return kronrod, np.abs(kronrod - half * (fx @ _WG))

    value, err = panels(lo, hi)
    for _ in range(MAX_REFINEMENTS):
        total = value.sum()
        tol = max(atol, rtol * abs(total))
        if err.sum() <= tol:
            return total, err.sum(), lo.size
        k = int(np.argmax(err))
        worst = (lo[k], hi[k], err[k])
        bad = err > tol * (hi - lo) / length
        bad[k] = True
        if lo.size + bad.sum() > MAX_PANELS:
            break
        mid = 0.5 * (lo[bad] + hi[bad])
        new_lo = np.concatenate([lo[bad], mid])
        new_hi = np.concatenate([mid, hi[bad]])
        new_value, new_err = panels(new_lo, new_hi)
        keep = ~bad
        lo, hi = np.concatenate([lo[keep], new_lo]), np.concatenate([hi[keep], new_hi])
        value, err = np.concatenate([value[keep], new_value]), np.concatenate([err[keep], new_err])
    raise NumericalError(
        f"quadrature did not converge: {lo.size} panels, tolerance {tol:.3e}, "
        f"worst panel [{worst[0]:.6g}, {worst[1]:.6g}] with error {worst[2]:.3e}"
    )


@dataclass(frozen=True)
class SpectralDensity:
    """Ohmic spectral density ``gamma w exp(-w / cutoff)``; peaks at ``w = cutoff``."""

    gamma: float
    cutoff: float

    def __call__(self, omega):
        return ohmic_spectral_density(omega, self.gamma, self.cutoff)


def ohmic_spectral_density(omega, gamma: float, cutoff: float):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValidationError("spectral density is defined for omega >= 0 only")
    out = gamma * omega * np.exp(-omega / cutoff)
    return float(out) if out.ndim == 0 else out


def frequency_limit(cutoff: float, temperature: float) -> float:
    """Upper frequency of the finite temperature quadrature."""
    return cutoff * max(40.0, 10.0 + 5.0 * temperature / cutoff)


def _thermal_integrand(gamma, cutoff, temperature, t):
    def f(omega):
        x = omega / (2 * temperature)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            # omega * coth(omega / 2T); the small-x branch is the series 2T (1 + x^2 / 3)
            w_coth = np.where(
                x < 1e-6,
                2 * temperature * (1 + x * x / 3),
                np.where(x > _COTH_SATURATION, omega, omega / np.tanh(x)),
            )
        return gamma * w_coth * np.exp(-omega / cutoff) * np.cos(omega * t)

    return f


def noise_kernel_ohmic_finite_t(t: float, gamma: float, cutoff: float, temperature: float) -> float:
    """``int_0^inf J(w) cos(w t) coth(w / 2T) dw`` by adaptive quadrature.

    Raises
    ------
    NumericalError
        If bisection cannot reach the tolerance.
    """
    if not temperature > 0:
        raise ValidationError(f"finite temperature kernel needs T > 0, got {temperature}")
    if gamma == 0:
        return 0.0
    t = abs(float(t))
    w_max = frequency_limit(cutoff, temperature)
    # one oscillation per starting panel, and panels no wider than the cutoff
    width = cutoff if t == 0 else min(cutoff, 2 * math.pi / t)
    n = max(8, math.ceil(w_max / width))
    edges = np.linspace(0.0, w_max, n + 1)
    try:
        value, _, _ = adaptive_gauss_kronrod(_thermal_integrand(gamma, cutoff, temperature, t), edges)
    except NumericalError as exc:
        raise NumericalError(f"finite-T kernel at t={t!r}, T={temperature!r}: {exc}") from None
    return float(value)


def noise_kernel_ohmic_zero_t(t, gamma: float, cutoff: float):
    """``gamma (L t sin(L t) + cos(L t) - 1) / t**2`` with ``L = cutoff``."""
    t = np.asarray(t, dtype=float)
    x = cutoff * t
    small = np.abs(x) < _ZERO_T_TAYLOR
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = gamma * (x * np.sin(x) + np.cos(x) - 1) / (t * t)
    x2 = x * x
    series = gamma * cutoff**2 * (0.5 - x2 / 8 + x2 * x2 / 144)
    out = np.where(small, series, exact)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class HighTemperatureKernel:
    """Marker for ``nu(t) = gamma T delta(t)``: diffusion is constant, anomalous terms vanish."""

    gamma: float
    temperature: float

    @property
    def diffusion(self) -> float:
        return self.gamma * self.temperature

    anomalous = 0.0


def noise_kernel_high_t_delta(gamma: float, temperature: float) -> HighTemperatureKernel:
    if not temperature > 0:
        raise ValidationError(f"high temperature kernel needs T > 0, got {temperature}")
    return HighTemperatureKernel(gamma, temperature)


def noise_kernel_1f(t, sigma: float, zeta: float):
    """``sigma**2 exp(-2 zeta |t|)``."""
    if not zeta > 0:
        raise ValidationError(f"switching rate zeta must be > 0, got {zeta}")
    out = sigma**2 * np.exp(-2 * zeta * np.abs(np.asarray(t, dtype=float)))
    return float(out) if out.ndim == 0 else out


# order of the six dissipation coefficients everywhere in the package
DISSIPATION_LABELS = ("xy", "xz", "zx", "zy", "yx", "yz")


def ohmic_dissipation_rates(h: HamiltonianParams, gamma_0: float, gamma_1: float, gamma_2: float) -> np.ndarray:
    """Temperature independent dissipation coefficients of the Ohmic bath.

    Returned in the order ``(xy, xz, zx, zy, yx, yz)``.
    """
    d, ox, oy = h.delta, h.omega_x, h.omega_y
    return np.array([
        2 * d * gamma_1,
        -2 * gamma_1 * oy,
        2 * gamma_0 * oy,
        -2 * ox * gamma_0,
        -2 * gamma_2 * d,
        2 * gamma_2 * ox,
    ])
