"""Pauli operators rotated by the free qubit Hamiltonian.

For each coupling axis ``a`` the rotated operator is written as
``X_a(t) sx + Y_a(t) sy + Z_a(t) sz``.  The closed forms are rotations of the
Pauli triple about ``n = (omega_x, omega_y, delta) / W`` by the angle ``2 W t``,
``W = sqrt(omega_r**2 + delta**2)``; they are entire in ``t`` and evaluated
directly at negative times.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from decoq.model import Axis, HamiltonianParams


class FrameRotation(NamedTuple):
    a: int
    t: float
    x: float
    y: float
    z: float


def frame_components(a, t, h: HamiltonianParams):
    """Vectorised ``(X_a(t), Y_a(t), Z_a(t))`` for an array of times."""
    a = Axis(a)
    t = np.asarray(t, dtype=float)
    d, ox, oy = h.delta, h.omega_x, h.omega_y
    w2 = h.omega_r**2 + d**2
    w = np.sqrt(w2)
    c = np.cos(2 * t * w)
    s = np.sin(2 * t * w)
    one_c = 1 - c
    if a is Axis.TRANSVERSE_X:
        x = (ox**2 + (d**2 + oy**2) * c) / w2
        y = (ox * oy * one_c + d * w * s) / w2
        z = (ox * d * one_c - oy * w * s) / w2
    elif a is Axis.TRANSVERSE_Y:
        x = (ox * oy * one_c - d * w * s) / w2
        y = (oy**2 + (d**2 + ox**2) * c) / w2
        z = (d * oy * one_c + ox * w * s) / w2
    else:
        x = (d * ox * one_c + oy * w * s) / w2
        y = (d * oy * one_c - ox * w * s) / w2
        z = (d**2 + h.omega_r**2 * c) / w2
    return x, y, z


def frame_rotation(a, t: float, h: HamiltonianParams) -> FrameRotation:
    x, y, z = frame_components(a, t, h)
    return FrameRotation(int(a), float(t), float(x), float(y), float(z))


def frame_matrix(t: float, h: HamiltonianParams) -> np.ndarray:
    """3x3 matrix whose rows are the x, y and z axis rotations at time ``t``."""
    return np.array([frame_components(a, t, h) for a in (Axis.TRANSVERSE_X, Axis.TRANSVERSE_Y, Axis.LONGITUDINAL)])
