"""Qubit Bloch-ball geometry and closed-form Petz recovery for the two qubit channels.

Bloch vectors here use the standard Pauli scaling, ``rho = (I + r . sigma) / 2``,
so pure states sit on the unit sphere. The Gell-Mann coordinates used in
:mod:`petzlab.channels` are ``sqrt(2)`` times larger; the affine matrix ``M``
is the same in both scalings, only the translation differs.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .channels import Channel, ChannelError, affine_from_channel

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class BlochVector(NamedTuple):
    rx: float
    ry: float
    rz: float

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.rx**2 + self.ry**2 + self.rz**2))


class Ellipsoid(NamedTuple):
    semi_axes: tuple[float, float, float]
    center: BlochVector

    @property
    def volume_ratio(self) -> float:
        """Volume relative to the unit ball."""
        return float(np.prod(self.semi_axes))


def bloch_from_state(rho) -> BlochVector:
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise ChannelError(f"expected a qubit state, got shape {rho.shape}")
    r = np.einsum("kij,ji->k", PAULI, rho).real
    return BlochVector(*map(float, r))


def state_from_bloch(v) -> np.ndarray:
    r = np.asarray(v, dtype=float)
    if np.linalg.norm(r) > 1 + 1e-9:
        raise ChannelError(f"Bloch vector of length {np.linalg.norm(r):.6g} lies outside the ball")
    return (np.eye(2) + np.einsum("k,kij->ij", r, PAULI)) / 2


def petz_dephasing_bloch(r, p: float) -> BlochVector:
    """Bloch vector after dephasing followed by its Petz recovery.

    Independent of the reference state: the transverse components pick up
    ``(1 - p)^2`` and ``r_z`` is untouched.
    """
    if not 0 <= p <= 1:
        raise ChannelError(f"p must lie in [0, 1], got {p}")
    rx, ry, rz = r
    f = 1 + p**2 - 2 * p
    return BlochVector(f * rx, f * ry, rz)


def petz_ad_factors(p: float, eps: float) -> tuple[float, float, float]:
    """Transverse scale, longitudinal scale and z shift of the recovered AD qubit."""
    if not (0 <= p <= 1 and 0 <= eps <= 1):
        raise ChannelError(f"p and eps must lie in [0, 1], got p={p}, eps={eps}")
    den = 1 - eps * (1 - p)
    if den == 0:
        raise ChannelError("degenerate reference: eps = 1 with p = 0")
    transverse = np.sqrt(1 - eps) * np.sqrt(abs(1 - p)) / np.sqrt(den)
    longitudinal = (1 - eps + eps * p - p) / den
    shift = p * (1 - 2 * eps) / den
    return float(transverse), float(longitudinal), float(shift)


def petz_ad_bloch(r, p: float, eps: float) -> BlochVector:
    """Bloch vector after amplitude damping and Petz recovery with ``sigma(eps)``."""
    t, l, shift = petz_ad_factors(p, eps)
    rx, ry, rz = r
    return BlochVector(t * rx, t * ry, l * rz + shift)


def pauli_affine(channel: Channel) -> tuple[np.ndarray, np.ndarray]:
    """Affine action ``r -> M r + t`` on standard Bloch vectors of a qubit channel."""
    if channel.dim != 2:
        raise ChannelError(f"expected a qubit channel, got d = {channel.dim}")
    aff = affine_from_channel(channel)
    return aff.M, aff.tau / np.sqrt(2)


def accessible_ellipsoid(channel: Channel) -> Ellipsoid:
    """Image of the Bloch ball: semi-axes are singular values of ``M``, centre is the shift."""
    m, t = pauli_affine(channel)
    axes = np.linalg.svd(m, compute_uv=False)
    return Ellipsoid(tuple(float(a) for a in axes), BlochVector(*map(float, t)))
