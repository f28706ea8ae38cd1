"""Figures of merit for channels and recovery maps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channels import (
    Channel,
    ChannelError,
    affine_from_channel,
    apply,
    check_state,
    choi_from_kraus,
)

SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class MetricReport:
    name: str
    value: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value < 0:
            raise ValueError(f"metric {self.name} must be finite and non-negative, got {self.value}")


def choi_distance(a: Channel, b: Channel) -> float:
    """Trace-norm distance between the normalized Choi states ``J(a)/d`` and ``J(b)/d``.

    Lies in ``[0, 2]``. For ``b`` the identity channel this measures how far
    ``a`` is from perfect recovery.
    """
    if a.dim != b.dim:
        raise ChannelError(f"dimension mismatch: {a.dim} vs {b.dim}")
    d = a.dim
    return linalg.trace_norm((choi_from_kraus(a) - choi_from_kraus(b)) / d)


def non_unitality(channel: Channel) -> float:
    """Half the trace distance between ``Lambda(I/d)`` and ``I/d``."""
    d = channel.dim
    mixed = np.eye(d) / d
    return 0.5 * linalg.trace_norm(apply(channel, mixed) - mixed)


def volume(channel: Channel) -> float:
    """Volume ratio of the accessible set, ``|det M|`` of the affine part."""
    return float(abs(np.linalg.det(affine_from_channel(channel).M)))


def trace_distance(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ChannelError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return 0.5 * linalg.trace_norm(a - b)


def _xlogx_trace(rho: np.ndarray) -> float:
    w = np.linalg.eigvalsh(rho)
    w = w[w > SUPPORT_TOL]
    return float(np.sum(w * np.log(w)))


def relative_entropy(rho, sigma) -> float:
    """``S(rho || sigma) = Tr rho (log rho - log sigma)`` in nats.

    Returns ``inf`` when ``rho`` has weight outside the support of ``sigma``.
    """
    rho = linalg.hermitize(check_state(rho))
    sigma = linalg.hermitize(check_state(sigma))
    if rho.shape != sigma.shape:
        raise ChannelError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    w, v = np.linalg.eigh(sigma)
    # weight of rho along each eigenvector of sigma
    weights = np.einsum("ij,ik,kj->j", v.conj(), rho, v).real
    inside = w > SUPPORT_TOL * max(1.0, w[-1])
    if np.any(weights[~inside] > 1e-10):
        return float("inf")
    cross = float(np.sum(weights[inside] * np.log(w[inside])))
    return _xlogx_trace(rho) - cross
