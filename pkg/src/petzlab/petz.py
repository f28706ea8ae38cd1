"""Petz recovery maps.

For a channel with Kraus operators ``K_a`` and a reference state ``sigma``,
the recovery map is

    P(rho) = sigma^1/2 Lambda^dagger(Lambda(sigma)^-1/2 rho Lambda(sigma)^-1/2) sigma^1/2

with Kraus operators ``R_a = sigma^1/2 K_a^dagger Lambda(sigma)^-1/2``. When
``Lambda(sigma)`` is singular the inverse square root is taken on its support,
and the map is trace preserving only on that support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .channels import (
    ChannelError,
    KrausSet,
    SuperOperator,
    CPTPReport,
    apply,
    check_state,
    compose,
    superop_from_kraus,
    verify_cptp,
)
from .metrics import relative_entropy


@dataclass(frozen=True, eq=False)
class PetzMap:
    channel: KrausSet
    reference: np.ndarray
    source_channel: KrausSet
    support_tol: float | None = None

    @property
    def dim(self) -> int:
        return self.channel.dim

    def composed(self) -> SuperOperator:
        """Superoperator of ``P o Lambda``, the map compared against the identity."""
        return compose(superop_from_kraus(self.channel), superop_from_kraus(self.source_channel))


def _prepare(channel: KrausSet, sigma, support_tol):
    sigma = check_state(sigma)
    if sigma.shape[0] != channel.dim:
        raise ChannelError(f"dimension mismatch: channel {channel.dim}, reference {sigma.shape[0]}")
    out = apply(channel, sigma)
    try:
        inv_half = linalg.pinv_sqrt(out, support_tol)
    except linalg.LinalgError as exc:
        raise ChannelError(f"cannot invert Lambda(sigma): {exc}") from exc
    return linalg.matrix_sqrt(sigma), inv_half


def petz_map(channel: KrausSet, sigma, support_tol: float | None = None) -> PetzMap:
    """Build the Petz recovery map of ``channel`` with reference state ``sigma``.

    ``support_tol`` defaults to ``1e-10`` times the largest eigenvalue of
    ``Lambda(sigma)``. If ``sigma`` is rank deficient it is up to the caller to
    feed only states supported inside ``supp(sigma)``.
    """
    sigma_half, inv_half = _prepare(channel, sigma, support_tol)
    kdag = np.conj(np.swapaxes(channel.operators, 1, 2))
    ops = sigma_half @ kdag @ inv_half
    return PetzMap(KrausSet(ops), np.asarray(sigma, complex), channel, support_tol)


def petz_superop_aform(channel: KrausSet, sigma, support_tol: float | None = None) -> SuperOperator:
    """Petz superoperator assembled as ``(s kron s^T) . sum_a M_a kron conj(M_a)``.

    Here ``s = sigma^1/2`` and ``M_a = K_a^dagger Lambda(sigma)^-1/2``. This
    goes through the superoperator algebra directly and serves as a check on
    the Kraus construction in :func:`petz_map`.
    """
    sigma_half, inv_half = _prepare(channel, sigma, support_tol)
    kdag = np.conj(np.swapaxes(channel.operators, 1, 2))
    middle = superop_from_kraus(KrausSet(kdag @ inv_half)).matrix
    outer = linalg.kron(sigma_half, sigma_half.T)
    return SuperOperator(outer @ middle)


def verify_petz(petz: PetzMap, tol: float = 1e-9) -> CPTPReport:
    """CP check plus trace preservation on the support of ``Lambda(sigma)``.

    The TP residual is ``||sum R^dagger R - Pi||_F`` with ``Pi`` the projector
    onto ``supp Lambda(sigma)``, which reduces to the usual check when
    ``Lambda(sigma)`` is invertible.
    """
    cp_min = verify_cptp(petz.channel, tol).cp_min_eig
    out = apply(petz.source_channel, petz.reference)
    proj = linalg.support_projector(out, petz.support_tol)
    ops = petz.channel.operators
    gram = np.einsum("aji,ajk->ik", ops.conj(), ops)
    tp = float(np.linalg.norm(gram - proj))
    return CPTPReport(cp_min, tp, bool(cp_min >= -tol and tp <= tol))


def recover(petz: PetzMap, state) -> np.ndarray:
    """Apply the recovery map to a channel output."""
    return apply(petz.channel, state)


def recoverability_defect(channel: KrausSet, sigma, rho) -> float:
    """Relative-entropy loss ``S(rho||sigma) - S(Lambda(rho)||Lambda(sigma))``.

    Non-negative by data processing; zero iff the Petz map with reference
    ``sigma`` recovers ``rho`` exactly. ``inf`` when ``supp(rho)`` is not
    inside ``supp(sigma)``.
    """
    before = relative_entropy(rho, sigma)
    if np.isinf(before):
        return float("inf")
    after = relative_entropy(apply(channel, rho), apply(channel, sigma))
    return before - after
