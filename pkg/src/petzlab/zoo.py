"""Constructors for the dephasing and amplitude-damping families and the reference states."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .channels import ChannelError, KrausSet


def _check_dim(d: int) -> int:
    if int(d) != d or d < 2:
        raise ChannelError(f"dimension must be an integer >= 2, got {d}")
    return int(d)


def _check_prob(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ChannelError(f"{name} must lie in [0, 1], got {p}")
    return p


def identity_channel(d: int) -> KrausSet:
    d = _check_dim(d)
    return KrausSet(np.eye(d)[None])


def dephasing(d: int, p: float) -> KrausSet:
    """``rho -> (1 - p) rho + p sum_k P_k rho P_k``.

    Kraus operators are ``sqrt(1-p) I`` followed by ``sqrt(p) |k><k|`` for each
    level, so off-diagonal entries are multiplied by ``1 - p``.
    """
    d = _check_dim(d)
    p = _check_prob(p)
    ops = np.zeros((d + 1, d, d), complex)
    ops[0] = np.sqrt(1 - p) * np.eye(d)
    for k in range(d):
        ops[k + 1, k, k] = np.sqrt(p)
    return KrausSet(ops)


def amplitude_damping_nonuniform(probs: Sequence[float]) -> KrausSet:
    """Damping of each excited level ``i`` to the ground state with its own probability.

    ``probs[i-1]`` is the decay probability of level ``i``; ``d = len(probs) + 1``.
    Transitions between excited levels are not modelled.
    """
    probs = [_check_prob(q, f"probs[{i}]") for i, q in enumerate(probs)]
    d = _check_dim(len(probs) + 1)
    ops = np.zeros((d, d, d), complex)
    ops[0] = np.diag([1.0] + [np.sqrt(1 - q) for q in probs])
    for i, q in enumerate(probs, start=1):
        ops[i, 0, i] = np.sqrt(q)
    return KrausSet(ops)


def amplitude_damping(d: int, p: float) -> KrausSet:
    """Uniform damping of every excited level to ``|0>`` with probability ``p``."""
    d = _check_dim(d)
    return amplitude_damping_nonuniform([_check_prob(p)] * (d - 1))


def reference_state(d: int, epsilon: float) -> np.ndarray:
    """``(1 - eps) |0><0| + eps/(d-1) sum_{n>=1} |n><n|``.

    Full rank for ``0 < eps < 1``; ``eps = 1 - 1/d`` is the maximally mixed state.
    """
    d = _check_dim(d)
    eps = _check_prob(epsilon, "epsilon")
    return np.diag([1 - eps] + [eps / (d - 1)] * (d - 1)).astype(complex)


def maximally_mixed_epsilon(d: int) -> float:
    return 1.0 - 1.0 / _check_dim(d)
