"""Channel representations and conversions.

Conventions
-----------
Operators are vectorized row by row, ``vec(X)[i*d + j] = X[i, j]``, so that
``vec(A X C) = (A kron C^T) vec(X)`` and a channel with Kraus operators
``K_i`` has superoperator ``sum_i K_i kron conj(K_i)``.

The Choi matrix is the reshuffle of that superoperator,
``J = sum_ij Lambda(|i><j|) kron |i><j|`` (output factor first). It has trace
``d`` and is PSD exactly when the channel is completely positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple, Union

import numpy as np

from . import linalg

TP_TOL = 1e-9
STATE_TOL = 1e-9


class ChannelError(ValueError):
    """Invalid channel data or mismatched dimensions."""


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Operator-sum representation, stored as an ``(n, d, d)`` complex array."""

    operators: np.ndarray

    def __post_init__(self):
        ops = np.asarray(self.operators, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[0] == 0 or ops.shape[1] != ops.shape[2]:
            raise ChannelError(f"Kraus operators must be a non-empty stack of square matrices, got {ops.shape}")
        ops.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators.shape[1]

    def __len__(self) -> int:
        return self.operators.shape[0]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.operators)

    def tp_residual(self) -> float:
        gram = np.einsum("kji,kjl->il", self.operators.conj(), self.operators)
        return float(np.linalg.norm(gram - np.eye(self.dim)))


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """``d^2 x d^2`` matrix acting on row-major vectorized operators."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        _side_root(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return _side_root(self.matrix)


@dataclass(frozen=True, eq=False)
class AffineMap:
    """Bloch-vector action ``r -> M r + tau`` in the orthonormal Gell-Mann basis."""

    M: np.ndarray
    tau: np.ndarray

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.M.shape[0] + 1)))

    def __call__(self, r) -> np.ndarray:
        return self.M @ np.asarray(r, dtype=float) + self.tau


class CPTPReport(NamedTuple):
    cp_min_eig: float
    tp_residual: float
    ok: bool


Channel = Union[KrausSet, SuperOperator]


def _side_root(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ChannelError(f"expected a square matrix, got shape {m.shape}")
    d = int(round(np.sqrt(m.shape[0])))
    if d * d != m.shape[0] or d < 1:
        raise ChannelError(f"side {m.shape[0]} is not a perfect square")
    return d


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise ChannelError(f"dimension mismatch: {a} vs {b}")


def check_state(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Validate a density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ChannelError(f"state must be a square matrix, got shape {rho.shape}")
    if np.linalg.norm(rho - rho.conj().T) > tol:
        raise ChannelError("state is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ChannelError(f"state trace is {np.trace(rho).real:.6g}, expected 1")
    if np.linalg.eigvalsh(linalg.hermitize(rho))[0] < -tol:
        raise ChannelError("state is not positive semidefinite")
    return rho


def vec(x) -> np.ndarray:
    return np.asarray(x).reshape(-1)


def unvec(v) -> np.ndarray:
    v = np.asarray(v)
    d = int(round(np.sqrt(v.size)))
    return v.reshape(d, d)


def apply(channel: Channel, state) -> np.ndarray:
    """Evaluate ``Lambda(rho)``; the output is hermitized."""
    state = np.asarray(state, dtype=complex)
    if state.ndim != 2 or state.shape[0] != state.shape[1]:
        raise ChannelError(f"state must be a square matrix, got shape {state.shape}")
    _check_dims(channel.dim, state.shape[0])
    if isinstance(channel, SuperOperator):
        out = unvec(channel.matrix @ vec(state))
    else:
        ops = channel.operators
        out = np.einsum("kij,jl,kml->im", ops, state, ops.conj(), optimize=True)
    return linalg.hermitize(out)


def reshuffle(x) -> np.ndarray:
    """Index permutation ``A[(i,k),(j,l)] = J[(i,j),(k,l)]``; an involution."""
    x = np.asarray(x)
    d = _side_root(x)
    return x.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def choi_from_kraus(channel: Channel) -> np.ndarray:
    """Unnormalized Choi matrix (trace ``d``), Hermitized."""
    if isinstance(channel, SuperOperator):
        return linalg.hermitize(reshuffle(channel.matrix))
    n, d = len(channel), channel.dim
    flat = channel.operators.reshape(n, d * d)
    return linalg.hermitize(flat.T @ flat.conj())


def superop_from_kraus(channel: Channel) -> SuperOperator:
    if isinstance(channel, SuperOperator):
        return channel
    n, d = len(channel), channel.dim
    flat = channel.operators.reshape(n, d * d)
    return SuperOperator(reshuffle(flat.T @ flat.conj()))


def compose(outer: Channel, inner: Channel) -> Channel:
    """Channel ``outer o inner``.

    Two Kraus sets give the Kraus set of all pairwise products. If either side
    is already a superoperator the result is the superoperator product, which
    is far cheaper than the ``n_outer * n_inner`` Kraus set in high dimension.
    """
    _check_dims(outer.dim, inner.dim)
    if isinstance(outer, KrausSet) and isinstance(inner, KrausSet):
        ops = np.einsum("aij,bjk->abik", outer.operators, inner.operators)
        return KrausSet(ops.reshape(-1, outer.dim, outer.dim))
    a = superop_from_kraus(outer).matrix
    b = superop_from_kraus(inner).matrix
    return SuperOperator(linalg.matmul(np.asarray(a), np.asarray(b)))


def dual(channel: KrausSet) -> KrausSet:
    """Adjoint map ``X -> sum_i K_i^dagger X K_i``."""
    return KrausSet(np.conj(np.swapaxes(channel.operators, 1, 2)))


def verify_cptp(channel: Channel, tol: float = TP_TOL) -> CPTPReport:
    """Complete positivity from the Choi spectrum, trace preservation from ``sum K^dagger K``."""
    cp_min = float(linalg.eigvalsh_blockwise(choi_from_kraus(channel))[0])
    if isinstance(channel, KrausSet):
        tp = channel.tp_residual()
    else:
        d = channel.dim
        # Tr Lambda(X) = vec(I)^T S vec(X)
        row = vec(np.eye(d)) @ channel.matrix
        tp = float(np.linalg.norm(row - vec(np.eye(d))))
    return CPTPReport(cp_min, tp, bool(cp_min >= -tol and tp <= tol))


@lru_cache(maxsize=None)
def _gellmann_cached(d: int) -> np.ndarray:
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), complex)
            m[j, k] = m[k, j] = 1
            mats.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), complex)
            m[j, k] = -1j
            m[k, j] = 1j
            mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        mats.append(np.diag(diag * np.sqrt(2 / (l * (l + 1)))).astype(complex))
    basis = np.array(mats).reshape(-1, d, d) / np.sqrt(2)
    basis.setflags(write=False)
    return basis


def gellmann_basis(d: int) -> np.ndarray:
    """Traceless part of the orthonormal Hermitian basis, shape ``(d^2 - 1, d, d)``.

    Ordered as symmetric off-diagonal, antisymmetric off-diagonal, diagonal;
    ``Tr(G_i G_j) = delta_ij``. For ``d = 2`` this is ``(X, Y, Z) / sqrt(2)``.
    The omitted element is ``I / sqrt(d)``.
    """
    if d < 2:
        raise ChannelError("basis needs d >= 2")
    return _gellmann_cached(int(d))


def bloch_coords(rho) -> np.ndarray:
    """Coordinates ``r`` with ``rho = (I + r . G) / d``."""
    rho = np.asarray(rho)
    d = rho.shape[0]
    g = gellmann_basis(d)
    return d * np.einsum("kij,ji->k", g, rho).real


def state_from_coords(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    d = int(round(np.sqrt(r.size + 1)))
    return (np.eye(d) + np.einsum("k,kij->ij", r, gellmann_basis(d))) / d


def affine_from_channel(channel: Channel) -> AffineMap:
    """``M_ij = Tr(G_i Lambda(G_j))`` and ``tau_i = Tr(G_i Lambda(I))``."""
    d = channel.dim
    s = superop_from_kraus(channel).matrix
    g = gellmann_basis(d).reshape(d * d - 1, d * d)
    # Tr(G_i Y) = conj(vec(G_i)) . vec(Y) for Hermitian G_i
    left = g.conj() @ s
    m = (left @ g.T).real
    tau = (left @ vec(np.eye(d))).real
    return AffineMap(m, tau)
