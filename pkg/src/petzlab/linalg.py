"""Dense complex matrix kernels.

Everything here takes and returns plain ``numpy`` arrays. Matrix functions
hermitize their input before diagonalizing, since the compositions built on
top of them (Petz maps, composed channels) amplify any asymmetry.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

HERMITIAN_TOL = 1e-9
PSD_TOL = 1e-10

# density below which products are routed through scipy.sparse
_SPARSE_DENSITY = 0.05


class LinalgError(ValueError):
    """Raised for shape errors or inputs that violate a kernel's precondition."""


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # unitary, columns


def _as_square(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise LinalgError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def hermitize(m) -> np.ndarray:
    """Return ``(M + M^dagger) / 2``."""
    m = _as_square(m)
    return (m + m.conj().T) / 2


def _check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    scale = max(1.0, float(np.linalg.norm(m)))
    if np.linalg.norm(m - m.conj().T) > tol * scale:
        raise LinalgError("matrix is not Hermitian within tolerance")


def eig_hermitian(h) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.

    The caller is expected to hermitize first; anything further than ``1e-9``
    (relative) from Hermitian is rejected.
    """
    h = _as_square(h)
    _check_hermitian(h)
    try:
        w, v = np.linalg.eigh(hermitize(h))
    except np.linalg.LinAlgError as exc:
        raise LinalgError(f"eigensolver failed to converge: {exc}") from exc
    return HermitianEig(w[::-1].copy(), v[:, ::-1].copy())


def _psd_eig(h) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(hermitize(h))
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < -PSD_TOL * scale:
        raise LinalgError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    return np.clip(w, 0.0, None), v


def apply_spectral(h, fn) -> np.ndarray:
    """``V diag(fn(w)) V^dagger`` for Hermitian ``h``; ``fn`` acts on the real eigenvalues."""
    w, v = np.linalg.eigh(hermitize(h))
    return (v * fn(w)) @ v.conj().T


def matrix_sqrt(h) -> np.ndarray:
    """Principal square root of a PSD matrix.

    Eigenvalues in ``[-1e-10, 0)`` are clamped to zero; anything more negative
    means the input was not PSD and raises.
    """
    w, v = _psd_eig(h)
    return (v * np.sqrt(w)) @ v.conj().T


def pinv_sqrt(h, support_tol: float | None = None) -> np.ndarray:
    """Pseudo-inverse square root on the support of a PSD matrix.

    Eigenvalues above ``support_tol`` map to ``w**-0.5``, the rest to zero.
    The default tolerance is relative, ``1e-10 * w_max``, so small but genuine
    eigenvalues (e.g. ~1e-4 in high-dimensional reference states) stay in the
    support.
    """
    w, v = _psd_eig(h)
    wmax = float(w[-1])
    if wmax <= 0.0:
        raise LinalgError("matrix has empty support")
    if support_tol is None:
        support_tol = 1e-10 * wmax
    elif support_tol <= 0:
        raise LinalgError("support_tol must be positive")
    keep = w > support_tol
    if not keep.any():
        raise LinalgError("matrix has empty support")
    f = np.zeros_like(w)
    f[keep] = 1.0 / np.sqrt(w[keep])
    return (v * f) @ v.conj().T


def support_projector(h, support_tol: float | None = None) -> np.ndarray:
    w, v = _psd_eig(h)
    if support_tol is None:
        support_tol = 1e-10 * max(float(w[-1]), 0.0)
    vs = v[:, w > support_tol]
    return vs @ vs.conj().T


def diagonal_blocks(m) -> list[np.ndarray]:
    """Index sets of the blocks of ``m`` under a symmetric permutation.

    Two indices share a block when they are linked through exactly-nonzero
    entries. Spurious round-off entries only merge blocks, which is always safe.
    """
    m = np.asarray(m)
    pattern = sp.csr_matrix(m != 0)
    n_blocks, labels = connected_components(pattern, directed=False)
    if n_blocks == 1:
        return [np.arange(m.shape[0])]
    order = np.argsort(labels, kind="stable")
    bounds = np.cumsum(np.bincount(labels, minlength=n_blocks))[:-1]
    return np.split(order, bounds)


def eigvalsh_blockwise(h) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix (ascending), solved block by block."""
    h = hermitize(h)
    vals = []
    for idx in diagonal_blocks(h):
        if idx.size == 1:
            vals.append(h[idx, idx].real)
        else:
            vals.append(np.linalg.eigvalsh(h[np.ix_(idx, idx)]))
    return np.sort(np.concatenate(vals))


def trace_norm(m) -> float:
    """Sum of singular values, ``Tr sqrt(M M^dagger)``.

    Hermitian inputs go through the eigensolver (sum of ``|eigenvalues|``),
    everything else through the SVD. Both are applied block by block when the
    matrix is permutation-similar to a block-diagonal one.
    """
    m = _as_square(m)
    hermitian = np.allclose(m, m.conj().T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(m).max()))
    total = 0.0
    for idx in diagonal_blocks(m):
        if idx.size == 1:
            total += abs(m[idx[0], idx[0]])
            continue
        block = m[np.ix_(idx, idx)]
        if hermitian:
            total += float(np.abs(np.linalg.eigvalsh(block)).sum())
        else:
            total += float(np.linalg.svd(block, compute_uv=False).sum())
    return float(total)


def kron(a, b) -> np.ndarray:
    """Kronecker product with block layout ``a[i, j] * b``."""
    return np.kron(np.asarray(a), np.asarray(b))


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense matrix product that switches to sparse arithmetic for mostly-zero operands."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.size > 4096 and np.count_nonzero(a) < _SPARSE_DENSITY * a.size \
            and np.count_nonzero(b) < _SPARSE_DENSITY * b.size:
        return (sp.csr_matrix(a) @ sp.csr_matrix(b)).toarray()
    return a @ b


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random state from the induced (Ginibre) ensemble."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return hermitize(rho / np.trace(rho).real)
