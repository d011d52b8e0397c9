"""Dense complex linear algebra used by the channel model and the selector.

All routines accept a single matrix/vector or a stack of them (leading batch
axes), so the Monte Carlo harness can factor many channel realizations at
once with the same code that serves scalar calls.
"""

import numpy as np

from antsel.exceptions import (
    DimensionMismatch,
    NotPositiveDefinite,
    NotPSD,
    RankDeficient,
    SingularMatrix,
)

HERMITIAN_RTOL = 1e-10
PIVOT_RTOL = 1e-12
PSD_CLIP_RTOL = 1e-10
MAX_CONDITION = 1e12


class NotHermitian(NotPositiveDefinite):
    pass


def _check_square(a, name="matrix"):
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if a.shape[-1] < 1:
        raise DimensionMismatch(f"{name} must be at least 1x1")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")


def _check_hermitian(a):
    herm = np.conj(np.swapaxes(a, -1, -2))
    gap = np.linalg.norm(a - herm, axis=(-2, -1))
    scale = np.linalg.norm(a, axis=(-2, -1))
    if np.any(gap > HERMITIAN_RTOL * scale):
        raise NotHermitian("matrix is not Hermitian")


def cholesky(r):
    """Lower Cholesky factor ``L`` with ``L @ L^H == r``.

    Parameters
    ----------
    r : array_like, shape (..., M, M)
        Hermitian positive definite matrix, or a stack of them.

    Returns
    -------
    ndarray, shape (..., M, M)
        Lower-triangular factor with a strictly positive real diagonal.
        Real input gives a real factor.

    Raises
    ------
    NotPositiveDefinite
        If a pivot is not above ``1e-12`` times the largest diagonal entry
        of its matrix.
    """
    r = np.asarray(r)
    _check_square(r)
    _check_hermitian(r)
    dtype = np.result_type(r.dtype, np.float64)
    m = r.shape[-1]
    tol = PIVOT_RTOL * np.max(np.real(np.diagonal(r, axis1=-2, axis2=-1)), axis=-1)
    tol = np.maximum(tol, 0.0)

    low = np.zeros(r.shape, dtype=dtype)
    for j in range(m):
        row = low[..., j, :j]
        pivot = np.real(r[..., j, j]) - np.sum(np.abs(row) ** 2, axis=-1)
        if np.any(~(pivot > tol)):
            raise NotPositiveDefinite(
                f"pivot {np.min(pivot):.3e} at column {j} is not above tolerance"
            )
        d = np.sqrt(pivot)
        low[..., j, j] = d
        if j + 1 < m:
            below = r[..., j + 1 :, j] - np.squeeze(
                low[..., j + 1 :, :j] @ np.conj(row)[..., None], axis=-1
            )
            low[..., j + 1 :, j] = below / d[..., None]
    return low


def forward_solve(low, b):
    """Solve ``low @ y = b`` by forward substitution.

    ``low`` is lower triangular with shape ``(..., M, M)`` and ``b`` has shape
    ``(..., M)``; leading axes broadcast.
    """
    low = np.asarray(low)
    b = np.asarray(b)
    _check_square(low, "L")
    m = low.shape[-1]
    if b.shape[-1] != m:
        raise DimensionMismatch(f"L is {m}x{m} but b has length {b.shape[-1]}")
    diag = np.diagonal(low, axis1=-2, axis2=-1)
    if np.any(diag == 0):
        raise SingularMatrix("zero on the diagonal of L")

    shape = np.broadcast_shapes(low.shape[:-2], b.shape[:-1]) + (m,)
    y = np.zeros(shape, dtype=np.result_type(low.dtype, b.dtype, np.float64))
    for i in range(m):
        acc = np.sum(low[..., i, :i] * y[..., :i], axis=-1)
        y[..., i] = (b[..., i] - acc) / low[..., i, i]
    return y


def back_solve(up, b):
    """Solve ``up @ x = b`` for upper-triangular ``up`` (stack-aware)."""
    up = np.asarray(up)
    b = np.asarray(b)
    m = up.shape[-1]
    if b.shape[-1] != m:
        raise DimensionMismatch(f"U is {m}x{m} but b has length {b.shape[-1]}")
    if np.any(np.diagonal(up, axis1=-2, axis2=-1) == 0):
        raise SingularMatrix("zero on the diagonal of U")
    shape = np.broadcast_shapes(up.shape[:-2], b.shape[:-1]) + (m,)
    x = np.zeros(shape, dtype=np.result_type(up.dtype, b.dtype, np.float64))
    for i in range(m - 1, -1, -1):
        acc = np.sum(up[..., i, i + 1 :] * x[..., i + 1 :], axis=-1)
        x[..., i] = (b[..., i] - acc) / up[..., i, i]
    return x


def hermitian_sqrt(p):
    """Hermitian positive semidefinite square root of ``p``.

    Computed from the eigendecomposition. Eigenvalues in
    ``[-1e-10 * ||p||_2, 0)`` are treated as round-off and clipped to zero;
    anything more negative raises :class:`NotPSD`.
    """
    p = np.asarray(p)
    _check_square(p)
    _check_hermitian(p)
    w, v = np.linalg.eigh(p)
    norm2 = np.max(np.abs(w)) if w.size else 0.0
    if np.any(w < -PSD_CLIP_RTOL * norm2):
        raise NotPSD(f"eigenvalue {w.min():.3e} below clipping threshold")
    w = np.sqrt(np.clip(w, 0.0, None))
    s = (v * w) @ np.conj(v.T)
    # enforce exact Hermitian symmetry lost to round-off
    return 0.5 * (s + np.conj(s.T))


def ls_solve(a_sub, b):
    """Least-squares solution of ``a_sub @ x ~= b`` via Householder QR.

    Parameters
    ----------
    a_sub : array_like, shape (M, k)
        Full-column-rank matrix, ``k <= M``.
    b : array_like, shape (M,)

    Returns
    -------
    ndarray, shape (k,)

    Raises
    ------
    RankDeficient
        If ``k > M`` or the condition number of ``a_sub`` exceeds ``1e12``.
    """
    a_sub = np.asarray(a_sub)
    b = np.asarray(b)
    if a_sub.ndim != 2:
        raise DimensionMismatch("a_sub must be 2-D")
    m, k = a_sub.shape
    if b.shape != (m,):
        raise DimensionMismatch(f"a_sub has {m} rows but b has shape {b.shape}")
    if k > m:
        raise RankDeficient(f"{k} columns cannot be independent in dimension {m}")
    if k == 0:
        return np.zeros(0, dtype=np.result_type(a_sub.dtype, b.dtype, np.float64))
    q, tri = np.linalg.qr(a_sub, mode="reduced")
    diag = np.abs(np.diag(tri))
    if np.min(diag) == 0 or np.linalg.cond(tri) > MAX_CONDITION:
        raise RankDeficient("columns are numerically dependent")
    return back_solve(tri, np.conj(q.T) @ b)
