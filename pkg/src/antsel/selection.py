"""MSE-optimal sparse antenna selection by orthogonal matching pursuit.

For a combiner ``h_s`` applied to ``y = c x + v`` the receive MSE factors as

    MSE = sigma_x2 - ||L^{-1} h_tilde||^2 + ||L^H h_s - L^{-1} h_tilde||^2

with ``h_tilde = sigma_x2 * c``, ``R = sigma_x2 c c^H + sigma_v2 I`` and
``R = L L^H``. Only the last term depends on ``h_s``, so choosing ``K_s``
antennas is a sparse approximation problem with dictionary ``L^H`` and
target ``L^{-1} h_tilde``. The same code path serves the i.i.d., correlated
and imperfect-CSI cases; callers pass ``h_iid``, ``corr_sqrt @ h_iid`` or
the estimate ``h_est`` as ``c``.
"""

from dataclasses import dataclass, field
import itertools
import numbers

import numpy as np

from antsel.exceptions import (
    DimensionMismatch,
    InvalidSparsity,
    InvalidVariance,
    RankDeficient,
    TooLarge,
)
from antsel.linalg import back_solve, cholesky, forward_solve, ls_solve

EXHAUSTIVE_MAX_M = 16
# scores this close to the best count as a tie; the lowest antenna index wins
TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SelectionProblem:
    """Inputs of one selection: ``h_tilde``, ``R`` and its Cholesky factor.

    Arrays may carry leading batch axes (the harness builds problems for
    many channel realizations at once); the public selectors expect a
    single problem.
    """

    h_tilde: np.ndarray
    r_mat: np.ndarray
    l_mat: np.ndarray
    sigma_x2: float
    sigma_v2: float
    target: np.ndarray = field(repr=False)

    @property
    def m(self):
        return self.h_tilde.shape[-1]

    @property
    def dictionary(self):
        """``L^H``; column ``j`` is the atom for antenna ``j``."""
        return np.conj(np.swapaxes(self.l_mat, -1, -2))


@dataclass(frozen=True, eq=False)
class SelectionVector:
    """Sparse combining weights.

    ``weights`` has length M and is zero off ``support``. ``residual_norms``
    holds the pursuit residual norm before the first iteration and after
    each one.
    """

    weights: np.ndarray
    support: tuple
    k_s: int
    zero_target: bool = False
    residual_norms: tuple = ()

    @property
    def residual(self):
        return self.residual_norms[-1] if self.residual_norms else 0.0


def build_problem(channel_est, sigma_x2, sigma_v2):
    """Assemble ``h_tilde``, ``R`` and ``L`` for a channel vector.

    ``channel_est`` may be a single length-M vector or a ``(B, M)`` stack.

    >>> p = build_problem([2.0, 1.0], 1.0, 1.0)
    >>> p.r_mat.real
    array([[5., 2.],
           [2., 2.]])
    """
    c = np.asarray(channel_est, dtype=np.complex128)
    if c.ndim < 1 or c.shape[-1] < 1:
        raise DimensionMismatch("channel vector must have at least one entry")
    if not np.all(np.isfinite(c)):
        raise ValueError("channel vector has non-finite entries")
    if isinstance(sigma_x2, bool) or not isinstance(sigma_x2, numbers.Real) or sigma_x2 < 0:
        raise InvalidVariance(f"sigma_x2 must be non-negative, got {sigma_x2!r}")
    if isinstance(sigma_v2, bool) or not isinstance(sigma_v2, numbers.Real) or not sigma_v2 > 0:
        raise InvalidVariance(f"sigma_v2 must be positive, got {sigma_v2!r}")
    sigma_x2 = float(sigma_x2)
    sigma_v2 = float(sigma_v2)

    m = c.shape[-1]
    h_tilde = sigma_x2 * c
    r_mat = sigma_x2 * (c[..., :, None] * np.conj(c[..., None, :]))
    r_mat = r_mat + sigma_v2 * np.eye(m)
    l_mat = cholesky(r_mat)
    target = forward_solve(l_mat, h_tilde)
    return SelectionProblem(h_tilde, r_mat, l_mat, sigma_x2, sigma_v2, target)


def _check_sparsity(k_s, m):
    if isinstance(k_s, bool) or not isinstance(k_s, numbers.Integral):
        raise InvalidSparsity(f"k_s must be an integer, got {k_s!r}")
    if not 1 <= k_s <= m:
        raise InvalidSparsity(f"k_s must lie in [1, {m}], got {k_s}")
    return int(k_s)


def _project(rows_, vec):
    # rows_ (B, k, M), vec (B, M) -> rows_.conj() @ vec, shape (B, k)
    return np.conj(rows_ @ np.conj(vec)[..., None])[..., 0]


def _expand(coef, rows_):
    # coef (B, k), rows_ (B, k, M) -> sum_i coef_i * rows_i, shape (B, M)
    return (coef[:, None, :] @ rows_)[:, 0]


def omp_kernel(l_mat, r_mat, target, k_s):
    """Batched OMP on dictionary ``L^H`` and target ``b``.

    Parameters
    ----------
    l_mat, r_mat : ndarray, shape (B, M, M)
    target : ndarray, shape (B, M)
    k_s : int

    Returns
    -------
    weights : ndarray, shape (B, M)
    support : ndarray of int, shape (B, k_s)
        Selected antennas in selection order.
    residual_norms : ndarray, shape (B, k_s + 1)

    Notes
    -----
    Atoms are scored by ``|a_j^H r| / ||a_j||``; selected atoms are masked
    out and ties (within ``TIE_RTOL``) go to the lowest index. Selected atoms are
    orthonormalised incrementally (classical Gram-Schmidt, two passes), and
    the correlation vector ``A^H r`` is updated through ``A^H q``, which is
    assembled from columns of ``R = A^H A``. Each iteration therefore costs
    ``O(M k)`` and a full run ``O(K_s^2 M)``.
    """
    nb, m = target.shape
    rows = np.arange(nb)
    atoms = np.conj(np.swapaxes(l_mat, -1, -2))
    atom_norms = np.linalg.norm(atoms, axis=1)

    corr = np.squeeze(l_mat @ target[..., None], axis=-1)
    resid = target.astype(np.complex128, copy=True)
    # orthonormal basis of the selected atoms and its image under A^H, row-wise
    basis = np.zeros((nb, k_s, m), dtype=np.complex128)
    gram_basis = np.zeros((nb, k_s, m), dtype=np.complex128)
    tri = np.zeros((nb, k_s, k_s), dtype=np.complex128)
    support = np.zeros((nb, k_s), dtype=np.intp)
    taken = np.zeros((nb, m), dtype=bool)
    res_norms = np.zeros((nb, k_s + 1))
    res_norms[:, 0] = np.linalg.norm(resid, axis=1)

    for it in range(k_s):
        score = np.abs(corr) / atom_norms
        score[taken] = -np.inf
        best = np.max(score, axis=1, keepdims=True)
        pick = np.argmax(score >= best * (1.0 - TIE_RTOL), axis=1)
        atom = atoms[rows, :, pick]

        q_prev = basis[:, :it]
        coef = _project(q_prev, atom)
        v = atom - _expand(coef, q_prev)
        coef2 = _project(q_prev, v)
        v -= _expand(coef2, q_prev)
        coef += coef2
        nrm = np.linalg.norm(v, axis=1)
        if np.any(nrm <= 1e-12 * atom_norms[rows, pick]):
            raise RankDeficient("selected atom is dependent on the current support")

        q = v / nrm[:, None]
        gq = r_mat[rows, :, pick] - _expand(coef, gram_basis[:, :it])
        gq /= nrm[:, None]

        basis[:, it] = q
        gram_basis[:, it] = gq
        tri[:, :it, it] = coef
        tri[:, it, it] = nrm

        alpha = np.sum(np.conj(q) * resid, axis=1)
        resid -= q * alpha[:, None]
        corr -= gq * alpha[:, None]
        taken[rows, pick] = True
        support[:, it] = pick
        res_norms[:, it + 1] = np.linalg.norm(resid, axis=1)

    proj = _project(basis, target)
    coeffs = back_solve(tri, proj)
    weights = np.zeros((nb, m), dtype=np.complex128)
    weights[rows[:, None], support] = coeffs
    return weights, support, res_norms


def omp_select(problem, k_s):
    """Choose ``k_s`` antennas and their combining weights by OMP.

    Runs exactly ``k_s`` iterations on dictionary ``L^H`` and target
    ``L^{-1} h_tilde``, so the support always has ``k_s`` entries. A zero
    target (no signal) yields all-zero weights, an empty support and
    ``zero_target=True``.

    >>> sel = omp_select(build_problem([2.0, 1.0], 1.0, 1.0), 2)
    >>> np.round(sel.weights.real, 6)
    array([0.333333, 0.166667])
    """
    if problem.h_tilde.ndim != 1:
        raise DimensionMismatch("omp_select takes a single problem")
    m = problem.m
    k_s = _check_sparsity(k_s, m)
    if not np.any(problem.target):
        return SelectionVector(
            np.zeros(m, dtype=np.complex128), (), k_s, zero_target=True, residual_norms=(0.0,)
        )
    weights, support, res = omp_kernel(
        problem.l_mat[None], problem.r_mat[None], problem.target[None], k_s
    )
    return SelectionVector(
        weights[0],
        tuple(int(j) for j in support[0]),
        k_s,
        residual_norms=tuple(float(x) for x in res[0]),
    )


def exhaustive_select(problem, k_s):
    """Best ``k_s``-antenna support by enumerating every subset.

    Brute-force reference for :func:`omp_select`. Ties keep the
    lexicographically smallest support. Limited to ``M <= 16``.
    """
    if problem.h_tilde.ndim != 1:
        raise DimensionMismatch("exhaustive_select takes a single problem")
    m = problem.m
    k_s = _check_sparsity(k_s, m)
    if m > EXHAUSTIVE_MAX_M:
        raise TooLarge(f"exhaustive search limited to M <= {EXHAUSTIVE_MAX_M}, got {m}")
    b = problem.target
    if not np.any(b):
        return SelectionVector(
            np.zeros(m, dtype=np.complex128), (), k_s, zero_target=True, residual_norms=(0.0,)
        )
    atoms = problem.dictionary
    best = None
    for sup in itertools.combinations(range(m), k_s):
        cols = atoms[:, sup]
        x = ls_solve(cols, b)
        res = float(np.linalg.norm(cols @ x - b))
        if best is None or res < best[0] * (1 - 1e-12):
            best = (res, sup, x)
    res, sup, x = best
    weights = np.zeros(m, dtype=np.complex128)
    weights[list(sup)] = x
    return SelectionVector(
        weights, sup, k_s, residual_norms=(float(np.linalg.norm(b)), res)
    )


def _as_pair(h_s, channel):
    h_s = np.asarray(h_s, dtype=np.complex128)
    channel = np.asarray(channel, dtype=np.complex128)
    if h_s.ndim != 1 or h_s.shape != channel.shape:
        raise DimensionMismatch(f"shapes {h_s.shape} and {channel.shape} differ")
    return h_s, channel


def mse_direct(h_s, channel, sigma_x2, sigma_v2):
    """Receive MSE ``E|x - h_s^H (c x + v)|^2`` from its expanded form."""
    h_s, c = _as_pair(h_s, channel)
    terms = [
        sigma_x2 + 0j,
        -np.vdot(h_s, c) * sigma_x2,
        -sigma_x2 * np.vdot(c, h_s),
        np.vdot(h_s, (sigma_x2 * np.outer(c, np.conj(c))) @ h_s),
        np.vdot(h_s, sigma_v2 * h_s),
    ]
    total = sum(terms)
    scale = sum(abs(t) for t in terms)
    if abs(total.imag) > 1e-12 * max(scale, 1.0):
        raise ArithmeticError(f"MSE has imaginary part {total.imag:.3e}")
    return float(total.real)


def mse_factored(h_s, problem):
    """Receive MSE through the Cholesky factor.

    ``sigma_x2 - ||L^{-1} h_tilde||^2 + ||L^H h_s - L^{-1} h_tilde||^2``
    """
    h_s, _ = _as_pair(h_s, problem.h_tilde)
    b = problem.target
    fit = problem.dictionary @ h_s - b
    return float(problem.sigma_x2 - np.vdot(b, b).real + np.vdot(fit, fit).real)
