"""The translation matrix M_x(t), its determinant and related bounds."""

from dataclasses import dataclass

import numpy as np

from .errors import BoundViolation, PreconditionViolation, SizeMismatch
from .measure import node_separations

BOUND_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class TranslationMatrix:
    """``entries[j, k] = exp(2 pi i t_k . g_j(x))``."""

    entries: np.ndarray
    gs: np.ndarray
    t: np.ndarray
    x: np.ndarray = None

    @property
    def N(self):
        return self.entries.shape[0]


def _as_vectors(v):
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    return v


def translation_matrix(gs, t, x=None):
    gs, t = _as_vectors(gs), _as_vectors(t)
    if gs.shape != t.shape:
        raise SizeMismatch(f"{gs.shape[0]} group elements vs {t.shape[0]} translations")
    entries = np.exp(2j * np.pi * (gs @ t.T))
    return TranslationMatrix(entries, gs, t, x)


def batched_matrices(m, t):
    """Stack of M_x(t) over all base nodes, shape (n, N, N)."""
    t = _as_vectors(t)
    if t.shape != (m.N, m.dim):
        raise SizeMismatch(f"need {m.N} translations in R^{m.dim}, got {t.shape}")
    phase = np.einsum("jnd,kd->njk", m.g, t)
    return np.exp(2j * np.pi * phase)


def batched_det(A):
    """Determinant over the last two axes: cofactor formulas up to 3x3,
    LU with partial pivoting beyond."""
    A = np.asarray(A)
    n = A.shape[-1]
    if n == 1:
        return A[..., 0, 0]
    if n == 2:
        return A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    if n == 3:
        a = A
        return (a[..., 0, 0] * (a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1])
                - a[..., 0, 1] * (a[..., 1, 0] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 0])
                + a[..., 0, 2] * (a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0]))
    return np.linalg.det(A)


def matrix_det(M):
    entries = M.entries if isinstance(M, TranslationMatrix) else np.asarray(M)
    return complex(batched_det(entries))


def _node_index(m, x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    hits = np.flatnonzero(np.all(np.isclose(m.base.nodes, np.atleast_1d(x), atol=1e-12), axis=1))
    if hits.size == 0:
        raise ValueError(f"{x} is not a base node")
    return int(hits[0])


def det_at(x, t, m):
    """``det M_x(t)`` at a base node (given by index or coordinates)."""
    i = _node_index(m, x)
    return matrix_det(translation_matrix(m.g[:, i, :], t, m.base.nodes[i]))


@dataclass(frozen=True, eq=False)
class DetProfile:
    nodes: np.ndarray
    abs_det: np.ndarray
    ess_inf: float
    argmin: int
    sigma_min: float

    @property
    def samples(self):
        return list(zip(self.nodes, self.abs_det))


def ess_inf_det(m, t):
    """Minimum of ``|det M_x(t)|`` over the base nodes.

    Ties go to the lowest node index.
    """
    A = batched_matrices(m, t)
    abs_det = np.abs(batched_det(A))
    i = int(np.argmin(abs_det))
    sigma = float(np.linalg.svd(A[i], compute_uv=False)[-1])
    hada = m.N ** (m.N / 2)
    if abs_det[i] > hada + BOUND_SLACK:
        raise BoundViolation(f"|det| = {abs_det[i]} exceeds the Hadamard ceiling {hada}")
    return DetProfile(m.base.nodes, abs_det, float(abs_det[i]), i, sigma)


def profile_table(m, t):
    """Per-node columns (min_sep, abs_det, sigma_min)."""
    A = batched_matrices(m, t)
    abs_det = np.abs(batched_det(A))
    sigma = np.linalg.svd(A, compute_uv=False)[:, -1]
    return node_separations(m), abs_det, sigma


def smallest_singular_certificate(M, eps0, ceiling="frobenius"):
    """Check ``sigma_min(M) >= |det M| / sigma_max^(N-1)``.

    With ``ceiling='frobenius'`` sigma_max is replaced by N, its ceiling
    for unimodular entries; ``'instance'`` uses the computed value.
    Returns ``(sigma_min, lower_bound)``.
    """
    A = M.entries if isinstance(M, TranslationMatrix) else np.asarray(M)
    N = A.shape[0]
    sv = np.linalg.svd(A, compute_uv=False)
    abs_det = abs(matrix_det(A))
    if eps0 > abs_det + BOUND_SLACK or (eps0 > 0 and sv[-1] == 0):
        raise PreconditionViolation(f"eps0 = {eps0} exceeds |det M| = {abs_det}")
    smax = float(N) if ceiling == "frobenius" else float(sv[0])
    bound = abs_det / smax ** (N - 1)
    if sv[-1] < bound - BOUND_SLACK:
        raise BoundViolation(f"sigma_min = {sv[-1]} below certified {bound}")
    return float(sv[-1]), float(bound)


def hadamard_bounds(M, axis="rows"):
    """Global ceiling N^(N/2) and pair bounds N^((N-1)/2) |v - w|.

    ``v, w`` run over pairs of rows (``axis='rows'``, the pairs that
    approach each other when two group elements coincide) or of columns
    (``axis='columns'``); since det A = det A^T both families are valid.
    The bound for the pair (p, q) is stored at ``pair[p, q]``.
    """
    A = M.entries if isinstance(M, TranslationMatrix) else np.asarray(M)
    if axis == "rows":
        A = A.T
    elif axis != "columns":
        raise ValueError(f"axis must be 'rows' or 'columns', got {axis!r}")
    N = A.shape[0]
    abs_det = abs(matrix_det(A))
    diff = np.linalg.norm(A[:, :, None] - A[:, None, :], axis=0)
    pair = N ** ((N - 1) / 2) * diff
    glob = N ** (N / 2)
    off = ~np.eye(N, dtype=bool)
    if abs_det > glob + BOUND_SLACK or np.any(abs_det > pair[off] + BOUND_SLACK):
        raise BoundViolation(f"|det| = {abs_det} violates a Hadamard bound")
    return glob, pair


def lipschitz_det_bound(m, t, eta):
    """Bound on ``|det M_x(t)|`` at nodes whose separation is at most ``eta``.

    Two rows of M_x(t) whose group elements are eta apart differ by at most
    ``2 pi sqrt(N) max|t_k| eta`` in norm, and the row version of the
    Hadamard pair bound gives
    ``N^((N-1)/2) * 2 pi sqrt(N) * max|t_k| * eta``.
    """
    t = _as_vectors(t)
    N = m.N
    bound = N ** ((N - 1) / 2) * 2 * np.pi * np.sqrt(N) * np.linalg.norm(t, axis=1).max() * eta
    close = node_separations(m) <= eta
    if close.any():
        abs_det = np.abs(batched_det(batched_matrices(m, t)[close]))
        if np.any(abs_det > bound + BOUND_SLACK):
            raise BoundViolation(f"|det| = {abs_det.max()} exceeds Lipschitz bound {bound}")
    return float(bound)


def coarse_lipschitz_constant(N, t, eta):
    """The cruder bound ``N^N 4 pi^2 max|t_k|^2 eta``, kept for comparison."""
    t = _as_vectors(t)
    return float(N ** N * 4 * np.pi ** 2 * np.linalg.norm(t, axis=1).max() ** 2 * eta)
