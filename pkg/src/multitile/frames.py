"""Finite-section estimates of Riesz and frame bounds.

For a discretized measure with atoms ``x_p`` and weights ``w_p`` and a
finite frequency set, let ``A[p, l] = sqrt(w_p) exp(2 pi i lambda_l . x_p)``.
The Gram matrix is ``A^T conj(A)`` and the frame operator on the atoms is
``A A^*``; both share their nonzero spectrum with ``A^* A``.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DuplicateFrequency
from .measure import MultiTileMeasure, fourier_transform


def _freqs(m, freqs):
    f = np.asarray(freqs, dtype=float)
    if f.size == 0:
        return np.zeros((0, m.dim))
    if f.ndim == 1:
        f = f[:, None] if m.dim == 1 else f[None, :]
    return f


def _atoms(m):
    if isinstance(m, MultiTileMeasure):
        return m.atoms()
    return m.nodes, m.weights


def synthesis_matrix(m, freqs):
    pts, w = _atoms(m)
    f = _freqs(m, freqs)
    return np.sqrt(w)[:, None] * np.exp(2j * np.pi * (pts @ f.T))


def _check_distinct(f, tol=1e-12):
    if f.shape[0] < 2:
        return
    key = np.round(f / tol).astype(np.int64)
    _, first, counts = np.unique(key, axis=0, return_index=True, return_counts=True)
    if np.any(counts > 1):
        raise DuplicateFrequency(f"repeated frequency {f[first[np.argmax(counts > 1)]]}")


@dataclass(frozen=True, eq=False)
class GramSection:
    freq_set: np.ndarray
    matrix: np.ndarray
    eig_min: float
    eig_max: float


def gram_matrix(m, freqs, method="quadrature"):
    """Gram section ``G[l, l'] = integral exp(2 pi i (lambda_l - lambda_l') . x) dm``.

    ``method='exact'`` evaluates each entry through the closed-form Fourier
    transform, ``'quadrature'`` through the atoms.
    """
    f = _freqs(m, freqs)
    _check_distinct(f)
    if method == "exact":
        diff = f[None, :, :] - f[:, None, :]
        mat = np.asarray(fourier_transform(m, diff, method="exact"))
        mat = 0.5 * (mat + mat.conj().T)
    else:
        A = synthesis_matrix(m, f)
        mat = A.T @ A.conj()
    if f.shape[0] == 0:
        return GramSection(f, mat.reshape(0, 0), 0.0, 0.0)
    eig = np.linalg.eigvalsh(mat)
    return GramSection(f, mat, float(eig[0]), float(eig[-1]))


def riesz_bounds_estimate(m, freqs, method="quadrature"):
    """Extreme eigenvalues of the Gram section."""
    g = gram_matrix(m, freqs, method)
    return g.eig_min, g.eig_max


@dataclass(frozen=True, eq=False)
class FrameSection:
    matrix: np.ndarray
    eig_min: float
    eig_max: float


def frame_section(m, freqs):
    """The frame operator on the atoms, ``S = A A^*`` (atoms x atoms)."""
    A = synthesis_matrix(m, _freqs(m, freqs))
    S = A @ A.conj().T
    eig = np.linalg.eigvalsh(S)
    return FrameSection(S, float(eig[0]), float(eig[-1]))


def frame_bounds_estimate(m, freqs):
    """Extreme eigenvalues of the frame operator, from the singular values
    of the synthesis matrix.  The lower estimate is 0 whenever there are
    more atoms than frequencies."""
    f = _freqs(m, freqs)
    if f.shape[0] == 0:
        return 0.0, 0.0
    A = synthesis_matrix(m, f)
    sv = np.linalg.svd(A, compute_uv=False)
    low = float(sv[-1] ** 2) if f.shape[0] >= A.shape[0] else 0.0
    return low, float(sv[0] ** 2)


@dataclass(frozen=True)
class BoundRow:
    K: int
    riesz_A: float
    riesz_B: float
    frame_A: float
    frame_B: float
    gram_drift: float


@dataclass(frozen=True)
class BoundScan:
    rows: tuple

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])


def bound_convergence_scan(m, plan, K_list, refined=None):
    """Riesz and frame estimates on successive truncations of a plan.

    ``refined`` is the same measure discretized with more nodes; the
    largest entrywise Gram difference between the two is reported as
    ``gram_drift`` (quadrature error, separate from truncation error).
    """
    rows = []
    for K in K_list:
        freqs = plan.truncate(K).structured_set
        g = gram_matrix(m, freqs)
        fa, fb = frame_bounds_estimate(m, freqs)
        drift = float("nan")
        if refined is not None:
            drift = float(np.abs(gram_matrix(refined, freqs).matrix - g.matrix).max())
        rows.append(BoundRow(int(K), g.eig_min, g.eig_max, fa, fb, drift))
    return BoundScan(tuple(rows))


def export_scan(scan, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["K", "riesz_A", "riesz_B", "frame_A", "frame_B", "gram_drift"])
        for r in scan.rows:
            w.writerow([r.K] + [f"{v:.12g}" for v in
                                (r.riesz_A, r.riesz_B, r.frame_A, r.frame_B, r.gram_drift)])
