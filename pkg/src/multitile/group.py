"""Closed subgroups G = H + Gamma of R^d, their duals and residues.

The decomposition is supplied by the caller: ``h_basis`` spans the
continuous part H and ``gamma_basis`` generates a lattice inside the
orthogonal complement of H.  The fundamental cell used throughout is the
half-open parallelepiped spanned by ``gamma_basis`` anchored at the origin.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateLattice,
    DimensionMismatch,
    NotFullRank,
    NotOrthogonal,
)

DEFAULT_TOL = 1e-9


def _as_rows(vectors, dim):
    arr = np.asarray(vectors, dtype=float)
    if arr.size == 0:
        return np.zeros((0, dim))
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise DimensionMismatch(
            f"expected vectors of length {dim}, got array of shape {arr.shape}"
        )
    return arr


def _orthonormalize(rows, tol):
    """QR-based orthonormalization that keeps the orientation of each input."""
    if rows.shape[0] == 0:
        return rows
    q, r = np.linalg.qr(rows.T)
    diag = np.diag(r)
    if np.any(np.abs(diag) <= tol):
        raise DegenerateLattice("h_basis vectors are linearly dependent")
    return (q * np.sign(diag)).T + 0.0


@dataclass(frozen=True, eq=False)
class ClosedSubgroup:
    """A closed subgroup ``H + Gamma`` of R^dim.

    Attributes
    ----------
    dim : int
        Ambient dimension.
    h_basis : ndarray, shape (s, dim)
        Orthonormal rows spanning H.
    gamma_basis : ndarray, shape (r, dim)
        Lattice generators, orthogonal to H.
    tol : float
        Membership and orthogonality tolerance.
    """

    dim: int
    h_basis: np.ndarray
    gamma_basis: np.ndarray
    tol: float = DEFAULT_TOL
    _gamma_pinv: np.ndarray = field(repr=False, default=None)

    @property
    def h_dim(self):
        return self.h_basis.shape[0]

    @property
    def rank(self):
        return self.gamma_basis.shape[0]

    @property
    def is_full_rank(self):
        return self.h_dim + self.rank == self.dim

    def project_out_h(self, p):
        p = np.asarray(p, dtype=float)
        return p - (p @ self.h_basis.T) @ self.h_basis

    def h_coords(self, p):
        return np.asarray(p, dtype=float) @ self.h_basis.T

    def gamma_coords(self, p):
        """Real coordinates of the H-orthogonal part of ``p`` over gamma_basis."""
        return self.project_out_h(p) @ self._gamma_pinv

    def element(self, h_coeffs, gamma_coeffs):
        return (np.asarray(h_coeffs, dtype=float) @ self.h_basis
                + np.asarray(gamma_coeffs, dtype=float) @ self.gamma_basis)

    def __str__(self):
        def rows(a):
            return "; ".join("(" + ", ".join(f"{x:.12g}" for x in r) + ")" for r in a)
        return (f"dim={self.dim} H=[{rows(self.h_basis)}] "
                f"Gamma=[{rows(self.gamma_basis)}]")


def make_subgroup(dim, h_basis=(), gamma_basis=(), tol=DEFAULT_TOL):
    """Validate a decomposition ``G = H + Gamma`` and return the subgroup.

    ``h_basis`` is re-orthonormalized.  Every lattice generator must already
    be orthogonal to H: projecting it onto the complement may move it by at
    most ``tol``.
    """
    dim = int(dim)
    if dim < 1:
        raise DimensionMismatch("dim must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    h = _orthonormalize(_as_rows(h_basis, dim), tol)
    gamma = _as_rows(gamma_basis, dim)
    if h.shape[0] + gamma.shape[0] > dim:
        raise DimensionMismatch(
            f"{h.shape[0]} + {gamma.shape[0]} generators exceed dimension {dim}"
        )
    if gamma.shape[0]:
        along_h = (gamma @ h.T) @ h
        moved = np.linalg.norm(along_h, axis=1)
        if np.any(moved >= tol):
            i = int(np.argmax(moved))
            raise NotOrthogonal(
                f"gamma_basis[{i}] has component {moved[i]:.3g} along H"
            )
        sv = np.linalg.svd(gamma, compute_uv=False)
        if sv[-1] <= tol * max(1.0, sv[0]):
            raise DegenerateLattice("gamma_basis vectors are linearly dependent")
        pinv = gamma.T @ np.linalg.inv(gamma @ gamma.T)
    else:
        pinv = np.zeros((dim, 0))
    h.setflags(write=False)
    gamma.setflags(write=False)
    return ClosedSubgroup(dim, h, gamma, float(tol), pinv)


@dataclass(frozen=True, eq=False)
class DualLattice:
    """Generators of the dual group: y . h = 0 on H and y . gamma in Z."""

    basis: np.ndarray
    group: ClosedSubgroup = field(repr=False)


def dual_group(G):
    """Dual lattice of a subgroup whose lattice part is full rank in H-perp.

    The basis rows ``y_i`` lie in the span of ``gamma_basis`` and satisfy
    ``y_i . gamma_j = delta_ij``.
    """
    if not G.is_full_rank:
        raise NotFullRank(
            f"rank(Gamma) + dim(H) = {G.rank + G.h_dim} < {G.dim}; "
            "the dual group is not discrete"
        )
    gamma = G.gamma_basis
    if gamma.shape[0] == 0:
        basis = np.zeros((0, G.dim))
    else:
        basis = np.linalg.solve(gamma @ gamma.T, gamma)
    basis.setflags(write=False)
    return DualLattice(basis, G)


def in_dual(G, y, tol=None):
    """True where ``y`` (shape (d,) or (n, d)) belongs to the dual group."""
    tol = G.tol if tol is None else tol
    y = np.atleast_2d(np.asarray(y, dtype=float))
    ok = np.all(np.abs(y @ G.h_basis.T) < tol, axis=1)
    pair = y @ G.gamma_basis.T
    ok &= np.all(np.abs(pair - np.round(pair)) < tol, axis=1)
    # components outside H + span(Gamma) pair with nothing, so they are free
    return ok


@dataclass(frozen=True)
class Residue:
    """``point = representative + group_element`` with integer lattice part."""

    representative: np.ndarray
    h_coeffs: np.ndarray
    gamma_coeffs: np.ndarray
    group_element: np.ndarray


def _split(G, p):
    q = G.project_out_h(p)
    c = q @ G._gamma_pinv
    off_lattice = q - c @ G.gamma_basis
    return q, c, off_lattice


def _coef_tol(G):
    if G.rank == 0:
        return np.zeros(0)
    return G.tol / np.linalg.norm(G.gamma_basis, axis=1)


def reduce_mod(G, p):
    """Reduce ``p`` into the anchored fundamental cell.

    Works on a single point or an (n, d) array.  Lattice coordinates within
    tolerance of an integer are snapped to it, so points on the closed edge
    of the cell map to the origin face.
    """
    p = np.asarray(p, dtype=float)
    h_coeffs = G.h_coords(p)
    _, c, off_lattice = _split(G, p)
    nearest = np.round(c)
    k = np.where(np.abs(c - nearest) < _coef_tol(G), nearest, np.floor(c))
    rep = (c - k) @ G.gamma_basis + off_lattice
    g = h_coeffs @ G.h_basis + k @ G.gamma_basis
    return Residue(rep, h_coeffs, k.astype(np.int64), g)


def decompose(G, g):
    """Split group elements into H coordinates and integer lattice coordinates."""
    g = np.asarray(g, dtype=float)
    return G.h_coords(g), np.round(G.gamma_coords(g)).astype(np.int64)


def distance_to_group(G, p):
    p = np.asarray(p, dtype=float)
    _, c, off_lattice = _split(G, p)
    resid = (c - np.round(c)) @ G.gamma_basis + off_lattice
    return np.linalg.norm(resid, axis=-1)


def is_member(G, p, tol=None):
    """True where ``p`` lies within ``tol`` of ``H + Gamma``."""
    tol = G.tol if tol is None else tol
    out = distance_to_group(G, p) < tol
    return bool(out) if np.ndim(out) == 0 else out
