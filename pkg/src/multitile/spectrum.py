"""Separation test, sufficiency cases, vector search and structured spectra.

The admissible vector ``v`` must satisfy ``eps1 <= |v . x| <= 1/2`` on the
cover of the differences.  Because ``x -> v . x`` is affine on each box,
its range over a box is computed exactly from the box corners, so the
certificate is an exact statement about the boxes; a grid of sample points
is evaluated on top of that as an independent witness.
"""

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import group as grp
from .errors import CollidingTranslates, SearchFailed
from .measure import node_separations

DEFAULT_THRESHOLD = 1e-6
UPPER = 0.5
UPPER_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class SeparationReport:
    """Per-node separations and the necessary-condition verdict.

    When a refined measure (twice the nodes) is supplied, the continuum
    infimum is estimated by the linear extrapolation ``2 m_2n - m_n`` and
    the verdict is taken on that estimate.
    """

    per_node: np.ndarray
    global_min: float
    global_max: float
    threshold: float
    verdict: str
    refined_min: float = None
    extrapolated_min: float = None
    trivial: bool = False

    @property
    def passes(self):
        return self.verdict == "passes"

    @property
    def m(self):
        return self.global_min


def min_separation(m, threshold=DEFAULT_THRESHOLD, refined=None):
    per_node = node_separations(m)
    if m.N < 2:
        return SeparationReport(per_node, np.inf, np.inf, threshold, "passes", trivial=True)
    lo, hi = float(per_node.min()), float(per_node.max())
    refined_min = extrapolated = None
    test = lo
    if refined is not None:
        refined_min = float(node_separations(refined).min())
        extrapolated = max(0.0, 2 * refined_min - lo)
        test = min(lo, extrapolated)
    verdict = "fails_necessary" if test < threshold else "passes"
    return SeparationReport(per_node, lo, hi, threshold, verdict, refined_min, extrapolated)


# ----------------------------------------------------------- interval tools

def _box_ranges(cover, v, clusters=None):
    """Range ``[lo, hi]`` of ``v . x`` over every box of the chosen clusters."""
    G = cover.group
    b = G.h_basis @ v
    clusters = range(cover.R) if clusters is None else clusters
    los, his = [], []
    for i in clusters:
        boxes = cover.h_boxes[i]
        if boxes.shape[0] == 0:
            continue
        a = float(cover.gammas[i] @ v)
        p, q = boxes[:, 0] * b, boxes[:, 1] * b
        los.append(a + np.minimum(p, q).sum(axis=1))
        his.append(a + np.maximum(p, q).sum(axis=1))
    if not los:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(los), np.concatenate(his)


def abs_extent(cover, v, clusters=None):
    """Exact ``(min |v.x|, max |v.x|)`` over the union of boxes."""
    lo, hi = _box_ranges(cover, np.asarray(v, dtype=float), clusters)
    if lo.size == 0:
        return np.inf, 0.0
    straddle = (lo <= 0) & (hi >= 0)
    mins = np.where(straddle, 0.0, np.minimum(np.abs(lo), np.abs(hi)))
    return float(mins.min()), float(np.maximum(np.abs(lo), np.abs(hi)).max())


def sample_cover(cover, grid=64, clusters=None):
    """Ambient sample points: box corners plus a regular grid in every box."""
    G = cover.group
    s = G.h_dim
    clusters = range(cover.R) if clusters is None else clusters
    per_edge = max(2, int(grid)) if s <= 2 else max(2, min(int(grid), 8))
    unit = np.linspace(0.0, 1.0, per_edge)
    mesh = (np.stack(np.meshgrid(*([unit] * s), indexing="ij"), axis=-1).reshape(-1, s)
            if s else np.zeros((1, 0)))
    pts = []
    for i in clusters:
        boxes = cover.h_boxes[i]
        if boxes.shape[0] == 0:
            continue
        lo, width = boxes[:, 0], boxes[:, 1] - boxes[:, 0]
        h = lo[:, None, :] + mesh[None, :, :] * width[:, None, :]
        pts.append(h.reshape(h.shape[0] * h.shape[1], s) @ G.h_basis + cover.gammas[i])
    if not pts:
        return np.zeros((0, G.dim))
    return np.concatenate(pts)


# ------------------------------------------------------------------ cases

@dataclass(frozen=True, eq=False)
class Case:
    """Which sufficiency route applies; ``w`` is an ambient vector in H."""

    kind: str
    w: np.ndarray = None
    margin: float = None

    def __str__(self):
        if self.kind == "b" and self.w is not None:
            return "b(w=(" + ", ".join(f"{x:.12g}" for x in self.w) + "))"
        return self.kind


@dataclass(frozen=True)
class SearchParams:
    seed: int = 0
    max_iters: int = 1000
    coef_range: int = 10
    grid: int = 64
    n_directions: int = 32
    max_halvings: int = 40
    tol: float = 1e-9


def probe_directions(cover, params=SearchParams()):
    """Candidate w in H (ambient, unit length) for the H-margin test."""
    G = cover.group
    s = G.h_dim
    if s == 0:
        return []
    cands = [e for e in np.eye(s)]
    if cover.contains_zero_gamma and cover.h_boxes[0].shape[0]:
        boxes = cover.h_boxes[0]
        centers = boxes.mean(axis=1)
        overall = 0.5 * (boxes[:, 0].min(axis=0) + boxes[:, 1].max(axis=0))
        cands.append(overall)
        step = max(1, centers.shape[0] // 64)
        cands.extend(centers[::step])
    if s == 2:
        ang = np.pi * np.arange(params.n_directions) / params.n_directions
        cands.extend(np.stack([np.cos(ang), np.sin(ang)], axis=1))
    elif s > 2:
        rng = np.random.default_rng(params.seed)
        cands.extend(rng.standard_normal((params.n_directions, s)))
    out, seen = [], []
    for c in cands:
        nrm = np.linalg.norm(c)
        if nrm < 1e-12:
            continue
        c = c / nrm
        if any(abs(abs(c @ d) - 1) < 1e-12 for d in seen):
            continue
        seen.append(c)
        out.append(c @ G.h_basis)
    return out


def _margin(cover, w):
    """``(inf, sup)`` of ``|w . x|`` over the zero-lattice cluster."""
    if not cover.contains_zero_gamma:
        return np.inf, 0.0
    return abs_extent(cover, w, clusters=[0])


def classify_case(cover, subgroup, separation=None, params=SearchParams()):
    """Decide which sufficiency route applies to the cover."""
    if not cover.contains_zero_gamma:
        return Case("a")
    if subgroup.h_dim == 1 and (separation is None or separation.passes):
        e = subgroup.h_basis[0]
        lo, _ = _margin(cover, e)
        if lo > params.tol:
            return Case("c", e, lo)
    best = None
    for w in probe_directions(cover, params):
        lo, hi = _margin(cover, w)
        if lo > params.tol:
            score = lo / hi
            if best is None or score > best[0]:
                best = (score, w, lo)
    if best is not None:
        return Case("b", best[1], best[2])
    return Case("unsupported")


# ------------------------------------------------------------ certificate

@dataclass(frozen=True, eq=False)
class VCertificate:
    v: np.ndarray
    eps1: float
    upper: float
    case: str
    witnesses: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)


def _search_u(cover, clusters, G, params, rng):
    """Find u in H-perp with u . gamma_i != 0 for the given clusters."""
    gammas = cover.gammas[list(clusters)]
    dual = grp.dual_group(G).basis if G.is_full_rank else G.gamma_basis
    cands = list(dual)
    if dual.shape[0] > 1:
        cands.append(dual.sum(axis=0))
    for it in range(params.max_iters):
        if it < len(cands):
            u = cands[it]
        else:
            coef = rng.integers(-params.coef_range, params.coef_range + 1, size=dual.shape[0])
            u = coef @ dual
        pair = np.abs(gammas @ u)
        if pair.size and pair.min() > params.tol * max(1.0, np.linalg.norm(u)):
            return u, float(pair.max()), float(pair.min())
    raise SearchFailed(f"no u with u.gamma != 0 after {params.max_iters} draws", case="a")


def _try_w(cover, G, w, params, rng):
    lo_w, hi_w = _margin(cover, w)
    if not lo_w > params.tol:
        return None
    rest = list(cover.nonzero())
    if not rest:
        eps = UPPER / hi_w
        return eps * w, {"w": w, "epsilon": eps, "degenerate": True}
    u, D, C = _search_u(cover, rest, G, params, rng)
    _, w_max = abs_extent(cover, w)
    eps_top = UPPER / w_max
    best = None
    for s in range(params.max_halvings + 1):
        eps = eps_top * 2.0 ** (-s)
        v = u / (4 * D) + eps * w
        lo, hi = abs_extent(cover, v)
        if hi <= UPPER + UPPER_SLACK and lo > params.tol and (best is None or lo > best[0]):
            best = (lo, v, eps)
    if best is None:
        return None
    return best[1], {"w": w, "u": u, "D": D, "C": C, "epsilon": best[2], "degenerate": False}


def _finish(cover, v, case, details, params):
    v = np.asarray(v, dtype=float) + 0.0
    lo, hi = abs_extent(cover, v)
    if cover.R == 0:
        lo, hi = UPPER, 0.0
    pts = sample_cover(cover, params.grid)
    witnesses = {}
    if pts.shape[0]:
        vals = np.abs(pts @ v)
        i, j = int(np.argmin(vals)), int(np.argmax(vals))
        witnesses = {"min_point": pts[i], "min_value": float(vals[i]),
                     "max_point": pts[j], "max_value": float(vals[j]),
                     "samples": int(pts.shape[0])}
        if vals[i] < lo - 1e-12 or vals[j] > UPPER + UPPER_SLACK:
            raise SearchFailed("grid samples contradict the interval certificate", case=case)
    return VCertificate(np.asarray(v, dtype=float), float(lo), float(hi), case, witnesses, details)


def construct_v(cover, case, subgroup, params=SearchParams()):
    """Find v with ``0 < eps1 <= |v . x| <= 1/2`` on the cover.

    ``case`` is a :class:`Case` or one of 'a', 'b', 'c', 'unsupported';
    for 'b' without a direction, and for 'unsupported', every probe
    direction is tried.  Raises :class:`SearchFailed` when nothing
    validates.
    """
    G = subgroup
    if isinstance(case, str):
        case = Case(case)
    rng = np.random.default_rng(params.seed)
    if case.kind == "a":
        if cover.R == 0:
            return _finish(cover, np.zeros(G.dim), "a", {"vacuous": True}, params)
        if cover.contains_zero_gamma:
            raise SearchFailed("case a needs every lattice part to be nonzero", case="a")
        u, D, C = _search_u(cover, range(cover.R), G, params, rng)
        return _finish(cover, u / (2 * D), "a", {"u": u, "D": D, "C": C}, params)
    if case.kind == "c":
        w = case.w if case.w is not None else G.h_basis[0]
        found = _try_w(cover, G, w, params, rng)
        if found is None:
            raise SearchFailed("reduction of case c to the H-margin route failed",
                               probes=[w], case="c")
        return _finish(cover, found[0], "c", found[1], params)
    probes = ([case.w] if case.w is not None else []) + probe_directions(cover, params)
    best = None
    for w in probes:
        found = _try_w(cover, G, w, params, rng)
        if found is None:
            continue
        lo, _ = abs_extent(cover, found[0])
        if best is None or lo > best[0]:
            best = (lo, found)
    if best is None:
        raise SearchFailed(f"no admissible w among {len(probes)} probe directions",
                           probes=probes, case=case.kind)
    return _finish(cover, best[1][0], "b", best[1][1], params)


def revalidate(cert, cover, grid):
    """Sampled ``(min, max)`` of ``|v . x|`` on a grid of the given density."""
    pts = sample_cover(cover, grid)
    vals = np.abs(pts @ cert.v)
    return float(vals.min()), float(vals.max())


# --------------------------------------------------------- translations

def vandermonde_t(v, N):
    """``t_j = (j - 1) v`` for j = 1..N."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    return np.arange(N)[:, None] * v[None, :]


def det_floor(eps1, N):
    """``(4 eps1)^(N(N-1)/2)``, the determinant floor of the Vandermonde plan."""
    if not 0 < eps1 <= UPPER + UPPER_SLACK:
        raise ValueError(f"eps1 must lie in (0, 1/2], got {eps1}")
    return float((4 * eps1) ** (N * (N - 1) / 2))


@dataclass(frozen=True, eq=False)
class SpectrumPlan:
    dual: grp.DualLattice
    t: np.ndarray
    K: int
    lambda_truncation: np.ndarray
    structured_set: np.ndarray
    translate_index: np.ndarray
    det_floor: float = None
    base: str = "lattice"

    def truncate(self, K):
        return structured_spectrum(self.dual, self.t, K, base=self.base)


def jp4_spectrum(K):
    """``{sum_{k<K} 4^k d_k : d_k in {0, 1}}``, sorted."""
    if K == 0:
        return np.zeros(1)
    digits = np.array(list(itertools.product((0, 1), repeat=K)), dtype=float)
    return np.sort(digits @ 4.0 ** np.arange(K))


def structured_spectrum(dual, t, K, eps1=None, base="lattice"):
    """Truncated structured set ``union_k (Lambda_K + t_k)``.

    ``base='lattice'`` takes all dual points with coefficients in [-K, K];
    ``base='jp4'`` (one-dimensional lattice only) takes the quaternary
    digit set with K digits over the dual generator.
    """
    G = dual.group
    t = np.atleast_2d(np.asarray(t, dtype=float))
    if t.shape[1] != G.dim:
        t = t.reshape(-1, G.dim)
    K = int(K)
    if K < 0:
        raise ValueError("K must be nonnegative")
    r = dual.basis.shape[0]
    if base == "lattice":
        coefs = np.array(list(itertools.product(range(-K, K + 1), repeat=r)), dtype=float)
        lam = coefs.reshape(-1, r) @ dual.basis if r else np.zeros((1, G.dim))
    elif base == "jp4":
        if r != 1:
            raise ValueError("the jp4 spectrum needs a rank-one dual lattice")
        lam = jp4_spectrum(K)[:, None] @ dual.basis
    else:
        raise ValueError(f"unknown base spectrum {base!r}")
    N = t.shape[0]
    for j, k in itertools.combinations(range(N), 2):
        if grp.in_dual(G, t[j] - t[k])[0]:
            raise CollidingTranslates(f"t_{j + 1} - t_{k + 1} lies in the dual group")
    structured = (t[:, None, :] + lam[None, :, :]).reshape(-1, G.dim)
    index = np.repeat(np.arange(N), lam.shape[0])
    floor = det_floor(eps1, N) if eps1 is not None else None
    return SpectrumPlan(dual, t, K, lam, structured, index, floor, base)


def export_spectrum(plan, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["translate_index"] + [f"x_{i + 1}" for i in range(plan.t.shape[1])])
        for k, p in zip(plan.translate_index, plan.structured_set):
            w.writerow([int(k)] + [f"{v:.12g}" for v in p])
