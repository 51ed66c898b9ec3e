"""Base measures, translation fields and multi-tiling measures.

A base measure is stored as a finite list of weighted nodes inside the
fundamental cell of the subgroup.  Each component of a multi-tiling measure
is the base measure pushed forward by ``x -> x + g_j(x)`` where ``g_j``
takes values in the subgroup.
"""

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import group as grp
from .errors import BadSpec, NotInGroup, OverlappingComponents

DEFAULT_SEP_TOL = 1e-7
KINDS = ("lebesgue_segment", "lebesgue_region", "atomic", "cantor4")


@dataclass(frozen=True, eq=False)
class QuadMeasure:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.nodes.shape[1]

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def __len__(self):
        return self.nodes.shape[0]


def _vec(value, name):
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.ndim != 1:
        raise BadSpec(f"{name} must be a vector")
    return arr


def _rule_points(n, rule):
    if rule == "midpoint":
        return (np.arange(n) + 0.5) / n
    if rule == "left":
        return np.arange(n) / n
    raise BadSpec(f"unknown quadrature rule {rule!r}")


def _cantor4_nodes(depth):
    scales = 2.0 / 4.0 ** np.arange(1, depth + 1)
    digits = np.array(list(itertools.product((0, 1), repeat=depth)), dtype=float)
    return np.sort(digits @ scales)


def build_base_measure(spec, G=None):
    """Build a :class:`QuadMeasure` from a dictionary description.

    Recognised kinds and their keys:

    ``lebesgue_segment``
        ``start``, ``end`` (points), ``nodes`` (int), ``rule`` ('midpoint'
        or 'left'), ``mass`` (default 1).
    ``lebesgue_region``
        ``lower``, ``upper`` (points), ``nodes`` (per-axis count), ``rule``,
        ``mass``.
    ``atomic``
        ``atoms`` (list of points), ``weights``.
    ``cantor4``
        ``depth`` K; the 2**K points of the K-th stage of the IFS
        ``x/4, x/4 + 1/2`` with equal weights.

    When ``G`` is given, every node must already be its own residue in the
    anchored fundamental cell.
    """
    spec = dict(spec)
    kind = spec.get("kind")
    rule = spec.get("rule", "midpoint")
    mass = float(spec.get("mass", 1.0))
    if not mass > 0:
        raise BadSpec("mass must be positive")
    if kind == "lebesgue_segment":
        a, b = _vec(spec["start"], "start"), _vec(spec["end"], "end")
        n = int(spec.get("nodes", 0))
        if n <= 0:
            raise BadSpec("segment needs a positive node count")
        if a.shape != b.shape or np.linalg.norm(b - a) == 0:
            raise BadSpec("segment endpoints must differ and share a dimension")
        s = _rule_points(n, rule)
        nodes = a + s[:, None] * (b - a)
        weights = np.full(n, mass / n)
        params = {"start": a, "end": b, "mass": mass, "rule": rule}
    elif kind == "lebesgue_region":
        lo, hi = _vec(spec["lower"], "lower"), _vec(spec["upper"], "upper")
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise BadSpec("region needs upper > lower in every axis")
        counts = np.broadcast_to(np.atleast_1d(spec.get("nodes", 0)), lo.shape).astype(int)
        if np.any(counts <= 0):
            raise BadSpec("region needs positive node counts")
        axes = [lo[i] + _rule_points(counts[i], rule) * (hi[i] - lo[i])
                for i in range(lo.size)]
        nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lo.size)
        weights = np.full(nodes.shape[0], mass / nodes.shape[0])
        params = {"lower": lo, "upper": hi, "mass": mass, "rule": rule}
    elif kind == "atomic":
        nodes = np.atleast_2d(np.asarray(spec["atoms"], dtype=float))
        weights = np.asarray(spec.get("weights", np.ones(len(nodes)) / len(nodes)), dtype=float)
        if nodes.shape[0] == 0 or weights.shape != (nodes.shape[0],):
            raise BadSpec("atomic measure needs one weight per atom")
        if np.any(weights <= 0):
            raise BadSpec("weights must be positive")
        params = {}
    elif kind == "cantor4":
        depth = int(spec.get("depth", 0))
        if depth <= 0:
            raise BadSpec("cantor4 needs a positive depth")
        nodes = _cantor4_nodes(depth)[:, None]
        weights = np.full(nodes.shape[0], mass / 2 ** depth)
        params = {"depth": depth, "mass": mass}
    else:
        raise BadSpec(f"unknown base measure kind {kind!r}")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    m = QuadMeasure(nodes, weights, kind, params)
    if G is not None:
        if m.dim != G.dim:
            raise BadSpec(f"measure lives in R^{m.dim}, group in R^{G.dim}")
        moved = np.linalg.norm(grp.reduce_mod(G, nodes).group_element, axis=1)
        if np.any(moved > 10 * G.tol):
            i = int(np.argmax(moved))
            raise BadSpec(f"node {i} lies outside the fundamental cell")
    return m


# ---------------------------------------------------------------- fields

@dataclass(frozen=True, eq=False)
class TranslationField:
    """A map from base nodes to group elements ``g_j(x)``.

    ``constant`` is set when the field does not depend on ``x``; it enables
    closed-form Fourier transforms of the component.
    """

    name: str
    func: object = field(repr=False)
    params: dict = field(default_factory=dict)
    constant: np.ndarray = None

    def __call__(self, nodes):
        nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        return np.asarray(self.func(nodes), dtype=float).reshape(nodes.shape)


def _stack(*cols):
    return np.stack(np.broadcast_arrays(*cols), axis=-1)


def _square(sign, delta=0.0):
    # breakpoint x = 1/2 belongs to the left branch
    def func(p):
        x = p[:, 0]
        y = np.where(x <= 0.5, x, 1.0 - x) + delta / 2
        return _stack(0.0 * x, sign * y)
    return func


def _plus(sign):
    # x in [0, 1/2] is the right arm, x in (1/2, 1) the left arm shifted by -1
    def func(p):
        x = p[:, 0]
        right = x <= 0.5
        return _stack(np.where(right, 0.0, -1.0), sign * np.where(right, x, x - 1.0))
    return func


def _helix(p):
    x = p[:, 0]
    return _stack(0.0 * x, np.cos(2 * np.pi * x), np.sin(2 * np.pi * x))


def _cube_piece(shift, dim):
    def func(p):
        out = np.zeros_like(p)
        left = p[:, 0] < 0.5
        out[left, 0] = shift
        out[~left, 1 % dim] = shift
        return out
    return func


def _table(rows, axis):
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise BadSpec("a field table needs at least two rows")
    order = np.argsort(rows[:, 0], kind="stable")
    rows = rows[order]
    if np.any(np.diff(rows[:, 0]) <= 0):
        raise BadSpec("field table abscissae must be distinct")

    def func(p):
        s = p[:, axis]
        return np.stack([np.interp(s, rows[:, 0], rows[:, 1 + i])
                         for i in range(rows.shape[1] - 1)], axis=-1)
    return func, rows.shape[1] - 1


FIELD_NAMES = (
    "zero", "constant", "square_upper", "square_lower", "separated_upper",
    "separated_lower", "plus_diag", "plus_antidiag", "helix", "cube_piece", "table",
)


def make_field(name, dim, **params):
    """Construct a builtin translation field.

    ``separated_*`` take ``delta``; ``constant`` takes ``g``; ``cube_piece``
    takes an integer ``shift``; ``table`` takes ``rows`` of
    ``(s, g_1, ..., g_d)`` and an optional ``axis`` (default 0) along which
    the base node is read.
    """
    constant = None
    if name == "zero":
        constant = np.zeros(dim)
    elif name == "constant":
        constant = _vec(params["g"], "g")
        if constant.size != dim:
            raise BadSpec(f"constant field needs {dim} entries")
    elif name in ("square_upper", "square_lower"):
        func = _square(1.0 if name.endswith("upper") else -1.0)
    elif name in ("separated_upper", "separated_lower"):
        delta = float(params["delta"])
        func = _square(1.0 if name.endswith("upper") else -1.0, delta)
    elif name in ("plus_diag", "plus_antidiag"):
        func = _plus(1.0 if name == "plus_diag" else -1.0)
    elif name == "helix":
        func = _helix
    elif name == "cube_piece":
        func = _cube_piece(int(params["shift"]), dim)
    elif name == "table":
        func, width = _table(params["rows"], int(params.get("axis", 0)))
        if width != dim:
            raise BadSpec(f"table rows need 1 + {dim} columns")
    else:
        raise BadSpec(f"unknown translation field {name!r}")
    if name in ("square_upper", "square_lower", "separated_upper",
                "separated_lower", "plus_diag", "plus_antidiag") and dim != 2:
        raise BadSpec(f"field {name!r} is planar")
    if name == "helix" and dim != 3:
        raise BadSpec("helix field lives in R^3")
    if constant is not None:
        c = constant.copy()
        func = lambda p: np.broadcast_to(c, p.shape)  # noqa: E731
    return TranslationField(name, func, dict(params), constant)


# -------------------------------------------------------------- assembly

@dataclass(frozen=True, eq=False)
class Component:
    field: TranslationField
    g: np.ndarray
    cloud: np.ndarray


def build_component(base, fld, G):
    """Evaluate ``fld`` at every base node and check it lands in ``G``."""
    g = fld(base.nodes)
    dist = grp.distance_to_group(G, g)
    bad = np.flatnonzero(dist >= G.tol * max(1.0, np.abs(g).max(initial=0.0)))
    if bad.size:
        i = int(bad[0])
        raise NotInGroup(
            f"field {fld.name!r} at node {i} gives {g[i]} "
            f"(distance {dist[i]:.3g} from the group)"
        )
    cloud = base.nodes + g
    g.setflags(write=False)
    cloud.setflags(write=False)
    return Component(fld, g, cloud)


@dataclass(frozen=True, eq=False)
class MultiTileMeasure:
    """``mu = mu_1 + ... + mu_N`` built from one base measure.

    ``g`` has shape (N, n, d): the group element carrying base node i into
    component j.  ``M`` is the largest pairwise distance between the
    ``g_j(x)`` over all nodes.
    """

    group: grp.ClosedSubgroup
    base: QuadMeasure
    fields: tuple
    g: np.ndarray
    M: float
    collisions: int = 0

    @property
    def N(self):
        return self.g.shape[0]

    @property
    def dim(self):
        return self.base.dim

    @property
    def clouds(self):
        return self.base.nodes[None, :, :] + self.g

    @property
    def total_mass(self):
        return self.N * self.base.total_mass

    def atoms(self):
        """All atoms ``(points, weights)`` of the discretized measure."""
        pts = self.clouds.reshape(-1, self.dim)
        w = np.tile(self.base.weights, self.N)
        return pts, w


def assemble_multitile(G, base, fields, sep_tol=DEFAULT_SEP_TOL, collision_budget=0):
    """Assemble and validate a multi-tiling measure.

    Two components collide when a point of one lies within ``sep_tol`` of a
    point of the other.  Up to ``collision_budget`` collisions are tolerated
    (isolated shared points carry no mass in the continuum).
    """
    fields = tuple(fields)
    if not fields:
        raise BadSpec("a multi-tiling measure needs at least one component")
    comps = [build_component(base, f, G) for f in fields]
    collisions = 0
    first = None
    trees = [cKDTree(c.cloud) for c in comps]
    for j, k in itertools.combinations(range(len(comps)), 2):
        hits = trees[k].query_ball_point(comps[j].cloud, r=sep_tol)
        for i, near in enumerate(hits):
            if near:
                collisions += len(near)
                if first is None:
                    first = (j, i, k, min(near))
    if collisions > collision_budget:
        j, i, k, i2 = first
        raise OverlappingComponents(
            f"components {j} and {k} collide at nodes {i} and {i2} "
            f"({collisions} collisions, budget {collision_budget})",
            pair=first,
        )
    g = np.stack([c.g for c in comps])
    M = 0.0
    for j, k in itertools.combinations(range(len(comps)), 2):
        M = max(M, float(np.linalg.norm(g[j] - g[k], axis=1).max()))
    g.setflags(write=False)
    return MultiTileMeasure(G, base, fields, g, M, collisions)


# ------------------------------------------------------ Fourier transform

def _exact_base(m, xi):
    mass = m.params.get("mass", 1.0)
    if m.kind == "lebesgue_segment":
        a, b = m.params["start"], m.params["end"]
        theta = xi @ (b - a)
        return mass * np.exp(-1j * np.pi * (xi @ (a + b))) * np.sinc(theta)
    if m.kind == "lebesgue_region":
        lo, hi = m.params["lower"], m.params["upper"]
        val = np.exp(-1j * np.pi * (xi @ (lo + hi))) * np.prod(np.sinc(xi * (hi - lo)), axis=-1)
        return mass * val
    if m.kind == "cantor4":
        depth = m.params["depth"]
        scales = 2.0 / 4.0 ** np.arange(1, depth + 1)
        # (1 + e^{-2 pi i a}) / 2 = e^{-i pi a} cos(pi a), reduced mod 2 so
        # that half-integer a gives an exact zero factor
        a = np.mod(xi[..., 0:1] * scales, 2.0)
        c = np.where(np.mod(a, 1.0) == 0.5, 0.0, np.cos(np.pi * a))
        return mass * np.prod(np.exp(-1j * np.pi * a) * c, axis=-1)
    if m.kind == "atomic":
        return _quadrature(m.nodes, m.weights, xi)
    raise ValueError(f"no closed form for kind {m.kind!r}")


def _quadrature(nodes, weights, xi):
    return np.exp(-2j * np.pi * (xi @ nodes.T)) @ weights


def fourier_transform(m, xi, method="quadrature"):
    """``integral exp(-2 pi i xi . x) dm(x)``.

    ``xi`` has shape (d,) or (..., d); a scalar is accepted for d = 1.
    ``method='exact'`` uses closed forms: the sinc formula for Lebesgue
    segments and boxes, the infinite-product truncation for ``cantor4``, and
    for multi-tiling measures with constant fields the factorisation
    ``sum_j exp(-2 pi i xi . g_j) * base_hat(xi)``.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 0:
        xi = xi[None]
    if xi.shape[-1] != m.dim:
        raise ValueError(f"frequency of length {xi.shape[-1]} for a measure in R^{m.dim}")
    if isinstance(m, MultiTileMeasure):
        if method == "exact":
            consts = [f.constant for f in m.fields]
            if any(c is None for c in consts):
                raise ValueError("closed form needs constant translation fields")
            shift = sum(np.exp(-2j * np.pi * (xi @ c)) for c in consts)
            out = shift * _exact_base(m.base, xi)
        else:
            pts, w = m.atoms()
            out = _quadrature(pts, w, xi)
    elif method == "exact":
        out = _exact_base(m, xi)
    elif method == "quadrature":
        out = _quadrature(m.nodes, m.weights, xi)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out[()] if np.ndim(out) == 0 else out


# ------------------------------------------------------- difference cover

@dataclass(frozen=True, eq=False)
class DifferenceCover:
    """Boxes covering the differences ``g_j(x) - g_k(x)``.

    Cluster i collects the differences whose lattice part is ``gammas[i]``;
    its H parts are covered by the boxes ``h_boxes[i]`` of shape (B, 2, s)
    holding ``(lower, upper)`` corners in ``h_basis`` coordinates.  The zero
    cluster, when present, comes first.
    """

    group: grp.ClosedSubgroup
    gammas: np.ndarray
    gamma_coeffs: np.ndarray
    h_boxes: tuple
    contains_zero_gamma: bool

    @property
    def R(self):
        return self.gammas.shape[0]

    def bounding_box(self, i):
        boxes = self.h_boxes[i]
        return boxes[:, 0].min(axis=0), boxes[:, 1].max(axis=0)

    def nonzero(self):
        start = 1 if self.contains_zero_gamma else 0
        return range(start, self.R)


def _as_boxes(b, s):
    b = np.asarray(b, dtype=float)
    if b.ndim == 2:
        b = b[None]
    if b.ndim != 3 or b.shape[1:] != (2, s):
        raise ValueError(f"boxes must have shape (B, 2, {s}), got {b.shape}")
    return b


def make_cover(G, gamma_coeffs, h_boxes):
    """Build a cover from integer lattice coefficients and per-cluster boxes."""
    coeffs = np.asarray(gamma_coeffs, dtype=np.int64).reshape(len(h_boxes), G.rank)
    boxes = tuple(_as_boxes(b, G.h_dim) for b in h_boxes)
    zero = np.all(coeffs == 0, axis=1)
    order = np.argsort(~zero, kind="stable")
    coeffs = coeffs[order]
    boxes = tuple(boxes[i] for i in order)
    return DifferenceCover(G, coeffs @ G.gamma_basis, coeffs, boxes, bool(zero.any()))


def difference_cover(m, chunk=16):
    """Cover the observed differences by clustered boxes.

    For each ordered pair (j, k) the nodes are walked in index order,
    split into runs sharing one lattice part, and each run is cut into
    chunks of ``chunk`` consecutive nodes.  Neighbouring chunks share their
    end node, so every box also contains the segment joining consecutive
    difference points.
    """
    G = m.group
    clusters = {}
    n = m.g.shape[1]
    for j, k in itertools.permutations(range(m.N), 2):
        h, c = grp.decompose(G, m.g[j] - m.g[k])
        breaks = np.flatnonzero(np.any(c[1:] != c[:-1], axis=1)) + 1
        starts = np.concatenate([[0], breaks])
        stops = np.concatenate([breaks, [n]])
        for a, b in zip(starts, stops):
            key = tuple(int(v) for v in c[a])
            boxes = clusters.setdefault(key, [])
            for s in range(a, b, chunk):
                piece = h[s:min(s + chunk + 1, b)]
                boxes.append(np.stack([piece.min(axis=0), piece.max(axis=0)]))
    if not clusters:
        return make_cover(G, np.zeros((0, G.rank)), ())
    keys = sorted(clusters)
    return make_cover(G, keys, [np.stack(clusters[key]) for key in keys])


def cover_contains(cover, diffs, tol=None):
    """True where each difference lies in some box of its lattice cluster."""
    G = cover.group
    tol = 10 * G.tol if tol is None else tol
    h, c = grp.decompose(G, np.atleast_2d(diffs))
    out = np.zeros(h.shape[0], dtype=bool)
    for i, coeff in enumerate(cover.gamma_coeffs):
        rows = np.all(c == coeff, axis=1)
        if not rows.any():
            continue
        boxes = cover.h_boxes[i]
        inside = np.all((h[rows, None, :] >= boxes[None, :, 0] - tol)
                        & (h[rows, None, :] <= boxes[None, :, 1] + tol), axis=2)
        out[rows] = inside.any(axis=1)
    return out


def export_points(m, path):
    """Write the atoms as CSV: component_index, x_1..x_d, weight."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["component_index"] + [f"x_{i + 1}" for i in range(m.dim)] + ["weight"])
        clouds = m.clouds
        for j in range(m.N):
            for p, wt in zip(clouds[j], m.base.weights):
                w.writerow([j] + [f"{v:.12g}" for v in p] + [f"{wt:.12g}"])


def node_separations(m):
    """Per-node ``min_{j != k} |g_j(x) - g_k(x)|``; ``inf`` when N = 1."""
    if m.N < 2:
        return np.full(m.g.shape[1], np.inf)
    seps = [np.linalg.norm(m.g[j] - m.g[k], axis=1)
            for j, k in itertools.combinations(range(m.N), 2)]
    return np.min(seps, axis=0)
