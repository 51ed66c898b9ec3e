"""Built-in scenarios and the end-to-end pipeline.

Pipeline stages, in order: group, base, assemble, separation, cover, case,
search, profile, scan.  A failing necessary condition skips the cover,
case and search stages unless ``force_all`` is set; the profile and scan
stages then use the probe translations ``t`` listed in the task block, if
any.
"""

import datetime
import os
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np

from . import config as cfgmod
from . import determinant as det
from . import frames
from . import group as grp
from . import measure as ms
from . import spectrum as sp
from .errors import BadParams, MultiTileError, PipelineError, SearchFailed, UnknownScenario

VERDICTS = ("structured-basis-certified", "necessary-condition-fails",
            "sufficiency-search-failed", "inconclusive")
FLOOR_SLACK = 1e-9


# ------------------------------------------------------------- builtins

def _planar(name, description, base, comps, task):
    return cfgmod.ScenarioConfig(
        name=name, description=description,
        group={"dim": 2, "h": [[0.0, 1.0]], "gamma": [[1.0, 0.0]]},
        base=base, components=comps, task=task)


def _segment(dim, nodes, rule="midpoint", mass=None):
    start = [0.0] * dim
    end = [1.0] + [0.0] * (dim - 1)
    base = {"kind": "lebesgue_segment", "start": start, "end": end,
            "nodes": [int(nodes)], "rule": rule}
    if mass is not None:
        base["mass"] = mass
    return base


def square_boundary(nodes=1000):
    return _planar(
        "square_boundary",
        "rotated unit-square boundary as two fundamental domains of Z x R",
        _segment(2, nodes),
        [{"field": "square_upper"}, {"field": "square_lower"}],
        {"seed": 0, "K": [2, 4, 8, 16], "t": [[0.0, 0.0], [0.0, 0.5]]})


def separated_square(delta=0.5, nodes=1000):
    delta = float(delta)
    if not delta > 0:
        raise BadParams("separated_square needs delta > 0")
    # left-endpoint nodes include x = 0 and x = 1/2 where the separation
    # attains its extremes delta and 1 + delta
    return _planar(
        "separated_square",
        "square boundary with halves pulled apart vertically by delta",
        _segment(2, nodes, rule="left"),
        [{"field": "separated_upper", "delta": delta},
         {"field": "separated_lower", "delta": delta}],
        {"seed": 0, "K": [2, 4, 8, 16]})


def plus_space(nodes=1000):
    # the plus space rotated by 45 degrees and scaled by sqrt(2): arms
    # {(s, s)} and {(s, -s)}, |s| <= 1/2, over the cell [0, 1) x {0}
    return _planar(
        "plus_space",
        "plus space after a 45 degree rotation, two fundamental domains of Z x R",
        _segment(2, nodes, mass=0.5),
        [{"field": "plus_diag"}, {"field": "plus_antidiag"}],
        {"seed": 0, "K": [2, 4, 8], "t": [[0.0, 0.0], [0.0, 0.5]]})


def helix3d(nodes=4096):
    return cfgmod.ScenarioConfig(
        name="helix3d",
        description="segment plus one helix turn over Z x R^2",
        group={"dim": 3, "h": [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], "gamma": [[1.0, 0.0, 0.0]]},
        base=_segment(3, nodes),
        components=[{"field": "zero"}, {"field": "helix"}],
        task={"seed": 0, "K": [2, 4, 8], "t": [[0.0, 0.0, 0.0], [0.0, 0.5, 0.25]]})


def cantor_multitile(shifts=(0, 1, 3), depth=8):
    shifts = [int(s) for s in shifts]
    if len(set(shifts)) != len(shifts):
        raise BadParams("cantor_multitile shifts must be distinct")
    return cfgmod.ScenarioConfig(
        name="cantor_multitile",
        description="integer translates of the middle-fourth Cantor measure over Z",
        group={"dim": 1, "gamma": [[1.0]]},
        base={"kind": "cantor4", "depth": int(depth)},
        components=[{"field": "constant", "g": [float(s)]} for s in shifts],
        task={"seed": 0, "K": [1, 2, 3, 4], "spectrum": "jp4"})


def cube_multitile(level=3, nodes=16):
    level = int(level)
    if level < 1:
        raise BadParams("cube_multitile needs level >= 1")
    return cfgmod.ScenarioConfig(
        name="cube_multitile",
        description="level-k multi-tile of Z^2 built from cut-and-shifted unit squares",
        group={"dim": 2, "gamma": [[1.0, 0.0], [0.0, 1.0]]},
        base={"kind": "lebesgue_region", "lower": [0.0, 0.0], "upper": [1.0, 1.0],
              "nodes": [int(nodes)]},
        components=[{"field": "cube_piece", "shift": j} for j in range(level)],
        task={"seed": 0, "K": [1, 2, 4]})


BUILTINS = {
    "square_boundary": (square_boundary, {"nodes": int}),
    "separated_square": (separated_square, {"delta": float, "nodes": int}),
    "plus_space": (plus_space, {"nodes": int}),
    "helix3d": (helix3d, {"nodes": int}),
    "cantor_multitile": (cantor_multitile, {
        "shifts": lambda s: [int(x) for x in s.split(",")] if isinstance(s, str) else list(s),
        "depth": int}),
    "cube_multitile": (cube_multitile, {"level": int, "nodes": int}),
}


def builtin_config(name, params=None):
    """The :class:`ScenarioConfig` of a builtin scenario."""
    if name not in BUILTINS:
        raise UnknownScenario(f"unknown scenario {name!r}; choose from {sorted(BUILTINS)}")
    builder, types = BUILTINS[name]
    kwargs = {}
    for key, value in (params or {}).items():
        if key not in types:
            raise BadParams(f"scenario {name!r} has no parameter {key!r}")
        try:
            kwargs[key] = types[key](value)
        except (TypeError, ValueError) as exc:
            raise BadParams(f"bad value for {key!r}: {exc}") from None
    return builder(**kwargs)


def shipped_config_text(name):
    """Text of the config file shipped for a builtin scenario."""
    return resources.files("multitile").joinpath("data", f"{name}.cfg").read_text()


# ------------------------------------------------------------- pipeline

@dataclass(eq=False)
class ScenarioReport:
    name: str
    verdict: str
    body: str
    separation: sp.SeparationReport = None
    case: sp.Case = None
    certificate: sp.VCertificate = None
    failure: str = None
    t: np.ndarray = None
    profile: det.DetProfile = None
    det_floor: float = None
    scan: frames.BoundScan = None
    measure: ms.MultiTileMeasure = field(default=None, repr=False)
    plan: sp.SpectrumPlan = field(default=None, repr=False)

    def write(self, out_dir, timestamp=None):
        """Write report.txt plus the CSV exports into ``out_dir``."""
        os.makedirs(out_dir, exist_ok=True)
        stamp = timestamp or datetime.datetime.now(datetime.timezone.utc).isoformat()
        with open(os.path.join(out_dir, "report.txt"), "w") as fh:
            fh.write(f"# written {stamp}\n")
            fh.write(self.body)
        ms.export_points(self.measure, os.path.join(out_dir, "points.csv"))
        if self.t is not None:
            emit_profile(self.measure, self.t, os.path.join(out_dir, "profile.csv"))
        if self.scan is not None:
            frames.export_scan(self.scan, os.path.join(out_dir, "scan.csv"))
        if self.plan is not None:
            sp.export_spectrum(self.plan, os.path.join(out_dir, "spectrum.csv"))


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SearchFailed:
        raise
    except (MultiTileError, ValueError, KeyError, TypeError) as exc:
        raise PipelineError(name, exc) from exc


def _base_spec(base, scale=1):
    spec = dict(base)
    if "nodes" in spec:
        nodes = [int(n) * scale for n in spec["nodes"]]
        spec["nodes"] = nodes[0] if len(nodes) == 1 else nodes
    if spec.get("kind") == "cantor4" and scale > 1:
        spec["depth"] = int(spec["depth"]) + 1
    if "atom" in spec:
        spec["atoms"] = spec.pop("atom")
    if "weight" in spec:
        spec["weights"] = spec.pop("weight")
    return spec


def _make_fields(comps, dim):
    out = []
    for comp in comps:
        params = {k: v for k, v in comp.items() if k != "field"}
        if "row" in params:
            params["rows"] = params.pop("row")
        out.append(ms.make_field(comp["field"], dim, **params))
    return out


def build_measure(cfg, scale=1):
    """Group, base measure and assembled multi-tile for a config."""
    gb = cfg.group
    G = _stage("group", grp.make_subgroup, gb["dim"], gb.get("h", []), gb.get("gamma", []),
               gb.get("tol", grp.DEFAULT_TOL))
    if cfg.base.get("kind") == "atomic" and scale > 1:
        return G, None
    base = _stage("base", ms.build_base_measure, _base_spec(cfg.base, scale), G)
    fields_ = _stage("assemble", _make_fields, cfg.components, G.dim)
    task = cfg.task
    m = _stage("assemble", ms.assemble_multitile, G, base, fields_,
               task.get("sep_tol", ms.DEFAULT_SEP_TOL), task.get("collision_budget", 0))
    return G, m


def _g(x):
    return f"{x:.12g}"


def _vecs(a):
    return "; ".join("(" + ", ".join(_g(v) for v in row) + ")" for row in np.atleast_2d(a))


def run_pipeline(cfg, force_all=None):
    """Run every stage on a config and return a :class:`ScenarioReport`."""
    task = cfg.task
    force_all = task.get("force_all", False) if force_all is None else force_all
    params = sp.SearchParams(seed=task.get("seed", 0), grid=task.get("grid", 64))
    lines = []
    L = lines.append

    G, m = build_measure(cfg)
    refined = build_measure(cfg, scale=2)[1] if task.get("refine", True) else None
    L("== scenario ==")
    L(f"name: {cfg.name}")
    if cfg.description:
        L(f"description: {cfg.description}")
    L(f"group: {G}")
    L(f"base: {m.base.kind}, {len(m.base)} nodes, mass {_g(m.base.total_mass)}")
    L(f"components: {m.N} ({', '.join(f.name for f in m.fields)})")
    L(f"bound M: {_g(m.M)}")
    L(f"collisions: {m.collisions}")
    L("")

    sep = _stage("separation", sp.min_separation, m,
                 task.get("threshold", sp.DEFAULT_THRESHOLD), refined)
    L("== separation [necessary condition] ==")
    L(f"global_min: {_g(sep.global_min)}")
    L(f"global_max: {_g(sep.global_max)}")
    if sep.refined_min is not None:
        L(f"refined_min: {_g(sep.refined_min)}")
        L(f"extrapolated_min: {_g(sep.extrapolated_min)}")
    L(f"threshold: {_g(sep.threshold)}")
    L(f"verdict: {sep.verdict}")
    L("")

    case = cert = failure = None
    L("== sufficiency [case analysis and vector existence] ==")
    if sep.passes or force_all:
        cover = _stage("cover", ms.difference_cover, m, task.get("chunk", 16))
        case = _stage("case", sp.classify_case, cover, G, sep, params)
        L(f"clusters R: {cover.R} (zero lattice part: {'yes' if cover.contains_zero_gamma else 'no'})")
        L(f"case: {case}")
        try:
            cert = _stage("search", sp.construct_v, cover, case, G, params)
        except SearchFailed as exc:
            failure = str(exc)
            L(f"search: failed ({failure})")
        if cert is not None:
            L(f"v: {_vecs(cert.v)}")
            L(f"eps1: {_g(cert.eps1)}")
            L(f"upper: {_g(cert.upper)}")
            if cert.witnesses:
                L(f"grid witnesses: min {_g(cert.witnesses['min_value'])}, "
                  f"max {_g(cert.witnesses['max_value'])} over {cert.witnesses['samples']} samples")
    else:
        L("skipped: necessary condition fails")
    L("")

    t = floor = None
    if cert is not None:
        t = sp.vandermonde_t(cert.v, m.N)
        floor = sp.det_floor(cert.eps1, m.N) if cert.eps1 > 0 else None
        source = "vandermonde t_j = (j-1) v"
    elif task.get("t"):
        t = np.asarray(task["t"], dtype=float)
        source = "probe translations from task block"

    profile = None
    L("== determinant profile [determinant condition] ==")
    if t is None:
        L("skipped: no translations")
    else:
        profile = _stage("profile", det.ess_inf_det, m, t)
        L(f"t ({source}): {_vecs(t)}")
        L(f"ess_inf: {_g(profile.ess_inf)}")
        L(f"argmin node: {profile.argmin} at {_vecs(profile.nodes[profile.argmin])}")
        L(f"sigma_min at argmin: {_g(profile.sigma_min)}")
        if floor is not None:
            ok = profile.ess_inf >= floor - FLOOR_SLACK
            L(f"det_floor: {_g(floor)} ({'holds' if ok else 'VIOLATED'})")
        if m.N >= 2:
            i = int(np.argmin(sep.per_node))
            eta = float(sep.per_node[i])
            bound = _stage("profile", det.lipschitz_det_bound, m, t, eta)
            L(f"lipschitz bound at separation {_g(eta)}: {_g(bound)} "
              f"(coarse constant {_g(det.coarse_lipschitz_constant(m.N, t, eta))})")
    L("")

    scan = plan = None
    L("== bound scan [finite sections] ==")
    K_list = task.get("K", [])
    if t is None or not K_list:
        L("skipped")
    elif not G.is_full_rank:
        L("skipped: dual group is not discrete")
    else:
        dual = grp.dual_group(G)
        base_spec = task.get("spectrum", "lattice")
        plan = _stage("scan", sp.structured_spectrum, dual, t, max(K_list), base=base_spec)
        scan = _stage("scan", frames.bound_convergence_scan, m, plan, K_list, refined)
        L(f"spectrum: {base_spec} truncations of the dual lattice, {m.N} translates")
        L("K, riesz_A, riesz_B, frame_A, frame_B, gram_drift")
        for r in scan.rows:
            L(", ".join([str(r.K)] + [_g(x) for x in
                                      (r.riesz_A, r.riesz_B, r.frame_A, r.frame_B, r.gram_drift)]))
        L("finite sections only: conclusions are consistency checks, not proofs")
    L("")

    if not sep.passes:
        verdict = "necessary-condition-fails"
    elif failure is not None:
        verdict = "sufficiency-search-failed"
    elif cert is not None and profile is not None and (floor is None or
                                                       profile.ess_inf >= floor - FLOOR_SLACK):
        verdict = "structured-basis-certified"
    else:
        verdict = "inconclusive"
    L("== verdict ==")
    L(verdict)
    body = "\n".join(lines) + "\n"
    return ScenarioReport(cfg.name, verdict, body, sep, case, cert, failure, t, profile,
                          floor, scan, m, plan)


def scenario(name, params=None, **overrides):
    """Run a builtin scenario.

    ``overrides`` may set ``nodes`` (base node count), ``seed`` and
    ``force_all``.
    """
    cfg = builtin_config(name, params)
    return run_pipeline(apply_overrides(cfg, **overrides), overrides.get("force_all"))


def apply_overrides(cfg, nodes=None, seed=None, force_all=None, **_):
    cfg = replace(cfg, base=dict(cfg.base), task=dict(cfg.task))
    if nodes is not None and "nodes" in cfg.base:
        cfg.base["nodes"] = [int(nodes)] * len(cfg.base["nodes"])
    if seed is not None:
        cfg.task["seed"] = int(seed)
    if force_all is not None:
        cfg.task["force_all"] = bool(force_all)
    return cfg


def run_config(path, **overrides):
    """Parse a config file and run the pipeline on it.

    Writes the report and CSV files when the config has an output
    directory (or ``out_dir`` is given).
    """
    cfg = apply_overrides(cfgmod.load_config(path), **overrides)
    report = run_pipeline(cfg, overrides.get("force_all"))
    out_dir = overrides.get("out_dir") or cfg.output.get("dir")
    if out_dir:
        report.write(out_dir)
    return report


def emit_profile(m, t, path):
    """Per-node CSV: x_1..x_d, min_sep, abs_det, sigma_min (12 significant digits)."""
    seps, abs_det, sigma = det.profile_table(m, t)
    header = [f"x_{i + 1}" for i in range(m.dim)] + ["min_sep", "abs_det", "sigma_min"]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for x, s, a, sg in zip(m.base.nodes, seps, abs_det, sigma):
            fh.write(",".join(_g(v) for v in (*x, s, a, sg)) + "\n")
