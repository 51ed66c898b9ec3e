"""``multitile`` command line.

Exit status is 0 whenever a pipeline completes, whatever its verdict;
2 for unreadable input (config syntax, unknown scenario, bad parameters);
3 when a pipeline stage fails.
"""

import argparse
import os
import sys

import numpy as np

from . import config as cfgmod
from . import frames
from . import scenarios as S
from .errors import BadParams, MultiTileError, ParseError, UnknownScenario

EXIT_OK, EXIT_PARSE, EXIT_PIPELINE = 0, 2, 3


def _vectors(text):
    try:
        return [[cfgmod._real(x) for x in part.split(",")] for part in text.split(";") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad vector list {text!r}: {exc}") from None


def _ints(text):
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _param(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nodes", type=int, help="override the base node count")
    common.add_argument("--seed", type=int, help="seed for the randomized searches")
    common.add_argument("--out-dir", help="write report.txt and CSV files here")
    common.add_argument("--force-all", action="store_true", default=None,
                        help="run the sufficiency stages even when separation fails")

    parser = argparse.ArgumentParser(prog="multitile",
                                     description="Structured Riesz bases for multi-tiling measures.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("scenario", parents=[common], help="run a builtin scenario")
    p.add_argument("name", help=", ".join(S.BUILTINS))
    p.add_argument("--param", type=_param, action="append", default=[], metavar="K=V")

    p = sub.add_parser("check", parents=[common], help="run the full pipeline on a config file")
    p.add_argument("config")

    p = sub.add_parser("profile", parents=[common], help="per-node determinant profile CSV")
    p.add_argument("config")
    p.add_argument("--t", type=_vectors, required=True, metavar="VEC;VEC;...")

    p = sub.add_parser("scan", parents=[common], help="Riesz and frame bound scan CSV")
    p.add_argument("config")
    p.add_argument("--K", type=_ints, required=True, metavar="K1,K2,...")
    return parser


def _overrides(args):
    return {"nodes": args.nodes, "seed": args.seed, "force_all": args.force_all}


def _load(args):
    return S.apply_overrides(cfgmod.load_config(args.config), **_overrides(args))


def _cmd_scenario(args, out):
    cfg = S.apply_overrides(S.builtin_config(args.name, dict(args.param)), **_overrides(args))
    report = S.run_pipeline(cfg, args.force_all)
    if args.out_dir:
        report.write(args.out_dir)
    out.write(report.body)


def _cmd_check(args, out):
    cfg = _load(args)
    report = S.run_pipeline(cfg, args.force_all)
    out_dir = args.out_dir or cfg.output.get("dir")
    if out_dir:
        report.write(out_dir)
    out.write(report.body)


def _cmd_profile(args, out):
    cfg = _load(args)
    _, m = S.build_measure(cfg)
    t = np.asarray(args.t, dtype=float)
    if t.ndim != 2 or t.shape != (m.N, m.dim):
        raise BadParams(f"--t needs {m.N} vectors of length {m.dim}")
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, "profile.csv")
        S.emit_profile(m, t, path)
        out.write(f"wrote {path}\n")
    else:
        import tempfile
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "profile.csv")
            S.emit_profile(m, t, path)
            with open(path) as fh:
                out.write(fh.read())


def _cmd_scan(args, out):
    cfg = _load(args)
    cfg.task["K"] = list(args.K)
    report = S.run_pipeline(cfg, args.force_all)
    if report.scan is None:
        raise BadParams("no translations available for a scan (no certificate and no 't' in [task])")
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, "scan.csv")
        frames.export_scan(report.scan, path)
        out.write(f"wrote {path}\n")
    else:
        out.write("K,riesz_A,riesz_B,frame_A,frame_B,gram_drift\n")
        for r in report.scan.rows:
            out.write(",".join([str(r.K)] + [f"{v:.12g}" for v in
                                             (r.riesz_A, r.riesz_B, r.frame_A, r.frame_B,
                                              r.gram_drift)]) + "\n")


COMMANDS = {"scenario": _cmd_scenario, "check": _cmd_check,
            "profile": _cmd_profile, "scan": _cmd_scan}


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    try:
        COMMANDS[args.verb](args, out)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (UnknownScenario, BadParams) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PARSE
    except (MultiTileError, OSError) as exc:
        err.write(f"pipeline error: {exc}\n")
        return EXIT_PIPELINE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
