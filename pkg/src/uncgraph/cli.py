"""Command-line front end.

Subcommands::

    uncgraph anonymize --in graph.txt --scheme maxvar --np 20000 --parts 4 --seed 7 --out run/
    uncgraph sample --in run/uncertain.txt --n-samples 20 --seed 7 --out run/samples/
    uncgraph evaluate --true graph.txt --uncertain run/uncertain.txt --seed 7 --out run/
    uncgraph verify --level fast
    uncgraph partition-export --in graph.txt --parts 20 --seed 7 --out graph.part

Every subcommand also reads ``--config FILE``, a flat ``key = value`` file
whose keys are the long flag names (``n-samples`` or ``n_samples``). Flags
given on the command line override the file. Node ids in all written files
are the compact ids ``0..n-1`` assigned by the edge-list loader (ascending
original id).
"""
from __future__ import annotations

import argparse
import glob
import hashlib
import json
import logging
import os
import sys
import time

from . import __version__
from .exceptions import BudgetExceededError, GraphFormatError, ParameterError
from .graph import (
    load_edge_list,
    load_uncertain,
    sample_world,
    save_edge_list,
    save_uncertain,
    total_variance,
)
from .maxvar.partition import load_partition, partition_graph, save_partition
from .maxvar.qp import tv_upper_bound_maxvar
from .metrics.report import evaluate, write_long_csv, write_reports_csv
from .rng import RngStream
from .schemes.estimators import Mixture, Partitioned, make_scheme
from .schemes.obfuscation import truncated_normal_moments
from .schemes.randwalk import tv_upper_bound_rw

logger = logging.getLogger("uncgraph")

WORKERS_ENV = "UNCGRAPH_WORKERS"
SCHEMES = ("kobf", "randwalk", "randwalk-mod", "edgeswitch", "maxvar")

# estimator parameter -> command-line flag, for error messages
PARAM_FLAGS = {
    "sigma": "--sigma",
    "n_potential": "--np",
    "t": "--t",
    "alpha": "--alpha",
    "max_loops": "--max-loops",
    "method": "--method",
    "n_switches": "--n-switches",
    "n_parts": "--parts",
    "tol": "--tol",
    "p_mix": "--mix",
}


class CLIError(Exception):
    """User-facing error; printed without a traceback."""


# ---------------------------------------------------------------------------
# configuration


def read_config(path) -> list[str]:
    """Turn a ``key = value`` file into an argv fragment."""
    argv = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            if "=" not in s:
                raise CLIError(f"{path}:{lineno}: expected key = value, got {s!r}")
            key, value = (x.strip() for x in s.split("=", 1))
            flag = "--" + key.replace("_", "-")
            low = value.lower()
            if low in ("true", "yes", "on"):
                argv.append(flag)
            elif low in ("false", "no", "off"):
                continue
            else:
                argv.append(flag)
                argv.extend(value.split())
    return argv


def _config_path(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    return known.config


def _effective_config(args) -> dict:
    skip = {"func", "config", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _require_seed(args):
    if args.seed is None:
        raise CLIError("--seed is required for this command (no clock-based default)")


def _default_workers():
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise CLIError(f"{WORKERS_ENV}={raw!r} is not an integer") from None


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out_dir, command, args, extra):
    """Deterministic manifest plus a separate timing file.

    Wall time differs between reruns, so it is kept out of ``manifest.json``
    to leave every other artifact byte-identical.
    """
    manifest = {"command": command, "version": __version__, "config": _effective_config(args)}
    manifest.update(extra)
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)


def _write_timing(out_dir, seconds):
    _write_json(os.path.join(out_dir, "timing.json"), {"wall_time_s": round(seconds, 3)})


def _load_graph(path):
    if not os.path.exists(path):
        raise CLIError(f"input graph not found: {path}")
    return load_edge_list(path)


# ---------------------------------------------------------------------------
# anonymize


def _scheme_params(args):
    name = args.scheme
    if name == "kobf":
        return {"sigma": args.sigma, "n_potential": args.np}
    if name == "randwalk":
        return {"t": args.t, "max_loops": args.max_loops}
    if name == "randwalk-mod":
        return {"t": args.t, "alpha": args.alpha, "method": args.method}
    if name == "edgeswitch":
        return {"n_switches": args.n_switches, "strict": args.strict}
    return {"n_potential": args.np, "n_parts": args.parts, "tol": args.tol,
            "max_iter": args.max_iter, "n_jobs": args.jobs, "record": args.diagnostics}


def build_estimator(args, g=None):
    """Estimator for the parsed ``anonymize`` arguments."""
    params = {k: v for k, v in _scheme_params(args).items() if v is not None}
    est = make_scheme(args.scheme, random_state=args.seed, **params)
    partition = None
    if args.partition is not None:
        if g is None:
            raise CLIError("--partition needs the input graph")
        partition = load_partition(args.partition, g, args.parts)
    if args.scheme == "maxvar":
        est.set_params(partition=partition)
    elif args.parts is not None and args.parts > 1:
        est = Partitioned(base=est, n_parts=args.parts, partition=partition,
                          random_state=args.seed)
    if args.mix is not None:
        est = Mixture(base=est, p_mix=args.mix, random_state=args.seed)
    return est


def _flagged(exc: Exception) -> str:
    msg = str(exc)
    for param, flag in PARAM_FLAGS.items():
        if msg.startswith(param + "=") or msg.startswith(param + " "):
            return f"{flag}: {msg}"
    return msg


def _bounds(args, est, g, ug) -> dict:
    out = {}
    inner = est.base if isinstance(est, Mixture) else est
    if args.scheme == "maxvar" and args.mix is None:
        res = est.result_
        out["tv_bound_requested"] = tv_upper_bound_maxvar(g.m, args.np if args.np is not None else g.m)
        out["tv_bound"] = res.tv_bound()
        out["n_potential_added"] = res.n_potential
        out["converged"] = res.converged
        out["cut_edges"] = int(len(res.plan.cut_edges))
    elif args.scheme == "kobf" and not isinstance(inner, Partitioned) and args.mix is None:
        m1, m2 = truncated_normal_moments(args.sigma)
        n_p = g.m if args.np is None else args.np
        out["tv_expected"] = (g.m + n_p) * (m1 - m2)
    elif args.scheme == "randwalk-mod":
        out["expected_degree_preserving"] = bool(args.alpha == 0.5)
        if args.mix is None and not isinstance(inner, Partitioned):
            try:
                out["tv_bound"] = tv_upper_bound_rw(g, args.t)
            except BudgetExceededError as exc:
                out["tv_bound"] = None
                logger.warning("randwalk TV bound skipped: %s", exc)
    return out


def cmd_anonymize(args):
    _require_seed(args)
    if args.scheme not in SCHEMES:
        raise CLIError(f"unknown scheme {args.scheme!r}; choose from {', '.join(SCHEMES)}")
    t0 = time.perf_counter()
    g = _load_graph(args.input)
    try:
        est = build_estimator(args, g)
        ug = est.fit_transform(g)
    except ParameterError as exc:
        raise CLIError(_flagged(exc)) from None
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "uncertain.txt")
    save_uncertain(ug, out_path)
    if args.scheme == "maxvar" and args.diagnostics and args.mix is None:
        est.result_.write_diagnostics(os.path.join(args.out, "diagnostics.csv"))
    extra = {
        "input": {"path": args.input, "sha256": _sha256(args.input), "n": g.n, "m": g.m},
        "scheme": args.scheme,
        "params": _params_label(args),
        "seed": args.seed,
        "output": {"path": "uncertain.txt", "support_size": len(ug),
                   "relaxed": ug.allows_selfloops},
        "total_variance": total_variance(ug),
    }
    extra.update(_bounds(args, est, g, ug))
    _write_manifest(args.out, "anonymize", args, extra)
    seconds = time.perf_counter() - t0
    _write_timing(args.out, seconds)
    print(f"wrote {out_path}: n={ug.n} support={len(ug)} TV={extra['total_variance']:.6g} "
          f"({seconds:.1f}s)")
    return 0


def _params_label(args) -> str:
    params = {k: v for k, v in _scheme_params(args).items()
              if v is not None and k not in ("n_jobs", "record")}
    if args.scheme != "maxvar" and args.parts is not None and args.parts > 1:
        params["n_parts"] = args.parts
    if args.mix is not None:
        params["p_mix"] = args.mix
    return " ".join(f"{k}={v}" for k, v in params.items())


# ---------------------------------------------------------------------------
# sample


def sample_name(i: int, seed: int) -> str:
    return f"sample_{i:03d}_seed{seed}.txt"


def cmd_sample(args):
    _require_seed(args)
    if not os.path.exists(args.input):
        raise CLIError(f"uncertain graph not found: {args.input}")
    if args.n_samples < 1:
        raise CLIError("--n-samples must be >= 1")
    t0 = time.perf_counter()
    ug = load_uncertain(args.input)
    os.makedirs(args.out, exist_ok=True)
    names = []
    for i in range(args.n_samples):
        world = sample_world(ug, RngStream(args.seed, i + 1))
        name = sample_name(i, args.seed)
        save_edge_list(world, os.path.join(args.out, name))
        names.append(name)
    _write_manifest(args.out, "sample", args, {
        "input": {"path": args.input, "sha256": _sha256(args.input)},
        "seed": args.seed,
        "samples": names,
    })
    _write_timing(args.out, time.perf_counter() - t0)
    print(f"wrote {len(names)} samples to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# evaluate


def _labels_for(path):
    """Scheme and params from a manifest next to ``path``, if there is one."""
    man = os.path.join(os.path.dirname(os.path.abspath(path)), "manifest.json")
    if os.path.exists(man):
        with open(man, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        return data.get("scheme", ""), data.get("params", "")
    return "", ""


def _load_samples(paths, n):
    files = []
    for p in paths:
        if os.path.isdir(p):
            files.extend(sorted(glob.glob(os.path.join(p, "*.txt"))))
        else:
            files.append(p)
    if not files:
        raise CLIError("no sample files found")
    graphs = []
    for f in files:
        g = load_edge_list(f, compact=False, simple=False)
        if g.n != n:
            raise CLIError(f"{f}: {g.n} nodes, true graph has {n}")
        graphs.append(g)
    return graphs


def cmd_evaluate(args):
    _require_seed(args)
    if not args.uncertain and not args.samples:
        raise CLIError("give --uncertain FILE(S) or --samples FILES/DIR")
    t0 = time.perf_counter()
    g0 = _load_graph(args.true)
    ks = [int(k) for k in args.ks.split(",")] if args.ks else []
    outputs = []
    for path in args.uncertain or []:
        if not os.path.exists(path):
            raise CLIError(f"uncertain graph not found: {path}")
        ug = load_uncertain(path, n=g0.n)
        if ug.n != g0.n:
            raise CLIError(f"{path}: {ug.n} nodes, true graph has {g0.n}")
        outputs.append((path, ug))
    if args.samples:
        outputs.append((args.samples[0], _load_samples(args.samples, g0.n)))
    reports, true_stats = [], None
    for idx, (path, out) in enumerate(outputs):
        scheme, params = _labels_for(path)
        rep = evaluate(g0, out, args.n_samples, ks, RngStream(args.seed, idx),
                       scheme=args.scheme or scheme, params=args.params or params,
                       n_sources=args.n_sources, true_stats=true_stats)
        true_stats = rep.true_stats
        reports.append(rep)
    os.makedirs(args.out, exist_ok=True)
    header = write_reports_csv(reports, os.path.join(args.out, "report.csv"), ks)
    write_long_csv(reports, os.path.join(args.out, "report_long.csv"))
    true_row = {"scheme": "true", **true_stats.as_dict(),
                "H1": reports[0].true_H1, "H2_open": reports[0].true_H2_open}
    _write_manifest(args.out, "evaluate", args, {
        "true": {"path": args.true, "sha256": _sha256(args.true), "n": g0.n, "m": g0.m},
        "inputs": [p for p, _ in outputs],
        "columns": header,
        "true_stats": true_row,
    })
    _write_timing(args.out, time.perf_counter() - t0)
    for rep in reports:
        print(f"{rep.scheme or '-'} [{rep.params}]: H1={rep.H1:.1f} H2_open={rep.H2_open:.1f} "
              f"rel_err={rep.rel_err:.4f} tradeoff={rep.tradeoff:.4f}")
    return 0


# ---------------------------------------------------------------------------
# verify and partition-export


def cmd_verify(args):
    from .verify import format_table, run_checks

    results = run_checks(args.level, seed=args.seed if args.seed is not None else 0,
                         inject_alpha=args.inject_alpha,
                         only=set(args.check) if args.check else None)
    print(format_table(results))
    failed = [r.name for r in results if not r.skipped and not r.passed]
    if failed:
        print(f"FAILED: {', '.join(failed)}")
        return 1
    print("all checks passed")
    return 0


def cmd_partition_export(args):
    _require_seed(args)
    g = _load_graph(args.input)
    if args.parts < 1:
        raise CLIError("--parts must be >= 1")
    if args.parts > g.n:
        raise CLIError(f"--parts={args.parts} exceeds the {g.n} nodes")
    plan = partition_graph(g, args.parts, RngStream(args.seed), imbalance=args.imbalance)
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    save_partition(plan, args.out)
    sizes = plan.sizes
    print(f"wrote {args.out}: {args.parts} parts, sizes {int(sizes.min())}..{int(sizes.max())}, "
          f"cut edges {len(plan.cut_edges)} of {g.m} ({len(plan.cut_edges) / max(g.m, 1):.1%})")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uncgraph",
        description="Anonymize graphs as uncertain graphs and score privacy/utility.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value file; command-line flags override it")
        p.add_argument("--seed", type=int, help="master seed (required for randomized commands)")
        p.add_argument("-v", "--verbose", action="count", default=0)

    p = sub.add_parser("anonymize", help="run a scheme and write an uncertain graph")
    common(p)
    p.add_argument("--in", dest="input", required=True, help="edge list 'u v'")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--scheme", required=True, help=f"one of {', '.join(SCHEMES)}")
    p.add_argument("--np", type=int, help="number of potential edges (default: m)")
    p.add_argument("--parts", type=int, help="number of parts s")
    p.add_argument("--partition", help="precomputed partition file, one part id per line")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--t", type=int, default=None, help="walk length")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--method", choices=("sample", "matrix"), default=None,
                   help="randwalk-mod: one rewired graph or the expected matrix")
    p.add_argument("--max-loops", type=int, default=None)
    p.add_argument("--n-switches", type=int, default=None)
    p.add_argument("--strict", action="store_true", default=None)
    p.add_argument("--mix", type=float, default=None,
                   help="mix the output with the true graph: (1-mix) A0 + mix A")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None,
                   help=f"parallel parts (default: ${WORKERS_ENV} or 1)")
    p.add_argument("--diagnostics", action="store_true", default=None,
                   help="maxvar: write per-iteration solver residuals to diagnostics.csv")
    p.set_defaults(func=cmd_anonymize)

    p = sub.add_parser("sample", help="draw possible worlds from an uncertain graph")
    common(p)
    p.add_argument("--in", dest="input", required=True, help="uncertain graph 'u v p'")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n-samples", type=int, default=20)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("evaluate", help="privacy/utility report against the true graph")
    common(p)
    p.add_argument("--true", required=True, help="true graph edge list")
    p.add_argument("--uncertain", nargs="+", help="uncertain graph file(s), one report row each")
    p.add_argument("--samples", nargs="+", help="sampled graph files or a directory of them")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n-samples", type=int, default=20)
    p.add_argument("--ks", default="30,50,100", help="comma separated k values for eps columns")
    p.add_argument("--n-sources", type=int, default=1000, help="BFS sources for the diameter bound")
    p.add_argument("--scheme", default=None, help="label for the scheme column")
    p.add_argument("--params", default=None, help="label for the params column")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("verify", help="run the analytic self-checks")
    common(p)
    p.add_argument("--level", choices=("fast", "full"), default="full")
    p.add_argument("--inject-alpha", type=float, default=None,
                   help="negative control: use this alpha in the expected-degree check")
    p.add_argument("--check", action="append", help="run only the named check(s)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("partition-export", help="compute and save a node partition")
    common(p)
    p.add_argument("--in", dest="input", required=True, help="edge list 'u v'")
    p.add_argument("--out", required=True, help="partition file (one part id per line)")
    p.add_argument("--parts", type=int, required=True)
    p.add_argument("--imbalance", type=float, default=0.05)
    p.set_defaults(func=cmd_partition_export)
    return parser


def _finalize(args):
    if getattr(args, "command", None) == "anonymize":
        if args.jobs is None:
            args.jobs = _default_workers()
        if args.scheme == "kobf" and args.sigma is None:
            args.sigma = 0.01
        if args.scheme in ("randwalk", "randwalk-mod") and args.t is None:
            args.t = 2
        if args.scheme == "randwalk-mod":
            args.alpha = 0.5 if args.alpha is None else args.alpha
            args.method = args.method or "sample"
        if args.scheme == "edgeswitch" and args.n_switches is None:
            raise CLIError("--n-switches is required for edgeswitch")
        args.strict = bool(args.strict) if args.scheme == "edgeswitch" else None
        args.diagnostics = bool(args.diagnostics) if args.scheme == "maxvar" else None
        if args.scheme != "maxvar":
            args.jobs = None if args.parts is None else args.jobs
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        cfg = _config_path(argv)
        if cfg is not None and argv and not argv[0].startswith("-"):
            if not os.path.exists(cfg):
                raise CLIError(f"config file not found: {cfg}")
            # file values first so later command-line occurrences win
            argv = argv[:1] + read_config(cfg) + argv[1:]
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(_finalize(args))
    except (CLIError, GraphFormatError, FileNotFoundError) as exc:
        print(f"uncgraph: error: {exc}", file=sys.stderr)
        return 2
    except ParameterError as exc:
        print(f"uncgraph: error: {_flagged(exc)}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
