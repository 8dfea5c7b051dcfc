"""Command-line entry point.

Exit codes: 0 success, 1 a checked invariant failed, 2 bad input or arguments.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import calibration, generators
from .decomposition import DecompositionConfig, charge_audit, expander_decomposition
from .directed import DirectedConfig, directed_sparsify
from .hypercore import DirectedHypergraph, HypergraphError
from .io import ParseError, read_any, read_hypergraph, write_directed, write_hypergraph
from .lowerbound import (
    RSGraph,
    audit_scs,
    decode,
    disjoint_blocks,
    encode,
    gen_rs_greedy,
    random_string,
    sketch_cut_fn,
    validate_rs,
)
from .oracle import cheeger_check, evaluate_sparsifier, random_test_vectors
from .pipeline import PipelineConfig, run_report, sparsify
from .rng import generator
from .schema import envelope

log = logging.getLogger("hypersparse")

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2

UNDIRECTED_MODELS = ("complete", "uniform", "weighted", "mixed", "bridge", "path")
DIRECTED_MODELS = ("bipartite-clique", "random-directed", "block-directed", "two-scale")


class InputError(Exception):
    pass


def _setup_logging() -> None:
    level = os.environ.get("HYPERSPARSE_LOG", "error").lower()
    lv = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(level)
    if lv is None:
        raise InputError(f"HYPERSPARSE_LOG must be one of error, info, debug; got {level!r}")
    logging.basicConfig(level=lv, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _emit(args, rep: dict, rows: list[dict] | None = None) -> int:
    text = json.dumps(rep, indent=2, sort_keys=True)
    if getattr(args, "report", None):
        if args.report == "-":
            print(text)
        else:
            with open(args.report, "w") as fh:
                fh.write(text + "\n")
    if getattr(args, "csv", None) and rows:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            w.writeheader()
            w.writerows(rows)
    status = "ok" if rep["ok"] else "FAILED: " + "; ".join(rep["violations"])
    print(f"{rep['command']}: {status}", file=sys.stderr)
    return EXIT_OK if rep["ok"] else EXIT_VIOLATION


def _say(args, msg: str) -> None:
    """Human-readable line; goes to stderr when stdout carries a report or a hypergraph."""
    data_on_stdout = getattr(args, "report", None) == "-" or (
        getattr(args, "func", None) is cmd_gen and not args.output
    )
    print(msg, file=sys.stderr if data_on_stdout else sys.stdout)


def _seed(args) -> int:
    _say(args, f"seed: {args.seed}")
    return args.seed


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _epsilon(s: str) -> float:
    v = float(s)
    if not 0 < v <= 0.5:
        raise argparse.ArgumentTypeError("epsilon must lie in (0, 1/2]")
    return v


def _positive(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


# -- gen ----------------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.report == "-" and not args.output:
        raise InputError("--report - needs -o, since the hypergraph itself goes to stdout")
    seed = _seed(args)
    need = {"uniform": ("n", "m", "r"), "weighted": ("n", "m", "r"), "mixed": ("n", "m", "r"),
            "complete": ("n", "r"), "path": ("m",), "bipartite-clique": ("n",), "random-directed": ("n", "m")}
    for k in need.get(args.model, ()):
        if getattr(args, k) is None:
            raise InputError(f"model {args.model} requires -{k}")
    m = args.model
    if m == "complete":
        g = generators.complete_uniform(args.n, args.r)
    elif m == "uniform":
        g = generators.random_uniform(args.n, args.m, args.r, seed)
    elif m == "weighted":
        g = generators.random_weighted(args.n, args.m, args.r, seed)
    elif m == "mixed":
        g = generators.random_mixed(args.n, args.m, args.r, seed)
    elif m == "bridge":
        g = generators.bridge(args.k or 6, args.r or 3)
    elif m == "path":
        g = generators.path(args.m, args.r or 2)
    elif m == "bipartite-clique":
        g = generators.bipartite_clique(args.n)
    elif m == "random-directed":
        g = generators.random_directed(args.n, args.m, args.r or 3, seed)
    elif m == "block-directed":
        g = generators.block_directed(args.n or 10, args.blocks, seed, args.density)
    else:
        g = generators.two_scale_overlap()
    if isinstance(g, DirectedHypergraph):
        write_directed(g, args.output or sys.stdout)
    else:
        write_hypergraph(g, args.output or sys.stdout)
    rep = envelope("gen", {"model": m, "n": g.n, "m": g.m, "output": args.output}, seed)
    return _emit(args, rep)


# -- sparsify -----------------------------------------------------------------------


def cmd_sparsify(args) -> int:
    seed = _seed(args)
    g = read_any(args.input)
    directed = isinstance(g, DirectedHypergraph)
    if args.directed and not directed:
        raise InputError("--directed needs a .dhgr input")
    rows = []
    if directed:
        run = directed_sparsify(g, DirectedConfig(epsilon=args.eps, p_c=args.p_c, seed=seed))
        sp = run.sparsifier
        info = run.report()
        viol = []
        if info["inverse_overlap_sum"] > info["inverse_overlap_bound"] + 1e-9:
            viol.append("inverse overlap sum exceeds n^2")
        if info["band_count"] > info["band_bound"] + 1e-9:
            viol.append("band count exceeds r log2 n")
        result = {"n": g.n, "m": g.m, "size": sp.size, "directed": True, "bands": info["bands"],
                  "inverse_overlap_sum": info["inverse_overlap_sum"], "inverse_overlap_bound": info["inverse_overlap_bound"],
                  "precondition_11r_le_sqrt_eps_n": info["precondition_11r_le_sqrt_eps_n"]}
        rows = [dict(band=i, **b) for i, b in enumerate(info["bands"])]
        params = {"epsilon": args.eps, "p_c": args.p_c}
    else:
        cfg = PipelineConfig(epsilon=args.eps, seed=seed, delay=args.delay, level_cap=args.level_cap,
                             lambda_c=args.lambda_c, K=args.K, jobs=args.jobs, certify=args.certify)
        run = sparsify(g, cfg)
        sp = run.sparsifier
        rr = run_report(run)
        checks = rr["checks"]
        viol = [f"check {k} failed" for k, ok in checks.items() if not ok]
        result = {"n": g.n, "m": g.m, "size": sp.size, "directed": False, "levels": rr["levels"],
                  "checks": checks, "census": rr["census"], "complete": rr["complete"], "delay": rr["delay"],
                  "level_cap": rr["level_cap"]}
        rows = [{k: v for k, v in lev.items() if k != "cluster_sizes"} for lev in rr["levels"]]
        params = {"epsilon": args.eps, "lambda_c": args.lambda_c, "K": args.K, "delay": rr["delay"]}
    result["output"] = args.output
    if args.output:
        tg = sp.as_graph()
        (write_directed if directed else write_hypergraph)(tg, args.output, weighted=True)
    _say(args, f"kept {sp.size} of {g.m} edges")
    return _emit(args, envelope("sparsify", result, seed, viol, params), rows)


# -- decompose ----------------------------------------------------------------------


def cmd_decompose(args) -> int:
    seed = _seed(args)
    h = read_hypergraph(args.input)
    dec = expander_decomposition(h, DecompositionConfig(K=args.K, seed=seed, phi_target=args.phi, certify=not args.no_certify))
    viol = dec.violations(h)
    audit = charge_audit(dec, h)
    result = {
        "n": h.n, "m": h.m, "clusters": dec.clusters, "retained": dec.retained, "removed": dec.removed,
        "discarded": dec.discarded, "phi_target": dec.phi_target, "degree_threshold": dec.degree_threshold,
        "removed_fraction": dec.removed_fraction, "iterations": dec.iterations,
        "certificates": [c.__dict__ for c in dec.certificates], "charge_audit": audit.to_dict(),
    }
    rows = [{"cluster": i, "size": len(c), "edges": len(e), "certificate": cert.level, "phi": cert.phi}
            for i, (c, e, cert) in enumerate(zip(dec.clusters, dec.retained, dec.certificates))]
    _say(args, f"{len(dec.clusters)} clusters, removed fraction {dec.removed_fraction:.4f}")
    return _emit(args, envelope("decompose", result, seed, viol, {"K": args.K}), rows)


# -- eval / cheeger -------------------------------------------------------------------


def cmd_eval(args) -> int:
    seed = _seed(args)
    g = read_any(args.input)
    t = read_any(args.sparsifier)
    if type(g) is not type(t) or g.n != t.n:
        raise InputError("sparsifier must be the same kind of hypergraph on the same vertex set")
    from .hypercore import Sparsifier

    # a sparsifier file is a standalone weighted hypergraph; compare it via an identity wrapper
    sp = Sparsifier(t, [(e, float(w)) for e, w in enumerate(t.weights)])
    rep = evaluate_sparsifier(g, sp, args.eps, all_cuts=args.all_cuts, samples=args.samples, seed=seed)
    d = rep.to_dict()
    d["size"], d["parent_size"] = t.m, g.m
    viol = [f"{rep.violations} (1 +- eps) violations"] if rep.violations else []
    _say(args, f"violations: {rep.violations}, worst deviation {rep.worst_deviation:.4f}")
    return _emit(args, envelope("eval", d, seed, viol, {"epsilon": args.eps}), [d])


def cmd_cheeger(args) -> int:
    seed = _seed(args)
    h = read_hypergraph(args.input)
    xs = random_test_vectors(h, args.samples, seed)
    reps = [cheeger_check(h, x) for x in xs]
    fails = sum(not r.passed for r in reps)
    rows = [{"sample": i, "lhs": r.lhs, "rhs": r.rhs, "passed": r.passed} for i, r in enumerate(reps)]
    result = {"samples": len(reps), "failures": fails, "phi": reps[0].phi if reps else None,
              "r": h.rank, "min_slack": min((r.slack for r in reps), default=None)}
    _say(args, f"{fails} failures over {len(reps)} vectors")
    viol = [f"{fails} Cheeger violations"] if fails else []
    return _emit(args, envelope("cheeger-check", result, seed, viol), rows)


# -- lowerbound ------------------------------------------------------------------------


def _load_rs(path: str) -> RSGraph:
    try:
        with open(path) as fh:
            d = json.load(fh)
        return RSGraph.from_dict(d["rs"] if "rs" in d else d)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read RS graph from {path}: {exc}") from exc


def _load_instance(path: str):
    try:
        with open(path) as fh:
            d = json.load(fh)
        return RSGraph.from_dict(d["rs"]), np.asarray(d["s"], dtype=np.uint8)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read encoded instance from {path}: {exc}") from exc


def _parse_bits(text: str) -> np.ndarray:
    if set(text) - {"0", "1"}:
        raise InputError("string must consist of 0 and 1")
    return np.array([int(c) for c in text], dtype=np.uint8)


def cmd_lb_gen(args) -> int:
    seed = _seed(args)
    g = disjoint_blocks(args.t, args.a) if args.blocks else gen_rs_greedy(args.n, args.t, args.a, seed)
    ok, why = validate_rs(g)
    d = g.to_dict()
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(d, fh)
    result = {"n": g.n, "t": g.t, "a": g.a, "min_degree": int(g.degrees.min()), "output": args.output}
    return _emit(args, envelope("lowerbound gen-rs", result, seed, [] if ok else [why]))


def cmd_lb_encode(args) -> int:
    seed = _seed(args)
    g = _load_rs(args.rs)
    ell = 2 * g.t * g.a
    s = _parse_bits(args.string) if args.string else random_string(ell, seed)
    inst = encode(g, s)
    if args.output:
        with open(args.output, "w") as fh:
            json.dump({"rs": g.to_dict(), "s": s.tolist()}, fh)
    if args.hypergraph:
        write_hypergraph(inst.hyper, args.hypergraph)
    result = {"ell": ell, "ones": int(s.sum()), "n": inst.hyper.n, "m": inst.hyper.m,
              "max_edge_size": inst.hyper.rank, "output": args.output}
    viol = [] if inst.hyper.rank <= g.t + 1 else ["hyperedge larger than t + 1"]
    return _emit(args, envelope("lowerbound encode", result, seed, viol))


def cmd_lb_decode(args) -> int:
    seed = _seed(args)
    g, s = _load_instance(args.instance)
    inst = encode(g, s)
    if args.query is not None:
        q = [int(x) for x in args.query.split(",") if x.strip()]
    else:
        q = np.flatnonzero(generator(seed).random(inst.ell) < args.density).tolist()
    fn = None
    if args.sketch:
        t = read_hypergraph(args.sketch)
        from .hypercore import Sparsifier

        fn = sketch_cut_fn(Sparsifier(t, [(e, float(w)) for e, w in enumerate(t.weights)]))
    res = decode(inst, q, fn)
    truth = int(s[q].sum()) if q else 0
    result = {"query_size": len(q), "estimate": res.estimate, "raw": res.raw, "truth": truth,
              "error": abs(res.estimate - truth), "clamped": res.clamped}
    _say(args, f"estimate {res.estimate} (truth {truth})")
    return _emit(args, envelope("lowerbound decode", result, seed))


def cmd_lb_audit(args) -> int:
    seed = _seed(args)
    g = _load_rs(args.rs)
    rep = audit_scs(g, args.trials, seed, jobs=args.jobs)
    d = rep.to_dict()
    rows = [{"trial": i, "error": e, "good_set_error": ge} for i, (e, ge) in enumerate(zip(rep.errors, rep.good_errors))]
    _say(args, f"{rep.within_bound} of {rep.trials} trials within {rep.bound:.1f}")
    return _emit(args, envelope("lowerbound audit", d, seed), rows)


# -- calibrate ---------------------------------------------------------------------------


def cmd_calibrate(args) -> int:
    seeds = range(args.seeds)
    if args.target == "cut-ratio":
        r = calibration.cut_ratios(seeds)
        worst = max(r, default=0.0)
        result = {"target": "cut-ratio", "max_ratio": worst, "recorded": calibration.C_CAL, "instances": len(r)}
        viol = [] if worst <= calibration.C_CAL else [f"measured ratio {worst:.3f} exceeds C_CAL"]
        return _emit(args, envelope("calibrate", result, None, viol))
    vals = args.values or {"lambda": [calibration.LAMBDA_C], "p_c": [calibration.P_C], "K": [calibration.K]}[args.target]
    fn = {"lambda": calibration.lambda_sweep, "p_c": calibration.p_c_sweep, "K": calibration.k_sweep}[args.target]
    pts = [p.to_dict() for p in fn(vals, seeds)]
    for p in pts:
        _say(args, f"{args.target}={p['value']:g}: {p['failing']}/{p['trials']} failing, mean size {p['mean_size']:.2f}")
    return _emit(args, envelope("calibrate", {"target": args.target, "points": pts}, None), pts)


# -- parser ---------------------------------------------------------------------------


def _common(p, seed=True):
    if seed:
        p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--report", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--csv", help="write tabular rows here")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypersparse", description="Hypergraph sparsification toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("--model", choices=UNDIRECTED_MODELS + DIRECTED_MODELS, required=True)
    p.add_argument("-n", type=_positive_int)
    p.add_argument("-m", type=_positive_int)
    p.add_argument("-r", type=_positive_int)
    p.add_argument("-k", type=_positive_int, help="component size for the bridge model")
    p.add_argument("--blocks", type=_positive_int, default=2)
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument("-o", "--output")
    _common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sparsify", help="sparsify a .hgr or .dhgr file")
    p.add_argument("input")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--eps", type=_epsilon, default=0.5)
    p.add_argument("--lambda-c", type=_positive, default=calibration.LAMBDA_C)
    p.add_argument("--p-c", type=_positive, default=calibration.P_C)
    p.add_argument("-K", type=_positive, default=calibration.K)
    p.add_argument("--delay", type=_positive_int)
    p.add_argument("--level-cap", type=_positive_int)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--certify", action="store_true", help="brute-force certify small clusters")
    p.add_argument("-o", "--output")
    _common(p)
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("decompose", help="expander decomposition")
    p.add_argument("input")
    p.add_argument("-K", type=_positive, default=calibration.K)
    p.add_argument("--phi", type=_positive)
    p.add_argument("--no-certify", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("eval", help="compare a sparsifier against its parent")
    p.add_argument("input")
    p.add_argument("sparsifier")
    p.add_argument("--eps", type=_epsilon, default=0.5)
    p.add_argument("--all-cuts", action="store_true")
    p.add_argument("--samples", type=_nonneg_int, default=0)
    _common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("cheeger-check", help="check the hypergraph Cheeger inequality on random vectors")
    p.add_argument("input")
    p.add_argument("--samples", type=_positive_int, default=100)
    _common(p)
    p.set_defaults(func=cmd_cheeger)

    lb = sub.add_parser("lowerbound", help="RS-graph string compression demo")
    lsub = lb.add_subparsers(dest="lb_command", required=True)
    p = lsub.add_parser("gen-rs")
    p.add_argument("-n", type=_positive_int, default=24)
    p.add_argument("-t", type=_positive_int, default=20)
    p.add_argument("-a", type=_positive_int, default=3)
    p.add_argument("--blocks", action="store_true", help="disjoint-blocks preset instead of greedy packing")
    p.add_argument("-o", "--output")
    _common(p)
    p.set_defaults(func=cmd_lb_gen)
    p = lsub.add_parser("encode")
    p.add_argument("rs")
    p.add_argument("--string", help="bit string; random when omitted")
    p.add_argument("-o", "--output", help="instance JSON")
    p.add_argument("--hypergraph", help="write H_s as .hgr")
    _common(p)
    p.set_defaults(func=cmd_lb_encode)
    p = lsub.add_parser("decode")
    p.add_argument("instance")
    p.add_argument("--query", help="comma-separated coordinates; random when omitted")
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--sketch", help="answer cuts from this sparsifier file instead of exactly")
    _common(p)
    p.set_defaults(func=cmd_lb_decode)
    p = lsub.add_parser("audit")
    p.add_argument("rs")
    p.add_argument("--trials", type=_positive_int, default=200)
    p.add_argument("--jobs", type=_positive_int, default=1)
    _common(p)
    p.set_defaults(func=cmd_lb_audit)

    p = sub.add_parser("calibrate", help="rerun a calibration sweep")
    p.add_argument("target", choices=("lambda", "p_c", "K", "cut-ratio"))
    p.add_argument("--seeds", type=_positive_int, default=20)
    p.add_argument("--values", type=_positive, nargs="+")
    _common(p, seed=False)
    p.set_defaults(func=cmd_calibrate)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        _setup_logging()
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, HypergraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
