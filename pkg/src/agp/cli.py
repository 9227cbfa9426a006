"""Command-line entry point: ``agp <subcommand> ...``.

Exit codes: 0 success, 1 usage/configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import time

import numpy as np

from . import __version__
from .basic import basic_propagate, uniform_signal
from .clustering import normalize_scores, sweep_cut
from .errors import AGPError, ConfigError, DataError
from .evaluation import evaluate, fixed_walk_length, mc_hkpr
from .features import propagate_features, read_matrix, write_matrix
from .graph import load_graph, reorient, save_csr, write_mapping
from .io import dense_from_map, format_value, read_vector, write_vector
from .randomized import RandomizedConfig, randomized_propagate
from .weights import KINDS, scheme_from_options, select_level_count


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _graph_args(p, required=True):
    p.add_argument("--graph", required=required, help="edge list or AGPCSR1 file")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--self-loops", action="store_true", help="attach one self-loop per node")


def _measure_args(p, default=None):
    p.add_argument("--measure", default=default, required=default is None,
                   choices=[k.replace("_", "-") for k in KINDS] + list(KINDS))
    p.add_argument("--alpha", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--lambda1", type=float)
    p.add_argument("--hops", type=int)
    p.add_argument("--weights", help="custom weights w0,w1,...")
    p.add_argument("--a", type=float, help="override the measure's left exponent")
    p.add_argument("--b", type=float, help="override the measure's right exponent")


def _signal_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--source", type=int, help="original id of the source node")
    g.add_argument("--signal", help="'node value' file with the graph signal")


def _random_args(p, delta_required=False):
    p.add_argument("--delta", type=float, required=delta_required)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--levels", type=int)
    p.add_argument("--policy", choices=["scan", "bisect"], default="scan")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="agp", description="approximate graph propagation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("propagate", help="randomized propagation")
    _graph_args(p)
    _measure_args(p)
    _signal_args(p)
    _random_args(p)
    p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("groundtruth", help="exact propagation")
    _graph_args(p)
    _measure_args(p)
    _signal_args(p)
    p.add_argument("--levels", type=int, default=50)
    p.add_argument("--out")

    p = sub.add_parser("cluster", help="sweep-cut local clustering")
    _graph_args(p)
    _measure_args(p, default="hkpr")
    _signal_args(p)
    _random_args(p)
    p.add_argument("--exact", action="store_true", help="use the exact engine")
    p.add_argument("--max-prefix", type=int)
    p.add_argument("--curve", help="write the conductance curve as CSV")
    p.add_argument("--out")

    p = sub.add_parser("features", help="propagate a feature matrix column-wise")
    _graph_args(p)
    _measure_args(p)
    _random_args(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="compare an estimate with ground truth")
    _graph_args(p, required=False)
    p.add_argument("--truth", required=True)
    p.add_argument("--est", required=True)
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("mc", help="Monte-Carlo heat kernel PageRank")
    _graph_args(p)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--t", type=float, default=5.0)
    p.add_argument("--walks", type=int, default=100000)
    p.add_argument("--fixed-len", type=int)
    p.add_argument("--delta", type=float, help="derive a common walk length from delta")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("convert", help="edge list <-> binary CSR")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--self-loops", action="store_true")
    p.add_argument("--mode", choices=["source", "target"])
    p.add_argument("--mapping", help="write the dense->original id mapping here")

    p = sub.add_parser("tradeoff", help="MaxError vs push count over a delta sweep")
    _graph_args(p)
    _measure_args(p, default="hkpr")
    _signal_args(p)
    p.add_argument("--deltas", default="1e-1,1e-2,1e-3,1e-4,1e-5,1e-6")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--out")
    return parser


def _scheme(args):
    measure = args.measure
    if measure in ("hkpr",) and args.t is None:
        args.t = 5.0
    return scheme_from_options(
        measure, alpha=args.alpha, t=args.t, beta=args.beta, lambda1=args.lambda1,
        hops=args.hops, weights=args.weights, a=args.a, b=args.b,
    )


def _load(args, scheme=None):
    mode = None
    if args.directed and scheme is not None:
        mode = "target" if scheme.kind == "single_target_ppr" else "source"
    g = load_graph(args.graph, directed=args.directed, add_self_loops=args.self_loops, mode=mode)
    if g.directed and mode is not None and g.mode != mode:
        g = reorient(g, mode)
    return g


def _signal(args, g, scheme):
    if getattr(args, "source", None) is not None:
        try:
            return g.index_of(args.source)
        except KeyError:
            raise DataError(f"source {args.source} is not a node of the graph") from None
    if getattr(args, "signal", None):
        values, _ = read_vector(args.signal)
        try:
            return dense_from_map(g, values)
        except KeyError as exc:
            raise DataError(f"signal names unknown node {exc}") from None
    if scheme.kind == "pagerank":
        return uniform_signal(g)
    raise ConfigError("need --source or --signal")


def _levels(args, scheme):
    if args.levels is not None:
        return args.levels
    if scheme.kind == "custom":
        return len(scheme.weights) - 1
    if args.delta is None:
        raise ConfigError("need --delta or --levels")
    return select_level_count(scheme, args.delta)


def _emit(args, write):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            write(fh)
    else:
        write(sys.stdout)


def _header(argv, g, res):
    head = {"command": shlex.join(["agp", *argv]), "graph": g.digest()}
    head.update(res.provenance())
    return head


def cmd_propagate(args, argv):
    scheme = _scheme(args)
    g = _load(args, scheme)
    x = _signal(args, g, scheme)
    L = _levels(args, scheme)
    cfg = RandomizedConfig(delta=args.delta, epsilon=args.epsilon, L=L, seed=args.seed,
                           engine=args.policy)
    res = randomized_propagate(g, scheme, x, cfg)
    _emit(args, lambda fh: write_vector(fh, g, res.pi, _header(argv, g, res)))


def cmd_groundtruth(args, argv):
    scheme = _scheme(args)
    g = _load(args, scheme)
    x = _signal(args, g, scheme)
    res = basic_propagate(g, scheme, x, args.levels)
    _emit(args, lambda fh: write_vector(fh, g, res.pi, _header(argv, g, res)))


def cmd_cluster(args, argv):
    scheme = _scheme(args)
    g = _load(args, scheme)
    x = _signal(args, g, scheme)
    if args.exact:
        res = basic_propagate(g, scheme, x, args.levels or 50)
    else:
        L = _levels(args, scheme)
        cfg = RandomizedConfig(delta=args.delta, epsilon=args.epsilon, L=L, seed=args.seed,
                               engine=args.policy)
        res = randomized_propagate(g, scheme, x, cfg)
    sweep = sweep_cut(g, normalize_scores(g, res.pi), args.max_prefix)

    def write(fh):
        head = _header(argv, g, res)
        head["conductance"] = format_value(sweep.best_conductance)
        head["size"] = sweep.best_prefix_len
        for k, v in head.items():
            fh.write(f"# {k}={v}\n")
        for u in sweep.best_set:
            fh.write(f"{g.original_id(int(u))}\n")

    _emit(args, write)
    if args.curve:
        with open(args.curve, "w") as fh:
            fh.write("prefix_len,node,conductance\n")
            for i, phi in enumerate(sweep.curve):
                fh.write(f"{i + 1},{g.original_id(int(sweep.order[i]))},{format_value(phi)}\n")


def cmd_features(args, argv):
    scheme = _scheme(args)
    g = _load(args, scheme)
    X = read_matrix(args.inp)
    if args.epsilon is None and args.delta is None:
        raise ConfigError("need --delta or --epsilon (0 for exact)")
    L = _levels(args, scheme) if (args.levels is not None or args.delta is not None) else None
    if L is None:
        raise ConfigError("need --levels when only --epsilon is given")
    cfg = RandomizedConfig(delta=args.delta, epsilon=args.epsilon, L=L, seed=args.seed,
                           engine=args.policy)
    t0 = time.perf_counter()
    Z = propagate_features(g, scheme, X, cfg, workers=args.workers)
    write_matrix(args.out, Z)
    a, b = scheme.laplacian
    L_, eps = cfg.resolve(scheme)
    prov = {
        "command": shlex.join(["agp", *argv]), "graph": g.digest(), "measure": scheme.name,
        "a": a, "b": b, "delta": args.delta, "epsilon": eps, "L": L_, "seed": args.seed,
        "workers": args.workers, "wall_time": round(time.perf_counter() - t0, 6),
        "col_scale": Z.col_scale.tolist(),
    }
    with open(args.out + ".json", "w") as fh:
        json.dump(prov, fh)


def cmd_eval(args, argv):
    truth_map, _ = read_vector(args.truth)
    est_map, est_head = read_vector(args.est)
    if args.graph:
        g = load_graph(args.graph, directed=args.directed, add_self_loops=args.self_loops)
        try:
            truth, est = dense_from_map(g, truth_map), dense_from_map(g, est_map)
        except KeyError as exc:
            raise DataError(f"vector names unknown node {exc}") from None
    else:
        if args.normalized:
            raise ConfigError("--normalized needs --graph")
        g = None
        nodes = sorted(set(truth_map) | set(est_map))
        truth = np.array([truth_map.get(v, 0.0) for v in nodes])
        est = np.array([est_map.get(v, 0.0) for v in nodes])
    pc = est_head.get("push_count")
    k = min(args.k, len(truth))
    report = evaluate(g, truth, est, k, args.normalized, int(pc) if pc else None)
    _emit(args, lambda fh: fh.write(json.dumps(report.as_dict()) + "\n"))


def cmd_mc(args, argv):
    g = load_graph(args.graph, directed=args.directed, add_self_loops=args.self_loops)
    try:
        s = g.index_of(args.source)
    except KeyError:
        raise DataError(f"source {args.source} is not a node of the graph") from None
    fixed = args.fixed_len
    if fixed is None and args.delta is not None:
        fixed = fixed_walk_length(args.t, args.delta)
    t0 = time.perf_counter()
    pi = mc_hkpr(g, s, args.t, args.walks, fixed_len=fixed, seed=args.seed)
    head = {
        "command": shlex.join(["agp", *argv]), "graph": g.digest(), "engine": "mc",
        "t": args.t, "walks": args.walks, "fixed_len": fixed, "seed": args.seed,
        "wall_time": round(time.perf_counter() - t0, 6),
    }
    _emit(args, lambda fh: write_vector(fh, g, pi, head))


def cmd_convert(args, argv):
    mode = args.mode if args.directed else None
    g = load_graph(args.inp, directed=args.directed, add_self_loops=args.self_loops, mode=mode)
    if mode and g.mode != mode:
        g = reorient(g, mode)
    if args.out.endswith(".txt") or args.out.endswith(".edges"):
        from .graph import edge_array

        with open(args.out, "w") as fh:
            for u, v in edge_array(g):
                fh.write(f"{g.original_id(int(u))} {g.original_id(int(v))}\n")
    else:
        save_csr(g, args.out)
    if args.mapping:
        write_mapping(g, args.mapping)


def cmd_tradeoff(args, argv):
    scheme = _scheme(args)
    g = _load(args, scheme)
    x = _signal(args, g, scheme)
    truth = basic_propagate(g, scheme, x, 50).pi
    rows = []
    for delta in (float(s) for s in args.deltas.split(",")):
        res = randomized_propagate(g, scheme, x, RandomizedConfig(delta=delta, seed=args.seed))
        err = evaluate(g, truth, res.pi, 1, args.normalized).max_error
        rows.append((delta, res.epsilon, res.levels, res.push_count, err, res.wall_time))

    def write(fh):
        fh.write("delta,epsilon,L,push_count,max_error,wall_time\n")
        for r in rows:
            fh.write(",".join(format_value(v) if isinstance(v, float) else str(v) for v in r) + "\n")

    _emit(args, write)


COMMANDS = {
    "propagate": cmd_propagate,
    "groundtruth": cmd_groundtruth,
    "cluster": cmd_cluster,
    "features": cmd_features,
    "eval": cmd_eval,
    "mc": cmd_mc,
    "convert": cmd_convert,
    "tradeoff": cmd_tradeoff,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args, argv)
    except ConfigError as exc:
        print(f"agp {args.command}: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"agp {args.command}: {exc}", file=sys.stderr)
        return 2
    except AGPError as exc:
        print(f"agp {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
