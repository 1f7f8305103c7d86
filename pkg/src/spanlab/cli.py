"""Single entry-point command line: generators, online runs, verification, bench.

Exit codes: 0 success, 1 usage error, 2 verification failure (stretch bound
violated), 3 generator/infeasibility error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .adversary import (
    GeneratorError,
    NAMED_GRAPHS,
    _adjacency,
    hypercube_pm1_sequence,
    l1_lattice_sequence,
    star_append,
    truncated_girth_metric,
)
from .bench import (
    CsvWriter,
    ExperimentSpec,
    StretchViolation,
    certified_bound,
    run_experiment,
    sweep,
)
from .graphs import STRETCH_RTOL, max_stretch, metrics_report
from .greedy import MetricViolation, OrderedGreedy
from .gridyao import GridYaoSpanner
from .hst import AlphaRoundedOnline, MultiScaleSpanner, UltrametricViolation, random_hst, ultrametric_violations
from .instances import (
    InstanceBundle,
    arrival_order,
    load_instance,
    read_spanner_csv,
    save_instance,
    spanner_rows_json,
    write_report_json,
    write_spanner_csv,
)
from .metricspace import L1, L2, PointSequence

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_GENERATOR = 3

ALG1_MAX_DIM = 3  # cone covers grow exponentially with dimension

COMPATIBILITY = """\
compatibility matrix (generator -> algorithms):
  random (points l2)   -> alg1 (dim <= 3), greedy
  l1-lattice (points)  -> greedy
  girth (matrix)       -> greedy
  hypercube (points)   -> greedy
  random-hst (hst)     -> hst, hst2e, greedy
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(
        prog="spanlab",
        description="Online metric t-spanners: algorithms, adversaries, verification.",
        epilog=COMPATIBILITY,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--version", action="version", version=f"spanlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit an instance JSON (+ schedule sidecar)")
    gsub = gen.add_subparsers(dest="generator", required=True)

    g = gsub.add_parser("l1-lattice", help="L1 lattice adversary schedule")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--eps", type=float, required=True)
    _out(g)

    g = gsub.add_parser("girth", help="truncated high-girth graph metric")
    g.add_argument("--graph", choices=sorted(NAMED_GRAPHS), default="heawood")
    g.add_argument("--edges", help="edge-list file (overrides --graph)")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--star", action="store_true", help="append the hub point last")
    _out(g)

    g = gsub.add_parser("hypercube", help="+-1 hypercube sequence (origin last)")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--eps", type=float, required=True)
    g.add_argument("--size", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    _out(g)

    g = gsub.add_parser("random", help="uniform random points in [0,1]^d")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--norm", choices=[L1, L2], default=L2)
    _out(g)

    g = gsub.add_parser("random-hst", help="random HST instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--depth", type=int, default=6)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--alpha", type=float, default=None)
    _out(g)

    a = sub.add_parser("alg1", help="grid + ordered Yao (1+eps)^2 online spanner")
    a.add_argument("--eps", type=float, required=True)
    a.add_argument("--cap", type=float, default=24.0, help="experimental cap constant")
    a.add_argument("--trace", help="write step,level,u,v,w trace CSV here")
    _run_flags(a)

    a = sub.add_parser("greedy", help="ordered greedy t-spanner for any metric")
    a.add_argument("--t", type=float, required=True)
    _run_flags(a)

    a = sub.add_parser("hst", help="alpha-rounded ultrametric pipeline")
    a.add_argument("--alpha", type=float, required=True)
    _run_flags(a)

    a = sub.add_parser("hst2e", help="multi-scale (2+eps) ultrametric spanner")
    a.add_argument("--eps", type=float, required=True)
    _run_flags(a)

    v = sub.add_parser("verify", help="check a spanner CSV against an instance")
    v.add_argument("--input", required=True)
    v.add_argument("--spanner", required=True)
    v.add_argument("--bound", type=float, required=True)
    v.add_argument("--report", help="write a metrics report JSON here")

    b = sub.add_parser("bench", help="run an experiment spec, emit bench CSV")
    b.add_argument("--spec", required=True)
    b.add_argument("--out", required=True)
    return p


def _out(g):
    g.add_argument("--out", help="output path (default: stdout)")


def _run_flags(a):
    a.add_argument("--input", required=True)
    a.add_argument("--out", help="spanner output path (default: stdout)")
    a.add_argument("--format", choices=["csv", "json"], default="csv")
    a.add_argument("--verify", choices=["none", "final", "prefix"], default="none")
    a.add_argument("--shuffle", type=int, default=None, help="permute arrival order")


def _echo_config(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "command" or True}
    print("config: " + json.dumps(cfg, default=str), file=sys.stderr)


def _emit_instance(bundle, out):
    if out:
        save_instance(bundle, out)
    else:
        json.dump(bundle.to_dict(), sys.stdout)
        sys.stdout.write("\n")
        if bundle.schedule is not None:
            print(
                "note: schedule sidecar only written with --out", file=sys.stderr
            )


def _cmd_gen(args):
    if args.generator == "l1-lattice":
        sched = l1_lattice_sequence(args.d, args.eps)
        bundle = InstanceBundle(
            "points", points=sched.points, meta=sched.meta, schedule=sched.steps
        )
    elif args.generator == "girth":
        if args.edges:
            pairs = []
            for line in Path(args.edges).read_text().split("\n"):
                line = line.strip()
                if line:
                    u, v = line.split()
                    pairs.append((int(u), int(v)))
            n = max(max(u, v) for u, v in pairs) + 1
            adj = _adjacency(n, pairs)
            name = Path(args.edges).stem
        else:
            adj = NAMED_GRAPHS[args.graph]()
            name = args.graph
        metric = truncated_girth_metric(adj, args.k)
        meta = {"generator": "girth", "graph": name, "k": args.k, "star": bool(args.star)}
        schedule = [0] * metric.n
        if args.star:
            metric, _ = star_append(metric, args.k)
            schedule.append(1)
        bundle = InstanceBundle("matrix", matrix=metric.matrix, meta=meta, schedule=schedule)
    elif args.generator == "hypercube":
        seq = hypercube_pm1_sequence(args.d, args.eps, args.size, args.seed)
        meta = {
            "generator": "hypercube", "d": args.d, "eps": args.eps,
            "size": args.size, "seed": args.seed,
        }
        schedule = [0] * args.size + [1]
        bundle = InstanceBundle("points", points=seq, meta=meta, schedule=schedule)
    elif args.generator == "random":
        import random as _random

        rng = _random.Random(args.seed)
        pts = [tuple(rng.random() for _ in range(args.d)) for _ in range(args.n)]
        seq = PointSequence(dim=args.d, norm=args.norm, points=pts)
        meta = {"generator": "random", "d": args.d, "n": args.n, "seed": args.seed}
        bundle = InstanceBundle("points", points=seq, meta=meta)
    elif args.generator == "random-hst":
        tree = random_hst(args.n, depth=args.depth, seed=args.seed, alpha=args.alpha)
        meta = {"generator": "random-hst", "n": args.n, "seed": args.seed}
        if args.alpha:
            meta["alpha"] = args.alpha
        bundle = InstanceBundle("hst", tree=tree, meta=meta)
    else:
        raise UsageError(f"unknown generator {args.generator!r}")
    _emit_instance(bundle, args.out)
    return EXIT_OK


def _replay_online(args, bundle, order, metric):
    cmd = args.command
    if cmd == "alg1":
        if not 0.0 < args.eps < 1.0:
            raise UsageError("alg1 requires 0 < eps < 1")
        if bundle.kind != "points" or bundle.points.norm != L2:
            raise UsageError("alg1 requires a points instance with norm l2")
        if bundle.points.dim > ALG1_MAX_DIM:
            raise UsageError(f"alg1 supports dim <= {ALG1_MAX_DIM}")
        state = GridYaoSpanner(bundle.points.dim, args.eps, cap_constant=args.cap)
        bound = (1.0 + args.eps) ** 2
        pts = bundle.points.asarray()[order]
        feed = lambda i: state.insert(pts[i])
    elif cmd == "greedy":
        if not args.t > 1.0:
            raise UsageError("greedy requires t > 1")
        state = OrderedGreedy(args.t)
        bound = args.t
        feed = lambda i: state.insert(metric.matrix[i, :i])
    elif cmd == "hst":
        if not args.alpha > 1.0:
            raise UsageError("hst requires alpha > 1")
        _require_ultrametric(bundle, metric)
        state = AlphaRoundedOnline(args.alpha)
        bound = certified_bound("hst", alpha=args.alpha)
        feed = lambda i: state.insert(metric.matrix[i, :i])
    elif cmd == "hst2e":
        if not 0.0 < args.eps < 0.5:
            raise UsageError("hst2e requires 0 < eps < 1/2")
        _require_ultrametric(bundle, metric)
        state = MultiScaleSpanner(args.eps)
        bound = certified_bound("hst2e", eps=args.eps)
        feed = lambda i: state.insert(metric.matrix[i, :i])
    else:
        raise UsageError(f"unknown command {cmd!r}")

    for i in range(metric.n):
        feed(i)
        if args.verify == "prefix":
            rep = max_stretch(state.graph, metric.prefix(i + 1))
            if not rep.max_stretch <= bound * (1.0 + STRETCH_RTOL):
                raise StretchViolation(
                    f"stretch {rep.max_stretch:.6g} exceeds bound {bound:.6g} "
                    f"after prefix {i + 1} (witness {rep.witness})"
                )
    if args.verify in ("final", "prefix") and metric.n:
        rep = max_stretch(state.graph, metric)
        if not rep.max_stretch <= bound * (1.0 + STRETCH_RTOL):
            raise StretchViolation(
                f"final stretch {rep.max_stretch:.6g} exceeds bound {bound:.6g} "
                f"(witness {rep.witness})"
            )
    return state


def _require_ultrametric(bundle, metric):
    if bundle.kind == "hst":
        return
    viol = ultrametric_violations(metric)
    if viol:
        raise UsageError(f"input is not an ultrametric (witness triple {viol[0]})")


def _cmd_run(args):
    bundle = load_instance(args.input)
    order = arrival_order(bundle, args.shuffle)
    metric = bundle.metric().permute(order)
    state = _replay_online(args, bundle, order, metric)
    graph = state.graph
    if args.format == "json":
        payload = json.dumps(spanner_rows_json(graph)) + "\n"
        if args.out:
            Path(args.out).write_text(payload)
        else:
            sys.stdout.write(payload)
    else:
        write_spanner_csv(graph, args.out if args.out else sys.stdout)
    if args.command == "alg1" and args.trace:
        with open(args.trace, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["step", "level", "u", "v", "w"])
            for e in state.level_log:
                w.writerow([e.step, e.level, e.u, e.v, f"{e.w:.12g}"])
    return EXIT_OK


def _cmd_verify(args):
    bundle = load_instance(args.input)
    metric = bundle.metric()
    graph = read_spanner_csv(args.spanner, vertices=metric.n)
    rep = max_stretch(graph, metric)
    ok = rep.max_stretch <= args.bound * (1.0 + STRETCH_RTOL)
    if args.report:
        report = metrics_report(graph, metric) if rep.connected else None
        if report is not None:
            write_report_json(report, args.report, stretch=rep)
    print(
        f"max_stretch={rep.max_stretch:.10g} bound={args.bound:.10g} "
        f"connected={rep.connected} witness={rep.witness}"
    )
    if not ok:
        print("verification FAILED: stretch bound violated", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_bench(args):
    raw = json.loads(Path(args.spec).read_text())
    with CsvWriter(args.out) as writer:
        if "grid" in raw:
            template = _spec_from_dict(raw["template"])
            sweep(template, raw["grid"], writer)
        else:
            run_experiment(_spec_from_dict(raw), writer)
    return EXIT_OK


def _spec_from_dict(d):
    known = {f for f in ExperimentSpec.__dataclass_fields__}
    extra = set(d) - known
    if extra:
        raise UsageError(f"unknown spec fields: {sorted(extra)}")
    return ExperimentSpec(**d)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _echo_config(args)
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command in ("alg1", "greedy", "hst", "hst2e"):
            return _cmd_run(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "bench":
            return _cmd_bench(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MetricViolation, UltrametricViolation) as exc:
        print(f"input rejected: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StretchViolation as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except GeneratorError as exc:
        print(f"generator error: {exc}", file=sys.stderr)
        return EXIT_GENERATOR


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
