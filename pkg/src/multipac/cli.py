"""Command-line entry point.

Exit status is 0 on success, 2 when an input or result breaks a contract,
and 3 when a search runs out of budget or only a lower bound was reached.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .compression import CC_MODES, CompressionError, CompressionParams, cc_enumerate, scsr_compress, scsr_reconstruct, scsr_scheme
from .core import BudgetExceeded, HypothesisClass, InvariantViolation, sample
from .dimensions import density, ds_dimension, natarajan_dimension
from .harness.experiment import ExperimentSpec, run_experiment
from .harness.fileio import (
    class_to_json,
    load_class,
    load_distribution,
    load_menu,
    load_sample,
    load_vertices,
    write_json,
)
from .listbound import lscs_compress, lscs_reconstruct
from .listlearn import mw_list_learn
from .oig import build_oig, min_max_outdegree_orientation
from .pipeline import MaplConfig, StageError, run_mapl

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


class _Incomplete(Exception):
    """The command produced output, but only as a bound."""


def _emit(args, name: str, obj) -> None:
    if args.out:
        write_json(Path(args.out) / f"{name}.json", obj)
    print(json.dumps(obj, sort_keys=True))


def _check_sample(s, H: HypothesisClass, n: int, k: int) -> None:
    if (n, k) != (H.n_domain, H.n_labels):
        raise InvariantViolation("sample and class dimensions differ")


def cmd_dims(args) -> None:
    H = load_class(args.class_file)
    dn = natarajan_dimension(H, args.cap, args.node_budget)
    ds = ds_dimension(H, args.cap, args.node_budget)
    top = min(args.density_max, H.n_domain + 1)
    profile = [density(H, m) for m in range(1, top + 1)]
    out = {
        "d_N": dn.value,
        "d_DS": ds.value,
        "exact": dn.exact and ds.exact,
        "witnesses": {
            "natarajan": None if dn.witness is None else
            {"points": dn.witness.points, "f": dn.witness.f, "g": dn.witness.g},
            "ds": None if ds.witness is None else
            {"points": ds.witness.points, "cube": [list(v) for v in ds.witness.cube]},
        },
        "density_profile": [{"m": m, "value": str(r.value), "exact": r.exact, "points": r.points}
                            for m, r in enumerate(profile, start=1)],
    }
    _emit(args, "dims", out)
    if not out["exact"] or not all(r.exact for r in profile):
        raise _Incomplete("node budget exhausted; dimensions are lower bounds")


def cmd_orient(args) -> None:
    V, n = load_vertices(args.vertex_file)
    G = build_oig(V, n)
    sigma, k = min_max_outdegree_orientation(G)
    edges = [{"direction": i, "members": [list(G.vertices[v]) for v in e], "target": list(G.vertices[t])}
             for (i, e), t in zip(G.edges, sigma.assignment)]
    _emit(args, "orientation", {"k": k, "edges": edges})


def _params(args) -> CompressionParams:
    return CompressionParams(gamma=args.gamma, mode=args.mode, d_weak=args.d_weak)


def cmd_compress(args) -> None:
    H = load_class(args.class_file)
    s, n, k = load_sample(args.sample_file)
    _check_sample(s, H, n, k)
    params = _params(args)
    trace: dict = {}
    idx = scsr_compress(s, H, params, args.seed, trace)
    h = scsr_reconstruct([s[i] for i in idx], H, params)
    _emit(args, "compression", {"indices": list(idx), "size": len(idx), "mode": args.mode,
                                "reconstructed": list(h), "trace": trace})


def cmd_cover(args) -> None:
    H = load_class(args.class_file)
    s, n, k = load_sample(args.sample_file)
    _check_sample(s, H, n, k)
    F = cc_enumerate(s, H, scsr_scheme(H, _params(args)), mode=args.cc_mode,
                     element_budget=args.element_budget, seed=args.seed)
    _emit(args, "cover", class_to_json(F))


def cmd_list_learn(args) -> None:
    F = load_class(args.class_file)
    s, n, k = load_sample(args.sample_file)
    _check_sample(s, F, n, k)
    T = args.rounds if args.rounds is not None else len(s)
    out = mw_list_learn(T, s, args.eta, F, args.seed)
    listed = HypothesisClass(F.n_domain, F.n_labels, out.list) if out.list else None
    _emit(args, "list", {
        "list": [list(h) for h in out.list],
        "list_class": None if listed is None else class_to_json(listed),
        "trace": [{"chosen": j, "reward": r} for j, r in out.trace],
        "mode": args.mode,
    })


def cmd_list_bound(args) -> None:
    H = load_class(args.class_file)
    mu = load_menu(args.menu_file)
    s, n, k = load_sample(args.sample_file)
    _check_sample(s, H, n, k)
    trace: dict = {}
    params = CompressionParams(gamma=args.gamma, mode=args.mode)
    idx = lscs_compress(s, H, mu, args.d_N, args.seed, params, trace)
    h = lscs_reconstruct([s[i] for i in idx], H, mu, args.d_N)
    _emit(args, "list_bound", {"hypothesis": list(h), "indices": list(idx), "menu_size": mu.size,
                               "trace": trace, "mode": args.mode})


def cmd_mapl(args) -> None:
    H = load_class(args.class_file)
    if args.sample is not None:
        s, n, k = load_sample(args.sample)
        _check_sample(s, H, n, k)
    elif args.distribution is not None:
        if args.n is None:
            raise InvariantViolation("--n is required with --distribution")
        P = load_distribution(args.distribution)
        if (P.n_domain, P.n_labels) != (H.n_domain, H.n_labels):
            raise InvariantViolation("distribution and class dimensions differ")
        s = sample(P, args.n, args.seed)
    else:
        raise InvariantViolation("give --sample or --distribution")
    cfg = MaplConfig(mode=args.mode, epsilon=args.epsilon, delta=args.delta, eta=args.eta,
                     d_override=args.d_weak, d_N_override=args.d_N, seed=args.seed, cc_mode=args.cc_mode)
    run = run_mapl(s, H, cfg)
    _emit(args, "mapl", {"hypothesis": list(run.hypothesis), "report": run.report})


def cmd_bench(args) -> None:
    with open(args.spec_file) as fh:
        obj = json.load(fh)
    if args.seed is not None:
        obj["seed"] = args.seed
    spec = ExperimentSpec.from_dict(obj)
    out = args.out or spec.output
    res = run_experiment(spec, workers=args.workers, output=out)
    print(json.dumps(res.summary, sort_keys=True))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=("faithful", "practical"), default="practical")
    common.add_argument("--out", default=None, help="directory for JSON outputs")

    p = argparse.ArgumentParser(prog="multipac", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("dims", parents=[common], help="Natarajan and DS dimensions, density profile")
    q.add_argument("class_file")
    q.add_argument("--cap", type=int, default=None)
    q.add_argument("--node-budget", type=int, default=5_000_000)
    q.add_argument("--density-max", type=int, default=4)
    q.set_defaults(func=cmd_dims)

    q = sub.add_parser("orient", parents=[common], help="min-max out-degree orientation of a vertex set")
    q.add_argument("vertex_file")
    q.set_defaults(func=cmd_orient)

    for name, func, help_ in (("compress", cmd_compress, "compress a sample"),
                              ("cover", cmd_cover, "finite cover of reconstructions")):
        q = sub.add_parser(name, parents=[common], help=help_)
        q.add_argument("class_file")
        q.add_argument("sample_file")
        q.add_argument("--gamma", type=float, default=1 / 3)
        q.add_argument("--d-weak", type=int, default=None)
        if name == "cover":
            q.add_argument("--cc-mode", choices=CC_MODES, default="full")
            q.add_argument("--element-budget", type=int, default=200_000)
        q.set_defaults(func=func)

    q = sub.add_parser("list-learn", parents=[common], help="multiplicative-weights list learning")
    q.add_argument("class_file")
    q.add_argument("sample_file")
    q.add_argument("--rounds", "-T", type=int, default=None)
    q.add_argument("--eta", type=float, default=0.5)
    q.set_defaults(func=cmd_list_learn)

    q = sub.add_parser("list-bound", parents=[common], help="learn inside a menu")
    q.add_argument("class_file")
    q.add_argument("menu_file")
    q.add_argument("sample_file")
    q.add_argument("--d-N", type=int, default=1)
    q.add_argument("--gamma", type=float, default=1 / 3)
    q.set_defaults(func=cmd_list_bound)

    q = sub.add_parser("mapl", parents=[common], help="three-stage agnostic learner")
    q.add_argument("class_file")
    q.add_argument("--sample", default=None)
    q.add_argument("--distribution", default=None)
    q.add_argument("--n", type=int, default=None)
    q.add_argument("--epsilon", type=float, default=0.1)
    q.add_argument("--delta", type=float, default=0.1)
    q.add_argument("--eta", type=float, default=0.5)
    q.add_argument("--d-weak", type=int, default=None)
    q.add_argument("--d-N", type=int, default=None)
    q.add_argument("--cc-mode", choices=CC_MODES, default="proxies")
    q.set_defaults(func=cmd_mapl)

    q = sub.add_parser("bench", help="run an experiment spec")
    q.add_argument("spec_file")
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--out", default=None)
    q.add_argument("--workers", type=int, default=1)
    q.set_defaults(func=cmd_bench)
    return p


def _root_cause(exc: BaseException) -> BaseException:
    while isinstance(exc, StageError) and exc.__cause__ is not None:
        exc = exc.__cause__
    return exc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except _Incomplete as exc:
        print(f"multipac: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (StageError, BudgetExceeded, CompressionError, InvariantViolation, ValueError, OSError) as exc:
        cause = _root_cause(exc)
        print(f"multipac: {exc}", file=sys.stderr)
        if isinstance(cause, (BudgetExceeded, CompressionError)):
            return EXIT_BUDGET
        if isinstance(cause, (InvariantViolation, ValueError, OSError)):
            return EXIT_INVALID
        raise
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
