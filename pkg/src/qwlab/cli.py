"""Command-line entry point tying the modules into reproducible experiments.

Every subcommand validates its inputs before computing, echoes its seed, and
embeds a manifest (subcommand, full argument set, seed, version) in the
report, so re-running a manifest reproduces byte-identical numeric output.
JSON floats use Python's shortest round-trip representation.

Exit codes: 0 success, 2 usage error, 3 invalid input, 4 broken invariant.
"""

from __future__ import annotations

import argparse
import json
import math
import secrets
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, costlab, markov, szegedy, walksim
from .adversary import builtin_construction
from .errors import InputError, InvariantViolationError
from .numkernel import SeededRng
from .walksim import predict

EXIT_OK = 0
EXIT_INPUT = 3
EXIT_INVARIANT = 4

ALGORITHMS = ("ed", "verify", "pair", "set", "rowcol", "simul", "threeparam")


def _json_safe(value):
    if isinstance(value, float) and math.isinf(value):
        return "infinite"
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(_json_safe(report), sort_keys=True) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _manifest(args: argparse.Namespace, seed: int, outputs: list[str]) -> dict:
    skip = {"func"}
    arguments = {k: _json_safe(v) for k, v in vars(args).items() if k not in skip}
    arguments["seed"] = seed
    return {
        "subcommand": args.subcommand,
        "arguments": arguments,
        "seed": seed,
        "version": __version__,
        "outputs": outputs,
    }


def _resolve_seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        seed = secrets.randbits(63)
        print(f"seed drawn from entropy: {seed}", file=sys.stderr)
        return seed
    return args.seed


def _require_json(args: argparse.Namespace) -> None:
    if args.format not in (None, "json"):
        raise InputError(f"subcommand {args.subcommand!r} reports JSON only")


# ---------------------------------------------------------------------------
# johnson

def cmd_johnson(args) -> int:
    _require_json(args)
    seed = _resolve_seed(args)
    p = markov.build_johnson_walk(args.n, args.r)
    if args.mark_containing:
        marked = markov.subsets_containing(args.n, args.r, args.mark_containing)
    else:
        marked = markov.MarkedSet([], p.n_states)
    outputs = [x for x in (args.chain_out, args.out) if x and x != "-"]
    if args.chain_out:
        markov.save_chain(args.chain_out, p, marked)
    eigs = markov.knuth_eigenvalues(args.n, args.r)
    scale = args.r * (args.n - args.r)
    report = {
        "manifest": _manifest(args, seed, outputs),
        "n": args.n,
        "r": args.r,
        "n_states": p.n_states,
        "adjacency_eigenvalues": [{"value": v, "multiplicity": m} for v, m in eigs],
        "walk_eigenvalues": [{"value": v / scale, "multiplicity": m} for v, m in eigs],
        "spectral_gap": float(markov.johnson_spectral_gap(args.n, args.r)),
        "marked": list(marked.members),
        "epsilon": marked.epsilon,
    }
    _emit(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# hit

def cmd_hit(args) -> int:
    _require_json(args)
    seed = _resolve_seed(args)
    p, marked = markov.load_chain(args.chain)
    if args.start == "uniform":
        s = markov.uniform_start(p.n_states)
    elif args.start.startswith("state:"):
        idx = int(args.start.split(":", 1)[1])
        if not (0 <= idx < p.n_states):
            raise InputError(f"start state {idx} outside [0, {p.n_states})")
        s = np.zeros(p.n_states)
        s[idx] = 1.0
    else:
        raise InputError(f"unknown start spec {args.start!r}; use 'uniform' or 'state:I'")

    report = {"manifest": _manifest(args, seed, [args.out] if args.out and args.out != "-" else [])}
    if marked.is_empty:
        print("warning: empty marked set, hitting time is infinite", file=sys.stderr)
        report.update({"exact": math.inf, "spectral": math.inf, "monte_carlo": None, "agreement": None})
        _emit(report, args.out)
        return EXIT_OK

    chain = markov.make_absorbing(p, marked)
    exact = markov.classical_hitting_time(chain, s)
    spectral = markov.hitting_time_spectral(chain)
    uniform = bool(np.allclose(s, markov.uniform_start(p.n_states)))
    mc_mean, mc_err = markov.monte_carlo_hitting(p, marked, s, args.trials, SeededRng(seed))
    report.update(
        {
            "exact": exact,
            "spectral": spectral if uniform else None,
            "monte_carlo": {"mean": mc_mean, "stderr": mc_err, "trials": args.trials},
            "agreement": {
                "exact_vs_spectral": (abs(exact - spectral) <= 1e-8 * max(1.0, abs(exact)))
                if uniform
                else None,
                "mc_within_3_sigma": abs(mc_mean - exact) <= 3.0 * mc_err + 1e-12,
            },
        }
    )
    _emit(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# szegedy

def cmd_szegedy(args) -> int:
    _require_json(args)
    seed = _resolve_seed(args)
    p, marked = markov.load_chain(args.chain)
    if p.n_states > args.max_states:
        raise InputError(
            f"chain has {p.n_states} states, exceeding the dense budget {args.max_states}"
        )
    chain = markov.make_absorbing(p, marked)
    walk = szegedy.build_quantized_walk(chain, max_states=args.max_states)
    disc = szegedy.discriminant(chain)
    start = szegedy.start_state(chain, walk)
    if start.all_marked:
        bound = 0.0
    else:
        # infinite for an unmarked chain: the start state never deviates
        bound = szegedy.deviation_time_bound(disc, start.coefficients)
    if args.t_bound is not None:
        t_used = args.t_bound
    else:
        t_used = int(bound) if math.isfinite(bound) else 0
    avg = szegedy.average_deviation(walk, chain, t_used)
    detection = szegedy.run_detection(chain, t_used, args.trials, SeededRng(seed), walk=walk)
    spectrum = szegedy.walk_spectrum(walk, disc)
    report = {
        "manifest": _manifest(args, seed, [args.out] if args.out and args.out != "-" else []),
        "singular_values": disc.singular_values,
        "angles": disc.angles,
        "eigenphases": spectrum.phases,
        "t_bound": t_used,
        "deviation_bound": bound,
        "avg_deviation": avg,
        "detection": {
            "prob_found_immediately": detection.prob_found_immediately,
            "prob_detect_deviation": detection.prob_detect_deviation,
            "total": detection.total,
            "analytic_total": detection.analytic_total,
            "trials": detection.trials,
        },
        "seed": seed,
    }
    _emit(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate

def _run_one_trial(payload) -> dict:
    name, instance_kind, instance_data, cfg = payload
    if instance_kind == "function":
        oracle = walksim.FunctionOracle(instance_data)
        if name == "ed":
            return walksim.ed_walk(oracle, cfg).to_dict()
        raise InputError(f"algorithm {name} does not take a function instance")
    instance = walksim.MatrixSetInstance(
        p=instance_data["p"], matrices=instance_data["matrices"], groups=instance_data["groups"]
    )
    if name == "verify":
        oracle = walksim.MatrixEntryOracle(instance.matrices, instance.p)
        return walksim.freivalds_verify_walk(oracle, cfg).to_dict()
    if name == "pair":
        oracle = walksim.MatrixEntryOracle(instance.matrices, instance.p)
        return walksim.pair_commute_walk(oracle, cfg).to_dict()
    if name == "set":
        return walksim.commute_set_walk(instance, cfg).to_dict()
    if name == "rowcol":
        return walksim.commute_rowcol_walk(instance, cfg).to_dict()
    if name == "simul":
        return walksim.commute_simul_walk(instance, cfg).to_dict()
    if name == "threeparam":
        return walksim.commute_3param_walk(instance, cfg).to_dict()
    raise InputError(f"unknown algorithm {name!r}")


def _default_steps(name: str, args, instance_kind, instance_data) -> int:
    if name == "ed":
        n = len(instance_data)
        delta = markov.johnson_spectral_gap(n, args.r)
        eps = predict.ed_epsilon(n, args.r)
        return predict.step_budget(delta, eps)
    n = len(instance_data["matrices"][0])
    k = len(instance_data["matrices"])
    if name in ("verify", "pair"):
        delta = predict.product_spectral_gap([(n, args.r), (n, args.r)])
        return predict.step_budget(delta, predict.verify_epsilon(n, args.r))
    if name == "set":
        delta = predict.product_spectral_gap([(k, args.r)])
        return predict.step_budget(delta, predict.set_epsilon(k, args.r))
    if name == "rowcol":
        delta = predict.product_spectral_gap([(n * k, args.r), (n * k, args.r)])
        return predict.step_budget(delta, predict.rowcol_epsilon(n, k, args.r))
    if name == "simul":
        delta = predict.product_spectral_gap([(k, args.r), (n, args.s), (n, args.s)])
        return predict.step_budget(delta, predict.simul_epsilon(k, n, args.r, args.s))
    groups = instance_data["groups"]
    m = len(groups)
    kk = len(groups[0])
    delta = predict.product_spectral_gap(
        [(m, args.t), (kk, args.r), (n, args.s), (n, args.s)]
    )
    eps = predict.threeparam_epsilon(m, kk, n, args.t, args.r, args.s, True)
    return predict.step_budget(delta, eps)


def cmd_simulate(args) -> int:
    _require_json(args)
    seed = _resolve_seed(args)
    name = args.algorithm
    if name == "ed":
        instance_kind = "function"
        instance_data = walksim.load_function_instance(args.instance)
    else:
        instance_kind = "matrix-set"
        inst = walksim.load_matrix_set(args.instance)
        instance_data = {"p": inst.p, "matrices": inst.matrices, "groups": inst.groups}
    if name in ("simul",) and args.s is None:
        raise InputError("algorithm 'simul' needs --s")
    if name == "threeparam" and (args.s is None or args.t is None):
        raise InputError("algorithm 'threeparam' needs --s and --t")
    steps = args.steps if args.steps is not None else _default_steps(name, args, instance_kind, instance_data)

    payloads = []
    for trial in range(args.trials):
        cfg = walksim.WalkConfig(
            r=args.r, steps=steps, seed=seed, s=args.s, t=args.t,
            trials=args.trials, stream=trial,
        )
        payloads.append((name, instance_kind, instance_data, cfg))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_one_trial, payloads, chunksize=16))
    else:
        reports = [_run_one_trial(p) for p in payloads]

    found = sum(1 for r in reports if r["found"])
    report = {
        "manifest": _manifest(args, seed, [args.out] if args.out and args.out != "-" else []),
        "algorithm": name,
        "steps": steps,
        "trials": args.trials,
        "found_count": found,
        "detection_rate": found / args.trials,
        "mean_queries": sum(r["queries_used"] for r in reports) / args.trials,
        "reports": reports[: min(args.trials, 5)],
        "seed": seed,
    }
    _emit(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# cost

def _optimize_point(point):
    name, params = point
    return costlab.optimize_model(costlab.build_model(name, **params))


def _model_params(args) -> dict:
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise InputError(f"--param expects NAME=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        params[key] = float(value)
    return params


def cmd_cost(args) -> int:
    seed = _resolve_seed(args)
    params = _model_params(args)
    if args.format is None:
        # single optimizations report JSON, sweeps report CSV
        args.format = "json" if args.sweep is None else "csv"
    if args.sweep is None:
        if args.format == "csv":
            raise InputError("single optimizations are reported as JSON; use --sweep for CSV")
        model = costlab.build_model(args.model, **params)
        result = costlab.optimize_model(model)
        report = {
            "manifest": _manifest(args, seed, [args.out] if args.out and args.out != "-" else []),
            "model": args.model,
            "params": params,
            "best_sizes": result.sizes,
            "cost": result.cost,
            "boundary": result.boundary,
        }
        _emit(report, args.out)
        return EXIT_OK

    sweep_name, lo, hi, count = args.sweep
    lo, hi, count = float(lo), float(hi), int(count)
    if count < 2 or lo <= 0 or hi <= lo:
        raise InputError("--sweep needs NAME LO HI COUNT with 0 < LO < HI and COUNT >= 2")
    points = [
        (args.model, dict(params, **{sweep_name: float(value)}))
        for value in np.geomspace(lo, hi, count)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_optimize_point, points))
    else:
        results = [_optimize_point(p) for p in points]
    rows = []
    for (_, swept), result in zip(points, results):
        sizes = {name: "" for name in ("t", "r", "s")}
        sizes.update({k: str(v) for k, v in result.sizes.items()})
        rows.append(
            {
                "model": args.model, "param": sweep_name, "value": swept[sweep_name],
                "t": sizes["t"], "r": sizes["r"], "s": sizes["s"],
                "cost": result.cost, "boundary": result.boundary,
            }
        )
    if args.format == "json":
        _emit({"manifest": _manifest(args, seed, []), "rows": rows}, args.out)
        return EXIT_OK
    lines = ["model,param,value,t,r,s,cost,boundary"]
    for row in rows:
        lines.append(
            f"{row['model']},{row['param']},{row['value']!r},{row['t']},{row['r']},{row['s']},"
            f"{row['cost']!r},{str(row['boundary']).lower()}"
        )
    text = "\n".join(lines) + "\n"
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# adversary

def cmd_adversary(args) -> int:
    _require_json(args)
    seed = _resolve_seed(args)
    sizes = {}
    for item in args.size or []:
        if "=" not in item:
            raise InputError(f"--size expects NAME=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        sizes[key] = int(value)
    construction = builtin_construction(args.name, enumerate_exact=args.enumerate, **sizes)
    if construction.exact is not None:
        construction.check_claims()
    report = {
        "manifest": _manifest(args, seed, [args.out] if args.out and args.out != "-" else []),
        "name": args.name,
        "m": construction.claimed.m,
        "m_prime": construction.claimed.m_prime,
        "l": construction.claimed.l,
        "bound": construction.bound,
        "verified_by_enumeration": construction.verified_by_enumeration,
    }
    if construction.exact is not None:
        report["exact"] = {
            "m": construction.exact.m,
            "m_prime": construction.exact.m_prime,
            "l": construction.exact.l,
        }
    _emit(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qwlab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="random seed; drawn from entropy if omitted")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers for trials")
        p.add_argument("--out", default=None, help="report destination ('-' or omitted for stdout)")
        p.add_argument("--format", choices=("json", "csv"), default=None,
                       help="json everywhere; cost sweeps default to csv")

    p = sub.add_parser("johnson", help="build a Johnson subset-walk chain and report its spectrum")
    p.add_argument("n", type=int)
    p.add_argument("r", type=int)
    p.add_argument("--mark-containing", type=int, nargs="*", default=None,
                   help="mark all subsets containing these elements")
    p.add_argument("--chain-out", default=None, help="write the chain file here")
    common(p)
    p.set_defaults(func=cmd_johnson)

    p = sub.add_parser("hit", help="exact, spectral and Monte-Carlo hitting times")
    p.add_argument("chain", help="chain file (JSON)")
    p.add_argument("--start", default="uniform", help="'uniform' or 'state:I'")
    p.add_argument("--trials", type=int, default=100_000)
    common(p)
    p.set_defaults(func=cmd_hit)

    p = sub.add_parser("szegedy", help="quantized-walk spectrum, deviation and detection report")
    p.add_argument("chain", help="chain file (JSON)")
    p.add_argument("--t-bound", type=int, default=None, help="override the deviation step bound")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--max-states", type=int, default=24)
    common(p)
    p.set_defaults(func=cmd_szegedy)

    p = sub.add_parser("simulate", help="run a walk algorithm on an instance file")
    p.add_argument("algorithm", choices=ALGORITHMS)
    p.add_argument("instance", help="instance file (JSON)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--trials", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cost", help="optimize a cost model or sweep a parameter")
    p.add_argument("model", choices=sorted(costlab.MODEL_BUILDERS))
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--sweep", nargs=4, metavar=("NAME", "LO", "HI", "COUNT"), default=None)
    common(p)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("adversary", help="lower-bound constructions and enumeration checks")
    p.add_argument("name", choices=("search", "matrix-verification", "connectivity", "commutativity", "msets"))
    p.add_argument("--size", action="append", metavar="NAME=VALUE")
    p.add_argument("--enumerate", action="store_true", default=None,
                   help="force exact enumeration (default: automatic by size)")
    common(p)
    p.set_defaults(func=cmd_adversary)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
