"""Command-line front end.

Exit codes: 0 success or converged, 2 parse/configuration error,
3 indeterminate spectral classification, 4 cycle certified (or witness found),
5 horizon exhausted.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys

import numpy as np

from . import documents as docs
from .arith import to_fraction
from .dynamics import (BRAD, BRCD, BRD, OVERSHOOT_RULES, Cyclic, DynamicSpec, RandomUniform, RoundRobin,
                       Scripted, run)
from .equilibrium import check_uniqueness, solve_contraction, solve_enumerate
from .errors import ConfigurationError, IndeterminateError, NetGameError, ParseError, PreconditionError
from .network import (ScalingVector, classify, dan_scaling, scaling_for_weak_externalities,
                      scaling_for_weak_influences, symmetrize)
from .potentials import RESCALED, SYMMETRIC, WEIGHTED_L1, PotentialSpec, verify_br_potential
from .random_networks import (PARASITE, THREE_GROUP, RandomWeightModel, estimate_cycle_probability,
                              find_parasite_witness, find_three_group_witness, model_probabilities,
                              required_group_size, required_group_size_parasite, sample_network,
                              three_group_lower_bound)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INDETERMINATE = 3
EXIT_CYCLE = 4
EXIT_HORIZON = 5
OUTPUT_DIR_ENV = "DNETGAMES_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message)


def _global_flags(parser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default if suppress else 0, help="master seed")
    parser.add_argument("--exact", action="store_true", default=default if suppress else False,
                        help="exact rational arithmetic")
    parser.add_argument("--tol", type=float, default=default, help="tolerance override")
    parser.add_argument("--horizon", type=int, default=default if suppress else 10_000,
                        help="maximum number of updates")
    parser.add_argument("--no-timestamp", dest="timestamp", action="store_false",
                        default=default if suppress else True, help="omit timestamps from outputs")
    parser.add_argument("-o", "--output", default=default, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dnetgames", description="Directed network public-goods games.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        return p

    p = command("analyze", "classify the network of a game document")
    p.add_argument("game")

    p = command("simulate", "run a one-sided dynamic and stream the trajectory")
    p.add_argument("game")
    p.add_argument("--schedule", default="round-robin",
                   help="round-robin[:ORDER] | cyclic:SEQ | random | scripted:PREFIX (1-based, comma separated)")
    p.add_argument("--dynamic", choices=[BRD, BRAD, BRCD], default=BRD)
    p.add_argument("--beta", default="0", help="approach parameter for brad")
    p.add_argument("--alpha", default="0", help="centering parameter for brcd")
    p.add_argument("--step", default="1", help="step fraction")
    p.add_argument("--overshoot", choices=OVERSHOOT_RULES, default="alternating")
    p.add_argument("--x0", help="initial profile, comma separated (default: zeros)")
    p.add_argument("--quantum", help="grid for floating-mode cycle certification")
    p.add_argument("--potential", choices=[SYMMETRIC, RESCALED, WEIGHTED_L1],
                   help="record a potential value on every update")

    p = command("equilibrium", "compute Nash equilibria")
    p.add_argument("game")
    p.add_argument("--method", choices=["enumerate", "contraction"], default="enumerate")
    p.add_argument("--x0")

    p = command("rescale", "construct a scaling vector")
    p.add_argument("game")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--symmetrize", dest="target", action="store_const", const="symmetrize")
    group.add_argument("--weak-influences", dest="target", action="store_const", const="influences")
    group.add_argument("--weak-externalities", dest="target", action="store_const", const="externalities")
    group.add_argument("--dan", dest="target", action="store_const", const="dan")
    p.add_argument("--margin", default=None, help="dominance margin (or DAN recursion factor)")

    p = command("potential", "evaluate or verify best-response potentials")
    psub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("eval", "verify"):
        q = psub.add_parser(name)
        _global_flags(q, suppress=True)
        q.add_argument("game")
        q.add_argument("--kind", choices=[SYMMETRIC, RESCALED, WEIGHTED_L1], required=True)
        q.add_argument("--scaling", help="scaling vector (default: constructed)")
        if name == "eval":
            q.add_argument("--x", required=True, help="profile, comma separated")
        else:
            q.add_argument("--samples", type=int, default=200)
            q.add_argument("--grid", type=int, default=101)

    p = command("random", "random networks and cycle witnesses")
    rsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("sample", "witness", "sweep"):
        q = rsub.add_parser(name)
        _global_flags(q, suppress=True)
        if name == "witness":
            q.add_argument("game")
            q.add_argument("--kind", choices=[THREE_GROUP, PARASITE, "any"], default="any")
            q.add_argument("--m", type=int)
        else:
            q.add_argument("--model", help="model JSON file")
            q.add_argument("--target", default="1", help="common target of all players")
        if name == "sample":
            q.add_argument("--n", type=int, required=True)
            q.add_argument("--cap", default="unbounded")
        if name == "sweep":
            q.add_argument("--n-values", default="3,9,27")
            q.add_argument("--trials", type=int, default=500)
            q.add_argument("--m", type=int)
        for flag, default in (("--p-zero", None), ("--p-one-way", None), ("--p-parasite", None),
                              ("--w-minus", None), ("--w-low", None), ("--w-high", None),
                              ("--generic-bound", None)):
            q.add_argument(flag, type=float, default=default)
    return parser


# ---------------------------------------------------------------- helpers


def _emit(args, text: str, default_name: str) -> None:
    path = getattr(args, "output", None)
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        path = os.path.join(os.environ[OUTPUT_DIR_ENV], default_name)
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load(args):
    game, label = docs.load_game(args.game, exact=True if args.exact else None)
    return game, label


def _players(text: str) -> list[int]:
    try:
        return [int(p) - 1 for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"bad player list {text!r}") from exc


def parse_schedule(text: str, n: int, seed: int):
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind == "round-robin":
        return RoundRobin(n, _players(rest) if rest else None)
    if kind == "cyclic":
        return Cyclic(_players(rest))
    if kind == "random":
        return RandomUniform(n, seed)
    if kind == "scripted":
        return Scripted(_players(rest), n)
    raise ConfigurationError(f"unknown schedule {text!r}")


def _parse_param(text: str, exact: bool):
    try:
        return to_fraction(text) if exact else float(to_fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"bad number {text!r}") from exc


def _scaling_arg(text, exact):
    if text is None:
        return None
    return ScalingVector(np.array(docs.parse_profile(text, exact), dtype=object if exact else float))


def _potential_spec(game, kind: str, scaling_text=None) -> PotentialSpec:
    a = _scaling_arg(scaling_text, game.exact)
    if kind == SYMMETRIC:
        return PotentialSpec(SYMMETRIC)
    if a is None:
        a = symmetrize(game.weights) if kind == RESCALED else scaling_for_weak_externalities(game.network)
        if a is None:
            raise PreconditionError(f"no scaling vector available for the {kind} potential")
    return PotentialSpec(kind, a)


def _model(args) -> RandomWeightModel:
    data = {}
    if args.model:
        try:
            with open(args.model, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read model {args.model}: {exc}") from exc
    for key in ("p_zero", "p_one_way", "p_parasite", "w_minus", "w_low", "w_high", "generic_bound"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    try:
        return RandomWeightModel.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"invalid model: {exc}") from exc


# ---------------------------------------------------------------- commands


def cmd_analyze(args) -> int:
    game, label = _load(args)
    report = classify(game.weights, args.tol)
    out = docs.classification_to_dict(report)
    if label is not None:
        out["label"] = label
    _emit(args, _json(out), "analysis.json")
    return EXIT_INDETERMINATE if report.indeterminate else EXIT_OK


def cmd_simulate(args) -> int:
    game, label = _load(args)
    exact = game.exact
    schedule = parse_schedule(args.schedule, game.n, args.seed)
    schedule.check(game.n)
    if args.dynamic == BRD:
        spec = DynamicSpec(BRD)
    else:
        param = args.beta if args.dynamic == BRAD else args.alpha
        spec = DynamicSpec(args.dynamic, _parse_param(param, exact), _parse_param(args.step, exact),
                           args.overshoot)
    x0 = docs.parse_profile(args.x0, exact) if args.x0 else [0] * game.n
    quantum = _parse_param(args.quantum, False) if args.quantum else None
    potential = None
    if args.potential:
        pspec = _potential_spec(game, args.potential)
        potential = lambda x: pspec.evaluate(game, x)  # noqa: E731
    try:
        traj = run(game, x0, schedule, spec, horizon=args.horizon, conv_tol=args.tol, quantum=quantum,
                   seed=args.seed, potential=potential)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc
    buf = io.StringIO()
    docs.write_trajectory(buf, traj, game, seed=args.seed, timestamp=args.timestamp, label=label)
    _emit(args, buf.getvalue(), f"trajectory-{docs.game_digest(game)[:12]}.jsonl")
    return {"converged": EXIT_OK, "cycle": EXIT_CYCLE}.get(traj.verdict.name, EXIT_HORIZON)


def cmd_equilibrium(args) -> int:
    game, label = _load(args)
    if args.method == "contraction":
        x0 = docs.parse_profile(args.x0, game.exact) if args.x0 else None
        x = solve_contraction(game, x0, tol=args.tol or 1e-10)
        out = {"method": "contraction", "profile": docs.format_profile(x, False)}
    else:
        eq = solve_enumerate(game, args.tol)
        verdict = check_uniqueness(game)
        out = {
            "method": "enumerate",
            "complete": eq.complete,
            "continuum": eq.continuum,
            "uniqueness": {"status": verdict.status, "method": verdict.method},
            "equilibria": [{"profile": docs.format_profile(e.profile, game.exact),
                            "pattern": list(e.pattern),
                            "residual": docs._number(e.residual, game.exact)} for e in eq],
        }
    if label is not None:
        out["label"] = label
    _emit(args, _json(out), "equilibrium.json")
    return EXIT_OK


def cmd_rescale(args) -> int:
    game, label = _load(args)
    W = game.weights
    out = {"target": args.target}
    code = EXIT_OK
    try:
        if args.target == "symmetrize":
            a = symmetrize(W, args.tol)
        elif args.target == "dan":
            a = dan_scaling(W, _parse_param(args.margin, game.exact) if args.margin else 1)
        else:
            fn = scaling_for_weak_influences if args.target == "influences" else scaling_for_weak_externalities
            a = fn(game.network, float(args.margin)) if args.margin else fn(game.network)
    except IndeterminateError as exc:
        a = None
        out["indeterminate"] = str(exc)
        code = EXIT_INDETERMINATE
    except PreconditionError as exc:
        a = None
        out["error"] = str(exc)
    out["scaling"] = docs.scaling_to_list(a)
    if label is not None:
        out["label"] = label
    _emit(args, _json(out), f"rescale-{args.target}.json")
    return code


def cmd_potential(args) -> int:
    game, label = _load(args)
    spec = _potential_spec(game, args.kind, args.scaling)
    out = {"kind": args.kind, "scaling": docs.scaling_to_list(spec.scaling)}
    if args.action == "eval":
        x = game.profile(docs.parse_profile(args.x, game.exact))
        value = spec.evaluate(game, x, check=True)
        out["value"] = docs._number(value, game.exact and not isinstance(value, float))
    else:
        report = verify_br_potential(game, spec, args.samples, args.grid, args.seed)
        out.update(samples=report.samples, max_deviation=f"{report.max_deviation:.17g}",
                   counterexample=report.counterexample)
    _emit(args, _json(out), f"potential-{args.action}.json")
    return EXIT_OK


def cmd_random(args) -> int:
    if args.action == "witness":
        return _random_witness(args)
    model = _model(args)
    target = _parse_param(args.target, False)
    if args.action == "sample":
        rng = np.random.default_rng(args.seed)
        W = sample_network(model, args.n, rng).weights
        n = args.n
        doc = {"n": n, "mode": docs.FLOAT, "weights": [f"{v:.17g}" for v in W.ravel()],
               "targets": [f"{target:.17g}"] * n, "caps": [args.cap] * n,
               "label": f"sample seed={args.seed}"}
        _emit(args, _json(doc), f"sample-n{n}-seed{args.seed}.json")
        return EXIT_OK
    n_values = [int(v) for v in args.n_values.split(",") if v.strip()]
    rows = estimate_cycle_probability(model, target, n_values, args.trials, seed=args.seed, m=args.m)
    P0, P1, _ = model_probabilities(model)
    m = args.m or required_group_size([target], model.w_low)
    bounds = [three_group_lower_bound(P0, P1, m, n) for n in n_values]
    buf = io.StringIO()
    docs.write_sweep(buf, rows, bounds)
    _emit(args, buf.getvalue(), f"sweep-seed{args.seed}.csv")
    return EXIT_OK


def _random_witness(args) -> int:
    game, label = _load(args)
    W, t, caps = game.weights, list(game.targets), list(game.caps)
    rng = np.random.default_rng(args.seed)
    witness = None
    w_low = args.w_low if args.w_low is not None else 1.0
    if args.kind in (THREE_GROUP, "any"):
        m = args.m or required_group_size(t, w_low)
        witness = find_three_group_witness(W, t, w_low, m, caps=caps, rng=rng)
    if witness is None and args.kind in (PARASITE, "any"):
        w_minus = args.w_minus if args.w_minus is not None else 1.0
        w_high = args.w_high
        if w_high is not None or args.kind == PARASITE:
            if w_high is None:
                raise ConfigurationError("parasite search needs --w-high")
            m = args.m or required_group_size_parasite(t, w_minus, w_low, w_high)
            witness = find_parasite_witness(W, t, w_minus, w_low, w_high, m, caps=caps, rng=rng)
    out = {"found": witness is not None}
    if witness is not None:
        out.update(kind=witness.kind, groups=[[i + 1 for i in g] for g in witness.groups],
                   host=None if witness.host is None else witness.host + 1,
                   schedule=[i + 1 for i in witness.schedule], cycle_length=len(witness.schedule),
                   profiles=[docs.format_profile(x, True) for x in witness.profiles])
    if label is not None:
        out["label"] = label
    _emit(args, _json(out), "witness.json")
    return EXIT_CYCLE if witness is not None else EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "simulate": cmd_simulate, "equilibrium": cmd_equilibrium,
            "rescale": cmd_rescale, "potential": cmd_potential, "random": cmd_random}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except (ParseError, ConfigurationError, PreconditionError) as exc:
        print(f"dnetgames: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IndeterminateError as exc:
        print(f"dnetgames: indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except NetGameError as exc:
        print(f"dnetgames: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
