"""Command-line front end.

Every command echoes a resolved-config block (command, seed, package version,
validation tolerances) before its report so runs are self-describing.  Floats
are emitted with 17 significant digits; emitted state and tactic files
re-parse bit-exactly.

Exit codes: 0 success, 2 validation/usage error, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__, circuits, games, inequalities, measures, optimizer, stateio, tactics
from .qcore import (
    HERMITICITY_TOL,
    PSD_TOL,
    TRACE_TOL,
    UNITARITY_TOL,
    DensityMatrix,
    PureState,
    ValidationError,
    X,
    named_state,
)

_DEFAULT_PARAM_KEY = {
    "bell": "k",
    "werner": "a",
    "schmidt": "r",
    "two_bell_mixture": "a",
    "basis": "bits",
}


def _parse_scalar(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_state_spec(spec: str):
    """Resolve a state argument: a file path or ``name:key=value,...`` syntax."""
    if os.path.exists(spec):
        return stateio.load_state(spec)
    name, _, rest = spec.partition(":")
    params: dict = {}
    if rest:
        for token in rest.split(","):
            if "=" in token:
                key, _, value = token.partition("=")
                params[key.strip()] = _parse_scalar(value.strip())
            elif name in _DEFAULT_PARAM_KEY:
                params[_DEFAULT_PARAM_KEY[name]] = _parse_scalar(token.strip())
            else:
                raise ValidationError(f"state {name!r}: cannot interpret bare token {token!r}")
    return named_state(name, params)


def parse_tactic_spec(spec: str, state=None):
    """Resolve a tactic argument: a file, ``identity``, ``flip``, or a recipe name."""
    if os.path.exists(spec):
        return stateio.load_tactic(spec)
    if spec == "identity":
        return tactics.identity_tactic()
    if spec == "flip":
        return games.Tactic(X, X, label="flip")
    if spec in tactics.RECIPES:
        if state is None:
            raise ValidationError(f"tactic recipe {spec!r} needs a state to build from")
        return tactics.build(spec, state)
    raise ValidationError(
        f"unknown tactic {spec!r}: expected a file, 'identity', 'flip', or one of {sorted(tactics.RECIPES)}"
    )


def _config_block(args: argparse.Namespace, seed: int | None) -> dict:
    return {
        "command": args.command,
        "seed": seed,
        "version": __version__,
        "tolerances": {
            "hermiticity": HERMITICITY_TOL,
            "psd": PSD_TOL,
            "trace": TRACE_TOL,
            "unitarity": UNITARITY_TOL,
        },
    }


def _emit(args: argparse.Namespace, seed: int | None, report: dict) -> None:
    sys.stdout.write(stateio.dumps({"config": _config_block(args, seed), "report": report}))


def _default_seed(args: argparse.Namespace) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    return int(os.environ.get("DELOCGAMES_SEED", "0"))


def _report_matrices(report: games.GameReport) -> dict:
    return {
        "game": report.game,
        "priors": list(report.priors),
        "win_probability": report.win_probability,
        "no_disturb": dict(report.no_disturb),
        "bounds": dict(report.bounds),
        "saturation": dict(report.saturation),
        "conditional_ops": {
            label: stateio._encode_complex(op) for label, op in report.conditional_ops.items()
        },
    }


def _write_csv(path: str, fieldnames: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {
                    k: (f"{v:.17g}" if isinstance(v, float) else v)
                    for k, v in row.items()
                }
            )


def _cmd_measure(args) -> None:
    state = parse_state_spec(args.state)
    seed = _default_seed(args)
    cfg = optimizer.OptimizerConfig(restarts=12, max_iter=600, seed=seed)
    report = measures.measure_state(state, cfg, with_g=not args.no_g)
    _emit(
        args,
        seed,
        {
            "concurrence": report.concurrence,
            "entropy": report.entropy,
            "fef": report.fef,
            "g": report.g,
        },
    )


def _cmd_play(args) -> None:
    state = parse_state_spec(args.state)
    tactic = parse_tactic_spec(args.tactic, state)
    if args.game == "pnp":
        report = games.pnp_win(state, tactic, args.pp)
    else:
        report = games.bd_win(state, tactic, args.pp)
    _emit(args, None, _report_matrices(report))


def _cmd_tactic(args) -> None:
    state = parse_state_spec(args.state)
    tactic = tactics.build(args.name, state)
    game = games.GameSpec.pnp(0.5) if args.game == "pnp" else games.GameSpec.bd(0.5)
    report = tactics.evaluate(args.name, state, game)
    doc = stateio.tactic_to_dict(tactic)
    doc["predicted_win"] = report.win_probability
    doc["game"] = args.game
    if args.out:
        stateio.dump_tactic(tactic, args.out)
    _emit(args, None, doc)


def _cmd_optimize(args) -> None:
    state = parse_state_spec(args.state)
    seed = _default_seed(args)
    cfg = optimizer.OptimizerConfig(
        restarts=args.restarts,
        max_iter=args.max_iter,
        seed=seed,
        dimension=4 if args.ancilla else 2,
    )
    game = games.GameSpec.pnp(args.pp) if args.game == "pnp" else games.GameSpec.bd(args.pp)
    if args.separable:
        result = optimizer.optimize_separable(game, cfg)
    else:
        result = optimizer.optimize(state, game, cfg)
    _emit(
        args,
        seed,
        {
            "game": args.game,
            "best_value": result.best_value,
            "per_restart": result.per_restart.tolist(),
            "evaluations": result.evaluations,
            "tactic": stateio.tactic_to_dict(result.best_tactic),
        },
    )


def _cmd_sweep(args) -> None:
    if args.family != "werner":
        raise ValidationError(f"unknown sweep family {args.family!r}; expected 'werner'")
    seed = _default_seed(args)
    cfg = optimizer.OptimizerConfig(restarts=args.restarts, max_iter=args.max_iter, seed=seed)
    points = optimizer.werner_sweep(
        "with_ancilla" if args.ancilla else "bare", step=args.step, cfg=cfg
    )
    rows = [
        {
            "a": p.a,
            "p_opt": p.p_opt,
            "record_bound": p.record_bound,
            "concurrence_bound": p.concurrence_bound,
        }
        for p in points
    ]
    if args.out:
        _write_csv(args.out, ["a", "p_opt", "record_bound", "concurrence_bound"], rows)
    _emit(args, seed, {"family": "werner", "ancilla": bool(args.ancilla), "rows": len(rows), "out": args.out})


def _cmd_check(args) -> None:
    seed = _default_seed(args)
    if args.what == "lemma1":
        rho = parse_state_spec(args.state)
        sigma = parse_state_spec(args.sigma)
        rep = inequalities.lemma1_check(rho, sigma)
        _emit(args, None, {"lhs": rep.lhs, "rhs": rep.rhs, "slack": rep.slack, "holds": rep.holds})
    elif args.what == "tdineq":
        state = parse_state_spec(args.state)
        rho = state if isinstance(state, DensityMatrix) else state.density()
        tactic = parse_tactic_spec(args.tactic, state)
        rep = inequalities.td_inequality(rho, tactic.u_a, tactic.v_b)
        _emit(args, None, {"lhs": rep.lhs, "rhs": rep.rhs, "slack": rep.slack, "holds": rep.holds})
    elif args.what == "werner-scan":
        cfg = optimizer.OptimizerConfig(restarts=args.restarts, max_iter=args.max_iter, seed=seed)
        threshold, rows = inequalities.werner_violation_scan(step=args.step, cfg=cfg)
        if args.out:
            _write_csv(
                args.out,
                ["a", "max_violation"],
                [{"a": a, "max_violation": v} for a, v in rows],
            )
        _emit(args, seed, {"threshold": threshold, "points": len(rows), "out": args.out})
    else:  # sa
        sa = inequalities.SAState(args.rho00, complex(args.rho01_re, args.rho01_im))
        max_t, concurrence = inequalities.sa_pnp2_optimum(sa)
        _emit(
            args,
            None,
            {
                "max_trace_distance": max_t,
                "concurrence": concurrence,
                "pnp2_win": 0.5 * (1.0 + concurrence),
            },
        )


def _cmd_demo(args) -> None:
    seed = _default_seed(args)
    noise = circuits.NoiseModel(p1=args.p1, p2=args.p2, pm=args.pm)
    shots = None if args.shots == 0 else args.shots
    report = circuits.run_demo(args.game, noise, shots=shots, seed=seed, p_first=args.pp)
    rows = circuits.demo_csv_rows(report)
    if args.out:
        _write_csv(
            args.out,
            ["resource", "question", "per_question_win", "total_win", "classical_limit"],
            rows,
        )
    _emit(
        args,
        seed,
        {
            "game": report.game,
            "priors": dict(report.priors),
            "per_question": {f"{r}/{q}": v for (r, q), v in report.per_question.items()},
            "totals": dict(report.totals),
            "classical_limit": report.classical_limit,
            "usable_concurrence": report.usable_concurrence,
            "annotations": report.annotations,
            "noise": {"p1": noise.p1, "p2": noise.p2, "pm": noise.pm},
            "shots": shots,
            "out": args.out,
        },
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delocgames",
        description="Delocalised-interaction games: measures, exact play, optimization, checks, demos.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="entanglement measures of a state")
    p.add_argument("--state", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--no-g", action="store_true", help="skip the optimizer-based G value")
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("play", help="exact win probability for a fixed tactic")
    p.add_argument("--game", choices=("pnp", "bd"), required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--tactic", required=True)
    p.add_argument("--pp", type=float, default=0.5, help="prior of the first question")
    p.set_defaults(func=_cmd_play)

    p = sub.add_parser("tactic", help="build a catalogued tactic for a state")
    p.add_argument("--name", required=True, choices=sorted(tactics.RECIPES))
    p.add_argument("--state", required=True)
    p.add_argument("--game", choices=("pnp", "bd"), default="pnp")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_tactic)

    p = sub.add_parser("optimize", help="maximize the win probability over local unitaries")
    p.add_argument("--game", choices=("pnp", "bd"), required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--ancilla", action="store_true", help="grant the pure ancilla pair |00>")
    p.add_argument("--separable", action="store_true", help="optimize over product resources instead")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--pp", type=float, default=0.5)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("sweep", help="optimized win probabilities across a state family")
    p.add_argument("family", choices=("werner",))
    p.add_argument("--ancilla", action="store_true")
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("check", help="inequality and conditioned-game checks")
    p.add_argument("what", choices=("lemma1", "tdineq", "werner-scan", "sa"))
    p.add_argument("--state")
    p.add_argument("--sigma")
    p.add_argument("--tactic")
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--max-iter", type=int, default=600)
    p.add_argument("--rho00", type=float)
    p.add_argument("--rho01-re", type=float, default=0.0)
    p.add_argument("--rho01-im", type=float, default=0.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("demo", help="noisy four-qubit demonstration circuits")
    p.add_argument("--game", choices=("pnp", "bd"), required=True)
    p.add_argument("--pp", type=float, default=0.5, help="prior of the first question (psi+)")
    p.add_argument("--p1", type=float, default=0.0)
    p.add_argument("--p2", type=float, default=0.0)
    p.add_argument("--pm", type=float, default=0.0)
    p.add_argument("--shots", type=int, default=8192, help="0 scores the exact distribution")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
