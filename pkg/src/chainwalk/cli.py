"""Command-line front end.

Subcommands: ``graph`` (multigraph dump), ``hodge`` (decomposition of the
step field), ``sigma`` (exact diffusivity), ``simulate`` (Monte Carlo
estimate), ``verify`` (invariant suite).  Documents embed the chain
length, numeric mode, seed where applicable, and the tool version, and are
byte-identical for identical configurations.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 capacity
violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .errors import CapacityError
from .fields import (
    EXACT,
    FLOAT,
    divergence,
    field_values_json,
    fields_table_csv,
    gradient,
    hodge_decompose,
    inner_product,
    potential_values_json,
    scalar_to_json,
    sigma_squared_exact,
    step_field,
)
from .graph import build_graph, graph_to_json_dict
from .sim import estimate_sigma2, estimate_to_json_dict, simulate_trajectory, trajectory_csv
from .verify import DEFAULT_SEED, run_checks

#: Environment variable that re-roots relative ``--output`` paths.
OUTPUT_DIR_ENV = "CHAINWALK_OUT_DIR"


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _decimal(value: Fraction) -> float:
    # 12 significant digits, stored as the nearest double so JSON prints
    # the same rendering back.
    return float(f"{float(value):.12g}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainwalk",
        description="Shape multigraph, exact Hodge diffusivity, and Monte Carlo "
        "verification for a chain of height-constrained random walkers.",
    )
    parser.add_argument("--version", action="version", version=f"chainwalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_graph = sub.add_parser("graph", help="emit the shape multigraph")
    p_graph.add_argument("--k", type=_positive_int, required=True)
    p_graph.add_argument("--format", choices=("json", "text"), default="json")
    p_graph.add_argument("--output", default=None)

    p_hodge = sub.add_parser("hodge", help="decompose the signed step field")
    p_hodge.add_argument("--k", type=_positive_int, required=True)
    p_hodge.add_argument("--mode", choices=(EXACT, FLOAT), default=EXACT)
    p_hodge.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p_hodge.add_argument("--output", default=None)

    p_sigma = sub.add_parser("sigma", help="exact diffusivity from the graph")
    p_sigma.add_argument("--k", type=_positive_int, required=True)
    p_sigma.add_argument(
        "--method", choices=("auto", "solve", "closed-form"), default="auto"
    )
    p_sigma.add_argument("--format", choices=("json", "text"), default="text")
    p_sigma.add_argument("--output", default=None)

    p_sim = sub.add_parser("simulate", help="Monte Carlo variance estimate")
    p_sim.add_argument("--k", type=_positive_int, required=True)
    p_sim.add_argument("--steps", type=_positive_int, default=10_000)
    p_sim.add_argument("--trials", type=_positive_int, default=10_000)
    p_sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_sim.add_argument("--format", choices=("json", "text"), default="json")
    p_sim.add_argument("--output", default=None)
    p_sim.add_argument(
        "--trajectory-out",
        default=None,
        metavar="PATH",
        help="also write one simulated trajectory as CSV",
    )

    p_verify = sub.add_parser("verify", help="run the invariant suite")
    p_verify.add_argument("--k-max", type=_positive_int, default=8)
    p_verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_verify.add_argument("--format", choices=("text", "json"), default="text")
    p_verify.add_argument("--output", default=None)

    return parser


def _resolve_output(path: Optional[str]) -> Optional[Path]:
    if path is None:
        return None
    resolved = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not resolved.is_absolute():
        resolved = Path(base) / resolved
    return resolved


def _emit(payload: str, path: Optional[str]) -> None:
    target = _resolve_output(path)
    if target is None:
        sys.stdout.write(payload)
        return
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(payload)


def _json_doc(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _run_graph(args: argparse.Namespace) -> int:
    g = build_graph(args.k)
    if args.format == "json":
        doc = graph_to_json_dict(g)
        doc["version"] = __version__
        _emit(_json_doc(doc), args.output)
    else:
        lines = [
            f"k = {g.k}",
            f"vertices = {len(g.vertices)}",
            f"directed edges (loops included) = {g.total_directed_edges}",
            f"crossing edges = {g.crossing_count}",
        ]
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def _run_hodge(args: argparse.Namespace) -> int:
    g = build_graph(args.k)
    if args.format == "csv":
        _emit(fields_table_csv(g), args.output)
        return 0
    A = step_field(g, args.mode)
    f, B = hodge_decompose(A)
    grad_f = gradient(f)
    a_dot = inner_product(A, grad_f)
    div_b = divergence(B)
    max_residual = max(abs(v) for v in div_b.values)
    sigma = 1 - a_dot
    if args.format == "json":
        doc = {
            "k": g.k,
            "mode": args.mode,
            "version": __version__,
            "gauge": "all-ones vertex fixed to 0",
            "potential": potential_values_json(f),
            "divergence_free_part": field_values_json(B),
            "a_dot_grad_f": scalar_to_json(a_dot),
            "sigma_squared": scalar_to_json(sigma),
            "b_norm_squared": scalar_to_json(inner_product(B, B)),
            "max_divergence_residual": scalar_to_json(max_residual),
            "gradient_dot_b": scalar_to_json(inner_product(grad_f, B)),
        }
        _emit(_json_doc(doc), args.output)
    else:
        lines = [
            f"k = {g.k} (mode: {args.mode})",
            f"<A, grad f> = {a_dot}",
            f"sigma^2 = |A|^2 - <A, grad f> = {sigma}",
            f"max |div B| = {max_residual}",
        ]
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def _run_sigma(args: argparse.Namespace) -> int:
    method = args.method.replace("-", "_")
    result = sigma_squared_exact(args.k, method=method)
    if args.format == "json":
        doc = {
            "k": result.k,
            "mode": "exact",
            "version": __version__,
            "method": result.method,
            "sigma_squared": str(result.sigma_squared),
            "sigma_squared_decimal": _decimal(result.sigma_squared),
            "a_dot_grad_f": str(result.a_dot_grad_f),
            "b_norm_squared": str(result.b_norm_squared),
        }
        _emit(_json_doc(doc), args.output)
    else:
        _emit(
            f"sigma^2(k={result.k}) = {result.sigma_squared} "
            f"≈ {_decimal(result.sigma_squared):.12g}\n",
            args.output,
        )
    return 0


def _run_simulate(args: argparse.Namespace) -> int:
    est = estimate_sigma2(args.k, args.steps, args.trials, args.seed)
    closed = Fraction(2, args.k + 2)
    if args.trajectory_out is not None:
        trajectory = simulate_trajectory(args.k, args.steps, args.seed)
        _emit(trajectory_csv(trajectory), args.trajectory_out)
    if args.format == "json":
        doc = estimate_to_json_dict(est)
        doc["sigma_squared_closed_form"] = str(closed)
        doc["sigma_squared_closed_form_decimal"] = _decimal(closed)
        doc["version"] = __version__
        _emit(_json_doc(doc), args.output)
    else:
        pull = abs(est.point_estimate - float(closed)) / est.std_error
        _emit(
            f"k={est.k} steps={est.steps_per_trial} trials={est.trials} seed={est.seed}\n"
            f"estimate = {est.point_estimate:.6f} +- {est.std_error:.6f} "
            f"(closed form {closed} = {_decimal(closed):.12g}, {pull:.2f} se away)\n",
            args.output,
        )
    return 0


def _run_verify(args: argparse.Namespace) -> int:
    results = run_checks(args.k_max, seed=args.seed)
    all_passed = all(r.passed for r in results)
    if args.format == "json":
        doc = {
            "k_max": args.k_max,
            "seed": args.seed,
            "version": __version__,
            "checks": [
                {"name": r.name, "passed": r.passed, "detail": r.detail}
                for r in results
            ],
            "all_passed": all_passed,
        }
        _emit(_json_doc(doc), args.output)
    else:
        lines = [
            f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}" for r in results
        ]
        lines.append(
            f"{'all checks passed' if all_passed else 'SOME CHECKS FAILED'} "
            f"(k_max={args.k_max}, seed={args.seed})"
        )
        _emit("\n".join(lines) + "\n", args.output)
    return 0 if all_passed else 1


_RUNNERS = {
    "graph": _run_graph,
    "hodge": _run_hodge,
    "sigma": _run_sigma,
    "simulate": _run_simulate,
    "verify": _run_verify,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "simulate" and args.trials < 2:
            parser.error("simulate requires --trials >= 2")
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return _RUNNERS[args.command](args)
    except CapacityError as exc:
        print(f"chainwalk: capacity error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
