"""
Command-line front end.

Every command builds a :class:`Report` (summary fields plus a table with a
fixed column order) and renders it as an aligned table, CSV or JSON. CSV
output contains only the table; JSON contains both.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import analysis, gtc, serialization
from .errors import DqcError, ZeroProbabilityProjection
from .lcu import decompose_contraction
from .linalg import default_tolerance, tolerance, unitarity_residual
from .simulator import run_final_projection, run_swp_exact, run_swp_montecarlo

COMMANDS = ("decompose", "run", "montecarlo", "order-search", "ground-state", "sweep")

TRACE_COLUMNS = ["step", "closed_form_p", "simulated_p", "cumulative_product", "restarts", "elapsed_time"]
SWEEP_COLUMNS = ["M", "p", "Et", "Et_prime", "ratio"]

EPILOG = """\
CSV columns
  run, montecarlo, ground-state:
      step, closed_form_p, simulated_p, cumulative_product, restarts, elapsed_time
      (step M is the final slit projection; for montecarlo simulated_p is the
      empirical success rate, restarts the failures observed at that step and
      elapsed_time the gate time an attempt has spent once the step is reached)
  order-search:  order, p_0 .. p_M, Et, Et_prime, ratio
  sweep:         M, p, Et, Et_prime, ratio
  decompose:     quantity, value

Exit codes: 0 ok, 1 domain error (error name on stderr), 2 usage error.
The DQC_TOLERANCE environment variable sets the default tolerance.
"""


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    mode: str = "exact"
    seed: int = 0
    trials: int = 10_000
    tolerance: float = field(default_factory=default_tolerance)
    output_path: str | None = None
    format: str = "table"
    order: tuple[int, ...] | None = None
    runner: str = "swp"
    method: str | None = None
    top: int = 10
    m0: int | None = None
    terms: int | None = None
    p: float = 0.9
    m_max: int = 16
    m_values: tuple[int, ...] | None = None


@dataclass
class Report:
    command: str
    summary: dict[str, Any]
    columns: list[str]
    rows: list[list[Any]]


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be nonnegative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["table", "csv", "json"], default="table")
    common.add_argument("--output", "-o", dest="output_path", help="write the report here instead of stdout")
    common.add_argument("--tolerance", type=_positive_float, default=None,
                        help="structural-check tolerance (default: $DQC_TOLERANCE or 1e-9)")

    parser = argparse.ArgumentParser(
        prog="swpdqc",
        description="Duality quantum computing with subwave projections.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("decompose", parents=[common], help="average-of-two-unitaries decomposition of a contraction")
    p.add_argument("--matrix", dest="input_path", required=True)

    mc_args = argparse.ArgumentParser(add_help=False)
    mc_args.add_argument("--seed", type=_seed, default=0)
    mc_args.add_argument("--trials", type=_positive_int, default=10_000)

    p = sub.add_parser("run", parents=[common, mc_args], help="run a program file")
    p.add_argument("--program", dest="input_path", required=True)
    p.add_argument("--order", type=_int_list)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--runner", choices=["swp", "final"], default="swp",
                   help="subwave projections after every gate (swp) or one final projection")

    p = sub.add_parser("montecarlo", parents=[common, mc_args], help="sample the restart process")
    p.add_argument("--program", dest="input_path", required=True)
    p.add_argument("--order", type=_int_list)

    p = sub.add_parser("order-search", parents=[common], help="gate order minimizing the expected runtime")
    p.add_argument("--program", dest="input_path", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", dest="method", action="store_const", const="exhaustive")
    g.add_argument("--greedy", dest="method", action="store_const", const="greedy")
    p.add_argument("--top", type=_positive_int, default=10, help="rows to list for exhaustive search")

    p = sub.add_parser("ground-state", parents=[common], help="Chebyshev ground-state preparation")
    p.add_argument("--problem", dest="input_path", required=True)
    p.add_argument("--m0", type=_positive_int, help="override m0 = M0 / 2")
    p.add_argument("--terms", type=_positive_int, help="override the number of Chebyshev terms M")

    p = sub.add_parser("sweep", parents=[common], help="uniform-model runtime comparison")
    p.add_argument("--p", type=float, default=0.9)
    p.add_argument("--m-max", type=_positive_int, default=16, help="sweep M over powers of two up to this")
    p.add_argument("--m-values", type=_int_list, help="explicit list of M values")
    return parser


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    """Parse and validate the command line; usage errors exit with status 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = RunConfig(command=ns.command, input_path=getattr(ns, "input_path", None),
                    format=ns.format, output_path=ns.output_path)
    if ns.tolerance is not None:
        cfg.tolerance = ns.tolerance
    cfg.seed = getattr(ns, "seed", 0)
    cfg.trials = getattr(ns, "trials", 10_000)
    cfg.order = getattr(ns, "order", None)
    cfg.runner = getattr(ns, "runner", "swp")
    cfg.method = getattr(ns, "method", None)
    cfg.top = getattr(ns, "top", 10)
    cfg.m0 = getattr(ns, "m0", None)
    cfg.terms = getattr(ns, "terms", None)
    if ns.command == "montecarlo":
        cfg.mode = "mc"
    elif ns.command == "run":
        cfg.mode = ns.mode
        if ns.mode == "mc" and ns.runner != "swp":
            parser.error("--mode mc samples the subwave-projection runner only")
    if ns.command == "sweep":
        if not 0 < ns.p < 1:
            parser.error(f"--p must lie in (0, 1), got {ns.p}")
        cfg.p = ns.p
        cfg.m_max = ns.m_max
        cfg.m_values = ns.m_values
        if cfg.m_values is not None and (not cfg.m_values or min(cfg.m_values) < 1):
            parser.error("--m-values must list positive integers")
    return cfg


def _trace_rows(trace, closed_form: list[float], times: Sequence[float]) -> list[list[Any]]:
    rows = []
    cumulative = 1.0
    elapsed = 0.0
    gates = list(trace.order)
    for step, p in enumerate(trace.step_probabilities):
        cumulative *= p
        if trace.runner == "swp" and step < len(gates):
            elapsed += times[gates[step]]
        elif trace.runner == "final":
            elapsed = trace.elapsed_time
        expected = closed_form[step] if step < len(closed_form) else math.nan
        rows.append([step, expected, p, cumulative, trace.restarts, elapsed])
    return rows


def _program_closed_form(program, psi) -> tuple[list[float], float]:
    weights, b_values, expectation = analysis.program_inputs(program, psi)
    return analysis.closed_form_step_probs(weights, b_values, program.order, expectation), expectation


def _trace_summary(trace) -> dict[str, Any]:
    return {
        "runner": trace.runner,
        "order": list(trace.order),
        "step_probabilities": list(trace.step_probabilities),
        "overall_probability": trace.overall_probability,
        "final_state": None if trace.final_state is None else serialization.encode_vector(trace.final_state),
        "elapsed_time": trace.elapsed_time,
        "restarts": trace.restarts,
        "outcomes": trace.outcomes,
        "annihilated": trace.annihilated,
    }


def _load_program(cfg: RunConfig):
    program, psi = serialization.load_program(cfg.input_path)
    if cfg.order is not None:
        program = program.with_order(cfg.order)
    return program, psi


def cmd_decompose(cfg: RunConfig) -> Report:
    a = serialization.load_matrix(cfg.input_path)
    dec = decompose_contraction(a)
    residual = float(np.linalg.norm(a - dec.recombine(), 2))
    summary = {
        "u0": serialization.encode_matrix(dec.u0),
        "u1": serialization.encode_matrix(dec.u1),
        "residual": residual,
        "unitarity_u0": unitarity_residual(dec.u0),
        "unitarity_u1": unitarity_residual(dec.u1),
    }
    rows = [[k, summary[k]] for k in ("residual", "unitarity_u0", "unitarity_u1")]
    return Report("decompose", summary, ["quantity", "value"], rows)


def cmd_run(cfg: RunConfig) -> Report:
    program, psi = _load_program(cfg)
    if cfg.mode == "mc":
        return cmd_montecarlo(cfg, program, psi)
    closed, expectation = _program_closed_form(program, psi)
    if cfg.runner == "final":
        trace = run_final_projection(program, psi)
    else:
        trace = run_swp_exact(program, psi)
    if trace.annihilated:
        raise ZeroProbabilityProjection("the program annihilates the initial state; no run can succeed")
    model = analysis.timing_model(closed, program.times, program.order)
    summary = _trace_summary(trace)
    summary.update(Et=model.et_swp, Et_prime=model.et_final, expectation=expectation)
    expected = [expectation] if cfg.runner == "final" else closed
    return Report("run", summary, TRACE_COLUMNS, _trace_rows(trace, expected, program.times))


def cmd_montecarlo(cfg: RunConfig, program=None, psi=None) -> Report:
    if program is None:
        program, psi = _load_program(cfg)
    mc = run_swp_montecarlo(program, psi, seed=cfg.seed, trials=cfg.trials)
    closed, _ = _program_closed_form(program, psi)
    rates = mc.empirical_rates
    gate_times = [program.times[g] for g in program.order]
    reached = np.concatenate([np.cumsum(gate_times), [sum(gate_times)]])
    rows = []
    cumulative = 1.0
    for step in range(len(rates)):
        cumulative *= rates[step]
        failures = int(mc.step_attempts[step] - mc.step_successes[step])
        rows.append([step, closed[step], float(rates[step]), float(cumulative), failures, float(reached[step])])
    summary = {
        "trials": mc.trials,
        "seed": mc.seed,
        "order": list(program.order),
        "exact_probabilities": mc.exact_probabilities,
        "mean_attempts": mc.mean_attempts,
        "mean_restarts": mc.mean_restarts,
        "mean_elapsed_time": mc.mean_elapsed_time,
        "elapsed_time_stderr": mc.elapsed_stderr,
        "Et": analysis.mean_time_swp(mc.exact_probabilities, program.times, program.order),
    }
    return Report("montecarlo", summary, TRACE_COLUMNS, rows)


def _order_row(cand: analysis.OrderCandidate) -> list[Any]:
    m = cand.model
    return [",".join(map(str, cand.order)), *cand.probs, m.et_swp, m.et_final, m.ratio]


def cmd_order_search(cfg: RunConfig) -> Report:
    program, psi = _load_program(cfg)
    weights, b_values, expectation = analysis.program_inputs(program, psi)
    result = analysis.search_orders(weights, b_values, program.times, expectation, cfg.method)
    M = program.M
    columns = ["order", *[f"p_{i}" for i in range(M + 1)], "Et", "Et_prime", "ratio"]
    if result.method == "exhaustive":
        cands = sorted(analysis.all_orders(weights, b_values, program.times, expectation),
                       key=lambda c: c.model.et_swp)[: cfg.top]
    else:
        cands = [analysis.evaluate_order(weights, b_values, program.times, o, expectation)
                 for o in dict.fromkeys([result.best_order, tuple(range(M))])]
    summary = {
        "best_order": list(result.best_order),
        "best_et": result.best_et,
        "identity_et": result.identity_et,
        "method": result.method,
        "evaluated": result.evaluated,
        "b_values": [float(b) for b in b_values],
    }
    return Report("order-search", summary, columns, [_order_row(c) for c in cands])


def cmd_ground_state(cfg: RunConfig) -> Report:
    problem, overrides = serialization.load_problem(cfg.input_path)
    m0 = cfg.m0 if cfg.m0 is not None else overrides["m0"]
    terms = cfg.terms if cfg.terms is not None else overrides["M"]
    result = gtc.prepare_ground_state(problem, m0=m0, M=terms)
    plan, trace = result.plan, result.trace
    program = plan.program
    closed, _ = _program_closed_form(program, problem.trial)
    model = analysis.timing_model(trace.step_probabilities, program.times, program.order)
    lay = program.layout
    summary = {
        "M0": plan.M0,
        "m0": plan.m0,
        "M": plan.M,
        "alphas": list(plan.alphas),
        "alpha_sum": plan.alpha_sum,
        "gap": problem.gap,
        "phi0": problem.phi0,
        "qubits": lay.qubits,
        "register_dim": lay.dim,
        "fidelity": result.fidelity,
        "overall_probability": trace.overall_probability,
        "state": serialization.encode_vector(result.state),
        "Et": model.et_swp,
        "Et_prime": model.et_final,
        "ratio": model.ratio,
    }
    return Report("ground-state", summary, TRACE_COLUMNS, _trace_rows(trace, closed, program.times))


def cmd_sweep(cfg: RunConfig) -> Report:
    if cfg.m_values is not None:
        m_values = list(cfg.m_values)
    else:
        m_values = [2**k for k in range(cfg.m_max.bit_length()) if 2**k <= cfg.m_max]
    rows = [[r.M, r.p, r.et, r.et_prime, r.ratio] for r in analysis.speedup_sweep(cfg.p, m_values)]
    return Report("sweep", {"p": cfg.p, "M": m_values}, SWEEP_COLUMNS, rows)


HANDLERS = {
    "decompose": cmd_decompose,
    "run": cmd_run,
    "montecarlo": cmd_montecarlo,
    "order-search": cmd_order_search,
    "ground-state": cmd_ground_state,
    "sweep": cmd_sweep,
}


def _cell(x: Any) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        payload = {"command": report.command, **report.summary,
                   "columns": report.columns, "rows": [dict(zip(report.columns, r)) for r in report.rows]}
        return json.dumps(payload, indent=2, allow_nan=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.columns)
        writer.writerows([[repr(c) if isinstance(c, float) else c for c in r] for r in report.rows])
        return buf.getvalue()
    lines = []
    for key, value in report.summary.items():
        if value is None:
            continue
        if isinstance(value, list) and value and isinstance(value[0], list):
            continue  # matrices and state vectors only appear in JSON
        if isinstance(value, list):
            value = ", ".join(_cell(v) for v in value)
        lines.append(f"{key}: {_cell(value)}")
    cells = [report.columns] + [[_cell(c) for c in r] for r in report.rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(report.columns))]
    lines.append("")
    for k, row in enumerate(cells):
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def execute(cfg: RunConfig) -> int:
    """Run a parsed command; returns the process exit code."""
    try:
        with tolerance(cfg.tolerance):
            report = HANDLERS[cfg.command](cfg)
    except DqcError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return 1
    text = render(report, cfg.format)
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    cfg = parse_args(argv)
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
