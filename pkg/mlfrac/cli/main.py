"""Command-line front end: `python -m mlfrac <command>`."""
import argparse
import sys
from typing import Any, Dict, List, Optional, Union

import pandas as pd
from pydantic import ValidationError

from mlfrac import __version__
from mlfrac.models import (
    ArgInterpretation,
    ComparisonReport,
    EpidemicModel,
    EpidemicProblem,
    LogisticProblem,
    ModelName,
    OutputFormat,
    RhsSpec,
    RunConfig,
    SolutionCurve,
    SolveMethod,
    TableArtifact,
    TimeGrid,
)
from mlfrac.services import epidemic, logistic
from mlfrac.services.config import build_config
from mlfrac.services.errors import ConfigError, MethodMismatchError, MLFracError
from mlfrac.services.fractional import fabm_solve, residual_meter
from mlfrac.services.mllog import ml_inverse
from mlfrac.services.run_log import RunLogger, console
from mlfrac.services.tables import (
    build_figure1,
    build_table1,
    build_table2,
    write_frame,
    write_table,
)


EXIT_OK = 0
EXIT_LIBRARY_ERROR = 1
EXIT_VALIDATION_ERROR = 2
EXIT_IO_ERROR = 3

Problem = Union[LogisticProblem, EpidemicProblem]


# Commands

def cmd_table1(config: RunConfig) -> TableArtifact:
    artifact = build_table1(config)
    write_table(artifact, config)
    return artifact


def cmd_table2(config: RunConfig) -> TableArtifact:
    artifact = build_table2(config)
    write_table(artifact, config)
    return artifact


def cmd_figure1(config: RunConfig) -> pd.DataFrame:
    frame = build_figure1(config)
    write_frame(frame, config, table="figure1")
    return frame


def solve_curve(
    config: RunConfig,
    problem: Problem,
    model: ModelName,
    method: SolveMethod,
    grid: TimeGrid,
) -> SolutionCurve:
    """Dispatch a (model, method) pair to its solver."""
    ctrl = config.series_control()
    if model == ModelName.LOGISTIC:
        if method == SolveMethod.PAPER:
            return logistic.paper_curve(problem, config.interpretation, grid, ctrl)
        if method == SolveMethod.WEST:
            return logistic.west_curve(problem, grid, ctrl)
        if method == SolveMethod.FABM:
            return fabm_solve(
                RhsSpec.logistic(problem.k), problem.alpha, problem.u0, grid,
                config.corrector_passes, config.divergence_bound,
            )
        return logistic.classical_curve(problem.k, problem.u0, grid)

    epidemic_model = EpidemicModel(model.value)
    if method == SolveMethod.PAPER:
        return epidemic.closed_form_curve(
            problem, epidemic_model, config.interpretation, grid, ctrl,
            config.alpha_exponent_rates,
        )
    if method == SolveMethod.FABM:
        return epidemic.epidemic_fabm_reference(
            problem, epidemic_model, grid, config.corrector_passes, config.divergence_bound
        )
    if method == SolveMethod.CLASSICAL:
        return epidemic.classical_curve(problem, epidemic_model, grid)
    raise MethodMismatchError(f"method '{method.value}' is only defined for the logistic model")


def model_rhs(problem: Problem, model: ModelName) -> RhsSpec:
    if model == ModelName.LOGISTIC:
        return RhsSpec.logistic(problem.k)
    return epidemic.epidemic_rhs(problem, EpidemicModel(model.value))


def cmd_solve(
    config: RunConfig,
    problem: Problem,
    model: ModelName,
    method: SolveMethod,
    grid: TimeGrid,
) -> pd.DataFrame:
    curve = solve_curve(config, problem, model, method, grid)
    frame = curve.to_frame()
    if model != ModelName.LOGISTIC:
        frame["susceptible"] = [epidemic.susceptible(problem, i) for i in curve.values]
    write_frame(frame, config, model=model.value, method=method.value, alpha=problem.alpha)
    return frame


def report_frame(report: ComparisonReport) -> pd.DataFrame:
    """Deviations and residuals as one long (kind, name, value) frame."""
    rows: List[Dict[str, Any]] = [
        {"kind": "max_deviation", "name": pair, "value": value}
        for pair, value in sorted(report.deviations.items())
    ]
    for name, residual in sorted(report.residuals.items()):
        rows.append({"kind": "max_residual", "name": name, "value": residual.max_residual})
        rows.append({
            "kind": "scheme_error_estimate", "name": name,
            "value": residual.scheme_error_estimate,
        })
    return pd.DataFrame(rows, columns=["kind", "name", "value"])


def cmd_compare(
    config: RunConfig, problem: Problem, model: ModelName, grid: TimeGrid
) -> ComparisonReport:
    ctrl = config.series_control()
    if model == ModelName.LOGISTIC:
        report = logistic.compare_candidates(
            problem, grid, ctrl, config.skip_nodes, config.corrector_passes
        )
    else:
        report = epidemic.compare_epidemic(
            problem, EpidemicModel(model.value), grid, ctrl, config.skip_nodes,
            config.corrector_passes, config.alpha_exponent_rates,
        )
    extra: Dict[str, Any] = {"model": model.value, "alpha": problem.alpha}
    if report.notes:
        extra["notes"] = "; ".join(report.notes)
    write_frame(report_frame(report), config, **extra)
    return report


def cmd_residual(
    config: RunConfig,
    problem: Problem,
    model: ModelName,
    method: SolveMethod,
    grid: TimeGrid,
) -> pd.DataFrame:
    curve = solve_curve(config, problem, model, method, grid)
    report = residual_meter(curve, model_rhs(problem, model), problem.alpha, config.skip_nodes)
    frame = report.residual_curve.to_frame(column="residual")
    write_frame(
        frame, config,
        model=model.value, method=method.value, alpha=problem.alpha,
        max_residual=f"{report.max_residual:.12g}",
        scheme_error_estimate=f"{report.scheme_error_estimate:.12g}",
    )
    return frame


def cmd_inverse(config: RunConfig, alpha: float, ys: List[float]) -> pd.DataFrame:
    ctrl = config.series_control()
    rows = []
    for y in ys:
        result = ml_inverse(alpha, y, ctrl)
        rows.append({
            "y": result.y, "x": result.x,
            "iterations": result.iterations, "residual": result.residual,
        })
    frame = pd.DataFrame(rows, columns=["y", "x", "iterations", "residual"])
    write_frame(frame, config, alpha=alpha)
    return frame


# Argument parsing

def _config_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("configuration")
    group.add_argument("--config", help="flat JSON file of configuration keys")
    group.add_argument("--format", choices=[f.value for f in OutputFormat],
                       help="output format (default: csv)")
    group.add_argument("--out", help="output file (default: stdout)")
    group.add_argument("--tol", type=float, help="series truncation tolerance (default: 1e-14)")
    group.add_argument("--max-terms", type=int, help="series term cap (default: 500)")
    group.add_argument("--z-max", type=float, help="largest |z| for the power series (default: 50)")
    group.add_argument("--interp", choices=[i.value for i in ArgInterpretation],
                       help="reading of the integral in the closed form (default: jumarie)")
    group.add_argument("--alpha-exponent-rates", action="store_true", default=None,
                       help="raise epidemic rate factors to the power alpha")
    group.add_argument("--corrector-passes", type=int,
                       help="corrector evaluations per step, 1-5 (default: 1)")
    group.add_argument("--skip-nodes", type=int,
                       help="leading nodes excluded from residual maxima (default: 5)")
    return parent


def _problem_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("problem")
    group.add_argument("--model", choices=[m.value for m in ModelName], default="logistic")
    group.add_argument("--alpha", type=float, default=1.0, help="fractional order in (0, 1]")
    group.add_argument("--k", type=float, default=1.0, help="logistic growth rate")
    group.add_argument("--u0", type=float, default=0.1, help="logistic initial value in (0, 1)")
    group.add_argument("--N", type=float, default=1000.0, help="population size")
    group.add_argument("--beta", type=float, default=0.001, help="contact rate")
    group.add_argument("--lambda", dest="lambda_", type=float, default=0.0,
                       help="recovery rate (SIS)")
    group.add_argument("--I0", type=float, default=1.0, help="initial infected count")
    group.add_argument("--t-end", type=float, default=1.0, help="time horizon")
    group.add_argument("--steps", type=int, default=1000, help="grid steps")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlfrac",
        description="Mittag-Leffler logarithms and fractional logistic / SI / SIS solutions",
    )
    parser.add_argument("--version", action="version", version=f"mlfrac {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    config_parent = _config_parent()
    problem_parent = _problem_parent()

    sub.add_parser("table1", parents=[config_parent],
                   help="E_alpha(1) and log base E_alpha(1) for x in 0.1..10")
    sub.add_parser("table2", parents=[config_parent],
                   help="product and quotient rule examples")
    sub.add_parser("figure1", parents=[config_parent],
                   help="log base E_alpha(1) curves over x in [0.05, 10]")

    solve = sub.add_parser("solve", parents=[config_parent, problem_parent],
                           help="sample one solution curve")
    solve.add_argument("--method", choices=[m.value for m in SolveMethod], default="paper")

    sub.add_parser("compare", parents=[config_parent, problem_parent],
                   help="deviations and residuals of every candidate")

    residual = sub.add_parser("residual", parents=[config_parent, problem_parent],
                              help="Caputo residual of one candidate curve")
    residual.add_argument("--method", choices=[m.value for m in SolveMethod], default="paper")

    inverse = sub.add_parser("inverse", parents=[config_parent],
                             help="x with E_alpha(x) = y")
    inverse.add_argument("--alpha", type=float, default=1.0, help="order in (0, 1]")
    inverse.add_argument("--y", type=float, nargs="+", required=True, help="target values")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    flags = {
        "output_format": args.format,
        "output_path": args.out,
        "tol": args.tol,
        "max_terms": args.max_terms,
        "z_max": args.z_max,
        "interpretation": args.interp,
        "alpha_exponent_rates": args.alpha_exponent_rates,
        "corrector_passes": args.corrector_passes,
        "skip_nodes": args.skip_nodes,
    }
    return build_config(args.config, flags)


def problem_from_args(args: argparse.Namespace) -> Problem:
    if args.model == ModelName.LOGISTIC.value:
        return LogisticProblem(alpha=args.alpha, k=args.k, u0=args.u0)
    return EpidemicProblem(
        alpha=args.alpha, N=args.N, beta_contact=args.beta, lambda_=args.lambda_, I0=args.I0
    )


def _run(args: argparse.Namespace, config: RunConfig) -> None:
    command = args.command
    if command == "table1":
        cmd_table1(config)
    elif command == "table2":
        cmd_table2(config)
    elif command == "figure1":
        cmd_figure1(config)
    elif command == "inverse":
        cmd_inverse(config, args.alpha, args.y)
    else:
        problem = problem_from_args(args)
        model = ModelName(args.model)
        grid = TimeGrid(t_end=args.t_end, n_steps=args.steps)
        if command == "solve":
            cmd_solve(config, problem, model, SolveMethod(args.method), grid)
        elif command == "compare":
            cmd_compare(config, problem, model, grid)
        else:
            cmd_residual(config, problem, model, SolveMethod(args.method), grid)


def format_validation_error(exc: ValidationError) -> str:
    lines = []
    for error in exc.errors():
        field = ".".join(str(part) for part in error["loc"]) or "input"
        lines.append(f"{field}: {error['msg']}")
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the process exit status."""
    args = build_parser().parse_args(argv)
    log = RunLogger(args.command)
    try:
        config = config_from_args(args)
        log.log_action("start", {"config_hash": config.digest(), "argv": argv or sys.argv[1:]})
        _run(args, config)
    except ValidationError as e:
        console(f"invalid input:\n{format_validation_error(e)}")
        log.log_action("failed", {"error": str(e)}, success=False)
        return EXIT_VALIDATION_ERROR
    except (ConfigError, MethodMismatchError) as e:
        console(f"invalid input: {e}")
        log.log_action("failed", {"error": str(e)}, success=False)
        return EXIT_VALIDATION_ERROR
    except MLFracError as e:
        console(f"{type(e).__name__}: {e}")
        log.log_action("failed", {"error": str(e), "type": type(e).__name__}, success=False)
        return EXIT_LIBRARY_ERROR
    except OSError as e:
        console(f"I/O error: {e}")
        log.log_action("failed", {"error": str(e)}, success=False)
        return EXIT_IO_ERROR

    if config.output_path:
        console(f"{args.command}: wrote {config.output_path}")
    log.log_action("complete", {"output": config.output_path or "stdout"})
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
