"""Closed-form and series candidates for the fractional logistic equation."""
import itertools
import math
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from mlfrac.models import (
    ArgInterpretation,
    ComparisonReport,
    LogisticProblem,
    MLBranch,
    MLParams,
    MLValue,
    PrecisionFlag,
    RhsSpec,
    SeriesControl,
    SolutionCurve,
    TimeGrid,
)
from mlfrac.services.errors import ConvergenceDomainError, DomainError, MLOverflowError
from mlfrac.services.fractional import (
    DEFAULT_SKIP_NODES,
    fabm_solve,
    residual_meter,
)
from mlfrac.services.mlcore import DEFAULT_CONTROL, gamma_fn, ml_eval


def _check_time(t: float) -> None:
    if not (t >= 0 and math.isfinite(t)):
        raise DomainError(f"time must be finite and non-negative, got {t}")


def classical_logistic(k: float, u0: float, t: float) -> float:
    """u0 / (u0 + (1 - u0) exp(-k t)), the exact solution at alpha = 1."""
    _check_time(t)
    return u0 / (u0 + (1.0 - u0) * math.exp(-k * t))


def integral_factor(alpha: float, interp: ArgInterpretation) -> float:
    """
    Value of (1 / Gamma(2 - alpha)) * int t^(1-alpha) dt^alpha per unit time.

    jumarie: alpha * int_0^t (t - s)^(alpha-1) s^(1-alpha) ds = Gamma(1+alpha) Gamma(2-alpha) t
    substitution: dt^alpha = alpha t^(alpha-1) dt gives alpha t
    Both readings collapse to t at alpha = 1.
    """
    if interp == ArgInterpretation.JUMARIE_CONVOLUTION:
        return gamma_fn(1.0 + alpha)
    return alpha / gamma_fn(2.0 - alpha)


def integral_term(rate: float, alpha: float, interp: ArgInterpretation, t: float) -> float:
    """(rate / Gamma(2 - alpha)) * int t^(1-alpha) dt^alpha under `interp`."""
    _check_time(t)
    return rate * integral_factor(alpha, interp) * t


def ml_argument(problem: LogisticProblem, interp: ArgInterpretation, t: float) -> float:
    """Argument of E_alpha in the closed form, with rate k^alpha."""
    return integral_term(problem.k ** problem.alpha, problem.alpha, interp, t)


def growth_reciprocal(alpha: float, z: float, ctrl: Optional[SeriesControl] = None) -> float:
    """1 / E_alpha(z), or 0.0 once E_alpha(z) leaves the double range with z <= z_max."""
    try:
        return 1.0 / ml_eval(MLParams(alpha=alpha), z, ctrl).value
    except MLOverflowError:
        if z > (ctrl or DEFAULT_CONTROL).z_max:
            raise
        return 0.0


def paper_closed_form(
    problem: LogisticProblem,
    interp: ArgInterpretation,
    t: float,
    ctrl: Optional[SeriesControl] = None,
) -> float:
    """
    u(t) = 1 / (1 + ((1 - u0) / u0) / E_alpha(z(t))), z from ml_argument.

    The constant u0 / (1 - u0) is fixed at t = 0, where E_alpha(0) = 1.
    """
    z = ml_argument(problem, interp, t)
    if z == 0.0:
        return problem.u0
    reciprocal = growth_reciprocal(problem.alpha, z, ctrl)
    return 1.0 / (1.0 + ((1.0 - problem.u0) / problem.u0) * reciprocal)


def west_series(
    problem: LogisticProblem, t: float, ctrl: Optional[SeriesControl] = None
) -> MLValue:
    """
    Carleman-embedding series u(t) = sum_n r^n E_alpha(-n k^alpha t^alpha), r = (u0 - 1) / u0.

    Converges only for |r| < 1, i.e. u0 > 1/2.

    Returns:
        MLValue, flagged degraded when any E_alpha term lost precision or
        max_terms was reached first; est_error is then the last term

    Raises:
        ConvergenceDomainError: u0 <= 1/2
    """
    _check_time(t)
    ratio = (problem.u0 - 1.0) / problem.u0
    if abs(ratio) >= 1.0:
        raise ConvergenceDomainError(
            f"series diverges for u0={problem.u0:g} (|(u0-1)/u0| = {abs(ratio):.4g} >= 1)"
        )
    if t == 0.0:
        return MLValue(value=problem.u0, est_error=0.0, terms_used=0)

    ctrl = ctrl or DEFAULT_CONTROL
    params = MLParams(alpha=problem.alpha)
    scale = (problem.k * t) ** problem.alpha
    total = 1.0
    degraded = False
    power = 1.0
    term = 1.0
    for n in range(1, ctrl.max_terms):
        power *= ratio
        term_value = ml_eval(params, -n * scale, ctrl)
        degraded = degraded or term_value.precision_flag == PrecisionFlag.DEGRADED
        term = power * term_value.value
        total += term
        if abs(term) < ctrl.tol * abs(total):
            return MLValue(
                value=total,
                est_error=abs(term),
                terms_used=n + 1,
                precision_flag=PrecisionFlag.DEGRADED if degraded else PrecisionFlag.OK,
                branch=MLBranch.SERIES,
            )
    return MLValue(
        value=total,
        est_error=abs(term),
        terms_used=ctrl.max_terms,
        precision_flag=PrecisionFlag.DEGRADED,
        branch=MLBranch.SERIES,
    )


def paper_curve(
    problem: LogisticProblem,
    interp: ArgInterpretation,
    grid: TimeGrid,
    ctrl: Optional[SeriesControl] = None,
) -> SolutionCurve:
    values = [paper_closed_form(problem, interp, t, ctrl) for t in grid.nodes()]
    return SolutionCurve(grid=grid, values=values, label=f"paper_{interp.value}")


def west_curve(
    problem: LogisticProblem, grid: TimeGrid, ctrl: Optional[SeriesControl] = None
) -> SolutionCurve:
    values = [west_series(problem, t, ctrl).value for t in grid.nodes()]
    return SolutionCurve(grid=grid, values=values, label="west")


def classical_curve(k: float, u0: float, grid: TimeGrid) -> SolutionCurve:
    values = [classical_logistic(k, u0, t) for t in grid.nodes()]
    return SolutionCurve(grid=grid, values=values, label="classical")


def max_deviations(curves: Dict[str, SolutionCurve]) -> Dict[str, float]:
    """Pairwise max |a - b| keyed 'a|b' with names sorted."""
    deviations = {}
    for a, b in itertools.combinations(sorted(curves), 2):
        deviations[f"{a}|{b}"] = float(np.max(np.abs(curves[a].values - curves[b].values)))
    return deviations


def build_report(
    curves: Dict[str, SolutionCurve],
    rhs: RhsSpec,
    alpha: float,
    skip_nodes: int,
    notes: List[str],
) -> ComparisonReport:
    grid = next(iter(curves.values())).grid
    frame = pd.DataFrame({"t": grid.nodes()})
    for name in sorted(curves):
        frame[name] = curves[name].values
    residuals = {
        name: residual_meter(curve, rhs, alpha, skip_nodes) for name, curve in curves.items()
    }
    return ComparisonReport(
        frame=frame,
        deviations=max_deviations(curves),
        residuals=residuals,
        notes=notes,
    )


def compare_candidates(
    problem: LogisticProblem,
    grid: TimeGrid,
    ctrl: Optional[SeriesControl] = None,
    skip_nodes: int = DEFAULT_SKIP_NODES,
    corrector_passes: int = 1,
) -> ComparisonReport:
    """
    Put every candidate solution of the fractional logistic equation side by side.

    Candidates: the closed form under both integral readings, the Carleman
    series (only when u0 > 1/2) and the predictor-corrector reference. Each is
    scored by its Caputo residual against D^alpha u = k^alpha u (1 - u).
    """
    curves = {
        f"paper_{interp.value}": paper_curve(problem, interp, grid, ctrl)
        for interp in ArgInterpretation
    }
    notes = []
    if problem.u0 > 0.5:
        curves["west"] = west_curve(problem, grid, ctrl)
    else:
        notes.append(f"west series omitted: diverges for u0={problem.u0:g} <= 1/2")
    curves["fabm"] = fabm_solve(
        RhsSpec.logistic(problem.k), problem.alpha, problem.u0, grid, corrector_passes
    )
    return build_report(curves, RhsSpec.logistic(problem.k), problem.alpha, skip_nodes, notes)
