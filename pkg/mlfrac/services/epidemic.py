"""Fractional SI and SIS epidemic models with closed population S + I = N."""
import math
from typing import Optional

from mlfrac.models import (
    ArgInterpretation,
    ComparisonReport,
    EpidemicModel,
    EpidemicProblem,
    RhsSpec,
    SeriesControl,
    SolutionCurve,
    TimeGrid,
)
from mlfrac.services.errors import DegenerateModelError
from mlfrac.services.fractional import DEFAULT_DIVERGENCE_BOUND, DEFAULT_SKIP_NODES, fabm_solve
from mlfrac.services.logistic import build_report, classical_logistic, growth_reciprocal, integral_term


def endemic_level(problem: EpidemicProblem) -> float:
    """
    A = N - lambda / beta for SIS.

    Raises:
        DegenerateModelError: A <= 0, the infection dies out and the closed form is singular
    """
    level = problem.endemic_level
    if level <= 0:
        raise DegenerateModelError(
            f"A = N - lambda/beta = {level:g} <= 0: recovery outpaces contact, "
            "the infection dies out and there is no endemic state"
        )
    return level


def _capacity(problem: EpidemicProblem, model: EpidemicModel) -> float:
    return problem.N if model == EpidemicModel.SI else endemic_level(problem)


def contact_rate(
    problem: EpidemicProblem, capacity: float, alpha_exponent: bool = False
) -> float:
    """Rate factor capacity * beta, raised to alpha when `alpha_exponent` is set."""
    rate = capacity * problem.beta_contact
    return rate ** problem.alpha if alpha_exponent else rate


def _closed_form(
    problem: EpidemicProblem,
    capacity: float,
    interp: ArgInterpretation,
    t: float,
    ctrl: Optional[SeriesControl],
    alpha_exponent: bool,
) -> float:
    rate = contact_rate(problem, capacity, alpha_exponent)
    z = integral_term(rate, problem.alpha, interp, t)
    if z == 0.0:
        return problem.I0
    reciprocal = growth_reciprocal(problem.alpha, z, ctrl)
    return capacity / (1.0 + ((capacity - problem.I0) / problem.I0) * reciprocal)


def si_closed_form(
    problem: EpidemicProblem,
    interp: ArgInterpretation,
    t: float,
    ctrl: Optional[SeriesControl] = None,
    alpha_exponent: bool = False,
) -> float:
    """Infected count I(t) = N / (1 + ((N - I0) / I0) / E_alpha(z(t))) with rate N*beta."""
    return _closed_form(problem, problem.N, interp, t, ctrl, alpha_exponent)


def sis_closed_form(
    problem: EpidemicProblem,
    interp: ArgInterpretation,
    t: float,
    ctrl: Optional[SeriesControl] = None,
    alpha_exponent: bool = False,
) -> float:
    """
    Infected count I(t) = A / (1 + ((A - I0) / I0) / E_alpha(z(t))) with rate A*beta.

    I0 >= A is allowed and gives decay toward A.
    """
    return _closed_form(problem, endemic_level(problem), interp, t, ctrl, alpha_exponent)


def susceptible(problem: EpidemicProblem, infected: float) -> float:
    """S = N - I (no removed class)."""
    return problem.N - infected


def classical_closed_form(problem: EpidemicProblem, model: EpidemicModel, t: float) -> float:
    """alpha = 1 solution: the logistic curve scaled by the capacity N or A."""
    capacity = _capacity(problem, model)
    return capacity * classical_logistic(capacity * problem.beta_contact, problem.I0 / capacity, t)


def epidemic_rhs(problem: EpidemicProblem, model: EpidemicModel) -> RhsSpec:
    if model == EpidemicModel.SI:
        return RhsSpec.si(problem.N, problem.beta_contact)
    return RhsSpec.sis(endemic_level(problem), problem.beta_contact)


def closed_form_curve(
    problem: EpidemicProblem,
    model: EpidemicModel,
    interp: ArgInterpretation,
    grid: TimeGrid,
    ctrl: Optional[SeriesControl] = None,
    alpha_exponent: bool = False,
) -> SolutionCurve:
    capacity = _capacity(problem, model)
    values = [
        _closed_form(problem, capacity, interp, t, ctrl, alpha_exponent) for t in grid.nodes()
    ]
    return SolutionCurve(grid=grid, values=values, label=f"paper_{interp.value}")


def classical_curve(
    problem: EpidemicProblem, model: EpidemicModel, grid: TimeGrid
) -> SolutionCurve:
    values = [classical_closed_form(problem, model, t) for t in grid.nodes()]
    return SolutionCurve(grid=grid, values=values, label="classical")


def epidemic_fabm_reference(
    problem: EpidemicProblem,
    model: EpidemicModel,
    grid: TimeGrid,
    corrector_passes: int = 1,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> SolutionCurve:
    """Predictor-corrector solution of D^alpha I = beta I (C - I), C = N (SI) or A (SIS)."""
    bound = max(divergence_bound, 10.0 * problem.N)
    return fabm_solve(
        epidemic_rhs(problem, model), problem.alpha, problem.I0, grid, corrector_passes, bound
    )


def compare_epidemic(
    problem: EpidemicProblem,
    model: EpidemicModel,
    grid: TimeGrid,
    ctrl: Optional[SeriesControl] = None,
    skip_nodes: int = DEFAULT_SKIP_NODES,
    corrector_passes: int = 1,
    alpha_exponent: bool = False,
) -> ComparisonReport:
    """Closed forms under both integral readings against the predictor-corrector reference."""
    curves = {
        f"paper_{interp.value}": closed_form_curve(problem, model, interp, grid, ctrl, alpha_exponent)
        for interp in ArgInterpretation
    }
    curves["fabm"] = epidemic_fabm_reference(problem, model, grid, corrector_passes)
    notes = []
    if alpha_exponent:
        notes.append("rate factor raised to alpha")
    if not math.isclose(problem.alpha, 1.0) and not alpha_exponent:
        notes.append("rate factor used as printed, without an alpha exponent")
    return build_report(curves, epidemic_rhs(problem, model), problem.alpha, skip_nodes, notes)
