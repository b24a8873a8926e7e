import numpy as np
import pytest

from mlfrac.models import ArgInterpretation, EpidemicModel, EpidemicProblem, TimeGrid
from mlfrac.services.epidemic import (
    classical_closed_form,
    closed_form_curve,
    compare_epidemic,
    contact_rate,
    endemic_level,
    epidemic_fabm_reference,
    si_closed_form,
    sis_closed_form,
    susceptible,
)
from mlfrac.services.errors import DegenerateModelError


JUMARIE = ArgInterpretation.JUMARIE_CONVOLUTION


def make_problem(alpha=1.0, lam=0.0, beta=0.001, N=1000.0, I0=1.0):
    return EpidemicProblem(alpha=alpha, N=N, beta_contact=beta, lambda_=lam, I0=I0)


# Test long-time limits
def test_si_reaches_whole_population():
    problem = make_problem()
    # E_alpha argument is N * beta * t = 30
    assert si_closed_form(problem, JUMARIE, 30.0) >= 0.999999 * problem.N


def test_sis_reaches_endemic_level():
    problem = make_problem(lam=0.2)
    level = endemic_level(problem)
    assert level == pytest.approx(800.0)
    assert sis_closed_form(problem, JUMARIE, 40.0) == pytest.approx(level, rel=1e-6)


def test_sis_without_recovery_is_si():
    si = make_problem(alpha=0.7)
    sis = make_problem(alpha=0.7, lam=0.0)
    for t in [0.0, 0.5, 2.0, 5.0]:
        for interp in ArgInterpretation:
            assert sis_closed_form(sis, interp, t) == pytest.approx(
                si_closed_form(si, interp, t), rel=1e-12
            )


def test_initial_value():
    problem = make_problem(alpha=0.5, lam=0.1)
    assert si_closed_form(problem, JUMARIE, 0.0) == problem.I0
    assert sis_closed_form(problem, JUMARIE, 0.0) == problem.I0


def test_sis_decays_from_above_endemic_level():
    problem = make_problem(lam=0.5, I0=900.0)
    level = endemic_level(problem)
    values = [sis_closed_form(problem, JUMARIE, t) for t in [0.0, 1.0, 5.0, 40.0]]
    assert values[0] > values[1] > values[2] > level
    assert values[3] == pytest.approx(level, rel=1e-6)


def test_degenerate_sis():
    problem = make_problem(N=100.0, lam=0.2)
    with pytest.raises(DegenerateModelError) as exc:
        sis_closed_form(problem, JUMARIE, 1.0)
    assert "dies out" in str(exc.value)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8, 1.0])
def test_sis_rises_monotonically_to_endemic_level(alpha):
    problem = make_problem(alpha=alpha, lam=0.2)
    level = endemic_level(problem)
    times = np.linspace(0.0, 10.0, 101)
    values = np.array([sis_closed_form(problem, JUMARIE, t) for t in times])
    assert values[0] == problem.I0
    assert np.all((values[1:] > problem.I0) & (values[1:] <= level))
    steps = np.diff(values)
    assert np.all(steps >= 0.0)
    assert np.all(steps[values[1:] < level * (1.0 - 1e-12)] > 0.0)


def test_si_saturates_when_growth_leaves_double_range():
    # E_0.1 at argument near 10 is far beyond the largest double
    problem = make_problem(alpha=0.1, beta=0.01)
    assert si_closed_form(problem, JUMARIE, 1.0) == problem.N


# Test the closed population
def test_susceptible_conserves_population():
    problem = make_problem(alpha=0.6)
    grid = TimeGrid(t_end=10.0, n_steps=50)
    curve = closed_form_curve(problem, EpidemicModel.SI, JUMARIE, grid)
    for infected in curve.values:
        assert susceptible(problem, infected) + infected == pytest.approx(problem.N)
        assert 0.0 <= susceptible(problem, infected) <= problem.N


def test_larger_contact_rate_infects_more():
    t = 3.0
    low = si_closed_form(make_problem(alpha=0.7, beta=0.001), JUMARIE, t)
    high = si_closed_form(make_problem(alpha=0.7, beta=0.002), JUMARIE, t)
    assert high > low


def test_alpha_exponent_rates():
    problem = make_problem(alpha=0.5, beta=0.004)
    assert contact_rate(problem, problem.N) == pytest.approx(4.0)
    assert contact_rate(problem, problem.N, alpha_exponent=True) == pytest.approx(2.0)
    plain = si_closed_form(problem, JUMARIE, 1.0)
    damped = si_closed_form(problem, JUMARIE, 1.0, alpha_exponent=True)
    assert damped < plain


# Test the alpha = 1 references
@pytest.mark.parametrize("model", list(EpidemicModel))
def test_classical_matches_closed_form_at_order_one(model):
    problem = make_problem(lam=0.3)
    for t in [0.0, 1.0, 4.0, 12.0]:
        assert classical_closed_form(problem, model, t) == pytest.approx(
            si_closed_form(problem, JUMARIE, t) if model == EpidemicModel.SI
            else sis_closed_form(problem, JUMARIE, t),
            rel=1e-12,
        )


def test_fabm_reference_at_order_one():
    problem = make_problem(lam=0.2)
    grid = TimeGrid(t_end=10.0, n_steps=1000)
    curve = epidemic_fabm_reference(problem, EpidemicModel.SIS, grid)
    expected = classical_closed_form(problem, EpidemicModel.SIS, 10.0)
    assert curve.final_value == pytest.approx(expected, rel=1e-3)


def test_compare_epidemic():
    problem = make_problem(lam=0.2)
    report = compare_epidemic(problem, EpidemicModel.SIS, TimeGrid(t_end=10.0, n_steps=500))
    assert set(report.residuals) == {"paper_jumarie", "paper_substitution", "fabm"}
    assert report.deviations["fabm|paper_jumarie"] < 1e-3 * problem.N
    assert report.notes == []


def test_compare_epidemic_fractional_notes():
    problem = make_problem(alpha=0.8)
    report = compare_epidemic(
        problem, EpidemicModel.SI, TimeGrid(t_end=5.0, n_steps=200), alpha_exponent=True
    )
    assert report.notes == ["rate factor raised to alpha"]
    assert np.all(np.isfinite(report.frame["fabm"]))


def test_problem_validation():
    with pytest.raises(ValueError):
        make_problem(I0=1000.0)
    with pytest.raises(ValueError):
        make_problem(alpha=1.5)
