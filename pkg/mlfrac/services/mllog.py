"""Logarithms built on the Mittag-Leffler function."""
import math
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from mlfrac.models import InverseResult, LogBaseContext, MLParams, PropositionReport, SeriesControl
from mlfrac.services.errors import (
    BracketError,
    DomainError,
    MLOverflowError,
    NoConvergenceError,
)
from mlfrac.services.mlcore import DEFAULT_CONTROL, EPS, NEGATIVE_REACH, ml_deriv, ml_eval


INVERSE_REL_TOL = 1e-10
MAX_INVERSE_ITERATIONS = 200


def _check_order(alpha: float) -> None:
    if not (0 < alpha <= 1):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")


@lru_cache(maxsize=128)
def _log_context(alpha: float, ctrl: SeriesControl) -> LogBaseContext:
    base = ml_eval(MLParams(alpha=alpha), 1.0, ctrl).value
    return LogBaseContext(alpha=alpha, base_value=base, ln_base=math.log(base))


def make_log_context(alpha: float, ctrl: Optional[SeriesControl] = None) -> LogBaseContext:
    """
    Build the base b = E_alpha(1) for the ordinary base-b logarithm.

    Args:
        alpha: Order in (0, 1]
        ctrl: Series controls used to evaluate E_alpha(1)

    Returns:
        Immutable LogBaseContext, cached per (alpha, ctrl)
    """
    _check_order(alpha)
    return _log_context(float(alpha), ctrl or DEFAULT_CONTROL)


def ml_log(ctx: LogBaseContext, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """log_{E_alpha(1)}(x) = ln(x) / ln(E_alpha(1)), elementwise for arrays."""
    values = np.asarray(x, dtype=float)
    if not np.all(values > 0):
        bad = values[~(values > 0)] if values.ndim else values
        raise DomainError(f"logarithm requires x > 0, got {float(np.min(bad))}")
    result = np.log(values) / ctx.ln_base
    return float(result) if result.ndim == 0 else result


class _Target:
    """E_alpha(x) - y with overflow and positive-side non-convergence mapped to +inf."""

    def __init__(self, params: MLParams, y: float, ctrl: SeriesControl):
        self.params = params
        self.y = y
        self.ctrl = ctrl

    def gap(self, x: float) -> float:
        try:
            return ml_eval(self.params, x, self.ctrl).value - self.y
        except MLOverflowError:
            return math.inf
        except NoConvergenceError as exc:
            # positive terms: any partial sum is a lower bound
            if x > 0 and exc.partial_sum is not None and exc.partial_sum > self.y:
                return math.inf
            raise

    def slope(self, x: float) -> float:
        try:
            return ml_deriv(self.params, x, self.ctrl).value
        except (MLOverflowError, NoConvergenceError):
            return math.inf


def _bracket(target: _Target, ctrl: SeriesControl):
    lo, hi = -1.0, 1.0
    gap_hi = target.gap(hi)
    while gap_hi < 0:
        lo = hi
        if hi >= ctrl.z_max:
            raise BracketError(
                f"y={target.y:g} exceeds E_alpha(z_max) for alpha={target.params.alpha:g}"
            )
        hi = min(2.0 * hi, ctrl.z_max)
        gap_hi = target.gap(hi)

    gap_lo = target.gap(lo)
    while gap_lo > 0:
        hi, gap_hi = lo, gap_lo
        if lo <= -NEGATIVE_REACH:
            raise BracketError(
                f"y={target.y:g} is below the attainable range for alpha={target.params.alpha:g}"
            )
        lo = max(2.0 * lo, -NEGATIVE_REACH)
        gap_lo = target.gap(lo)
    return lo, hi, gap_lo, gap_hi


def ml_inverse(alpha: float, y: float, ctrl: Optional[SeriesControl] = None) -> InverseResult:
    """
    Functional inverse L_alpha(y): the x with E_alpha(x) = y.

    A bracket [lo, hi] starting from [-1, 1] is doubled outward until it
    straddles y; Newton steps using ml_deriv refine it, with a bisection step
    whenever Newton leaves the bracket.

    Args:
        alpha: Order in (0, 1]; E_alpha is strictly increasing there
        y: Target value, y > 0
        ctrl: Series controls

    Returns:
        InverseResult with |E_alpha(x) - y| <= 1e-10 * max(1, y)

    Raises:
        DomainError: y <= 0 or alpha outside (0, 1]
        BracketError: y outside the attainable range
        NoConvergenceError: iteration cap reached
    """
    _check_order(alpha)
    if not (y > 0 and math.isfinite(y)):
        raise DomainError(f"inverse requires finite y > 0, got {y}")
    ctrl = ctrl or DEFAULT_CONTROL
    target = _Target(MLParams(alpha=alpha), float(y), ctrl)
    allowed = INVERSE_REL_TOL * max(1.0, y)

    lo, hi, gap_lo, gap_hi = _bracket(target, ctrl)
    x, gap = (lo, gap_lo) if abs(gap_lo) <= abs(gap_hi) else (hi, gap_hi)

    for iteration in range(1, MAX_INVERSE_ITERATIONS + 1):
        if gap == 0.0:
            return InverseResult(y=y, x=x, iterations=iteration, residual=0.0)
        if gap > 0:
            hi = x
        else:
            lo = x

        slope = target.slope(x)
        step = gap / slope if math.isfinite(slope) and slope > 0 else math.nan
        candidate = x - step
        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi)
        moved = abs(candidate - x)
        x = candidate
        gap = target.gap(x)

        converged = moved <= 4 * EPS * max(1.0, abs(x)) or (hi - lo) <= 4 * EPS * max(1.0, abs(x))
        if abs(gap) <= allowed and (converged or abs(gap) <= EPS * max(1.0, y)):
            return InverseResult(y=y, x=x, iterations=iteration, residual=abs(gap))
        if converged:
            break

    if abs(gap) <= allowed:
        return InverseResult(y=y, x=x, iterations=iteration, residual=abs(gap))
    raise NoConvergenceError(
        f"inverse for y={y:g}, alpha={alpha:g} stalled with residual {abs(gap):.3e}",
        terms_used=iteration,
    )


def verify_proposition(
    alpha: float,
    x1: float,
    x2: float,
    ctrl: Optional[SeriesControl] = None,
    with_inverse: bool = False,
) -> PropositionReport:
    """
    Tabulate log(x1*x2), log(x1/x2), log(x1), log(x2), their sum and difference.

    With `with_inverse`, also measure how far the functional inverse is from
    turning products into sums: |L(E(x1)E(x2)) - (x1 + x2)| and
    |L(E(x1)/E(x2)) - (x1 - x2)|.
    """
    if not (x1 > 0 and x2 > 0):
        raise DomainError(f"proposition check requires x1, x2 > 0, got {x1}, {x2}")
    ctx = make_log_context(alpha, ctrl)
    log_x1 = ml_log(ctx, x1)
    log_x2 = ml_log(ctx, x2)
    log_product = ml_log(ctx, x1 * x2)
    log_quotient = ml_log(ctx, x1 / x2)
    log_sum = log_x1 + log_x2
    log_difference = log_x1 - log_x2

    inverse_sum_gap = None
    inverse_difference_gap = None
    if with_inverse:
        params = MLParams(alpha=alpha)
        e1 = ml_eval(params, x1, ctrl).value
        e2 = ml_eval(params, x2, ctrl).value
        inverse_sum_gap = abs(ml_inverse(alpha, e1 * e2, ctrl).x - (x1 + x2))
        inverse_difference_gap = abs(ml_inverse(alpha, e1 / e2, ctrl).x - (x1 - x2))

    return PropositionReport(
        alpha=alpha,
        x1=x1,
        x2=x2,
        log_product=log_product,
        log_quotient=log_quotient,
        log_x1=log_x1,
        log_x2=log_x2,
        log_sum=log_sum,
        log_difference=log_difference,
        product_gap=abs(log_product - log_sum),
        quotient_gap=abs(log_quotient - log_difference),
        inverse_sum_gap=inverse_sum_gap,
        inverse_difference_gap=inverse_difference_gap,
    )
