"""
Caputo-derivative machinery independent of any closed-form solution.

- caputo_l1: L1 discretization of the Caputo derivative (0 < alpha <= 1)
- fabm_solve: fractional Adams-Bashforth-Moulton predictor-corrector
- residual_meter: D^alpha u - f(t, u) for a sampled candidate
- jumarie_integral: alpha * int_0^t (t - s)^(alpha - 1) f(s) ds by quadrature
"""
import math
from typing import Callable

import numpy as np
from scipy import integrate

from mlfrac.models import ResidualReport, RhsKind, RhsSpec, SolutionCurve, TimeGrid
from mlfrac.services.errors import DivergenceError, DomainError
from mlfrac.services.mlcore import gamma_fn


DEFAULT_SKIP_NODES = 5
DEFAULT_DIVERGENCE_BOUND = 1e8
MAX_CORRECTOR_PASSES = 5

# residual bound = safety * |D_h - D_2h| / (2^(2 - alpha) - 1)
SCHEME_ESTIMATE_SAFETY = 2.0

RhsFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _check_order(alpha: float) -> None:
    if not (0 < alpha <= 1):
        raise DomainError(f"fractional order must lie in (0, 1], got {alpha}")


def rhs_function(rhs: RhsSpec, alpha: float) -> RhsFunction:
    """Vectorised f(t, u) for a right-hand side specification."""
    if rhs.kind == RhsKind.LOGISTIC:
        rate = rhs.k ** alpha if rhs.alpha_power else rhs.k
        return lambda t, u: rate * u * (1.0 - u)
    if rhs.kind == RhsKind.SI:
        beta, capacity = rhs.beta_contact, rhs.N
        return lambda t, u: beta * u * (capacity - u)
    if rhs.kind == RhsKind.SIS:
        beta, capacity = rhs.beta_contact, rhs.A
        return lambda t, u: beta * u * (capacity - u)
    return rhs.func


def l1_weights(alpha: float, count: int) -> np.ndarray:
    """b_j = (j+1)^(1-alpha) - j^(1-alpha), with b_0 = 1 for every alpha."""
    j = np.arange(count, dtype=float)
    weights = (j + 1.0) ** (1.0 - alpha) - j ** (1.0 - alpha)
    weights[0] = 1.0
    return weights


def caputo_l1(curve: SolutionCurve, alpha: float) -> SolutionCurve:
    """
    L1 approximation of the Caputo derivative at nodes t_1..t_n.

    D^alpha u(t_i) ~ h^-alpha / Gamma(2 - alpha) * sum_j b_j (u_{i-j} - u_{i-j-1}).
    At alpha = 1 this is the backward difference (u_i - u_{i-1}) / h.

    Args:
        curve: Samples on the full grid (start_index 0)
        alpha: Order in (0, 1]

    Returns:
        SolutionCurve with start_index 1
    """
    _check_order(alpha)
    if curve.start_index != 0:
        raise DomainError("caputo_l1 needs samples starting at t_0")
    n = curve.grid.n_steps
    increments = np.diff(curve.values)
    weights = l1_weights(alpha, n)
    scale = curve.grid.h ** (-alpha) / gamma_fn(2.0 - alpha)
    derivative = scale * np.convolve(increments, weights)[:n]
    return SolutionCurve(grid=curve.grid, values=derivative, start_index=1, label=curve.label)


def fabm_solve(
    rhs: RhsSpec,
    alpha: float,
    u0: float,
    grid: TimeGrid,
    corrector_passes: int = 1,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> SolutionCurve:
    """
    Fractional Adams-Bashforth-Moulton solution of D^alpha u = f(t, u), u(0) = u0.

    Predictor: fractional rectangle rule. Corrector: fractional trapezoid rule,
    product-integration weights for the kernel (t - s)^(alpha - 1) / Gamma(alpha).
    At alpha = 1 this is the classical one-step Adams-Bashforth-Moulton pair.

    Args:
        rhs: Right-hand side specification
        alpha: Order in (0, 1]
        u0: Initial value
        grid: Uniform time grid
        corrector_passes: Corrector evaluations per step (1 = P(EC)E)
        divergence_bound: Largest |u| tolerated before giving up

    Returns:
        SolutionCurve on every grid node, values[0] == u0

    Raises:
        DivergenceError: the state left [-divergence_bound, divergence_bound]
    """
    _check_order(alpha)
    if not math.isfinite(u0):
        raise DomainError(f"initial value must be finite, got {u0}")
    if not 1 <= corrector_passes <= MAX_CORRECTOR_PASSES:
        raise DomainError(f"corrector_passes must be in 1..{MAX_CORRECTOR_PASSES}")

    f = rhs_function(rhs, alpha)
    n_steps = grid.n_steps
    h = grid.h
    t = grid.nodes()

    d = np.arange(n_steps + 2, dtype=float)
    pow_a = d ** alpha
    pow_a1 = d ** (alpha + 1.0)
    # predictor weight for lag d >= 1
    pred_w = np.zeros(n_steps + 1)
    pred_w[1:] = pow_a[1:n_steps + 1] - pow_a[:n_steps]
    # corrector weight for interior lag d >= 1
    corr_w = np.zeros(n_steps + 1)
    corr_w[1:] = pow_a1[2:n_steps + 2] + pow_a1[:n_steps] - 2.0 * pow_a1[1:n_steps + 1]

    pred_scale = h ** alpha / gamma_fn(alpha + 1.0)
    corr_scale = h ** alpha / gamma_fn(alpha + 2.0)

    u = np.empty(n_steps + 1)
    fv = np.empty(n_steps + 1)
    u[0] = u0
    fv[0] = float(f(t[0], u0))

    for m in range(1, n_steps + 1):
        # lags m, m-1, ..., 1 for history nodes j = 0..m-1
        history = fv[:m]
        predictor = u0 + pred_scale * np.dot(pred_w[m:0:-1], history)

        n = m - 1
        first = n ** (alpha + 1.0) - (n - alpha) * (m ** alpha)
        interior = np.dot(corr_w[m - 1:0:-1], history[1:]) if m > 1 else 0.0
        base = first * history[0] + interior

        value = predictor
        for _ in range(corrector_passes):
            value = u0 + corr_scale * (base + float(f(t[m], value)))
        if not math.isfinite(value) or abs(value) > divergence_bound:
            raise DivergenceError(
                f"solution left |u| <= {divergence_bound:g} at t={t[m]:g}"
            )
        u[m] = value
        fv[m] = float(f(t[m], value))

    return SolutionCurve(grid=grid, values=u, label="fabm")


def residual_meter(
    candidate: SolutionCurve,
    rhs: RhsSpec,
    alpha: float,
    skip_nodes: int = DEFAULT_SKIP_NODES,
) -> ResidualReport:
    """
    Caputo residual D^alpha u - f(t, u) of a sampled candidate.

    The L1 scheme's own error is estimated by repeating the measurement on
    the grid with doubled step (every other node) and scaling the difference
    by the scheme order 2 - alpha.

    Args:
        candidate: Samples on a uniform grid from t_0
        rhs: Right-hand side the candidate claims to solve
        alpha: Order in (0, 1]
        skip_nodes: Leading derivative nodes excluded from the maximum

    Returns:
        ResidualReport with max residual over nodes i > skip_nodes
    """
    _check_order(alpha)
    f = rhs_function(rhs, alpha)
    derivative = caputo_l1(candidate, alpha)
    times = derivative.times()
    residual = derivative.values - f(times, candidate.values[1:])
    residual_curve = SolutionCurve(
        grid=candidate.grid, values=residual, start_index=1, label=f"residual_{candidate.label}"
    )

    tail = np.abs(residual[skip_nodes:])
    max_residual = float(np.max(tail)) if tail.size else 0.0

    return ResidualReport(
        max_residual=max_residual,
        residual_curve=residual_curve,
        scheme_error_estimate=_l1_error_estimate(candidate, alpha, derivative, skip_nodes),
        skip_nodes=skip_nodes,
    )


def _l1_error_estimate(
    candidate: SolutionCurve, alpha: float, fine: SolutionCurve, skip_nodes: int
) -> float:
    half = candidate.grid.n_steps // 2
    if half < 2:
        return 0.0
    coarse_grid = TimeGrid(t_end=2 * half * candidate.grid.h, n_steps=half)
    coarse_curve = SolutionCurve(grid=coarse_grid, values=candidate.values[: 2 * half + 1: 2])
    coarse = caputo_l1(coarse_curve, alpha)
    # coarse node i sits on fine node 2i
    difference = np.abs(fine.values[1:2 * half:2] - coarse.values)
    tail = difference[max(skip_nodes // 2, 1):]
    if tail.size == 0:
        return 0.0
    order = 2.0 - alpha
    return SCHEME_ESTIMATE_SAFETY * float(np.max(tail)) / (2.0 ** order - 1.0)


def jumarie_integral(f: Callable[[float], float], alpha: float, t: float) -> float:
    """
    alpha * int_0^t (t - s)^(alpha - 1) f(s) ds, the convolution reading of int f (ds)^alpha.

    The kernel is handed to QUADPACK as an algebraic end-point weight.
    """
    _check_order(alpha)
    if t < 0:
        raise DomainError(f"integration limit must be non-negative, got {t}")
    if t == 0:
        return 0.0
    value, _ = integrate.quad(f, 0.0, t, weight="alg", wvar=(0.0, alpha - 1.0))
    return alpha * value
