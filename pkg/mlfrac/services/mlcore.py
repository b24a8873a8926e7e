"""
Mittag-Leffler evaluation engine.

E_{alpha,beta}(z) = sum_{n>=0} z^n / Gamma(alpha*n + beta) for real z.

Evaluation paths:
- series: double-precision partial sums with a two-consecutive-small-terms stop rule
- extended: the same series re-summed in mpmath when cancellation would swamp
  the requested tolerance (negative z)
- asymptotic: -sum_{k=1..K} z^{-k} / Gamma(beta - alpha*k) for z < -z_switch,
  alpha < 1, truncated at the smallest envelope term
- exponential: E_1(z) = exp(z) for z < -z_switch

Every function here is a pure function of its arguments. The only module state
is a set of read-only lookup tables keyed by (alpha, beta, precision).
"""
import math
import threading
from functools import lru_cache
from typing import Optional, Tuple

import mpmath
import numpy as np
from scipy import special

from mlfrac.models import MLBranch, MLParams, MLValue, PrecisionFlag, SeriesControl
from mlfrac.services.errors import (
    DomainError,
    GammaOverflowError,
    MLOverflowError,
    NoConvergenceError,
    PoleError,
)


DEFAULT_CONTROL = SeriesControl()

GAMMA_X_MAX = 171.0
EPS = float(np.finfo(float).eps)
LOG_DOUBLE_MAX = math.log(np.finfo(float).max)

# E_alpha(-x) decays only algebraically for alpha < 1, so inverse lookups of small
# targets need arguments far beyond the series range.
NEGATIVE_REACH = 1e7

# hard ceiling on the positive-axis term window
MAX_SERIES_TERMS = 100_000
# standard deviations of the term envelope kept past its peak
_PEAK_TAIL_WIDTHS = 10.0

_EXTENDED_DPS_STEP = 20
_EXTENDED_MAX_ROUNDS = 5


def gamma_fn(x: float) -> float:
    """
    Euler Gamma function for real arguments.

    Args:
        x: Argument; must not be a non-positive integer

    Returns:
        Gamma(x)

    Raises:
        PoleError: x is 0, -1, -2, ...
        GammaOverflowError: x > 171 (result exceeds double range)
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"Gamma argument must be finite, got {x}")
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x:g}")
    if x > GAMMA_X_MAX:
        raise GammaOverflowError(f"Gamma({x:g}) overflows double precision")
    return float(special.gamma(x))


# {{{ lookup tables

@lru_cache(maxsize=256)
def _log_gamma_table(alpha: float, beta: float, count: int) -> np.ndarray:
    table = special.gammaln(alpha * np.arange(count, dtype=float) + beta)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=16)
def _mp_context(dps: int) -> mpmath.MPContext:
    # one private context per precision; never mutated after creation
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return ctx


_table_lock = threading.Lock()


@lru_cache(maxsize=64)
def _mp_reciprocal_gammas(alpha: float, beta: float, dps: int, count: int) -> Tuple:
    ctx = _mp_context(dps)
    with _table_lock:
        a = ctx.mpf(alpha)
        b = ctx.mpf(beta)
        return tuple(ctx.rgamma(a * n + b) for n in range(count))

# }}}


class _Kahan:
    """Compensated running sum."""

    def __init__(self) -> None:
        self.total = 0.0
        self.comp = 0.0

    def add(self, x: float) -> None:
        y = x - self.comp
        t = self.total + y
        self.comp = (t - self.total) - y
        self.total = t


def _check_params(alpha: float, beta: float) -> None:
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not (beta > 0 and math.isfinite(beta)):
        raise DomainError(f"beta must be positive, got {beta}")


def _extended_dps(ratio: float) -> int:
    digits = 20 + math.ceil(math.log10(max(ratio, 1.0)))
    return _EXTENDED_DPS_STEP * math.ceil(digits / _EXTENDED_DPS_STEP)


def _positive_window(alpha: float, beta: float, z: float, ctrl: SeriesControl) -> int:
    """
    Terms needed for z > 0.

    The terms peak near n = z^(1/alpha) / alpha with spread sqrt(z^(1/alpha)) / alpha,
    and E_{alpha,beta}(z) ~ z^((1-beta)/alpha) exp(z^(1/alpha)) / alpha there.

    Raises:
        MLOverflowError: the leading exponential alone leaves the double range
    """
    log_z = math.log(z)
    peak = math.exp(log_z / alpha) if log_z / alpha < LOG_DOUBLE_MAX else math.inf
    log_value = peak + (1.0 - beta) / alpha * log_z - math.log(alpha)
    if log_value > LOG_DOUBLE_MAX + 1.0:
        raise MLOverflowError(f"E_{{{alpha:g},{beta:g}}}({z:g}) exceeds double precision")
    needed = (peak + _PEAK_TAIL_WIDTHS * math.sqrt(peak) + beta) / alpha + 50.0
    if needed > MAX_SERIES_TERMS:
        raise NoConvergenceError(
            f"series for z={z:g} needs about {needed:.0f} terms", terms_used=0
        )
    # rounded up so the gammaln cache sees few distinct sizes
    return max(ctrl.max_terms, 256 * math.ceil(needed / 256))


def _series_sum(
    alpha: float, beta: float, z: float, ctrl: SeriesControl, weighted: bool
) -> MLValue:
    """
    Sum w_n z^n / Gamma(alpha*n + beta), w_n = n + 1 when `weighted`, else 1.

    The weighted form is the termwise derivative of E_{alpha,beta-alpha}.
    Negative z uses a window of ctrl.max_terms; positive z widens it past the
    peak term (see _positive_window).
    """
    first = 1.0 / gamma_fn(beta) if beta <= GAMMA_X_MAX else 0.0
    if z == 0.0:
        return MLValue(value=first, est_error=0.0, terms_used=1)
    count = _positive_window(alpha, beta, z, ctrl) if z > 0 else ctrl.max_terms

    n = np.arange(count, dtype=float)
    log_mag = n * math.log(abs(z)) - _log_gamma_table(alpha, beta, count)
    if weighted:
        log_mag = log_mag + np.log1p(n)

    if np.any(log_mag > LOG_DOUBLE_MAX):
        if z > 0:
            raise MLOverflowError(f"E_{{{alpha:g},{beta:g}}}({z:g}) exceeds double precision")
        raise NoConvergenceError(
            f"series terms for z={z:g} exceed double range", partial_sum=None, terms_used=count
        )

    terms = np.exp(log_mag)
    if z < 0:
        terms[1::2] *= -1.0
    terms[0] = first

    partial = np.cumsum(terms)
    small = np.abs(terms) < ctrl.tol * np.abs(partial)
    runs = np.flatnonzero(small[1:] & small[:-1])
    if runs.size == 0:
        raise NoConvergenceError(
            f"series for z={z:g} did not reach tol={ctrl.tol:g} in {count} terms",
            partial_sum=float(partial[-1]),
            terms_used=count,
        )
    stop = int(runs[0]) + 1
    used = terms[: stop + 1]

    try:
        value = math.fsum(used.tolist())
    except (OverflowError, ValueError):
        value = math.nan
    if not math.isfinite(value):
        if z > 0:
            raise MLOverflowError(f"E_{{{alpha:g},{beta:g}}}({z:g}) exceeds double precision")
        raise NoConvergenceError(f"series for z={z:g} overflowed while cancelling", terms_used=count)

    max_abs = float(np.max(np.abs(used)))
    ratio = max_abs / abs(value) if value != 0.0 else math.inf
    truncation = float(abs(used[-1]))

    if ratio * EPS > ctrl.tol and ctrl.extended_precision:
        return _extended_sum(alpha, beta, z, ctrl, weighted, ratio, max_abs)

    flag = PrecisionFlag.DEGRADED if ratio > ctrl.cancel_ratio_limit else PrecisionFlag.OK
    return MLValue(
        value=value,
        est_error=truncation + EPS * max_abs * math.sqrt(stop + 1),
        terms_used=stop + 1,
        precision_flag=flag,
        branch=MLBranch.SERIES,
    )


def _extended_sum(
    alpha: float,
    beta: float,
    z: float,
    ctrl: SeriesControl,
    weighted: bool,
    ratio: float,
    max_abs: float,
) -> MLValue:
    """Re-sum a cancelling series in mpmath with enough guard digits."""
    if not math.isfinite(ratio):
        ratio = 1.0 / EPS
    dps = _extended_dps(ratio)
    for _ in range(_EXTENDED_MAX_ROUNDS):
        ctx = _mp_context(dps)
        table = _mp_reciprocal_gammas(alpha, beta, dps, ctrl.max_terms)
        zz = ctx.mpf(z)
        power = ctx.mpf(1)
        total = ctx.mpf(0)
        tol = ctx.mpf(ctrl.tol)
        small_run = 0
        last = ctx.mpf(0)
        used = 0
        for n in range(ctrl.max_terms):
            term = power * table[n]
            if weighted:
                term *= n + 1
            total += term
            last = abs(term)
            used = n + 1
            if last < tol * abs(total):
                small_run += 1
                if small_run == 2:
                    break
            else:
                small_run = 0
            power *= zz
        else:
            raise NoConvergenceError(
                f"extended series for z={z:g} did not reach tol={ctrl.tol:g}",
                partial_sum=float(total),
                terms_used=used,
            )

        value = float(total)
        # digits actually lost to cancellation at this precision
        needed = _extended_dps(max_abs / abs(value)) if value != 0.0 else dps + _EXTENDED_DPS_STEP
        if needed <= dps:
            return MLValue(
                value=value,
                est_error=float(last) + EPS * abs(value),
                terms_used=used,
                precision_flag=PrecisionFlag.OK,
                branch=MLBranch.EXTENDED,
            )
        dps = needed
    raise NoConvergenceError(
        f"cancellation at z={z:g} exceeds the extended precision budget", terms_used=ctrl.max_terms
    )


def _asymptotic_sum(
    alpha: float, beta: float, z: float, ctrl: SeriesControl, derivative: bool
) -> MLValue:
    """
    Algebraic expansion on the negative axis, 0 < alpha < 1.

    E(z) ~ -sum_k z^{-k} / Gamma(beta - alpha*k); its derivative is
    sum_k k z^{-k-1} / Gamma(beta - alpha*k). The truncation point is the minimum
    of the envelope |z|^{-k} Gamma(1 - beta + alpha*k) / pi, which bounds the
    terms independently of the sin factor that vanishes at the poles.
    """
    log_abs_z = math.log(-z)
    acc = _Kahan()
    prev_env = math.inf
    est = math.inf
    used = 0
    for k in range(1, ctrl.max_terms + 1):
        arg = beta - alpha * k
        log_power = -k * log_abs_z
        if derivative:
            log_power += math.log(k) - log_abs_z
        reflected = arg <= 0
        if reflected:
            env = math.exp(log_power + float(special.gammaln(1.0 - arg))) / math.pi
            if env >= prev_env:
                break
            prev_env = env
        else:
            env = math.exp(log_power) * abs(float(special.rgamma(arg)))

        # -z^{-k} and k z^{-k-1} both carry the sign -(-1)^k
        parity = -1.0 if k % 2 else 1.0
        acc.add(-parity * math.exp(log_power) * float(special.rgamma(arg)))
        est = env
        used = k
        if reflected and env < EPS * abs(acc.total):
            break

    value = acc.total
    flag = PrecisionFlag.OK
    if not (est <= ctrl.asymptotic_rel_tol * abs(value)):
        flag = PrecisionFlag.DEGRADED
    return MLValue(
        value=value,
        est_error=est if math.isfinite(est) else abs(value),
        terms_used=used,
        precision_flag=flag,
        branch=MLBranch.ASYMPTOTIC,
    )


def _evaluate(alpha: float, beta: float, z: float, ctrl: SeriesControl, derivative: bool) -> MLValue:
    _check_params(alpha, beta)
    if not math.isfinite(z):
        raise DomainError(f"argument must be finite, got {z}")
    if z > ctrl.z_max:
        raise MLOverflowError(f"argument {z:g} exceeds z_max={ctrl.z_max:g}")
    if z < -NEGATIVE_REACH:
        raise DomainError(f"argument {z:g} is below the supported range")

    # derivative series: sum (m+1) z^m / Gamma(alpha*m + alpha + beta)
    series_beta = beta + alpha if derivative else beta
    asymptotic: Optional[MLValue] = None

    if z < -ctrl.z_switch:
        if alpha == 1.0 and beta == 1.0:
            value = math.exp(z)
            return MLValue(
                value=value,
                est_error=EPS * value,
                terms_used=0,
                branch=MLBranch.EXPONENTIAL,
            )
        if alpha < 1.0:
            asymptotic = _asymptotic_sum(alpha, beta, z, ctrl, derivative)
            if asymptotic.precision_flag == PrecisionFlag.OK:
                return asymptotic
        if z < -ctrl.z_max:
            if asymptotic is not None:
                return asymptotic
            raise DomainError(f"argument {z:g} is below -z_max={ctrl.z_max:g}")

    try:
        return _series_sum(alpha, series_beta, z, ctrl, weighted=derivative)
    except NoConvergenceError:
        if z < 0 and alpha < 1.0:
            if asymptotic is None:
                asymptotic = _asymptotic_sum(alpha, beta, z, ctrl, derivative)
            if asymptotic.est_error < abs(asymptotic.value):
                return asymptotic
        raise


def ml_eval(params: MLParams, z: float, ctrl: Optional[SeriesControl] = None) -> MLValue:
    """
    Evaluate E_{alpha,beta}(z) for real z.

    Args:
        params: Mittag-Leffler parameters
        z: Real argument in [-z_max, z_max] (further left when the asymptotic or
            exponential branch applies)
        ctrl: Truncation controls; defaults to SeriesControl()

    Returns:
        MLValue with the value, an error estimate and the branch used

    Raises:
        MLOverflowError: z > z_max or the value exceeds double range
        DomainError: z non-finite or outside every applicable branch
        NoConvergenceError: series did not converge and no asymptotic fallback exists
    """
    return _evaluate(params.alpha, params.beta, float(z), ctrl or DEFAULT_CONTROL, derivative=False)


def ml_deriv(params: MLParams, z: float, ctrl: Optional[SeriesControl] = None) -> MLValue:
    """Termwise derivative d/dz E_{alpha,beta}(z), same truncation contract as ml_eval."""
    return _evaluate(params.alpha, params.beta, float(z), ctrl or DEFAULT_CONTROL, derivative=True)


def mittag_leffler(
    alpha: float, z: float, beta: float = 1.0, ctrl: Optional[SeriesControl] = None
) -> float:
    """Plain float E_{alpha,beta}(z)."""
    return ml_eval(MLParams(alpha=alpha, beta=beta), z, ctrl).value


def ml_eval_array(
    params: MLParams, zs: np.ndarray, ctrl: Optional[SeriesControl] = None
) -> np.ndarray:
    """Evaluate ml_eval over an array of arguments."""
    zs = np.asarray(zs, dtype=float)
    out = np.empty_like(zs)
    flat = out.reshape(-1)
    for i, z in enumerate(zs.reshape(-1)):
        flat[i] = ml_eval(params, float(z), ctrl).value
    return out
