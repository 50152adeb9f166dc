"""Kilbas-Saigo and Mittag-Leffler functions with two-sided decay bounds.

The three-index function

    E_{alpha,m,l}(z) = 1 + sum_k  prod_{j<k} [G(a(jm+l)+1)/G(a(jm+l+1)+1)] z^k

solves the scalar linear Caputo equation with a power-law coefficient, and
on the negative real axis (with l = m-1) it is squeezed between the two
rational profiles returned by :func:`kilbas_saigo_bounds`.  The series is
entire but numerically hostile for z < 0: terms grow to ~10^20 before they
decay, so the summation switches between three regimes

  * plain double-precision summation while cancellation is mild,
  * big-float summation (working precision sized from the peak term) while
    the truncation budget still covers the tail,
  * beyond that, a bound-respecting surrogate: the geometric mean of the
    two-sided bounds, rescaled so it matches the last trustworthy series
    value.  Values from this branch are flagged as approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from scipy.special import gammaln, gammasgn, rgamma

from .errors import DomainError, InadmissibleParams, NonConvergence

_LN10 = math.log(10.0)
# |z| beyond which the decay branch stops trying the series
_SERIES_CUTOFF = 10.0 * (1.0 + 1e-12)
# digits of cancellation tolerated in plain double precision
_DOUBLE_DIGITS = 3.0


@dataclass(frozen=True)
class SeriesAccuracy:
    """Truncation control for the power series."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_terms: int = 512

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0 or self.abs_tol + self.rel_tol <= 0:
            raise DomainError("need abs_tol + rel_tol > 0 with both nonnegative")
        if self.max_terms < 8:
            raise DomainError("max_terms must be at least 8")


DEFAULT_ACCURACY = SeriesAccuracy()


@dataclass(frozen=True)
class KilbasSaigoParams:
    """Indices (alpha, m, l) of the three-parameter function."""

    alpha: float
    m: float
    l: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.m > 0):
            raise InadmissibleParams("require alpha > 0 and m > 0")
        # pole scan: a(jm+l)+1 must avoid nonpositive integers for every
        # Gamma factor the truncated series can touch
        for j in range(DEFAULT_ACCURACY.max_terms + 1):
            x = self.alpha * (j * self.m + self.l) + 1.0
            if x <= 0.5 and abs(x - round(x)) < 1e-9:
                raise InadmissibleParams(
                    f"alpha*({j}*m+l)+1 = {x:g} hits a Gamma pole"
                )

    @property
    def is_decay_form(self) -> bool:
        """True for the (alpha, m, m-1) family with 0 < alpha < 1, m > 1."""
        return 0.0 < self.alpha < 1.0 and self.m > 1.0 and abs(self.l - (self.m - 1.0)) < 1e-9


@dataclass(frozen=True)
class BoundPair:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise DomainError("lower bound exceeds upper bound")


def kilbas_saigo_bounds(alpha: float, m: float, z: float) -> BoundPair:
    """Two-sided rational bounds for E_{alpha,m,m-1}(-z), z >= 0.

    lower = 1/(1 + G(1-alpha) z),  upper = 1/(1 + [G(1+(m-1)a)/G(1+ma)] z).
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("bounds require 0 < alpha < 1")
    if not m > 1.0:
        raise DomainError("bounds require m > 1")
    if z < 0.0:
        raise DomainError("bounds are stated for z >= 0")
    lower = 1.0 / (1.0 + math.gamma(1.0 - alpha) * z)
    ratio = math.exp(gammaln(1.0 + (m - 1.0) * alpha) - gammaln(1.0 + m * alpha))
    upper = 1.0 / (1.0 + ratio * z)
    return BoundPair(lower=lower, upper=upper)


# {{{ series internals


def _log_ratio(alpha, m, l, j):
    """log |Gamma ratio| appended when extending the product from j to j+1."""
    x = alpha * (j * m + l) + 1.0
    y = alpha * (j * m + l + 1.0) + 1.0
    return gammaln(x) - gammaln(y)


def _sign_ratio(alpha, m, l, j):
    x = alpha * (j * m + l) + 1.0
    y = alpha * (j * m + l + 1.0) + 1.0
    return gammasgn(x) * gammasgn(y)


def _plan(alpha, m, l, z, acc):
    """Log-space walk of the term magnitudes.

    Returns (terms_needed, peak_log) where peak_log is the natural log of
    the largest term magnitude, or raises NonConvergence when the budget
    max_terms cannot push the tail below the target.
    """
    logz = math.log(abs(z))
    floor = math.log(max(acc.abs_tol, 1e-280)) - 2.0 * _LN10
    logc = 0.0
    peak = 0.0
    quiet = 0
    for k in range(1, acc.max_terms + 1):
        logc += _log_ratio(alpha, m, l, k - 1)
        lt = logc + k * logz
        if lt > peak:
            peak = lt
        if lt < floor:
            quiet += 1
            if quiet >= 3:
                return k, peak
        else:
            quiet = 0
    raise NonConvergence(
        f"series needs more than {acc.max_terms} terms at z = {z:g}"
    )


def _sum_double(alpha, m, l, z, acc):
    s = 1.0
    term = 1.0
    quiet = 0
    for k in range(1, acc.max_terms + 1):
        j = k - 1
        term *= _sign_ratio(alpha, m, l, j) * math.exp(_log_ratio(alpha, m, l, j)) * z
        s += term
        if abs(term) < acc.abs_tol + acc.rel_tol * abs(s):
            quiet += 1
            if quiet >= 3:
                return s
        else:
            quiet = 0
    raise NonConvergence("double-precision summation exhausted max_terms")


_RATIO_CACHE: dict = {}


def _mp_ratios(alpha, m, l, dps, n):
    """Cached Gamma-ratio products at working precision dps."""
    key = (round(alpha, 14), round(m, 14), round(l, 14), dps)
    ratios = _RATIO_CACHE.setdefault(key, [])
    if len(ratios) < n:
        with mpmath.workdps(dps):
            for j in range(len(ratios), n):
                x = mpmath.mpf(alpha) * (j * mpmath.mpf(m) + mpmath.mpf(l)) + 1
                y = x + mpmath.mpf(alpha)
                ratios.append(mpmath.gamma(x) / mpmath.gamma(y))
    return ratios


def _sum_mp(alpha, m, l, z, acc, digits):
    dps = int(digits) + 25
    ratios = _mp_ratios(alpha, m, l, dps, acc.max_terms)
    with mpmath.workdps(dps):
        zz = mpmath.mpf(z)
        s = mpmath.mpf(1)
        term = mpmath.mpf(1)
        quiet = 0
        for k in range(1, acc.max_terms + 1):
            term *= ratios[k - 1] * zz
            s += term
            if abs(term) < acc.abs_tol + acc.rel_tol * abs(s):
                quiet += 1
                if quiet >= 3:
                    return float(s)
            else:
                quiet = 0
    raise NonConvergence("big-float summation exhausted max_terms")


def _series_value(params, z, acc):
    alpha, m, l = params.alpha, params.m, params.l
    n, peak = _plan(alpha, m, l, z, acc)
    if z > 0.0:
        # all-positive terms: no cancellation, only overflow to guard
        if peak < 280.0 * _LN10:
            return _sum_double(alpha, m, l, z, acc)
        return _sum_mp(alpha, m, l, z, acc, peak / _LN10)
    digits_lost = max(0.0, peak / _LN10)
    if digits_lost <= _DOUBLE_DIGITS:
        return _sum_double(alpha, m, l, z, acc)
    return _sum_mp(alpha, m, l, z, acc, digits_lost)


# }}}


# {{{ bound-anchored surrogate for deep negative arguments

_SEAM_CACHE: dict = {}


def _geomean(alpha, m, z):
    b = kilbas_saigo_bounds(alpha, m, z)
    return math.sqrt(b.lower * b.upper)


def _seam(params, acc):
    """(z0, scale) anchoring the surrogate branch to the series.

    z0 is the largest |z| <= cutoff at which the series is still summable
    within the budget; scale matches the surrogate to the series there, so
    the evaluated function stays continuous and inside the two-sided
    bounds for every z < -z0.
    """
    key = (round(params.alpha, 14), round(params.m, 14), round(params.l, 14),
           acc.abs_tol, acc.rel_tol, acc.max_terms)
    hit = _SEAM_CACHE.get(key)
    if hit is not None:
        return hit
    alpha, m, l = params.alpha, params.m, params.l
    z0 = _SERIES_CUTOFF
    for _ in range(40):
        try:
            _plan(alpha, m, l, -z0, acc)
            break
        except NonConvergence:
            z0 *= 0.5
    else:
        raise NonConvergence("series infeasible even near z = 0")
    # push z0 back up toward the feasibility edge
    hi = min(2.0 * z0, _SERIES_CUTOFF)
    for _ in range(25):
        mid = 0.5 * (z0 + hi)
        if mid <= z0 * (1 + 1e-6):
            break
        try:
            _plan(alpha, m, l, -mid, acc)
            z0 = mid
        except NonConvergence:
            hi = mid
    scale = _series_value(params, -z0, acc) / _geomean(alpha, m, z0)
    _SEAM_CACHE[key] = (z0, scale)
    return z0, scale


# }}}


def kilbas_saigo_with_info(params: KilbasSaigoParams, z: float,
                           acc: SeriesAccuracy = DEFAULT_ACCURACY):
    """Evaluate E_{alpha,m,l}(z); returns (value, approximate_flag).

    approximate=True marks values from the bound-anchored surrogate used
    for deep negative arguments of the decay family (alpha, m, m-1).
    """
    if z == 0.0:
        return 1.0, False
    if z < 0.0 and params.is_decay_form:
        z0, scale = _seam(params, acc)
        if -z > z0:
            return scale * _geomean(params.alpha, params.m, -z), True
        return _series_value(params, z, acc), False
    return _series_value(params, z, acc), False


def kilbas_saigo(params: KilbasSaigoParams, z: float,
                 acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Evaluate the Kilbas-Saigo function E_{alpha,m,l}(z) on the real line."""
    return kilbas_saigo_with_info(params, z, acc)[0]


def mittag_leffler(alpha: float, beta: float, z: float,
                   acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Two-parameter function sum_k z^k / Gamma(alpha k + beta).

    For z < -10 the classical algebraic tail -sum_{k=1..5} z^{-k}/G(beta-alpha k)
    replaces the series (which is hopeless there in finite precision).
    """
    if not (alpha > 0 and beta > 0):
        raise DomainError("mittag_leffler requires alpha > 0 and beta > 0")
    if z == 0.0:
        return 1.0 / math.gamma(beta)
    if z < -10.0:
        return -sum(z ** (-k) * rgamma(beta - alpha * k) for k in range(1, 6))

    logz = math.log(abs(z))
    floor = math.log(max(acc.abs_tol, 1e-280)) - 2.0 * _LN10
    peak = -gammaln(beta)
    n = None
    quiet = 0
    for k in range(acc.max_terms + 1):
        lt = k * logz - gammaln(alpha * k + beta)
        peak = max(peak, lt)
        if lt < floor and k > 0:
            quiet += 1
            if quiet >= 3:
                n = k
                break
        else:
            quiet = 0
    if n is None:
        raise NonConvergence(f"Mittag-Leffler series stalls at z = {z:g}")

    if z > 0.0 and peak < 280.0 * _LN10 or (z < 0.0 and peak / _LN10 <= _DOUBLE_DIGITS):
        s = 0.0
        quiet = 0
        for k in range(acc.max_terms + 1):
            s += z ** k * math.exp(-gammaln(alpha * k + beta))
            if k > 0 and abs(z ** k) * math.exp(-gammaln(alpha * k + beta)) \
                    < acc.abs_tol + acc.rel_tol * abs(s):
                quiet += 1
                if quiet >= 3:
                    return s
            else:
                quiet = 0
        raise NonConvergence("double-precision summation exhausted max_terms")

    dps = int(max(0.0, peak / _LN10)) + 25
    with mpmath.workdps(dps):
        zz = mpmath.mpf(z)
        s = mpmath.mpf(0)
        quiet = 0
        for k in range(acc.max_terms + 1):
            term = zz ** k / mpmath.gamma(alpha * k + beta)
            s += term
            if k > 0 and abs(term) < acc.abs_tol + acc.rel_tol * abs(s):
                quiet += 1
                if quiet >= 3:
                    return float(s)
            else:
                quiet = 0
    raise NonConvergence("big-float summation exhausted max_terms")


def reduce_to_mittag_leffler(params: KilbasSaigoParams):
    """m = 1 reduction: E_{a,1,l}(z) = Gamma(a l + 1) E_{a, a l + 1}(z).

    Returns (scale, alpha, beta) or None when the reduction does not apply.
    """
    if abs(params.m - 1.0) > 1e-9:
        return None
    beta = params.alpha * params.l + 1.0
    if beta <= 0.0:
        return None
    return math.gamma(beta), params.alpha, beta
