"""Closed-form bounds for sup-regulators of a.e. convergent sequences.

Given a moment envelope ``||Z_n||_p <= K(p) * n**(-alpha)``, the regulator
``eta = sup_n n**(alpha - eps) |Z_n|`` satisfies

    ||eta||_p <= K(p) * (p*eps - 1)**(-1/p)      for p > 1/eps,

which this module evaluates directly, packages as a generating function with
certified norm bound 1, and generalises to arbitrary decay pairs through the
series ``sigma(p) = (sum_n (eps_n/beta_n)**p)**(1/p)``.  Series are truncated
with integral-test remainder bounds so every reported digit is certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    Divergent,
    DomainError,
    InvalidEpsilon,
    InvalidExponent,
    ToleranceUnreachable,
)
from .generating import (
    ExponentInterval,
    FromCallable,
    GeneratingFunction,
    PointDomain,
    Product,
    evaluate,
    regulator_generating,
)
from .sequences import DecaySequencePair

__all__ = [
    "SERIES_TERM_CAP",
    "MomentEnvelope",
    "regulator_lp_bound",
    "regulator_norm_bound",
    "sigma_function",
    "generalized_bound",
    "generalized_generating",
    "tchebychev_term_bound",
    "tchebychev_tail_sum_bound",
]

#: Hard cap on the number of series terms a certified summation may visit.
SERIES_TERM_CAP = 10**8

_CHUNK = 1 << 20


@dataclass(frozen=True)
class MomentEnvelope:
    """Hypothesis ||Z_n||_p <= envelope(p) * n**(-alpha) for n >= index_start."""

    envelope: GeneratingFunction
    alpha: float
    index_start: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"decay exponent alpha must be positive, got {self.alpha}")
        if self.index_start < 1:
            raise DomainError(f"index_start must be >= 1, got {self.index_start}")

    def check_eps(self, eps: float) -> None:
        limit = min(1.0, self.alpha)
        if not (0.0 < eps < limit):
            raise InvalidEpsilon(f"eps must lie in (0, {limit}), got {eps}")


def regulator_lp_bound(env: MomentEnvelope, eps: float, p: float) -> float:
    """Moment bound envelope(p) * (p*eps - 1)**(-1/p) for the sup-regulator."""
    env.check_eps(eps)
    if not p > 1.0 / eps:
        raise InvalidExponent(f"the bound needs p > 1/eps = {1.0 / eps}, got {p}")
    return evaluate(env.envelope, p) * (p * eps - 1.0) ** (-1.0 / p)


def regulator_norm_bound(env: MomentEnvelope, eps: float) -> tuple[GeneratingFunction, float]:
    """Generating function for the regulator and its certified norm bound 1."""
    env.check_eps(eps)
    return regulator_generating(env.envelope, env.alpha, eps), 1.0


# ---------------------------------------------------------------------------
# sigma series


def _geometric_sigma_series(delta: float, p: float, rel_tol: float) -> float:
    # exact remainder: sum_{n>N} d^n = d^(N+1) / (1 - d), with d = delta**p
    d = delta**p
    total = 1.0
    n = 0
    term = 1.0
    while term * d / (1.0 - d) > rel_tol * total:
        n += 1
        if n > SERIES_TERM_CAP:
            raise ToleranceUnreachable(f"geometric series needs more than {SERIES_TERM_CAP} terms")
        term *= d
        total += term
    return total


def _power_ratio_params(pair: DecaySequencePair, p: float) -> tuple[float, float, int]:
    gamma = p * pair.ratio_rate
    mu = p * pair.ratio_log_power
    head = pair.first_index
    for seq in (pair.eps_seq, pair.beta_seq):
        head = max(head, len(getattr(seq, "table", ())))
    return gamma, mu, head


def _power_remainder_bound(pair: DecaySequencePair, p: float, gamma: float, mu: float, n_last: int) -> float:
    """Certified upper bound on sum_{n > n_last} (eps_n/beta_n)**p.

    Valid once the term function is nonincreasing (n_last past the log bump)
    and n_last is past any tabulated head, so the ratio is exactly
    c * x**(-rate) * ln(x+1)**(log_power) there.
    """
    c = float(pair.ratio_values(np.asarray([n_last]))[0]) / (
        n_last ** (-pair.ratio_rate) * math.log(n_last + 1.0) ** pair.ratio_log_power
    )
    scale = c**p
    log_term = math.log(n_last + 1.0) ** mu
    if gamma > 1.0:
        # mu > 0 trades half the power margin for the growing log factor
        denom = gamma - 1.0 if mu <= 0 else (gamma - 1.0) / 2.0
        return scale * log_term * n_last ** (1.0 - gamma) / denom
    # boundary gamma == 1, mu < -1: integral of ln^mu(x)/x
    return scale * math.log(n_last) ** (mu + 1.0) / (-1.0 - mu)


def _power_monotone_from(gamma: float, mu: float, head: int) -> int:
    n = head
    if mu > 0:
        n = max(n, math.ceil(math.exp(mu / gamma)))
        if gamma > 1.0:
            # validity threshold of the mu > 0 remainder bound above
            n = max(n, math.ceil(math.exp(2.0 * mu / (gamma - 1.0))))
    if gamma <= 1.0:
        n = max(n, 2)
    return n


def _power_sigma_series(pair: DecaySequencePair, p: float, rel_tol: float) -> float:
    gamma, mu, head = _power_ratio_params(pair, p)
    if gamma < 1.0 or (gamma == 1.0 and mu >= -1.0):
        raise Divergent(f"series of (eps_n/beta_n)^p diverges at p = {p} (gamma = {gamma}, mu = {mu})")
    start = pair.first_index
    n_mono = _power_monotone_from(gamma, mu, head)
    if n_mono > SERIES_TERM_CAP:
        raise ToleranceUnreachable(f"term function only becomes monotone past {n_mono} > {SERIES_TERM_CAP}")

    total = 0.0
    n = start - 1
    while True:
        hi = max(n_mono, 2 * n) if n >= n_mono else n_mono
        hi = min(hi, n + _CHUNK, SERIES_TERM_CAP)
        idx = np.arange(n + 1, hi + 1, dtype=float)
        total += float(np.sum(pair.ratio_values(idx) ** p))
        n = hi
        if n >= n_mono and _power_remainder_bound(pair, p, gamma, mu, n) <= rel_tol * total:
            return total
        if n >= SERIES_TERM_CAP:
            raise ToleranceUnreachable(
                f"remainder bound still above {rel_tol} x partial sum after {SERIES_TERM_CAP} terms"
            )


def sigma_function(pair: DecaySequencePair, p: float, rel_tol: float = 1e-6, force_series: bool = False) -> float:
    """L_p norm sigma(p) of the ratio sequence eps_n / beta_n.

    Geometric pairs use the closed form (1 - delta**p)**(-1/p) unless
    ``force_series`` asks for the truncated summation (the two must agree to
    rel_tol, which the verification suite checks).  Power-type pairs always
    sum, truncating when the integral-test remainder drops below
    rel_tol x partial sum.
    """
    if not (math.isfinite(p) and p >= 1.0):
        raise DomainError(f"sigma needs an exponent p >= 1, got {p}")
    if not (0.0 < rel_tol < 1.0):
        raise DomainError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    if pair.kind == "geometric":
        scale = pair.eps_seq.scale / pair.beta_seq.scale
        if force_series:
            return scale * _geometric_sigma_series(pair.delta, p, rel_tol) ** (1.0 / p)
        return scale * (1.0 - pair.delta**p) ** (-1.0 / p)
    return _power_sigma_series(pair, p, rel_tol) ** (1.0 / p)


def generalized_bound(psi: GeneratingFunction, pair: DecaySequencePair, p: float, rel_tol: float = 1e-6) -> float:
    """Moment bound psi(p) * sigma(p) for a regulator normalised by beta_n.

    If ||Z_n||_p <= psi(p) * eps_n then zeta = sup_n |Z_n| / beta_n has
    ||zeta||_p below this product; +inf when p is outside psi's domain.
    """
    return evaluate(psi, p) * sigma_function(pair, p, rel_tol)


def sigma_interval(pair: DecaySequencePair) -> ExponentInterval:
    """Exponent interval on which the sigma series is summable."""
    if pair.kind == "geometric":
        return ExponentInterval(1.0, math.inf)
    threshold = 1.0 / pair.ratio_rate
    if threshold < 1.0:
        return ExponentInterval(1.0, math.inf)
    # open at the threshold: convergence there depends on the log exponent
    return ExponentInterval(threshold, math.inf, lower_open=True)


def generalized_generating(
    psi: GeneratingFunction, pair: DecaySequencePair, rel_tol: float = 1e-6
) -> GeneratingFunction:
    """Composite generating function gamma(p) = psi(p) * sigma(p).

    The normalised regulator zeta lies in the unit ball of the space this
    function generates; combine with the conjugate machinery for tail bounds.
    """

    def sigma_vec(p: np.ndarray) -> np.ndarray:
        return np.asarray([sigma_function(pair, float(q), rel_tol) for q in p])

    factor = FromCallable(sigma_vec, sigma_interval(pair), label="sigma", check_positive=False)
    return Product((psi, factor))


# ---------------------------------------------------------------------------
# single-term and tail-sum probability bounds


def _tchebychev_log_rate(env: MomentEnvelope, eps: float, p: float, delta: float) -> float:
    env.check_eps(eps)
    if not p > 1.0 / eps:
        raise InvalidExponent(f"the tail sum needs p > 1/eps = {1.0 / eps}, got {p}")
    if not (math.isfinite(delta) and delta > 0):
        raise DomainError(f"threshold delta must be positive, got {delta}")
    k_p = evaluate(env.envelope, p)
    return p * (math.log(k_p) - math.log(delta)) if math.isfinite(k_p) else math.inf


def tchebychev_term_bound(env: MomentEnvelope, eps: float, p: float, delta: float, n: int) -> float:
    """Markov bound min(1, (K(p)/delta)**p * n**(-p*eps)) on P(n**(alpha-eps) |Z_n| > delta)."""
    if n < 1:
        raise DomainError(f"index must be >= 1, got {n}")
    log_bound = _tchebychev_log_rate(env, eps, p, delta) - p * eps * math.log(n)
    return min(1.0, math.exp(min(0.0, log_bound)))


def tchebychev_tail_sum_bound(env: MomentEnvelope, eps: float, p: float, delta: float, n_last: int) -> float:
    """Integral-test bound on the whole discarded tail sum_{n > n_last}.

    Bounds P(sup_{n > n_last} n**(alpha-eps) |Z_n| > delta) by
    (K(p)/delta)**p * n_last**(1 - p*eps) / (p*eps - 1); used to certify
    simulation truncation.
    """
    if n_last < 1:
        raise DomainError(f"truncation index must be >= 1, got {n_last}")
    log_rate = _tchebychev_log_rate(env, eps, p, delta)
    log_tail = log_rate + (1.0 - p * eps) * math.log(n_last) - math.log(p * eps - 1.0)
    return min(1.0, math.exp(min(0.0, log_tail)))
