"""Trajectory simulation for power-decay sequence models, with exact oracles.

The generative models are Z_n = theta_n / n**alpha with i.i.d. standard
exponential theta_n, and Z_n = |g_n| / n**alpha with i.i.d. standard normal
g_n.  The regulator eta = sup_n n**(alpha - eps) |Z_n| is estimated by Monte
Carlo with a certified truncation index, and for the exponential model the
module also evaluates the exact tail

    P(eta > u) = 1 - prod_n (1 - exp(-u n**eps)),

its Bonferroni sandwich, and the exact moments by quadrature against that
tail.  These exact routines are the oracles every simulated quantity is
verified against.

Randomness is counter-based: trajectory j of seed s reads from a Philox
stream keyed (s, j), and the n-th draw is a pure function of (s, j, n).
Thread count affects wall time only, never a single bit of output.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate, special

from .criteria import TrajectoryBatch, regulator_ratio_matrix
from .errors import (
    DomainError,
    InvalidEpsilon,
    MomentInfinite,
    TruncationInfeasible,
)
from .generating import natural_function
from .moments import half_normal_moments, std_exponential_moments
from .bounds import MomentEnvelope
from .sequences import PowerLogSequence

__all__ = [
    "TRUNCATION_CAP",
    "ExponentialPower",
    "GaussianPower",
    "EnvelopeOnly",
    "SequenceModel",
    "FixedTruncation",
    "TailTargetTruncation",
    "SimulationPlan",
    "EtaSample",
    "resolve_n_last",
    "simulate_eta",
    "simulate_trajectories",
    "exp_power_sum_tail_bound",
    "exp_power_threshold",
    "exp_power_sum",
    "exact_eta_tail",
    "exact_eta_tail_with_error",
    "bonferroni_sums",
    "asymptotic_tail_constant",
    "exact_eta_moment",
    "model_from_config",
    "plan_from_config",
]

#: Hard cap on the truncation index of a simulated trajectory.
TRUNCATION_CAP = 10**7

_CHUNK_CELLS = 1 << 23  # matrix cells generated per scheduling unit
_BATCH_CELL_CAP = 1 << 26


@dataclass(frozen=True)
class ExponentialPower:
    """Z_n = theta_n / n**alpha with theta_n i.i.d. standard exponential."""

    alpha: float
    index_start: int = 1
    kind = "exponential_power"

    def __post_init__(self) -> None:
        _check_model_fields(self.alpha, self.index_start)

    def moment_envelope(self) -> MomentEnvelope:
        """Exact envelope: ||Z_n||_p = Gamma(p+1)**(1/p) * n**(-alpha)."""
        return MomentEnvelope(natural_function(std_exponential_moments()), self.alpha, self.index_start)

    def draw_magnitudes(self, uniforms: np.ndarray) -> np.ndarray:
        return -np.log1p(-uniforms)


@dataclass(frozen=True)
class GaussianPower:
    """Z_n = |g_n| / n**alpha with g_n i.i.d. standard normal."""

    alpha: float
    index_start: int = 1
    kind = "gaussian_power"

    def __post_init__(self) -> None:
        _check_model_fields(self.alpha, self.index_start)

    def moment_envelope(self) -> MomentEnvelope:
        return MomentEnvelope(natural_function(half_normal_moments()), self.alpha, self.index_start)

    def draw_magnitudes(self, uniforms: np.ndarray) -> np.ndarray:
        # inverse CDF of |g|: P(|g| <= t) = erf(t / sqrt(2))
        return math.sqrt(2.0) * special.erfinv(uniforms)


@dataclass(frozen=True)
class EnvelopeOnly:
    """Analytic-only model: a moment envelope without a generator."""

    envelope: MomentEnvelope
    kind = "envelope_only"

    @property
    def alpha(self) -> float:
        return self.envelope.alpha

    @property
    def index_start(self) -> int:
        return self.envelope.index_start

    def moment_envelope(self) -> MomentEnvelope:
        return self.envelope


SequenceModel = Union[ExponentialPower, GaussianPower, EnvelopeOnly]


def _check_model_fields(alpha: float, index_start: int) -> None:
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError(f"decay exponent alpha must be positive, got {alpha}")
    if index_start < 1:
        raise DomainError(f"index_start must be >= 1, got {index_start}")


@dataclass(frozen=True)
class FixedTruncation:
    """Simulate exactly the indices index_start..n_last."""

    n_last: int

    def __post_init__(self) -> None:
        if not 1 <= self.n_last <= TRUNCATION_CAP:
            raise DomainError(f"fixed truncation must lie in [1, {TRUNCATION_CAP}], got {self.n_last}")


@dataclass(frozen=True)
class TailTargetTruncation:
    """Pick n_last so P(discarded sup exceeds u_min) <= rho.

    ``rho = None`` resolves to 1e-3 / trajectories: with probability 0.999
    no trajectory in the whole batch is affected by truncation.
    """

    rho: float | None = None
    u_min: float = 1.0

    def __post_init__(self) -> None:
        if self.rho is not None and not (0.0 < self.rho < 1.0):
            raise DomainError(f"target remainder probability must lie in (0, 1), got {self.rho}")
        if not (math.isfinite(self.u_min) and self.u_min > 0):
            raise DomainError(f"u_min must be positive, got {self.u_min}")


Truncation = Union[FixedTruncation, TailTargetTruncation]


@dataclass(frozen=True)
class SimulationPlan:
    """Full description of one reproducible simulation run."""

    model: SequenceModel
    eps: float
    trajectories: int
    truncation: Truncation = field(default_factory=TailTargetTruncation)
    seed: int = 0
    p_grid: tuple[float, ...] = ()
    u_grid: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        limit = min(1.0, self.model.alpha)
        if not (0.0 < self.eps < limit):
            raise InvalidEpsilon(f"eps must lie in (0, {limit}), got {self.eps}")
        if self.trajectories < 1:
            raise DomainError(f"need at least one trajectory, got {self.trajectories}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must fit an unsigned 64-bit integer")
        if any(p < 1.0 for p in self.p_grid):
            raise DomainError("every moment exponent in p_grid must be >= 1")
        if any(u < 0.0 for u in self.u_grid):
            raise DomainError("every tail threshold in u_grid must be >= 0")

    @property
    def alpha(self) -> float:
        return self.model.alpha

    @property
    def index_start(self) -> int:
        return self.model.index_start


@dataclass(frozen=True)
class EtaSample:
    """One realized regulator value plus its truncation risk.

    ``truncation_bound`` bounds the probability that the discarded indices
    n > n_last would have changed this sample's value.
    """

    value: float
    truncation_bound: float


# ---------------------------------------------------------------------------
# certified sums of exp(-c n**gamma)


def _check_exp_power_args(c: float, gamma: float) -> None:
    if not (math.isfinite(c) and c > 0):
        raise DomainError(f"exponential rate must be positive, got {c}")
    if not (0.0 < gamma <= 2.0):
        raise DomainError(f"index power must lie in (0, 2], got {gamma}")


def exp_power_sum_tail_bound(c: float, gamma: float, n_last: int) -> float:
    """Integral-test bound on sum_{n > n_last} exp(-c n**gamma)."""
    _check_exp_power_args(c, gamma)
    if n_last < 1:
        raise DomainError(f"tail start must be >= 1, got {n_last}")
    a = 1.0 / gamma
    log_front = special.gammaln(1.0 + a) - a * math.log(c)
    return math.exp(log_front) * float(special.gammaincc(a, c * n_last**gamma))


def exp_power_threshold(c: float, gamma: float, rho: float) -> int:
    """Smallest n_last whose exp_power_sum_tail_bound is <= rho."""
    _check_exp_power_args(c, gamma)
    if not (0.0 < rho < 1.0):
        raise DomainError(f"target remainder must lie in (0, 1), got {rho}")
    a = 1.0 / gamma
    log_front = special.gammaln(1.0 + a) - a * math.log(c)
    q = rho * math.exp(-log_front)
    if q >= 1.0:
        return 1
    x = float(special.gammainccinv(a, q))
    n = max(1, math.ceil((x / c) ** a))
    while exp_power_sum_tail_bound(c, gamma, n) > rho:  # guard against ceil rounding
        n += 1
    while n > 1 and exp_power_sum_tail_bound(c, gamma, n - 1) <= rho:
        n -= 1
    return n


def exp_power_sum(c: float, gamma: float, abs_tol: float = 1e-12, index_start: int = 1) -> float:
    """Certified evaluation of sum_{n >= index_start} exp(-c n**gamma).

    The returned partial sum is within abs_tol of the full series.
    """
    if index_start < 1:
        raise DomainError(f"index_start must be >= 1, got {index_start}")
    if not (0.0 < abs_tol < 1.0):
        raise DomainError(f"abs_tol must lie in (0, 1), got {abs_tol}")
    n_last = max(index_start, exp_power_threshold(c, gamma, abs_tol))
    total = 0.0
    for lo in range(index_start, n_last + 1, _CHUNK_CELLS):
        hi = min(n_last, lo + _CHUNK_CELLS - 1)
        idx = np.arange(lo, hi + 1, dtype=float)
        total += float(np.sum(np.exp(-c * idx**gamma)))
    return total


# ---------------------------------------------------------------------------
# truncation control


def _discard_tail_bound(model: SequenceModel, eps: float, u: float, n_last: int) -> float:
    """Bound P(sup_{n > n_last} n**(alpha-eps) |Z_n| > u) for a generative model."""
    if u <= 0.0:
        return 1.0
    if model.kind == "exponential_power":
        # P(theta / n**eps > u) = exp(-u n**eps) exactly
        return min(1.0, exp_power_sum_tail_bound(u, eps, n_last))
    if model.kind == "gaussian_power":
        # half-normal tail P(|g| > t) <= exp(-t^2 / 2)
        return min(1.0, exp_power_sum_tail_bound(u * u / 2.0, 2.0 * eps, n_last))
    raise DomainError("an envelope-only model has no generative tail")


def resolve_n_last(plan: SimulationPlan) -> int:
    """Truncation index of a plan; certified for tail-target truncations."""
    if isinstance(plan.truncation, FixedTruncation):
        if plan.truncation.n_last < plan.index_start:
            raise DomainError(
                f"fixed truncation {plan.truncation.n_last} sits before index_start {plan.index_start}"
            )
        return plan.truncation.n_last
    if plan.model.kind == "envelope_only":
        raise DomainError("an envelope-only model cannot be simulated")
    rho = plan.truncation.rho if plan.truncation.rho is not None else 1e-3 / plan.trajectories
    u_min = plan.truncation.u_min
    if plan.model.kind == "exponential_power":
        n = exp_power_threshold(u_min, plan.eps, rho)
    else:
        n = exp_power_threshold(u_min * u_min / 2.0, 2.0 * plan.eps, rho)
    n = max(n, plan.index_start)
    if n > TRUNCATION_CAP:
        raise TruncationInfeasible(f"meeting rho = {rho} needs n_last = {n} > {TRUNCATION_CAP}")
    return n


# ---------------------------------------------------------------------------
# trajectory generation


def _row_stream(seed: int, trajectory: int) -> np.random.Generator:
    key = np.asarray([seed, trajectory], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _generate_rows(plan: SimulationPlan, n_idx: np.ndarray, rows: range) -> np.ndarray:
    decay = n_idx ** (-plan.alpha)
    out = np.empty((len(rows), n_idx.size))
    for i, trajectory in enumerate(rows):
        uniforms = _row_stream(plan.seed, trajectory).random(n_idx.size)
        out[i] = plan.model.draw_magnitudes(uniforms) * decay
    return out


def _row_chunks(trajectories: int, width: int) -> list[range]:
    rows_per_chunk = max(1, _CHUNK_CELLS // max(1, width))
    return [range(lo, min(trajectories, lo + rows_per_chunk)) for lo in range(0, trajectories, rows_per_chunk)]


def _map_chunks(fn, chunks: list[range], threads: int) -> list:
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def simulate_eta(plan: SimulationPlan, threads: int = 1) -> list[EtaSample]:
    """Realize eta = max_{index_start <= n <= n_last} n**(alpha-eps) |Z_n| per trajectory.

    Values are computed through the same elementwise ratio |Z_n| / delta_n
    (delta_n = n**(-(alpha-eps))) as regulator extraction from a trajectory
    batch, so the two agree bitwise on shared seeds.
    """
    if plan.model.kind == "envelope_only":
        raise DomainError("an envelope-only model cannot be simulated")
    n_last = resolve_n_last(plan)
    n_idx = np.arange(plan.index_start, n_last + 1, dtype=float)
    delta = PowerLogSequence(rate=plan.alpha - plan.eps).values(n_idx)

    def one_chunk(rows: range) -> np.ndarray:
        values = _generate_rows(plan, n_idx, rows)
        return regulator_ratio_matrix(values, delta).max(axis=1)

    chunks = _row_chunks(plan.trajectories, n_idx.size)
    etas = np.concatenate(_map_chunks(one_chunk, chunks, threads))
    return [
        EtaSample(float(v), _discard_tail_bound(plan.model, plan.eps, float(v), n_last)) for v in etas
    ]


def simulate_trajectories(plan: SimulationPlan, threads: int = 1) -> TrajectoryBatch:
    """Generate the raw Z_n matrix as a TrajectoryBatch (trajectory x index)."""
    if plan.model.kind == "envelope_only":
        raise DomainError("an envelope-only model cannot be simulated")
    n_last = resolve_n_last(plan)
    width = n_last - plan.index_start + 1
    if plan.trajectories * width > _BATCH_CELL_CAP:
        raise DomainError(
            f"batch of {plan.trajectories} x {width} exceeds {_BATCH_CELL_CAP} cells; "
            "reduce trajectories or tighten truncation"
        )
    n_idx = np.arange(plan.index_start, n_last + 1, dtype=float)
    chunks = _row_chunks(plan.trajectories, width)
    values = np.concatenate(_map_chunks(lambda rows: _generate_rows(plan, n_idx, rows), chunks, threads))
    return TrajectoryBatch(
        values=values,
        index_start=plan.index_start,
        seed=plan.seed,
        model_label=plan.model.kind,
    )


# ---------------------------------------------------------------------------
# exact oracles for the exponential model


def _check_tail_args(alpha: float, eps: float, index_start: int) -> None:
    limit = min(1.0, alpha)
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not (0.0 < eps < limit):
        raise InvalidEpsilon(f"eps must lie in (0, {limit}), got {eps}")
    if index_start < 1:
        raise DomainError(f"index_start must be >= 1, got {index_start}")


def exact_eta_tail_with_error(
    alpha: float, eps: float, u: float, abs_tol: float = 1e-12, index_start: int = 1
) -> tuple[float, float]:
    """Exact tail P(eta > u) of the exponential-power model, with error bound.

    Evaluates 1 - prod_{n >= index_start} (1 - exp(-u n**eps)) by summing
    log1p terms; the product is cut once the certified remainder (either the
    discarded-factor sum or the size of the surviving product) drops below
    abs_tol.  alpha cancels from the tail and only gates eps.
    """
    _check_tail_args(alpha, eps, index_start)
    if not u > 0.0:
        raise DomainError(f"tail threshold must be positive, got {u}")
    if not (0.0 < abs_tol < 1.0):
        raise DomainError(f"abs_tol must lie in (0, 1), got {abs_tol}")
    n_last = max(index_start, exp_power_threshold(u, eps, abs_tol))
    log_keep = math.log(abs_tol)
    log_product = 0.0
    for lo in range(index_start, n_last + 1, _CHUNK_CELLS):
        hi = min(n_last, lo + _CHUNK_CELLS - 1)
        idx = np.arange(lo, hi + 1, dtype=float)
        log_product += float(np.sum(np.log1p(-np.exp(-u * idx**eps))))
        if log_product <= log_keep:
            # product is below abs_tol already; later factors only shrink it
            return min(1.0, -math.expm1(log_product)), abs_tol
    return min(1.0, -math.expm1(log_product)), abs_tol


def exact_eta_tail(alpha: float, eps: float, u: float, abs_tol: float = 1e-12, index_start: int = 1) -> float:
    """Exact tail P(eta > u) for the exponential-power model (see _with_error)."""
    return exact_eta_tail_with_error(alpha, eps, u, abs_tol, index_start)[0]


def bonferroni_sums(eps: float, u: float, abs_tol: float = 1e-12, index_start: int = 1) -> tuple[float, float]:
    """First- and second-order inclusion-exclusion sums for P(eta > u).

    Returns (sigma1, sigma2) with sigma1 = sum_n exp(-u n**eps) and
    sigma2 = sum_{n < m} exp(-u (n**eps + m**eps)) = (sigma1^2 - sigma1(2u)) / 2,
    so that sigma1 - sigma2 <= P(eta > u) <= sigma1.
    """
    if not u > 0.0:
        raise DomainError(f"tail threshold must be positive, got {u}")
    s1 = exp_power_sum(u, eps, abs_tol, index_start)
    s1_doubled = exp_power_sum(2.0 * u, eps, abs_tol, index_start)
    s2 = max(0.0, 0.5 * (s1 * s1 - s1_doubled))
    return s1, s2


def asymptotic_tail_constant(eps: float) -> float:
    """Gamma(1 + 1/eps), the constant of the u**(-1/eps) tail comparison."""
    if not (0.0 < eps < 1.0):
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    return math.exp(special.gammaln(1.0 + 1.0 / eps))


def _moment_tail_remainder(eps: float, p: float, upper: float, index_start: int) -> float:
    """Certified bound on int_upper^inf p u**(p-1) P(eta > u) du.

    Uses P(eta > u) <= sum_n exp(-u n**eps) termwise:
    int_upper^inf p u**(p-1) e**(-u n**eps) du = p n**(-p eps) Gamma(p, upper n**eps).
    Head terms go through gammaincc; the rest through Gamma(p, x) <= 2 x**(p-1) e**(-x)
    (valid for x >= 2 (p - 1)) and an integral test on n.
    """
    n_head = max(index_start, math.ceil(((2.0 * (p - 1.0) + 50.0) / upper) ** (1.0 / eps)))
    idx = np.arange(index_start, n_head + 1, dtype=float)
    head_sum = float(np.sum(idx ** (-p * eps) * special.gammaincc(p, upper * idx**eps)))
    head = p * math.exp(special.gammaln(p) + math.log(head_sum)) if head_sum > 0.0 else 0.0
    a = 1.0 / eps - 1.0
    q = float(special.gammaincc(a, upper * n_head**eps))
    if q > 0.0:
        log_tail = (
            math.log(2.0 * p / eps)
            + (p - 1.0 / eps) * math.log(upper)
            + special.gammaln(a)
            + math.log(q)
        )
        tail = math.exp(min(700.0, log_tail))
    else:
        tail = 0.0
    return head + tail


def exact_eta_moment(
    alpha: float, eps: float, p: float, rel_tol: float = 1e-6, index_start: int = 1
) -> float:
    """Exact ||eta||_p for the exponential-power model by certified quadrature.

    Integrates p u**(p-1) P(eta > u) over [0, U] with U pushed until the
    certified remainder is below rel_tol/2 of the integral; only p < 1/eps
    is served, mirroring the moment-blowup threshold of the bound theory.
    """
    _check_tail_args(alpha, eps, index_start)
    if not (math.isfinite(p) and p >= 1.0):
        raise DomainError(f"moment exponent must be >= 1, got {p}")
    if p >= 1.0 / eps:
        raise MomentInfinite(f"moments are only served for p < 1/eps = {1.0 / eps}, got p = {p}")
    if not (0.0 < rel_tol < 1.0):
        raise DomainError(f"rel_tol must lie in (0, 1), got {rel_tol}")

    tail_tol = min(1e-12, rel_tol * 1e-3)
    anchor = exact_eta_tail(alpha, eps, 1.0, tail_tol, index_start)  # integral >= anchor * 1**p
    upper = max(32.0, 4.0 * p)
    while _moment_tail_remainder(eps, p, upper, index_start) > 0.5 * rel_tol * anchor:
        upper *= 2.0
        if upper > 1e9:
            raise DomainError("moment quadrature cannot certify its truncation point")

    def integrand(u: float) -> float:
        return p * u ** (p - 1.0) * exact_eta_tail(alpha, eps, u, tail_tol, index_start)

    value, _ = integrate.quad(
        integrand,
        0.0,
        upper,
        epsabs=0.25 * rel_tol * anchor,
        epsrel=0.25 * rel_tol,
        limit=200,
        points=[1.0, min(10.0, upper / 2.0)],
    )
    return value ** (1.0 / p)


# ---------------------------------------------------------------------------
# config parsing


def model_from_config(obj: dict) -> SequenceModel:
    from .errors import ConfigError

    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError("model config must be an object with a 'kind' key")
    kind = obj["kind"]
    try:
        if kind == "exponential_power":
            return ExponentialPower(alpha=float(obj["alpha"]), index_start=int(obj.get("index_start", 1)))
        if kind == "gaussian_power":
            return GaussianPower(alpha=float(obj["alpha"]), index_start=int(obj.get("index_start", 1)))
    except KeyError as missing:
        raise ConfigError(f"model kind '{kind}' is missing field {missing}") from None
    except (TypeError, ValueError) as bad:
        raise ConfigError(f"malformed model config: {bad}") from None
    raise ConfigError(f"unknown model kind '{kind}'")


def plan_from_config(obj: dict) -> SimulationPlan:
    from .errors import ConfigError

    try:
        model = model_from_config(obj["model"])
        trunc_obj = obj.get("truncation", {})
        if "n_last" in trunc_obj:
            truncation: Truncation = FixedTruncation(n_last=int(trunc_obj["n_last"]))
        else:
            truncation = TailTargetTruncation(
                rho=float(trunc_obj["rho"]) if "rho" in trunc_obj else None,
                u_min=float(trunc_obj.get("u_min", 1.0)),
            )
        return SimulationPlan(
            model=model,
            eps=float(obj["eps"]),
            trajectories=int(obj["trajectories"]),
            truncation=truncation,
            seed=int(obj.get("seed", 0)),
            p_grid=tuple(float(x) for x in obj.get("p_grid", ())),
            u_grid=tuple(float(x) for x in obj.get("u_grid", ())),
        )
    except KeyError as missing:
        raise ConfigError(f"simulation config is missing field {missing}") from None
    except (TypeError, ValueError) as bad:
        raise ConfigError(f"malformed simulation config: {bad}") from None
