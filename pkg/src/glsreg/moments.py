"""Moment curves, tails, sup-norms over exponents, and conjugate tail bounds.

The central objects are the moment curve ``p -> ||f||_p`` and the tail
``t -> P(|f| >= t)``.  Against a generating function ``psi`` the moment
curve defines the norm

    ||f|| = sup_p ||f||_p / psi(p),

and on the conjugate side the Young-Fenchel transform of
``h(p) = p ln psi(p)`` turns a unit norm into the exponential tail bound
``P(|f| >= t) <= exp(-h*(ln t))`` for ``t >= e``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import DomainError, EmptyDomain, EmptySample, LengthMismatch
from .estimates import Z99, ConfidenceValue, power_mean_estimate, proportion_estimate
from .generating import (
    Domain,
    ExponentInterval,
    GeneratingFunction,
    PointDomain,
    intersect_domains,
    natural_function,
)
from .scan import ScanResult, supremum_scan

__all__ = [
    "MomentFunction",
    "TailFunction",
    "constant_moments",
    "std_exponential_moments",
    "half_normal_moments",
    "discrete_moments",
    "table_moments",
    "scaled_moments",
    "restricted_moments",
    "sup_moment_function",
    "empirical_moments",
    "empirical_tail",
    "empirical_tail_function",
    "gls_norm",
    "gls_norm_scan",
    "classical_grand_norm",
    "young_fenchel",
    "young_fenchel_scan",
    "exponential_tail_bound",
    "lyapunov_violations",
    "log_convexity_violations",
    "write_moment_table",
    "read_moment_table",
    "write_tail_table",
    "read_tail_table",
    "natural_function",
]


@dataclass(frozen=True)
class MomentFunction:
    """Map p -> ||f||_p on an exponent interval.

    ``evaluator`` is vectorised and is only consulted inside the domain;
    outside it the curve reports +inf (nothing is guaranteed there).
    Empirical instances carry a half-width evaluator and a sample count.
    """

    interval: ExponentInterval
    evaluator: Callable[[np.ndarray], np.ndarray]
    half_width_evaluator: Callable[[np.ndarray], np.ndarray] | None = None
    source: str = "analytic"
    sample_count: int | None = None
    label: str = ""

    @property
    def domain(self) -> ExponentInterval:
        return self.interval

    def values(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        inside = self.interval.contains_array(p)
        out = np.full(p.shape, math.inf)
        if inside.any():
            out[inside] = self.evaluator(p[inside])
        return out

    def value(self, p: float) -> float:
        return float(self.values(np.asarray([p], dtype=float))[0])

    def half_widths(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.half_width_evaluator is None:
            return np.zeros(p.shape)
        inside = self.interval.contains_array(p)
        out = np.zeros(p.shape)
        if inside.any():
            out[inside] = self.half_width_evaluator(p[inside])
        return out


@dataclass(frozen=True)
class TailFunction:
    """Map t -> P(|f| >= t) (or a certified upper bound for it) on t >= 0."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    kind: str = "exact"  # "exact" | "bound" | "empirical"
    half_width_evaluator: Callable[[np.ndarray], np.ndarray] | None = None
    sample_count: int | None = None
    label: str = ""

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("tail thresholds must be nonnegative")
        return np.clip(self.evaluator(t), 0.0, 1.0)

    def value(self, t: float) -> float:
        return float(self.values(np.asarray([t], dtype=float))[0])

    def half_widths(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.half_width_evaluator is None:
            return np.zeros(t.shape)
        return self.half_width_evaluator(t)


# ---------------------------------------------------------------------------
# moment-curve constructors


def constant_moments(c: float, interval: ExponentInterval | None = None) -> MomentFunction:
    """Moment curve of a variable with ||f||_p = c for every p."""
    if c < 0 or not math.isfinite(c):
        raise DomainError(f"a p-norm level must be finite and nonnegative, got {c}")
    interval = interval or ExponentInterval(1.0, math.inf)
    return MomentFunction(interval, lambda p: np.full(p.shape, float(c)), label=f"constant({c})")


def std_exponential_moments() -> MomentFunction:
    """||theta||_p = Gamma(p+1)^(1/p) for a standard exponential variable."""
    return MomentFunction(
        ExponentInterval(1.0, math.inf),
        lambda p: np.exp(special.gammaln(p + 1.0) / p),
        label="std_exponential",
    )


def half_normal_moments() -> MomentFunction:
    """||g||_p = (2^(p/2) Gamma((p+1)/2) / sqrt(pi))^(1/p) for |g|, g standard normal."""

    def ev(p: np.ndarray) -> np.ndarray:
        log_moment = 0.5 * p * math.log(2.0) + special.gammaln((p + 1.0) / 2.0) - 0.5 * math.log(math.pi)
        return np.exp(log_moment / p)

    return MomentFunction(ExponentInterval(1.0, math.inf), ev, label="half_normal")


def discrete_moments(atoms: Sequence[float], weights: Sequence[float]) -> MomentFunction:
    """Moment curve of a discrete variable |f| with the given atoms and weights."""
    a = np.abs(np.asarray(atoms, dtype=float))
    w = np.asarray(weights, dtype=float)
    if a.size == 0:
        raise EmptySample("a discrete moment curve needs at least one atom")
    if a.size != w.size:
        raise LengthMismatch(f"{a.size} atoms vs {w.size} weights")
    if np.any(w <= 0) or not np.all(np.isfinite(w)) or not np.all(np.isfinite(a)):
        raise DomainError("weights must be positive and atoms finite")
    log_w = np.log(w) - math.log(float(w.sum()))
    with np.errstate(divide="ignore"):
        log_a = np.log(a)

    def ev(p: np.ndarray) -> np.ndarray:
        # log E|f|^p = logsumexp(p log a + log w), columns over atoms
        lp = p[:, None] * log_a[None, :] + log_w[None, :]
        return np.exp(special.logsumexp(lp, axis=1) / p)

    return MomentFunction(ExponentInterval(1.0, math.inf), ev, label="discrete")


def table_moments(ps: Sequence[float], vals: Sequence[float], half_widths: Sequence[float] | None = None) -> MomentFunction:
    """Moment curve through tabulated knots, geometric interpolation inside the hull."""
    ps = np.asarray(list(ps), dtype=float)
    vals = np.asarray(list(vals), dtype=float)
    if ps.size != vals.size:
        raise LengthMismatch("knot exponents and values differ in length")
    if ps.size < 2 or np.any(np.diff(ps) <= 0):
        raise DomainError("a moment table needs at least two strictly increasing exponents")
    if ps[0] < 1.0:
        raise DomainError("moment exponents start at 1")
    if np.any(vals < 0) or not np.all(np.isfinite(vals)):
        raise DomainError("moment table values must be finite and nonnegative")
    interval = ExponentInterval(float(ps[0]), float(np.nextafter(ps[-1], math.inf)))
    log_p = np.log(ps)
    with np.errstate(divide="ignore"):
        log_v = np.log(vals)

    def ev(p: np.ndarray) -> np.ndarray:
        return np.exp(np.interp(np.log(p), log_p, log_v))

    if half_widths is None:
        return MomentFunction(interval, ev, label="table")
    hws = np.asarray(list(half_widths), dtype=float)
    if hws.size != ps.size:
        raise LengthMismatch("knot exponents and half-widths differ in length")

    def hw(p: np.ndarray) -> np.ndarray:
        return np.interp(np.log(p), log_p, hws)

    source = "empirical" if np.any(hws > 0) else "analytic"
    return MomentFunction(interval, ev, half_width_evaluator=hw, source=source, label="table")


def scaled_moments(mf: MomentFunction, c: float) -> MomentFunction:
    """Moment curve of c*f: every p-norm scales by |c|."""
    s = abs(float(c))
    return MomentFunction(
        mf.interval,
        lambda p: s * mf.evaluator(p),
        half_width_evaluator=None if mf.half_width_evaluator is None else (lambda p: s * mf.half_width_evaluator(p)),
        source=mf.source,
        sample_count=mf.sample_count,
        label=f"{mf.label}*{s}",
    )


def restricted_moments(mf: MomentFunction, interval: ExponentInterval) -> MomentFunction:
    """Restrict a moment curve to a subinterval of its domain."""
    sub = intersect_domains(mf.interval, interval)
    if isinstance(sub, PointDomain):
        raise DomainError("restriction collapsed the moment domain to a point")
    return MomentFunction(sub, mf.evaluator, mf.half_width_evaluator, mf.source, mf.sample_count, mf.label)


def sup_moment_function(members: Sequence[MomentFunction]) -> MomentFunction:
    """Pointwise sup of a finite family of moment curves on the common domain."""
    if not members:
        raise EmptySample("sup of an empty moment family")
    dom: Domain = members[0].interval
    for m in members[1:]:
        dom = intersect_domains(dom, m.interval)
    if isinstance(dom, PointDomain):
        raise EmptyDomain("moment family domains intersect in a single point")

    def ev(p: np.ndarray) -> np.ndarray:
        return np.max(np.stack([m.evaluator(p) for m in members]), axis=0)

    return MomentFunction(dom, ev, label="family_sup")


# ---------------------------------------------------------------------------
# empirical estimators


def empirical_moments(samples: np.ndarray, p_grid: Sequence[float]) -> MomentFunction:
    """Empirical moment curve from i.i.d. samples.

    The returned curve evaluates at any exponent >= 1 straight from the
    sample (stable in log space); ``p_grid`` fixes the tabulation used for
    CSV export.  Half-widths come from the delta method on mean |x|^p.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise EmptySample("empirical moments of an empty sample")
    if not np.all(np.isfinite(x)):
        raise DomainError("samples must be finite")
    p_grid = tuple(float(p) for p in p_grid)
    if any(p < 1.0 for p in p_grid):
        raise DomainError("moment grid exponents must be >= 1")

    def ev(p: np.ndarray) -> np.ndarray:
        return np.asarray([power_mean_estimate(x, q).value for q in np.asarray(p, dtype=float)])

    def hw(p: np.ndarray) -> np.ndarray:
        return np.asarray([power_mean_estimate(x, q).half_width for q in np.asarray(p, dtype=float)])

    return MomentFunction(
        ExponentInterval(1.0, math.inf),
        ev,
        half_width_evaluator=hw,
        source="empirical",
        sample_count=int(x.size),
        label="empirical",
    )


def empirical_tail(samples: np.ndarray, t: float) -> ConfidenceValue:
    """Empirical exceedance probability P(|x| >= t) with binomial half-width."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise EmptySample("empirical tail of an empty sample")
    if t < 0:
        raise DomainError(f"tail threshold must be nonnegative, got {t}")
    hits = int(np.count_nonzero(np.abs(x) >= t))
    return proportion_estimate(hits, x.size)


def empirical_tail_function(samples: np.ndarray) -> TailFunction:
    """Wrap a sample as a TailFunction with binomial half-widths."""
    x = np.abs(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise EmptySample("empirical tail of an empty sample")
    sx = np.sort(x)
    m = x.size

    def ev(t: np.ndarray) -> np.ndarray:
        return (m - np.searchsorted(sx, t, side="left")) / m

    def hw(t: np.ndarray) -> np.ndarray:
        p_hat = ev(t)
        return Z99 * np.sqrt(p_hat * (1.0 - p_hat) / m) + Z99 * Z99 / (2.0 * m)

    return TailFunction(ev, kind="empirical", half_width_evaluator=hw, sample_count=m, label="empirical")


# ---------------------------------------------------------------------------
# norms


def gls_norm_scan(
    moments: MomentFunction,
    psi: GeneratingFunction,
    n_points: int = 512,
    refine: bool = True,
) -> ScanResult:
    """Scan detail behind gls_norm: grid, objective, argmax, unbounded flag."""
    dom = intersect_domains(moments.domain, psi.domain)

    def ratio(p: np.ndarray) -> np.ndarray:
        num = moments.values(p)
        den = psi.values(p)
        out = np.zeros(p.shape)
        den_finite = np.isfinite(den)
        np.divide(num, den, out=out, where=den_finite)
        out[~den_finite] = 0.0  # C / inf := 0
        return out

    return supremum_scan(ratio, dom, n_points=n_points, refine=refine)


def gls_norm(moments: MomentFunction, psi: GeneratingFunction, n_points: int = 512, refine: bool = True) -> float:
    """sup_p ||f||_p / psi(p) over the common exponent domain.

    Returns +inf when the ratio is still climbing at the scan cap of an
    unbounded domain; a capped finite value would understate the norm.
    """
    return gls_norm_scan(moments, psi, n_points=n_points, refine=refine).value


def classical_grand_norm(moments: MomentFunction, q: float, n_points: int = 512) -> float:
    """Classical grand Lebesgue norm sup_{0<eps<q-1} eps^(1/(q-eps)) ||f||_{q-eps}.

    Computed by substituting p = q - eps and scanning (q - p)^(1/p) ||f||_p
    over p in (1, q).
    """
    if not (math.isfinite(q) and q > 1.0):
        raise EmptyDomain(f"classical grand norm needs q > 1, got {q}")
    dom = intersect_domains(moments.domain, ExponentInterval(1.0, q, lower_open=True))

    def objective(p: np.ndarray) -> np.ndarray:
        return (q - p) ** (1.0 / p) * moments.values(p)

    return supremum_scan(objective, dom, n_points=n_points).value


# ---------------------------------------------------------------------------
# conjugate transform and tail bound


def young_fenchel_scan(psi: GeneratingFunction, v: float, n_points: int = 512, refine: bool = True) -> ScanResult:
    """Scan detail behind young_fenchel: sup_p [p v - p ln psi(p)]."""
    if not math.isfinite(v):
        raise DomainError(f"conjugate argument must be finite, got {v}")

    def objective(p: np.ndarray) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            log_psi = np.log(psi.values(p))
        return p * (v - log_psi)

    return supremum_scan(objective, psi.domain, n_points=n_points, refine=refine)


def young_fenchel(psi: GeneratingFunction, v: float, n_points: int = 512, refine: bool = True) -> float:
    """Young-Fenchel transform of h(p) = p ln psi(p), evaluated at v.

    Returns +inf (flagged unbounded in the scan variant) when the objective
    keeps growing at the cap of an unbounded domain.
    """
    return young_fenchel_scan(psi, v, n_points=n_points, refine=refine).value


def exponential_tail_bound(psi: GeneratingFunction, t: float) -> float:
    """Tail bound exp(-h*(ln t)) for a variable of unit norm under psi.

    Valid for t >= e only; smaller thresholds are a hard error.  Callers
    must rescale their variable to unit norm first -- the bound is not
    homogeneous.  Equals inf_p (psi(p)/t)^p, hence always in [0, 1] after
    clamping.
    """
    if not (math.isfinite(t) and t >= math.e):
        raise DomainError(f"the conjugate tail bound needs t >= e, got {t}")
    h_star = young_fenchel(psi, math.log(t))
    if h_star == math.inf:
        return 0.0
    return min(1.0, math.exp(-h_star))


# ---------------------------------------------------------------------------
# validation checks


def lyapunov_violations(mf: MomentFunction, p_grid: Sequence[float]) -> list[tuple[float, float, float, float]]:
    """Points where the moment curve decreases beyond its tolerance.

    p-norms on a probability space are nondecreasing in p.  For empirical
    curves the tolerance at each step is twice the larger confidence
    half-width; analytic curves get a pure rounding allowance.
    Returns (p_lo, p_hi, value_lo, value_hi) for every violation.
    """
    ps = np.asarray(sorted(p_grid), dtype=float)
    vals = mf.values(ps)
    hws = mf.half_widths(ps)
    bad = []
    for i in range(ps.size - 1):
        tol = 2.0 * max(hws[i], hws[i + 1]) if mf.source == "empirical" else 1e-12 * max(1.0, abs(vals[i]))
        if vals[i + 1] < vals[i] - tol:
            bad.append((float(ps[i]), float(ps[i + 1]), float(vals[i]), float(vals[i + 1])))
    return bad


def log_convexity_violations(mf: MomentFunction, p_grid: Sequence[float]) -> list[tuple[float, float]]:
    """Grid points where p -> p ln ||f||_p fails midpoint convexity.

    Only meaningful for analytic curves; sampling noise swamps second
    differences for empirical ones.  Returns (p, second_difference).
    """
    ps = np.asarray(sorted(p_grid), dtype=float)
    vals = mf.values(ps)
    with np.errstate(divide="ignore"):
        h = ps * np.log(vals)
    bad = []
    for i in range(1, ps.size - 1):
        lam = (ps[i + 1] - ps[i]) / (ps[i + 1] - ps[i - 1])
        chord = lam * h[i - 1] + (1.0 - lam) * h[i + 1]
        gap = chord - h[i]
        if gap < -1e-9 * max(1.0, abs(h[i])):
            bad.append((float(ps[i]), float(gap)))
    return bad


# ---------------------------------------------------------------------------
# CSV round trips


def write_moment_table(mf: MomentFunction, p_grid: Sequence[float], path) -> None:
    """Persist a moment curve on a grid as CSV with header p,value,half_width."""
    from .persist import atomic_write_text

    ps = np.asarray(list(p_grid), dtype=float)
    vals = mf.values(ps)
    hws = mf.half_widths(ps)
    lines = ["p,value,half_width"]
    lines += [f"{float(p)!r},{float(v)!r},{float(h)!r}" for p, v, h in zip(ps, vals, hws)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_moment_table(path) -> MomentFunction:
    """Load a moment table written by write_moment_table.

    The curve interpolates geometrically inside the tabulated hull and is
    undefined (i.e. +inf) outside it.
    """
    rows = _read_table(path, ("p", "value", "half_width"))
    return table_moments([r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows])


def write_tail_table(tf: TailFunction, t_grid: Sequence[float], path) -> None:
    """Persist a tail function on a grid as CSV with header t,value,half_width."""
    from .persist import atomic_write_text

    ts = np.asarray(list(t_grid), dtype=float)
    vals = tf.values(ts)
    hws = tf.half_widths(ts)
    lines = ["t,value,half_width"]
    lines += [f"{float(t)!r},{float(v)!r},{float(h)!r}" for t, v, h in zip(ts, vals, hws)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_tail_table(path) -> TailFunction:
    """Load a tail table written by write_tail_table (linear interpolation)."""
    rows = _read_table(path, ("t", "value", "half_width"))
    ts = np.asarray([r[0] for r in rows])
    vals = np.asarray([r[1] for r in rows])
    hws = np.asarray([r[2] for r in rows])
    if ts.size < 1 or np.any(np.diff(ts) <= 0):
        raise DomainError("a tail table needs strictly increasing thresholds")
    if np.any((vals < 0) | (vals > 1)):
        raise DomainError("tail table values must lie in [0, 1]")

    def ev(t: np.ndarray) -> np.ndarray:
        return np.interp(t, ts, vals)

    def hw(t: np.ndarray) -> np.ndarray:
        return np.interp(t, ts, hws)

    return TailFunction(ev, kind="empirical" if np.any(hws > 0) else "bound", half_width_evaluator=hw, label="table")


def _read_table(path, expected_header: tuple[str, ...]) -> list[tuple[float, ...]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != expected_header:
            raise DomainError(f"expected CSV header {','.join(expected_header)} in {path}")
        try:
            return [tuple(float(cell) for cell in row) for row in reader if row]
        except ValueError as bad:
            raise DomainError(f"non-numeric cell in {path}: {bad}") from None
