"""Counting real zeros of theta(q, .) in intervals and their limit densities.

For q -> 1- the real zeros fill the half-line left of -e**pi with density
about 1/((1-q)|x|), and for q -> -1+ both half-lines beyond e**(pi/2) in
modulus with half that density.  The counts here are the ingredients for
testing those laws.  Zeros are counted with multiplicity.
"""
import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from scipy.optimize import brentq

from .core import DEFAULT_PRECISION, _ctx, check_q, make_plan, sum_series
from .errors import DomainError, SignPatternViolated
from .zeros import real_zeros_in_interval

E_PI = math.exp(math.pi)
E_HALF_PI = math.exp(math.pi / 2)

CSV_COLUMNS = ("q", "a", "count", "normalized", "predicted", "deviation", "quantity")


def _real_q(q):
    q = check_q(q, nonzero=True)
    if q.imag != 0:
        raise DomainError("interval counts are defined for real q only")
    return q.real


def count_Z(q, lo, hi, include_lo=True, include_hi=True, prec=DEFAULT_PRECISION):
    """Number of real zeros in the interval from ``lo`` to ``hi``.

    The interval is closed by default; the flags open either end.  A
    degenerate interval counts 1 only if a zero sits at the point.
    """
    q = _real_q(q)
    recs = real_zeros_in_interval(q, lo, hi, prec, include_lo=include_lo,
                                  include_hi=include_hi)
    return sum(r.multiplicity for r in recs)


def core_bound(r):
    """Upper bound floor(pi / ln(1/r)) + 1 for the left core count when 0 < q <= r."""
    if not 0 < r < 1:
        raise DomainError("r must lie in (0, 1)")
    return int(math.pi / math.log(1.0 / r)) + 1


def left_core_count(q, prec=DEFAULT_PRECISION):
    """Zeros near the origin that do not take part in the limit density.

    For q > 0 this is the count on [-e**pi, 0).  For q < 0 a pair
    ``(count on [-e**(pi/2), 0), count on (0, e**(pi/2)])`` is returned.
    """
    q = _real_q(q)
    if q > 0:
        return count_Z(q, -E_PI, 0.0, include_hi=False, prec=prec)
    return (count_Z(q, -E_HALF_PI, 0.0, include_hi=False, prec=prec),
            count_Z(q, 0.0, E_HALF_PI, include_lo=False, prec=prec))


def _check_a(a, threshold):
    a = float(a)
    if not a >= threshold * (1 - 1e-15):
        raise DomainError(f"a must be at least {threshold:.6g}")
    return max(a, threshold)


def ell_a(q, a, prec=DEFAULT_PRECISION):
    """Zeros on [-a, -e**pi] for 0 < q < 1."""
    q = _real_q(q)
    if q <= 0:
        raise DomainError("ell_a needs 0 < q < 1")
    return count_Z(q, -_check_a(a, E_PI), -E_PI, prec=prec)


def n_a(q, a, prec=DEFAULT_PRECISION):
    """Zeros on [-a, -e**(pi/2)] for -1 < q < 0."""
    q = _real_q(q)
    if q >= 0:
        raise DomainError("n_a needs -1 < q < 0")
    return count_Z(q, -_check_a(a, E_HALF_PI), -E_HALF_PI, prec=prec)


def p_a(q, a, prec=DEFAULT_PRECISION):
    """Zeros on [e**(pi/2), a] for -1 < q < 0."""
    q = _real_q(q)
    if q >= 0:
        raise DomainError("p_a needs -1 < q < 0")
    return count_Z(q, E_HALF_PI, _check_a(a, E_HALF_PI), prec=prec)


def pairing_counts(q, prec=DEFAULT_PRECISION):
    """Counts on (0, e**(pi/2)] and on [-e**(pi/2)/|q|, 0) for -1 < q < 0.

    The functional equation maps the zeros of one interval into gaps of the
    other, so the two counts differ by at most one.
    """
    q = _real_q(q)
    if q >= 0:
        raise DomainError("the pairing concerns -1 < q < 0")
    right = count_Z(q, 0.0, E_HALF_PI, include_lo=False, prec=prec)
    left = count_Z(q, -E_HALF_PI / abs(q), 0.0, include_hi=False, prec=prec)
    return right, left


def pair_bracket_counts(q, s_max, prec=DEFAULT_PRECISION):
    """Counts of zeros in the intervals [-q**(-2s), -q**(-2s+1)], s = 1..s_max.

    For 0 < q < 1 each open interval holds the pair of zeros with labels
    2s-1, 2s while they are real, so every count is 0 or 2.  The zeros
    approach the endpoints very fast as s grows, so the intervals are taken
    closed (to working tolerance); the gaps between them hold no zeros.
    """
    q = _real_q(q)
    if q <= 0:
        raise DomainError("pair brackets concern 0 < q < 1")
    return [count_Z(q, -q ** (-2 * s), -q ** (-2 * s + 1), prec=prec)
            for s in range(1, s_max + 1)]


@dataclass
class DensityReport:
    """Normalized zero count at one q.

    ``counts`` holds ``ell_a`` (positive branch) or ``n_a`` and ``p_a``
    (negative branch), together with the core count(s).  ``normalized`` and
    ``deviation`` refer to ``ell_a`` or ``n_a``; the ``p_a`` figures are in
    ``normalized_p`` and ``deviation_p``.
    """
    q: float
    a: float
    counts: dict
    normalized: float
    predicted: float
    deviation: float
    normalized_p: Optional[float] = None
    deviation_p: Optional[float] = None

    @property
    def relative_deviation(self):
        return self.deviation / self.predicted

    @property
    def relative_deviation_p(self):
        return None if self.deviation_p is None else self.deviation_p / self.predicted


def density_report(q, a, prec=DEFAULT_PRECISION):
    """DensityReport for a single q; the branch follows the sign of q."""
    q = _real_q(q)
    if q > 0:
        ell = ell_a(q, a, prec)
        pred = math.log(a / E_PI)
        norm = ell * (1 - q)
        counts = {"ell_a": ell, "left_core": left_core_count(q, prec)}
        return DensityReport(q, float(a), counts, norm, pred, abs(norm - pred))
    n, p = n_a(q, a, prec), p_a(q, a, prec)
    pred = math.log(a / E_HALF_PI) / 2
    core_neg, core_pos = left_core_count(q, prec)
    counts = {"n_a": n, "p_a": p, "left_core": core_neg, "right_core": core_pos}
    nn, pn = n * (1 + q), p * (1 + q)
    return DensityReport(q, float(a), counts, nn, pred, abs(nn - pred), pn, abs(pn - pred))


def density_sweep(branch, a, q_grid, prec=DEFAULT_PRECISION):
    """DensityReports along a grid of q approaching 1 (positive) or -1 (negative)."""
    if branch not in ("positive", "negative"):
        raise DomainError("branch must be 'positive' or 'negative'")
    sign = 1 if branch == "positive" else -1
    qs = [float(q) for q in q_grid]
    if any(q * sign <= 0 or abs(q) >= 1 for q in qs):
        raise DomainError(f"grid values must lie in the {branch} branch")
    return [density_report(q, a, prec) for q in qs]


def deviations_decreasing(reports):
    """True when every tracked deviation decreases along the grid (vacuous for one point)."""
    devs = [r.deviation for r in reports]
    ok = all(b < a for a, b in zip(devs, devs[1:]))
    if reports and reports[0].deviation_p is not None:
        devs = [r.deviation_p for r in reports]
        ok = ok and all(b < a for a, b in zip(devs, devs[1:]))
    return ok


def _csv_rows(reports):
    for r in reports:
        if r.deviation_p is None:
            yield (r.q, r.a, r.counts["ell_a"], r.normalized, r.predicted, r.deviation, "ell_a")
        else:
            yield (r.q, r.a, r.counts["n_a"], r.normalized, r.predicted, r.deviation, "n_a")
            yield (r.q, r.a, r.counts["p_a"], r.normalized_p, r.predicted, r.deviation_p, "p_a")


def write_density_csv(reports, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in _csv_rows(reports):
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def write_density_json(reports, fh):
    json.dump([asdict(r) for r in reports], fh, indent=2, sort_keys=True)
    fh.write("\n")


# --------------------------------------------------------------------------
# ladders at spectral points


@dataclass
class LadderProbe:
    """Sign ladder x_s = y / q**s at a spectral point and the zeros it brackets."""
    k: int
    branch: str
    q: float
    y: float
    points: list
    values: list
    intervals: list = field(default_factory=list)
    zeros: list = field(default_factory=list)

    @property
    def max_gap(self):
        return max((abs(b - a) for a, b in self.intervals), default=0.0)


def _theta_real(q, xs, eps=1e-30):
    plan = make_plan(abs(q), max(abs(x) for x in xs), (0,), math.log(eps))
    vals = sum_series(q, xs, (0,), plan)[0]
    with _ctx(plan.bits):
        return [float(v.real) for v in vals]


def _bisect_zero(q, a, b):
    return brentq(lambda x: _theta_real(q, [x])[0], a, b, xtol=1e-15 * abs(a), rtol=1e-15)


def dense_zero_probe(k, branch="positive", a=100.0, prec=DEFAULT_PRECISION, point=None):
    """Zeros bracketed by the ladder x_s = y/q**s at the k-th spectral point.

    positive branch: x_s descends from y~_k < 0.  theta(x_1) = 1, and for k
    large theta(x_s) < 0 at even s >= 2 and > 0 at odd s >= 3, so every
    ladder interval inside [-a, -e**pi] holds a zero.

    negative branch (k even): y-_k > 0 and the ladder alternates in sign.  On
    the positive side theta(x_{4m+2}) < -2 and theta(x_{4m+4}) > 2, giving a
    zero in each interval (x_{4m+2}, x_{4m+4}) inside [e**(pi/2), a].

    ``point`` may supply the SpectralPoint to skip recomputing the spectrum.
    Raises SignPatternViolated when the pattern fails, which means k is too
    small for the asymptotic regime.
    """
    from .spectrum import real_spectrum_negative, real_spectrum_positive

    if branch not in ("positive", "negative"):
        raise DomainError("branch must be 'positive' or 'negative'")
    if branch == "negative" and k % 2:
        raise DomainError("the negative-branch ladder starts from an even index")
    if point is None:
        spec = real_spectrum_positive if branch == "positive" else real_spectrum_negative
        point = spec(k, prec, k_min=k)[-1]
    q, y = point.q.real, point.y.real
    a = float(a)

    n = 0
    while abs(y) / abs(q) ** (n + 1) <= a:
        n += 1
    xs = [y / q ** s for s in range(n + 1)]
    vals = _theta_real(q, xs)
    if abs(vals[1] - 1) > 1e-8:
        raise SignPatternViolated(f"theta(x_1) = {vals[1]!r}, expected 1")
    probe = LadderProbe(k, branch, q, y, xs, vals)

    if branch == "positive":
        lo = -a
        for s in range(2, n + 1):
            want = -1 if s % 2 == 0 else 1
            if vals[s] * want <= 0:
                raise SignPatternViolated(f"theta(x_{s}) = {vals[s]:.3g} has the wrong sign")
        pairs = [(s + 1, s) for s in range(1, n) if xs[s] <= -E_PI and xs[s + 1] >= lo]
    else:
        for s in range(2, n + 1, 2):
            want = -2 if s % 4 == 2 else 2
            if (vals[s] - want) * want <= 0:
                raise SignPatternViolated(f"theta(x_{s}) = {vals[s]:.3g} violates |theta| > 2")
        pairs = [(s, s + 2) for s in range(2, n - 1, 4) if xs[s] >= E_HALF_PI]
    for i, j in pairs:
        lo_x, hi_x = sorted((xs[i], xs[j]))
        probe.intervals.append((lo_x, hi_x))
        probe.zeros.append(_bisect_zero(q, xs[i], xs[j]))
    return probe
