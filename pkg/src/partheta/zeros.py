"""Counting and isolating zeros of theta(q, .) for fixed q.

Complex zeros are counted with the argument principle on circles centred at
the origin.  The circles C_k: |z| = |q|**(-k-1/2) are the natural cell walls:
for small |q| (and, by the strong-separation theorem, for k >= n whenever
|q| <= 1 - 1/(alpha0 n)) exactly one zero sits between consecutive circles.
Zeros inside a ring are recovered from contour moments (Delves-Lyness) and
polished by Newton's method; rings holding too many zeros are split.

Real zeros are found by a sign scan on a grid geometric in |x|, with the
critical points of theta located so that close pairs and double zeros are not
missed between grid points.
"""
import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    DEFAULT_PRECISION, _ctx, _log_abs, _log_term, check_q, make_plan, sum_series,
)
from .errors import (
    BudgetExceeded, ContourTooCloseToZero, CountMismatch, DomainError,
    DoubleZeroSuspected, NoConvergence, NonIntegerCount,
)

#: radius of the disk in which the zeros are separated in modulus
C0 = 0.2078750206
#: constant of the strong-separation theorem, sqrt(3) / (2 pi)
ALPHA0 = math.sqrt(3.0) / (2.0 * math.pi)

GUARD = 1e-8
DOUBLE_ZERO_RATIO = 1e-6


@dataclass
class ZeroRecord:
    z: complex
    residual: float
    multiplicity: int = 1
    annulus_index: Optional[int] = None


@dataclass
class AnnulusCensus:
    k: int
    count: int
    contour_integral_raw: float
    verified: bool = field(init=False)

    def __post_init__(self):
        self.verified = abs(self.contour_integral_raw - self.count) < 0.25


@dataclass
class SeparationReport:
    n: int
    q: complex
    per_annulus: list
    strong: bool = field(init=False)

    def __post_init__(self):
        self.strong = all(c.count == 1 for c in self.per_annulus)


def separation_radius(q, k):
    """Radius |q|**(-k-1/2) of the circle C_k."""
    return abs(q) ** (-k - 0.5)


def annulus_of(q, z):
    """Index k with |q|**(-k+1/2) < |z| < |q|**(-k-1/2), or None for k < 1."""
    az = abs(z)
    if az == 0:
        return None
    k = int(round(math.log(az) / -math.log(abs(q))))
    return k if k >= 1 else None


def max_separation_index(q):
    """Smallest n >= 5 for which the strong-separation theorem covers |q|."""
    r = abs(q)
    if r <= 1 - 1 / (ALPHA0 * 5):
        return 5
    return int(math.ceil(1 / (ALPHA0 * (1 - r)) - 1e-12))


def double_zero_threshold(dz2, z):
    return DOUBLE_ZERO_RATIO * (1 + abs(dz2) * abs(z))


# --------------------------------------------------------------------------
# contour sampling


def _log_max_term(q_abs, r):
    lq, lz = _log_abs(q_abs), _log_abs(r)
    best, j = 0.0, 1
    while True:
        lt = _log_term(j, 0, lq, lz)
        best = max(best, lt)
        if (j + 1) * lq + lz < 0:
            return best
        j += 1


def log_ratio_values(q, zs, rel=1e-20, orders=(0, 1)):
    """theta'/theta (and log|theta|) at points of one modulus, relative accuracy.

    The absolute target starts at ``rel`` times the typical minimum of
    |theta| on the circle and is lowered until every sample keeps twelve correct digits
    relative to its own |theta|.
    """
    zs = list(zs)
    r = max(abs(z) for z in zs)
    lm = _log_max_term(abs(q), r)
    # |theta| on such circles dips to about exp(-pi^2 / (2 ln(1/|q|))) * max term
    log_eps = lm + math.log(rel) - math.pi ** 2 / (2 * -math.log(abs(q)))
    while True:
        plan = make_plan(abs(q), r, orders, log_eps)
        vals = sum_series(q, zs, orders, plan)
        with _ctx(plan.bits):
            t0, t1 = vals[0], vals[1]
            logabs = np.array([float(_mp_log_abs(a)) for a in t0])
            lmin = logabs.min()
            if lmin == float("-inf") or lmin - log_eps > 12 * math.log(10) or lmin < lm - 700:
                ratio = np.array([complex(b / a) if a != 0 else complex("nan")
                                  for a, b in zip(t0, t1)])
                return ratio, logabs
        log_eps = lmin - 14 * math.log(10)


def _mp_log_abs(a):
    import gmpy2

    v = abs(a)
    return gmpy2.log(v) if v > 0 else float("-inf")


class _Circle:
    """Cached trapezoid samples of z theta'/theta on |z| = R."""

    def __init__(self, q, R):
        self.q, self.R = q, R
        self.m = 0
        self.f = np.zeros(0, complex)
        self.logabs = np.zeros(0)

    def points(self, m):
        return self.R * np.exp(2j * np.pi * np.arange(m) / m)

    def refine_to(self, m):
        while self.m < m:
            if self.m == 0:
                new_m = m
                pts = self.points(new_m)
            else:
                new_m = 2 * self.m
                pts = self.R * np.exp(2j * np.pi * (2 * np.arange(self.m) + 1) / new_m)
            ratio, la = log_ratio_values(self.q, pts)
            f = pts * ratio
            if self.m == 0:
                self.f, self.logabs = f, la
            else:
                g = np.empty(new_m, complex)
                g[0::2], g[1::2] = self.f, f
                h = np.empty(new_m)
                h[0::2], h[1::2] = self.logabs, la
                self.f, self.logabs = g, h
            self.m = new_m

    def check_guard(self, guard):
        if not np.all(np.isfinite(self.f)):
            raise ContourTooCloseToZero(f"theta vanishes on |z|={self.R:g}")
        # |theta/theta'| estimates the distance to the nearest zero
        dist = self.R / np.abs(self.f).max()
        if dist < guard * self.R:
            raise ContourTooCloseToZero(
                f"a zero lies within ~{dist:.3g} of |z|={self.R:.6g} (q={self.q})")

    def integral(self):
        return complex(self.f.mean())

    def moments(self, pmax, scale):
        w = self.points(self.m) / scale
        return np.array([complex((self.f * w ** p).mean()) for p in range(pmax + 1)])


_CIRCLES = {}


def _circle(q, R):
    key = (complex(q), float(R))
    c = _CIRCLES.get(key)
    if c is None:
        if len(_CIRCLES) > 512:
            _CIRCLES.clear()
        c = _CIRCLES[key] = _Circle(complex(q), float(R))
    return c


def _circle_count(q, R, guard=GUARD, m0=256, m_max=2 ** 15, tight=None):
    """Argument-principle count on |z| = R; returns (count, raw integral)."""
    c = _circle(q, R)
    c.refine_to(max(2 * m0, c.m))
    c.check_guard(guard)
    while True:
        cur = c.integral()
        prev = complex(c.f[::2].mean())  # the same rule on half the samples
        n = round(cur.real)
        ok = abs(cur - prev) < 0.05 and abs(cur - n) < 0.25
        if ok and tight is not None:
            ok = abs(cur - n) < tight and abs(cur - prev) < tight
        if ok:
            return int(n), cur.real
        if c.m >= m_max:
            raise NonIntegerCount(
                f"argument-principle integral {cur:.4f} on |z|={R:.6g} did not settle")
        c.refine_to(2 * c.m)
        c.check_guard(guard)


def count_in_disk(q, R, prec=DEFAULT_PRECISION, guard=GUARD):
    """Number of zeros of theta(q, .) in |z| < R, with multiplicity.

    Raises
    ------
    ContourTooCloseToZero
        if some sample has |theta / theta'| < ``guard * R``, i.e. a zero lies
        within about ``guard * R`` of the circle.
    NonIntegerCount
        if the trapezoid sum does not settle within 0.25 of an integer.
    """
    q = check_q(q, nonzero=True)
    if not R > 0:
        raise DomainError("R must be positive")
    return _circle_count(q, R, guard)[0]


def annulus_census(q, k, prec=DEFAULT_PRECISION, guard=GUARD):
    """Zero count between C_{k-1} and C_k, i.e. in the annulus of xi_k."""
    q = check_q(q, nonzero=True)
    if k < 1:
        raise DomainError("k must be >= 1")
    n_out, raw_out = _circle_count(q, separation_radius(q, k), guard)
    n_in, raw_in = _circle_count(q, separation_radius(q, k - 1), guard)
    return AnnulusCensus(k, n_out - n_in, raw_out - raw_in)


def check_strong_separation(q, n, k_max, prec=DEFAULT_PRECISION):
    """Census of the annuli n..k_max under the strong-separation hypotheses."""
    q = check_q(q, nonzero=True)
    if n < 5:
        raise DomainError("n must be >= 5")
    if abs(q) > 1 - 1 / (ALPHA0 * n) + 1e-12:
        raise DomainError(f"|q|={abs(q):.6g} exceeds 1 - 1/(alpha0 n) = {1 - 1 / (ALPHA0 * n):.6g}")
    if k_max < n:
        raise DomainError("k_max must be >= n")
    return SeparationReport(n, q, [annulus_census(q, k, prec) for k in range(n, k_max + 1)])


# --------------------------------------------------------------------------
# Newton refinement


def _derivs(q, z, eps, orders=(0, 1, 2)):
    plan = make_plan(abs(q), abs(z), orders, math.log(eps))
    vals = sum_series(q, [z], orders, plan)
    return vals, plan


def _newton_data(q, z, eps):
    """theta, theta', theta'' at z (complex) plus the Newton step theta/theta'."""
    vals, plan = _derivs(q, z, eps)
    with _ctx(plan.bits):
        t0, t1, t2 = vals[0][0], vals[1][0], vals[2][0]
        step = complex(t0 / t1) if t1 != 0 else complex("inf")
        halley = complex(t1 / t2) if t2 != 0 else complex("inf")
    return complex(t0), complex(t1), complex(t2), step, halley


def _settle_critical(q, z, eps, max_iter=40):
    """Newton on theta' from z; None if it does not settle."""
    for _ in range(max_iter):
        _, _, _, _, h = _newton_data(q, z, eps)
        if not cmath.isfinite(h):
            return None
        z -= h
        if abs(h) <= 4e-16 * max(1.0, abs(z)):
            return z
    return None


def refine_zero(q, z0, prec=DEFAULT_PRECISION, max_iter=80, allow_double=False):
    """Newton corrector from ``z0``.

    Converges to a zero with residual |theta| <= target_eps * max(1, |theta'| |z|).
    Near a double zero Newton's iteration turns linear; the iteration then
    switches to the multiplicity-2 step and, unless ``allow_double``, raises
    :class:`DoubleZeroSuspected` (the caller should use the spectrum module).
    """
    q = check_q(q, nonzero=True)
    z = complex(z0)
    eps = prec.target_eps * 1e-3
    last = None
    linear_hits = 0
    mult = 1
    for _ in range(max_iter):
        t0, t1, t2, step, _ = _newton_data(q, z, eps)
        if not cmath.isfinite(step):
            if abs(t0) <= prec.target_eps:
                break
            raise NoConvergence(f"theta' vanishes at z={z}")
        if last is not None and abs(last) > 0:
            ratio = abs(step) / abs(last)
            if 0.3 < ratio < 0.7 and abs(t1) < 1e-3 * (1 + abs(t2) * abs(z)):
                linear_hits += 1
        if linear_hits >= 3:
            mult = 2
        s = mult * step
        cap = 0.5 * max(1.0, abs(z))
        if abs(s) > cap:
            s *= cap / abs(s)
        z = z - s
        last = step
        if abs(s) <= 4e-16 * max(1.0, abs(z)):
            break
    else:
        # Newton wanders near a double zero whose two zeros are (nearly) a
        # complex pair while the iterate stays real; look for that critical point
        c = _settle_critical(q, z, eps)
        if c is not None:
            t0, t1, t2, _, _ = _newton_data(q, c, eps)
            if abs(t0) <= 0.5e-12 * abs(t2) * max(1.0, abs(c)) ** 2:
                raise DoubleZeroSuspected(
                    f"Newton stagnates near a double zero z~{c} (q={q})", z=c)
        raise NoConvergence(f"Newton did not converge from z0={z0} (q={q})")
    if q.imag == 0 and z.imag != 0 and abs(z.imag) < 1e-10 * abs(z):
        # real zero of a real function: finish in real arithmetic
        for _ in range(8):
            _, _, _, step, _ = _newton_data(q, z.real, eps)
            z = complex(z.real - step.real, 0.0)
            if abs(step) <= 4e-16 * max(1.0, abs(z)):
                break
    t0, t1, t2, _, _ = _newton_data(q, z, eps)
    if mult == 2 or abs(t1) < double_zero_threshold(t2, z):
        # settle on the critical point, which is the double zero to working accuracy
        for _ in range(40):
            _, t1, t2, _, h = _newton_data(q, z, eps)
            if not cmath.isfinite(h):
                break
            z -= h
            if abs(h) <= 4e-16 * max(1.0, abs(z)):
                break
        t0, t1, t2, _, _ = _newton_data(q, z, eps)
        if abs(t1) < double_zero_threshold(t2, z):
            if not allow_double:
                raise DoubleZeroSuspected(
                    f"Newton stagnates near a double zero z~{z} (q={q})", z=z)
            return ZeroRecord(z, abs(t0), 2, annulus_of(q, z))
    scale = max(1.0, abs(t1) * abs(z))
    if abs(t0) > prec.target_eps * scale * 10:
        raise NoConvergence(f"residual {abs(t0):.3g} too large at z={z}")
    return ZeroRecord(z, abs(t0), 1, annulus_of(q, z))


# --------------------------------------------------------------------------
# zeros in a disk


def _ring_moments(q, r_in, r_out, n, scale, guard):
    tight = 1e-7
    _circle_count(q, r_out, guard, tight=tight)
    s = _circle(q, r_out).moments(n, scale)
    if r_in > 0:
        _circle_count(q, r_in, guard, tight=tight)
        s = s - _circle(q, r_in).moments(n, scale)
    return s


def _delves_lyness(s, n):
    """Roots from power sums s[1..n] via Newton's identities."""
    e = [1.0 + 0j]
    for k in range(1, n + 1):
        acc = 0j
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * s[i]
        e.append(acc / k)
    coeffs = [(-1) ** k * e[k] for k in range(n + 1)]
    return np.roots(coeffs)


def _solve_ring(q, r_in, r_out, count, prec, guard, depth, out):
    if count == 0:
        return
    if depth > 40:
        raise BudgetExceeded(f"ring subdivision exceeded depth 40 near |z|~{r_out:.4g}")
    if count <= 4:
        try:
            recs = _ring_zeros_dl(q, r_in, r_out, count, prec, guard)
        except (NoConvergence, ContourTooCloseToZero, NonIntegerCount):
            recs = None
        if recs is not None:
            out.extend(recs)
            return
    # split the ring at a log-radius fraction whose circle keeps clear of zeros
    a = math.log(r_in) if r_in > 0 else math.log(r_out) - 2.0
    b = math.log(r_out)
    for frac in (0.5, 0.4, 0.6, 0.3, 0.7, 0.45, 0.55):
        r_mid = math.exp(a + frac * (b - a))
        try:
            n_mid = _circle_count(q, r_mid, guard)[0]
            n_in = _circle_count(q, r_in, guard)[0] if r_in > 0 else 0
        except (ContourTooCloseToZero, NonIntegerCount):
            continue
        break
    else:
        raise BudgetExceeded(f"could not split ring ({r_in:.4g}, {r_out:.4g})")
    _solve_ring(q, r_in, r_mid, n_mid - n_in, prec, guard, depth + 1, out)
    _solve_ring(q, r_mid, r_out, count - (n_mid - n_in), prec, guard, depth + 1, out)


def _ring_zeros_dl(q, r_in, r_out, count, prec, guard):
    scale = r_out
    s = _ring_moments(q, r_in, r_out, count, scale, guard)
    if abs(s[0] - count) > 1e-3:
        return None
    w = _delves_lyness(s, count)
    recs = []
    for wi in w:
        try:
            rec = refine_zero(q, complex(wi) * scale, prec, allow_double=True)
        except NoConvergence:
            return None
        recs.append(rec)
    # accept only a consistent set: inside the ring, distinct, right multiplicity
    tol = 1e-9
    uniq = []
    for rec in recs:
        if not (r_in * (1 - 1e-9) < abs(rec.z) < r_out * (1 + 1e-9)):
            return None
        if any(abs(rec.z - u.z) <= tol * max(1.0, abs(u.z)) for u in uniq):
            continue
        uniq.append(rec)
    if sum(u.multiplicity for u in uniq) != count:
        return None
    return uniq


def zeros_in_disk(q, R, prec=DEFAULT_PRECISION, guard=GUARD):
    """All zeros of theta(q, .) in |z| < R, sorted by modulus.

    The disk is cut along the circles C_k into rings; rings are split further
    until each holds at most four zeros, which are then read off contour
    moments and polished by Newton's method.
    """
    q = check_q(q, nonzero=True)
    if not R > 0:
        raise DomainError("R must be positive")
    total = _circle_count(q, R, guard)[0]
    radii = []
    k = 0
    while separation_radius(q, k) < R * (1 - 1e-9):
        radii.append(separation_radius(q, k))
        k += 1
    radii.append(R)
    # circles that pass too close to a zero are nudged
    usable = []
    for r in radii[:-1]:
        for f in (1.0, 1.1, 0.9, 1.2, 0.8):
            rr = r * f
            if rr >= R:
                continue
            try:
                _circle_count(q, rr, guard)
            except (ContourTooCloseToZero, NonIntegerCount):
                continue
            usable.append(rr)
            break
    usable = sorted(set(usable)) + [R]
    out = []
    inner, n_inner = 0.0, 0
    for r in usable:
        n = _circle_count(q, r, guard)[0]
        _solve_ring(q, inner, r, n - n_inner, prec, guard, 0, out)
        inner, n_inner = r, n
    found = sum(rec.multiplicity for rec in out)
    if found != total:
        raise CountMismatch(f"found {found} zeros but the disk count is {total}")
    out.sort(key=lambda rec: (abs(rec.z), rec.z.imag))
    return out


# --------------------------------------------------------------------------
# real zeros


def _real_eval(q, xs, orders, eps):
    xs = [float(x) for x in xs]
    rz = max(abs(x) for x in xs)
    plan = make_plan(abs(q), rz, orders, math.log(eps))
    return sum_series(q, xs, orders, plan), plan


def _sign(v):
    return (v > 0) - (v < 0)


def _rtsafe(q, a, b, fa_sign, order, eps, xtol_rel=4e-16, max_iter=200):
    """Root of the ``order``-th z-derivative of theta in [a, b] (signs differ)."""
    lo, hi = (a, b)
    slo = fa_sign
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        vals, plan = _real_eval(q, [x], (order, order + 1), eps)
        f, df = vals[order][0], vals[order + 1][0]
        sf = _sign(f)
        if sf == 0:
            return x
        if sf == slo:
            lo = x
        else:
            hi = x
        width = abs(hi - lo)
        if width <= xtol_rel * max(1.0, abs(x)):
            break
        x_new = None
        if df != 0:
            with _ctx(plan.bits):
                step = float(f / df)
            cand = x - step
            if min(lo, hi) < cand < max(lo, hi) and abs(step) < 0.5 * width:
                x_new = cand
        x = x_new if x_new is not None else 0.5 * (lo + hi)
    return x


def _grid(lo, hi, q, per_factor):
    """Points covering [lo, hi], geometric in |x| beyond |x| = 1."""
    ratio = abs(q) ** (1.0 / per_factor)
    step_log = -math.log(ratio)
    pts = set()

    def side(a, b):  # 0 <= a < b, magnitudes
        if a < 1:
            m = max(2, int(math.ceil((min(b, 1.0) - a) / step_log)) + 1)
            pts.update(np.linspace(a, min(b, 1.0), m).tolist())
        if b > 1:
            la, lb = math.log(max(a, 1.0)), math.log(b)
            m = max(2, int(math.ceil((lb - la) / step_log)) + 1)
            pts.update(np.exp(np.linspace(la, lb, m)).tolist())

    if hi <= 0:
        side(-hi, -lo)
        return sorted(-p for p in pts)
    if lo >= 0:
        side(lo, hi)
        return sorted(pts)
    side(0.0, -lo)
    neg = {-p for p in pts}
    pts.clear()
    side(0.0, hi)
    return sorted(neg | pts)


def _scan(q, lo, hi, prec, per_factor, polish=True):
    eps = 1e-30
    xs = _grid(lo, hi, q, per_factor)
    vals, plan = _real_eval(q, xs, (0, 1), eps)
    with _ctx(plan.bits):
        f = [_sign(v) for v in vals[0]]
        d = [_sign(v) for v in vals[1]]
    found = []  # (x, multiplicity)

    def monotone_piece(a, fa, b, fb):
        if fa == 0:
            return
        if fb != 0 and fa != fb:
            found.append((_rtsafe(q, a, b, fa, 0, eps) if polish else 0.5 * (a + b), 1))

    for i in range(len(xs) - 1):
        a, b = xs[i], xs[i + 1]
        if f[i] == 0:
            found.append((a, 1))
        if d[i] == d[i + 1] or d[i] == 0 or d[i + 1] == 0:
            monotone_piece(a, f[i], b, f[i + 1])
            continue
        c = _rtsafe(q, a, b, d[i], 1, eps, xtol_rel=4e-16 if polish else 1e-12)
        cv, cplan = _real_eval(q, [c], (0, 2), eps)
        with _ctx(cplan.bits):
            fc, f2c = float(cv[0][0]), float(cv[2][0])
        if abs(fc) <= 0.5e-12 * abs(f2c) * max(1.0, c * c):
            found.append((c, 2))
            continue
        sc = _sign(fc)
        monotone_piece(a, f[i], c, sc)
        monotone_piece(c, sc, b, f[i + 1])
    if f[-1] == 0:
        found.append((xs[-1], 1))
    return found


def real_zeros_in_interval(q, lo, hi, prec=DEFAULT_PRECISION, include_lo=True,
                           include_hi=False, per_factor=8, cross_check=None):
    """Real zeros of theta(q, .) in the interval from ``lo`` to ``hi``.

    The default interval is half-open, [lo, hi); the two flags select the
    other conventions.  Double zeros (sign-preserving minima of |theta| below
    tolerance) are reported once with multiplicity 2.

    For 0 < q < 1 all terms are positive on [0, inf), so only the negative part
    of the interval is scanned.  With ``cross_check`` (default: on for
    0 < q <= 0.5) the number of real zeros is compared with contour counts:
    it may not exceed them and must have the same parity.
    """
    q = check_q(q, nonzero=True)
    if q.imag != 0:
        raise DomainError("real zeros are defined for real q only")
    q = q.real
    lo, hi = float(lo), float(hi)
    if lo > hi:
        raise DomainError("lo must not exceed hi")
    if lo == hi:
        if not (include_lo and include_hi):
            return []
        vals, plan = _real_eval(q, [lo], (0, 1, 2), 1e-30)
        t0, t1, t2 = (complex(vals[o][0]) for o in (0, 1, 2))
        if abs(t0) <= prec.target_eps * max(1.0, abs(t1) * abs(lo)):
            m = 2 if abs(t1) < double_zero_threshold(t2, lo) else 1
            return [ZeroRecord(lo, abs(t0), m, annulus_of(q, lo))]
        return []
    s_lo, s_hi = lo, hi
    if q > 0:
        s_hi = min(hi, 0.0)
        if s_lo >= s_hi:
            return []
    # widen slightly so that zeros on closed endpoints are bracketed
    pad = 1e-9 * max(1.0, abs(s_lo), abs(s_hi))
    raw = _scan(q, s_lo - pad, s_hi + pad if (q < 0 or s_hi < 0) else s_hi, prec, per_factor)
    recs = []
    for x, m in sorted(raw):
        tol = 1e-12 * max(1.0, abs(x))
        if x < lo - tol or x > hi + tol:
            continue
        if abs(x - lo) <= tol and not include_lo:
            continue
        if abs(x - hi) <= tol and not include_hi:
            continue
        vals, _ = _real_eval(q, [x], (0,), 1e-30)
        recs.append(ZeroRecord(x, abs(float(vals[0][0])), m, annulus_of(q, x)))
    if cross_check is None:
        cross_check = 0 < q <= 0.5
    if cross_check and q > 0:
        _cross_check(q, lo, min(hi, 0.0), recs)
    return recs


def _cross_check(q, lo, hi, recs):
    r_small, r_big = abs(hi), abs(lo)
    try:
        n_big = count_in_disk(q, r_big) if r_big > 0 else 0
        n_small = count_in_disk(q, r_small) if r_small > 0 else 0
    except (ContourTooCloseToZero, NonIntegerCount):
        return
    inside = n_big - n_small
    real = sum(r.multiplicity for r in recs if r_small < abs(r.z) < r_big)
    if real > inside or (inside - real) % 2:
        raise CountMismatch(
            f"{real} real zeros vs {inside} zeros in the ring ({r_small:.4g}, {r_big:.4g})")


def count_real_zeros(q, lo, hi, per_factor=4):
    """Number of real zeros (with multiplicity) in the open interval (lo, hi).

    Same scan as :func:`real_zeros_in_interval` without polishing the zeros.
    The endpoints are assumed to stay clear of zeros.
    """
    q = check_q(q, nonzero=True)
    if q.imag != 0:
        raise DomainError("real zeros are defined for real q only")
    q = q.real
    lo, hi = float(lo), float(hi)
    if q > 0:
        hi = min(hi, 0.0)
    if lo >= hi:
        return 0
    return sum(m for x, m in _scan(q, lo, hi, DEFAULT_PRECISION, per_factor, polish=False)
               if lo < x < hi)
