"""Spectral numbers: parameters q at which theta(q, .) has a double zero.

A double zero (q, y) solves theta = theta_z = 0.  It is refined by Newton's
method on that 2x2 system.  Real spectral numbers are bracketed first by
counting how many real zeros have been lost to complex pairs.  Outside the
circle C_n of the strong-separation theorem every annulus holds one zero,
which is real when q is real, so the census inside C_n decides everything.

Branches
--------
positive_real
    0 < q~_1 < q~_2 < ... < 1.  At q~_k the two rightmost real zeros
    coalesce at a local minimum y~_k of theta, and y~_k -> -e**pi.
negative_real
    -1 < q < 0.  Odd indices lose a pair of negative zeros (local minimum),
    even indices a pair of positive zeros (local maximum); |y| -> e**(pi/2).
complex_pair
    the non-real spectral numbers, refined from a seed.
"""
import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .core import DEFAULT_PRECISION, _ctx, check_q, make_plan, sum_series
from .errors import (
    CountMismatch, DegenerateJacobian, DomainError, MissedIndex, MixedBranches,
    NoConvergence, OrderingUnresolved,
)
from .zeros import (
    _grid, _real_eval, _rtsafe, count_in_disk,
    count_real_zeros, max_separation_index, separation_radius, zeros_in_disk,
)

BRANCHES = ("positive_real", "negative_real", "complex_pair")
#: published digits of the complex spectral pair closest to the origin
COMPLEX_PAIR_SEED = 0.4353184958 + 0.1230440086j

_EPS = 1e-30


@dataclass
class SpectralPoint:
    q: complex
    y: complex
    index: Optional[int] = None
    branch: str = "complex_pair"
    newton_residual: float = 0.0


@dataclass
class AsymptoticRow:
    k: int
    q_measured: float
    q_predicted: float
    y_measured: complex
    y_predicted: float
    q_residual: float
    y_residual: float


@dataclass
class AsymptoticReport:
    branch: str
    rows: list = field(default_factory=list)

    def scaled_q_residuals(self):
        """k**2 * r_k on the positive branch, k * r_k on the negative one."""
        p = 2 if self.branch == "positive_real" else 1
        return np.array([r.k ** p * r.q_residual for r in self.rows])

    def y_residuals(self):
        return np.array([r.y_residual for r in self.rows])


def predicted_positive(k):
    """Leading asymptotics (q, y) of the k-th positive spectral pair."""
    q = 1 - math.pi / (2 * k) + math.log(k) / (8 * k * k)
    y = -math.exp(math.pi) * math.exp(-math.log(k) / (4 * k))
    return q, y


def predicted_negative(k):
    """Leading asymptotics (|q|, |y|) on the negative branch."""
    return 1 - math.pi / (8 * k), math.exp(math.pi / 2)


# --------------------------------------------------------------------------
# the 2x2 system


def _values(q, z, orders, eps=_EPS):
    plan = make_plan(abs(q), abs(z), orders, math.log(eps))
    vals = sum_series(q, [z], orders, plan)
    return {o: complex(vals[o][0]) for o in orders}


def theta_qz(q, z, eps=_EPS):
    """Mixed partial by central differences of theta_z in q."""
    h = 1e-7 * (1 - abs(q))
    a = _values(q + h, z, (1,), eps)[1]
    b = _values(q - h, z, (1,), eps)[1]
    return (a - b) / (2 * h)


def _residual(v):
    return max(abs(v[0]), abs(v[1]))


def _scale(q, z, v):
    return max(1.0, abs(q) * abs(v["q"]), abs(z) ** 2 * abs(v[2]))


def _classify(q):
    if q.imag != 0:
        return "complex_pair"
    return "positive_real" if q.real > 0 else "negative_real"


def find_double_zero(q0, z0, prec=DEFAULT_PRECISION, max_iter=60, index=None, branch=None):
    """Solve theta(q, z) = theta_z(q, z) = 0 by Newton's method from (q0, z0).

    Real seeds stay real.  The mixed partial theta_qz is obtained by central
    differences; all other entries are exact series.
    """
    q = check_q(q0, nonzero=True)
    z = complex(z0)
    real = q.imag == 0 and z.imag == 0
    for _ in range(max_iter):
        v = _values(q, z, (0, 1, 2, "q"))
        tqz = theta_qz(q, z)
        a, b, c, d = v["q"], v[1], tqz, v[2]
        det = a * d - b * c
        if det == 0 or abs(det) < 1e-300:
            raise DegenerateJacobian(f"singular Jacobian at q={q}, z={z}")
        dq = (d * v[0] - b * v[1]) / det
        dz = (a * v[1] - c * v[0]) / det
        if real:
            dq, dz = complex(dq.real), complex(dz.real)
        cap_q = 0.5 * (1 - abs(q))
        if abs(dq) > cap_q:
            f = cap_q / abs(dq)
            dq, dz = dq * f, dz * f
        cap_z = 0.25 * max(1.0, abs(z))
        if abs(dz) > cap_z:
            f = cap_z / abs(dz)
            dq, dz = dq * f, dz * f
        q, z = q - dq, z - dz
        if abs(q) >= 1:
            raise NoConvergence("Newton iterate left the unit disk")
        if abs(dq) <= 2e-16 and abs(dz) <= 4e-16 * max(1.0, abs(z)):
            break
    else:
        raise NoConvergence(f"double-zero Newton did not converge from q0={q0}, z0={z0}")
    v = _values(q, z, (0, 1, 2, "q"))
    res = _residual(v)
    if res > prec.target_eps * _scale(q, z, v):
        raise NoConvergence(f"residual {res:.3g} above tolerance at q={q}, z={z}")
    if abs(v[2]) * max(1.0, abs(z)) ** 2 <= 1e-6:
        raise DegenerateJacobian(f"theta_zz vanishes at the double zero q={q}, z={z}")
    return SpectralPoint(q, z, index, branch or _classify(q), res)


def verify_smoothness(p, prec=DEFAULT_PRECISION):
    """Gradient norm |(theta_q, theta_z)| at a point of the zero set.

    At a double zero theta_z vanishes and smoothness rests on theta_q, which
    must equal (y**2 / 2q) theta_zz there.  Returns the gradient norm and
    raises if that identity fails to 1e-8 relative.
    """
    v = _values(p.q, p.y, (0, 1, 2, "q"))
    grad = math.hypot(abs(v["q"]), abs(v[1]))
    if abs(v[1]) < 1e-6 * (1 + abs(v[2]) * abs(p.y)):
        pred = p.y ** 2 / (2 * p.q) * v[2]
        if abs(v["q"] - pred) > 1e-8 * max(abs(pred), 1e-300):
            raise NoConvergence(
                f"theta_q={v['q']} disagrees with (y^2/2q) theta_zz={pred} at q={p.q}")
    return grad


def double_zero_identity_error(p):
    """Relative gap between theta_q and (y**2 / 2q) theta_zz at ``p``."""
    v = _values(p.q, p.y, (2, "q"))
    pred = p.y ** 2 / (2 * p.q) * v[2]
    return abs(v["q"] - pred) / abs(pred)


# --------------------------------------------------------------------------
# counts that fix the indices


@lru_cache(maxsize=4096)
def real_census(q):
    """(zeros inside C_n, negative real zeros, positive real zeros) for real q.

    n is the least index covered by the strong-separation theorem, so every
    zero outside C_n is real and alone in its annulus.
    """
    q = float(q)
    n = max_separation_index(q)
    R = separation_radius(q, n)
    total = count_in_disk(q, R)
    neg = count_real_zeros(q, -R, 0.0)
    pos = count_real_zeros(q, 0.0, R) if q < 0 else 0
    if (total - neg - pos) % 2:
        raise CountMismatch(f"odd number of non-real zeros at q={q}")
    return total, neg, pos


def complex_pairs(q):
    """Number of complex-conjugate zero pairs of theta(q, .), q real."""
    total, neg, pos = real_census(q)
    return (total - neg - pos) // 2


def lost_pairs(q, side):
    """Pairs of real zeros lost on one side of 0 (q < 0).

    For small |q| the zeros alternate in sign, xi_j having the sign of
    -q**(-j): odd labels positive, even labels negative.
    """
    total, neg, pos = real_census(q)
    expected = total // 2 if side == "negative" else (total + 1) // 2
    have = neg if side == "negative" else pos
    lost, rem = divmod(expected - have, 2)
    if rem or lost < 0:
        raise CountMismatch(f"inconsistent {side} real census at q={q}: {real_census(q)}")
    return lost


def _critical_points(q, lo, hi, per_factor=4):
    """Critical points of theta(q, .) in (lo, hi), sorted by modulus."""
    xs = _grid(lo, hi, q, per_factor)
    vals, plan = _real_eval(q, xs, (1,), _EPS)
    with _ctx(plan.bits):
        d = [(v > 0) - (v < 0) for v in vals[1]]
    out = []
    for i in range(len(xs) - 1):
        if d[i] and d[i + 1] and d[i] != d[i + 1]:
            out.append(_rtsafe(q, xs[i], xs[i + 1], d[i], 1, _EPS, xtol_rel=1e-13))
    return sorted(out, key=abs)


def _track_critical(q, c, max_iter=12):
    """Newton on theta_z from c; returns the critical point and theta there."""
    for _ in range(max_iter):
        v = _values(q, c, (1, 2))
        if v[2] == 0:
            return None
        step = (v[1] / v[2]).real
        c -= step
        if abs(step) <= 1e-14 * max(1.0, abs(c)):
            return c, _values(q, c, (0,))[0].real
    return None


def _side_window(q, side):
    R = separation_radius(q, max_separation_index(q))
    return (-R, 0.0) if side == "negative" else (0.0, R)


def _march(sign, side, t0, h0, t_max, n_track=4):
    """Increase |q| from t0 until a tracked critical value of theta changes sign.

    The innermost ``n_track`` critical points on one side of the origin are
    followed by Newton's method; a sign change of theta at one of them means
    the two real zeros around it have coalesced.  Returns (t*, y*).
    """
    def rescan(t):
        cs = _critical_points(sign * t, *_side_window(sign * t, side))[:n_track]
        return cs, [_values(sign * t, c, (0,))[0].real for c in cs]

    t = t0
    crit, vals = rescan(t)
    h = h0
    while t < t_max:
        t1 = min(t + h, t_max)
        new = [_track_critical(sign * t1, c) for c in crit]
        gaps = [min([abs(c - o) for o in crit if o is not c] or [abs(c)]) for c in crit]
        bad = any(r is None or abs(r[0] - c) > 0.3 * g for r, c, g in zip(new, crit, gaps))
        if bad:
            if h > h0 / 64:
                h /= 2
                continue
            t = t1
            crit, vals = rescan(t)
            h = h0
            continue
        for i, (r, v) in enumerate(zip(new, vals)):
            if (r[1] > 0) != (v > 0):
                track = {"c": crit[i]}

                def m(s):
                    res = _track_critical(sign * s, track["c"])
                    if res is None:
                        raise MissedIndex("lost the critical point near a coalescence")
                    track["c"] = res[0]
                    return res[1]

                t_star = brentq(m, t, t1, xtol=1e-15, rtol=1e-15)
                return t_star, track["c"]
        t = t1
        crit = [r[0] for r in new]
        vals = [r[1] for r in new]
        h = min(1.5 * h, 4 * h0)
    raise MissedIndex(f"no coalescence found for |q| in [{t0}, {t_max}]")


def _spectral_sequence(sign, side, count, k_of, branch, first, last, t0, prec):
    """Successive jumps of ``count`` (as |q| grows) starting from |q| = t0.

    ``k_of(j)`` maps the j-th jump to the spectral index.  Every located point
    is certified by the census just below and just above it.
    """
    c0 = count(t0)
    out = []
    t = t0
    j = c0 + 1
    while j <= last:
        k = k_of(j)
        h0 = min(0.05 / k ** 2, 0.1 * (1 - t))
        t_max = min(1 - 1e-6, t + 4.0 / k ** 2 + 0.2 * (1 - t))
        t_star, y0 = _march(sign, side, t, h0, t_max)
        p = find_double_zero(sign * t_star, y0, prec, index=k, branch=branch)
        ts = abs(p.q)
        delta = 1e-6 / k ** 2
        below, above = count(ts - delta), count(ts + delta)
        if below != j - 1 or above != j:
            if below == above and below < j:
                # a sign change that was not a coalescence; keep marching
                t = ts + delta
                continue
            if above > j:
                raise OrderingUnresolved(
                    f"several spectral numbers within {delta:g} of |q|={ts:.15g}")
            raise MissedIndex(
                f"census {below}->{above} around |q|={ts:.15g}, expected {j - 1}->{j}")
        if j >= first:
            out.append(p)
        t = ts + delta
        j += 1
    return out


def real_spectrum_positive(k_max, prec=DEFAULT_PRECISION, k_min=1):
    """q~_k, y~_k for k_min <= k <= k_max, indexed by the complex-pair count.

    q~_k is where the number of complex-conjugate pairs steps from k-1 to k;
    the double zero y~_k is then a negative local minimum of theta.
    """
    if k_max < 1 or k_min < 1 or k_min > k_max:
        raise DomainError("need 1 <= k_min <= k_max")
    t0 = 0.2 if k_min < 5 else predicted_positive(k_min)[0] - 1.0 / k_min ** 2
    while complex_pairs(t0) >= k_min:
        t0 -= 1.0 / k_min ** 2
    out = _spectral_sequence(1, "negative", complex_pairs, lambda j: j, "positive_real",
                             k_min, k_max, t0, prec)
    for a, b in zip(out, out[1:]):
        if not b.q.real > a.q.real:
            raise MissedIndex(f"q~_{b.index} does not exceed q~_{a.index}")
    for p in out:
        if not (p.y.imag == 0 and p.y.real < 0 and _values(p.q, p.y, (2,))[2].real > 0):
            raise MissedIndex(f"q~_{p.index}: double zero {p.y} is not a negative minimum")
    return out


def real_spectrum_negative(k_max, prec=DEFAULT_PRECISION, k_min=1):
    """q-_k, y-_k for k_min <= k <= k_max.

    q-_{2s-1} is where the s-th pair of negative real zeros is lost (at a
    local minimum), q-_{2s} where the s-th pair of positive ones is lost (at a
    local maximum).  The two parities are searched independently.
    """
    if k_max < 1 or k_min < 1 or k_min > k_max:
        raise DomainError("need 1 <= k_min <= k_max")
    out = []
    for side, parity in (("negative", 1), ("positive", 0)):
        ks = [k for k in range(k_min, k_max + 1) if k % 2 == parity]
        if not ks:
            continue
        s_first, s_last = (ks[0] + 1) // 2, (ks[-1] + 1) // 2

        def count(t, side=side):
            return lost_pairs(-t, side)

        k_first = ks[0]
        t0 = 0.1 if k_first < 9 else predicted_negative(k_first)[0] - 2.0 / k_first ** 2
        while count(t0) >= s_first:
            t0 -= 2.0 / k_first ** 2
        out += _spectral_sequence(-1, side, count, lambda s, p=parity: 2 * s - p,
                                  "negative_real", s_first, s_last, t0, prec)
    out.sort(key=lambda p: p.index)
    for p in out:
        v2 = _values(p.q, p.y, (2,))[2].real
        if p.index % 2 and not (p.y.real < 0 and v2 > 0):
            raise MissedIndex(f"q-_{p.index}: expected a negative local minimum, got y={p.y}")
        if not p.index % 2 and not (p.y.real > 0 and v2 < 0):
            raise MissedIndex(f"q-_{p.index}: expected a positive local maximum, got y={p.y}")
    for a, b in zip(out, out[1:]):
        if abs(a.q - b.q) < 1e-12:
            raise OrderingUnresolved(f"q-_{a.index} and q-_{b.index} coincide")
    return out


# --------------------------------------------------------------------------
# complex spectrum


def _closest_zero_pair(q, R):
    zs = [r.z for r in zeros_in_disk(q, R)]
    best = None
    for i in range(len(zs)):
        for j in range(i + 1, len(zs)):
            d = abs(zs[i] - zs[j])
            if best is None or d < best[0]:
                best = (d, 0.5 * (zs[i] + zs[j]))
    if best is None:
        raise MissedIndex("fewer than two zeros to seed a double zero")
    return best[1]


def complex_spectral_point(q0=COMPLEX_PAIR_SEED, prec=DEFAULT_PRECISION, z0=None):
    """Refine a non-real spectral number from a parameter seed.

    Without ``z0`` the seed for y is the midpoint of the closest pair of zeros
    of theta(q0, .) inside C_n.
    """
    q0 = check_q(q0, nonzero=True)
    if z0 is None:
        z0 = _closest_zero_pair(q0, separation_radius(q0, max_separation_index(q0)))
    return find_double_zero(q0, z0, prec, branch="complex_pair")


def spectral_count_in_annulus(r_outer=0.31, r_inner=0.2, n=None, m0=128, max_m=4096):
    """Spectral numbers (with multiplicity) in r_inner < |q| < r_outer.

    Uses the discriminant of the n zeros inside C_n, an analytic function of
    q on the annulus when n satisfies the strong-separation hypothesis for
    |q| <= r_outer.  Its winding numbers on the two circles differ by the
    number of its zeros, i.e. of spectral numbers, in between.
    """
    if not 0 < r_inner < r_outer < 1:
        raise DomainError("need 0 < r_inner < r_outer < 1")
    if n is None:
        n = max_separation_index(r_outer)
    return _winding(r_outer, n, m0, max_m) - _winding(r_inner, n, m0, max_m)


def spectral_count_in_disk(r, n=None, m0=128, max_m=4096):
    """Spectral numbers (with multiplicity) in 0 < |q| < r.

    The discriminant times q**w0 (see ``_disc``) extends analytically to q = 0
    with a nonzero value there, so its winding number on |q| = r counts the
    spectral numbers inside.
    """
    if not 0 < r < 1:
        raise DomainError("need 0 < r < 1")
    if n is None:
        n = max_separation_index(r)
    return _winding(r, n, m0, max_m)


def _disc(q, n):
    """Phase of the discriminant of the zeros inside C_n, times q**w0.

    Near q = 0 the k-th zero behaves like -q**(-k), so the discriminant winds
    w0 = 2 (n-1) n (n+1) / 3 times around the origin per turn of q.  Removing
    that power leaves a function whose argument varies slowly enough to be
    sampled.  Only the phase is returned.
    """
    w = [r.z for r in zeros_in_disk(q, separation_radius(q, n))]
    if len(w) != n:
        raise CountMismatch(f"{len(w)} zeros inside C_{n} at q={q}, expected {n}")
    w0 = 2 * (n - 1) * n * (n + 1) // 3
    phase = w0 * cmath.phase(q)
    for i in range(n):
        for j in range(i + 1, n):
            phase += 2 * cmath.phase(w[i] - w[j])
    return cmath.exp(1j * phase)


def _winding(r, n, m0, max_m):
    """Winding number of the discriminant on |q| = r, adaptive in the angle."""
    ts = list(np.linspace(0.0, 2 * np.pi, m0 + 1))
    vals = [_disc(r * cmath.exp(1j * t), n) for t in ts[:-1]]
    vals.append(vals[0])
    total = 0.0
    i = 0
    while i < len(ts) - 1:
        step = cmath.phase(vals[i + 1] / vals[i])
        if abs(step) > 0.5 and ts[i + 1] - ts[i] > 2 * np.pi / max_m:
            tm = 0.5 * (ts[i] + ts[i + 1])
            ts.insert(i + 1, tm)
            vals.insert(i + 1, _disc(r * cmath.exp(1j * tm), n))
            continue
        total += step
        i += 1
    w = total / (2 * np.pi)
    if abs(w - round(w)) > 0.1:
        raise CountMismatch(f"discriminant winding {w:.3f} on |q|={r} is not an integer")
    return int(round(w))


# --------------------------------------------------------------------------
# asymptotics


def asymptotic_residuals(points):
    """Residuals of the computed real spectrum against its leading asymptotics.

    Positive branch: r_k = q~_k - (1 - pi/2k + ln k / 8k**2) and
    y~_k + e**pi e**(-ln k / 4k).  Negative branch: r_k = |q-_k| - (1 - pi/8k)
    and |y-_k| - e**(pi/2).  Small k are reported, not judged.
    """
    if not points:
        return AsymptoticReport("positive_real")
    branches = {p.branch for p in points}
    if len(branches) != 1:
        raise MixedBranches(f"points from several branches: {sorted(branches)}")
    branch = branches.pop()
    if branch == "complex_pair":
        raise MixedBranches("no asymptotic law for complex spectral points")
    ks = [p.index for p in points]
    if None in ks or ks != list(range(ks[0], ks[0] + len(ks))):
        raise DomainError("points must carry contiguous indices")
    rep = AsymptoticReport(branch)
    for p in points:
        k = p.index
        if branch == "positive_real":
            qp, yp = predicted_positive(k)
            rep.rows.append(AsymptoticRow(k, p.q.real, qp, p.y, yp,
                                          p.q.real - qp, abs(p.y.real - yp)))
        else:
            qp, yp = predicted_negative(k)
            rep.rows.append(AsymptoticRow(k, p.q.real, -qp, p.y, yp,
                                          abs(p.q) - qp, abs(p.y) - yp))
    return rep
