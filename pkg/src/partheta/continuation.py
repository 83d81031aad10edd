"""Continuation of zeros along paths in the punctured parameter disk.

A path in q is a chain of straight segments and circular arcs.  Zeros are
followed with an Euler predictor, dz/dq = -theta_q / theta_z, and a Newton
corrector, the step being limited so that each zero moves by a small fraction
of its distance to the nearest other zero.  Loops based at a small positive
q = a return each zero to a zero of the same function, which yields the
monodromy permutation.

Standard loops
--------------
gamma(j)
    [a, q~_j - eps], the circle |q - q~_j| = eps counterclockwise, and back.
    The segments step over q~_1, ..., q~_{j-1} on half-circles of radius
    eps_prime in the upper half-plane.
delta(j)
    the same construction on the negative axis, based at -a, around q-_j.
eta_plus / eta_minus
    the upper half of |q| = a from a to -a (counterclockwise), resp. back.

For |q| <= c0 the zeros are separated in modulus, so at the base points the
k-th zero xi_k is the one in the annulus |q|**(-k+1/2) < |z| < |q|**(-k-1/2).
"""
import cmath
import csv
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import DEFAULT_PRECISION, check_q, make_plan, sum_series
from .errors import (
    Collision, DomainError, EndpointMismatch, NoConvergence, SpectrumTooClose,
    StepCollapse,
)
from .zeros import C0, separation_radius, zeros_in_disk

ENDPOINT_TOL = 1e-12


# --------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class Line:
    start: complex
    stop: complex

    @property
    def length(self):
        return abs(self.stop - self.start)

    def point(self, s):
        return self.start + (self.stop - self.start) * (s / self.length)

    def tangent(self, s):
        return (self.stop - self.start) / self.length

    def reversed(self):
        return Line(self.stop, self.start)

    @property
    def end(self):
        return self.stop


@dataclass(frozen=True)
class Arc:
    """Arc of the circle |q - center| = radius from angle phi0 to phi1.

    phi1 > phi0 runs counterclockwise, phi1 < phi0 clockwise.
    """

    center: complex
    radius: float
    phi0: float
    phi1: float

    @property
    def length(self):
        return self.radius * abs(self.phi1 - self.phi0)

    def _phi(self, s):
        return self.phi0 + math.copysign(s / self.radius, self.phi1 - self.phi0)

    def point(self, s):
        return self.center + self.radius * cmath.exp(1j * self._phi(s))

    def tangent(self, s):
        return 1j * cmath.exp(1j * self._phi(s)) * math.copysign(1.0, self.phi1 - self.phi0)

    def reversed(self):
        return Arc(self.center, self.radius, self.phi1, self.phi0)

    @property
    def start(self):
        return self.point(0.0)

    @property
    def end(self):
        return self.center + self.radius * cmath.exp(1j * self.phi1)


@dataclass(frozen=True)
class QPath:
    segments: tuple
    name: str = ""

    def __post_init__(self):
        if not self.segments:
            raise DomainError("a path needs at least one segment")
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.end - b.start) > ENDPOINT_TOL:
                raise EndpointMismatch(f"segments do not join: {a.end} != {b.start}")
        for seg in self.segments:
            for s in np.linspace(0.0, seg.length, 9):
                q = seg.point(s)
                if not 0 < abs(q) < 1:
                    raise DomainError(f"path leaves 0 < |q| < 1 at q={q}")

    @property
    def base_point(self):
        return complex(self.segments[0].start)

    @property
    def end(self):
        return complex(self.segments[-1].end)

    @property
    def length(self):
        return sum(seg.length for seg in self.segments)

    @property
    def closed(self):
        return abs(self.end - self.base_point) <= ENDPOINT_TOL

    def reversed(self):
        return QPath(tuple(seg.reversed() for seg in reversed(self.segments)),
                     self.name + "^-1" if self.name else "")

    def sample(self, n=200):
        """Points along the path, roughly uniform in arc length."""
        pts = []
        for seg in self.segments:
            m = max(2, int(n * seg.length / self.length))
            pts += [seg.point(s) for s in np.linspace(0.0, seg.length, m)]
        return np.array(pts)

    def distance_to(self, p):
        """Distance from p to the path (exact for lines and arcs)."""
        best = math.inf
        for seg in self.segments:
            if isinstance(seg, Line):
                d = seg.stop - seg.start
                t = ((p - seg.start) * d.conjugate()).real / abs(d) ** 2
                t = min(1.0, max(0.0, t))
                best = min(best, abs(p - (seg.start + t * d)))
            else:
                ang = cmath.phase(p - seg.center)
                lo, hi = sorted((seg.phi0, seg.phi1))
                k = math.ceil((lo - ang) / (2 * math.pi))
                ang += 2 * math.pi * k
                if ang <= hi:
                    best = min(best, abs(abs(p - seg.center) - seg.radius))
                best = min(best, abs(p - seg.start), abs(p - seg.end))
        return best


def compose(paths):
    """Concatenate paths; each must start where the previous one ends."""
    paths = list(paths)
    if not paths:
        raise DomainError("nothing to compose")
    for a, b in zip(paths, paths[1:]):
        if abs(a.end - b.base_point) > ENDPOINT_TOL:
            raise EndpointMismatch(f"path {a.name or '?'} ends at {a.end}, "
                                   f"next starts at {b.base_point}")
    segs = tuple(seg for p in paths for seg in p.segments)
    return QPath(segs, " ".join(p.name for p in paths if p.name))


def circle_loop(center, radius, start_angle=0.0, turns=1):
    """Counterclockwise circle (negative ``turns``: clockwise)."""
    phi1 = start_angle + 2 * math.pi * turns
    return QPath((Arc(complex(center), float(radius), start_angle, phi1),),
                 f"circle({center},{radius})")


# --------------------------------------------------------------------------
# spectrum used for clearance


def known_spectrum(j_max=4):
    """Real spectral numbers up to index j_max on each branch and the complex pair."""
    return _known_spectrum(max(4, int(j_max)))


@lru_cache(maxsize=8)
def _known_spectrum(j_max):
    from .spectrum import complex_spectral_point, real_spectrum_negative, real_spectrum_positive

    pos = tuple(p.q.real for p in real_spectrum_positive(j_max))
    neg = tuple(p.q.real for p in real_spectrum_negative(j_max))
    c = complex_spectral_point().q
    return {"positive": pos, "negative": neg, "complex": (c, c.conjugate())}


def _all_points(spec):
    return list(spec["positive"]) + list(spec["negative"]) + list(spec["complex"])


def _real_leg(start, stop, bypass, radius):
    """Segment on the real axis stepping over ``bypass`` on upper half-circles."""
    direction = 1.0 if stop > start else -1.0
    segs = []
    cur = start
    for b in sorted(bypass, key=lambda x: direction * x):
        if not (min(start, stop) < b < max(start, stop)):
            continue
        left = b - direction * radius
        segs.append(Line(complex(cur), complex(left)))
        # upper half-plane: from angle pi to 0 when moving right, 0 to pi when moving left
        if direction > 0:
            segs.append(Arc(complex(b), radius, math.pi, 0.0))
        else:
            segs.append(Arc(complex(b), radius, 0.0, math.pi))
        cur = b + direction * radius
    segs.append(Line(complex(cur), complex(stop)))
    return [s for s in segs if s.length > 0]


def _check_clearance(path, spec, exempt, eps, bypassed, eps_prime):
    clearance = max(eps / 2, 1e-4)
    for p in _all_points(spec):
        d = path.distance_to(p)
        if any(abs(p - e) < 1e-14 for e in exempt):
            need = eps * (1 - 1e-9)
        elif any(abs(p - b) < 1e-14 for b in bypassed):
            need = eps_prime * (1 - 1e-9)
        else:
            need = clearance
        if d < need:
            raise SpectrumTooClose(
                f"{path.name}: spectral number {p} at distance {d:.3g} < {need:.3g}")


def _parse_kind(kind, j):
    m = re.fullmatch(r"\s*(gamma|delta|eta_plus|eta_minus)\s*(?:\(\s*(\d+)\s*\))?\s*", kind)
    if not m:
        raise DomainError(f"unknown loop kind {kind!r}")
    name, num = m.group(1), m.group(2)
    if num is not None:
        j = int(num)
    if name in ("gamma", "delta") and (j is None or j < 1):
        raise DomainError(f"{name} needs an index j >= 1")
    return name, j


def build_loop(kind, j=None, a=0.1, eps=None, eps_prime=None, spectrum=None):
    """One of the standard paths gamma(j), delta(j), eta_plus, eta_minus.

    ``eps`` defaults to min(1e-2, half the gap from the target spectral
    number to its nearest neighbour) and ``eps_prime`` to eps / 100.
    """
    name, j = _parse_kind(kind, j)
    if not 0 < a < C0:
        raise DomainError(f"base point a={a} must lie in (0, c0)")
    if name == "eta_plus":
        return QPath((Arc(0j, a, 0.0, math.pi),), "eta_plus")
    if name == "eta_minus":
        return QPath((Arc(0j, a, math.pi, 0.0),), "eta_minus")
    spec = spectrum or known_spectrum(j + 1)
    branch = spec["positive"] if name == "gamma" else spec["negative"]
    if j > len(branch):
        raise DomainError(f"{name}({j}) needs spectral numbers up to index {j}")
    target = branch[j - 1]
    others = [p for p in _all_points(spec) if abs(p - target) > 1e-14]
    gap = min(abs(p - target) for p in others)
    if eps is None:
        eps = min(1e-2, gap / 2)
    if eps_prime is None:
        eps_prime = eps / 100
    if not 0 < eps_prime < eps:
        raise DomainError("need 0 < eps_prime < eps")
    if name == "gamma":
        base, near, phi = a, target - eps, math.pi
        bypass = [q for q in branch if a < q < target - eps]
    else:
        base, near, phi = -a, target + eps, 0.0
        bypass = [q for q in branch if target + eps < q < -a]
    if (name == "gamma" and near <= a) or (name == "delta" and near >= -a):
        raise SpectrumTooClose(f"{name}({j}): eps={eps} reaches the base point")
    leg = _real_leg(base, near, bypass, eps_prime)
    circle = Arc(complex(target), eps, phi, phi + 2 * math.pi)
    back = [s.reversed() for s in reversed(leg)]
    path = QPath(tuple(leg + [circle] + back), f"{name}({j})")
    _check_clearance(path, spec, [target], eps, bypass, eps_prime)
    return path


# --------------------------------------------------------------------------
# tracking


def _derivs(q, zs, eps):
    r = max(abs(z) for z in zs)
    plan = make_plan(abs(q), r, (0, 1, 2, "q"), math.log(eps))
    vals = sum_series(q, list(zs), (0, 1, 2, "q"), plan)
    return {o: np.array([complex(v) for v in vals[o]]) for o in (0, 1, 2, "q")}


def _newton(q, zs, prec, max_iter=10):
    """Correct all points at parameter q; None if any fails to converge."""
    zs = np.array(zs, dtype=complex)
    eps = prec.target_eps * 1e-3
    for _ in range(max_iter):
        v = _derivs(q, zs, eps)
        if np.any(v[1] == 0):
            return None
        step = v[0] / v[1]
        zs = zs - step
        if np.all(np.abs(step) <= 1e-14 * np.maximum(1.0, np.abs(zs))):
            v = _derivs(q, zs, eps)
            res = np.abs(v[0])
            if np.all(res <= 10 * prec.target_eps * np.maximum(1.0, np.abs(v[1] * zs))):
                return zs, res, v
            return None
    return None


def _local_radius(zs, v):
    """Half the distance to the nearest other zero (tracked or estimated)."""
    own = 2 * np.abs(v[1] / np.where(v[2] == 0, 1e-300, v[2]))
    out = own.copy()
    for i in range(len(zs)):
        for j in range(len(zs)):
            if i != j:
                out[i] = min(out[i], 0.5 * abs(zs[i] - zs[j]))
    return out


@dataclass
class Trajectory:
    label: object
    s: list = field(default_factory=list)
    q: list = field(default_factory=list)
    z: list = field(default_factory=list)
    residual: list = field(default_factory=list)

    @property
    def start(self):
        return self.z[0]

    @property
    def end(self):
        return self.z[-1]

    def rows(self):
        for i, (q, z, r) in enumerate(zip(self.q, self.z, self.residual)):
            yield i, q.real, q.imag, z.real, z.imag, r


def write_trajectory_csv(traj, fh):
    """CSV with columns step, q_re, q_im, z_re, z_im, residual."""
    w = csv.writer(fh)
    w.writerow(["step", "q_re", "q_im", "z_re", "z_im", "residual"])
    for row in traj.rows():
        w.writerow(row)


def _track(path, starts, prec, labels, step_frac=0.2, min_step=1e-9):
    """Follow several zeros jointly along ``path``."""
    total = path.length
    h_min = min_step * total
    q0 = path.base_point
    got = _newton(q0, starts, prec)
    if got is None:
        raise NoConvergence(f"start values are not zeros of theta({q0}, .)")
    zs, res, v = got
    if np.any(np.abs(zs - np.asarray(starts)) > _local_radius(zs, v)):
        raise NoConvergence(f"start values are not near zeros of theta({q0}, .)")
    trajs = [Trajectory(lab) for lab in labels]

    def record(s, q, zs, res):
        for t, z, r in zip(trajs, zs, res):
            t.s.append(s)
            t.q.append(q)
            t.z.append(complex(z))
            t.residual.append(float(r))

    record(0.0, q0, zs, res)
    s_done = 0.0
    for seg in path.segments:
        L = seg.length
        s = 0.0
        h = L / 8
        while s < L * (1 - 1e-15):
            q = seg.point(s)
            rad = _local_radius(zs, v)
            if len(zs) > 1:
                dmin = min(abs(zs[i] - zs[j]) for i in range(len(zs)) for j in range(i))
                if dmin < 1e-8 * max(1.0, float(np.max(np.abs(zs)))):
                    raise Collision(f"zeros collide near q={q}")
            dzdq = -v["q"] / v[1]
            speed = np.abs(dzdq)
            h = min(h, L - s, 0.1 * (1 - abs(q)))
            with np.errstate(divide="ignore"):
                h = min(h, float(np.min(step_frac * rad / np.maximum(speed, 1e-300))))
            while True:
                if h < h_min:
                    raise StepCollapse(
                        f"step {h:.3g} below minimum at q={q}: too close to the spectrum")
                q1 = seg.point(s + h)
                pred = zs + dzdq * (q1 - q)
                got = _newton(q1, pred, prec)
                if got is not None:
                    z1, res1, v1 = got
                    moved = np.abs(z1 - zs)
                    if np.all(np.abs(z1 - pred) <= 0.5 * step_frac * rad) and \
                            np.all(moved <= 2 * step_frac * rad):
                        break
                h /= 2
            s += h
            zs, res, v = z1, res1, v1
            record(s_done + s, q1, zs, res)
            h *= 1.5
        s_done += L
    return trajs


def track_zero(path, z_start, prec=DEFAULT_PRECISION):
    """Follow one zero of theta(q, .) from the base point along ``path``."""
    check_q(path.base_point, nonzero=True)
    return _track(path, [complex(z_start)], prec, [None])[0]


@dataclass
class MonodromyResult:
    permutation: dict
    trajectories: list
    max_step_residual: float

    def cycles(self):
        seen, out = set(), []
        for lab in self.permutation:
            if lab in seen:
                continue
            cyc = [lab]
            seen.add(lab)
            nxt = self.permutation[lab]
            while nxt != lab:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self.permutation[nxt]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    @property
    def is_identity(self):
        return all(k == v for k, v in self.permutation.items())


def monodromy(loop, labels, prec=DEFAULT_PRECISION, match_tol=1e-8):
    """Permutation of labelled zeros induced by running once around ``loop``.

    ``labels`` is a list of (label, z_start) pairs of zeros at the base point.
    The result maps each label to the label whose start value the trajectory
    ends on.
    """
    if not loop.closed:
        raise EndpointMismatch("monodromy needs a closed loop")
    labels = list(labels)
    names = [lab for lab, _ in labels]
    starts = np.array([complex(z) for _, z in labels])
    trajs = _track(loop, starts, prec, names)
    perm = {}
    for t in trajs:
        d = np.abs(starts - t.end)
        i = int(np.argmin(d))
        if d[i] > match_tol * max(1.0, abs(starts[i])):
            raise NoConvergence(f"trajectory of {t.label} ends at {t.end}, not on a tracked zero")
        perm[t.label] = names[i]
    if len(set(perm.values())) != len(perm):
        raise Collision("two trajectories ended on the same zero")
    worst = max(max(t.residual) for t in trajs)
    return MonodromyResult(perm, trajs, worst)


def labelled_zeros(q, ks):
    """The zeros xi_k (k in ks) at a base point with 0 < |q| <= c0."""
    q = check_q(q, nonzero=True)
    if abs(q) > C0:
        raise DomainError("zero labels by annulus need 0 < |q| <= c0")
    ks = list(ks)
    R = separation_radius(q, max(ks))
    by_k = {}
    for rec in zeros_in_disk(q, R):
        by_k[rec.annulus_index] = rec.z
    missing = [k for k in ks if k not in by_k]
    if missing:
        raise NoConvergence(f"no zero found in annuli {missing}")
    return [(k, by_k[k]) for k in ks]


def compose_permutations(first, second):
    """Permutation of running ``first`` and then ``second``."""
    return {k: second[v] for k, v in first.items()}
