"""Certified evaluation of the partial theta function.

    theta(q, z) = sum_{j >= 0} q**(j*(j+1)/2) * z**j,      |q| < 1.

Every series (theta itself, its first two z-derivatives and its q-derivative)
is truncated with the same geometric-majorant rule: once the ratio of
consecutive term moduli drops below 1/2 it keeps decreasing, so the omitted
tail is bounded by twice the first omitted term.  The kept terms are summed
by Horner's rule in gmpy2 binary floating point whose precision is chosen
from the largest term modulus, so that cancellation between huge terms does
not eat the requested absolute accuracy.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import DomainError

LOG2 = math.log(2.0)
NEG_INF = float("-inf")

#: keys for the available series: z-derivatives of order 0, 1, 2 and d/dq
ORDERS = (0, 1, 2, "q")


def check_q(q, nonzero=False):
    """Validate a parameter value and return it as a Python complex."""
    try:
        qc = complex(q)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"q={q!r} is not a number") from exc
    if not abs(qc) < 1.0:
        raise DomainError(f"|q| must be < 1, got q={qc}")
    if nonzero and qc == 0:
        raise DomainError("q = 0 is excluded: theta(0, .) is identically 1")
    return qc


@dataclass(frozen=True)
class Precision:
    """Working-precision request.

    ``mantissa_bits`` is a floor: the evaluator raises the precision on its
    own when cancellation demands it.  ``target_eps`` is the absolute accuracy
    asked of every evaluation (truncation tail plus rounding).
    """

    mantissa_bits: int = 53
    target_eps: float = 1e-13

    def __post_init__(self):
        if int(self.mantissa_bits) != self.mantissa_bits or self.mantissa_bits < 53:
            raise DomainError("mantissa_bits must be an integer >= 53")
        if not self.target_eps > 0:
            raise DomainError("target_eps must be positive")
        if self.target_eps < 2.0 ** (8 - self.mantissa_bits):
            raise DomainError(
                f"target_eps={self.target_eps:g} is below what {self.mantissa_bits} "
                "bits can deliver; raise mantissa_bits")

    @classmethod
    def for_eps(cls, eps, bits=53):
        need = math.ceil(-math.log2(eps)) + 8 if eps < 1 else 53
        return cls(max(bits, need), eps)

    def with_eps(self, eps):
        return Precision.for_eps(eps, self.mantissa_bits)

    @property
    def working_bits(self):
        """Minimum bits after the fixed escalation rule for tight targets."""
        if self.target_eps < 1e-13:
            return max(self.mantissa_bits, 128)
        return self.mantissa_bits


DEFAULT_PRECISION = Precision()


@dataclass(frozen=True)
class EvalResult:
    value: complex
    tail_bound: float
    terms_used: int
    rounding_bound: float = 0.0
    bits: int = 53
    exact: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.terms_used < 1 or self.tail_bound < 0:
            raise ValueError("malformed EvalResult")


# --------------------------------------------------------------------------
# truncation


def _log_abs(x):
    a = abs(x)
    return math.log(a) if a > 0 else NEG_INF


def _shape(j, order):
    """(weight, power of q, power of z) of the j-th term of a series."""
    if order == "q":
        t = j * (j + 1) // 2
        return t, t - 1, j
    w = 1
    for i in range(order):
        w *= j - i
    return w, j * (j + 1) // 2, j - order


def _log_term(j, order, lq, lz):
    w, eq, ez = _shape(j, order)
    if w <= 0:
        return NEG_INF
    out = math.log(w)
    if eq:
        if lq == NEG_INF:
            return NEG_INF
        out += eq * lq
    if ez:
        if lz == NEG_INF:
            return NEG_INF
        out += ez * lz
    return out


def _log_ratio(j, order, lq, lz):
    # modulus ratio of terms j+1 and j; nonincreasing in j once defined
    if lq == NEG_INF or lz == NEG_INF:
        return NEG_INF
    w0 = _shape(j, order)[0]
    w1 = _shape(j + 1, order)[0]
    return math.log(w1 / w0) + (j + 1) * lq + lz


def _min_terms(order):
    return 1 if order == "q" else max(1, order)


def _first_true(pred, lo):
    """Least n >= lo with pred(n), for a predicate monotone in n."""
    if pred(lo):
        return lo
    step = 1
    hi = lo + step
    while not pred(hi):
        lo = hi
        step *= 2
        hi = lo + step
        if hi > 10_000_000:  # pragma: no cover - |q| numerically 1
            raise DomainError("truncation order exceeds 1e7 terms")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _truncate(order, lq, lz, log_eps):
    """Smallest admissible N and the log of the tail bound 2*|term_N|.

    Both conditions hold for every index past the first one where they hold
    (the term ratio decreases with N), so a galloping search finds N.
    """
    def ok(n):
        return (_log_ratio(n, order, lq, lz) < -LOG2
                and LOG2 + _log_term(n, order, lq, lz) < log_eps)

    n = _first_true(ok, _min_terms(order))
    return n, LOG2 + _log_term(n, order, lq, lz)


def _log_max_term(order, lq, lz, n):
    """Largest log term modulus among indices 0..n-1."""
    start = _min_terms(order) if order != 0 else 0
    if n <= start:
        return _log_term(0, order, lq, lz) if n > 0 else NEG_INF
    # terms increase up to the first index whose successor ratio is < 1
    j = _first_true(lambda i: i >= n - 1 or _log_ratio(i, order, lq, lz) < 0, max(start, 0))
    best = _log_term(j, order, lq, lz)
    if order != 0 or start > 0:
        best = max(best, _log_term(0, order, lq, lz))
    return best


def truncation_order(q, z, eps, order=0):
    """Number of terms N (indices 0..N-1) needed for a tail below ``eps``.

    N is the smallest index >= 1 such that the modulus ratio of terms N+1 and
    N is below 1/2 and twice the modulus of term N is below ``eps``.
    """
    q = check_q(q)
    if not eps > 0:
        raise DomainError("eps must be positive")
    n, _ = _truncate(order, _log_abs(q), _log_abs(complex(z)), math.log(eps))
    return n


@dataclass(frozen=True)
class Plan:
    """Truncation orders, tail bounds and precision for one |q|, max |z|."""

    terms: dict
    log_tails: dict
    log_max_term: float
    bits: int

    def tail(self, order):
        return math.exp(self.log_tails[order]) if self.log_tails[order] > -700 else 0.0

    @property
    def log_rounding(self):
        n = max(self.terms.values())
        return math.log(4 * n) + self.log_max_term - self.bits * LOG2

    @property
    def rounding(self):
        lr = self.log_rounding
        return math.exp(lr) if lr > -700 else 0.0


def make_plan(q_abs, z_abs, orders, log_eps, min_bits=53):
    """Plan a summation with absolute accuracy exp(log_eps) for |z| <= z_abs."""
    lq = _log_abs(q_abs)
    lz = _log_abs(z_abs)
    terms, tails = {}, {}
    log_max = 0.0
    for o in orders:
        n, lt = _truncate(o, lq, lz, log_eps)
        terms[o], tails[o] = n, lt
        log_max = max(log_max, _log_max_term(o, lq, lz, n))
    nmax = max(terms.values())
    # rounding of a length-n Horner sum is below ~4n u max|term|; ask for eps/4
    need = (math.log(16 * nmax) + log_max - log_eps) / LOG2 + 8
    bits = max(int(min_bits), int(math.ceil(need)))
    if q_abs > 0.99:
        bits = max(bits, 128)
    return Plan(terms, tails, log_max, bits)


# --------------------------------------------------------------------------
# summation


def _is_real(x):
    return isinstance(x, (int, float)) or getattr(x, "imag", 1) == 0


def _exact(x):
    """Keep rationals exact so they are rounded only at the working precision."""
    if isinstance(x, (Fraction, gmpy2.mpq)):
        return Fraction(x)
    return None


def _ctx(bits):
    return gmpy2.context(gmpy2.get_context(), precision=int(bits))


def to_mp(x, real):
    if real:
        return mpfr(x.real if isinstance(x, complex) else x)
    if isinstance(x, complex):
        return mpc(x.real, x.imag)
    return mpc(x)


@lru_cache(maxsize=128)
def _coefficients(q, n, bits, order, real):
    """Polynomial coefficients (ascending powers of z) of one series."""
    with _ctx(bits):
        qm = to_mp(q, real)
        one = to_mp(1.0, real)
        coeffs = []
        if order == "q":
            cq = one  # q**(j(j+1)/2 - 1), starting at j = 1
            qp = qm
            coeffs.append(0 * one)
            for j in range(1, n):
                if j >= 2:
                    qp = qp * qm
                    cq = cq * qp
                coeffs.append((j * (j + 1) // 2) * cq)
            return tuple(coeffs)
        c = one
        qp = one
        base = []
        for j in range(n):
            if j:
                qp = qp * qm
                c = c * qp
            base.append(c)
        for j in range(order, n):
            w = 1
            for i in range(order):
                w *= j - i
            coeffs.append(w * base[j])
        if not coeffs:
            coeffs.append(0 * one)
        return tuple(coeffs)


def _horner(coeffs, z):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * z + c
    return acc


def sum_series(q, zs, orders, plan):
    """Evaluate the planned series at each point of ``zs``.

    Returns a dict mapping order -> list of gmpy2 numbers at ``plan.bits``.
    The points may be Python numbers or gmpy2 numbers.
    """
    qx = _exact(q)
    q = complex(q)
    real = q.imag == 0 and all(_is_real(z) for z in zs)
    if qx is not None and real:
        q = qx
    out = {}
    with _ctx(plan.bits):
        pts = [z if isinstance(z, (mpfr, mpc)) else to_mp(z, real) for z in zs]
        if real:
            pts = [mpfr(z.real) if isinstance(z, mpc) else z for z in pts]
        for o in orders:
            coeffs = _coefficients(q if qx is not None and real else (q.real if real else q),
                                   plan.terms[o], plan.bits, o, real)
            out[o] = [_horner(coeffs, z) for z in pts]
    return out


def series(q, zs, orders=(0,), eps=1e-13, min_bits=53):
    """Plan and sum in one call; returns (values dict, plan)."""
    zs = list(zs)
    rz = max((abs(complex(z)) for z in zs), default=0.0)
    plan = make_plan(abs(complex(q)), rz, orders, math.log(eps), min_bits)
    return sum_series(q, zs, orders, plan), plan


def _as_complex(x):
    if isinstance(x, mpfr):
        return complex(float(x), 0.0)
    return complex(x)


def _result(q, z, order, prec):
    qx, zx = _exact(q), _exact(z)
    q = check_q(q)
    z = complex(z)
    plan = make_plan(abs(q), abs(z), (order,), math.log(prec.target_eps),
                     prec.working_bits)
    v = sum_series(qx if qx is not None else q, [zx if zx is not None else z],
                   (order,), plan)[order][0]
    return EvalResult(_as_complex(v), plan.tail(order), plan.terms[order],
                      plan.rounding, plan.bits, v)


def evaluate(q, z, prec=DEFAULT_PRECISION):
    """Value of theta(q, z) with a rigorous truncation bound.

    ``q`` and ``z`` may be given as ``fractions.Fraction`` to avoid the
    rounding of a binary float input, which matters where theta is steep.

    Examples
    --------
    >>> evaluate(0.0, 7.3).value
    (1+0j)
    >>> 0 < evaluate(0.5, -4.0).value.real < 0.25
    True
    """
    return _result(q, z, 0, prec)


def evaluate_dz(q, z, order, prec=DEFAULT_PRECISION):
    """Value of the ``order``-th z-derivative, ``order`` in {0, 1, 2}."""
    if order not in (0, 1, 2):
        raise DomainError(f"order must be 0, 1 or 2, got {order!r}")
    return _result(q, z, order, prec)


def evaluate_dq(q, z, prec=DEFAULT_PRECISION, method="series"):
    """d theta / dq.

    ``method="series"`` differentiates the series term by term (valid at
    q = 0).  ``method="identity"`` uses 2 q theta_q = 2 z theta_z + z**2 theta_zz
    and needs q != 0; its tail bound combines those of the two z-series.
    """
    if method == "series":
        return _result(q, z, "q", prec)
    if method != "identity":
        raise DomainError(f"unknown method {method!r}")
    q = check_q(q, nonzero=True)
    z = complex(z)
    scale = max(1.0, abs(z)) ** 2 / (2 * abs(q))
    eps = prec.target_eps / (2 * scale)
    plan = make_plan(abs(q), abs(z), (1, 2), math.log(eps), prec.working_bits)
    vals = sum_series(q, [z], (1, 2), plan)
    with _ctx(plan.bits):
        zm = to_mp(z, q.imag == 0 and z.imag == 0)
        qm = to_mp(q, q.imag == 0 and z.imag == 0)
        v = (2 * zm * vals[1][0] + zm * zm * vals[2][0]) / (2 * qm)
    tail = (2 * abs(z) * plan.tail(1) + abs(z) ** 2 * plan.tail(2)) / (2 * abs(q))
    return EvalResult(_as_complex(v), tail, max(plan.terms.values()),
                      plan.rounding * scale, plan.bits, v)


def functional_residual(q, x, prec=DEFAULT_PRECISION):
    """|theta(q, x) - 1 - q x theta(q, q x)|, computed at working precision.

    The product q*x is formed in extended precision so that the two sides
    are evaluated at exactly related points.
    """
    q = check_q(q)
    x = complex(x)
    real = q.imag == 0 and x.imag == 0
    plan = make_plan(abs(q), abs(x), (0,), math.log(prec.target_eps), prec.working_bits)
    with _ctx(plan.bits):
        qm, xm = to_mp(q, real), to_mp(x, real)
        y = qm * xm
        t0, t1 = sum_series(q, [xm, y], (0,), plan)[0]
        r = abs(t0 - 1 - y * t1)
    return float(r)


def diffeq_residual(q, z, prec=DEFAULT_PRECISION, relative=False):
    """Residual of 2 q theta_q = 2 z theta_z + z**2 theta_zz.

    With ``relative=True`` the residual is divided by
    max(1, |2 q theta_q| + |2 z theta_z| + |z**2 theta_zz|).
    """
    q = check_q(q)
    z = complex(z)
    real = q.imag == 0 and z.imag == 0
    eps = prec.target_eps / max(1.0, abs(z)) ** 2
    plan = make_plan(abs(q), abs(z), (1, 2, "q"), math.log(eps), prec.working_bits)
    vals = sum_series(q, [z], (1, 2, "q"), plan)
    with _ctx(plan.bits):
        qm, zm = to_mp(q, real), to_mp(z, real)
        a = 2 * qm * vals["q"][0]
        b = 2 * zm * vals[1][0]
        c = zm * zm * vals[2][0]
        r = float(abs(a - b - c))
        scale = float(abs(a) + abs(b) + abs(c))
    if relative:
        return r / max(1.0, scale)
    return r


def diffeq_bound(q, z, prec=DEFAULT_PRECISION):
    """Tail-plus-rounding bound matching :func:`diffeq_residual`."""
    q = check_q(q)
    z = complex(z)
    eps = prec.target_eps / max(1.0, abs(z)) ** 2
    plan = make_plan(abs(q), abs(z), (1, 2, "q"), math.log(eps), prec.working_bits)
    az = abs(z)
    tails = 2 * abs(q) * plan.tail("q") + 2 * az * plan.tail(1) + az * az * plan.tail(2)
    return tails + (2 * abs(q) + 2 * az + az * az) * plan.rounding


def theta_values(q, zs, orders=(0, 1), eps=1e-15, min_bits=53):
    """Complex values of several series at many points (absolute accuracy)."""
    vals, _ = series(q, zs, orders, eps, min_bits)
    return {o: [_as_complex(v) for v in vs] for o, vs in vals.items()}
