import math

import mpmath as mp
import numpy as np
import pytest

from partheta import DomainError
from partheta.errors import MixedBranches
from partheta.spectrum import (
    COMPLEX_PAIR_SEED, SpectralPoint, asymptotic_residuals, complex_pairs,
    complex_spectral_point, double_zero_identity_error, find_double_zero, lost_pairs,
    predicted_negative, predicted_positive, real_spectrum_negative,
    real_spectrum_positive, verify_smoothness,
)
from partheta.zeros import real_zeros_in_interval, zeros_in_disk

from oracles import mp_theta

# frozen regression anchors; each is re-derived below by an independent mpmath solve
Q2_POSITIVE = 0.5169593597880521
Q3_POSITIVE = 0.6306283160631743
Q1_NEGATIVE = -0.7271333254557868
Q2_NEGATIVE = -0.7837420931951354


def mp_double_zero(q0, z0, dps=30):
    """Independent solve of theta = theta_z = 0 with mpmath.findroot."""
    with mp.workdps(dps):
        f = lambda q, z: [mp_theta(q, z, 0, dps + 10), mp_theta(q, z, 1, dps + 10)]
        q, z = mp.findroot(f, (mp.mpf(q0), mp.mpf(z0)))
        return float(q), float(z)


@pytest.fixture(scope="module")
def positive3():
    return real_spectrum_positive(3)


@pytest.fixture(scope="module")
def negative2():
    return real_spectrum_negative(2)


@pytest.fixture(scope="module")
def complex_point():
    return complex_spectral_point()


# ---------------------------------------------------------------- positive branch


def test_first_spectral_number_from_seed():
    p = find_double_zero(0.31, -7.0)
    assert p.q.real == pytest.approx(0.3092, abs=5e-4)
    assert p.q.imag == 0 and p.y.imag == 0
    q, y = mp_double_zero(0.31, -7.5)
    assert p.q.real == pytest.approx(q, abs=1e-12)
    assert p.y.real == pytest.approx(y, rel=1e-10)


def test_positive_spectrum_anchors(positive3):
    qs = [p.q.real for p in positive3]
    assert [p.index for p in positive3] == [1, 2, 3]
    assert 0.3092 < qs[0] < qs[1] < qs[2] < 1
    assert qs[0] == pytest.approx(0.3092, abs=5e-4)
    assert qs[1] == pytest.approx(Q2_POSITIVE, abs=1e-10)
    assert qs[2] == pytest.approx(Q3_POSITIVE, abs=1e-10)
    for p in positive3[1:]:
        q, y = mp_double_zero(p.q.real, p.y.real)
        assert p.q.real == pytest.approx(q, abs=1e-12)
        assert p.y.real == pytest.approx(y, rel=1e-10)


def test_positive_points_are_negative_minima(positive3):
    for p in positive3:
        assert p.y.real < 0 and p.branch == "positive_real"
        assert verify_smoothness(p) > 1e-6
        assert double_zero_identity_error(p) < 1e-8


def test_pair_coalesces_then_turns_complex(positive3):
    p = positive3[1]
    q, y = p.q.real, p.y.real
    below = real_zeros_in_interval(q - 1e-5, y - 1.0, y + 1.0)
    assert len(below) == 2 and all(r.multiplicity == 1 for r in below)
    above = [r.z for r in zeros_in_disk(q + 1e-5, 2 * abs(y)) if abs(r.z - y) < 1.0]
    assert len(above) == 2
    assert abs(above[0] - above[1].conjugate()) < 1e-8 and abs(above[0].imag) > 0


def test_complex_pair_census(positive3):
    qs = [p.q.real for p in positive3]
    assert complex_pairs(0.3) == 0
    assert complex_pairs(0.5 * (qs[0] + qs[1])) == 1
    assert complex_pairs(0.5 * (qs[1] + qs[2])) == 2


def test_seed_perturbation_returns_same_point(positive3):
    p = positive3[1]
    for f in (1 + 1e-3, 1 - 1e-3):
        r = find_double_zero(p.q.real * f, p.y.real / f)
        assert abs(r.q - p.q) < 1e-8 and abs(r.y - p.y) < 1e-8 * abs(p.y)


def test_large_index_seed_lands_near_asymptotics():
    q0 = 1 - math.pi / 40
    p = find_double_zero(q0, -23.0)
    assert abs(p.q.real - (q0 + math.log(20) / 3200)) < 0.02


# ---------------------------------------------------------------- negative branch


def test_negative_spectrum_anchors(negative2):
    a, b = negative2
    assert (a.index, b.index) == (1, 2)
    assert a.q.real == pytest.approx(Q1_NEGATIVE, abs=1e-10)
    assert b.q.real == pytest.approx(Q2_NEGATIVE, abs=1e-10)
    for p in negative2:
        q, y = mp_double_zero(p.q.real, p.y.real)
        assert p.q.real == pytest.approx(q, abs=1e-12)
    # odd index: negative local minimum; even index: positive local maximum
    assert a.y.real < 0 and b.y.real > 0
    for p in negative2:
        assert -1 < p.q.real < 0 and p.branch == "negative_real"
        assert verify_smoothness(p) > 1e-6


def test_negative_census_steps(negative2):
    a, b = negative2
    assert lost_pairs(a.q.real + 1e-4, "negative") == 0
    assert lost_pairs(a.q.real - 1e-4, "negative") == 1
    assert lost_pairs(b.q.real + 1e-4, "positive") == 0
    assert lost_pairs(b.q.real - 1e-4, "positive") == 1


def test_negative_odd_subsequence_ordering():
    pts = real_spectrum_negative(5, k_min=3)
    by_k = {p.index: p.q.real for p in pts}
    assert -1 < by_k[5] < by_k[3] < 0
    assert all(p.index % 2 or p.y.real > 0 for p in pts)


# ---------------------------------------------------------------- complex pair


def test_complex_pair(complex_point):
    p = complex_point
    assert abs(p.q.real - 0.4353184958) < 1e-9
    assert abs(p.q.imag - 0.1230440086) < 1e-9
    assert p.newton_residual <= 1e-10
    assert p.branch == "complex_pair"
    assert verify_smoothness(p) > 1e-6
    assert double_zero_identity_error(p) < 1e-8


def test_complex_pair_conjugate_closure(complex_point):
    p = complex_point
    r = find_double_zero(COMPLEX_PAIR_SEED.conjugate(), p.y.conjugate())
    assert abs(r.q - p.q.conjugate()) < 1e-12
    assert abs(r.y - p.y.conjugate()) < 1e-10 * abs(p.y)


# ---------------------------------------------------------------- asymptotics


def test_predictions():
    q, y = predicted_positive(1)
    assert q == pytest.approx(1 - math.pi / 2)
    assert y == pytest.approx(-math.exp(math.pi))
    assert predicted_negative(4) == (1 - math.pi / 32, math.exp(math.pi / 2))


def test_asymptotic_report_small_k(positive3):
    rep = asymptotic_residuals(positive3)
    assert [r.k for r in rep.rows] == [1, 2, 3]
    # the law is a large-k statement: k = 1 is reported, not judged
    assert rep.rows[0].q_residual == pytest.approx(positive3[0].q.real - (1 - math.pi / 2))
    assert np.all(np.isfinite(rep.scaled_q_residuals()))


def test_asymptotic_report_errors(positive3, negative2, complex_point):
    with pytest.raises(MixedBranches):
        asymptotic_residuals([positive3[0], negative2[0]])
    with pytest.raises(MixedBranches):
        asymptotic_residuals([complex_point])
    with pytest.raises(DomainError):
        asymptotic_residuals([positive3[0], positive3[2]])
    assert asymptotic_residuals([]).rows == []


def test_spectrum_argument_checks():
    with pytest.raises(DomainError):
        real_spectrum_positive(0)
    with pytest.raises(DomainError):
        real_spectrum_negative(3, k_min=4)
    assert isinstance(SpectralPoint(0.5, -1.0), SpectralPoint)
