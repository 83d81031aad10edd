import io
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partheta import DomainError
from partheta.density import (
    CSV_COLUMNS, E_HALF_PI, E_PI, core_bound, count_Z, dense_zero_probe, density_report,
    density_sweep, deviations_decreasing, ell_a, left_core_count, n_a, p_a,
    pair_bracket_counts, pairing_counts, write_density_csv, write_density_json,
)
from partheta.errors import SignPatternViolated
from partheta.spectrum import SpectralPoint

from oracles import mp_sign_changes


# ---------------------------------------------------------------- interval counts


def test_count_examples():
    assert count_Z(0.5, 0.0, 1e6) == 0
    assert count_Z(0.2, -0.2 ** -2.5, -0.2 ** -1.5) == 1
    assert count_Z(-0.5, 4.0, 16.0, include_lo=False, include_hi=False) == 1


def test_degenerate_intervals():
    assert ell_a(0.2, E_PI) == 0
    assert ell_a(0.5, E_PI) == 0
    assert n_a(-0.2, E_HALF_PI) == 0
    assert p_a(-0.2, E_HALF_PI) == 0


def test_argument_checks():
    with pytest.raises(DomainError):
        ell_a(-0.5, 100)
    with pytest.raises(DomainError):
        n_a(0.5, 100)
    with pytest.raises(DomainError):
        ell_a(0.5, 10)
    with pytest.raises(DomainError):
        count_Z(0.5 + 0.1j, -10, 0)
    with pytest.raises(DomainError):
        core_bound(1.0)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([0.3, 0.6, -0.6, 0.85]), st.floats(0.05, 0.95))
def test_count_additive(q, frac):
    lo, hi = -150.0, 150.0
    mid = lo + frac * (hi - lo)
    whole = count_Z(q, lo, hi)
    assert whole == count_Z(q, lo, mid, include_hi=False) + count_Z(q, mid, hi)


# ---------------------------------------------------------------- core counts


@pytest.mark.parametrize("r", [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_left_core_bound(r):
    bound = core_bound(r)
    assert bound == math.floor(math.pi / math.log(1 / r)) + 1
    for q in (r / 2, r):
        assert left_core_count(q) <= bound


def test_core_bound_examples():
    assert core_bound(0.2) == 2 and core_bound(0.3) == 3
    assert left_core_count(0.2) <= 2


def test_negative_core_is_pair():
    neg, pos = left_core_count(-0.5)
    assert neg >= 0 and pos >= 0


# ---------------------------------------------------------------- brackets


@pytest.mark.parametrize("q", [0.1, 0.3, 0.5, 0.7])
def test_pair_brackets_hold_zero_or_two(q):
    counts = pair_bracket_counts(q, 6)
    assert set(counts) <= {0, 2}
    # brackets far out always hold a real pair
    assert counts[-1] == 2


def test_pair_brackets_after_first_spectral_number():
    assert pair_bracket_counts(0.5, 3) == [0, 2, 2]
    assert pair_bracket_counts(0.3, 3) == [2, 2, 2]


# ---------------------------------------------------------------- pairing


@pytest.mark.parametrize("q", [-0.5, -0.7, -0.8, -0.9])
def test_pairing_within_one(q):
    right, left = pairing_counts(q)
    assert abs(right - left) <= 1


def test_pairing_counterexample_near_minus_one():
    # a real pair just below e**(pi/2) whose mirror pair is already complex
    assert pairing_counts(-0.95) == (3, 1)


# ---------------------------------------------------------------- densities


def test_counts_against_independent_scan():
    assert ell_a(0.9, 100) == mp_sign_changes(0.9, -100, -E_PI) == 14
    assert p_a(-0.9, 100) == mp_sign_changes(-0.9, E_HALF_PI, 100) == 15


def test_positive_density_example():
    rep = density_report(0.95, 100)
    assert rep.counts["ell_a"] == 28
    assert rep.predicted == pytest.approx(math.log(100 / E_PI))
    assert rep.relative_deviation <= 0.3


def test_negative_density_example():
    rep = density_report(-0.95, 50)
    pred = math.log(50 / E_HALF_PI) / 2
    assert rep.predicted == pytest.approx(pred)
    assert abs(rep.counts["n_a"] - pred / 0.05) <= 0.3 * pred / 0.05
    assert abs(rep.counts["n_a"] - rep.counts["p_a"]) <= 2


def test_single_point_sweep():
    reps = density_sweep("positive", 100, [0.9])
    assert len(reps) == 1 and deviations_decreasing(reps)
    with pytest.raises(DomainError):
        density_sweep("positive", 100, [-0.9])
    with pytest.raises(DomainError):
        density_sweep("sideways", 100, [0.9])


def test_writers():
    reps = density_sweep("negative", 50, [-0.9])
    buf = io.StringIO()
    write_density_csv(reps, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert [ln.split(",")[-1] for ln in lines[1:]] == ["n_a", "p_a"]
    buf = io.StringIO()
    write_density_json(reps, buf)
    data = json.loads(buf.getvalue())
    assert data[0]["q"] == -0.9 and data[0]["deviation_p"] is not None


# ---------------------------------------------------------------- ladders


@pytest.fixture(scope="module")
def probe30():
    return dense_zero_probe(30)


def test_ladder_first_value_is_one(probe30):
    assert probe30.values[1] == pytest.approx(1.0, abs=1e-8)


def test_ladder_intervals_hold_zeros(probe30):
    assert len(probe30.zeros) == len(probe30.intervals) > 20
    for (lo, hi), z in zip(probe30.intervals, probe30.zeros):
        assert lo <= z <= hi and -100 <= lo and hi <= -E_PI
    assert probe30.max_gap <= (1 - probe30.q) * 100


def test_ladder_negative_branch():
    probe = dense_zero_probe(8, "negative")
    assert probe.values[1] == pytest.approx(1.0, abs=1e-8)
    for (lo, hi), z in zip(probe.intervals, probe.zeros):
        assert E_HALF_PI <= lo < z < hi
    with pytest.raises(DomainError):
        dense_zero_probe(3, "negative")


def test_ladder_rejects_point_off_the_spectrum():
    # theta(x_1) = 1 only when y is a double zero
    with pytest.raises(SignPatternViolated):
        dense_zero_probe(1, point=SpectralPoint(0.5, -3.0))
