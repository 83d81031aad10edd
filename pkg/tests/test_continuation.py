import io
import math

import numpy as np
import pytest

from partheta import DomainError
from partheta.continuation import (
    Arc, Line, QPath, build_loop, circle_loop, compose, compose_permutations,
    known_spectrum, labelled_zeros, monodromy, track_zero, write_trajectory_csv,
)
from partheta.errors import EndpointMismatch, NoConvergence, SpectrumTooClose
from partheta.zeros import annulus_of


@pytest.fixture(scope="module")
def base_zeros():
    return labelled_zeros(0.1, [1, 2, 3, 4, 5])


@pytest.fixture(scope="module")
def gamma1():
    return build_loop("gamma(1)")


# ---------------------------------------------------------------- paths


def test_path_geometry():
    p = QPath((Line(0.1, 0.3), Arc(0.5, 0.2, math.pi, 2 * math.pi)))
    assert p.base_point == 0.1
    assert p.end == pytest.approx(0.7)
    assert p.length == pytest.approx(0.2 + 0.2 * math.pi)
    assert not p.closed
    r = p.reversed()
    assert r.base_point == pytest.approx(0.7) and r.end == pytest.approx(0.1)
    assert r.length == pytest.approx(p.length)
    assert p.distance_to(0.2 + 0.1j) == pytest.approx(0.1)
    assert p.distance_to(0.5) == pytest.approx(0.2)


def test_path_validation():
    with pytest.raises(EndpointMismatch):
        QPath((Line(0.1, 0.2), Line(0.3, 0.4)))
    with pytest.raises(DomainError):
        QPath((Line(0.5, 1.2),))
    with pytest.raises(DomainError):
        QPath(())
    with pytest.raises(EndpointMismatch):
        compose([QPath((Line(0.1, 0.2),)), QPath((Line(0.3, 0.4),))])


def test_circle_loop_closed():
    c = circle_loop(0j, 0.05)
    assert c.closed and c.length == pytest.approx(0.1 * math.pi)


# ---------------------------------------------------------------- loops


def test_gamma1_shape(gamma1):
    q1 = known_spectrum()["positive"][0]
    assert gamma1.closed and gamma1.base_point == 0.1
    assert [type(s) for s in gamma1.segments] == [Line, Arc, Line]
    assert gamma1.distance_to(q1) == pytest.approx(0.01)


def test_gamma2_bypasses_first_spectral_number():
    g = build_loop("gamma(2)")
    q1, q2 = known_spectrum()["positive"][:2]
    arcs = [s for s in g.segments if isinstance(s, Arc)]
    assert len(arcs) == 3  # two half-circle bypasses and the circle
    assert any(abs(a.center - q1) < 1e-14 and a.radius < 1e-3 for a in arcs)
    assert g.closed and g.distance_to(q2) > 0
    # the bypass sits in the upper half-plane
    pts = g.sample(4000)
    near = pts[np.abs(pts - q1) < 2e-3]
    assert np.all(near.imag >= -1e-15)


def test_eta_loops_compose_to_closed_loop():
    up, down = build_loop("eta_plus"), build_loop("eta_minus")
    assert up.base_point == 0.1 and up.end == pytest.approx(-0.1)
    assert compose([up, down]).closed


def test_build_loop_errors():
    with pytest.raises(DomainError):
        build_loop("zeta(1)")
    with pytest.raises(DomainError):
        build_loop("gamma")
    with pytest.raises(DomainError):
        build_loop("gamma(1)", a=0.5)
    with pytest.raises(SpectrumTooClose):
        build_loop("gamma(1)", eps=0.25)
    with pytest.raises(SpectrumTooClose):
        build_loop("gamma(2)", eps=0.2)


# ---------------------------------------------------------------- tracking


def test_track_constant_path():
    z = labelled_zeros(0.1, [1])[0][1]
    # a full circle of tiny radius returns to the start with negligible motion
    traj = track_zero(circle_loop(0.1, 1e-9, turns=1), z)
    assert max(abs(w - z) for w in traj.z) < 1e-6


def test_track_stays_in_first_annulus():
    z = labelled_zeros(0.05, [1])[0][1]
    traj = track_zero(QPath((Line(0.05, 0.2),)), z)
    assert traj.q[-1] == pytest.approx(0.2)
    assert all(annulus_of(q, z) == 1 for q, z in zip(traj.q, traj.z))
    assert traj.end.real == pytest.approx(labelled_zeros(0.2, [1])[0][1].real, rel=1e-10)
    assert max(traj.residual) < 1e-10


def test_track_polishes_rough_start():
    traj = track_zero(QPath((Line(0.05, 0.06),)), -15.0)
    assert traj.start == pytest.approx(labelled_zeros(0.05, [1])[0][1], rel=1e-12)


def test_track_rejects_start_far_from_a_zero():
    # next to a close pair, -7 is not within the separation radius of either zero
    q = 0.3092493386000775 - 1e-6
    with pytest.raises(NoConvergence):
        track_zero(QPath((Line(q, 0.3),)), -7.0)


def test_trajectory_csv():
    z = labelled_zeros(0.05, [1])[0][1]
    traj = track_zero(QPath((Line(0.05, 0.06),)), z)
    buf = io.StringIO()
    write_trajectory_csv(traj, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "step,q_re,q_im,z_re,z_im,residual"
    assert len(lines) == len(traj.z) + 1


# ---------------------------------------------------------------- monodromy


def test_gamma1_swaps_first_pair(gamma1, base_zeros):
    m = monodromy(gamma1, base_zeros)
    assert m.permutation == {1: 2, 2: 1, 3: 3, 4: 4, 5: 5}
    assert m.cycles() == [(1, 2)]
    ends = {t.label: t.end for t in m.trajectories}
    assert abs(ends[1] - dict(base_zeros)[2]) < 1e-8 * abs(dict(base_zeros)[2])


def test_gamma2_swaps_second_pair(base_zeros):
    m = monodromy(build_loop("gamma(2)"), base_zeros)
    assert m.cycles() == [(3, 4)]


def test_small_loop_about_origin_is_trivial():
    m = monodromy(circle_loop(0j, 0.05), labelled_zeros(0.05, [1, 2, 3]))
    assert m.is_identity


def test_composed_loop_sends_first_to_fourth(gamma1, base_zeros):
    loop = compose([gamma1, build_loop("eta_plus"), build_loop("delta(1)"),
                    build_loop("eta_minus")])
    m = monodromy(loop, base_zeros)
    assert m.permutation[1] == 4


def test_transposition_squared_and_inverse(gamma1, base_zeros):
    assert monodromy(compose([gamma1, gamma1]), base_zeros).is_identity
    assert monodromy(compose([gamma1, gamma1.reversed()]), base_zeros).is_identity


def test_homotopy_invariance_under_eps(base_zeros):
    a = monodromy(build_loop("gamma(1)", eps=0.01), base_zeros).permutation
    b = monodromy(build_loop("gamma(1)", eps=0.012), base_zeros).permutation
    assert a == b


def test_monodromy_needs_closed_loop(base_zeros):
    with pytest.raises(EndpointMismatch):
        monodromy(build_loop("eta_plus"), base_zeros)


def test_compose_permutations():
    a = {1: 2, 2: 1, 3: 3}
    b = {1: 1, 2: 3, 3: 2}
    assert compose_permutations(a, b) == {1: 3, 2: 1, 3: 2}
    assert compose_permutations(a, a) == {1: 1, 2: 2, 3: 3}


def test_labelled_zeros_domain():
    with pytest.raises(DomainError):
        labelled_zeros(0.5, [1])
    zs = dict(labelled_zeros(0.1, [1, 2]))
    assert annulus_of(0.1, zs[1]) == 1 and annulus_of(0.1, zs[2]) == 2
