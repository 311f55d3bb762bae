import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fognodes.geometry import (
    Placement,
    bpp_distance_moment,
    center_distance_moment,
    empirical_moment,
    fog_range,
    make_rng,
    nearest_assignment,
    sample_placement,
)
from fognodes.model import load_config


def cfg_for(a=50.0, n=200, R=None, alpha=1):
    return load_config({"a": a, "R": R if R is not None else 0.0765 * a, "n": n, "alpha": alpha})


def exact_center_moment(alpha, a=1.0):
    """E[|z|^alpha] for z uniform on [-a, a]^2 by quadrature."""
    val, _ = integrate.dblquad(lambda y, x: (x * x + y * y) ** (alpha / 2), -a, a, -a, a, epsabs=1e-12)
    return val / (4 * a * a)


def test_quadrature_oracle_matches_closed_forms():
    assert exact_center_moment(2) == pytest.approx(2 / 3, rel=1e-10)
    assert exact_center_moment(4) == pytest.approx(2 / 5 + 2 / 9, rel=1e-10)
    # sqrt(2)/3 + asinh(1)/3
    assert exact_center_moment(1) == pytest.approx((math.sqrt(2) + math.asinh(1)) / 3, rel=1e-8)


@pytest.mark.parametrize(
    "alpha,a,expected",
    [(1, 1.0, 0.765), (2, 3.0, 6.0), (4, 1.0, 0.6222)],
)
def test_center_distance_moment(alpha, a, expected):
    assert center_distance_moment(alpha, a) == pytest.approx(expected, abs=1e-4)


@pytest.mark.parametrize("alpha", [1, 2, 4])
def test_center_distance_moment_against_quadrature(alpha):
    assert center_distance_moment(alpha, 1.0) == pytest.approx(exact_center_moment(alpha), rel=5e-4)


def test_center_distance_moment_rejects_alpha():
    with pytest.raises(ValueError):
        center_distance_moment(3, 1.0)


@given(alpha=st.sampled_from([1, 2, 4]), a=st.floats(0.01, 100), lam=st.floats(0.01, 100))
def test_center_moment_scaling(alpha, a, lam):
    assert center_distance_moment(alpha, lam * a) == pytest.approx(
        lam**alpha * center_distance_moment(alpha, a), rel=1e-12
    )


@pytest.mark.parametrize(
    "R,n1,expected",
    [(3.825, 7.92, 1.5172), (1.0, math.pi, 1.0), (3.825, 2.58, 4.6576)],
)
def test_fog_range(R, n1, expected):
    assert fog_range(R, n1) == pytest.approx(expected, abs=1e-4)


@pytest.mark.parametrize(
    "order,r,i,N,expected",
    [(1, 2.0, 1, 3, 1.0), (2, 2.0, 2, 3, 2.0), (4, 1.0, 2, 1, 1.0)],
)
def test_bpp_distance_moment(order, r, i, N, expected):
    assert bpp_distance_moment(order, r, i, N) == pytest.approx(expected, rel=1e-14)


def test_bpp_distance_moment_rejects_order():
    with pytest.raises(ValueError):
        bpp_distance_moment(3, 1.0, 1, 1)


def ordered_disk_distances(r, N, samples, seed=0):
    rng = np.random.default_rng(seed)
    d = r * np.sqrt(rng.uniform(size=(samples, N)))
    return np.sort(d, axis=1)


@pytest.mark.parametrize("N", [1, 4, 24])
def test_bpp_second_moment_matches_monte_carlo(N):
    r = 2.5
    d = ordered_disk_distances(r, N, 100_000)
    for i in range(1, N + 1):
        mc = np.mean(d[:, i - 1] ** 2)
        assert bpp_distance_moment(2, r, i, N) == pytest.approx(mc, rel=0.02)


def test_bpp_first_and_fourth_moment_bound_the_true_moments():
    # order 1 is (E[d^2])^(1/2) and order 4 is (E[d^2])^2; by Jensen they
    # bound E[d] from above and E[d^4] from below
    r, N = 1.0, 10
    d = ordered_disk_distances(r, N, 100_000)
    for i in range(1, N + 1):
        assert bpp_distance_moment(1, r, i, N) >= np.mean(d[:, i - 1])
        assert bpp_distance_moment(4, r, i, N) <= np.mean(d[:, i - 1] ** 4)


@pytest.mark.parametrize("alpha,expected,tol", [(2, 2 / 3, 0.003), (1, 0.765, 0.003), (4, 0.6222, 0.005)])
def test_empirical_moment(alpha, expected, tol):
    assert empirical_moment(alpha, 1.0, 10**6, seed=11) == pytest.approx(expected, abs=tol)


def test_empirical_moment_is_deterministic():
    assert empirical_moment(2, 3.0, 1000, 5) == empirical_moment(2, 3.0, 1000, 5)


def test_sample_placement_shape():
    pl = sample_placement(cfg_for(a=10, n=12), 3, seed=7)
    assert pl.coords.shape == (12, 2)
    assert np.all(np.abs(pl.coords) <= 10)
    assert len(pl.fog_indices) == 3
    assert len(pl.assignment) == 9


def test_assignment_targets_are_fog_nodes():
    pl = sample_placement(cfg_for(), 8, seed=1)
    fogs = set(pl.fog_indices.tolist())
    assert set(pl.assignment.values()) <= fogs
    assert set(pl.assignment) == set(range(200)) - fogs


@pytest.mark.parametrize("n1", [0, 200, 250])
def test_sample_placement_rejects_n1(n1):
    with pytest.raises(ValueError):
        sample_placement(cfg_for(), n1, seed=1)


@pytest.mark.parametrize("layout", ["uniform", "fog_range"])
def test_sample_placement_is_deterministic(layout):
    cfg = cfg_for(n=60)
    p1 = sample_placement(cfg, 5, seed=123, layout=layout)
    p2 = sample_placement(cfg, 5, seed=123, layout=layout)
    p3 = sample_placement(cfg, 5, seed=124, layout=layout)
    assert np.array_equal(p1.coords, p2.coords)
    assert np.array_equal(p1.fog_indices, p2.fog_indices)
    assert p1.assignment == p2.assignment
    assert not np.array_equal(p1.coords, p3.coords)


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(0.5, 100),
    n=st.integers(2, 80),
    frac=st.floats(0, 1),
    seed=st.integers(0, 2**64 - 1),
    layout=st.sampled_from(["uniform", "fog_range"]),
)
def test_placement_invariants(a, n, frac, seed, layout):
    n1 = 1 + int(frac * (n - 2))
    pl = sample_placement(cfg_for(a=a, n=n), n1, seed=seed, layout=layout)
    assert np.all(np.abs(pl.coords) <= a)
    fogs = pl.fog_indices
    assert 0 < len(fogs) < n
    assert sorted(pl.assignment) == sorted(set(range(n)) - set(fogs.tolist()))
    for dev, fog in pl.assignment.items():
        d = np.hypot(*(pl.coords[fogs] - pl.coords[dev]).T)
        assert np.hypot(*(pl.coords[fog] - pl.coords[dev])) <= d.min()


def test_nearest_assignment_ties_go_to_lowest_index():
    coords = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 0.0], [0.0, 5.0]])
    assert nearest_assignment(coords, [1, 0, 3]) == {2: 0}


def test_fog_range_layout_reproduces_disk_moments():
    # one fog node far from the edges: devices are uniform in a disk of
    # radius pi R / n1, so E[x^2] = r^2 / 2
    cfg = load_config({"a": 50, "R": 1.0, "n": 2001, "alpha": 2})
    pl = sample_placement(cfg, 1, seed=3, layout="fog_range")
    r = fog_range(1.0, 1)
    x = pl.device_fog_distances()
    fog = pl.coords[pl.fog_indices[0]]
    if np.all(np.abs(fog) < 50 - r):
        assert np.mean(x**2) == pytest.approx(r**2 / 2, rel=0.05)
    assert x.max() <= r + 1e-12


def test_placement_json_and_csv_round_trip():
    pl = sample_placement(cfg_for(a=10, n=40), 4, seed=7)
    back = Placement.from_json(pl.to_json())
    assert np.array_equal(back.coords, pl.coords)
    assert np.array_equal(back.fog_indices, pl.fog_indices)
    assert back.assignment == pl.assignment
    back = Placement.from_csv(pl.to_csv(), seed=7, a=10)
    assert np.array_equal(back.coords, pl.coords)
    assert back.assignment == pl.assignment
    header = pl.to_csv().splitlines()[0]
    assert header == "index,x_km,y_km,role,assigned_fog"


def test_make_rng_substreams_differ():
    a = make_rng(5, 1, 2).uniform(size=4)
    b = make_rng(5, 2, 1).uniform(size=4)
    c = make_rng(5, 1, 2).uniform(size=4)
    assert np.array_equal(a, c)
    assert not np.array_equal(a, b)
    with pytest.raises(ValueError):
        make_rng(-1)
