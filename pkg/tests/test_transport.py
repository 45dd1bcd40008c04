import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import qmc

from driftsearch import transport
from driftsearch.errors import ConfigurationError
from driftsearch.flow import RotationFlow, UniformFlow
from driftsearch.grid import Domain, GridSpec
from driftsearch.kernels import splat

SQUARE = np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [0.0, 10.0]])


def test_radical_inverse_by_hand():
    np.testing.assert_allclose(transport.radical_inverse(np.arange(1, 8), 2),
                               [1 / 2, 1 / 4, 3 / 4, 1 / 8, 5 / 8, 3 / 8, 7 / 8])
    np.testing.assert_allclose(transport.radical_inverse(np.arange(1, 5), 3), [1 / 3, 2 / 3, 1 / 9, 4 / 9])


def test_halton_first_points():
    np.testing.assert_allclose(transport.halton(3), [[1 / 2, 1 / 3], [1 / 4, 2 / 3], [3 / 4, 1 / 9]])


def test_halton_matches_unscrambled_reference():
    # scipy's unscrambled Halton starts at index 0 (the origin)
    ref = qmc.Halton(d=2, scramble=False).random(101)[1:]
    np.testing.assert_allclose(transport.halton(100), ref, atol=1e-15)


def test_halton_beats_random_discrepancy():
    pts = transport.halton(512)
    rnd = np.random.default_rng(3).random((512, 2))
    assert qmc.discrepancy(pts) < qmc.discrepancy(rnd)


def test_polygon_area_and_orientation():
    assert transport.polygon_area(SQUARE) == 100.0
    assert transport.polygon_area(SQUARE[::-1]) == -100.0
    r = transport.SplashRegion(SQUARE[::-1])
    assert r.area == 100.0


@pytest.mark.parametrize("verts", [
    [[0, 0], [1, 0]],
    [[0, 0], [1, 1], [2, 2]],
    [[0, 0], [4, 0], [1, 1], [0, 4]],
    [[0, 0], [2, 0], [0, 2], [2, 2]],
])
def test_splash_region_rejects_bad_polygons(verts):
    with pytest.raises(ConfigurationError):
        transport.SplashRegion(np.array(verts, dtype=float))


def test_seed_halton_inside_and_continuing_index():
    tri = transport.SplashRegion(np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]]), t0=2.0)
    ens = transport.seed_halton(tri, 200)
    assert len(ens) == 200 and ens.epoch == 2.0
    assert tri.contains(ens.positions).all()
    # reference: walk the sequence, keep the inside points
    raw = transport.halton(1000) * 10.0
    expected = raw[tri.contains(raw)][:200]
    np.testing.assert_allclose(ens.positions, expected)
    np.testing.assert_allclose(ens.weights.sum(), 1.0)


def test_seed_regions_split_by_area():
    a = transport.SplashRegion(SQUARE)
    b = transport.SplashRegion(SQUARE * [3, 1] + [20, 0])
    ens = transport.seed_regions([a, b], 1000)
    assert len(ens) == 1000
    assert a.contains(ens.positions).sum() == 250


def test_density_integrates_to_one_and_empty_is_degenerate():
    g = GridSpec(Domain(0, 20, 0, 20), 40, 40)
    ens = transport.TracerEnsemble(np.array([[1.0, 1.0], [19.9, 0.1], [10.0, 10.0]]))
    f = transport.density(ens, g, 3.0)
    assert abs(f.integrate() - 1.0) < 1e-12
    assert (f.values >= 0).all()
    empty = transport.density(transport.TracerEnsemble(np.empty((0, 2))), g)
    assert empty.degenerate and empty.integrate() == 0.0


def test_uniform_splash_gives_flat_density_inside():
    dom = Domain(0, 100, 0, 100)
    g = GridSpec(dom, 50, 50)
    region = transport.SplashRegion(np.array([[20.0, 20.0], [80.0, 20.0], [80.0, 80.0], [20.0, 80.0]]))
    f = transport.density(transport.seed_halton(region, 100_000), g, 3.0)
    inner = (g.xc > 32) & (g.xc < 68)
    core = f.values[np.ix_(inner, inner)]
    np.testing.assert_allclose(core, 1.0 / region.area, rtol=0.1)


def test_advect_translation_and_rotation():
    ens = transport.TracerEnsemble(np.array([[1.0, 2.0], [3.0, 4.0]]), epoch=1.0)
    moved = transport.advect(ens, UniformFlow(2.0, -1.0), 4.0)
    np.testing.assert_allclose(moved.positions, ens.positions + [6.0, -3.0])
    assert moved.epoch == 4.0
    spun = transport.advect(ens, RotationFlow(np.pi / 2), 3.0)
    np.testing.assert_allclose(spun.positions, -ens.positions, atol=1e-6)


def test_tracer_csv_round_trip(tmp_path):
    ens = transport.TracerEnsemble(np.array([[1.0 / 3, 2.0], [5.5, -0.1]]), epoch=12.5)
    text = ens.to_csv()
    assert text.splitlines()[:2] == ["# epoch_hours=12.5", "id,x_km,y_km,weight"]
    back = transport.TracerEnsemble.from_csv(text)
    np.testing.assert_array_equal(back.positions, ens.positions)
    assert back.epoch == 12.5
    ens.save_csv(tmp_path / "t.csv")
    assert transport.TracerEnsemble.load_csv(tmp_path / "t.csv").epoch == 12.5


pts_strategy = st.lists(st.tuples(st.floats(-5, 25), st.floats(-5, 25)), min_size=1, max_size=40)


@settings(max_examples=40, deadline=None)
@given(pts_strategy, st.floats(0.2, 8.0))
def test_splat_conserves_mass(points, sigma):
    g = GridSpec(Domain(0, 20, 0, 20), 24, 20)
    p = np.array(points)
    w = np.linspace(0.5, 2.0, len(p))
    out = splat(p, w, g, sigma)
    assert (out >= 0).all()
    assert abs(out.sum() * g.cell_area - w.sum()) <= 1e-9 * w.sum()


def test_splat_matches_normalised_gaussian_away_from_edges():
    g = GridSpec(Domain(0, 60, 0, 60), 120, 120)
    out = splat(np.array([[30.0, 30.0]]), 1.0, g, 3.0)
    c = g.centers()
    r2 = ((c - 30.0) ** 2).sum(-1)
    ref = np.where(r2 <= 144.0, np.exp(-r2 / 18.0), 0.0)
    ref /= ref.sum() * g.cell_area
    np.testing.assert_allclose(out, ref, atol=1e-14)
    # close to the continuous 2-D normal density
    assert abs(out.max() - 1 / (2 * np.pi * 9)) / out.max() < 0.01


def test_zero_tracers():
    ens = transport.seed_halton(transport.SplashRegion(SQUARE), 0)
    assert len(ens) == 0 and ens.weights.size == 0


def test_full_rotation_restores_tracers():
    ens = transport.seed_halton(transport.SplashRegion(SQUARE), 50)
    back = transport.advect(ens, RotationFlow(2 * np.pi / 10), 10.0)
    assert np.abs(back.positions - ens.positions).max() < 1e-5


def test_single_and_paired_bumps():
    g = GridSpec(Domain(0, 40, 0, 40), 80, 80)
    one = transport.density(transport.TracerEnsemble(np.array([[20.0, 20.0]])), g, 2.0).values
    assert abs(one.sum() * g.cell_area - 1.0) < 1e-12
    np.testing.assert_allclose(one, one[::-1, :], atol=1e-15)
    np.testing.assert_allclose(one, one.T, atol=1e-15)
    two = transport.density(transport.TracerEnsemble(np.array([[10.0, 20.0], [30.0, 20.0]])), g, 2.0).values
    left = two[:40].sum() * g.cell_area
    assert abs(left - 0.5) < 1e-6 and abs(two[40:].sum() * g.cell_area - 0.5) < 1e-6
