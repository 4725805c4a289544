"""Grids: quadrature, stencil jets, snapshot round-trips."""

import numpy as np
import pytest

import dsflow as ds
from dsflow.errors import DomainError
from dsflow.grids import SnapshotError


def test_sphere_area_closed_forms():
    assert ds.sphere_area(1) == pytest.approx(2 * np.pi)
    assert ds.sphere_area(2) == pytest.approx(4 * np.pi)
    assert ds.sphere_area(3) == pytest.approx(2 * np.pi ** 2)
    assert ds.sphere_area(4) == pytest.approx(8 * np.pi ** 2 / 3)


def test_grid_validation():
    with pytest.raises(DomainError):
        ds.AxisymGrid(3, 100)       # even m
    with pytest.raises(DomainError):
        ds.AxisymGrid(3, 3)         # too small
    with pytest.raises(DomainError):
        ds.AxisymGrid(1, 101)       # n < 2
    with pytest.raises(DomainError):
        ds.LatLongGrid(4, 32)       # ntheta too small
    with pytest.raises(DomainError):
        ds.LatLongGrid(32, 33)      # odd nphi


def test_axisym_quadrature_exact_on_constants():
    for n in (2, 3, 4):
        g = ds.AxisymGrid(n, 201)
        total = ds.integrate(np.ones(g.m), g)
        assert total == pytest.approx(ds.sphere_area(n), rel=1e-8)


def test_latlong_quadrature_exact_on_constants():
    g = ds.LatLongGrid(32, 64)
    assert ds.integrate(np.ones(g.shape), g) == pytest.approx(
        4 * np.pi, rel=1e-6)


def test_axisym_n2_quadrature_is_fourth_order():
    # with the endpoint correction the n=2 trapezoid rule is O(h^4)
    f = lambda t: np.exp(np.cos(t))
    exact = 2 * np.pi * (np.e - 1 / np.e)   # int_0^pi e^{cos t} sin t dt = e - 1/e
    errs = []
    for m in (51, 101, 201):
        g = ds.AxisymGrid(2, m)
        errs.append(abs(ds.integrate(f(g.theta), g) - exact))
    order = np.log2(errs[0] / errs[1])
    assert order > 3.5
    assert errs[-1] < 1e-8


def test_latlong_quadrature_pole_correction():
    # smooth non-axisymmetric integrand, exact value from the axisym part
    exact = 2 * np.pi * (np.e - 1 / np.e)   # the cos(2 phi) term integrates to 0
    errs = []
    for nt in (32, 64):
        g = ds.LatLongGrid(nt, 2 * nt)
        f = (np.exp(np.cos(g.theta))[:, None]
             + 0.3 * np.sin(g.theta)[:, None] ** 2 * np.cos(2 * g.phi)[None, :])
        errs.append(abs(ds.integrate(f, g) - exact))
    assert errs[1] < errs[0] / 8     # better than O(h^3)
    assert errs[1] < 1e-6


def test_axisym_jet_analytic_oracle():
    g = ds.AxisymGrid(3, 401)
    t = g.theta
    f = np.cos(2 * t)
    j = ds.sphere_jet(f, g)
    assert np.max(np.abs(j.g1 + 2 * np.sin(2 * t))) < 2e-4
    assert np.max(np.abs(j.h11 + 4 * np.cos(2 * t))) < 2e-4
    # angular entry: cot(t) f' in the interior, f'' at the poles
    interior = slice(1, -1)
    ang = -2 * np.sin(2 * t[interior]) / np.tan(t[interior])
    assert np.max(np.abs(j.h22[interior] - ang)) < 2e-4
    assert j.h22[0] == pytest.approx(j.h11[0], rel=1e-10)
    assert j.g2[0] == 0.0


def test_axisym_jet_second_order():
    errs = []
    for m in (101, 201, 401):
        g = ds.AxisymGrid(3, m)
        j = ds.sphere_jet(np.cos(2 * g.theta), g)
        errs.append(np.max(np.abs(j.h11 + 4 * np.cos(2 * g.theta))))
    order = np.log2(errs[0] / errs[1])
    assert 1.8 < order < 2.2


def test_latlong_jet_analytic_oracle():
    g = ds.LatLongGrid(64, 128)
    th = g.theta[:, None]
    ph = g.phi[None, :]
    f = np.sin(th) ** 2 * np.cos(2 * ph) + np.cos(th)
    j = ds.sphere_jet(f, g)
    f_t = 2 * np.sin(th) * np.cos(th) * np.cos(2 * ph) - np.sin(th)
    f_p = -2 * np.sin(th) ** 2 * np.sin(2 * ph)
    f_tt = 2 * np.cos(2 * th) * np.cos(2 * ph) - np.cos(th)
    f_tp = -4 * np.sin(th) * np.cos(th) * np.sin(2 * ph)
    f_pp = -4 * np.sin(th) ** 2 * np.cos(2 * ph)
    st, ct = np.sin(th), np.cos(th)
    assert np.max(np.abs(j.g1 - f_t)) < 1e-5
    assert np.max(np.abs(j.g2 - f_p / st)) < 1e-5
    assert np.max(np.abs(j.h11 - f_tt)) < 1e-5
    assert np.max(np.abs(j.h12 - (f_tp - ct / st * f_p) / st)) < 5e-5
    assert np.max(np.abs(j.h22 - (f_pp + st * ct * f_t) / st ** 2)) < 1e-5


def test_jets_vanish_on_constants():
    for g in (ds.AxisymGrid(3, 101), ds.LatLongGrid(16, 32)):
        j = ds.sphere_jet(np.full(g.shape, 1.7), g)
        # the 1/sin^2(theta) frame factors amplify rounding at the pole rows,
        # so "vanishes" means below the 1e-12 stationarity budget
        for comp in (j.g1, j.g2, j.h11, j.h12, j.h22):
            assert np.max(np.abs(comp)) < 1e-12


def test_jet_rejects_bad_input():
    g = ds.AxisymGrid(3, 101)
    with pytest.raises(DomainError):
        ds.sphere_jet(np.ones(100), g)
    bad = np.ones(101)
    bad[3] = np.nan
    with pytest.raises(DomainError):
        ds.sphere_jet(bad, g)


def test_snapshot_round_trip_axisym(tmp_path):
    g = ds.AxisymGrid(3, 101)
    rho = 1.0 + 0.1 * np.cos(2 * g.theta)
    path = tmp_path / "snap.txt"
    ds.write_snapshot(str(path), g, rho)
    g2, rho2 = ds.read_snapshot(str(path))
    assert g2 == g
    assert np.array_equal(rho2, rho)     # %.17g is lossless for doubles


def test_snapshot_round_trip_latlong(tmp_path):
    g = ds.LatLongGrid(16, 32)
    rng = np.random.default_rng(5)
    rho = 1.0 + 0.01 * rng.standard_normal(g.shape)
    path = tmp_path / "snap.txt"
    ds.write_snapshot(str(path), g, rho)
    g2, rho2 = ds.read_snapshot(str(path))
    assert g2 == g
    assert np.array_equal(rho2, rho)


def test_snapshot_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "snap.txt"
    g = ds.AxisymGrid(3, 101)
    ds.write_snapshot(str(path), g, np.ones(101))
    lines = path.read_text().splitlines()
    lines[5] = "not a number"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SnapshotError) as exc:
        ds.read_snapshot(str(path))
    assert exc.value.lineno == 6

    path.write_text("WRONG MAGIC\n")
    with pytest.raises(SnapshotError):
        ds.read_snapshot(str(path))
