import math
from pathlib import Path

import numpy as np
import pytest

import geotess

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def test_mesh_and_density():
    mesh = geotess.Mesh.rect(0, 1, 0, 1, 0.01)
    assert len(mesh) == mesh.centroids.shape[0]
    assert mesh.total_area == pytest.approx(1.0)
    assert mesh.max_area <= 0.01 + 1e-15
    rho = geotess.Density.uniform(mesh).rho
    assert float(np.dot(rho, mesh.areas)) == pytest.approx(1.0)
    again = geotess.Mesh.parse(mesh.format())
    assert np.array_equal(again.vertices, mesh.vertices)


def test_metric_values():
    assert geotess.Metric.euclidean().hamiltonian((0, 0), (3, 4)) == pytest.approx(5.0)
    assert geotess.Metric.minkowski(1.0).hamiltonian((0, 0), (1, 1)) == pytest.approx(1.0)
    assert geotess.Metric.chebyshev().gauge((0, 0), (1, -2)) == pytest.approx(2.0)
    pts = geotess.Metric.euclidean().control_boundary((0, 0), 8)
    assert pts.shape == (8, 2)
    with pytest.raises(geotess.InvalidArgument):
        geotess.Metric.euclidean().control_boundary((0, 0), 4)


def test_solve_and_shift_covariance():
    mesh = geotess.Mesh.rect(0, 1, 0, 1, 0.002)
    solver = geotess.EikonalSolver(mesh, geotess.Metric.euclidean())
    src = mesh.nearest_node((0.5, 0.5))
    base = solver.solve(src)
    exact = np.hypot(*(mesh.centroids - mesh.centroids[src]).T)
    assert np.max(np.abs(base.values - exact)) <= 0.05
    shifted = solver.solve(src, -0.3)
    assert np.array_equal(shifted.values, base.values - 0.3)
    fm = solver.solve(src, solver="fast-marching")
    assert np.max(np.abs(fm.values - base.values)) <= 1e-8
    with pytest.raises(geotess.UnsupportedMetric):
        geotess.EikonalSolver(mesh, geotess.Metric.chebyshev()).solve(src, solver="fast-marching")


def test_cvt_single_generator_reaches_mass_centroid():
    mesh = geotess.Mesh.rect(0, 1, 0, 1, 0.005)
    density = geotess.Density.gaussian(mesh, (0.3, 0.6), (0.05, 0.0, 0.08))
    t = geotess.run_cvt(mesh, geotess.Metric.euclidean(), density, [(0.8, 0.2)])
    mass = density.rho * mesh.areas
    mean = (mesh.centroids * mass[:, None]).sum(axis=0) / mass.sum()
    assert t.converged
    assert np.allclose(t.mu[0], mean, atol=1e-12)
    assert set(np.unique(t.labels)) == {0}


def test_power_capacities():
    mesh = geotess.Mesh.rect(0, 1, 0, 1, 0.005)
    density = geotess.Density.uniform(mesh)
    c = [0.7, 0.3]
    t = geotess.run_capacity_cvt(mesh, geotess.Metric.euclidean(), density, [(0.3, 0.5), (0.7, 0.5)], c, tol_cap=0.01)
    assert not t.infeasible
    assert np.max(np.abs(t.capacities - c)) <= 0.01
    assert min(t.weights) == 0.0


def test_run_config_matches_cli_report():
    text = (CONFIGS / "test5_k6.ini").read_text()
    t, report = geotess.run_config(text)
    assert '"max_capacity_gap"' in report
    assert t.K == 6
    assert geotess.format_config(geotess.format_config(text)) == geotess.format_config(text)
    with pytest.raises(geotess.InvalidArgument):
        geotess.run_config("[run]\nmode = cvt\n[cvt]\nmu0 = 0.5 0.5\n[bogus]\nx = 1\n")
