import numpy as np
import pytest

import cq


def test_backward_euler_resolvent_weights_closed_form():
    kappa, n = 0.1, 64
    w = cq.weights("resolvent:-1", "be", kappa, n)
    assert w.shape == (n + 1, 1, 1)
    exact = kappa / (1.0 + kappa) ** (np.arange(n + 1) + 1)
    assert np.max(np.abs(w[:, 0, 0] - exact)) <= 1e-8


def test_convolution_paths_agree():
    kappa, n = 10.0 / 127, 127
    t = kappa * np.arange(n + 1)
    g = (t**5 * np.exp(-2 * t)).reshape(-1, 1)
    ref = cq.convolve("resolvent:-1", "bdf2", kappa, g, path="direct")
    for path in ("fft", "all-steps"):
        y = cq.convolve("resolvent:-1", "bdf2", kappa, g, path=path)
        assert np.max(np.abs(y - ref)) <= 1e-8 * np.max(np.abs(ref))


def test_solvers_invert_the_convolution():
    kappa, n = 10.0 / 63, 63
    t = kappa * np.arange(n + 1)
    g = (t**5 * np.exp(-2 * t)).reshape(-1, 1)
    h = cq.convolve("resolvent:-1", "be", kappa, g, path="direct")
    for solver in ("marching", "all-steps", "look-ahead"):
        y = cq.solve("resolvent:-1", "be", kappa, h, solver=solver, block=8)
        assert np.max(np.abs(y - g)) <= 1e-7 * np.max(np.abs(g))


def test_bessel_values_and_vectorization():
    assert abs(cq.k0(1.0) - 0.42102443824070834) <= 1e-15
    assert abs(cq.k1(1.0) - 0.60190723019723457) <= 1e-15
    z = np.array([1.0, 2.0 + 3.0j, 2.0 - 3.0j])
    values = cq.k0(z)
    assert values.shape == (3,)
    assert values[2] == np.conj(values[1])


def test_convergence_orders():
    report = cq.convergence(scheme="bdf2", kappa=0.05, symbol="oscillator:1")
    assert report["min_order"] >= 1.8
    assert len(report["rows"]) == 4
    assert report["rows"][0]["order"] is None
    assert report["csv"].splitlines()[0].startswith("#")


def test_errors_carry_the_category():
    with pytest.raises(cq.CqError, match="^invalid-argument: "):
        cq.weights("resolvent:-1", "be", -1.0, 8)
    with pytest.raises(cq.CqError, match="^invalid-argument: "):
        cq.convergence(scheme="rk4")
    with pytest.raises(cq.CqError, match="multistep"):
        cq.weights("resolvent:-1", "radau3", 0.1, 8)


def test_worker_count_does_not_change_results():
    kappa, n = 0.05, 100
    t = kappa * np.arange(n + 1)
    g = (t**5 * np.exp(-t)).reshape(-1, 1)
    cq.set_workers(1)
    a = cq.convolve("power:0.5", "bdf2", kappa, g)
    cq.set_workers(3)
    b = cq.convolve("power:0.5", "bdf2", kappa, g)
    cq.set_workers(1)
    assert np.array_equal(a, b)


def test_scatter_writes_files(tmp_path):
    d = cq.scatter(out=str(tmp_path), boundary_points=16, kappa=0.15625, steps=64, scheme="bdf2")
    assert d["first_arrival"] == pytest.approx(2.0)
    assert d["peak_density"] > 0
    assert (tmp_path / "eta.csv").exists()
