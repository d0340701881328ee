"""Benchmark definitions: reference solutions, data generation, step models."""

import math

import numpy as np
import pytest

from gppde.errors import OracleError
from gppde.gp import GaussianState, assemble
from gppde.kernels import kernel_value
from gppde.problems import (
    PROBLEM_NAMES,
    analytic_solution,
    artificial_points,
    burgers_reference,
    error_grid,
    initial_data,
    make_problem,
    make_step_model,
)

NU = 0.01 / math.pi


def exact_state(problem, seed=0):
    """Zero-covariance state holding the exact solution at artificial points."""
    locs = artificial_points(problem, seed)
    mean = np.concatenate(
        [analytic_solution(problem, locs[f], 0.0)[f] for f in problem.fields]
    )
    n = mean.shape[0]
    return GaussianState(locations=locs, mean=mean, cov=np.zeros((n, n)))


def test_make_problem_defaults_and_overrides():
    p = make_problem("burgers")
    assert p.nu == pytest.approx(NU)
    assert p.domain == ((-1.0, 1.0),)
    assert p.fields == ("u",)
    q = make_problem("burgers", dt=0.05, sigma0=0.1)
    assert (q.dt, q.sigma0) == (0.05, 0.1)
    assert q.nu == p.nu
    # the default state size shrinks under observation noise
    assert p.n_artificial == {"u": 101}
    assert q.n_artificial == {"u": 31}
    assert make_problem("burgers", sigma0=0.1, n_artificial={"u": 60}).n_artificial == {
        "u": 60
    }
    w = make_problem("wave")
    assert w.fields == ("u", "v")
    assert w.n_data == {"u": 51, "v": 49}
    h = make_problem("heat")
    assert h.ndim == 2 and h.n_boundary == 3
    assert h.n_artificial == {"u": 20}
    with pytest.raises(ValueError):
        make_problem("kdv")
    with pytest.raises(TypeError):
        make_problem("wave", not_a_field=1)
    assert set(PROBLEM_NAMES) == {"burgers", "wave", "advection", "heat"}


def test_burgers_reference_initial_and_small_time():
    x = np.linspace(-1.0, 1.0, 11)
    np.testing.assert_allclose(burgers_reference(x, 0.0, NU), -np.sin(np.pi * x))
    # first-order expansion u0 + t (nu u0'' - u0 u0') at tiny t
    xs = np.array([-0.73, -0.2, 0.4, 0.81])
    eps = 1e-4
    rhs = NU * np.pi**2 * np.sin(np.pi * xs) - np.pi * np.sin(np.pi * xs) * np.cos(
        np.pi * xs
    )
    want = -np.sin(np.pi * xs) + eps * rhs
    np.testing.assert_allclose(burgers_reference(xs, eps, NU), want, atol=1e-6)


def test_burgers_reference_symmetry_and_node_check():
    x = np.linspace(0.05, 0.95, 7)
    for t in (0.1, 0.5, 1.0):
        u_pos = burgers_reference(x, t, NU)
        u_neg = burgers_reference(-x, t, NU)
        np.testing.assert_allclose(u_neg, -u_pos, atol=1e-12)
    with pytest.raises(OracleError):
        burgers_reference(x, 0.5, NU, nodes=(2, 200))


@pytest.mark.parametrize("t", [0.07, 0.31])
def test_wave_solution_satisfies_system(t):
    p = make_problem("wave")
    x = np.linspace(0.1, 0.9, 9)
    h = 1e-5
    up = analytic_solution(p, x, t + h)
    um = analytic_solution(p, x, t - h)
    now = analytic_solution(p, x, t)
    u_t = (up["u"] - um["u"]) / (2 * h)
    v_t = (up["v"] - um["v"]) / (2 * h)
    u_xx = (
        analytic_solution(p, x + h, t)["u"]
        - 2 * now["u"]
        + analytic_solution(p, x - h, t)["u"]
    ) / h**2
    np.testing.assert_allclose(u_t, now["v"], atol=1e-5)
    np.testing.assert_allclose(v_t, u_xx, atol=1e-3)
    z = analytic_solution(p, x, 0.0)
    np.testing.assert_allclose(z["u"], 0.5 * np.sin(np.pi * x), atol=1e-14)
    np.testing.assert_allclose(z["v"], np.pi * np.sin(3 * np.pi * x), atol=1e-13)


def test_advection_and_heat_solutions_satisfy_pdes():
    h = 1e-5
    p = make_problem("advection")
    x = np.linspace(0.05, 0.95, 9)
    t = 0.4
    u_t = (
        analytic_solution(p, x, t + h)["u"] - analytic_solution(p, x, t - h)["u"]
    ) / (2 * h)
    u_x = (
        analytic_solution(p, x + h, t)["u"] - analytic_solution(p, x - h, t)["u"]
    ) / (2 * h)
    np.testing.assert_allclose(u_t, -u_x, atol=1e-5)
    # periodicity of the exact solution
    np.testing.assert_allclose(
        analytic_solution(p, np.array([0.0]), t)["u"],
        analytic_solution(p, np.array([1.0]), t)["u"],
        atol=1e-14,
    )

    q = make_problem("heat")
    pts = np.array([[0.3, 0.4], [0.7, 0.9], [0.55, 0.21]])
    t = 0.13
    u_t = (
        analytic_solution(q, pts, t + h)["u"] - analytic_solution(q, pts, t - h)["u"]
    ) / (2 * h)
    lap = np.zeros(len(pts))
    for d in range(2):
        e = np.zeros(2)
        e[d] = h
        lap += (
            analytic_solution(q, pts + e, t)["u"]
            - 2 * analytic_solution(q, pts, t)["u"]
            + analytic_solution(q, pts - e, t)["u"]
        ) / h**2
    np.testing.assert_allclose(u_t, lap, atol=1e-4)


def test_initial_data_seeding_and_noise():
    p = make_problem("advection")
    d1 = initial_data(p, seed=3)
    d2 = initial_data(p, seed=3)
    np.testing.assert_array_equal(d1["u"][0], d2["u"][0])
    np.testing.assert_array_equal(d1["u"][1], d2["u"][1])
    x, y = d1["u"]
    assert x.shape == (25,) and np.all((x >= 0) & (x <= 1))
    np.testing.assert_allclose(y, np.sin(2 * np.pi * x), atol=1e-14)

    noisy = initial_data(make_problem("advection", sigma0=0.05), seed=3)
    dev = noisy["u"][1] - np.sin(2 * np.pi * noisy["u"][0])
    assert 0.0 < np.max(np.abs(dev)) < 5 * 0.05
    # artificial points are a separate draw from the data locations, and
    # every step draws fresh ones
    a = artificial_points(p, seed=3, step=1)
    assert a["u"].shape == (25,)
    assert not np.allclose(a["u"], x)
    b = artificial_points(p, seed=3, step=2)
    assert not np.allclose(a["u"], b["u"])
    np.testing.assert_array_equal(
        artificial_points(p, seed=3, step=2)["u"], b["u"]
    )


def test_error_grid_shapes():
    assert error_grid(make_problem("wave")).shape == (256,)
    g = error_grid(make_problem("heat"))
    assert g.shape == (1024, 2)
    assert g.min() >= 0.0 and g.max() <= 1.0


def test_burgers_step_model_wiring():
    p = make_problem("burgers", n_artificial={"u": 50})
    model = make_step_model(p)
    with pytest.raises(ValueError):
        model.kernel(0.01)
    bk = model.kernel(0.01, {"u": lambda x: np.zeros_like(x)})
    assert set(bk.labels) == {"u_n", "u_nm1"}
    assert bk.noise["u_nm1"] == 1e-8  # noiseless run: fixed tiny noise
    prev = exact_state(p)
    data = model.training_set(prev)
    assert set(data.blocks) == {"u_nm1", "u_n"}
    np.testing.assert_array_equal(data.from_state["u_nm1"], np.arange(50))
    np.testing.assert_array_equal(data.blocks["u_n"][0], [-1.0, 1.0])
    [(fld, lbl, x)] = model.targets(artificial_points(p, seed=0, step=2))
    assert (fld, lbl) == ("u", "u_n") and x.shape == (50,)

    noisy_model = make_step_model(make_problem("burgers", sigma0=0.05))
    bk2 = noisy_model.kernel(0.01, {"u": lambda x: np.zeros_like(x)})
    assert bk2.noise["u_nm1"] == "s_art"
    assert "s_art" in bk2.param_names


def test_wave_step_model_wiring():
    p = make_problem("wave")
    model = make_step_model(p)
    prev = exact_state(p, seed=1)
    data = model.training_set(prev)
    assert set(data.blocks) == {"u_nm1", "v_nm1", "u_n"}
    np.testing.assert_array_equal(data.from_state["u_nm1"], np.arange(51))
    np.testing.assert_array_equal(data.from_state["v_nm1"], np.arange(51, 100))
    targets = model.targets(artificial_points(p, seed=1, step=2))
    assert [(f, l) for f, l, _ in targets] == [("u", "u_n"), ("v", "v_n")]


def test_advection_step_model_shares_one_noise_parameter():
    p = make_problem("advection", sigma0=0.05)
    model = make_step_model(p)
    bk = model.kernel(p.dt)
    # three artificial relations share one trainable noise parameter
    assert [bk.noise[l] for l in ("u3", "u2", "u1")] == ["s_art"] * 3
    assert sum(n == "s_art" for n in bk.param_names) == 1
    assert len(bk.param_names) == 7  # three SE priors and the shared noise
    for lbl in ("b_np1", "b_tau2", "b_tau1"):
        assert bk.noise[lbl] == 0.0
        assert lbl in bk.functionals
    prev = exact_state(p, seed=2)
    data = model.training_set(prev)
    for lbl in ("u3", "u2", "u1"):
        np.testing.assert_array_equal(data.blocks[lbl][1], prev.mean)
        np.testing.assert_array_equal(data.from_state[lbl], np.arange(25))
    assert data.blocks["b_np1"][0].shape == (1,)


def test_heat_step_model_boundary_geometry_and_derivative_rows():
    p = make_problem(
        "heat", n_data={"u": 50}, n_artificial={"u": 50}, n_boundary=10
    )
    model = make_step_model(p)
    bk = model.kernel(p.dt)
    dirichlet, neumann = model._edges()
    assert dirichlet.shape == (30, 2) and neumann.shape == (10, 2)
    # no duplicated boundary points within the Dirichlet set
    assert len(np.unique(dirichlet, axis=0)) == 30
    assert np.all(neumann[:, 1] == 1.0)

    # derivative rows differentiate the second coordinate of the left argument
    priors, _ = bk.unpack(bk.theta0())
    xa = np.array([[0.2, 1.0], [0.8, 1.0]])
    xb = np.array([[0.3, 0.5], [0.6, 0.1], [0.9, 0.7]])
    got = bk.block("v_n", "u_tau1", xa, xb, priors)
    want = kernel_value(
        priors["s1"], xa[:, None, :], xb[None, :, :], ((0, 1), (0, 0))
    )
    np.testing.assert_allclose(got, want, rtol=1e-12)

    # the middle artificial relation duplicates the endpoint one exactly
    np.testing.assert_allclose(
        bk.block("u2", "u1", xb, xb, priors),
        bk.block("u3", "u1", xb, xb, priors),
        rtol=1e-13,
    )
    data = model.training_set(exact_state(p, seed=4))
    assert set(data.blocks) == {"u3", "u1", "u_np1", "u_tau1", "v_np1", "v_n"}
    K = assemble(bk, data, bk.theta0())
    assert K.shape == (180, 180)
    lo = float(np.linalg.eigvalsh(K)[0])
    assert lo > -1e-8 * float(np.max(np.diag(K)))
