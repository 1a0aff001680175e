import numpy as np
import pytest

from rgcg.sphere import (
    SphereSubproblemConfig,
    linearized_gradient,
    solve_l1_sphere,
    sph_exp,
    sph_gap_subproblem,
    sph_log,
    sph_parallel_transport,
    sph_transport_back,
)

E = np.eye(3)


def l1_sphere_objective(y, x, lam):
    return np.sum((y - x) ** 2, axis=-1) / (2 * lam) + np.abs(y).sum(axis=-1)


def random_unit(rng, m, n):
    u = rng.standard_normal((m, n))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def test_exp_examples():
    np.testing.assert_array_equal(sph_exp(E[0], np.zeros(3)), E[0])
    np.testing.assert_allclose(sph_exp(E[0], np.pi / 2 * E[1]), E[1], atol=1e-15)
    np.testing.assert_allclose(sph_exp(E[0], np.pi * E[1]), -E[0], atol=1e-15)


def test_exp_unit_norm(rng):
    for _ in range(200):
        x = random_unit(rng, 1, 7)[0]
        eta = rng.standard_normal(7) * rng.uniform(0, 5)
        eta -= (x @ eta) * x
        assert abs(np.linalg.norm(sph_exp(x, eta)) - 1) <= 1e-12


def test_exp_small_step_series():
    x = E[0]
    eta = 1e-10 * E[1]
    y = sph_exp(x, eta)
    np.testing.assert_allclose(y, [1.0, 1e-10, 0.0], atol=1e-20)


def test_log_examples():
    np.testing.assert_array_equal(sph_log(E[0], E[0]), np.zeros(3))
    np.testing.assert_allclose(sph_log(E[0], E[1]), np.pi / 2 * E[1], atol=1e-15)


def test_log_norm_is_angle_and_round_trip(rng):
    for _ in range(100):
        x, y = random_unit(rng, 2, 5)
        v = sph_log(x, y)
        assert np.linalg.norm(v) == pytest.approx(np.arccos(np.clip(x @ y, -1, 1)), abs=1e-10)
        assert np.linalg.norm(sph_exp(x, v) - y) <= 1e-8


def test_transport_examples():
    eta = np.pi / 2 * E[1]
    np.testing.assert_allclose(sph_parallel_transport(E[0], eta, E[2]), E[2], atol=1e-15)
    out = sph_parallel_transport(E[0], eta, E[1])
    np.testing.assert_allclose(out, -E[0], atol=1e-15)


def test_transport_isometric(rng):
    for _ in range(100):
        x = random_unit(rng, 1, 6)[0]
        eta, xi = rng.standard_normal((2, 6)) * 2
        eta -= (x @ eta) * x
        xi -= (x @ xi) * x
        out = sph_parallel_transport(x, eta, xi)
        y = sph_exp(x, eta)
        assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(xi), abs=1e-10)
        assert abs(y @ out) <= 1e-10


def test_transport_back_is_adjoint(rng):
    for _ in range(100):
        x = random_unit(rng, 1, 6)[0]
        eta, zeta, w = rng.standard_normal((3, 6))
        eta -= (x @ eta) * x
        zeta -= (x @ zeta) * x
        y = sph_exp(x, eta)
        w -= (y @ w) * y
        lhs = sph_transport_back(x, eta, w) @ zeta
        rhs = w @ sph_parallel_transport(x, eta, zeta)
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_l1_sphere_worked_example(rng):
    x = np.array([2.0, 0.05, -1.5])
    y = solve_l1_sphere(x, 1.0)
    np.testing.assert_allclose(y, np.array([1.0, 0.0, -0.5]) / np.sqrt(1.25), atol=1e-15)
    # global optimality: Monte Carlo probes plus a local search around the best probe
    probes = random_unit(rng, 100_000, 3)
    vals = l1_sphere_objective(probes, x, 1.0)
    best = probes[np.argmin(vals)]
    for scale in (1e-2, 1e-3, 1e-4):
        cand = best + scale * rng.standard_normal((2000, 3))
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        cv = l1_sphere_objective(cand, x, 1.0)
        if cv.min() < l1_sphere_objective(best, x, 1.0):
            best = cand[np.argmin(cv)]
    assert l1_sphere_objective(y, x, 1.0) <= l1_sphere_objective(best, x, 1.0) + 1e-9


def test_l1_sphere_all_thresholded():
    np.testing.assert_array_equal(solve_l1_sphere(np.array([0.3, -0.2]), 0.5), [1.0, 0.0])
    np.testing.assert_array_equal(solve_l1_sphere(np.array([-0.2, 0.3]), 0.5), [0.0, 1.0])
    np.testing.assert_array_equal(solve_l1_sphere(np.array([-0.3, 0.3]), 0.5), [-1.0, 0.0])


def test_l1_sphere_single_coordinate():
    np.testing.assert_array_equal(solve_l1_sphere(3.0 * E[0], 1.0), E[0])


def test_linearized_gradient_finite_differences(rng):
    lam = 0.3
    for _ in range(20):
        x = random_unit(rng, 1, 5)[0]
        g = rng.standard_normal(5)
        g -= (x @ g) * x
        y = random_unit(rng, 1, 5)[0]
        if x @ y < -0.9:
            y = -y

        def h(z):
            t = x @ z
            return np.arccos(t) / np.sqrt(1 - t * t) * (g @ z) / lam

        v = rng.standard_normal(5)
        v -= (y @ v) * y
        v /= np.linalg.norm(v)
        step = 1e-6
        fd = (h(y + step * v) - h(y - step * v)) / (2 * step)
        an = linearized_gradient(x, g, y) @ v / lam
        assert abs(fd - an) <= 1e-5 * max(1.0, abs(an))


def test_linearized_gradient_series_branch():
    x = E[0]
    g = np.array([0.0, 1.0, -2.0])
    y = np.array([1.0, 1e-4, 0.0])
    y /= np.linalg.norm(y)
    # series branch and closed form agree where both are accurate
    t = x @ y
    a = np.arccos(t) / np.sqrt(1 - t * t)
    np.testing.assert_allclose(linearized_gradient(x, g, y)[1:], a * g[1:], rtol=1e-7)
    np.testing.assert_allclose(linearized_gradient(x, g, x), g - (0.0) * x)


def _l1(lam):
    return lambda y: lam * np.abs(y).sum()


def test_gap_zero_gradient_at_g_minimizer():
    x = E[0]
    res = sph_gap_subproblem(x, np.zeros(3), _l1(0.5), SphereSubproblemConfig(lam=0.5))
    assert res.theta == 0.0
    np.testing.assert_array_equal(res.p, x)
    np.testing.assert_array_equal(res.d, np.zeros(3))


def test_gap_nonpositive_and_consistent(rng):
    for _ in range(50):
        n = rng.integers(2, 30)
        x = random_unit(rng, 1, n)[0]
        g = rng.standard_normal(n) * rng.uniform(0, 5)
        g -= (x @ g) * x
        lam = rng.uniform(0.01, 1)
        res = sph_gap_subproblem(x, g, _l1(lam), SphereSubproblemConfig(lam=lam))
        assert res.theta <= 0
        assert np.linalg.norm(sph_exp(x, res.d) - res.p) <= 1e-8
        if res.theta == 0:
            np.testing.assert_array_equal(res.p, x)


def _probe_instance(rng, lam):
    A = rng.standard_normal((3, 3))
    G = A.T @ A
    x = random_unit(rng, 1, 3)[0]
    grad = -2 * (G @ x)
    grad -= (x @ grad) * x
    probes = random_unit(rng, 10_000, 3)
    probes = probes[probes @ x > -1 + 1e-8]
    vals = [grad @ sph_log(x, u) + lam * np.abs(u).sum() - lam * np.abs(x).sum() for u in probes]
    return x, grad, min(vals)


@pytest.mark.xfail(
    strict=True,
    reason="the gap infimum sits at the antipode; ten fixed-point steps only creep toward it",
)
def test_gap_beats_random_probes_default_config(rng):
    lam = 0.1
    x, grad, probe_min = _probe_instance(rng, lam)
    res = sph_gap_subproblem(x, grad, _l1(lam), SphereSubproblemConfig(lam=lam))
    assert res.theta <= probe_min + 1e-6


def test_gap_creeps_toward_antipode(rng):
    # more outer steps keep lowering theta and eventually beat the probes
    lam = 0.1
    x, grad, probe_min = _probe_instance(rng, lam)
    thetas = [
        sph_gap_subproblem(x, grad, _l1(lam), SphereSubproblemConfig(lam=lam, max_outer_iters=m)).theta
        for m in (1, 10, 200)
    ]
    assert thetas[0] >= thetas[1] >= thetas[2]
    assert thetas[2] <= probe_min + 1e-6
    # <grad, log_x(u)> >= -pi |grad| and |u|_1 >= 1 on the sphere
    bound = -np.pi * np.linalg.norm(grad) + lam * (1.0 - np.abs(x).sum())
    assert thetas[2] >= bound
