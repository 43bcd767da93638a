import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pliag import diagnostics as dg
from pliag import kernels as kn
from pliag import problems as pb
from pliag.errors import DomainViolation, InvalidData, InvalidRadius, SingularInput
from pliag.suites import demo_lasso, demo_poisson, demo_quartic

from test_kernels import central_diff


def bundled():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((3, 4))
    return {
        "lasso": (demo_lasso(), lambda n, r: r.uniform(-2, 2, (n, 5))),
        "poisson": (demo_poisson(), lambda n, r: r.uniform(0.05, 5, (n, 3))),
        "poisson_ridge": (pb.make_poisson_elastic_net([[1.0, 0.5], [0.2, 1.0]], [1.0, 2.0],
                                                      beta=0.3, mu_l1=0.1),
                          lambda n, r: r.uniform(0.05, 5, (n, 2))),
        "quartic": (demo_quartic(), lambda n, r: r.uniform(-3, 3, (n, 2))),
        "quartic_split": (pb.make_quartic_problem(np.eye(2), [[1.0, 2.0]], np.eye(2), [0.5],
                                                  [1.0, 0.0], split=True),
                          lambda n, r: r.uniform(-3, 3, (n, 2))),
        "dual_cs": (pb.make_dual_cs(A, rng.standard_normal(3), 1.0, 0.2),
                    lambda n, r: r.uniform(-3, 3, (n, 3))),
        "holder_toy": (pb.make_holder_toy(0.1), lambda n, r: r.uniform(-1, 1, (n, 1))),
    }


BUNDLED = bundled()


# -- examples -------------------------------------------------------------------

def test_objective_examples():
    assert pb.make_lasso(np.eye(2), [0.0, 0.0], 1.0, 1.0).objective(np.zeros(2)) == 0.0
    assert pb.make_lasso([[1.0]], [1.0], 0.5, 2.0).objective(np.array([1.0])) == 0.5
    assert pb.make_holder_toy(0.1).objective(np.array([1.0])) == pytest.approx(1.1)


def test_objective_outside_ball_is_infinite():
    p = pb.make_lasso([[1.0]], [1.0], 0.5, 2.0)
    assert p.objective(np.array([3.0])) == np.inf


def test_objective_domain_violation():
    p = pb.make_poisson_elastic_net([[1.0]], [1.0])
    with pytest.raises(DomainViolation):
        p.objective(np.array([-1.0]))


def test_lasso_examples():
    p = pb.make_lasso([[1.0]], [0.0], 1.0, 1.0)
    np.testing.assert_array_equal(p.solutions, [[0.0]])
    assert p.optimal_value == 0.0
    p = pb.make_lasso([[1.0]], [2.0], 1.0, 3.0)
    assert p.solutions[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert p.optimal_value == pytest.approx(1.5, abs=1e-12)
    # ||b||^2/(2 lam) = 4 for this instance, so the radius must exceed 4
    p = pb.make_lasso(np.eye(2), [2.0, -2.0], 1.0, 4.5)
    np.testing.assert_allclose(p.solutions[0], [1.0, -1.0], atol=1e-12)
    with pytest.raises(InvalidRadius):
        pb.make_lasso(np.eye(2), [2.0, -2.0], 1.0, 4.0)


def test_lasso_structure():
    p = demo_lasso()
    assert p.N == 5 and p.dim == 5
    assert p.kernel.name == "euclidean"
    assert p.regularizer.kind == "l1" and p.regularizer.radius == p.params["radius"]
    np.testing.assert_allclose(p.Ls, np.sum(p.params["A"] ** 2, axis=1))
    assert p.growth.mode == "quadratic" and p.growth.mu > 0


def test_poisson_examples():
    p = pb.make_poisson_elastic_net([[1.0]], [1.0])
    assert p.solutions[0, 0] == pytest.approx(1.0, abs=1e-10)
    assert p.optimal_value == pytest.approx(1.0, abs=1e-12)
    p = pb.make_poisson_elastic_net([[1.0]], [2.0])
    assert p.solutions[0, 0] == pytest.approx(2.0, abs=1e-10)
    assert p.optimal_value == pytest.approx(2 - 2 * np.log(2), abs=1e-12)
    p = pb.make_poisson_elastic_net([[1.0, 0.0], [0.0, 1.0]], [1.0, 2.5])
    assert p.params["L"] == 3.5 and p.L_sum == 3.5
    assert p.kernel.name == "burg" and p.kernel.quad == 0.0


def test_poisson_ridge_folds_into_kernel():
    p = pb.make_poisson_elastic_net([[1.0, 0.0], [0.0, 1.0]], [1.0, 3.0], beta=0.5)
    assert p.N == 3
    assert p.kernel.quad == pytest.approx(0.5 / 4.0)
    assert p.components[2].kind == "quadratic"


def test_poisson_invalid():
    with pytest.raises(InvalidData):
        pb.make_poisson_elastic_net([[0.0, 0.0]], [1.0])
    with pytest.raises(InvalidData):
        pb.make_poisson_elastic_net([[1.0, -1.0]], [1.0])
    with pytest.raises(InvalidData):
        pb.make_poisson_elastic_net([[1.0]], [0.0])


def test_quartic_examples():
    p = pb.make_quartic_problem(np.eye(2), np.zeros((1, 2)), np.eye(2), [0.0], [0.0, 0.0])
    assert p.params["L"] == pytest.approx(4.0, rel=1e-12)
    assert p.params["mu_relative"] == pytest.approx(1 / 3, rel=1e-12)
    np.testing.assert_allclose(p.solutions, [[0.0, 0.0]], atol=1e-14)
    assert p.optimal_value == pytest.approx(0.0, abs=1e-14)
    p = pb.make_quartic_problem([[2.0]], [[0.0]], [[1.0]], [0.0], [0.0])
    assert p.params["L"] == pytest.approx(49.0, rel=1e-10)
    assert p.params["mu_relative"] == pytest.approx(1.0)
    p = pb.make_quartic_problem([[1.0]], [[0.0]], [[3.0]], [0.0], [0.0])
    assert p.params["mu_relative"] == pytest.approx(1 / 3)


def test_quartic_singular():
    with pytest.raises(SingularInput):
        pb.make_quartic_problem(np.zeros((2, 2)), np.zeros((1, 2)), np.eye(2), [0.0], [0, 0])
    with pytest.raises(SingularInput):
        pb.make_quartic_problem(np.eye(2), np.zeros((1, 2)), [[1.0, 0.0]], [0.0], [0.0])


def test_quartic_split_matches_single():
    kw = dict(E=np.eye(2), A=[[1.0, 2.0]], C=np.eye(2), b=[0.5], d=[1.0, 0.0])
    one, three = pb.make_quartic_problem(**kw), pb.make_quartic_problem(**kw, split=True)
    assert three.N == 3 and one.N == 1
    assert three.L_sum == pytest.approx(one.L_sum)
    x = np.array([0.3, -1.2])
    assert three.objective(x) == pytest.approx(one.objective(x), rel=1e-14)
    np.testing.assert_allclose(three.solutions, one.solutions)


def test_shrink_examples():
    np.testing.assert_array_equal(pb.shrink([2.0, -0.5, 0.3], 1.0), [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(pb.shrink(np.zeros(3), 1.0), np.zeros(3))
    np.testing.assert_array_equal(pb.shrink([-3.0], 0.5), [-2.5])


def test_dual_cs_examples():
    p = pb.make_dual_cs(np.zeros((2, 3)), np.zeros(2), 1.0, 0.5)
    for x in (np.zeros(2), np.array([5.0, -3.0])):
        assert p.smooth_value(x) == 0.0
    assert p.optimal_value == 0.0

    A = np.array([[1.0, -1.0], [0.5, 2.0]])
    b = np.array([0.3, -0.7])
    p = pb.make_dual_cs(A, b, 2.0, 1.0)
    x = np.array([0.1, 0.2])
    assert np.all(np.abs(A.T @ x) <= 1.0)
    np.testing.assert_allclose(p.grad_F(x), -b)

    alpha, mu, t = 2.0, 0.5, 1.7
    p = pb.make_dual_cs([[1.0]], [alpha * (t - mu)], alpha, mu)
    assert p.solutions[0, 0] == pytest.approx(t, abs=1e-10)
    assert np.abs(p.grad_F(np.array([t]))[0]) <= 1e-12


def test_holder_toy_examples():
    p = pb.make_holder_toy(0.0)
    assert p.objective(np.array([0.5])) == 0.5 >= 0.5 * 0.25 ** 0.5
    assert p.objective(np.array([0.0])) == 0.0
    p = pb.make_holder_toy(0.1)
    assert p.objective(np.array([1.0])) == pytest.approx(1.1)
    assert p.growth.mode == "holder" and p.growth.theta == 0.5 and p.growth.mu == 1.0


def test_relative_smoothness_examples():
    half = pb.quadratic_component(0, [[1.0]], [0.0], 0.0, L=1.0)
    sampler = kn.uniform_pairs(-10, 10, 1)
    assert pb.relative_smoothness_margin(half, kn.euclidean(1), sampler, 1000, rng=0) >= -1e-12
    assert pb.relative_smoothness_margin(half, kn.euclidean(1), sampler, 1000, rng=0,
                                         L=0.5) < 0

    def bad(n, r):
        return -np.ones((n, 1)), np.ones((n, 1))
    with pytest.raises(DomainViolation):
        pb.relative_smoothness_margin(half, kn.burg(1), bad, 3)


def test_load_csv(tmp_path):
    (tmp_path / "A.csv").write_text("1,2\n3,4\n")
    (tmp_path / "b.csv").write_text("5\n6\n")
    np.testing.assert_array_equal(pb.load_matrix(tmp_path / "A.csv"), [[1, 2], [3, 4]])
    np.testing.assert_array_equal(pb.load_vector(tmp_path / "b.csv"), [5, 6])


def test_operator_norm(rng):
    M = rng.standard_normal((4, 3))
    assert pb.operator_norm(M) == pytest.approx(np.linalg.norm(M, 2), rel=1e-9)
    assert pb.operator_norm(np.zeros((2, 2))) == 0.0


def test_regularizer_values():
    assert pb.l1_positive_reg(0.5).value([1.0, 2.0]) == 1.5
    assert pb.l1_positive_reg(0.5).value([-1.0, 2.0]) == np.inf
    assert pb.box_reg([0, 0], [1, 1]).value([0.5, 2.0]) == np.inf
    assert pb.abs_reg(2.0).value([-1.0]) == 2.0
    with pytest.raises(ValueError):
        pb.Regularizer("l2")


# -- invariants over the bundled problems -------------------------------------------

@pytest.mark.parametrize("name", list(BUNDLED))
def test_gradients_match_finite_differences(name):
    problem, sampler = BUNDLED[name]
    rng = np.random.default_rng(0)
    xs = sampler(1000, rng)
    for comp in problem.components:
        worst = 0.0
        for x in xs:
            g = comp.grad(x)
            fd = central_diff(comp.value, x)
            worst = max(worst, np.linalg.norm(fd - g) / max(1.0, np.linalg.norm(g)))
        assert worst <= 1e-6, (comp.name, worst)


@pytest.mark.parametrize("name", list(BUNDLED))
def test_components_convex_on_samples(name):
    problem, sampler = BUNDLED[name]
    rng = np.random.default_rng(1)
    xs, ys = sampler(500, rng), sampler(500, rng)
    for comp in problem.components:
        for x, y in zip(xs, ys):
            mid = comp.value(0.5 * x + 0.5 * y)
            assert mid <= 0.5 * comp.value(x) + 0.5 * comp.value(y) + 1e-10


@pytest.mark.parametrize("name", list(BUNDLED))
def test_relative_smoothness_of_bundled_components(name):
    problem, sampler = BUNDLED[name]

    def pairs(n, r):
        return sampler(n, r), sampler(n, r)
    for comp in problem.components:
        margin = pb.relative_smoothness_margin(comp, problem.kernel, pairs, 10_000, rng=2)
        assert margin >= -1e-9, (comp.name, margin)


@pytest.mark.parametrize("name", list(BUNDLED))
def test_known_solutions_attain_optimal_value(name):
    problem, _ = BUNDLED[name]
    if problem.solutions is None:
        pytest.skip("minimizer not stored")
    for x in problem.solutions:
        assert problem.objective(x) == pytest.approx(problem.optimal_value, abs=1e-10)


@pytest.mark.parametrize("name", list(BUNDLED))
def test_declared_growth_holds(name):
    problem, sampler = BUNDLED[name]
    if problem.growth is None:
        pytest.skip("no growth record")
    rng = np.random.default_rng(4)
    if name == "lasso":
        # the growth region is the l1 ball
        dirs = rng.standard_normal((10_000, 5))
        dirs /= np.sum(np.abs(dirs), axis=1, keepdims=True)
        pts = dirs * problem.params["radius"] * rng.uniform(0, 1, (10_000, 1)) ** 3
    else:
        pts = sampler(10_000, rng)
    X, phi_star, g = problem.solutions, problem.optimal_value, problem.growth
    gap = np.array([problem.objective(p) for p in pts]) - phi_star
    if g.mode == "bregman":
        lower = g.mu * dg.min_bregman_to_set(problem.kernel, X, pts)
    else:
        dist = dg.distance_to_set(X, pts)
        lower = 0.5 * g.mu * dist ** (2 * g.theta)
    assert np.min(gap - lower) >= -1e-9


@given(arrays(np.float64, 4, elements=st.floats(-10, 10)),
       arrays(np.float64, 4, elements=st.floats(-10, 10)), st.floats(0.01, 5))
def test_shrink_is_one_lipschitz(s, t, mu):
    assert np.all(np.abs(pb.shrink(s, mu) - pb.shrink(t, mu)) <= np.abs(s - t) + 1e-15)


@given(arrays(np.float64, 5, elements=st.floats(-10, 10)), st.floats(0.1, 10))
def test_l1_projection(v, radius):
    p = pb.project_l1_ball(v, radius)
    assert np.sum(np.abs(p)) <= radius * (1 + 1e-12)
    # the projection is no farther than any sampled point of the ball
    rng = np.random.default_rng(0)
    q = rng.standard_normal((200, 5))
    q *= radius / np.maximum(np.sum(np.abs(q), axis=1, keepdims=True), radius)
    assert np.linalg.norm(v - p) <= np.min(np.linalg.norm(v - q, axis=1)) + 1e-9
