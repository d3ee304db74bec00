import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest

from ergm_exact.errors import InvalidInput, NoMLE, NonConvergence
from ergm_exact.geometry import Verdict, affine_geometry
from ergm_exact.graphspace import KINDS, realizable_set
from ergm_exact.likelihood import (
    FitConfig,
    concavity_probe,
    fit_mle,
    gradient,
    hessian,
    log_likelihood,
    log_normalizer,
    mean_statistic,
    perp_invariance_check,
    softmax_weights,
)
from oracles import central_difference, direct_log_likelihood, logit

U = np.array([0.0, 2.0, -3.0])


def exact_mean(rs):
    return tuple(sum(F(m) * p[c] for p, m in zip(rs.points, rs.multiplicities)) / rs.total for c in range(rs.n))


def test_log_normalizer_at_zero(tri3, edges3):
    assert log_normalizer([0, 0, 0], tri3) == pytest.approx(math.log(8), rel=1e-15)
    assert log_normalizer([0], edges3) == pytest.approx(math.log(8), rel=1e-15)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("theta", [-2.5, -0.3, 0.0, 1.0, 4.0])
def test_log_normalizer_edge_factorization(k, theta):
    rs = realizable_set(k, ["edges"])
    expected = math.comb(k, 2) * math.log1p(math.exp(theta))
    assert log_normalizer([theta], rs) == pytest.approx(expected, rel=1e-13)


def test_log_normalizer_four_terms(edges3):
    direct = math.log(1 + 3 * math.e + 3 * math.e ** 2 + math.e ** 3)
    assert log_normalizer([1.0], edges3) == pytest.approx(direct, rel=1e-15)


def test_log_normalizer_no_overflow(edges3):
    val = log_normalizer([1000.0], edges3)
    assert math.isfinite(val) and val == pytest.approx(3000.0, rel=1e-15)


def test_log_likelihood_examples(edges3):
    assert log_likelihood([0.0], ["5"], edges3) == pytest.approx(-math.log(8))
    # theta.t - 3 ln(1 + e^theta) at theta = ln 2
    expected = 1.5 * math.log(2) - 3 * math.log(3)
    val = log_likelihood([math.log(2)], ["3/2"], edges3)
    assert val == pytest.approx(expected, rel=1e-14)
    assert val == pytest.approx(direct_log_likelihood([math.log(2)], [F(3, 2)], 3, ("edges",)), rel=1e-14)


def test_log_likelihood_matches_direct_sum():
    kinds = ("edges", "triangles", "two_stars")
    rs = realizable_set(4, kinds)
    rng = np.random.default_rng(2)
    for _ in range(10):
        th = rng.normal(scale=0.4, size=3)
        t = [F(int(x), 3) for x in rng.integers(0, 30, size=3)]
        assert log_likelihood(th, t, rs) == pytest.approx(direct_log_likelihood(th, t, 4, kinds), rel=1e-12, abs=1e-12)


def test_mean_statistic_examples(edges3, tri3):
    assert mean_statistic([0.0], edges3) == pytest.approx([1.5], abs=1e-15)
    assert mean_statistic([0, 0, 0], tri3) == pytest.approx([1 / 8, 1.5, 1.0], abs=1e-15)
    assert exact_mean(tri3) == (F(1, 8), F(3, 2), F(1))
    assert mean_statistic([40.0], edges3)[0] == pytest.approx(3.0, abs=1e-15)


def test_softmax_weights_are_a_distribution():
    rng = np.random.default_rng(4)
    for k in (2, 3, 4, 5):
        rs = realizable_set(k, KINDS)
        for _ in range(10):
            w = softmax_weights(rng.normal(scale=3, size=rs.n), rs)
            assert abs(w.sum() - 1) <= 1e-14
            assert np.all((w >= 0) & (w <= 1))


def test_gradient_examples(edges3, tri3):
    assert gradient([0.0], ["3/2"], edges3) == pytest.approx([0.0], abs=1e-15)
    assert gradient([0, 0, 0], ["1/8", "3/2", "1"], tri3) == pytest.approx([0, 0, 0], abs=1e-15)


def _random_config(rng):
    k = int(rng.integers(2, 6))
    n = int(rng.integers(1, 4))
    kinds = tuple(rng.choice(KINDS, size=n, replace=False))
    rs = realizable_set(k, kinds)
    theta = rng.normal(scale=0.5, size=n)
    t = [F(int(x), 4) for x in rng.integers(0, 40, size=n)]
    return rs, theta, t


def test_gradient_finite_differences():
    rng = np.random.default_rng(13)
    rs = realizable_set(4, ["edges", "triangles"])
    th, t = rng.normal(size=2), ["5/2", "1/3"]
    fd = central_difference(lambda x: log_likelihood(x, t, rs), th)
    assert np.abs(fd - gradient(th, t, rs)).max() <= 1e-6 * max(1.0, np.abs(fd).max())
    for _ in range(50):
        rs, th, t = _random_config(rng)
        fd = central_difference(lambda x: log_likelihood(x, t, rs), th)
        g = gradient(th, t, rs)
        assert np.abs(fd - g).max() <= 1e-6 * max(1.0, np.abs(g).max())


def test_hessian_examples(edges3, tri3):
    assert hessian([0.0], edges3)[0, 0] == pytest.approx(-0.75, abs=1e-15)
    h = hessian([0.2, -0.4, 0.7], tri3)
    assert np.linalg.norm(h @ U) <= 1e-10 * np.linalg.norm(h) * np.linalg.norm(U)


def test_hessian_matches_gradient_differences():
    rng = np.random.default_rng(21)
    for _ in range(20):
        rs, th, t = _random_config(rng)
        fd = np.column_stack([
            central_difference(lambda x, i=i: gradient(x, t, rs)[i], th) for i in range(rs.n)
        ])
        assert np.abs(fd - hessian(th, rs)).max() <= 1e-6 * max(1.0, np.abs(fd).max())


def test_hessian_negative_semidefinite():
    rng = np.random.default_rng(17)
    for _ in range(50):
        rs, th, _ = _random_config(rng)
        h = hessian(th, rs)
        assert np.allclose(h, h.T, atol=0)
        assert np.linalg.eigvalsh(h).max() <= 1e-12 * max(1.0, np.abs(h).max())
        geo = affine_geometry(rs, vertices=False)
        q = geo.orthonormal_v()
        if geo.dim:
            np.linalg.cholesky(-(q.T @ h @ q))
        for u in geo.vperp_basis:
            uf = np.array([float(x) for x in u])
            assert np.linalg.norm(h @ uf) <= 1e-10 * np.linalg.norm(h) * np.linalg.norm(uf)


def test_fit_examples(edges3, tri3):
    assert fit_mle(["3/2"], edges3).theta_hat == pytest.approx([0.0], abs=1e-15)
    assert fit_mle(["2"], edges3).theta_hat == pytest.approx([math.log(2)], abs=1e-10)
    with pytest.raises(NoMLE) as err:
        fit_mle(["0"], edges3)
    assert err.value.certificate.verdict is Verdict.RELATIVE_BOUNDARY
    res = fit_mle(["1/8", "3/2", "1"], tri3)
    assert res.iterations == 0 and np.all(res.theta_hat == 0)
    assert res.rint_certificate.verdict is Verdict.RELATIVE_INTERIOR


def _interior_targets(rs, rng, count):
    mu = exact_mean(rs)
    out = []
    for _ in range(count):
        p = rs.points[int(rng.integers(len(rs.points)))]
        a = F(int(rng.integers(1, 20)), 20)
        out.append(tuple(a * x + (1 - a) * y for x, y in zip(mu, p)))
    return out


FIT_CASES = [
    (4, ("edges", "triangles")),
    (5, ("edges", "triangles", "two_stars")),
    (4, ("edges", "mean_degree", "isolates")),
    (5, ("max_degree", "isolates")),
    (6, ("edges", "triangles")),
]


@pytest.mark.parametrize("k, kinds", FIT_CASES)
def test_fit_invariants(k, kinds):
    rs = realizable_set(k, kinds)
    geo = affine_geometry(rs, vertices=False)
    q = geo.orthonormal_v()
    rng = np.random.default_rng(k * 31 + len(kinds))
    for t in _interior_targets(rs, rng, 6):
        res = fit_mle(t, rs, geometry=geo)
        assert res.final_grad_norm <= 1e-10
        assert all(inc > 0 for inc in res.increments)
        ells = [ell for _, ell in res.path]
        assert all(b >= a - 1e-12 * max(1.0, abs(a)) for a, b in zip(ells, ells[1:]))
        assert np.abs(mean_statistic(res.theta_hat, rs) - [float(x) for x in t]).max() <= 1e-8
        for u in geo.vperp_basis:
            assert abs(float(np.dot([float(x) for x in u], res.theta_hat))) <= 1e-12
        start = rng.normal(size=rs.n)
        start = q @ (q.T @ start)
        start *= 5 / np.linalg.norm(start)
        other = fit_mle(t, rs, FitConfig(init=tuple(start)), geometry=geo)
        assert np.abs(other.theta_hat - res.theta_hat).max() <= 1e-6


def test_fit_init_outside_v_is_projected(tri3):
    res = fit_mle(["1/8", "3/2", "1"], tri3, FitConfig(init=(0.0, 2.0, -3.0)))
    assert np.abs(res.theta_hat).max() <= 1e-12


def test_non_convergence_reports_best_iterate():
    rs = realizable_set(5, ["edges", "triangles"])
    t = _interior_targets(rs, np.random.default_rng(0), 1)[0]
    with pytest.raises(NonConvergence) as err:
        fit_mle(t, rs, FitConfig(max_iters=1))
    best = err.value.best
    assert best is not None and best.iterations == 1 and best.final_grad_norm > 1e-10


def test_fit_config_validation():
    with pytest.raises(InvalidInput):
        FitConfig(grad_tol=0)
    with pytest.raises(InvalidInput):
        FitConfig(backtrack_factor=1.0)


def test_perp_invariance_examples(tri3):
    rep = perp_invariance_check([0.3, -1.0, 0.2], ["1/8", "3/2", "1"], tri3, U)
    assert rep.in_affine_hull and rep.ok and abs(rep.difference) <= 1e-12
    rep = perp_invariance_check([0, 0, 0], ["0", "1", "1"], tri3, U)
    assert not rep.in_affine_hull and rep.ok
    assert rep.predicted == pytest.approx(-1.0, abs=1e-15)
    assert rep.difference == pytest.approx(-1.0, abs=1e-12)
    assert perp_invariance_check([1, 1, 1], ["0", "1", "1"], tri3, [0, 0, 0]).difference == 0
    with pytest.raises(InvalidInput):
        perp_invariance_check([0, 0, 0], ["1/8", "3/2", "1"], tri3, [1, 0, 0])


def test_flat_along_vperp():
    rng = np.random.default_rng(8)
    for k, kinds in [(3, ("triangles", "edges", "mean_degree")), (5, ("edges", "mean_degree", "two_stars")),
                     (2, ("edges", "triangles"))]:
        rs = realizable_set(k, kinds)
        geo = affine_geometry(rs, vertices=False)
        t = exact_mean(rs)
        for u in geo.vperp_basis:
            uf = np.array([float(x) for x in u])
            for _ in range(5):
                th = rng.normal(size=rs.n)
                for s in (-10, -1, 1, 10):
                    assert abs(log_likelihood(th + s * uf, t, rs) - log_likelihood(th, t, rs)) <= 1e-10


def test_concavity_examples(edges3, tri3):
    rep = concavity_probe([-1.0], [1.0], 0.5, ["1"], edges3)
    assert rep.strict_predicted and rep.strict_observed and rep.consistent
    rep = concavity_probe([0, 0, 0], U, 0.5, ["1/8", "3/2", "1"], tri3)
    assert not rep.strict_predicted and not rep.strict_observed and rep.consistent
    assert abs(rep.lhs - rep.rhs) <= 1e-12
    with pytest.raises(InvalidInput):
        concavity_probe([0.0], [0.0], 0.5, ["1"], edges3)
    for tau in (0.0, 1.0, 1.5):
        with pytest.raises(InvalidInput):
            concavity_probe([0.0], [1.0], tau, ["1"], edges3)


def test_concavity_random_triples():
    rng = np.random.default_rng(23)
    for k, kinds in itertools.product((3, 4), [("edges",), ("triangles", "edges", "mean_degree"),
                                               ("edges", "two_stars", "isolates")]):
        rs = realizable_set(k, kinds)
        geo = affine_geometry(rs, vertices=False)
        t = exact_mean(rs)
        for _ in range(40):
            rep = concavity_probe(rng.uniform(-1, 1, rs.n), rng.uniform(-1, 1, rs.n),
                                  float(rng.uniform(0.05, 0.95)), t, rs, geo)
            assert rep.consistent
