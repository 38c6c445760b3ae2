"""Diagnostics layer: the scale-matrix identity, summaries, losses, DIC."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from conftest import star_ordered

from gbwishart import (
    Graph,
    GWishartParams,
    OrderedGraph,
    closed_form_mean,
    cycle_graph,
    gibbs_run,
    gibbs_run_many,
    grid_graph,
    path_graph,
)
from gbwishart.chol import NotPositiveDefiniteError
from gbwishart.datasim import omega_from_pattern, sample_mvn
from gbwishart.fileio import tracked_entries
from gbwishart.inference import (
    PosteriorSummary,
    deviance,
    dic,
    empirical_delta,
    inverse_diag_delta,
    posterior_mean_and_ci,
    precision_diag_delta,
    sigma_star_draws,
    stein_loss,
    theorem2_diagnostic,
)


def make_params(og: OrderedGraph, seed: int, delta_range=(5.0, 9.0)) -> GWishartParams:
    rng = np.random.default_rng(seed)
    p = og.p
    A = rng.standard_normal((p, p))
    U = A @ A.T + p * np.eye(p)
    return GWishartParams(og, U, rng.uniform(*delta_range, size=p))


def batch_se(x: np.ndarray, n_batches: int = 50) -> float:
    size = len(x) // n_batches
    means = x[: n_batches * size].reshape(n_batches, size).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(n_batches))


def telescoped_sum(draw: np.ndarray, params: GWishartParams) -> np.ndarray:
    """Literal weighted sum of embedded leading-block inverses, the
    definition the collapsed implementation must reproduce."""
    og = params.ordered_graph
    p = og.p
    elim = np.asarray([v - 1 for v in og.ordering.elimination])
    m = draw[np.ix_(elim, elim)]
    delta = params.delta_by_rank()
    out = np.zeros((p, p))
    for k in range(1, p + 1):
        weight = delta[k - 1] - (delta[k] if k < p else 0.0)
        out[:k, :k] += weight * np.linalg.inv(m[:k, :k])
    back = np.argsort(elim)
    return out[np.ix_(back, back)]


# ---------------------------------------------------------------------------
# scale-matrix identity diagnostic
# ---------------------------------------------------------------------------


def test_identity_holds_for_scalar_case():
    # p = 1: the precision is Gamma(delta/2 + 1, rate u/2), so the
    # statistic delta / Omega has mean exactly u
    u, delta = 2.5, 6.0
    og = OrderedGraph.natural(Graph.of(1, []))
    params = GWishartParams(og, np.array([[u]]), np.array([delta]))
    rng = np.random.default_rng(5)
    draws = rng.gamma(delta / 2.0 + 1.0, 2.0 / u, size=200_000).reshape(-1, 1, 1)
    report = theorem2_diagnostic(draws, params)
    assert len(report.rows) == 1
    se = batch_se(delta / draws[:, 0, 0])
    assert abs(report.rows[0].simulated - u) < 4 * se
    assert report.rows[0].expected == u
    assert report.max_abs_deviation == report.rows[0].deviation
    assert report.n_draws == 200_000


def test_identity_requires_shapes_above_four():
    og = OrderedGraph.natural(cycle_graph(4))
    draws = np.broadcast_to(np.eye(4), (10, 4, 4))
    for bad in (4.0, 3.0):
        params = GWishartParams(og, np.eye(4), np.full(4, bad))
        with pytest.raises(ValueError, match="exceed 4"):
            theorem2_diagnostic(draws, params)


def test_identity_rejects_empty_and_mismatched_chains():
    og = OrderedGraph.natural(cycle_graph(4))
    params = GWishartParams(og, np.eye(4), np.full(4, 6.0))
    with pytest.raises(ValueError, match="no retained draws"):
        theorem2_diagnostic(np.empty((0, 4, 4)), params)
    with pytest.raises(ValueError, match="4 variables"):
        theorem2_diagnostic(np.broadcast_to(np.eye(3), (5, 3, 3)), params)
    with pytest.raises(NotPositiveDefiniteError):
        theorem2_diagnostic(-np.broadcast_to(np.eye(4), (5, 4, 4)), params)


def test_statistic_collapses_to_scaled_inverse_for_constant_shape():
    # constant delta telescopes to a single term, so per draw the
    # statistic must equal delta * Omega^-1 exactly
    og = OrderedGraph.natural(cycle_graph(5))
    params = GWishartParams(og, make_params(og, seed=3).U, np.full(5, 7.0))
    chain = gibbs_run(params, iters=400, burnin=100, seed=8)
    star = sigma_star_draws(chain.omega_draws, params)
    expected = 7.0 * np.linalg.inv(chain.omega_draws)
    assert np.abs(star - expected).max() <= 1e-10 * np.abs(expected).max()


def test_statistic_matches_literal_block_sum():
    # heterogeneous shapes against the defining sum, draw by draw
    og = OrderedGraph.natural(grid_graph(4, 2))
    params = make_params(og, seed=11, delta_range=(2.0, 9.0))
    chain = gibbs_run(params, iters=260, burnin=60, seed=4)
    star = sigma_star_draws(chain.omega_draws, params)
    for r in range(0, chain.retained, 10):
        oracle = telescoped_sum(chain.omega_draws[r], params)
        assert np.abs(star[r] - oracle).max() <= 1e-10 * np.abs(oracle).max()


def test_identity_on_star_graph():
    og = star_ordered(5)
    params = GWishartParams(og, make_params(og, seed=21).U, np.full(5, 8.0))
    chain = gibbs_run(params, iters=30_000, burnin=2000, seed=13)
    report = theorem2_diagnostic(chain, params)
    star = sigma_star_draws(chain.omega_draws, params)
    for row in report.rows:
        se = batch_se(star[:, row.i - 1, row.j - 1])
        assert row.deviation <= 4 * se + 1e-3, (row.i, row.j)


def test_identity_deviation_shrinks_with_chain_length():
    og = OrderedGraph.natural(cycle_graph(5))
    params = make_params(og, seed=17, delta_range=(5.0, 9.0))
    chains = gibbs_run_many(
        params, iters=4500, burnin=500, seed=6, n_chains=4
    )
    def dev(m):
        return max(
            abs(m[i - 1, j - 1] - params.U[i - 1, j - 1])
            for i, j in tracked_entries(og.graph)
        )

    improved = 0
    for chain in chains:
        star = sigma_star_draws(chain.omega_draws, params)
        if dev(star.mean(axis=0)) < dev(star[:250].mean(axis=0)):
            improved += 1
    assert improved >= 3


def test_report_renders_as_table():
    og = OrderedGraph.natural(cycle_graph(4))
    params = GWishartParams(og, 2.0 * np.eye(4), np.full(4, 6.0))
    chain = gibbs_run(params, iters=60, burnin=10, seed=1)
    report = theorem2_diagnostic(chain, params)
    assert len(report.rows) == len(tracked_entries(og.graph))
    text = str(report)
    assert "simulated" in text and "expected" in text
    assert "max |deviation|" in text
    assert report.sigma_star_mean.shape == (4, 4)


# ---------------------------------------------------------------------------
# posterior summaries and interval calibration
# ---------------------------------------------------------------------------


def test_point_mass_chain_gives_degenerate_intervals():
    a = np.array([[2.0, 0.3], [0.3, 1.0]])
    draws = np.repeat(a[None], 40, axis=0)
    s = posterior_mean_and_ci(draws, level=0.9)
    assert isinstance(s, PosteriorSummary)
    assert np.array_equal(s.omega_low, a)
    assert np.array_equal(s.omega_high, a)
    assert np.allclose(s.omega_mean, a)
    assert np.allclose(s.sigma_mean, np.linalg.inv(a))
    assert s.n_draws == 40


def test_posterior_mean_matches_closed_form_on_decomposable_graph():
    og = OrderedGraph.natural(path_graph(4))
    params = make_params(og, seed=2, delta_range=(3.0, 9.0))
    chain = gibbs_run(params, iters=22_000, burnin=2000, seed=5)
    s = posterior_mean_and_ci(chain)
    exact = closed_form_mean(params)
    for i, j in tracked_entries(og.graph):
        se = batch_se(chain.omega_draws[:, i - 1, j - 1])
        assert abs(s.omega_mean[i - 1, j - 1] - exact[i - 1, j - 1]) <= 4 * se + 1e-3


def test_sigma_summary_consistent_with_stored_inverses():
    og = OrderedGraph.natural(cycle_graph(4))
    params = make_params(og, seed=9)
    chain = gibbs_run(params, iters=120, burnin=20, seed=3, keep_sigma=True)
    assert chain.sigma_draws is not None
    s = posterior_mean_and_ci(chain)
    direct = np.linalg.inv(chain.omega_draws)
    assert np.abs(s.sigma_mean - direct.mean(axis=0)).max() < 1e-8


def test_interval_level_validation():
    draws = np.broadcast_to(np.eye(2), (30, 2, 2))
    for bad in (0.0, 1.0, 1.2):
        with pytest.raises(ValueError, match="level"):
            posterior_mean_and_ci(draws, level=bad)


def test_interval_calibration_against_known_distribution():
    # equal-tailed intervals from 250 exact draws should cover about 95%
    # of the true distribution's mass on average
    rng = np.random.default_rng(31)
    shape, scale = 3.0, 1.7
    coverage = []
    for _ in range(300):
        draws = rng.gamma(shape, scale, size=250).reshape(250, 1, 1)
        s = posterior_mean_and_ci(draws, level=0.95)
        coverage.append(
            stats.gamma.cdf(s.omega_high[0, 0], shape, scale=scale)
            - stats.gamma.cdf(s.omega_low[0, 0], shape, scale=scale)
        )
    assert 0.93 < np.mean(coverage) < 0.97


# ---------------------------------------------------------------------------
# Stein loss
# ---------------------------------------------------------------------------


def test_stein_loss_vanishes_at_truth():
    a = np.array([[3.0, 1.0], [1.0, 2.0]])
    assert stein_loss(a, a) == pytest.approx(0.0, abs=1e-12)


def test_stein_loss_known_value():
    # estimate = 2 I, truth = I: trace 4, log det ratio 2 log 2, p = 2
    assert stein_loss(2 * np.eye(2), np.eye(2)) == pytest.approx(
        4 - 2 * math.log(2) - 2
    )


def test_stein_loss_congruence_invariance():
    rng = np.random.default_rng(12)
    est = omega_from_pattern(OrderedGraph.natural(cycle_graph(4)), 0.4, np.full(4, 2.0))
    tru = np.eye(4) * 1.5
    a = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    base = stein_loss(est, tru)
    moved = stein_loss(a @ est @ a.T, a @ tru @ a.T)
    assert moved == pytest.approx(base, rel=1e-9)


def test_stein_loss_positive_away_from_truth():
    rng = np.random.default_rng(7)
    for _ in range(20):
        z = rng.standard_normal((3, 3))
        est = z @ z.T + 0.5 * np.eye(3)
        assert stein_loss(est, np.eye(3)) > 0


def test_stein_loss_validation():
    with pytest.raises(NotPositiveDefiniteError):
        stein_loss(-np.eye(2), np.eye(2))
    with pytest.raises(NotPositiveDefiniteError):
        stein_loss(np.eye(2), -np.eye(2))
    with pytest.raises(ValueError, match="symmetric"):
        stein_loss(np.array([[1.0, 0.5], [0.0, 1.0]]), np.eye(2))
    with pytest.raises(ValueError, match="dimensions"):
        stein_loss(np.eye(2), np.eye(3))


# ---------------------------------------------------------------------------
# DIC
# ---------------------------------------------------------------------------


def test_dic_on_constant_identity_chain():
    # every draw I_2 with S = I_2 and n = 10: each deviance is 20, the
    # mean draw is I_2 again, so DIC = 2 * 20 - 20
    draws = np.broadcast_to(np.eye(2), (25, 2, 2))
    assert dic(draws, np.eye(2), 10) == pytest.approx(20.0)


def test_dic_matches_direct_formula():
    og = OrderedGraph.natural(cycle_graph(4))
    params = make_params(og, seed=4)
    chain = gibbs_run(params, iters=300, burnin=100, seed=2)
    s_mat = make_params(og, seed=19).U / 40.0
    n = 17

    def dev(om):
        _, logdet = np.linalg.slogdet(om)
        return n * (np.trace(om @ s_mat) - logdet)

    oracle = 2 * np.mean([dev(om) for om in chain.omega_draws]) - dev(
        chain.omega_draws.mean(axis=0)
    )
    assert dic(chain, s_mat, n) == pytest.approx(oracle, rel=1e-10)
    per_draw = deviance(chain.omega_draws, s_mat, n)
    assert per_draw[0] == pytest.approx(dev(chain.omega_draws[0]), rel=1e-12)


def test_dic_relabeling_invariance():
    og = OrderedGraph.natural(cycle_graph(4))
    params = make_params(og, seed=4)
    chain = gibbs_run(params, iters=200, burnin=50, seed=2)
    s_mat = make_params(og, seed=19).U / 40.0
    perm = np.array([2, 0, 3, 1])
    moved = chain.omega_draws[:, perm[:, None], perm[None, :]]
    assert dic(moved, s_mat[np.ix_(perm, perm)], 9) == pytest.approx(
        dic(chain, s_mat, 9), rel=1e-12
    )


def test_dic_validation():
    draws = np.broadcast_to(np.eye(2), (5, 2, 2))
    with pytest.raises(ValueError, match="positive integer"):
        dic(draws, np.eye(2), 0)
    with pytest.raises(ValueError, match="shape"):
        dic(draws, np.eye(3), 5)
    with pytest.raises(ValueError, match="symmetric"):
        dic(draws, np.array([[1.0, 0.4], [0.0, 1.0]]), 5)
    with pytest.raises(NotPositiveDefiniteError):
        dic(-draws, np.eye(2), 5)


def test_dic_prefers_the_generating_graph():
    # data generated on the 6-cycle: the cycle must beat the path that
    # drops one of its edges
    truth_og = OrderedGraph.natural(cycle_graph(6))
    omega0 = omega_from_pattern(truth_og, 0.5, np.full(6, 2.0))
    _, s_mat = sample_mvn(omega0, 400, seed=23)
    scores = {}
    for name, g in (("cycle", cycle_graph(6)), ("path", path_graph(6))):
        og = OrderedGraph.natural(g)
        c = float(np.mean(np.diag(400 * s_mat)))
        prior = GWishartParams(og, c * np.eye(6), empirical_delta(c * np.eye(6), s_mat, 400))
        chain = gibbs_run(prior, (s_mat, 400), iters=2000, burnin=500, seed=29)
        scores[name] = dic(chain, s_mat, 400)
    assert scores["cycle"] < scores["path"] - 2.0


# ---------------------------------------------------------------------------
# shape-vector rules
# ---------------------------------------------------------------------------


def test_empirical_delta_values():
    assert np.allclose(empirical_delta(np.eye(3), np.eye(3), 9), np.full(3, 10.0))
    rng = np.random.default_rng(3)
    z = rng.standard_normal((4, 4))
    s_mat = z @ z.T + np.eye(4)
    u_mat = np.diag(rng.uniform(1, 5, size=4))
    got = empirical_delta(u_mat, s_mat, 7)
    assert np.allclose(got, np.diag(u_mat) / np.diag(s_mat) + 7, rtol=1e-14)


def test_empirical_delta_validation():
    with pytest.raises(ValueError, match="positive"):
        empirical_delta(np.eye(2), np.diag([1.0, 0.0]), 5)
    with pytest.raises(ValueError, match="negative"):
        empirical_delta(np.eye(2), np.eye(2), -1)


def test_inverse_diag_delta():
    assert np.allclose(inverse_diag_delta(np.diag([0.5, 2.0])), [2.0, 0.5])
    with pytest.raises(ValueError, match="positive"):
        inverse_diag_delta(np.diag([1.0, -2.0]))


def test_precision_diag_delta():
    s_mat = np.array([[2.0, 0.6], [0.6, 1.0]])
    assert np.allclose(
        precision_diag_delta(s_mat), np.diag(np.linalg.inv(s_mat)), rtol=1e-12
    )
    assert np.allclose(precision_diag_delta(np.diag([4.0, 0.25])), [0.25, 4.0])
    with pytest.raises(NotPositiveDefiniteError):
        precision_diag_delta(np.array([[1.0, 2.0], [2.0, 1.0]]))
