"""Estimators and diagnostics over posterior draws: the scale-matrix
identity check, posterior means with credible intervals, Stein's loss,
the deviance information criterion, and data-driven shape-vector rules.

The identity check rests on the fact that for a precision matrix
distributed with density proportional to (prod_k D_k^(delta_k/2))
exp(-tr(Omega U)/2) on the graph's cone, the weighted sum of embedded
leading-block inverses sum_k (delta_k - delta_{k+1}) [Omega_k^-1]^0
(rank space, delta_{p+1} = 0) has expectation U on the diagonal and the
edge set, provided every shape exceeds 4.  Since the leading blocks of
Omega = LDL' factor as leading blocks, the telescoped sum collapses to
the single matrix L^-T diag(delta/D) L^-1, which is what gets averaged
over the retained draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .chol import NotPositiveDefiniteError
from .fileio import tracked_entries
from .samplers import SYMMETRY_TOL, ChainSummary, GWishartParams, equal_tailed_interval

__all__ = [
    "Theorem2Row",
    "Theorem2Report",
    "sigma_star_draws",
    "theorem2_diagnostic",
    "PosteriorSummary",
    "posterior_mean_and_ci",
    "stein_loss",
    "dic",
    "deviance",
    "empirical_delta",
    "inverse_diag_delta",
    "precision_diag_delta",
]

MIN_SHAPE_FOR_IDENTITY = 4.0


def _draws_of(chain: "ChainSummary | np.ndarray") -> np.ndarray:
    draws = chain.omega_draws if isinstance(chain, ChainSummary) else np.asarray(chain)
    if draws.ndim != 3 or draws.shape[1] != draws.shape[2]:
        raise ValueError(f"draws have shape {draws.shape}, expected (n, p, p)")
    if draws.shape[0] == 0:
        raise ValueError("the chain holds no retained draws")
    return np.asarray(draws, dtype=float)


def _batched_unit_factors(draws: np.ndarray, what: str) -> tuple[np.ndarray, np.ndarray]:
    """Unit-lower-triangular factors and diagonals of a draw stack."""
    try:
        root = np.linalg.cholesky(draws)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            f"{what}: some draw is not positive definite"
        ) from None
    p = draws.shape[-1]
    diag = root[:, np.arange(p), np.arange(p)]
    return root / diag[:, None, :], diag**2


@dataclass(frozen=True)
class Theorem2Row:
    """One tracked entry of the identity check (original labels)."""

    i: int
    j: int
    simulated: float
    expected: float

    @property
    def deviation(self) -> float:
        return abs(self.simulated - self.expected)


@dataclass(frozen=True)
class Theorem2Report:
    """Per-entry table plus the worst absolute deviation."""

    rows: tuple[Theorem2Row, ...]
    max_abs_deviation: float
    n_draws: int
    sigma_star_mean: np.ndarray

    def __str__(self) -> str:
        lines = [f"{'i':>4} {'j':>4} {'simulated':>12} {'expected':>12}"]
        lines += [
            f"{r.i:>4} {r.j:>4} {r.simulated:>12.4f} {r.expected:>12.4f}"
            for r in self.rows
        ]
        lines.append(f"max |deviation| = {self.max_abs_deviation:.4f}")
        return "\n".join(lines)


def sigma_star_draws(
    draws: np.ndarray, params: GWishartParams
) -> np.ndarray:
    """The identity statistic per draw, in original vertex labels.

    Each draw is permuted to rank space, factored once, and the factor
    is inverted by forward substitution; no leading block is inverted
    on its own.
    """
    og = params.ordered_graph
    p = og.p
    idx = np.asarray([v - 1 for v in og.ordering.elimination], dtype=int)
    rank_draws = draws[:, idx[:, None], idx[None, :]]
    L, D = _batched_unit_factors(rank_draws, "identity diagnostic")
    M = np.linalg.solve(L, np.broadcast_to(np.eye(p), L.shape))
    w = params.delta_by_rank()[None, :] / D
    star = np.einsum("rki,rk,rkj->rij", M, w, M)
    back = np.argsort(idx)
    return star[:, back[:, None], back[None, :]]


def theorem2_diagnostic(
    chain: "ChainSummary | np.ndarray", params: GWishartParams
) -> Theorem2Report:
    """Average the identity statistic over the retained draws and
    compare it with the scale matrix on the diagonal and the edges.

    Refuses shape vectors with any entry at or below 4: the identity
    requires every shape parameter to exceed 4.
    """
    if np.min(params.delta) <= MIN_SHAPE_FOR_IDENTITY:
        raise ValueError(
            "the identity requires every shape parameter to exceed 4; "
            f"the smallest supplied shape is {np.min(params.delta):g}"
        )
    draws = _draws_of(chain)
    if draws.shape[1] != params.p:
        raise ValueError(
            f"draws are {draws.shape[1]}-dimensional but the parameters "
            f"describe {params.p} variables"
        )
    mean = sigma_star_draws(draws, params).mean(axis=0)
    rows = tuple(
        Theorem2Row(i, j, float(mean[i - 1, j - 1]), float(params.U[i - 1, j - 1]))
        for i, j in tracked_entries(params.ordered_graph.graph)
    )
    return Theorem2Report(
        rows=rows,
        max_abs_deviation=max(r.deviation for r in rows),
        n_draws=draws.shape[0],
        sigma_star_mean=mean,
    )


@dataclass(frozen=True)
class PosteriorSummary:
    """Entrywise posterior means and equal-tailed credible bounds for
    the precision matrix and its inverse."""

    omega_mean: np.ndarray
    omega_low: np.ndarray
    omega_high: np.ndarray
    sigma_mean: np.ndarray
    sigma_low: np.ndarray
    sigma_high: np.ndarray
    level: float
    n_draws: int


def posterior_mean_and_ci(
    chain: "ChainSummary | np.ndarray", level: float = 0.95
) -> PosteriorSummary:
    """Summarize a chain's precision draws and their inverses."""
    draws = _draws_of(chain)
    sigma = chain.sigma_draws if isinstance(chain, ChainSummary) else None
    if sigma is None:
        sigma = np.linalg.inv(draws)
    om_lo, om_hi = equal_tailed_interval(draws, level)
    si_lo, si_hi = equal_tailed_interval(sigma, level)
    return PosteriorSummary(
        omega_mean=draws.mean(axis=0),
        omega_low=om_lo,
        omega_high=om_hi,
        sigma_mean=sigma.mean(axis=0),
        sigma_low=si_lo,
        sigma_high=si_hi,
        level=level,
        n_draws=draws.shape[0],
    )


def _checked_cholesky(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - a.T).max() > SYMMETRY_TOL * scale:
        raise ValueError(f"{name} is not symmetric")
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(f"{name} is not positive definite") from None


def stein_loss(estimate: np.ndarray, truth: np.ndarray) -> float:
    """tr(estimate truth^-1) - log det(estimate truth^-1) - p.

    Nonnegative, zero exactly at estimate = truth, and invariant under
    joint congruence by any invertible matrix.
    """
    est_root = _checked_cholesky(estimate, "estimate")
    tru_root = _checked_cholesky(truth, "truth")
    if est_root.shape != tru_root.shape:
        raise ValueError("estimate and truth have different dimensions")
    p = est_root.shape[0]
    ratio_trace = float(np.trace(cho_solve((tru_root, True), np.asarray(estimate, dtype=float))))
    logdet = 2.0 * float(
        np.sum(np.log(np.diag(est_root))) - np.sum(np.log(np.diag(tru_root)))
    )
    return ratio_trace - logdet - p


def deviance(omega_draws: np.ndarray, S: np.ndarray, n: int) -> np.ndarray:
    """n (tr(Omega S) - log |Omega|) per draw."""
    trace = np.einsum("rij,ji->r", omega_draws, S)
    try:
        root = np.linalg.cholesky(omega_draws)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            "deviance: some draw is not positive definite"
        ) from None
    p = omega_draws.shape[-1]
    logdet = 2.0 * np.sum(np.log(root[:, np.arange(p), np.arange(p)]), axis=1)
    return n * (trace - logdet)


def dic(chain: "ChainSummary | np.ndarray", S: np.ndarray, n: int) -> float:
    """2 Dbar - D(mean draw), with deviance D(Omega) = n (tr(Omega S) - log|Omega|).

    The mean draw stays on the positive-definite cone whenever the
    draws do (the cone is convex), so a mean that fails the test
    signals corrupt input and raises.
    """
    if n < 1:
        raise ValueError("the sample size must be a positive integer")
    draws = _draws_of(chain)
    p = draws.shape[-1]
    S = np.asarray(S, dtype=float)
    if S.shape != (p, p):
        raise ValueError(f"S has shape {S.shape}, expected ({p}, {p})")
    scale = max(1.0, float(np.abs(S).max()))
    if np.abs(S - S.T).max() > SYMMETRY_TOL * scale:
        raise ValueError("S is not symmetric")
    dbar = float(deviance(draws, S, n).mean())
    mean = draws.mean(axis=0)
    d_at_mean = float(deviance(mean[None], S, n)[0])
    return 2.0 * dbar - d_at_mean


def empirical_delta(U: np.ndarray, S: np.ndarray, n: int) -> np.ndarray:
    """Data-driven shapes delta_i = (U_ii + n S_ii) / S_ii."""
    U = np.asarray(U, dtype=float)
    S = np.asarray(S, dtype=float)
    if n < 0:
        raise ValueError("the sample size cannot be negative")
    s_diag = np.diag(S)
    if np.any(s_diag <= 0):
        raise ValueError("every diagonal entry of S must be positive")
    return (np.diag(U) + n * s_diag) / s_diag


def inverse_diag_delta(S: np.ndarray) -> np.ndarray:
    """Objective shapes delta_i = 1 / S_ii."""
    s_diag = np.diag(np.asarray(S, dtype=float))
    if np.any(s_diag <= 0):
        raise ValueError("every diagonal entry of S must be positive")
    return 1.0 / s_diag


def precision_diag_delta(S: np.ndarray) -> np.ndarray:
    """Objective shapes delta_i = (S^-1)_ii; S must be invertible."""
    root = _checked_cholesky(S, "S")
    return np.diag(cho_solve((root, True), np.eye(root.shape[0]))).copy()
