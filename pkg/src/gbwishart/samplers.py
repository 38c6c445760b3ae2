"""Samplers for the generalized Wishart family on ordered-graph cones.

Four routes to draws of a sparse precision matrix Omega = L D L^T whose
density on the cone is proportional to (prod_k D_k^(delta_k/2)) *
exp(-tr(Omega U)/2):

* a coordinate Gibbs sampler whose one-dimensional conditionals are
  normal (independent entries of L) or generalized inverse Gaussian
  (diagonal ratios), valid on any generalized Bartlett ordering;
* an optional multivariate-normal block update for the trailing
  independent entries when the trailing subgraph is decomposable;
* an exact one-shot sampler and a closed-form mean, both restricted to
  decomposable graphs whose ordering is a perfect elimination ordering;
* accept-reject and independence Metropolis baselines built on the
  triangular-root parameterization Omega = (Psi T)' (Psi T) with
  U^-1 = T'T.

The Gibbs sweep runs on a compiled engine: per-column quadratic forms
of the trace energy are cached, every coordinate knows the transitive
set of dependent (fill) entries its change propagates to, and only
those entries and columns are re-evaluated between draws.  Coordinates
that touch no fill entry at all get their conditional coefficients in
closed form without any energy evaluation.  The engine batches any
number of lanes (chains) over shared structure; each lane owns its own
counter-based generator and all lane arithmetic is elementwise, so a
lane's draw stream is identical whether it runs alone or in a batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .chol import (
    AlphaExponents,
    CholeskyFactor,
    ConditionalFitError,
    IndependentEntries,
    NotPositiveDefiniteError,
    TildeD,
    complete_columns_batch,
    dependent_fill_pairs,
    energy,
    independent_pairs,
    nu_counts,
    to_original_labels,
    to_rank_space,
)
from .graphs import Graph, OrderedGraph, Ordering, is_gb_ordering, triangulate

__all__ = [
    "GigParams",
    "GWishartParams",
    "GibbsState",
    "ChainSummary",
    "ARResult",
    "NotGeneralizedBartlettError",
    "sample_gig",
    "posterior_params",
    "chain_generator",
    "equal_tailed_interval",
    "merge_chain_summaries",
    "GibbsEngine",
    "run_lanes",
    "gibbs_step",
    "gibbs_run",
    "gibbs_run_many",
    "block_update_trailing",
    "direct_decomposable_sample",
    "direct_sample_many",
    "closed_form_mean",
    "triangular_scale_root",
    "complete_triangular_root",
    "ar_sample",
    "ar_sample_many",
    "mh_run",
]

SYMMETRY_TOL = 1e-10


class NotGeneralizedBartlettError(ValueError):
    """The ordering admits a fill triangle with no graph edge, so the
    one-dimensional trace-energy fits are not exact and the coordinate
    sampler refuses to run."""

    def __init__(self, message: str, violations: list[tuple[int, int, int]]):
        super().__init__(message)
        self.violations = violations


# ---------------------------------------------------------------------------
# generalized inverse Gaussian


@dataclass(frozen=True)
class GigParams:
    """Parameters of the density f(x) proportional to
    x^(lam-1) exp(-(psi x + chi / x) / 2) on x > 0.

    Proper iff psi > 0 and either chi > 0 or (chi = 0 and lam > 0); the
    chi = 0 case is the Gamma(lam, rate psi/2) density.
    """

    lam: float
    chi: float
    psi: float

    def __post_init__(self) -> None:
        if not (self.psi > 0 and self.chi >= 0 and np.isfinite(self.lam)):
            raise ValueError(
                f"improper parameters (lam={self.lam}, chi={self.chi}, psi={self.psi}): "
                f"need psi > 0 and chi >= 0"
            )
        if self.chi == 0 and self.lam <= 0:
            raise ValueError(
                f"improper parameters: chi = 0 needs lam > 0, got lam={self.lam}"
            )


def sample_gig(params: GigParams, rng: np.random.Generator) -> float:
    """One exact draw from the generalized inverse Gaussian density.

    chi = 0 delegates to a Gamma draw.  Otherwise the density of
    t = log x is log-concave with h(t) = lam t - (psi e^t + chi e^-t)/2,
    and we reject from the standard three-piece hat: a flat cap of width
    one nat around the mode and the two tangent exponential tails at the
    points where h has dropped by one.
    """
    lam, chi, psi = float(params.lam), float(params.chi), float(params.psi)
    if chi == 0.0:
        return float(rng.gamma(lam, 2.0 / psi))

    def h(t: float) -> float:
        return lam * t - (psi * math.exp(t) + chi * math.exp(-t)) / 2.0

    def hp(t: float) -> float:
        return lam - (psi * math.exp(t) - chi * math.exp(-t)) / 2.0

    x_mode = (lam + math.sqrt(lam * lam + psi * chi)) / psi
    t_mode = math.log(x_mode)
    h_mode = h(t_mode)

    def drop_point(direction: float) -> float:
        # Bracket by doubling steps, then Newton from outside the root;
        # h is concave, so the iterates approach the root monotonically.
        w = 1.0
        while h(t_mode + direction * w) - h_mode + 1.0 > 0.0:
            w *= 2.0
        t = t_mode + direction * w
        for _ in range(100):
            f = h(t) - h_mode + 1.0
            t_new = t - f / hp(t)
            if abs(t_new - t) <= 1e-13 * (1.0 + abs(t)):
                return t_new
            t = t_new
        return t

    t_lo = drop_point(-1.0)
    t_hi = drop_point(+1.0)
    slope_lo = hp(t_lo)
    slope_hi = hp(t_hi)
    w_mid = t_hi - t_lo
    w_lo = math.exp(-1.0) / slope_lo
    w_hi = math.exp(-1.0) / (-slope_hi)
    w_total = w_mid + w_lo + w_hi

    for _ in range(100_000):
        u = rng.random() * w_total
        if u < w_mid:
            t = t_lo + rng.random() * w_mid
            hat = 0.0
        elif u < w_mid + w_lo:
            t = t_lo + math.log(rng.random()) / slope_lo
            hat = -1.0 + slope_lo * (t - t_lo)
        else:
            t = t_hi + math.log(rng.random()) / slope_hi
            hat = -1.0 + slope_hi * (t - t_hi)
        if math.log(rng.random()) < (h(t) - h_mode) - hat:
            return math.exp(t)
    raise RuntimeError("rejection sampler failed to accept after 100000 proposals")


# ---------------------------------------------------------------------------
# parameters and summaries


def _check_symmetric(name: str, a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    if float(np.abs(a - a.T).max()) > SYMMETRY_TOL * scale:
        raise ValueError(f"{name} is not symmetric")
    return (a + a.T) / 2.0


@dataclass(frozen=True)
class GWishartParams:
    """Scale matrix, shape vector, and the ordered graph fixing the cone.

    `U` is indexed by the original vertex labels; `delta` likewise holds
    the shape attached to each vertex (entry v-1 belongs to vertex v).
    Rank-space views are derived through the ordering where needed, so
    changing the elimination order never silently permutes the user's
    inputs.
    """

    ordered_graph: OrderedGraph
    U: np.ndarray
    delta: np.ndarray

    def __post_init__(self) -> None:
        p = self.ordered_graph.p
        U = _check_symmetric("scale matrix", self.U)
        if U.shape != (p, p):
            raise ValueError(f"scale matrix is {U.shape}, graph has p={p}")
        try:
            np.linalg.cholesky(U)
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError("scale matrix is not positive definite")
        delta = np.asarray(self.delta, dtype=float).reshape(-1)
        if delta.shape != (p,):
            raise ValueError(f"shape vector has length {delta.size}, expected {p}")
        if np.any(delta <= 0):
            raise ValueError("shape parameters must be strictly positive")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "delta", delta)

    @property
    def p(self) -> int:
        return self.ordered_graph.p

    def delta_by_rank(self) -> np.ndarray:
        elim = np.asarray(self.ordered_graph.ordering.elimination, dtype=int)
        return self.delta[elim - 1]


def _check_data(
    params: GWishartParams, data: tuple[np.ndarray, int] | None
) -> tuple[np.ndarray, int]:
    """Validate an (S, n) pair against the parameters; returns (S, n)
    with S symmetrized, or (0, 0) when there is no data."""
    if data is None:
        return np.zeros((params.p, params.p)), 0
    S, n = data
    S = _check_symmetric("sample covariance", S)
    if S.shape != (params.p, params.p):
        raise ValueError(f"sample covariance is {S.shape}, graph has p={params.p}")
    n = int(n)
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    eigmin = float(np.linalg.eigvalsh(S).min())
    if eigmin < -1e-8 * max(1.0, float(np.abs(S).max())):
        raise ValueError("sample covariance is not positive semidefinite")
    return S, n


def posterior_params(params: GWishartParams, S: np.ndarray, n: int) -> GWishartParams:
    """Conjugate update: scale U + nS, shapes delta_i + n."""
    S, n = _check_data(params, (S, n))
    if n == 0:
        return params
    return GWishartParams(params.ordered_graph, params.U + n * S, params.delta + n)


def chain_generator(seed: int, chain_index: int = 0) -> np.random.Generator:
    """The per-chain stream: a counter-based Philox generator keyed by
    (seed, chain index), reproducible across platforms."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence((int(seed), int(chain_index))))
    )


def equal_tailed_interval(
    draws: np.ndarray, level: float
) -> tuple[np.ndarray, np.ndarray]:
    """Equal-tailed interval from order statistics along the first axis,
    using the nearest-rank rule k = ceil(q * N) (1-based)."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    n = draws.shape[0]
    ordered = np.sort(draws, axis=0)
    # round before taking the ceiling so that q * n landing a hair above
    # an integer (0.025 * 1000 = 25.000000000000004) does not shift the rank
    k_lo = max(1, math.ceil(round((1.0 - level) / 2.0 * n, 9)))
    k_hi = min(n, math.ceil(round((1.0 + level) / 2.0 * n, 9)))
    return ordered[k_lo - 1], ordered[k_hi - 1]


@dataclass
class ChainSummary:
    """Retained draws of Omega (original vertex labels) plus per-entry
    posterior mean and equal-tailed credible bounds."""

    omega_draws: np.ndarray
    mean: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    level: float
    seed: int
    iters: int
    burnin: int
    thin: int
    chain_index: int = 0
    acceptance_rate: float | None = None
    sigma_draws: np.ndarray | None = None

    @property
    def retained(self) -> int:
        return self.omega_draws.shape[0]

    @property
    def iterations(self) -> tuple[int, ...]:
        """Sweep indices (1-based) of the retained draws."""
        return tuple(self.burnin + self.thin * (k + 1) for k in range(self.retained))


def _summarize(
    omega_draws: np.ndarray,
    *,
    level: float,
    seed: int,
    iters: int,
    burnin: int,
    thin: int,
    chain_index: int = 0,
    acceptance_rate: float | None = None,
    sigma_draws: np.ndarray | None = None,
) -> ChainSummary:
    lo, hi = equal_tailed_interval(omega_draws, level)
    return ChainSummary(
        omega_draws=omega_draws,
        mean=omega_draws.mean(axis=0),
        ci_low=lo,
        ci_high=hi,
        level=level,
        seed=seed,
        iters=iters,
        burnin=burnin,
        thin=thin,
        chain_index=chain_index,
        acceptance_rate=acceptance_rate,
        sigma_draws=sigma_draws,
    )


def merge_chain_summaries(summaries: list[ChainSummary]) -> ChainSummary:
    """Pool chains by concatenating their retained draws; settings must
    agree across chains."""
    if not summaries:
        raise ValueError("nothing to merge")
    first = summaries[0]
    for s in summaries[1:]:
        if (s.iters, s.burnin, s.thin, s.level) != (
            first.iters,
            first.burnin,
            first.thin,
            first.level,
        ):
            raise ValueError("chains were run with different settings")
    draws = np.concatenate([s.omega_draws for s in summaries], axis=0)
    sigma = None
    if all(s.sigma_draws is not None for s in summaries):
        sigma = np.concatenate([s.sigma_draws for s in summaries], axis=0)
    acc = None
    rates = [s.acceptance_rate for s in summaries if s.acceptance_rate is not None]
    if rates:
        acc = float(np.mean(rates))
    return _summarize(
        draws,
        level=first.level,
        seed=first.seed,
        iters=first.iters,
        burnin=first.burnin,
        thin=first.thin,
        chain_index=first.chain_index,
        acceptance_rate=acc,
        sigma_draws=sigma,
    )


# ---------------------------------------------------------------------------
# the compiled coordinate sweep


class GibbsEngine:
    """Pre-compiled sweep structure for one ordered graph.

    The trace energy is tr(L D L' W) = sum_c D_c q_c, with q_c the
    quadratic form of column c of L against the gathered scale block
    W[rows_c, rows_c].  Compilation records, for every coordinate, the
    transitive set of fill entries whose value changes with it and the
    columns whose q_c needs refreshing; coordinates that touch no fill
    get exact conditional coefficients with no energy evaluation at all.

    `scale` may be one (p, p) matrix shared by all lanes or a stack of
    (m, p, p) per-lane matrices, both in rank space; `alphas` likewise
    (p,) or (m, p).  The caller is responsible for the ordering being
    generalized Bartlett (`gibbs_run` checks it up front); on any other
    ordering the one-dimensional fits are inexact and the certification
    in the dense-path fit helpers is what reports it.
    """

    def __init__(
        self,
        og: OrderedGraph,
        scale: np.ndarray,
        alphas: np.ndarray,
        generators: list[np.random.Generator],
    ):
        self.og = og
        p = og.p
        m = len(generators)
        if m < 1:
            raise ValueError("at least one lane is required")
        self.p = p
        self.m = m
        self.gens = generators

        scale = np.asarray(scale, dtype=float)
        if scale.shape == (p, p):
            scale = np.broadcast_to(scale, (m, p, p))
        if scale.shape != (m, p, p):
            raise ValueError(f"scale has shape {scale.shape}, expected ({m}, {p}, {p})")
        alphas = np.asarray(alphas, dtype=float)
        if alphas.shape == (p,):
            alphas = np.broadcast_to(alphas, (m, p))
        if alphas.shape != (m, p):
            raise ValueError(f"alphas has shape {alphas.shape}, expected ({m}, {p})")
        self.alphas = np.ascontiguousarray(alphas)

        self.ind_pairs = [(i - 1, j - 1) for i, j in independent_pairs(og)]
        self.fill_pairs = [(i - 1, j - 1) for i, j in dependent_fill_pairs(og)]
        self.n_ind = len(self.ind_pairs)
        self.n_fill = len(self.fill_pairs)
        n_ent = self.n_ind + self.n_fill
        slot = {pair: t for t, pair in enumerate(self.ind_pairs)}
        slot.update(
            {pair: self.n_ind + f for f, pair in enumerate(self.fill_pairs)}
        )

        # fill programs: entry (i, j) = -(sum_t ent[a_t] ent[b_t] d[k_t]) / d[j]
        self.fill_a: list[np.ndarray] = []
        self.fill_b: list[np.ndarray] = []
        self.fill_k: list[np.ndarray] = []
        for i, j in self.fill_pairs:
            a_idx, b_idx, k_idx = [], [], []
            for k in range(j):
                sa = slot.get((i, k))
                sb = slot.get((j, k))
                if sa is not None and sb is not None:
                    a_idx.append(sa)
                    b_idx.append(sb)
                    k_idx.append(k)
            self.fill_a.append(np.asarray(a_idx, dtype=int))
            self.fill_b.append(np.asarray(b_idx, dtype=int))
            self.fill_k.append(np.asarray(k_idx, dtype=int))

        # per-column gathered scale blocks and entry indices
        rows_of: list[list[int]] = [[] for _ in range(p)]
        for i, j in self.ind_pairs + self.fill_pairs:
            rows_of[j].append(i)
        for r in rows_of:
            r.sort()
        self.col_rows = rows_of
        self.col_idx: list[np.ndarray] = []
        self.col_block: list[np.ndarray] = []
        for c in range(p):
            self.col_idx.append(
                np.asarray([slot[(r, c)] for r in rows_of[c]], dtype=int)
            )
            gathered = np.asarray([c] + rows_of[c], dtype=int)
            self.col_block.append(
                np.ascontiguousarray(scale[:, gathered[:, None], gathered[None, :]])
            )
        self.pos_of_ind = [
            1 + rows_of[c].index(i) for i, c in self.ind_pairs
        ]

        # affected sets: independent coordinates
        self.aff_fills_ind: list[list[int]] = []
        self.aff_cols_ind: list[list[int]] = []
        for t, (i, c) in enumerate(self.ind_pairs):
            touched = {t}
            flist = []
            for f in range(self.n_fill):
                refs = set(self.fill_a[f]) | set(self.fill_b[f])
                if refs & touched:
                    touched.add(self.n_ind + f)
                    flist.append(f)
            self.aff_fills_ind.append(flist)
            self.aff_cols_ind.append(
                sorted({c} | {self.fill_pairs[f][1] for f in flist})
                if flist
                else [c]
            )

        # affected sets: diagonal ratios (changing ratio k rescales the
        # trailing diagonal, so a fill in column >= k with a term using
        # an earlier diagonal entry moves, plus everything downstream)
        self.aff_fills_diag: list[list[int]] = []
        self.aff_cols_diag: list[list[int]] = []
        for k in range(p):
            touched: set[int] = set()
            flist = []
            for f in range(self.n_fill):
                col = self.fill_pairs[f][1]
                direct = col >= k and bool(np.any(self.fill_k[f] < k))
                refs = set(self.fill_a[f]) | set(self.fill_b[f])
                if direct or (refs & touched):
                    touched.add(self.n_ind + f)
                    flist.append(f)
            self.aff_fills_diag.append(flist)
            self.aff_cols_diag.append(sorted({self.fill_pairs[f][1] for f in flist}))

        # mutable lane state: entries (independent then fill), ratios,
        # plain diagonal, per-column quadratic forms, total energy
        self.ent = np.zeros((m, n_ent))
        self.dtilde = np.ones((m, p))
        self.d = np.ones((m, p))
        self.q = np.zeros((m, p))
        self.energy = np.zeros(m)
        self.iteration = 0
        self._refresh()

    # -- state plumbing -----------------------------------------------------

    @property
    def li(self) -> np.ndarray:
        """View of the independent entries, (lanes, n_ind)."""
        return self.ent[:, : self.n_ind]

    def set_state(self, li: np.ndarray, dtilde: np.ndarray) -> None:
        li = np.asarray(li, dtype=float).reshape(self.m, self.n_ind)
        dtilde = np.asarray(dtilde, dtype=float).reshape(self.m, self.p)
        if np.any(dtilde <= 0):
            raise ValueError("diagonal ratios must be positive")
        self.ent[:, : self.n_ind] = li
        self.dtilde = dtilde.copy()
        self._refresh()

    def current_factors(self) -> tuple[np.ndarray, np.ndarray]:
        """Copies of the lane coordinates (independent entries, ratios)."""
        return self.li.copy(), self.dtilde.copy()

    def _refresh(self) -> None:
        self.d = np.cumprod(self.dtilde, axis=1)
        for f in range(self.n_fill):
            self._store_fill(f, self.ent, self.d)
        for c in range(self.p):
            self.q[:, c] = self._col_q(c, self.ent)
        self.energy = np.einsum("mc,mc->m", self.d, self.q)

    def _store_fill(self, f: int, ent: np.ndarray, d: np.ndarray) -> None:
        s = np.einsum(
            "mt,mt,mt->m",
            ent[:, self.fill_a[f]],
            ent[:, self.fill_b[f]],
            d[:, self.fill_k[f]],
        )
        ent[:, self.n_ind + f] = -s / d[:, self.fill_pairs[f][1]]

    def _col_q(self, c: int, ent: np.ndarray) -> np.ndarray:
        v = np.empty((self.m, 1 + len(self.col_rows[c])))
        v[:, 0] = 1.0
        if len(self.col_rows[c]):
            v[:, 1:] = ent[:, self.col_idx[c]]
        return np.einsum("ma,mab,mb->m", v, self.col_block[c], v)

    # -- one-dimensional conditionals ----------------------------------------

    def _fit_ind(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        """Per-lane (a, b) with the energy locally a x^2 + b x + const in
        independent entry t."""
        i, c = self.ind_pairs[t]
        x0 = self.ent[:, t]
        if not self.aff_fills_ind[t]:
            # no fill moves with this entry: the energy is d_c q_c(x)
            # plus a constant, and q_c is an explicit quadratic
            pos = self.pos_of_ind[t]
            v = np.empty((self.m, 1 + len(self.col_rows[c])))
            v[:, 0] = 1.0
            v[:, 1:] = self.ent[:, self.col_idx[c]]
            block = self.col_block[c]
            r = np.einsum("ma,ma->m", block[:, pos, :], v)
            a = self.d[:, c] * block[:, pos, pos]
            b = 2.0 * self.d[:, c] * r - 2.0 * a * x0
        else:
            g0 = self.energy
            g_minus = self._energy_ind_at(t, x0 - 1.0)
            g_plus = self._energy_ind_at(t, x0 + 1.0)
            a = (g_plus + g_minus - 2.0 * g0) / 2.0
            b = (g_plus - g_minus) / 2.0 - 2.0 * a * x0
        if np.any(a <= 0.0):
            lane = int(np.argmax(a <= 0.0))
            raise ConditionalFitError(
                f"curvature in entry ({i + 1}, {c + 1}) is not positive (lane {lane})"
            )
        return a, b

    def _energy_ind_at(self, t: int, x: np.ndarray) -> np.ndarray:
        work = self.ent.copy()
        work[:, t] = x
        for f in self.aff_fills_ind[t]:
            self._store_fill(f, work, self.d)
        g = self.energy.copy()
        for c2 in self.aff_cols_ind[t]:
            g = g + self.d[:, c2] * (self._col_q(c2, work) - self.q[:, c2])
        return g

    def fit_independent(self, t: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-lane quadratic coefficients (a, b, c) of the energy in
        independent entry t; reads state without changing it."""
        a, b = self._fit_ind(t)
        x0 = self.ent[:, t]
        return a, b, self.energy - (a * x0 + b) * x0

    def _commit_ind(self, t: int, x_new: np.ndarray, a: np.ndarray, b: np.ndarray) -> None:
        c = self.ind_pairs[t][1]
        if not self.aff_fills_ind[t]:
            x0 = self.ent[:, t].copy()
            dg = (a * (x_new + x0) + b) * (x_new - x0)
            self.ent[:, t] = x_new
            self.q[:, c] += dg / self.d[:, c]
            self.energy = self.energy + dg
        else:
            self.ent[:, t] = x_new
            for f in self.aff_fills_ind[t]:
                self._store_fill(f, self.ent, self.d)
            for c2 in self.aff_cols_ind[t]:
                self.q[:, c2] = self._col_q(c2, self.ent)
            self.energy = np.einsum("mc,mc->m", self.d, self.q)

    def _fit_diag(
        self, k: int
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Per-lane (c1, cm1, pre, lin, P) with the energy equal to
        c1 x + cm1 / x + const in diagonal ratio k; `pre` is the energy
        of columns left of k, `lin` the exact linear coefficient when no
        fill moves, and P the trailing diagonal divided by the current
        ratio (so d[:, k:] = P x)."""
        t0 = self.dtilde[:, k]
        pre = np.einsum("mc,mc->m", self.d[:, :k], self.q[:, :k])
        P = self.d[:, k:] / t0[:, None]
        lin = np.einsum("mc,mc->m", P, self.q[:, k:])
        if not self.aff_fills_diag[k]:
            if np.any(lin <= 0.0):
                lane = int(np.argmax(lin <= 0.0))
                raise ConditionalFitError(
                    f"linear coefficient of diagonal ratio {k + 1} is not "
                    f"positive (lane {lane})"
                )
            return lin, np.zeros(self.m), pre, lin, P
        g_mid = pre + t0 * lin
        g_lo = self._energy_diag_at(k, t0 / 2.0, pre, lin, P)
        g_hi = self._energy_diag_at(k, 2.0 * t0, pre, lin, P)
        a_diff = g_hi - g_mid
        b_diff = g_mid - g_lo
        c1 = (2.0 * a_diff - b_diff) / (1.5 * t0)
        cm1 = (a_diff - 2.0 * b_diff) * 2.0 * t0 / 3.0
        ref = np.maximum(1.0, np.maximum(np.abs(g_mid), np.abs(g_hi)))
        if np.any(c1 <= 1e-12 * ref):
            lane = int(np.argmax(c1 <= 1e-12 * ref))
            raise ConditionalFitError(
                f"linear coefficient of diagonal ratio {k + 1} is not positive "
                f"(lane {lane})"
            )
        bad = cm1 < -1e-10 * ref
        if np.any(bad):
            lane = int(np.argmax(bad))
            raise ConditionalFitError(
                f"reciprocal coefficient of diagonal ratio {k + 1} is negative "
                f"({cm1[lane]:g}, lane {lane})"
            )
        return c1, np.maximum(cm1, 0.0), pre, lin, P

    def _energy_diag_at(
        self,
        k: int,
        t: np.ndarray,
        pre: np.ndarray,
        lin: np.ndarray,
        P: np.ndarray,
    ) -> np.ndarray:
        d_work = self.d.copy()
        d_work[:, k:] = P * t[:, None]
        work = self.ent.copy()
        for f in self.aff_fills_diag[k]:
            self._store_fill(f, work, d_work)
        g = pre + t * lin
        for c2 in self.aff_cols_diag[k]:
            g = g + t * P[:, c2 - k] * (self._col_q(c2, work) - self.q[:, c2])
        return g

    def fit_diagonal(self, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-lane coefficients (c1, cm1, c0) of the energy in diagonal
        ratio k (0-based): g(x) = c1 x + cm1 / x + c0; reads state
        without changing it."""
        c1, cm1, pre, lin, _ = self._fit_diag(k)
        if not self.aff_fills_diag[k]:
            return c1, cm1, pre
        t0 = self.dtilde[:, k]
        g_mid = pre + t0 * lin
        return c1, cm1, g_mid - c1 * t0 - cm1 / t0

    def _commit_diag(
        self,
        k: int,
        t_new: np.ndarray,
        pre: np.ndarray,
        lin: np.ndarray,
        P: np.ndarray,
    ) -> None:
        self.dtilde[:, k] = t_new
        self.d[:, k:] = P * t_new[:, None]
        if not self.aff_fills_diag[k]:
            self.energy = pre + t_new * lin
        else:
            for f in self.aff_fills_diag[k]:
                self._store_fill(f, self.ent, self.d)
            for c2 in self.aff_cols_diag[k]:
                self.q[:, c2] = self._col_q(c2, self.ent)
            self.energy = np.einsum("mc,mc->m", self.d, self.q)

    # -- sweeping -------------------------------------------------------------

    def sweep(self) -> None:
        """One full scan: independent entries in column-major order, then
        diagonal ratios in ascending order.

        Each lane pre-draws one block of standard normals (entry updates)
        and one block of unit-scale gammas (ratio updates) at the start
        of the sweep; ratios whose conditional has a reciprocal term
        draw from the generalized inverse Gaussian inline instead.  At
        the end the caches are recomputed from scratch so incremental
        updates never accumulate drift across sweeps.
        """
        m = self.m
        z = np.empty((m, self.n_ind))
        gam = np.empty((m, self.p))
        for lane in range(m):
            if self.n_ind:
                z[lane] = self.gens[lane].standard_normal(self.n_ind)
            gam[lane] = self.gens[lane].gamma(self.alphas[lane] + 1.0)
        for t in range(self.n_ind):
            a, b = self._fit_ind(t)
            x_new = -b / (2.0 * a) + z[:, t] / np.sqrt(a)
            self._commit_ind(t, x_new, a, b)
        for k in range(self.p):
            c1, cm1, pre, lin, P = self._fit_diag(k)
            if not self.aff_fills_diag[k]:
                t_new = 2.0 * gam[:, k] / c1
            else:
                lam = self.alphas[:, k] + 1.0
                t_new = np.empty(m)
                for lane in range(m):
                    t_new[lane] = sample_gig(
                        GigParams(lam[lane], cm1[lane], c1[lane]), self.gens[lane]
                    )
            self._commit_diag(k, t_new, pre, lin, P)
        self._refresh()
        self.iteration += 1


def _compile_engine(
    params: GWishartParams,
    data: tuple[np.ndarray, int] | None,
    generators: list[np.random.Generator],
    *,
    check_gb: bool = True,
) -> GibbsEngine:
    og = params.ordered_graph
    if check_gb:
        ok, violations = is_gb_ordering(og.graph, og.ordering)
        if not ok:
            raise NotGeneralizedBartlettError(
                f"the ordering is not generalized Bartlett: vertex triple "
                f"{violations[0]} forms a fill triangle with no graph edge",
                violations,
            )
    S, n = _check_data(params, data)
    scale = to_rank_space(og, params.U + n * S)
    alphas = AlphaExponents.compute(n, params.delta_by_rank(), nu_counts(og)).alpha
    return GibbsEngine(og, scale, alphas, generators)


def run_lanes(
    engine: GibbsEngine,
    *,
    iters: int,
    burnin: int,
    thin: int = 1,
    keep_sigma: bool = False,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Drive an engine for `iters` sweeps, retaining every `thin`-th
    state after `burnin`; returns Omega draws in original vertex labels,
    shaped (lanes, retained, p, p), plus their inverses if requested."""
    if iters <= burnin:
        raise ValueError(f"iters ({iters}) must exceed burnin ({burnin})")
    if thin < 1:
        raise ValueError("thinning stride must be at least 1")
    if (iters - burnin) < thin:
        raise ValueError("no draws would be retained")
    og = engine.og
    li_snap: list[np.ndarray] = []
    dt_snap: list[np.ndarray] = []
    for it in range(1, iters + 1):
        engine.sweep()
        if it > burnin and (it - burnin) % thin == 0:
            li_lane, dt_lane = engine.current_factors()
            li_snap.append(li_lane)
            dt_snap.append(dt_lane)
    li_arr = np.stack(li_snap)  # (retained, lanes, n_ind)
    dt_arr = np.stack(dt_snap)
    retained = li_arr.shape[0]
    m, p = engine.m, og.p
    ranks0 = np.asarray(og.ordering.ranks, dtype=int) - 1
    omega = np.empty((m, retained, p, p))
    sigma = np.empty((m, retained, p, p)) if keep_sigma else None
    for lane in range(m):
        d_lane = np.cumprod(dt_arr[:, lane], axis=1)
        L = complete_columns_batch(og, li_arr[:, lane], d_lane)
        om = np.einsum("rik,rk,rjk->rij", L, d_lane, L)
        omega[lane] = om[:, ranks0][:, :, ranks0]
        if sigma is not None:
            sigma[lane] = np.linalg.inv(omega[lane])
    return omega, sigma


# ---------------------------------------------------------------------------
# chain driver


@dataclass
class GibbsState:
    """One chain's position: independent entries, diagonal ratios, sweep
    counter, and the chain's generator (advanced in place by updates)."""

    li: IndependentEntries
    dtilde: TildeD
    iteration: int
    rng: np.random.Generator

    @classmethod
    def initial(cls, og: OrderedGraph, seed: int, chain_index: int = 0) -> "GibbsState":
        return cls(
            IndependentEntries.zeros(og),
            TildeD(np.ones(og.p)),
            0,
            chain_generator(seed, chain_index),
        )


def gibbs_step(
    state: GibbsState,
    params: GWishartParams,
    data: tuple[np.ndarray, int] | None = None,
) -> GibbsState:
    """One full sweep of the coordinate sampler.

    Compiles the sweep structure on every call, which is fine for
    stepwise use; long chains should go through `gibbs_run`, which
    compiles once.  The draws consumed from `state.rng` match what
    `gibbs_run` consumes per sweep, so stepping N times from the initial
    state reproduces a run of N sweeps exactly.
    """
    engine = _compile_engine(params, data, [state.rng])
    og = params.ordered_graph
    engine.set_state(state.li.to_vector(og)[None, :], state.dtilde.values[None, :])
    engine.sweep()
    li_vec, dt = engine.current_factors()
    return GibbsState(
        IndependentEntries.from_vector(og, li_vec[0]),
        TildeD(dt[0]),
        state.iteration + 1,
        state.rng,
    )


def gibbs_run(
    params: GWishartParams,
    data: tuple[np.ndarray, int] | None = None,
    *,
    iters: int = 3000,
    burnin: int = 2000,
    thin: int = 1,
    seed: int = 0,
    chain_index: int = 0,
    level: float = 0.95,
    keep_sigma: bool = False,
    init: tuple[IndependentEntries, TildeD] | None = None,
) -> ChainSummary:
    """Run one chain and summarize the retained draws.

    The chain starts at the identity matrix (all independent entries 0,
    all diagonal ratios 1) unless `init` overrides it.  Deterministic
    given (seed, chain_index).
    """
    return gibbs_run_many(
        params,
        data,
        iters=iters,
        burnin=burnin,
        thin=thin,
        seed=seed,
        chain_indices=[chain_index],
        level=level,
        keep_sigma=keep_sigma,
        init=init,
    )[0]


def gibbs_run_many(
    params: GWishartParams,
    data: tuple[np.ndarray, int] | None = None,
    *,
    iters: int = 3000,
    burnin: int = 2000,
    thin: int = 1,
    seed: int = 0,
    chain_indices: list[int] | None = None,
    n_chains: int | None = None,
    level: float = 0.95,
    keep_sigma: bool = False,
    init: tuple[IndependentEntries, TildeD] | None = None,
) -> list[ChainSummary]:
    """Run several chains as lanes of one compiled engine.

    Lane arithmetic is elementwise, so chain k here is bit-identical to
    `gibbs_run(..., chain_index=k)` run on its own.
    """
    if n_chains is not None and chain_indices is None:
        chain_indices = list(range(n_chains))
    if not chain_indices:
        raise ValueError("no chains requested")
    og = params.ordered_graph
    gens = [chain_generator(seed, c) for c in chain_indices]
    engine = _compile_engine(params, data, gens)
    if init is not None:
        li0, dt0 = init
        engine.set_state(
            np.tile(li0.to_vector(og), (engine.m, 1)),
            np.tile(dt0.values, (engine.m, 1)),
        )
    omega, sigma = run_lanes(
        engine, iters=iters, burnin=burnin, thin=thin, keep_sigma=keep_sigma
    )
    return [
        _summarize(
            omega[lane],
            level=level,
            seed=seed,
            iters=iters,
            burnin=burnin,
            thin=thin,
            chain_index=c,
            sigma_draws=None if sigma is None else sigma[lane],
        )
        for lane, c in enumerate(chain_indices)
    ]


# ---------------------------------------------------------------------------
# trailing block update


def _trailing_restriction(og: OrderedGraph, p1: int) -> OrderedGraph:
    """Induced subgraph on ranks p1+1..p, relabeled 1..p-p1 in rank order."""
    p = og.p
    keep = list(range(p1 + 1, p + 1))
    pos = {r: t + 1 for t, r in enumerate(keep)}
    edges = [(pos[j], pos[i]) for j, i in og.edges_sigma if j > p1 and i > p1]
    return OrderedGraph(Graph.of(len(keep), edges), Ordering.identity(len(keep)))


def block_update_trailing(
    state: GibbsState, params: GWishartParams, p1: int
) -> GibbsState:
    """Jointly redraw the independent entries in columns p1+1..p from
    their exact multivariate normal conditional.

    Requires the induced subgraph on ranks p1+1..p to be decomposable
    with the inherited elimination order a perfect elimination ordering;
    under that condition the trace energy is a quadratic form in the
    block, recovered here from evaluations at the zero vector, the unit
    vectors with both signs, and the pairwise unit sums (m(m+3)/2 + 1
    evaluations for block size m) and certified at one extra point.
    Diagonal ratios and entries in columns 1..p1 are untouched.
    """
    og = params.ordered_graph
    p = og.p
    if not 0 <= p1 < p:
        raise ValueError(f"split index {p1} outside 0..{p - 1}")
    trailing = _trailing_restriction(og, p1)
    leftover = triangulate(trailing).fill
    if leftover:
        raise ValueError(
            f"the subgraph on ranks {p1 + 1}..{p} is not decomposable with the "
            f"inherited order as a perfect elimination ordering (fill at "
            f"relabeled pairs {sorted(leftover)[:3]})"
        )
    coords = [(i, j) for (i, j) in independent_pairs(og) if j > p1]
    if not coords:
        return GibbsState(state.li, state.dtilde, state.iteration, state.rng)
    scale = to_rank_space(og, params.U)
    base = dict(state.li.values)

    def energy_at(values: np.ndarray) -> float:
        li = IndependentEntries({**base, **dict(zip(coords, values))})
        return energy(og, li, state.dtilde, scale)

    n_blk = len(coords)
    g0 = energy_at(np.zeros(n_blk))
    A = np.zeros((n_blk, n_blk))
    b = np.zeros(n_blk)
    for i in range(n_blk):
        e = np.zeros(n_blk)
        e[i] = 1.0
        g_plus = energy_at(e)
        g_minus = energy_at(-e)
        A[i, i] = (g_plus + g_minus - 2.0 * g0) / 2.0
        b[i] = (g_plus - g_minus) / 2.0
    for i in range(n_blk):
        for j in range(i + 1, n_blk):
            e = np.zeros(n_blk)
            e[i] = e[j] = 1.0
            g_ij = energy_at(e)
            A[i, j] = A[j, i] = (g_ij - g0 - A[i, i] - A[j, j] - b[i] - b[j]) / 2.0
    e_cert = np.zeros(n_blk)
    e_cert[0] = 2.0
    g_cert = energy_at(e_cert)
    ref = max(1.0, abs(g0), abs(g_cert))
    if abs(g0 + 4.0 * A[0, 0] + 2.0 * b[0] - g_cert) > 1e-6 * ref:
        raise ConditionalFitError(
            "the trace energy is not a quadratic form in the trailing block: "
            "the ordering is not generalized Bartlett in these coordinates"
        )
    try:
        root = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            "recovered block precision matrix is not positive definite"
        )
    mean = -0.5 * cho_solve((root, True), b)
    z = state.rng.standard_normal(n_blk)
    draw = mean + solve_triangular(root.T, z, lower=False)
    new_vals = dict(state.li.values)
    new_vals.update(zip(coords, draw))
    return GibbsState(
        IndependentEntries(new_vals), state.dtilde, state.iteration, state.rng
    )


# ---------------------------------------------------------------------------
# exact sampling on decomposable graphs


def _require_peo(og: OrderedGraph, what: str) -> None:
    fills = dependent_fill_pairs(og)
    if fills:
        raise ValueError(
            f"{what} needs a decomposable graph with the ordering a perfect "
            f"elimination ordering; fill remains at rank pairs {fills[:3]}"
        )


def _column_conditionals(
    og: OrderedGraph, scale: np.ndarray
) -> list[tuple[np.ndarray, np.ndarray, float, np.ndarray]]:
    """Per rank column j: later-neighbor rows (0-based), conditional mean
    vector e_j, scalar c_j, and the Cholesky root of the neighbor block.

    e_j solves the later-neighbor block against the column of the scale,
    and c_j = scale_jj + scale_{N_j, j} . e_j is the Schur complement of
    that block in the bordered scale.
    """
    p = og.p
    rows_of: list[list[int]] = [[] for _ in range(p)]
    for i, j in independent_pairs(og):
        rows_of[j - 1].append(i - 1)
    out = []
    for c in range(p):
        rows = np.asarray(sorted(rows_of[c]), dtype=int)
        if rows.size == 0:
            out.append((rows, np.zeros(0), float(scale[c, c]), np.zeros((0, 0))))
            continue
        block = scale[np.ix_(rows, rows)]
        w = scale[rows, c]
        root = np.linalg.cholesky(block)
        e = -cho_solve((root, True), w)
        out.append((rows, e, float(scale[c, c] + w @ e), root))
    return out


def direct_sample_many(
    params: GWishartParams, n_draws: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized exact draws for a decomposable graph: returns L of
    shape (n_draws, p, p) and D of shape (n_draws, p), in rank space.

    Column by column, D_j is Gamma((nu_j + delta_j)/2 + 1, rate c_j/2)
    and the column's independent entries given D_j are normal with mean
    e_j and covariance (later-neighbor block)^-1 / D_j.
    """
    og = params.ordered_graph
    _require_peo(og, "direct sampling")
    p = og.p
    scale = to_rank_space(og, params.U)
    delta = params.delta_by_rank()
    nu = nu_counts(og)
    cols = _column_conditionals(og, scale)
    L = np.zeros((n_draws, p, p))
    L[:, np.arange(p), np.arange(p)] = 1.0
    D = np.empty((n_draws, p))
    for c in range(p):
        rows, e, cval, root = cols[c]
        shape = (nu[c] + delta[c]) / 2.0 + 1.0
        D[:, c] = rng.gamma(shape, 2.0 / cval, size=n_draws)
        if rows.size:
            z = rng.standard_normal((n_draws, rows.size))
            mix = solve_triangular(root.T, z.T, lower=False).T
            L[:, rows, c] = e + mix / np.sqrt(D[:, c])[:, None]
    return L, D


def direct_decomposable_sample(
    params: GWishartParams, rng: np.random.Generator
) -> CholeskyFactor:
    """One exact draw (rank space) for a decomposable graph."""
    L, D = direct_sample_many(params, 1, rng)
    return CholeskyFactor(params.ordered_graph, L[0], D[0])


def closed_form_mean(params: GWishartParams) -> np.ndarray:
    """Exact E(Omega) for a decomposable graph, in original labels.

    Column by column, the mean splits into the embedded inverse of the
    later-neighbor scale block plus a rank-one contribution through the
    conditional means: E(Omega) = sum_j [block_j^-1]^0 + e' H e with H
    diagonal, H_jj = E(D_j) = (delta_j + nu_j + 2) / c_j, and row j of e
    holding 1 at j and e_j on the later neighbors.
    """
    og = params.ordered_graph
    _require_peo(og, "the closed-form mean")
    p = og.p
    scale = to_rank_space(og, params.U)
    delta = params.delta_by_rank()
    nu = nu_counts(og)
    cols = _column_conditionals(og, scale)
    total = np.zeros((p, p))
    e_mat = np.zeros((p, p))
    h_diag = np.empty(p)
    for c in range(p):
        rows, e, cval, root = cols[c]
        e_mat[c, c] = 1.0
        h_diag[c] = (delta[c] + nu[c] + 2.0) / cval
        if rows.size:
            inv_block = cho_solve((root, True), np.eye(rows.size))
            total[np.ix_(rows, rows)] += inv_block
            e_mat[c, rows] = e
    total += (e_mat.T * h_diag) @ e_mat
    return to_original_labels(og, total)


# ---------------------------------------------------------------------------
# triangular-root baselines


def triangular_scale_root(og: OrderedGraph, U: np.ndarray) -> np.ndarray:
    """Upper-triangular T with U^-1 = T'T, in rank space."""
    u_rank = to_rank_space(og, U)
    u_inv = np.linalg.inv(u_rank)
    u_inv = (u_inv + u_inv.T) / 2.0
    return np.linalg.cholesky(u_inv).T


def _nonedge_pairs(og: OrderedGraph) -> list[tuple[int, int]]:
    """Strictly-upper rank pairs (i, j), i < j, off the edge set; these
    are the entries the completion determines (0-based)."""
    edges = {(j - 1, i - 1) for j, i in og.edges_sigma}
    p = og.p
    return [(i, j) for j in range(p) for i in range(j) if (i, j) not in edges]


def complete_triangular_root(
    og: OrderedGraph, psi: np.ndarray, T: np.ndarray
) -> np.ndarray:
    """Fill the non-edge entries of upper-triangular factors so that
    Omega = (psi T)' (psi T) lands exactly on the graph's zero pattern.

    `psi` is one (p, p) factor or a batch (m, p, p) with diagonal and
    edge entries already set.  Each non-edge (i, j) is resolved from the
    constraint Omega_ij = 0, which in terms of Phi = psi T reads

        psi_ij = -(sum_{l=i..j-1} psi_il T_lj) / T_jj
                 - (sum_{k<i} Phi_ki Phi_kj) / (T_ii T_jj psi_ii),

    processed in ascending column order (ascending row within a column)
    so every referenced entry is already known.  With T = I this is the
    classic completion psi_ij = -(sum_{k<i} psi_ki psi_kj) / psi_ii.
    """
    psi = np.asarray(psi, dtype=float)
    squeeze = psi.ndim == 2
    if squeeze:
        psi = psi[None]
    psi = psi.copy()
    by_col: dict[int, list[int]] = {}
    for i, j in _nonedge_pairs(og):
        by_col.setdefault(j, []).append(i)
    for j in sorted(by_col):
        for i in sorted(by_col[j]):
            head = np.einsum("ml,l->m", psi[:, i, i:j], T[i:j, j]) / T[j, j]
            if i > 0:
                phi_i = np.einsum("mkl,l->mk", psi[:, :i, : i + 1], T[: i + 1, i])
                phi_j = np.einsum("mkl,l->mk", psi[:, :i, : j + 1], T[: j + 1, j])
                cross = np.einsum("mk,mk->m", phi_i, phi_j)
                head = head + cross / (T[i, i] * T[j, j] * psi[:, i, i])
            psi[:, i, j] = -head
    return psi[0] if squeeze else psi


@dataclass
class ARResult:
    """Outcome of an accept-reject attempt sequence.

    `omega` (original labels) and `factor` (rank space) are None when
    the attempt budget ran out; `acceptance_estimate` averages the
    per-attempt acceptance probability exp(-ss/2) over all attempts,
    which is a smoother estimate of the acceptance rate than the binary
    accept frequency."""

    omega: np.ndarray | None
    factor: CholeskyFactor | None
    attempts: int
    acceptance_estimate: float

    @property
    def accepted(self) -> bool:
        return self.omega is not None


def _draw_root_batch(
    og: OrderedGraph,
    count: int,
    df: np.ndarray,
    T: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw `count` upper factors: diagonal entries are square roots of
    chi-square variables (degrees of freedom per column from `df`), edge
    entries standard normal, non-edges completed; returns (psi, ss) with
    ss the per-draw sum of squared non-edge entries."""
    p = og.p
    psi = np.zeros((count, p, p))
    for c in range(p):
        psi[:, c, c] = np.sqrt(rng.chisquare(df[c], size=count))
    edges0 = sorted((j - 1, i - 1) for j, i in og.edges_sigma)
    if edges0:
        z = rng.standard_normal((count, len(edges0)))
        for t, (i, j) in enumerate(edges0):
            psi[:, i, j] = z[:, t]
    psi = complete_triangular_root(og, psi, T)
    nonedges = _nonedge_pairs(og)
    if nonedges:
        rows = [i for i, _ in nonedges]
        cols = [j for _, j in nonedges]
        vals = psi[:, rows, cols]
        ss = np.einsum("mk,mk->m", vals, vals)
    else:
        ss = np.zeros(count)
    return psi, ss


def _factor_from_root(og: OrderedGraph, psi: np.ndarray, T: np.ndarray) -> CholeskyFactor:
    phi = psi @ T
    diag = np.diag(phi).copy()
    D = diag**2
    L = (phi / diag[:, None]).T
    return CholeskyFactor(og, L, D)


def _ar_dfs(params: GWishartParams, df_shift: int) -> np.ndarray:
    return params.delta_by_rank() + nu_counts(params.ordered_graph) + float(df_shift)


def ar_sample(
    params: GWishartParams,
    data: tuple[np.ndarray, int] | None = None,
    *,
    max_attempts: int = 100_000,
    rng: np.random.Generator,
    df_shift: int = 2,
) -> ARResult:
    """Accept-reject draw via the triangular root.

    Proposes factors with chi diagonal (degrees of freedom delta_i +
    nu_i + df_shift) and standard normal edge entries, completes the
    non-edges, and accepts with probability exp(-ss/2) where ss is the
    sum of squared completed entries.  df_shift = 2 makes the accepted
    law match the coordinate sampler's target; 0 is kept for comparison
    and targets the law with every shape lowered by 2.

    Returns the first accepted draw; if the budget is exhausted the
    result carries only the attempt count and the smoothed acceptance
    estimate (no draw).
    """
    post = posterior_params(params, *data) if data is not None else params
    og = post.ordered_graph
    T = triangular_scale_root(og, post.U)
    df = _ar_dfs(post, df_shift)
    attempts = 0
    weight_sum = 0.0
    chunk = 64
    while attempts < max_attempts:
        count = min(chunk, max_attempts - attempts)
        psi, ss = _draw_root_batch(og, count, df, T, rng)
        u = rng.random(count)
        hits = np.flatnonzero(np.log(u) < -ss / 2.0)
        if hits.size:
            used = int(hits[0]) + 1
            attempts += used
            weight_sum += float(np.exp(-ss[:used] / 2.0).sum())
            factor = _factor_from_root(og, psi[hits[0]], T)
            return ARResult(
                _omega_from_factor(og, factor),
                factor,
                attempts,
                weight_sum / attempts,
            )
        attempts += count
        weight_sum += float(np.exp(-ss / 2.0).sum())
        chunk = min(4 * chunk, 65_536)
    return ARResult(None, None, attempts, weight_sum / max(attempts, 1))


def _omega_from_factor(og: OrderedGraph, factor: CholeskyFactor) -> np.ndarray:
    omega = (factor.L * factor.D) @ factor.L.T
    return to_original_labels(og, omega)


def ar_sample_many(
    params: GWishartParams,
    n_draws: int,
    *,
    max_attempts: int = 1_000_000,
    rng: np.random.Generator,
    df_shift: int = 2,
) -> tuple[np.ndarray, int, float]:
    """Collect accepted draws in bulk; returns (omegas in original
    labels, attempts used, smoothed acceptance estimate).  Stops early
    with however many draws were accepted once the budget is spent."""
    og = params.ordered_graph
    T = triangular_scale_root(og, params.U)
    df = _ar_dfs(params, df_shift)
    ranks0 = np.asarray(og.ordering.ranks, dtype=int) - 1
    collected: list[np.ndarray] = []
    have = 0
    attempts = 0
    weight_sum = 0.0
    while have < n_draws and attempts < max_attempts:
        count = min(max(256, 2 * (n_draws - have)), max_attempts - attempts, 100_000)
        psi, ss = _draw_root_batch(og, count, df, T, rng)
        u = rng.random(count)
        hits = np.flatnonzero(np.log(u) < -ss / 2.0)[: n_draws - have]
        attempts += count
        weight_sum += float(np.exp(-ss / 2.0).sum())
        if hits.size:
            phi = psi[hits] @ T
            omega = np.einsum("mki,mkj->mij", phi, phi)
            collected.append(omega[:, ranks0][:, :, ranks0])
            have += hits.size
    omegas = (
        np.concatenate(collected, axis=0) if collected else np.zeros((0, og.p, og.p))
    )
    return omegas, attempts, weight_sum / max(attempts, 1)


def mh_run(
    params: GWishartParams,
    N: int,
    seed: int,
    *,
    burnin: int = 0,
    thin: int = 1,
    level: float = 0.95,
    df_shift: int = 2,
) -> ChainSummary:
    """Independence Metropolis chain on the triangular root.

    Each proposal draws the factor entries fresh (chi diagonal with
    degrees of freedom delta_i + nu_i + df_shift, standard normal
    edges), completes the non-edges, and accepts with log probability
    min(0, (ss_current - ss_proposed) / 2) where ss sums the squared
    completed entries.  All proposals and the acceptance uniforms are
    drawn up front, so the run is deterministic given the seed.

    df_shift = 2 (default) targets the same law as the coordinate
    sampler; df_shift = 0 keeps the unshifted proposal for comparison,
    which targets the law with every shape lowered by 2.
    """
    if N < 1:
        raise ValueError("at least one iteration is required")
    if not 0 <= burnin < N:
        raise ValueError(f"burn-in ({burnin}) must lie in 0..N-1")
    og = params.ordered_graph
    rng = chain_generator(seed)
    T = triangular_scale_root(og, params.U)
    df = _ar_dfs(params, df_shift)
    psi, ss = _draw_root_batch(og, N + 1, df, T, rng)
    log_u = np.log(rng.random(N))
    idx = np.empty(N + 1, dtype=int)
    idx[0] = 0
    cur = 0
    accepted = 0
    for t in range(1, N + 1):
        if log_u[t - 1] < (ss[cur] - ss[t]) / 2.0:
            cur = t
            accepted += 1
        idx[t] = cur
    keep = np.array(
        [t for t in range(1, N + 1) if t > burnin and (t - burnin) % thin == 0],
        dtype=int,
    )
    phi = psi[idx[keep]] @ T
    omega = np.einsum("mki,mkj->mij", phi, phi)
    ranks0 = np.asarray(og.ordering.ranks, dtype=int) - 1
    omega = omega[:, ranks0][:, :, ranks0]
    return _summarize(
        omega,
        level=level,
        seed=seed,
        iters=N,
        burnin=burnin,
        thin=thin,
        acceptance_rate=accepted / N,
    )
