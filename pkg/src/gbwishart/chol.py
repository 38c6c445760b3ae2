"""Modified Cholesky parametrization of sparse precision matrices.

A precision matrix with zero pattern given by an ordered graph is written
Omega = L D L^T with L unit lower triangular and D positive diagonal.
Everything in this module lives in rank space: row/column r of a matrix
corresponds to the vertex of rank r, so the sparsity constraints sit on
the rank pairs of the ordered edge set.  Use `to_rank_space` /
`to_original_labels` at the boundary when matrices are indexed by the
original vertex labels.

Below the diagonal, entries split into independent coordinates (the
edges) and dependent entries determined by the zero constraints through
the column recursion

    L_ij = - sum_{k<j} L_ik L_jk D_k / D_j.

Dependent entries are functionally nonzero only on the triangulation
fill of the ordering; entries off the fill are stored as exact zeros.

The diagonal is handled through the ratio reparametrization
Dtilde_1 = D_1, Dtilde_k = D_k / D_{k-1}, under which the trace energy
tr(Omega * U) of a generalized Bartlett ordering is exactly quadratic in
each independent entry and exactly linear-plus-reciprocal in each
Dtilde_k.  The fits recover those coefficients from exact energy
evaluations at 3 points plus a 4th-point consistency check, which is
also what certifies the functional form at run time.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graphs import OrderedGraph, triangulate

ZERO_PATTERN_TOL = 1e-10
FIT_RESIDUAL_TOL = 1e-6


class NotPositiveDefiniteError(ValueError):
    """Matrix failed the leading-minor positivity test."""


class ZeroPatternError(ValueError):
    """Matrix carries a nonzero entry at a non-edge of the ordered graph."""


class ConditionalFitError(ValueError):
    """The trace energy does not have the assumed one-dimensional form.

    Raised when a 4th-point consistency check fails (the ordering is not
    generalized Bartlett in that coordinate) or when the recovered
    leading coefficient is not positive.
    """


# ---------------------------------------------------------------------------
# coordinate structure of an ordered graph


def independent_pairs(og: OrderedGraph) -> list[tuple[int, int]]:
    """Below-diagonal edge coordinates (i, j), i > j, in rank space,
    column-major order (ascending j, then ascending i): the canonical
    coordinate layout used by vectors of independent entries and by the
    Gibbs sweep."""
    pairs = [(i, j) for (j, i) in og.edges_sigma]
    pairs.sort(key=lambda t: (t[1], t[0]))
    return pairs


def dependent_fill_pairs(og: OrderedGraph) -> list[tuple[int, int]]:
    """Dependent coordinates carrying the completion recursion: the
    triangulation fill of the ordering, below-diagonal rank pairs in
    column-major order.  Dependent entries off this set are identically
    zero."""
    pairs = [(i, j) for (j, i) in triangulate(og).fill]
    pairs.sort(key=lambda t: (t[1], t[0]))
    return pairs


def nu_counts(og: OrderedGraph) -> np.ndarray:
    """Per-column edge counts nu_j = #{i > j : (i, j) in the ordered edge
    set}, the number of independent entries in column j."""
    nu = np.zeros(og.p, dtype=int)
    for _, j in independent_pairs(og):
        nu[j - 1] += 1
    return nu


# ---------------------------------------------------------------------------
# domain types


@dataclass
class IndependentEntries:
    """Free below-diagonal entries of L, keyed by rank pairs (i, j), i > j."""

    values: dict[tuple[int, int], float]

    @classmethod
    def zeros(cls, og: OrderedGraph) -> "IndependentEntries":
        return cls({pair: 0.0 for pair in independent_pairs(og)})

    @classmethod
    def from_vector(cls, og: OrderedGraph, vec: np.ndarray) -> "IndependentEntries":
        pairs = independent_pairs(og)
        if len(vec) != len(pairs):
            raise ValueError(f"expected {len(pairs)} entries, got {len(vec)}")
        return cls({pair: float(x) for pair, x in zip(pairs, vec)})

    def to_vector(self, og: OrderedGraph) -> np.ndarray:
        return np.array([self.values[pair] for pair in independent_pairs(og)])


@dataclass
class TildeD:
    """Positive diagonal in ratio form: D_k = prod_{l<=k} values_l."""

    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or np.any(self.values <= 0):
            raise ValueError("diagonal ratios must be a vector of positives")

    def to_d(self) -> np.ndarray:
        return np.cumprod(self.values)

    @classmethod
    def from_d(cls, d: np.ndarray) -> "TildeD":
        d = np.asarray(d, dtype=float)
        if np.any(d <= 0):
            raise ValueError("diagonal must be positive")
        ratios = d.copy()
        ratios[1:] = d[1:] / d[:-1]
        return cls(ratios)


@dataclass(frozen=True)
class AlphaExponents:
    """Power of each diagonal ratio in the posterior density.

    alpha_k = (p - k) + sum_{l=k}^{p} ((n + delta_l) / 2 + nu_l): the
    (p - k) comes from the Jacobian of D -> Dtilde, the sum collects the
    exponents of every D_l that the ratio Dtilde_k divides.
    """

    n: int
    delta: tuple[float, ...]
    nu: tuple[int, ...]

    @cached_property
    def alpha(self) -> np.ndarray:
        p = len(self.delta)
        delta = np.asarray(self.delta, dtype=float)
        nu = np.asarray(self.nu, dtype=float)
        tail = np.cumsum(((self.n + delta) / 2.0 + nu)[::-1])[::-1]
        return (p - np.arange(1, p + 1)) + tail

    @classmethod
    def compute(cls, n: int, delta: np.ndarray, nu: np.ndarray) -> "AlphaExponents":
        return cls(int(n), tuple(float(x) for x in delta), tuple(int(x) for x in nu))


@dataclass
class CholeskyFactor:
    """Unit-lower-triangular L and positive diagonal D, in rank space."""

    ordered_graph: OrderedGraph
    L: np.ndarray
    D: np.ndarray


# ---------------------------------------------------------------------------
# completion and assembly


def complete_columns_batch(
    og: OrderedGraph, li_mat: np.ndarray, d_mat: np.ndarray
) -> np.ndarray:
    """Build a batch of completed L matrices.

    li_mat has one row per state, columns in `independent_pairs` order;
    d_mat holds the corresponding (plain, not ratio) diagonals.  Returns
    an (m, p, p) array.  Dependent entries are computed column by column;
    the recursion for column j only reads columns strictly left of j, so
    any within-column order works.
    """
    p = og.p
    li_mat = np.atleast_2d(np.asarray(li_mat, dtype=float))
    d_mat = np.atleast_2d(np.asarray(d_mat, dtype=float))
    m = li_mat.shape[0]
    if np.any(d_mat <= 0):
        raise ValueError("diagonal entries must be positive")
    L = np.zeros((m, p, p))
    L[:, np.arange(p), np.arange(p)] = 1.0
    for idx, (i, j) in enumerate(independent_pairs(og)):
        L[:, i - 1, j - 1] = li_mat[:, idx]
    for i, j in dependent_fill_pairs(og):
        s = np.einsum(
            "mk,mk,mk->m",
            L[:, i - 1, : j - 1],
            L[:, j - 1, : j - 1],
            d_mat[:, : j - 1],
        )
        L[:, i - 1, j - 1] = -s / d_mat[:, j - 1]
    return L


def complete_factor(
    og: OrderedGraph, li: IndependentEntries, d: np.ndarray
) -> CholeskyFactor:
    """Fill the dependent entries of L for the given independent entries
    and diagonal; entries outside the triangulation fill stay exactly 0."""
    expected = set(independent_pairs(og))
    got = set(li.values)
    if got != expected:
        raise ValueError(
            f"independent entries must be keyed by the below-diagonal edges; "
            f"missing {sorted(expected - got)}, extra {sorted(got - expected)}"
        )
    d = np.asarray(d, dtype=float)
    if d.shape != (og.p,) or np.any(d <= 0):
        raise ValueError("diagonal must be a length-p vector of positives")
    vec = li.to_vector(og)
    L = complete_columns_batch(og, vec[None, :], d[None, :])[0]
    return CholeskyFactor(og, L, d.copy())


def assemble_omega(f: CholeskyFactor) -> np.ndarray:
    """Omega = L D L^T (rank space)."""
    return (f.L * f.D) @ f.L.T


def factorize(omega: np.ndarray, og: OrderedGraph) -> CholeskyFactor:
    """Recover the unique unit-lower-triangular factor of a matrix in the
    cone of the ordered graph.

    Positive definiteness is certified by the pivots (equivalent to the
    leading-minor test); the zero pattern is checked against the
    non-edges before factorizing.
    """
    omega = np.asarray(omega, dtype=float)
    p = og.p
    if omega.shape != (p, p):
        raise ValueError(f"expected a {p}x{p} matrix")
    edges = og.edges_sigma
    for j in range(1, p + 1):
        for i in range(j + 1, p + 1):
            if (j, i) not in edges and abs(omega[i - 1, j - 1]) > ZERO_PATTERN_TOL:
                raise ZeroPatternError(
                    f"entry ({i},{j}) = {omega[i - 1, j - 1]:g} is nonzero at a "
                    f"non-edge of the ordering"
                )
    L = np.eye(p)
    d = np.zeros(p)
    for j in range(p):
        d[j] = omega[j, j] - np.dot(L[j, :j] ** 2, d[:j])
        if d[j] <= 0:
            raise NotPositiveDefiniteError(
                f"leading minor of order {j + 1} is not positive"
            )
        L[j + 1 :, j] = (omega[j + 1 :, j] - L[j + 1 :, :j] @ (L[j, :j] * d[:j])) / d[j]
    return CholeskyFactor(og, L, d)


def to_rank_space(og: OrderedGraph, m: np.ndarray) -> np.ndarray:
    """Permute a matrix indexed by original labels into rank space."""
    idx = [v - 1 for v in og.ordering.elimination]
    return np.asarray(m, dtype=float)[np.ix_(idx, idx)]


def to_original_labels(og: OrderedGraph, m: np.ndarray) -> np.ndarray:
    """Permute a rank-space matrix back to original vertex labels."""
    idx = [v - 1 for v in og.ordering.elimination]
    out = np.empty_like(np.asarray(m, dtype=float))
    out[np.ix_(idx, idx)] = m
    return out


# ---------------------------------------------------------------------------
# trace energy and its one-dimensional fits


def energy(
    og: OrderedGraph, li: IndependentEntries, dtilde: TildeD, scale: np.ndarray
) -> float:
    """tr(Omega * scale) with Omega assembled from the coordinates."""
    f = complete_factor(og, li, dtilde.to_d())
    return float(np.vdot(assemble_omega(f), scale))


def fit_quadratic(
    og: OrderedGraph,
    li: IndependentEntries,
    dtilde: TildeD,
    scale: np.ndarray,
    coord: tuple[int, int],
    *,
    spacing: float = 1.0,
    tol: float = FIT_RESIDUAL_TOL,
) -> tuple[float, float, float]:
    """Coefficients (a, b, c) of the energy as a function of one
    independent entry: g(x) = a x^2 + b x + c, recovered from exact
    evaluations at x0 - h, x0, x0 + h and certified at x0 + 2h."""
    if coord not in li.values:
        raise ValueError(f"{coord} is not an independent coordinate")
    x0 = li.values[coord]
    h = float(spacing)

    def ev(x: float) -> float:
        shifted = IndependentEntries(dict(li.values))
        shifted.values[coord] = x
        return energy(og, shifted, dtilde, scale)

    g_minus, g_zero, g_plus = ev(x0 - h), ev(x0), ev(x0 + h)
    a = (g_plus + g_minus - 2.0 * g_zero) / (2.0 * h * h)
    b = (g_plus - g_minus) / (2.0 * h) - 2.0 * a * x0
    c = g_zero - a * x0 * x0 - b * x0

    x4 = x0 + 2.0 * h
    g4 = ev(x4)
    ref = max(1.0, abs(g_zero), abs(g4))
    if abs(a * x4 * x4 + b * x4 + c - g4) > tol * ref:
        raise ConditionalFitError(
            f"energy is not quadratic in entry {coord}: the ordering is not "
            f"generalized Bartlett in this coordinate"
        )
    if a <= 1e-12 * ref:
        raise ConditionalFitError(f"curvature in entry {coord} is not positive")
    return a, b, c


def fit_rational(
    og: OrderedGraph,
    li: IndependentEntries,
    dtilde: TildeD,
    scale: np.ndarray,
    k: int,
    *,
    factor: float = 2.0,
    tol: float = FIT_RESIDUAL_TOL,
) -> tuple[float, float, float]:
    """Coefficients (c1, cm1, c0) of the energy as a function of the k-th
    diagonal ratio: g(x) = c1 x + cm1 / x + c0, recovered from exact
    evaluations at x0/s, x0, s*x0 and certified at (2s-1)*x0.

    For k = 1 the reciprocal coefficient vanishes identically (the first
    ratio scales the whole diagonal, and the dependent entries depend on
    diagonal ratios only), so cm1 comes back 0 and the conditional is a
    Gamma density downstream.
    """
    p = og.p
    if not 1 <= k <= p:
        raise ValueError(f"diagonal index {k} outside 1..{p}")
    x0 = float(dtilde.values[k - 1])
    s = float(factor)

    def ev(x: float) -> float:
        vals = dtilde.values.copy()
        vals[k - 1] = x
        return energy(og, li, TildeD(vals), scale)

    g_lo, g_mid, g_hi = ev(x0 / s), ev(x0), ev(s * x0)
    a_diff = (g_hi - g_mid) / (s - 1.0)
    b_diff = (g_mid - g_lo) / (s - 1.0)
    c1 = (s * a_diff - b_diff) / (x0 * (s - 1.0 / s))
    cm1 = (a_diff - s * b_diff) * s * x0 / (s * s - 1.0)
    c0 = g_mid - c1 * x0 - cm1 / x0

    x4 = (2.0 * s - 1.0) * x0
    g4 = ev(x4)
    ref = max(1.0, abs(g_mid), abs(g4))
    if abs(c1 * x4 + cm1 / x4 + c0 - g4) > tol * ref:
        raise ConditionalFitError(
            f"energy is not linear-plus-reciprocal in diagonal ratio {k}: the "
            f"ordering is not generalized Bartlett in this coordinate"
        )
    if c1 <= 1e-12 * ref:
        raise ConditionalFitError(f"linear coefficient of diagonal ratio {k} is not positive")
    if cm1 < -ZERO_PATTERN_TOL * ref:
        raise ConditionalFitError(
            f"reciprocal coefficient of diagonal ratio {k} is negative ({cm1:g})"
        )
    return c1, max(cm1, 0.0), c0
