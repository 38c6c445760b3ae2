"""Synthetic data: hub graphs, patterned true precision matrices, and
multivariate normal samples with their covariances.

The hub construction places four hub vertices on a cycle and connects
every other vertex to exactly one hub, which keeps the graph sparse
while giving it high-degree vertices; elimination orders that leave the
hubs last behave well for the coordinate sampler.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .chol import (
    IndependentEntries,
    assemble_omega,
    complete_factor,
    independent_pairs,
    to_original_labels,
)
from .graphs import Graph, OrderedGraph
from .samplers import chain_generator

__all__ = [
    "HubSpec",
    "hub_graph",
    "block_diagonal_rule",
    "omega_from_pattern",
    "sample_mvn",
]


@dataclass(frozen=True)
class HubSpec:
    """Four hub vertices plus the block of spoke vertices attached to
    each; the blocks and hubs together partition 1..p."""

    hubs: tuple[int, int, int, int]
    blocks: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    def __post_init__(self) -> None:
        if len(self.hubs) != 4 or len(self.blocks) != 4:
            raise ValueError("exactly four hubs and four blocks are required")
        seen: set[int] = set()
        for group in (self.hubs, *self.blocks):
            for v in group:
                if v in seen:
                    raise ValueError(f"vertex {v} appears in more than one group")
                seen.add(v)
        p = self.p
        if seen != set(range(1, p + 1)):
            missing = sorted(set(range(1, p + 1)) - seen)[:3]
            raise ValueError(
                f"hubs and blocks must partition 1..{p}; first missing {missing}"
            )

    @property
    def p(self) -> int:
        return len(self.blocks[0]) + len(self.blocks[1]) + len(self.blocks[2]) + len(
            self.blocks[3]
        ) + 4

    @classmethod
    def from_boundaries(cls, b: tuple[int, int, int, int]) -> "HubSpec":
        """Hubs at positions b1 < b2 < b3 < b4 = p, block i holding the
        vertices strictly between the previous hub and hub i."""
        if not (0 < b[0] < b[1] < b[2] < b[3]):
            raise ValueError(f"hub positions must be increasing and positive: {b}")
        prev = 0
        blocks = []
        for h in b:
            blocks.append(tuple(range(prev + 1, h)))
            prev = h
        return cls(tuple(int(h) for h in b), tuple(blocks))


def hub_graph(spec: HubSpec) -> Graph:
    """Four stars whose centers form a cycle: hub i is adjacent to every
    vertex of block i, and the hubs are joined in a 4-cycle."""
    h = spec.hubs
    edges = [(h[0], h[1]), (h[1], h[2]), (h[2], h[3]), (h[3], h[0])]
    for hub, block in zip(h, spec.blocks):
        edges.extend((v, hub) for v in block)
    return Graph.of(spec.p, edges)


def block_diagonal_rule(spec: HubSpec) -> np.ndarray:
    """Vertex-indexed diagonal for the true precision matrix: every
    vertex of block i (hub included) gets the block width b_i - b_{i-1},
    with b_0 = 0."""
    d = np.empty(spec.p)
    prev = 0
    for hub, block in zip(spec.hubs, spec.blocks):
        width = float(hub - prev)
        for v in (*block, hub):
            d[v - 1] = width
        prev = hub
    return d


def omega_from_pattern(
    og: OrderedGraph, fill_value: float, d: np.ndarray
) -> np.ndarray:
    """True precision matrix L D L' on the graph's support: every
    independent factor entry set to `fill_value`, dependent entries
    completed, and the factor diagonal D (vertex-indexed, permuted to
    rank space internally) taken from `d`; returned in original vertex
    labels."""
    d = np.asarray(d, dtype=float)
    if d.shape != (og.p,):
        raise ValueError(f"diagonal has shape {d.shape}, expected ({og.p},)")
    if np.any(d <= 0):
        raise ValueError("diagonal entries must be positive")
    li = IndependentEntries(
        {pair: float(fill_value) for pair in independent_pairs(og)}
    )
    d_rank = d[[v - 1 for v in og.ordering.elimination]]
    factor = complete_factor(og, li, d_rank)
    return to_original_labels(og, assemble_omega(factor))


def sample_mvn(
    omega: np.ndarray, n: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """n rows from N(0, omega^-1) plus the sample covariance X'X / n.

    Rows are generated by a triangular solve against the Cholesky factor
    of `omega`, so no explicit inverse is formed.  The covariance uses
    the divisor n (the mean is fixed at zero in the model, not
    estimated).
    """
    omega = np.asarray(omega, dtype=float)
    p = omega.shape[0]
    if n < 1:
        raise ValueError("at least one sample is required")
    root = np.linalg.cholesky(omega)
    z = chain_generator(seed).standard_normal((n, p))
    x = solve_triangular(root, z.T, lower=True, trans="T").T
    return x, (x.T @ x) / n
