"""Undirected graphs, orderings, elimination fill, and the generalized
Bartlett (GB) machinery: ordering tests, exhaustive/heuristic ordering
search, covers, prime components, expansions, and the small-order census.

Conventions
-----------
Vertices are labeled 1..p.  Edges are stored as (u, v) tuples with u < v.
An Ordering assigns each vertex a rank in 1..p; "rank space" means the
graph relabeled so that vertex = rank.  Elimination proceeds in rank
order: eliminating rank i connects all of i's higher-ranked neighbors
pairwise.  Fill edges are the pairs added by this process, and an
ordering is generalized Bartlett when no three fill edges form a
triangle (equivalently: no vertex triple that is pairwise non-adjacent
in the graph but pairwise adjacent in the elimination cover).
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass
from functools import cached_property


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    if u == v:
        raise ValueError(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices 1..p with normalized (u < v) edge pairs."""

    p: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError("vertex count must be positive")
        for u, v in self.edges:
            if not (1 <= u < v <= self.p):
                raise ValueError(f"edge ({u},{v}) out of range for p={self.p}")

    @classmethod
    def of(cls, p: int, pairs: "list[tuple[int, int]] | set[tuple[int, int]]" = ()) -> "Graph":
        return cls(int(p), frozenset(_norm_edge(int(u), int(v)) for u, v in pairs))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    def adjacency_masks(self) -> list[int]:
        """Bitmask adjacency; index and bit positions are 0-based labels."""
        adj = [0] * self.p
        for u, v in self.edges:
            adj[u - 1] |= 1 << (v - 1)
            adj[v - 1] |= 1 << (u - 1)
        return adj

    def is_connected(self) -> bool:
        if self.p == 1:
            return True
        adj = self.adjacency_masks()
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= adj[v]
            frontier = nxt & ~seen
            seen |= frontier
        return seen == (1 << self.p) - 1

    def induced(self, vertices: "list[int] | tuple[int, ...]") -> "Graph":
        """Induced subgraph, relabeled 1..k in the order given."""
        pos = {v: i + 1 for i, v in enumerate(vertices)}
        keep = set(vertices)
        edges = [
            (pos[u], pos[v]) for u, v in self.edges if u in keep and v in keep
        ]
        return Graph.of(len(vertices), edges)


@dataclass(frozen=True)
class Ordering:
    """Bijection vertex -> rank; ranks[v-1] is the rank of vertex v."""

    ranks: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        if sorted(self.ranks) != list(range(1, len(self.ranks) + 1)):
            raise ValueError("ranks must be a permutation of 1..p")

    @property
    def p(self) -> int:
        return len(self.ranks)

    def rank(self, v: int) -> int:
        return self.ranks[v - 1]

    @cached_property
    def elimination(self) -> tuple[int, ...]:
        """Vertices listed in rank order (the elimination sequence)."""
        inv = [0] * self.p
        for v, r in enumerate(self.ranks, start=1):
            inv[r - 1] = v
        return tuple(inv)

    def vertex(self, r: int) -> int:
        return self.elimination[r - 1]

    @classmethod
    def identity(cls, p: int) -> "Ordering":
        return cls(tuple(range(1, p + 1)))

    @classmethod
    def from_elimination(cls, seq: "list[int] | tuple[int, ...]") -> "Ordering":
        ranks = [0] * len(seq)
        for r, v in enumerate(seq, start=1):
            ranks[v - 1] = r
        return cls(tuple(ranks))


@dataclass(frozen=True)
class OrderedGraph:
    graph: Graph
    ordering: Ordering

    def __post_init__(self) -> None:
        if self.graph.p != self.ordering.p:
            raise ValueError("graph and ordering sizes differ")

    @property
    def p(self) -> int:
        return self.graph.p

    @cached_property
    def edges_sigma(self) -> frozenset[tuple[int, int]]:
        """Edge set relabeled into rank space."""
        rk = self.ordering.rank
        return frozenset(_norm_edge(rk(u), rk(v)) for u, v in self.graph.edges)

    def rank_adjacency(self) -> list[int]:
        """Bitmask adjacency in rank space (0-based ranks)."""
        adj = [0] * self.p
        for i, j in self.edges_sigma:
            adj[i - 1] |= 1 << (j - 1)
            adj[j - 1] |= 1 << (i - 1)
        return adj

    @classmethod
    def natural(cls, graph: Graph) -> "OrderedGraph":
        return cls(graph, Ordering.identity(graph.p))


@dataclass(frozen=True)
class FillPattern:
    """Fill-in of an ordered graph: the cover edge set is E_sigma | fill."""

    base: OrderedGraph
    fill: frozenset[tuple[int, int]]

    @property
    def p(self) -> int:
        return self.base.p

    @cached_property
    def cover_sigma(self) -> frozenset[tuple[int, int]]:
        return self.base.edges_sigma | self.fill


def _elimination_fill(adj: list[int], p: int) -> list[int]:
    """Run the elimination game on rank-space adjacency bitmasks.

    Eliminating rank i (0-based) pairwise connects its higher-ranked
    neighbors.  Returns the symmetric bitmasks of the added (fill)
    edges; `adj` is not modified.
    """
    a = list(adj)
    fill = [0] * p
    for i in range(p - 2):
        later = a[i] & (~0 << (i + 1))
        nbrs = _bits(later)
        for x, y in itertools.combinations(nbrs, 2):
            if not (a[x] >> y) & 1:
                a[x] |= 1 << y
                a[y] |= 1 << x
                fill[x] |= 1 << y
                fill[y] |= 1 << x
    return fill


def triangulate(g: OrderedGraph) -> FillPattern:
    """Fill-in of eliminating the ordered graph in rank order.

    The union of the graph's edges with the returned fill is chordal and
    the ordering is a perfect elimination ordering of that cover.
    """
    fillmask = _elimination_fill(g.rank_adjacency(), g.p)
    pairs = set()
    for i in range(g.p):
        for j in _bits(fillmask[i]):
            if j > i:
                pairs.add((i + 1, j + 1))
    return FillPattern(g, frozenset(pairs))


def _is_peo(adj: list[int], p: int) -> bool:
    """True when the identity (rank) ordering is a perfect elimination
    ordering: every vertex's later neighborhood is a clique."""
    for i in range(p - 2):
        later = adj[i] & (~0 << (i + 1))
        for x in _bits(later):
            rest = later & ~(1 << x) & (~0 << (x + 1))
            if rest & ~adj[x]:
                return False
    return True


def _mcs_order(adj: list[int], p: int) -> list[int]:
    """Maximum cardinality search; returns a 0-based elimination sequence
    (position k holds the vertex of rank k+1).  Ranks are assigned from p
    downward: the vertex with most already-ranked neighbors gets the next
    highest rank, ties broken by smallest label."""
    weight = [0] * p
    ranked = 0
    seq = [0] * p
    for r in range(p - 1, -1, -1):
        best = -1
        best_w = -1
        for v in range(p):
            if not (ranked >> v) & 1 and weight[v] > best_w:
                best = v
                best_w = weight[v]
        seq[r] = best
        ranked |= 1 << best
        for u in _bits(adj[best] & ~ranked):
            weight[u] += 1
    return seq


def is_decomposable(g: Graph) -> Ordering | None:
    """A perfect elimination ordering found by maximum cardinality search,
    or None when the graph is not decomposable (chordal)."""
    adj = g.adjacency_masks()
    seq = _mcs_order(adj, g.p)
    perm = {v: r for r, v in enumerate(seq)}
    radj = [0] * g.p
    for v in range(g.p):
        for u in _bits(adj[v]):
            radj[perm[v]] |= 1 << perm[u]
    if not _is_peo(radj, g.p):
        return None
    return Ordering.from_elimination([v + 1 for v in seq])


def _fill_triangles(fillmask: list[int], p: int) -> list[tuple[int, int, int]]:
    """All triangles (i < j < k, 0-based ranks) of the fill graph."""
    out = []
    for i in range(p):
        for j in _bits(fillmask[i] & (~0 << (i + 1))):
            common = fillmask[i] & fillmask[j] & (~0 << (j + 1))
            for k in _bits(common):
                out.append((i, j, k))
    return out


def is_gb_ordering(g: Graph, sigma: Ordering) -> tuple[bool, list[tuple[int, int, int]]]:
    """Test whether `sigma` is a generalized Bartlett ordering of `g`.

    Returns (flag, violations); each violation is a vertex triple (in
    original labels, sorted) whose three pairs are all non-edges of the
    graph yet all lie in the elimination cover, i.e. a triangle made
    entirely of fill edges.
    """
    og = OrderedGraph(g, sigma)
    fillmask = _elimination_fill(og.rank_adjacency(), g.p)
    elim = sigma.elimination
    triples = []
    for i, j, k in _fill_triangles(fillmask, g.p):
        triples.append(tuple(sorted((elim[i], elim[j], elim[k]))))
    triples.sort()
    return (not triples, triples)


@dataclass(frozen=True)
class GBSearchResult:
    ordering: Ordering | None
    exhaustive: bool

    @property
    def found(self) -> bool:
        return self.ordering is not None


def _has_fill_triangle(adj: list[int], p: int) -> bool:
    """Early-exit check that the elimination fill of `adj` (rank space)
    contains a triangle."""
    a = list(adj)
    filln = [0] * p
    for i in range(p - 2):
        later = a[i] & (~0 << (i + 1))
        nbrs = _bits(later)
        for x, y in itertools.combinations(nbrs, 2):
            if not (a[x] >> y) & 1:
                if filln[x] & filln[y]:
                    return True
                a[x] |= 1 << y
                a[y] |= 1 << x
                filln[x] |= 1 << y
                filln[y] |= 1 << x
    return False


def _gb_backtrack(adj0: list[int], p: int, memo_cap: int = 2_000_000) -> list[int] | None:
    """Exhaustive search for a GB elimination sequence by backtracking
    over prefixes.

    Fill edges only accumulate as the prefix grows and the fill produced
    by a prefix does not depend on how the rest is ordered, so a prefix
    whose fill already contains a triangle can be pruned without losing
    any completion.  Failed states are memoized on the pair (set of
    remaining vertices, fill adjacency), which determines the subtree.
    Returns a 0-based elimination sequence or None.
    """
    if p <= 3:
        return list(range(p))
    adj = list(adj0)
    filln = [0] * p
    order: list[int] = []
    failed: set[tuple[int, tuple[int, ...]]] = set()

    def rec(alive: int) -> bool:
        if alive.bit_count() <= 2:
            return True
        key = (alive, tuple(filln))
        if key in failed:
            return False
        cands = []
        for v in _bits(alive):
            nb = adj[v] & alive & ~(1 << v)
            nbl = _bits(nb)
            missing = sum(
                1
                for x, y in itertools.combinations(nbl, 2)
                if not (adj[x] >> y) & 1
            )
            cands.append((missing, v, nbl))
        cands.sort()
        for _, v, nbl in cands:
            trail = []
            ok = True
            for x, y in itertools.combinations(nbl, 2):
                if (adj[x] >> y) & 1:
                    continue
                if filln[x] & filln[y]:
                    ok = False
                    break
                adj[x] |= 1 << y
                adj[y] |= 1 << x
                filln[x] |= 1 << y
                filln[y] |= 1 << x
                trail.append((x, y))
            if ok:
                order.append(v)
                if rec(alive & ~(1 << v)):
                    return True
                order.pop()
            for x, y in reversed(trail):
                adj[x] &= ~(1 << y)
                adj[y] &= ~(1 << x)
                filln[x] &= ~(1 << y)
                filln[y] &= ~(1 << x)
        if len(failed) < memo_cap:
            failed.add(key)
        return False

    if rec((1 << p) - 1):
        rest = [v for v in range(p) if v not in order]
        return order + sorted(rest)
    return None


def find_gb_ordering(
    g: Graph,
    *,
    exhaustive_limit: int = 8,
    heuristic_tries: int = 500,
    seed: int = 0,
) -> GBSearchResult:
    """Search for a generalized Bartlett ordering.

    Exhaustive (definitive) for p <= exhaustive_limit via pruned
    backtracking; beyond that, a perfect elimination ordering, the
    min-fill ordering, the natural ordering and randomized restarts are
    tried, and a None result only means "none found within budget".
    The `exhaustive` flag on the result records which mode ran.
    """
    p = g.p
    peo = is_decomposable(g)
    if peo is not None:
        # a perfect elimination ordering has no fill at all
        return GBSearchResult(peo, True)
    exhaustive = p <= exhaustive_limit
    for cand in (Ordering.identity(p), min_fill_ordering(g)):
        ok, _ = is_gb_ordering(g, cand)
        if ok:
            return GBSearchResult(cand, exhaustive)
    adj = g.adjacency_masks()
    if exhaustive:
        seq = _gb_backtrack(adj, p)
        if seq is None:
            return GBSearchResult(None, True)
        return GBSearchResult(Ordering.from_elimination([v + 1 for v in seq]), True)
    rng = random.Random(seed)
    base = list(range(p))
    for _ in range(heuristic_tries):
        rng.shuffle(base)
        radj = [0] * p
        pos = [0] * p
        for r, v in enumerate(base):
            pos[v] = r
        for v in range(p):
            for u in _bits(adj[v]):
                radj[pos[v]] |= 1 << pos[u]
        if not _has_fill_triangle(radj, p):
            return GBSearchResult(
                Ordering.from_elimination([v + 1 for v in base]), False
            )
    return GBSearchResult(None, False)


def gb_cover(g: OrderedGraph) -> Graph:
    """Generalized Bartlett cover for a fixed ordering.

    While the ordering is not GB, take the violating rank triple i>j>k
    that is lexicographically smallest as (i, j, k) and add its (i, j)
    edge (the two highest ranks), then recompute the fill.  The complete
    graph is a fixed point, so the loop terminates.
    """
    p = g.p
    adj = g.rank_adjacency()
    added_rank_pairs: list[tuple[int, int]] = []
    while True:
        fillmask = _elimination_fill(adj, p)
        tris = _fill_triangles(fillmask, p)
        if not tris:
            break
        # triangle (a<b<c) viewed as i>j>k is (c, b, a)
        c, b, _ = min((c, b, a) for a, b, c in tris)
        adj[b] |= 1 << c
        adj[c] |= 1 << b
        added_rank_pairs.append((b, c))
    elim = g.ordering.elimination
    new_edges = set(g.graph.edges)
    for b, c in added_rank_pairs:
        new_edges.add(_norm_edge(elim[b], elim[c]))
    return Graph(p, frozenset(new_edges))


def min_fill_ordering(g: Graph) -> Ordering:
    """Greedy minimum-fill elimination ordering, ties broken by smallest
    vertex label."""
    p = g.p
    adj = g.adjacency_masks()
    alive = (1 << p) - 1
    seq = []
    for _ in range(p):
        best = -1
        best_cost = None
        for v in _bits(alive):
            nbl = _bits(adj[v] & alive & ~(1 << v))
            cost = sum(
                1
                for x, y in itertools.combinations(nbl, 2)
                if not (adj[x] >> y) & 1
            )
            if best_cost is None or cost < best_cost:
                best = v
                best_cost = cost
        nbl = _bits(adj[best] & alive & ~(1 << best))
        for x, y in itertools.combinations(nbl, 2):
            adj[x] |= 1 << y
            adj[y] |= 1 << x
        alive &= ~(1 << best)
        seq.append(best + 1)
    return Ordering.from_elimination(seq)


# ---------------------------------------------------------------------------
# Prime components (decomposition at complete separators)
# ---------------------------------------------------------------------------


def _mcs_m_impl(adj: list[int], p: int) -> tuple[list[int], list[int]]:
    """MCS-M minimal triangulation (Berry, Blair, Heggernes, Peyton 2004).

    At each step the unranked vertex v of maximum weight receives the
    next highest rank.  Then every unranked u that is adjacent to v, or
    reachable from v by a path of unranked internal vertices all of
    weight strictly below weight(u), gets weight(u) += 1 and a fill edge
    (u, v).  Paths are taken in the original graph; fill only accumulates
    into the returned triangulated adjacency.
    """
    weight = [0] * p
    ranked = 0
    seq = [0] * p
    tri = list(adj)
    full = (1 << p) - 1
    for r in range(p - 1, -1, -1):
        best = -1
        best_w = -1
        for v in range(p):
            if not (ranked >> v) & 1 and weight[v] > best_w:
                best = v
                best_w = weight[v]
        v = best
        seq[r] = v
        unranked = ~ranked & full & ~(1 << v)
        # Bottleneck shortest path: bott[u] = min over v->u paths of the
        # maximum internal weight; -1 means a direct edge (no internals).
        INF = p + 1
        bott = [INF] * p
        heap = []
        for u in _bits(adj[v] & unranked):
            bott[u] = -1
            heapq.heappush(heap, (-1, u))
        while heap:
            bu, u = heapq.heappop(heap)
            if bu > bott[u]:
                continue
            for w2 in _bits(adj[u] & unranked):
                nb = max(bu, weight[u])
                if nb < bott[w2]:
                    bott[w2] = nb
                    heapq.heappush(heap, (nb, w2))
        for u in _bits(unranked):
            if bott[u] < weight[u]:
                if not (adj[v] >> u) & 1:
                    tri[v] |= 1 << u
                    tri[u] |= 1 << v
                weight[u] += 1
        ranked |= 1 << v
    return seq, tri


def _components_of_complement(adj: list[int], p: int, sep: int) -> list[tuple[int, bool]]:
    """Connected components of the graph minus the separator mask, each
    flagged full (its neighborhood equals the whole separator)."""
    avail = ((1 << p) - 1) & ~sep
    seen = 0
    out = []
    for v in _bits(avail):
        if (seen >> v) & 1:
            continue
        comp = 1 << v
        frontier = comp
        while frontier:
            nxt = 0
            for u in _bits(frontier):
                nxt |= adj[u] & avail
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        nb = 0
        for u in _bits(comp):
            nb |= adj[u]
        out.append((comp, (nb & sep) == sep))
    return out


def _clique_minimal_separator(adj: list[int], p: int) -> tuple[int, int] | None:
    """A clique of the graph that is a minimal vertex separator, plus one
    smallest full component of its complement; None when the graph has no
    clique separator at all (i.e. it is prime).

    Candidate separators are the monotone (later-ranked) triangulated
    neighborhoods along an MCS-M minimal elimination ordering; every
    clique minimal separator of the graph is a minimal separator of any
    minimal triangulation and shows up among these sets.  Minimality is
    certified directly: at least two components of the complement must
    see the entire separator.
    """
    seq, tri = _mcs_m_impl(adj, p)
    rank = [0] * p
    for r, v in enumerate(seq):
        rank[v] = r
    tried = set()
    for v in seq:
        sep = 0
        for u in _bits(tri[v]):
            if rank[u] > rank[v]:
                sep |= 1 << u
        # an empty monotone neighborhood cannot separate a connected graph
        if sep == 0 or sep in tried:
            continue
        tried.add(sep)
        sep_l = _bits(sep)
        if any(not (adj[x] >> y) & 1 for x, y in itertools.combinations(sep_l, 2)):
            continue
        comps = _components_of_complement(adj, p, sep)
        fulls = [c for c, f in comps if f]
        if len(comps) >= 2 and len(fulls) >= 2:
            best = min(fulls, key=lambda m: (bin(m).count("1"), m))
            return sep, best
    return None


def prime_components_with_vertices(g: Graph) -> list[tuple[Graph, tuple[int, ...]]]:
    """Prime components (atoms) of a connected graph.

    Recursive decomposition at clique minimal separators (Tarjan's clique
    cut decomposition with Leimer's minimality restriction, candidates
    from an MCS-M minimal triangulation per Berry et al.): a piece with
    clique minimal separator S and full component C splits into the
    induced subgraphs on C+S and on everything but C; a piece with no
    clique separator is an atom.  Each returned pair is (component graph
    relabeled 1..k, original vertex labels in relabeling order).  The
    graph is decomposable iff every component is complete.
    """
    if not g.is_connected():
        raise ValueError("prime components are defined for connected graphs")
    out = []
    stack: list[tuple[int, ...]] = [tuple(range(1, g.p + 1))]
    while stack:
        verts = stack.pop()
        sub = g.induced(list(verts))
        adj = sub.adjacency_masks()
        found = _clique_minimal_separator(adj, sub.p)
        if found is None:
            out.append((sub, verts))
            continue
        sep, comp = found
        keep = ((1 << sub.p) - 1) & ~comp
        stack.append(tuple(verts[i] for i in _bits(comp | sep)))
        stack.append(tuple(verts[i] for i in _bits(keep)))
    return out


def prime_components(g: Graph) -> list[Graph]:
    return [comp for comp, _ in prime_components_with_vertices(g)]


# ---------------------------------------------------------------------------
# GB-preserving expansions
# ---------------------------------------------------------------------------


def expand_max_vertex(base: OrderedGraph, parts: list[OrderedGraph]) -> OrderedGraph:
    """Replace each base vertex by a graph; blocks are laid out in base
    rank order, each part keeping its own internal ordering, and two
    blocks are joined by a single edge between their highest-ranked
    vertices exactly when the base vertices are adjacent."""
    if len(parts) != base.p:
        raise ValueError("need one part per base vertex")
    sizes = [part.p for part in parts]
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)
    p = offsets[-1]
    if p > 10_000:
        raise ValueError("expanded graph too large")
    edges = []
    for b, part in enumerate(parts):
        off = offsets[b]
        for i, j in part.edges_sigma:
            edges.append((off + i, off + j))
    tops = [offsets[b] + sizes[b] for b in range(base.p)]
    for i, j in base.edges_sigma:
        edges.append(_norm_edge(tops[i - 1], tops[j - 1]))
    return OrderedGraph.natural(Graph.of(p, edges))


def expand_tree(
    tree: Graph, attachments: list[list[OrderedGraph]]
) -> OrderedGraph:
    """Attach graphs to tree vertices, coning every vertex of an attached
    graph to its tree vertex.  The output ordering lists all attachment
    blocks first (in their own internal orders), then the tree vertices
    with every child before its parent (rooted at the highest label)."""
    if len(attachments) != tree.p:
        raise ValueError("need one attachment list per tree vertex")
    if tree.edge_count != tree.p - 1 or not tree.is_connected():
        raise ValueError("expansion base must be a tree")
    blocks: list[tuple[int, OrderedGraph]] = []
    for v in range(1, tree.p + 1):
        for att in attachments[v - 1]:
            blocks.append((v, att))
    offsets = []
    off = 0
    for _, att in blocks:
        offsets.append(off)
        off += att.p
    n_att = off
    p = n_att + tree.p
    if p > 10_000:
        raise ValueError("expanded graph too large")
    # children-before-parents order of tree vertices, rooted at label p_tree
    root = tree.p
    parent = {root: 0}
    stack = [root]
    visit = []
    while stack:
        v = stack.pop()
        visit.append(v)
        for u in sorted(tree.neighbors(v)):
            if u not in parent:
                parent[u] = v
                stack.append(u)
    tree_order = list(reversed(visit))  # leaves first, root last
    tree_label = {v: n_att + r + 1 for r, v in enumerate(tree_order)}
    edges = []
    for (v, att), off in zip(blocks, offsets):
        for i, j in att.edges_sigma:
            edges.append((off + i, off + j))
        for i in range(1, att.p + 1):
            edges.append(_norm_edge(off + i, tree_label[v]))
    for u, v in tree.edges:
        edges.append(_norm_edge(tree_label[u], tree_label[v]))
    return OrderedGraph.natural(Graph.of(p, edges))


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def complete_graph(p: int) -> Graph:
    return Graph.of(p, list(itertools.combinations(range(1, p + 1), 2)))


def path_graph(p: int) -> Graph:
    return Graph.of(p, [(i, i + 1) for i in range(1, p)])


def cycle_graph(p: int) -> Graph:
    if p < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph.of(p, [(i, i + 1) for i in range(1, p)] + [(1, p)])


def star_graph(p: int) -> Graph:
    """Star with center 1 and leaves 2..p."""
    return Graph.of(p, [(1, i) for i in range(2, p + 1)])


def grid_graph(rows: int, cols: int) -> Graph:
    """Row-wise labeled grid: vertex (r, c) gets label (r-1)*cols + c."""

    def lab(r: int, c: int) -> int:
        return (r - 1) * cols + c

    edges = []
    for r in range(1, rows + 1):
        for c in range(1, cols + 1):
            if c < cols:
                edges.append((lab(r, c), lab(r, c + 1)))
            if r < rows:
                edges.append((lab(r, c), lab(r + 1, c)))
    return Graph.of(rows * cols, edges)


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return Graph.of(
        a + b, [(i, a + j) for i in range(1, a + 1) for j in range(1, b + 1)]
    )


# ---------------------------------------------------------------------------
# Census of small connected graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CensusRow:
    order: int
    total_connected: int
    decomposable: int
    generalized_bartlett: int

    def __post_init__(self) -> None:
        if not (
            self.decomposable <= self.generalized_bartlett <= self.total_connected
        ):
            raise ValueError("census counts must satisfy dec <= gb <= total")

    @property
    def pct_decomposable(self) -> int:
        return round(100 * self.decomposable / self.total_connected)

    @property
    def pct_generalized_bartlett(self) -> int:
        # truncates instead of rounding: 842/853 prints as 98, not 99
        return int(100 * self.generalized_bartlett / self.total_connected)


def _wl_colors(adj: list[int], p: int) -> list[tuple]:
    colors: list[tuple] = [(bin(adj[v]).count("1"),) for v in range(p)]
    for _ in range(p):
        nxt = [
            (colors[v], tuple(sorted(colors[u] for u in _bits(adj[v]))))
            for v in range(p)
        ]
        if len(set(nxt)) == len(set(colors)):
            colors = nxt
            break
        colors = nxt
    return colors


def _packed_upper(adj: list[int], p: int, perm: tuple[int, ...]) -> int:
    """Upper-triangle bits of the permuted adjacency packed into an int;
    perm[i] is the old vertex placed at new position i."""
    bits = 0
    idx = 0
    for i in range(p):
        ai = adj[perm[i]]
        for j in range(i + 1, p):
            bits = (bits << 1) | ((ai >> perm[j]) & 1)
            idx += 1
    return bits


def canonical_form(p: int, adj: list[int]) -> tuple[int, int]:
    """Canonical key (p, packed bits) minimized over all permutations
    compatible with iterated degree refinement."""
    colors = _wl_colors(adj, p)
    klass: dict[tuple, list[int]] = {}
    for v in range(p):
        klass.setdefault(colors[v], []).append(v)
    groups = [klass[c] for c in sorted(klass)]
    best = None
    for choice in itertools.product(*(itertools.permutations(g) for g in groups)):
        perm = tuple(v for grp in choice for v in grp)
        key = _packed_upper(adj, p, perm)
        if best is None or key < best:
            best = key
    return (p, best if best is not None else 0)


def enumerate_connected_graphs(max_order: int) -> dict[int, list[list[int]]]:
    """All connected graphs up to isomorphism per order, as adjacency
    bitmask lists.  Order n graphs are built by attaching a new vertex to
    every nonempty subset of each order n-1 graph (every connected graph
    has a non-cut vertex, so this reaches everything), deduplicating by
    canonical form."""
    levels: dict[int, list[list[int]]] = {1: [[0]]}
    for n in range(2, max_order + 1):
        seen: dict[tuple[int, int], list[int]] = {}
        for g in levels[n - 1]:
            for s in range(1, 1 << (n - 1)):
                adj = [g[v] | (((s >> v) & 1) << (n - 1)) for v in range(n - 1)]
                adj.append(s)
                key = canonical_form(n, adj)
                if key not in seen:
                    seen[key] = adj
        levels[n] = list(seen.values())
    return levels


def _masks_to_graph(adj: list[int]) -> Graph:
    p = len(adj)
    edges = []
    for v in range(p):
        for u in _bits(adj[v]):
            if u > v:
                edges.append((v + 1, u + 1))
    return Graph.of(p, edges)


def classify_graph(g: Graph) -> tuple[bool, bool]:
    """(decomposable?, generalized Bartlett?) with exhaustive GB search."""
    peo = is_decomposable(g)
    if peo is not None:
        return True, True
    res = find_gb_ordering(g, exhaustive_limit=max(8, g.p))
    return False, res.found


def census(
    max_order: int,
    *,
    graphs_by_order: dict[int, list[Graph]] | None = None,
) -> list[CensusRow]:
    """Classify connected graphs of each order as decomposable and/or
    generalized Bartlett.  With no explicit graph lists, all connected
    graphs up to isomorphism are enumerated internally; callers may pass
    externally sourced graphs (e.g. parsed from graph6) instead."""
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    if graphs_by_order is None:
        if max_order > 7:
            raise ValueError("internal enumeration supports orders up to 7")
        levels = enumerate_connected_graphs(max_order)
        graphs_by_order = {
            n: [_masks_to_graph(adj) for adj in levels[n]] for n in levels
        }
    rows = []
    for n in sorted(graphs_by_order):
        if n > max_order:
            continue
        dec = 0
        gb = 0
        total = 0
        for g in graphs_by_order[n]:
            total += 1
            d, b = classify_graph(g)
            dec += d
            gb += b
        rows.append(CensusRow(n, total, dec, gb))
    return rows
