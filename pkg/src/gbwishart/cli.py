"""Command-line surface: graph reports, sampler runs, and diagnostics.

Exit codes: 0 success, 1 infeasible request (precondition failed), 2
parse or usage error, 3 resource limit hit (e.g. accept-reject budget
exhausted before collecting the requested draws).  All file outputs are
UTF-8; JSON summaries carry a schema tag and embed the full run
configuration.  The environment variable GBW_THREADS caps how many
chains advance simultaneously inside one vectorized engine.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass

import numpy as np

from .chol import NotPositiveDefiniteError, dependent_fill_pairs
from .fileio import (
    FileFormatError,
    chain_labels,
    read_edge_list,
    read_graph6,
    read_matrix,
    read_ordering,
    tracked_entries,
    write_chain_csv,
    write_diagnostic_json,
    write_edge_list,
    write_matrix,
    write_ordering,
    write_summary_json,
)
from .graphs import (
    Graph,
    OrderedGraph,
    Ordering,
    census,
    find_gb_ordering,
    gb_cover,
    is_decomposable,
    is_gb_ordering,
    min_fill_ordering,
    prime_components_with_vertices,
    triangulate,
)
from .inference import (
    dic,
    empirical_delta,
    inverse_diag_delta,
    posterior_mean_and_ci,
    precision_diag_delta,
    stein_loss,
    theorem2_diagnostic,
)
from .samplers import (
    ChainSummary,
    GWishartParams,
    NotGeneralizedBartlettError,
    ar_sample_many,
    chain_generator,
    direct_sample_many,
    gibbs_run_many,
    merge_chain_summaries,
    mh_run,
    posterior_params,
)

__all__ = ["RunConfig", "main"]

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_PARSE = 2
EXIT_RESOURCE = 3

DELTA_RULES = ("empirical", "inv-diag", "prec-diag")


class InfeasibleError(RuntimeError):
    """The inputs parse but the requested operation cannot be run."""


class ResourceLimitError(RuntimeError):
    """A declared budget ran out before the request was satisfied."""


class UsageError(RuntimeError):
    """A flag combination or file content that cannot be interpreted."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, normalized from the parsed flags."""

    command: str
    graphs: tuple[str, ...] = ()
    ordering: str = "natural"
    scale: str | None = None
    delta: str | None = None
    data: str | None = None
    n: int | None = None
    iters: int = 3000
    burnin: int = 1000
    thin: int = 1
    seed: int = 0
    chains: int = 1
    out: str | None = None
    max_order: int | None = None
    graph6: bool = False
    level: float = 0.95
    max_attempts: int = 100_000
    estimate: str | None = None
    truth: str | None = None

    def __post_init__(self) -> None:
        if self.iters < 1 or self.thin < 1 or self.chains < 1:
            raise UsageError("--iters, --thin and --chains must be positive")
        if self.burnin < 0 or self.burnin >= self.iters:
            raise UsageError("--burnin must lie in 0..iters-1")
        if not 0.0 < self.level < 1.0:
            raise UsageError("--level must lie strictly between 0 and 1")
        if self.max_attempts < 1:
            raise UsageError("--max-attempts must be positive")
        if self.n is not None and self.n < 1:
            raise UsageError("--n must be positive")
        if self.max_order is not None and self.max_order < 1:
            raise UsageError("--max-order must be positive")
        for path in (*self.graphs, self.data, self.scale, self.estimate, self.truth):
            if path is not None and not os.path.isfile(path):
                raise UsageError(f"file not found: {path}")
        if self.ordering not in ("natural", "min-fill") and not os.path.isfile(
            self.ordering
        ):
            raise UsageError(f"ordering file not found: {self.ordering}")


# ---------------------------------------------------------------------------
# input resolution


def _load_graph(cfg: RunConfig, path: str) -> Graph:
    if cfg.graph6:
        graphs = read_graph6(path)
        if len(graphs) != 1:
            raise UsageError(
                f"{path}: expected a single graph6 record, found {len(graphs)}"
            )
        return graphs[0]
    return read_edge_list(path)


def _resolve_ordering(cfg: RunConfig, g: Graph) -> Ordering:
    if cfg.ordering == "natural":
        return Ordering.identity(g.p)
    if cfg.ordering == "min-fill":
        return min_fill_ordering(g)
    return read_ordering(cfg.ordering, g.p)


def _load_data(cfg: RunConfig) -> tuple[np.ndarray, int] | None:
    """Sample covariance and size: either a raw n x p data matrix, or,
    when --n is given, the p x p covariance itself."""
    if cfg.data is None:
        return None
    if cfg.n is not None:
        return read_matrix(cfg.data, symmetric=True), cfg.n
    x = read_matrix(cfg.data)
    n = x.shape[0]
    return (x.T @ x) / n, n


def _resolve_delta(
    cfg: RunConfig,
    p: int,
    scale: np.ndarray | None,
    data: tuple[np.ndarray, int] | None,
) -> np.ndarray:
    spec = cfg.delta
    if spec is None:
        raise UsageError("--delta is required (a file, const:<x>, or a rule name)")
    if spec.startswith("const:"):
        try:
            value = float(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"cannot parse {spec!r} as const:<number>") from None
        return np.full(p, value)
    if spec in DELTA_RULES:
        if data is None:
            raise UsageError(f"--delta {spec} needs --data")
        s_mat, n = data
        if s_mat.shape[0] != p:
            raise UsageError(
                f"--data covariance is {s_mat.shape[0]}x{s_mat.shape[0]} "
                f"but the graph has {p} vertices"
            )
        if spec == "empirical":
            if scale is None:
                raise UsageError("--delta empirical needs --U")
            return empirical_delta(scale, s_mat, n)
        if spec == "inv-diag":
            return inverse_diag_delta(s_mat)
        return precision_diag_delta(s_mat)
    if os.path.isfile(spec):
        vec = read_matrix(spec).ravel()
        if vec.shape != (p,):
            raise UsageError(f"{spec}: expected {p} shape entries, got {vec.size}")
        return vec
    raise UsageError(
        f"unknown shape rule {spec!r}: expected a file, const:<x>, or one of "
        f"{', '.join(DELTA_RULES)}"
    )


def _build_params(
    cfg: RunConfig, path: str
) -> tuple[GWishartParams, tuple[np.ndarray, int] | None]:
    """Prior parameters plus the loaded data; the posterior update is
    applied by the callers that need it."""
    g = _load_graph(cfg, path)
    og = OrderedGraph(g, _resolve_ordering(cfg, g))
    data = _load_data(cfg)
    if cfg.scale is None:
        raise UsageError("--U is required")
    scale = read_matrix(cfg.scale, symmetric=True)
    if scale.shape[0] != g.p:
        raise UsageError(
            f"--U is {scale.shape[0]}x{scale.shape[0]} but the graph has "
            f"{g.p} vertices"
        )
    delta = _resolve_delta(cfg, g.p, scale, data)
    return GWishartParams(og, scale, delta), data


def _chain_budget() -> int | None:
    raw = os.environ.get("GBW_THREADS", "").strip()
    if not raw:
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"GBW_THREADS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise UsageError(f"GBW_THREADS must be positive, got {cap}")
    return cap


def _outdir(cfg: RunConfig) -> str:
    if cfg.out is None:
        raise UsageError("--out is required for this command")
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def _config_payload(cfg: RunConfig) -> dict:
    return dataclasses.asdict(cfg)


# ---------------------------------------------------------------------------
# graph commands


def cmd_graph(cfg: RunConfig) -> int:
    sub = cfg.command.split()[1]
    if sub == "census":
        return _graph_census(cfg)
    g = _load_graph(cfg, cfg.graphs[0])
    if sub == "check":
        return _graph_check(cfg, g)
    if sub == "prime":
        return _graph_prime(cfg, g)
    og = OrderedGraph(g, _resolve_ordering(cfg, g))
    if sub == "triangulate":
        return _graph_triangulate(cfg, og)
    return _graph_cover(cfg, og)


def _graph_check(cfg: RunConfig, g: Graph) -> int:
    peo = is_decomposable(g)
    search = find_gb_ordering(g)
    ordering = _resolve_ordering(cfg, g)
    ok, violations = is_gb_ordering(g, ordering)
    mode = "exhaustive" if search.exhaustive else "heuristic"
    print(f"vertices: {g.p}")
    print(f"edges: {len(g.edges)}")
    print(f"decomposable: {'yes' if peo is not None else 'no'}")
    if search.found:
        elim = " ".join(str(v) for v in search.ordering.elimination)
        print(f"GB: yes ({mode}); elimination order {elim}")
    else:
        print(f"GB: no ({mode})")
    print(f"supplied ordering ({cfg.ordering}) GB: {'yes' if ok else 'no'}")
    if not ok:
        print(f"  first violating triple: {violations[0]}")
    if cfg.out is not None:
        out = _outdir(cfg)
        write_diagnostic_json(
            os.path.join(out, "check.json"),
            {
                "config": _config_payload(cfg),
                "vertices": g.p,
                "edges": len(g.edges),
                "decomposable": peo is not None,
                "gb": search.found,
                "gb_search_exhaustive": search.exhaustive,
                "supplied_ordering_gb": ok,
                "violations": violations[:10],
            },
        )
        if search.found:
            write_ordering(search.ordering, os.path.join(out, "gb_ordering.txt"))
    return EXIT_OK


def _graph_triangulate(cfg: RunConfig, og: OrderedGraph) -> int:
    pattern = triangulate(og)
    vtx = og.ordering.vertex
    fill = sorted(
        tuple(sorted((vtx(i), vtx(j)))) for i, j in pattern.fill
    )
    print(f"fill edges: {len(fill)}")
    for i, j in fill:
        print(f"  {i} {j}")
    if cfg.out is not None:
        out = _outdir(cfg)
        cover = Graph.of(og.p, list(og.graph.edges) + fill)
        write_edge_list(cover, os.path.join(out, "triangulated_edges.txt"))
        write_edge_list(Graph.of(og.p, fill), os.path.join(out, "fill_edges.txt"))
    return EXIT_OK


def _graph_cover(cfg: RunConfig, og: OrderedGraph) -> int:
    cover = gb_cover(og)
    added = sorted(cover.edges - og.graph.edges)
    print(f"cover adds {len(added)} edge(s)")
    for i, j in added:
        print(f"  {i} {j}")
    if cfg.out is not None:
        write_edge_list(cover, os.path.join(_outdir(cfg), "cover_edges.txt"))
    return EXIT_OK


def _graph_prime(cfg: RunConfig, g: Graph) -> int:
    comps = prime_components_with_vertices(g)
    print(f"prime components: {len(comps)}")
    out = _outdir(cfg) if cfg.out is not None else None
    for k, (comp, vertices) in enumerate(comps, start=1):
        print(f"  component {k}: vertices {' '.join(str(v) for v in vertices)}")
        if out is not None:
            relabeled = Graph.of(
                g.p,
                [(vertices[a - 1], vertices[b - 1]) for a, b in comp.edges],
            )
            write_edge_list(relabeled, os.path.join(out, f"prime_{k:02d}.txt"))
    return EXIT_OK


def _graph_census(cfg: RunConfig) -> int:
    if cfg.max_order is None:
        raise UsageError("census needs --max-order")
    if cfg.graphs:
        if not cfg.graph6:
            raise UsageError("external census input must be graph6 (--graph6)")
        by_order: dict[int, list[Graph]] = {}
        for path in cfg.graphs:
            for g in read_graph6(path):
                by_order.setdefault(g.p, []).append(g)
        rows = census(cfg.max_order, graphs_by_order=by_order)
    else:
        rows = census(cfg.max_order)
    header = "order,total,decomposable,generalized_bartlett,pct_decomposable,pct_gb"
    print(header)
    lines = [header]
    for r in rows:
        line = (
            f"{r.order},{r.total_connected},{r.decomposable},"
            f"{r.generalized_bartlett},{r.pct_decomposable},"
            f"{r.pct_generalized_bartlett}"
        )
        print(line)
        lines.append(line)
    if cfg.out is not None:
        path = os.path.join(_outdir(cfg), "census.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sampler commands


def _posterior(
    params: GWishartParams, data: tuple[np.ndarray, int] | None
) -> GWishartParams:
    if data is None:
        return params
    s_mat, n = data
    return posterior_params(params, s_mat, n)


def _summary_payload(cfg: RunConfig, og: OrderedGraph, merged: ChainSummary) -> dict:
    g = og.graph
    labels = chain_labels(g)
    entries = tracked_entries(g)
    payload = {
        "config": _config_payload(cfg),
        "p": og.p,
        "edges": len(g.edges),
        "retained": merged.retained,
        "level": merged.level,
        "tracked": labels,
        "mean": [float(merged.mean[i - 1, j - 1]) for i, j in entries],
        "ci_low": [float(merged.ci_low[i - 1, j - 1]) for i, j in entries],
        "ci_high": [float(merged.ci_high[i - 1, j - 1]) for i, j in entries],
    }
    if merged.acceptance_rate is not None:
        payload["acceptance_rate"] = merged.acceptance_rate
    return payload


def _write_chains(
    cfg: RunConfig,
    og: OrderedGraph,
    chains: list[ChainSummary],
    extra: dict | None = None,
) -> ChainSummary:
    out = _outdir(cfg)
    for summary in chains:
        path = os.path.join(out, f"chain_{summary.chain_index:02d}.csv")
        write_chain_csv(path, og.graph, summary.iterations, summary.omega_draws)
    merged = merge_chain_summaries(chains) if len(chains) > 1 else chains[0]
    payload = _summary_payload(cfg, og, merged)
    if extra:
        payload.update(extra)
    write_summary_json(os.path.join(out, "summary.json"), payload)
    return merged


def cmd_sample(cfg: RunConfig) -> int:
    sampler = cfg.command.split()[1]
    params, data = _build_params(cfg, cfg.graphs[0])
    og = params.ordered_graph
    if sampler != "gibbs" and cfg.chains != 1:
        raise UsageError("--chains applies to the coordinate sampler only")
    if sampler == "gibbs":
        return _sample_gibbs(cfg, params, data)
    post = _posterior(params, data)
    if sampler == "direct":
        return _sample_direct(cfg, post)
    if sampler == "ar":
        return _sample_ar(cfg, post)
    return _sample_mh(cfg, post)


def _sample_gibbs(
    cfg: RunConfig,
    params: GWishartParams,
    data: tuple[np.ndarray, int] | None,
) -> int:
    cap = _chain_budget() or cfg.chains
    chains: list[ChainSummary] = []
    for start in range(0, cfg.chains, cap):
        idx = list(range(start, min(start + cap, cfg.chains)))
        chains.extend(
            gibbs_run_many(
                params,
                data,
                iters=cfg.iters,
                burnin=cfg.burnin,
                thin=cfg.thin,
                seed=cfg.seed,
                chain_indices=idx,
                level=cfg.level,
            )
        )
    merged = _write_chains(cfg, params.ordered_graph, chains)
    print(f"gibbs: {len(chains)} chain(s), {merged.retained} retained draws")
    return EXIT_OK


def _sample_direct(cfg: RunConfig, params: GWishartParams) -> int:
    og = params.ordered_graph
    fills = dependent_fill_pairs(og)
    if fills:
        offenders = [
            (og.ordering.vertex(i), og.ordering.vertex(j)) for i, j in fills[:3]
        ]
        raise InfeasibleError(
            "direct sampling needs a decomposable graph with a perfect "
            f"elimination ordering; fill remains between vertices {offenders}"
        )
    n_draws = cfg.iters
    L, D = direct_sample_many(params, n_draws, chain_generator(cfg.seed))
    omega_rank = np.einsum("rik,rk,rjk->rij", L, D, L)
    ranks0 = np.asarray(og.ordering.ranks, dtype=int) - 1
    draws = omega_rank[:, ranks0][:, :, ranks0]
    summary = _point_summary(cfg, draws)
    merged = _write_chains(cfg, og, [summary])
    print(f"direct: {merged.retained} independent draws")
    return EXIT_OK


def _point_summary(cfg: RunConfig, draws: np.ndarray) -> ChainSummary:
    """Wrap independent draws in the chain container (no burn-in)."""
    s = posterior_mean_and_ci(draws, cfg.level)
    return ChainSummary(
        omega_draws=draws,
        mean=s.omega_mean,
        ci_low=s.omega_low,
        ci_high=s.omega_high,
        level=cfg.level,
        seed=cfg.seed,
        iters=draws.shape[0],
        burnin=0,
        thin=1,
    )


def _sample_ar(cfg: RunConfig, params: GWishartParams) -> int:
    omegas, attempts, estimate = ar_sample_many(
        params,
        cfg.iters,
        max_attempts=cfg.max_attempts,
        rng=chain_generator(cfg.seed),
    )
    out = _outdir(cfg)
    ar_info = {
        "requested": cfg.iters,
        "accepted": int(omegas.shape[0]),
        "attempts": attempts,
        "acceptance_estimate": estimate,
    }
    if omegas.shape[0] < cfg.iters:
        write_summary_json(
            os.path.join(out, "summary.json"),
            {"config": _config_payload(cfg), **ar_info},
        )
        print(
            f"ar: budget exhausted after {attempts} attempts "
            f"({omegas.shape[0]}/{cfg.iters} draws, acceptance ~ {estimate:.3g})"
        )
        return EXIT_RESOURCE
    summary = _point_summary(cfg, omegas)
    _write_chains(cfg, params.ordered_graph, [summary], extra=ar_info)
    print(
        f"ar: {omegas.shape[0]} draws in {attempts} attempts "
        f"(acceptance ~ {estimate:.3g})"
    )
    return EXIT_OK


def _sample_mh(cfg: RunConfig, params: GWishartParams) -> int:
    summary = mh_run(
        params,
        cfg.iters,
        cfg.seed,
        burnin=cfg.burnin,
        thin=cfg.thin,
        level=cfg.level,
    )
    merged = _write_chains(cfg, params.ordered_graph, [summary])
    print(
        f"mh: {merged.retained} retained draws, "
        f"acceptance rate {merged.acceptance_rate:.3g}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# diagnostics


def cmd_diagnose(cfg: RunConfig) -> int:
    kind = cfg.command.split()[1]
    if kind == "thm2":
        return _diagnose_thm2(cfg)
    if kind == "dic":
        return _diagnose_dic(cfg)
    return _diagnose_loss(cfg)


def _diagnose_thm2(cfg: RunConfig) -> int:
    params, data = _build_params(cfg, cfg.graphs[0])
    target = _posterior(params, data)
    cap = _chain_budget() or cfg.chains
    chains: list[ChainSummary] = []
    for start in range(0, cfg.chains, cap):
        idx = list(range(start, min(start + cap, cfg.chains)))
        chains.extend(
            gibbs_run_many(
                params,
                data,
                iters=cfg.iters,
                burnin=cfg.burnin,
                thin=cfg.thin,
                seed=cfg.seed,
                chain_indices=idx,
                level=cfg.level,
            )
        )
    merged = merge_chain_summaries(chains) if len(chains) > 1 else chains[0]
    try:
        report = theorem2_diagnostic(merged, target)
    except ValueError as exc:
        if "exceed 4" in str(exc):
            raise InfeasibleError(str(exc)) from None
        raise
    print(report)
    if cfg.out is not None:
        out = _outdir(cfg)
        with open(os.path.join(out, "thm2.csv"), "w", encoding="utf-8") as fh:
            fh.write("i,j,simulated_mean,true_mean\n")
            for row in report.rows:
                fh.write(f"{row.i},{row.j},{row.simulated:.17g},{row.expected:.17g}\n")
        write_diagnostic_json(
            os.path.join(out, "thm2.json"),
            {
                "config": _config_payload(cfg),
                "n_draws": report.n_draws,
                "max_abs_deviation": report.max_abs_deviation,
                "rows": [
                    {
                        "i": r.i,
                        "j": r.j,
                        "simulated_mean": r.simulated,
                        "true_mean": r.expected,
                    }
                    for r in report.rows
                ],
            },
        )
        write_matrix(report.sigma_star_mean, os.path.join(out, "sigma_star_mean.csv"))
    return EXIT_OK


def _diagnose_dic(cfg: RunConfig) -> int:
    data = _load_data(cfg)
    if data is None:
        raise UsageError("dic needs --data")
    s_mat, n = data
    p = s_mat.shape[0]
    if cfg.scale is not None:
        scale = read_matrix(cfg.scale, symmetric=True)
    else:
        # default scale of the selection protocol: c I with c matching
        # the average total variation of the data
        scale = float(np.mean(np.diag(n * s_mat))) * np.eye(p)
    delta_spec = cfg.delta if cfg.delta is not None else "empirical"
    scored: list[tuple[float, str]] = []
    for path in cfg.graphs:
        g = _load_graph(cfg, path)
        if g.p != p:
            raise UsageError(f"{path}: graph order {g.p} does not match data ({p})")
        og = OrderedGraph(g, _resolve_ordering(cfg, g))
        delta = _resolve_delta(
            dataclasses.replace(cfg, delta=delta_spec), p, scale, data
        )
        prior = GWishartParams(og, scale, delta)
        chain = _dic_chain(cfg, prior, data)
        scored.append((dic(chain, s_mat, n), path))
    order = sorted(range(len(scored)), key=lambda k: scored[k][0])
    print("rank,dic,graph")
    lines = ["rank,dic,graph"]
    for rank, k in enumerate(order, start=1):
        score, path = scored[k]
        flag = " *best*" if rank == 1 else ""
        print(f"{rank},{score:.6f},{path}{flag}")
        lines.append(f"{rank},{score:.17g},{path}")
    if cfg.out is not None:
        out = _outdir(cfg)
        with open(os.path.join(out, "dic.csv"), "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        write_diagnostic_json(
            os.path.join(out, "dic.json"),
            {
                "config": _config_payload(cfg),
                "n": n,
                "scores": [
                    {"graph": path, "dic": score} for score, path in scored
                ],
                "best": scored[order[0]][1],
            },
        )
    return EXIT_OK


def _dic_chain(
    cfg: RunConfig, prior: GWishartParams, data: tuple[np.ndarray, int]
) -> ChainSummary:
    return gibbs_run_many(
        prior,
        data,
        iters=cfg.iters,
        burnin=cfg.burnin,
        thin=cfg.thin,
        seed=cfg.seed,
        chain_indices=[0],
        level=cfg.level,
    )[0]


def _diagnose_loss(cfg: RunConfig) -> int:
    if cfg.estimate is None or cfg.truth is None:
        raise UsageError("loss needs --estimate and --truth")
    estimate = read_matrix(cfg.estimate, symmetric=True)
    truth = read_matrix(cfg.truth, symmetric=True)
    try:
        value = stein_loss(estimate, truth)
    except (NotPositiveDefiniteError, ValueError) as exc:
        raise InfeasibleError(str(exc)) from None
    print(f"stein_loss: {value:.12g}")
    if cfg.out is not None:
        write_diagnostic_json(
            os.path.join(_outdir(cfg), "loss.json"),
            {"config": _config_payload(cfg), "stein_loss": value},
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sub: argparse.ArgumentParser, *, graph_many: bool = False) -> None:
    sub.add_argument(
        "--graph",
        action="append",
        default=[],
        metavar="FILE",
        help="graph file (edge list, or graph6 with --graph6)"
        + ("; repeatable" if graph_many else ""),
    )
    sub.add_argument("--graph6", action="store_true", help="graph files are graph6")
    sub.add_argument(
        "--ordering",
        default="natural",
        metavar="SRC",
        help="vertex ordering: natural, min-fill, or a rank file",
    )
    sub.add_argument("--out", metavar="DIR", help="output directory")


def _add_model(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--U", dest="scale", metavar="FILE", help="scale matrix CSV")
    sub.add_argument(
        "--delta",
        metavar="SPEC",
        help="shape vector: file, const:<x>, empirical, inv-diag, or prec-diag",
    )
    sub.add_argument("--data", metavar="FILE", help="n x p data CSV (raw observations)")
    sub.add_argument(
        "--n",
        type=int,
        metavar="N",
        help="sample size; makes --data a p x p covariance instead of raw data",
    )


def _add_run(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--iters", type=int, default=3000, help="sweeps / draws")
    sub.add_argument("--burnin", type=int, default=1000)
    sub.add_argument("--thin", type=int, default=1)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--chains", type=int, default=1)
    sub.add_argument("--level", type=float, default=0.95, help="credible level")
    sub.add_argument(
        "--max-attempts", type=int, default=100_000, help="accept-reject budget"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbw",
        description="Bayesian inference for Gaussian concentration graph models",
    )
    top = parser.add_subparsers(dest="group", required=True)

    graph = top.add_parser("graph", help="graph reports").add_subparsers(
        dest="sub", required=True
    )
    for name in ("check", "triangulate", "cover", "prime"):
        sub = graph.add_parser(name)
        _add_common(sub)
    censub = graph.add_parser("census")
    _add_common(censub)
    censub.add_argument("--max-order", type=int, metavar="K")

    sample = top.add_parser("sample", help="posterior / prior sampling").add_subparsers(
        dest="sub", required=True
    )
    for name in ("gibbs", "direct", "ar", "mh"):
        sub = sample.add_parser(name)
        _add_common(sub)
        _add_model(sub)
        _add_run(sub)

    diag = top.add_parser("diagnose", help="diagnostics").add_subparsers(
        dest="sub", required=True
    )
    for name in ("thm2", "dic"):
        sub = diag.add_parser(name)
        _add_common(sub, graph_many=(name == "dic"))
        _add_model(sub)
        _add_run(sub)
    loss = diag.add_parser("loss")
    loss.add_argument("--estimate", metavar="FILE", help="estimated matrix CSV")
    loss.add_argument("--truth", metavar="FILE", help="true matrix CSV")
    loss.add_argument("--out", metavar="DIR")
    return parser


def _config_from(args: argparse.Namespace) -> RunConfig:
    command = f"{args.group} {args.sub}"
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    values = {
        k: v for k, v in vars(args).items() if k in fields and v is not None
    }
    values["command"] = command
    values["graphs"] = tuple(getattr(args, "graph", []) or [])
    return RunConfig(**values)


def _require_graph(cfg: RunConfig) -> None:
    needs_graph = cfg.command not in ("graph census", "diagnose loss")
    if needs_graph and not cfg.graphs:
        raise UsageError("--graph is required")
    if cfg.command == "diagnose dic":
        if len(cfg.graphs) < 1:
            raise UsageError("dic needs at least one --graph")
    elif cfg.command != "graph census" and len(cfg.graphs) > 1:
        raise UsageError("this command takes a single --graph")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config_from(args)
        _require_graph(cfg)
        if cfg.command.startswith("graph"):
            return cmd_graph(cfg)
        if cfg.command.startswith("sample"):
            return cmd_sample(cfg)
        return cmd_diagnose(cfg)
    except (UsageError, FileFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotGeneralizedBartlettError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InfeasibleError, NotPositiveDefiniteError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
