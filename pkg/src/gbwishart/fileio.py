"""Text formats shared by the CLI: edge lists, orderings, graph6, CSV matrices.

Conventions:

* Edge list: first non-comment line is the vertex count ``p``, every
  following non-comment line is an edge ``i j`` with 1-based labels.
  ``#`` starts a comment (whole-line or trailing).
* Ordering file: a single non-comment line of ``p`` space-separated ranks,
  position ``i`` holding the rank of vertex ``i``.
* graph6: the standard printable 6-bit encoding of the upper triangle in
  column-major order, bytes offset by 63, with the optional
  ``>>graph6<<`` header tolerated.
* Matrix CSV: headerless, comma-separated, full (square) storage, written
  with 17 significant digits so float64 values round-trip exactly.
* Chain CSV: one row per retained draw, an iteration index followed by the
  upper-triangle entries of the precision matrix restricted to the
  diagonal and the edge set (row-major), with a header naming each column.

Parse errors raise ``FileFormatError`` carrying ``path:line`` context.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

from .graphs import Graph, Ordering

SUMMARY_SCHEMA = "gbw-summary/1"
DIAGNOSTIC_SCHEMA = "gbw-diagnostic/1"

SYMMETRY_TOL = 1e-12


class FileFormatError(ValueError):
    """Malformed input file; message includes path and line number."""


def _fail(path: str, lineno: int, msg: str) -> FileFormatError:
    return FileFormatError(f"{path}:{lineno}: {msg}")


def _content_lines(path: str) -> list[tuple[int, str]]:
    """Non-empty, comment-stripped lines as (lineno, text) pairs."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if text:
                out.append((lineno, text))
    return out


# ---------------------------------------------------------------------------
# edge lists


def read_edge_list(path: str) -> Graph:
    lines = _content_lines(path)
    if not lines:
        raise _fail(path, 1, "empty edge list (expected vertex count)")
    lineno, text = lines[0]
    try:
        p = int(text)
    except ValueError:
        raise _fail(path, lineno, f"expected vertex count, got {text!r}") from None
    if p < 1:
        raise _fail(path, lineno, f"vertex count must be positive, got {p}")
    pairs = []
    for lineno, text in lines[1:]:
        parts = text.split()
        if len(parts) != 2:
            raise _fail(path, lineno, f"expected 'i j', got {text!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise _fail(path, lineno, f"non-integer edge {text!r}") from None
        if not (1 <= i <= p and 1 <= j <= p):
            raise _fail(path, lineno, f"edge ({i},{j}) outside 1..{p}")
        if i == j:
            raise _fail(path, lineno, f"self-loop at vertex {i}")
        pairs.append((i, j))
    return Graph.of(p, pairs)


def write_edge_list(g: Graph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{g.p}\n")
        for i, j in sorted(g.edges):
            fh.write(f"{i} {j}\n")


# ---------------------------------------------------------------------------
# orderings


def read_ordering(path: str, p: int) -> Ordering:
    lines = _content_lines(path)
    if not lines:
        raise _fail(path, 1, "empty ordering file")
    if len(lines) > 1:
        raise _fail(path, lines[1][0], "ordering file must hold a single line")
    lineno, text = lines[0]
    parts = text.split()
    if len(parts) != p:
        raise _fail(path, lineno, f"expected {p} ranks, got {len(parts)}")
    try:
        ranks = tuple(int(s) for s in parts)
    except ValueError:
        raise _fail(path, lineno, "ranks must be integers") from None
    if sorted(ranks) != list(range(1, p + 1)):
        raise _fail(path, lineno, f"ranks must be a permutation of 1..{p}")
    return Ordering(ranks)


def write_ordering(sigma: Ordering, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(" ".join(str(r) for r in sigma.ranks) + "\n")


# ---------------------------------------------------------------------------
# graph6

_G6_HEADER = ">>graph6<<"


def graph_to_graph6(g: Graph) -> str:
    n = g.p
    if n <= 62:
        prefix = chr(n + 63)
    elif n <= 258047:
        prefix = "~" + "".join(chr(((n >> s) & 0x3F) + 63) for s in (12, 6, 0))
    else:
        raise ValueError(f"graph6 encoding supports at most 258047 vertices, got {n}")
    bits = []
    for j in range(1, n):
        for i in range(j):
            bits.append(1 if g.has_edge(i + 1, j + 1) else 0)
    while len(bits) % 6:
        bits.append(0)
    chars = []
    for k in range(0, len(bits), 6):
        v = 0
        for b in bits[k : k + 6]:
            v = (v << 1) | b
        chars.append(chr(v + 63))
    return prefix + "".join(chars)


def parse_graph6(record: str) -> Graph:
    """Decode one graph6 record (no trailing newline)."""
    s = record
    if s.startswith(_G6_HEADER):
        s = s[len(_G6_HEADER) :]
    if not s:
        raise ValueError("empty graph6 record")
    data = [ord(c) - 63 for c in s]
    if any(v < 0 or v > 63 for v in data):
        raise ValueError("byte outside graph6 range 63..126")
    if data[0] == 63:  # '~': long form
        if len(data) < 4:
            raise ValueError("truncated long-form vertex count")
        n = (data[1] << 12) | (data[2] << 6) | data[3]
        body = data[4:]
    else:
        n = data[0]
        body = data[1:]
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    if len(body) != need:
        raise ValueError(f"expected {need} data bytes for {n} vertices, got {len(body)}")
    bits = []
    for v in body:
        for s6 in (5, 4, 3, 2, 1, 0):
            bits.append((v >> s6) & 1)
    pairs = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                pairs.append((i + 1, j + 1))
            k += 1
    return Graph.of(n, pairs)


def read_graph6(path: str) -> list[Graph]:
    graphs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                graphs.append(parse_graph6(line))
            except ValueError as exc:
                raise _fail(path, lineno, f"bad graph6 record: {exc}") from None
    return graphs


def write_graph6(graphs: Iterable[Graph], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for g in graphs:
            fh.write(graph_to_graph6(g) + "\n")


# ---------------------------------------------------------------------------
# matrices


def read_matrix(path: str, *, symmetric: bool = False) -> np.ndarray:
    rows = []
    width = None
    for lineno, text in _content_lines(path):
        parts = [s.strip() for s in text.split(",")]
        try:
            row = [float(s) for s in parts]
        except ValueError:
            raise _fail(path, lineno, f"non-numeric entry in {text!r}") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise _fail(path, lineno, f"ragged row: expected {width} entries, got {len(row)}")
        rows.append(row)
    if not rows:
        raise _fail(path, 1, "empty matrix file")
    a = np.array(rows, dtype=float)
    if symmetric:
        if a.shape[0] != a.shape[1]:
            raise _fail(path, 1, f"expected square matrix, got {a.shape[0]}x{a.shape[1]}")
        skew = np.abs(a - a.T).max()
        if skew > SYMMETRY_TOL:
            raise _fail(path, 1, f"matrix not symmetric (max |A-A^T| = {skew:g})")
        a = (a + a.T) / 2.0
    return a


def write_matrix(a: np.ndarray, path: str) -> None:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    with open(path, "w", encoding="utf-8") as fh:
        for row in a:
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


# ---------------------------------------------------------------------------
# chain CSV


def tracked_entries(g: Graph) -> list[tuple[int, int]]:
    """Upper-triangle (i, j) pairs stored per draw: diagonal plus edges, row-major."""
    out = []
    for i in range(1, g.p + 1):
        for j in range(i, g.p + 1):
            if i == j or g.has_edge(i, j):
                out.append((i, j))
    return out


def chain_labels(g: Graph) -> list[str]:
    return [f"w_{i}_{j}" for i, j in tracked_entries(g)]


def write_chain_csv(path: str, g: Graph, iters: Sequence[int], draws: np.ndarray) -> None:
    """draws: (ndraw, p, p) array of precision matrices, one row per retained draw."""
    entries = tracked_entries(g)
    labels = chain_labels(g)
    draws = np.asarray(draws, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("iter," + ",".join(labels) + "\n")
        for it, omega in zip(iters, draws):
            vals = ",".join(f"{omega[i - 1, j - 1]:.17g}" for i, j in entries)
            fh.write(f"{it},{vals}\n")


def read_chain_csv(path: str) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Returns (entry labels, iteration indices, draws as (ndraw, nentry))."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        cols = header.split(",")
        if not cols or cols[0] != "iter":
            raise _fail(path, 1, "chain file must start with an 'iter' header column")
        labels = cols[1:]
        iters = []
        rows = []
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise _fail(path, lineno, f"expected {len(cols)} fields, got {len(parts)}")
            iters.append(int(parts[0]))
            rows.append([float(s) for s in parts[1:]])
    return labels, np.array(iters, dtype=int), np.array(rows, dtype=float)


# ---------------------------------------------------------------------------
# JSON summaries


def write_summary_json(path: str, payload: dict) -> None:
    doc = {"schema": SUMMARY_SCHEMA}
    doc.update(payload)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, default=_json_default)
        fh.write("\n")


def write_diagnostic_json(path: str, payload: dict) -> None:
    doc = {"schema": DIAGNOSTIC_SCHEMA}
    doc.update(payload)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")
