"""Lattice graphs, boundary tagging, and the topology transformation.

Graphs are stored edge-list style in numpy arrays.  Each edge is a bundle of
`multiplicity` parallel biased links between two nodes and carries either an
unresolved probability (NaN) or the resolved probability that the bundle
yields a usable secret bit.

Honeycomb embedding (brick wall): node grid of (rows+1) x (2*cols+2) points,
all horizontal edges present, vertical edges at (r, c)-(r+1, c) where r+c is
even.  This gives V = (rows+1)(2*cols+2) nodes, rows*(cols+1) vertical plus
(rows+1)(2*cols+1) horizontal edges, and rows*cols hexagonal faces, so
F - E + V = 2 counting the outer face.  The even node-grid width makes the
two sublattices exactly equal in size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from io import StringIO
from typing import Callable

import numpy as np

from .errors import ValidationError
from .secret_state import parallel_link_success


@dataclass(frozen=True)
class NetworkGraph:
    """Multigraph of positioned nodes whose edges are link bundles.

    `open_prob` holds the per-edge probability that the bundle becomes an
    open bond; NaN marks bundles whose probability has not been resolved
    from a link parameter yet.
    """

    positions: np.ndarray  # (n, 2) float64
    edge_u: np.ndarray  # (m,) int32
    edge_v: np.ndarray  # (m,) int32
    multiplicity: np.ndarray  # (m,) int32
    open_prob: np.ndarray  # (m,) float64, NaN where unresolved
    left: np.ndarray  # boundary node ids, int32
    right: np.ndarray
    top: np.ndarray
    bottom: np.ndarray
    family: str

    def __post_init__(self):
        n = len(self.positions)
        if n < 1:
            raise ValidationError("graph needs at least one node")
        if np.any(self.edge_u == self.edge_v):
            raise ValidationError("self-loops are not allowed")
        for arr in (self.edge_u, self.edge_v):
            if len(arr) and (arr.min() < 0 or arr.max() >= n):
                raise ValidationError("edge endpoint out of range")
        if np.any(self.multiplicity < 1):
            raise ValidationError("bundle multiplicity must be >= 1")
        resolved = ~np.isnan(self.open_prob)
        if np.any((self.open_prob[resolved] < 0) | (self.open_prob[resolved] > 1)):
            raise ValidationError("edge probabilities must lie in [0, 1]")
        tags = [self.left, self.right, self.top, self.bottom]
        if any(len(t) == 0 for t in tags):
            raise ValidationError("boundary tag sets must be nonempty")
        flat = np.concatenate(tags)
        if len(np.unique(flat)) != len(flat):
            raise ValidationError("boundary tag sets must be disjoint")

    @property
    def n_nodes(self) -> int:
        return len(self.positions)

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    @property
    def resolved(self) -> bool:
        return not np.any(np.isnan(self.open_prob))

    def with_edge_probability(self, p_edge: float) -> "NetworkGraph":
        """Every bundle becomes an open bond with the same raw probability."""
        if not (0.0 <= p_edge <= 1.0):
            raise ValidationError(f"edge probability {p_edge} not in [0, 1]")
        return replace(self, open_prob=np.full(self.n_edges, p_edge))

    def with_naive_strategy(self, p: float) -> "NetworkGraph":
        """Resolve every bundle by converting its links in place: 2p for a
        single link, 2p(2-p) for a doubled one."""
        probs = np.array([naive_edge_probability(p, int(m)) for m in self.multiplicity])
        return replace(self, open_prob=probs)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        np.add.at(deg, self.edge_u, 1)
        np.add.at(deg, self.edge_v, 1)
        return deg


def _tags(node_id: Callable[[int, int], int], n_rows: int, n_cols: int):
    """Left/right take whole first/last columns; top/bottom get the rest of
    the first/last rows, keeping the four sets disjoint.  Two-column grids
    have no row interior, so corners are split around the perimeter there."""
    if n_cols > 2:
        left = [node_id(r, 0) for r in range(n_rows)]
        right = [node_id(r, n_cols - 1) for r in range(n_rows)]
        top = [node_id(0, c) for c in range(1, n_cols - 1)]
        bottom = [node_id(n_rows - 1, c) for c in range(1, n_cols - 1)]
    else:
        left = [node_id(r, 0) for r in range(n_rows - 1)]
        right = [node_id(r, n_cols - 1) for r in range(1, n_rows)]
        top = [node_id(0, n_cols - 1)]
        bottom = [node_id(n_rows - 1, 0)]
    return tuple(np.array(t, dtype=np.int32) for t in (left, right, top, bottom))


def _graph(positions, edges, mult, tags, family) -> NetworkGraph:
    eu = np.array([e[0] for e in edges], dtype=np.int32)
    ev = np.array([e[1] for e in edges], dtype=np.int32)
    return NetworkGraph(
        positions=np.asarray(positions, dtype=np.float64),
        edge_u=eu,
        edge_v=ev,
        multiplicity=np.full(len(edges), mult, dtype=np.int32),
        open_prob=np.full(len(edges), np.nan),
        left=tags[0],
        right=tags[1],
        top=tags[2],
        bottom=tags[3],
        family=family,
    )


def build_honeycomb(rows: int, cols: int, multiplicity: int = 1) -> NetworkGraph:
    """Brick-wall honeycomb of rows x cols hexagons; every adjacent node
    pair shares a bundle of `multiplicity` links."""
    if rows < 2 or cols < 2:
        raise ValidationError("honeycomb needs rows, cols >= 2")
    if multiplicity < 1:
        raise ValidationError("multiplicity must be >= 1")
    n_rows, n_cols = rows + 1, 2 * cols + 2

    def nid(r: int, c: int) -> int:
        return r * n_cols + c

    positions = [(float(c), float(r)) for r in range(n_rows) for c in range(n_cols)]
    edges = []
    for r in range(n_rows):
        for c in range(n_cols - 1):
            edges.append((nid(r, c), nid(r, c + 1)))
    for r in range(n_rows - 1):
        for c in range(n_cols):
            if (r + c) % 2 == 0:
                edges.append((nid(r, c), nid(r + 1, c)))
    return _graph(positions, edges, multiplicity, _tags(nid, n_rows, n_cols), "honeycomb")


def build_triangular(rows: int, cols: int) -> NetworkGraph:
    """Triangular lattice from a rows x cols grid with odd rows offset by
    half a step; interior nodes have degree 6."""
    if rows < 2 or cols < 2:
        raise ValidationError("triangular lattice needs rows, cols >= 2")

    def nid(r: int, c: int) -> int:
        return r * cols + c

    positions = [
        (c + 0.5 * (r % 2), r * math.sqrt(3.0) / 2.0) for r in range(rows) for c in range(cols)
    ]
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((nid(r, c), nid(r, c + 1)))
            if r + 1 < rows:
                edges.append((nid(r, c), nid(r + 1, c)))
                cc = c - 1 if r % 2 == 0 else c + 1
                if 0 <= cc < cols:
                    edges.append((nid(r, c), nid(r + 1, cc)))
    return _graph(positions, edges, 1, _tags(nid, rows, cols), "triangular")


def build_square(rows: int, cols: int) -> NetworkGraph:
    """Plain square grid; calibration lattice with known threshold 1/2."""
    if rows < 2 or cols < 2:
        raise ValidationError("square lattice needs rows, cols >= 2")

    def nid(r: int, c: int) -> int:
        return r * cols + c

    positions = [(float(c), float(r)) for r in range(rows) for c in range(cols)]
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((nid(r, c), nid(r, c + 1)))
            if r + 1 < rows:
                edges.append((nid(r, c), nid(r + 1, c)))
    return _graph(positions, edges, 1, _tags(nid, rows, cols), "square")


def naive_edge_probability(p: float, multiplicity: int) -> float:
    """Probability that a bundle converts into an open bond when its links
    are converted in place: 2p for one link, 2p(2-p) for two."""
    if not (0.0 <= p <= 0.5):
        raise ValidationError(f"link parameter {p} not in [0, 1/2]")
    if multiplicity == 1:
        return 2.0 * p
    if multiplicity == 2:
        return parallel_link_success(p).probability
    raise ValidationError(f"no conversion rule for multiplicity {multiplicity}")


def _bipartition(graph: NetworkGraph) -> np.ndarray:
    """Two-color the graph by BFS; raises if it is not bipartite."""
    n = graph.n_nodes
    color = np.full(n, -1, dtype=np.int8)
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in zip(graph.edge_u, graph.edge_v):
        adj[u].append(int(v))
        adj[v].append(int(u))
    for start in range(n):
        if color[start] >= 0:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            u = queue.pop()
            for v in adj[u]:
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    raise ValidationError("graph is not bipartite; not a honeycomb build")
    return color


def transform_to_triangular(hex_graph: NetworkGraph, p: float) -> NetworkGraph:
    """Rewrite a doubled-edge honeycomb into a triangular lattice.

    Every node of one sublattice relays its three doubled bundles pairwise:
    each pair of bundles forms a two-link chain between two of its neighbors,
    which succeeds with probability 2p.  The relaying sublattice disappears;
    the remaining nodes form a triangular lattice whose every edge carries
    open probability 2p.  Boundary relays with only two bundles contribute
    their single pairable chain; leftover links are discarded.
    """
    if hex_graph.family != "honeycomb":
        raise ValidationError("transform expects a honeycomb build")
    if np.any(hex_graph.multiplicity != 2):
        raise ValidationError("transform expects every bundle doubled (multiplicity 2)")
    if not (0.0 <= p <= 0.5):
        raise ValidationError(f"link parameter {p} not in [0, 1/2]")

    color = _bipartition(hex_graph)
    tagged = np.concatenate([hex_graph.left, hex_graph.right, hex_graph.top, hex_graph.bottom])
    boundary_kept = [int(np.sum(color[tagged] == keep)) for keep in (0, 1)]
    if boundary_kept[0] != boundary_kept[1]:
        keep = int(np.argmax(boundary_kept))
    else:
        keep = int(color[0])  # tie: keep the sublattice containing node 0

    kept_ids = np.flatnonzero(color == keep)
    remap = np.full(hex_graph.n_nodes, -1, dtype=np.int64)
    remap[kept_ids] = np.arange(len(kept_ids))

    adj: list[list[int]] = [[] for _ in range(hex_graph.n_nodes)]
    for u, v in zip(hex_graph.edge_u, hex_graph.edge_v):
        adj[u].append(int(v))
        adj[v].append(int(u))

    edges = []
    for relay in np.flatnonzero(color != keep):
        nbrs = sorted(set(adj[relay]))
        if len(nbrs) > 3:
            raise ValidationError("node degree exceeds 3; not a honeycomb build")
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                edges.append((remap[nbrs[i]], remap[nbrs[j]]))

    def keep_tags(tag: np.ndarray) -> np.ndarray:
        sel = tag[color[tag] == keep]
        return remap[sel].astype(np.int32)

    eu = np.array([e[0] for e in edges], dtype=np.int32)
    ev = np.array([e[1] for e in edges], dtype=np.int32)
    return NetworkGraph(
        positions=hex_graph.positions[kept_ids],
        edge_u=eu,
        edge_v=ev,
        multiplicity=np.ones(len(edges), dtype=np.int32),
        open_prob=np.full(len(edges), 2.0 * p),
        left=keep_tags(hex_graph.left),
        right=keep_tags(hex_graph.right),
        top=keep_tags(hex_graph.top),
        bottom=keep_tags(hex_graph.bottom),
        family="triangular",
    )


def export_graph(graph: NetworkGraph) -> str:
    """Line-oriented text form for external visualization.

    One `node <id> <x> <y> [tags]` line per node and one
    `edge <u> <v> <prob>` line per bundle (prob is `nan` when unresolved).
    """
    tag_names = ("left", "right", "top", "bottom")
    tag_sets = [set(t.tolist()) for t in (graph.left, graph.right, graph.top, graph.bottom)]
    out = StringIO()
    for i, (x, y) in enumerate(graph.positions):
        tags = [name for name, ids in zip(tag_names, tag_sets) if i in ids]
        suffix = (" " + " ".join(tags)) if tags else ""
        out.write(f"node {i} {x:.6g} {y:.6g}{suffix}\n")
    for u, v, q in zip(graph.edge_u, graph.edge_v, graph.open_prob):
        out.write(f"edge {u} {v} {q:.12g}\n")
    return out.getvalue()
