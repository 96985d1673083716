"""Bond-percolation Monte Carlo: cluster sampling, crossing curves, and
percolation-threshold estimation.

The workhorse is the spanning-onset sweep: each sample draws one random
weight per edge, inserts edges in increasing weight order into a union-find
structure, and records the weight at which the source side first meets the
target side.  For an unresolved graph the weights are uniform and the onset
empirical CDF *is* the crossing-probability curve, so a single batch of
samples gives every point of a threshold sweep.  For a resolved graph the
weights are U/q_edge and "onset <= 1" reproduces opening each edge with its
own probability.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from numba import njit

from .errors import ValidationError
from .lattice import (
    NetworkGraph,
    build_honeycomb,
    build_square,
    build_triangular,
    naive_edge_probability,
    transform_to_triangular,
)
from .rng import batch_ranges, derived_stream, subseed

ONSET_BATCH = 64
_BISECTION_TOL = 1e-4


@njit(cache=True, nogil=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True)
def _union(parent, size, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return
    if size[ra] < size[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] += size[rb]


@njit(cache=True, nogil=True)
def _onset_batch_kernel(edge_u, edge_v, order, weights, n_nodes, sources, targets, out):
    """Per sample: insert edges in `order`, record the weight at which the
    source-side virtual node joins the target-side one (inf if never)."""
    n_samples, n_edges = order.shape
    src = n_nodes
    tgt = n_nodes + 1
    parent = np.empty(n_nodes + 2, np.int64)
    size = np.empty(n_nodes + 2, np.int64)
    for t in range(n_samples):
        for i in range(n_nodes + 2):
            parent[i] = i
            size[i] = 1
        for s in sources:
            _union(parent, size, s, src)
        for s in targets:
            _union(parent, size, s, tgt)
        out[t] = np.inf
        for k in range(n_edges):
            e = order[t, k]
            w = weights[t, e]
            if w == np.inf:
                break
            _union(parent, size, edge_u[e], edge_v[e])
            if _find(parent, src) == _find(parent, tgt):
                out[t] = w
                break


@njit(cache=True, nogil=True)
def _cluster_roots_kernel(edge_u, edge_v, open_mask, n_nodes):
    parent = np.empty(n_nodes, np.int64)
    size = np.empty(n_nodes, np.int64)
    for i in range(n_nodes):
        parent[i] = i
        size[i] = 1
    for e in range(len(edge_u)):
        if open_mask[e]:
            _union(parent, size, edge_u[e], edge_v[e])
    roots = np.empty(n_nodes, np.int64)
    for i in range(n_nodes):
        roots[i] = _find(parent, i)
    return roots


def _scaled_weights(graph: NetworkGraph, rng: np.random.Generator, count: int) -> np.ndarray:
    u = rng.random((count, graph.n_edges))
    if not graph.resolved:
        return u
    with np.errstate(divide="ignore"):
        return np.where(graph.open_prob > 0.0, u / graph.open_prob, np.inf)


def _onsets(
    graph: NetworkGraph,
    sources: np.ndarray,
    targets: np.ndarray,
    trials: int,
    seed: int,
    threads: int = 1,
) -> np.ndarray:
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    out = np.empty(trials)
    edge_u = graph.edge_u.astype(np.int64)
    edge_v = graph.edge_v.astype(np.int64)
    src = sources.astype(np.int64)
    tgt = targets.astype(np.int64)

    def run(job):
        b, start, stop = job
        rng = derived_stream(seed, b)
        weights = _scaled_weights(graph, rng, stop - start)
        order = np.argsort(weights, axis=1)
        chunk = np.empty(stop - start)
        _onset_batch_kernel(edge_u, edge_v, order, weights, graph.n_nodes, src, tgt, chunk)
        out[start:stop] = chunk

    jobs = list(batch_ranges(trials, ONSET_BATCH))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, jobs))
    else:
        for job in jobs:
            run(job)
    return out


def spanning_onsets(graph: NetworkGraph, trials: int, seed: int, threads: int = 1) -> np.ndarray:
    """Left-to-right spanning onsets; see module docstring for the scale."""
    return _onsets(graph, graph.left, graph.right, trials, seed, threads)


@dataclass(frozen=True)
class ClusterStats:
    """Open-bond cluster decomposition of one sampled configuration."""

    sizes: np.ndarray
    largest_fraction: float
    spanning: bool

    def __post_init__(self):
        if not (0.0 < self.largest_fraction <= 1.0):
            raise ValidationError("largest-cluster fraction must be in (0, 1]")


def sample_clusters(graph: NetworkGraph, seed: int) -> ClusterStats:
    """Open every edge independently with its resolved probability and
    decompose the result into clusters."""
    if not graph.resolved:
        raise ValidationError("graph has unresolved edge probabilities")
    rng = derived_stream(seed, 0)
    open_mask = rng.random(graph.n_edges) < graph.open_prob
    roots = _cluster_roots_kernel(
        graph.edge_u.astype(np.int64), graph.edge_v.astype(np.int64), open_mask, graph.n_nodes
    )
    _, labels, counts = np.unique(roots, return_inverse=True, return_counts=True)
    spanning = bool(np.intersect1d(labels[graph.left], labels[graph.right]).size > 0)
    return ClusterStats(
        sizes=np.sort(counts)[::-1],
        largest_fraction=float(counts.max() / graph.n_nodes),
        spanning=spanning,
    )


class CrossingEstimate(NamedTuple):
    frequency: float
    std_error: float
    trials: int


def _binomial_se(freq: float, trials: int) -> float:
    return math.sqrt(freq * (1.0 - freq) / trials)


def crossing_probability(
    builder: Callable[[int], NetworkGraph],
    size: int,
    p_edge: float,
    trials: int,
    seed: int,
    threads: int = 1,
) -> CrossingEstimate:
    """Fraction of samples whose open bonds connect the left boundary to the
    right one when every edge is open with raw probability `p_edge`."""
    if not (0.0 <= p_edge <= 1.0):
        raise ValidationError(f"edge probability {p_edge} not in [0, 1]")
    graph = builder(size)
    if graph.resolved:
        raise ValidationError("crossing sweep expects an unresolved graph")
    onsets = spanning_onsets(graph, trials, seed, threads)
    freq = float(np.mean(onsets <= p_edge))
    return CrossingEstimate(freq, _binomial_se(freq, trials), trials)


def spanning_probability(
    graph: NetworkGraph, trials: int, seed: int, threads: int = 1
) -> CrossingEstimate:
    """Left-right crossing frequency of a resolved graph at its own
    per-edge probabilities."""
    if not graph.resolved:
        raise ValidationError("graph has unresolved edge probabilities")
    onsets = spanning_onsets(graph, trials, seed, threads)
    freq = float(np.mean(onsets <= 1.0))
    return CrossingEstimate(freq, _binomial_se(freq, trials), trials)


def connection_probability(
    graph: NetworkGraph, a: int, b: int, trials: int, seed: int, threads: int = 1
) -> CrossingEstimate:
    """Fraction of samples in which nodes a and b land in one cluster."""
    if not graph.resolved:
        raise ValidationError("graph has unresolved edge probabilities")
    if a == b:
        raise ValidationError("connection probability needs two distinct nodes")
    for node in (a, b):
        if not (0 <= node < graph.n_nodes):
            raise ValidationError(f"node {node} not in graph")
    onsets = _onsets(
        graph, np.array([a], np.int32), np.array([b], np.int32), trials, seed, threads
    )
    freq = float(np.mean(onsets <= 1.0))
    return CrossingEstimate(freq, _binomial_se(freq, trials), trials)


@dataclass(frozen=True)
class ThresholdEstimate:
    """Estimated critical probability with the sweep data behind it.

    `sweep` rows are (size, p, crossing frequency).  `bisection_value` is the
    half-crossing point of the largest size alone; `estimate` additionally
    uses the intersection of the two largest sizes' crossing curves, which
    cancels the leading finite-size shift.
    """

    estimate: float
    half_width: float
    sizes: tuple[int, ...]
    trials_per_point: int
    sweep: tuple[tuple[int, float, float], ...]
    bisection_value: float
    curve_intersections: tuple[float, ...]

    def __post_init__(self):
        if not (0.0 <= self.estimate <= 1.0):
            raise ValidationError("estimate must be a probability")
        if self.half_width <= 0.0:
            raise ValidationError("half-width must be positive")


def _ecdf(sorted_onsets: np.ndarray, p) -> np.ndarray | float:
    return np.searchsorted(sorted_onsets, p, side="right") / len(sorted_onsets)


def _bisect_half(sorted_onsets: np.ndarray, lo: float, hi: float) -> float:
    f_lo = _ecdf(sorted_onsets, lo)
    f_hi = _ecdf(sorted_onsets, hi)
    if f_lo > 0.5 or f_hi < 0.5:
        raise ValidationError(
            f"initial interval [{lo}, {hi}] does not bracket the half-crossing point "
            f"(frequencies {f_lo:.3f}, {f_hi:.3f})"
        )
    while hi - lo > _BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if _ecdf(sorted_onsets, mid) < 0.5:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _curve_intersection(
    small: np.ndarray, large: np.ndarray, center: float, window: float = 0.08
) -> float | None:
    """Crossing point of two empirical crossing curves near `center`."""
    grid = np.linspace(center - window, center + window, 321)
    diff = np.asarray(_ecdf(small, grid)) - np.asarray(_ecdf(large, grid))
    signs = np.sign(diff)
    flips = np.flatnonzero((signs[:-1] != signs[1:]) & (signs[:-1] != 0))
    if len(flips) == 0:
        return None
    i = flips[np.argmin(np.abs(grid[flips] - center))]
    d0, d1 = diff[i], diff[i + 1]
    if d0 == d1:
        return float(0.5 * (grid[i] + grid[i + 1]))
    return float(grid[i] + (grid[i + 1] - grid[i]) * d0 / (d0 - d1))


def _median_ci_halfwidth(sorted_onsets: np.ndarray) -> float:
    """95% order-statistic confidence half-width of the sample median."""
    n = len(sorted_onsets)
    shift = 1.96 * 0.5 * math.sqrt(n)
    k_lo = max(0, int(n / 2 - shift))
    k_hi = min(n - 1, int(n / 2 + shift) + 1)
    return 0.5 * float(sorted_onsets[k_hi] - sorted_onsets[k_lo])


def estimate_threshold(
    builder: Callable[[int], NetworkGraph],
    sizes: Sequence[int],
    trials: int,
    seed: int,
    bracket: tuple[float, float] = (0.02, 0.98),
    threads: int = 1,
) -> ThresholdEstimate:
    """Estimate the critical bond probability of a lattice family.

    Bisection locates the half-crossing point of the largest size; the
    intersection of the two largest sizes' crossing curves, when present,
    refines it.  The half-width combines the median's binomial confidence
    interval with the observed size-dependence.
    """
    if len(sizes) == 0:
        raise ValidationError("need at least one lattice size")
    if trials < 100:
        raise ValidationError("threshold estimation needs at least 100 trials per size")
    sizes = tuple(sorted(int(s) for s in sizes))
    curves: dict[int, np.ndarray] = {}
    for i, size in enumerate(sizes):
        graph = builder(size)
        if graph.resolved:
            raise ValidationError("threshold sweep expects an unresolved graph")
        curves[size] = np.sort(spanning_onsets(graph, trials, subseed(seed, i), threads))

    largest = curves[sizes[-1]]
    p_half = _bisect_half(largest, *bracket)

    intersections = []
    for small, large in zip(sizes[:-1], sizes[1:]):
        x = _curve_intersection(curves[small], curves[large], p_half)
        if x is not None:
            intersections.append(x)
    estimate = intersections[-1] if intersections else p_half

    half_width = max(
        _median_ci_halfwidth(largest),
        abs(p_half - estimate),
        _BISECTION_TOL,
    )

    grid = np.linspace(estimate - 0.05, estimate + 0.05, 21)
    sweep = tuple(
        (size, float(p), float(_ecdf(curves[size], p))) for size in sizes for p in grid
    )
    return ThresholdEstimate(
        estimate=float(estimate),
        half_width=float(half_width),
        sizes=sizes,
        trials_per_point=trials,
        sweep=sweep,
        bisection_value=float(p_half),
        curve_intersections=tuple(intersections),
    )


FAMILIES = ("honeycomb", "triangular", "square")


def family_builder(family: str, multiplicity: int = 1) -> Callable[[int], NetworkGraph]:
    """Sized builder for a lattice family.

    Size L spans roughly L x L lattice units: the honeycomb takes L brick
    rows and L//2 brick columns, the triangular lattice an L x L offset
    grid, and the square lattice L rows by L+1 columns (the extra column
    makes the left-right crossing self-dual at p = 1/2).
    """
    if family == "honeycomb":
        return lambda size: build_honeycomb(size, max(2, size // 2), multiplicity)
    if multiplicity != 1:
        raise ValidationError(f"doubled bundles are only built for honeycomb, not {family}")
    if family == "triangular":
        return lambda size: build_triangular(size, size)
    if family == "square":
        return lambda size: build_square(size, size + 1)
    raise ValidationError(f"unknown lattice family {family!r}; choose one of {FAMILIES}")


@dataclass(frozen=True)
class WindowRow:
    size: int
    naive_frequency: float
    naive_std_error: float
    transformed_frequency: float
    transformed_std_error: float

    @property
    def gap(self) -> float:
        return self.transformed_frequency - self.naive_frequency


@dataclass(frozen=True)
class WindowComparison:
    """Naive doubled-honeycomb strategy vs topology transformation, crossing
    frequencies side by side over a range of sizes."""

    p: float
    naive_edge_prob: float
    transformed_edge_prob: float
    rows: tuple[WindowRow, ...]


def compare_window(
    p: float, sizes: Sequence[int], trials: int, seed: int, threads: int = 1
) -> WindowComparison:
    """Crossing frequencies of the two strategies on the same doubled-edge
    honeycomb resource at link parameter p."""
    rows = []
    for i, size in enumerate(sorted(int(s) for s in sizes)):
        hex_graph = family_builder("honeycomb", multiplicity=2)(size)
        naive = hex_graph.with_naive_strategy(p)
        transformed = transform_to_triangular(hex_graph, p)
        est_naive = spanning_probability(naive, trials, subseed(seed, 0, i), threads)
        est_trans = spanning_probability(transformed, trials, subseed(seed, 1, i), threads)
        rows.append(
            WindowRow(
                size,
                est_naive.frequency,
                est_naive.std_error,
                est_trans.frequency,
                est_trans.std_error,
            )
        )
    return WindowComparison(
        p=p,
        naive_edge_prob=naive_edge_probability(p, 2),
        transformed_edge_prob=naive_edge_probability(p, 1),
        rows=tuple(rows),
    )
