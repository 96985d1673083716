"""The 1-D relay chain: closed-form success probability, bounds, simulator.

A chain of n biased links is converted into one end-to-end secret bit by
having every intermediate node announce the XOR of its two link bits and the
end parties then run the optimal probabilistic conversion on the remaining
biased bit.  The success probability has a closed form in the first half of
the binomial expansion; the straightforward per-link strategy gives (2p)^n
and the whole thing is bounded above by (2 sqrt(p(1-p)))^n.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError
from .rng import batch_ranges, derived_stream

# Trials per derived stream; fixed so results don't depend on worker count.
TRIAL_BATCH = 1 << 14

# math.comb overflows float range around n=1029; switch to log-space well below.
_EXACT_COMB_MAX_N = 60


@dataclass(frozen=True)
class ChainSpec:
    """A chain of n links, each an independent biased secret bit with
    parameter p <= 1/2."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"chain needs at least one link, got n={self.n}")
        if not (0.0 <= self.p <= 0.5):
            raise ValidationError(f"link parameter {self.p} not in [0, 1/2]")


def exact_success_probability(spec: ChainSpec) -> float:
    """End-to-end success probability of the XOR-relay protocol.

    Equals sum over all link-bit assignments a of min(P(a), P(complement a)),
    evaluated in O(n) as twice the lower half of the binomial expansion of
    (p + (1-p))^n, with the middle term counted once for even n.
    """
    n, p = spec.n, spec.p
    if p == 0.0:
        return 0.0
    if p == 0.5:
        return 1.0
    q = 1.0 - p
    total = 0.0
    half = (n + 1) // 2  # k ranges over the strictly-lower half
    if n <= _EXACT_COMB_MAX_N:
        for k in range(half):
            total += 2.0 * math.comb(n, k) * p ** (n - k) * q**k
        if n % 2 == 0:
            total += math.comb(n, n // 2) * (p * q) ** (n // 2)
    else:
        log_p, log_q = math.log(p), math.log(q)
        lgn = math.lgamma(n + 1)
        for k in range(half):
            log_c = lgn - math.lgamma(k + 1) - math.lgamma(n - k + 1)
            total += 2.0 * math.exp(log_c + (n - k) * log_p + k * log_q)
        if n % 2 == 0:
            k = n // 2
            log_c = lgn - 2.0 * math.lgamma(k + 1)
            total += math.exp(log_c + k * (log_p + log_q))
    return min(1.0, total)


def success_upper_bound(spec: ChainSpec) -> float:
    """(2 sqrt(p(1-p)))^n — exponential decay envelope for p != 1/2."""
    return (2.0 * math.sqrt(spec.p * (1.0 - spec.p))) ** spec.n


def naive_success_probability(spec: ChainSpec) -> float:
    """(2p)^n — convert every link separately, then relay."""
    return (2.0 * spec.p) ** spec.n


class SimulationResult(NamedTuple):
    frequency: float
    std_error: float
    trials: int
    seed: int


def _simulate_batch(spec: ChainSpec, seed: int, batch_index: int, count: int) -> int:
    rng = derived_stream(seed, batch_index)
    n, p = spec.n, spec.p
    bits = rng.random((count, n)) < p
    w = bits.sum(axis=1)
    # Likelihood ratio r = P(complement)/P(observed) = (p/(1-p))^(n-2w);
    # the conditional success probability 2 min(P0,P1)/(P0+P1) = 2 min(1,r)/(1+r)
    # stays well-defined where the raw weights would underflow.
    with np.errstate(over="ignore", divide="ignore"):
        log_odds = (math.log(p) - math.log1p(-p)) if p > 0.0 else -math.inf
        log_ratio = (n - 2.0 * w) * log_odds
        r = np.exp(log_ratio)
        success_prob = np.where(np.isinf(r), 0.0, 2.0 * np.minimum(1.0, r) / (1.0 + r))
    return int(np.count_nonzero(rng.random(count) < success_prob))


def simulate(spec: ChainSpec, trials: int, seed: int, threads: int = 1) -> SimulationResult:
    """Sample the relay protocol: draw the link bits, announce the XORs, and
    succeed with the conditional conversion probability of the announced
    transcript.  Deterministic for a fixed (seed, trials)."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    jobs = list(batch_ranges(trials, TRIAL_BATCH))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(lambda j: _simulate_batch(spec, seed, j[0], j[2] - j[1]), jobs))
        successes = sum(counts)
    else:
        successes = sum(_simulate_batch(spec, seed, b, stop - start) for b, start, stop in jobs)
    freq = successes / trials
    return SimulationResult(freq, math.sqrt(freq * (1.0 - freq) / trials), trials, seed)
