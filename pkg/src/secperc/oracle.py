"""Exact verification of the shipped protocols in rational arithmetic.

Everything here enumerates complete protocol executions on small instances:
all link-bit assignments, the public transcript each produces, and the exact
branch weights of the final probabilistic conversion (realized as explicit
keep/abort branches).  Weights are `fractions.Fraction`, so secrecy and
success probabilities are checked with equality, not tolerances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ValidationError

MAX_CHAIN_LINKS = 16
MAX_ALPHABET = 4

ABORT = "abort"


@dataclass(frozen=True)
class JointEntry:
    """One atomic execution branch: the hidden link bits, the public
    transcript, the outcome (final shared bits, or abort), and its weight."""

    assignment: tuple[int, ...]
    transcript: tuple[int, ...]
    outcome: tuple[int, ...] | str
    weight: Fraction


@dataclass(frozen=True)
class JointDistribution:
    entries: tuple[JointEntry, ...]

    def __post_init__(self):
        total = sum((e.weight for e in self.entries), Fraction(0))
        if total != 1:
            raise ValidationError(f"joint weights sum to {total}, not 1")

    def success_probability(self) -> Fraction:
        return sum((e.weight for e in self.entries if e.outcome != ABORT), Fraction(0))


def _keep_weights(p0: Fraction, p1: Fraction) -> tuple[Fraction, Fraction]:
    """Per-branch keep probabilities of the optimal filter that leaves the
    two consistent assignments equally likely: keep the lighter branch
    always, the heavier with probability min/heavier."""
    m = min(p0, p1)
    k0 = Fraction(1) if p0 == 0 else m / p0
    k1 = Fraction(1) if p1 == 0 else m / p1
    return k0, k1


def enumerate_chain(n: int, p: Fraction) -> tuple[JointDistribution, Fraction]:
    """All executions of the n-link XOR-relay protocol, plus the exact
    end-to-end success probability sum_a min(P(a), P(complement))."""
    if n < 1:
        raise ValidationError("chain needs at least one link")
    if n > MAX_CHAIN_LINKS:
        raise ValidationError(f"refusing to enumerate {2**n} assignments (n > {MAX_CHAIN_LINKS})")
    p = Fraction(p)
    if not (0 <= p <= Fraction(1, 2)):
        raise ValidationError(f"link parameter {p} not in [0, 1/2]")

    def weight_of(bits: tuple[int, ...]) -> Fraction:
        w = sum(bits)
        return p**w * (1 - p) ** (n - w)

    entries: list[JointEntry] = []
    p_n = Fraction(0)
    for a in itertools.product((0, 1), repeat=n):
        pa = weight_of(a)
        if pa == 0:
            continue
        comp = tuple(1 - x for x in a)
        z = tuple(a[i] ^ a[i + 1] for i in range(n - 1))
        p_pair = (pa, weight_of(comp)) if a[0] == 0 else (weight_of(comp), pa)
        keep = _keep_weights(*p_pair)[a[0]]
        if keep > 0:
            entries.append(JointEntry(a, z, (a[0],), pa * keep))
        if keep < 1:
            entries.append(JointEntry(a, z, ABORT, pa * (1 - keep)))
        p_n += min(pa, weight_of(comp))
    return JointDistribution(tuple(entries)), p_n


def enumerate_parallel_merge(p: Fraction) -> JointDistribution:
    """OR-merge of two parallel links followed by conversion to a secret bit.

    Both parties hold both link bits, so the merge needs no announcement;
    the transcript is empty and only the filter branches remain.
    """
    p = Fraction(p)
    if not (0 <= p <= Fraction(1, 2)):
        raise ValidationError(f"link parameter {p} not in [0, 1/2]")
    entries: list[JointEntry] = []
    p_merged = (Fraction(1) - (1 - p) ** 2, (1 - p) ** 2)  # P(a_f=1), P(a_f=0)
    keep1, keep0 = _keep_weights(p_merged[0], p_merged[1])
    for a in itertools.product((0, 1), repeat=2):
        pa = p ** sum(a) * (1 - p) ** (2 - sum(a))
        if pa == 0:
            continue
        merged = a[0] | a[1]
        keep = keep1 if merged == 1 else keep0
        if keep > 0:
            entries.append(JointEntry(a, (), (merged,), pa * keep))
        if keep < 1:
            entries.append(JointEntry(a, (), ABORT, pa * (1 - keep)))
    return JointDistribution(tuple(entries))


def enumerate_transform_step(p: Fraction) -> JointDistribution:
    """Local step of the topology transformation at one removed node.

    The node holds two links towards each of three neighbors X, Y, Z.  It
    pairs the six link bits into three relay chains (X-Y, Y-Z, Z-X),
    announces the three XORs, and each neighbor pair converts its biased bit.
    Outcomes are the triples of distilled bits with abort marked per chain.
    """
    p = Fraction(p)
    if not (0 <= p <= Fraction(1, 2)):
        raise ValidationError(f"link parameter {p} not in [0, 1/2]")
    entries: list[JointEntry] = []
    # bits: (x1, x2, y1, y2, z1, z2); chains pair (x1,y1), (y2,z1), (z2,x2)
    for bits in itertools.product((0, 1), repeat=6):
        w = sum(bits)
        pb = p**w * (1 - p) ** (6 - w)
        if pb == 0:
            continue
        x1, x2, y1, y2, z1, z2 = bits
        chains = ((x1, y1), (y2, z1), (z2, x2))
        transcript = tuple(u ^ v for u, v in chains)
        # Each chain's kept bit is the first link's bit; conditional on the
        # announced XOR the posterior weights are those of a two-link chain.
        branch_opts: list[list[tuple[int | str, Fraction]]] = []
        for (u, v) in chains:
            pair0 = (1 - p) ** 2 if (u ^ v) == 0 else (1 - p) * p
            pair1 = p**2 if (u ^ v) == 0 else p * (1 - p)
            keep = _keep_weights(pair0, pair1)[u]
            opts: list[tuple[int | str, Fraction]] = []
            if keep > 0:
                opts.append((u, keep))
            if keep < 1:
                opts.append((ABORT, 1 - keep))
            branch_opts.append(opts)
        for combo in itertools.product(*branch_opts):
            weight = pb
            outcome: list[int] = []
            aborted = False
            for res, kw in combo:
                weight *= kw
                if res == ABORT:
                    aborted = True
                else:
                    outcome.append(res)  # type: ignore[arg-type]
            entries.append(
                JointEntry(bits, transcript, ABORT if aborted else tuple(outcome), weight)
            )
    return JointDistribution(tuple(entries))


def verify_secrecy(joint: JointDistribution) -> tuple[bool, Fraction]:
    """Check that, conditioned on any transcript and on success, the final
    shared bits are exactly uniform.  Returns (ok, worst bias)."""
    by_transcript: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]] = {}
    for e in joint.entries:
        if e.outcome == ABORT:
            continue
        assert isinstance(e.outcome, tuple)
        bucket = by_transcript.setdefault(e.transcript, {})
        bucket[e.outcome] = bucket.get(e.outcome, Fraction(0)) + e.weight
    max_bias = Fraction(0)
    for bucket in by_transcript.values():
        total = sum(bucket.values(), Fraction(0))
        if total == 0:
            continue
        k = len(next(iter(bucket)))
        uniform = Fraction(1, 2**k)
        for outcome in itertools.product((0, 1), repeat=k):
            share = bucket.get(outcome, Fraction(0)) / total
            max_bias = max(max_bias, abs(share - uniform))
    return max_bias == 0, max_bias


def conversion_probability_exact(source: Sequence[Fraction], target: Sequence[Fraction]) -> Fraction:
    """Rational twin of secret_state.conversion_probability."""
    n = max(len(source), len(target))
    ps = sorted((Fraction(x) for x in source), reverse=True) + [Fraction(0)] * (n - len(source))
    qs = sorted((Fraction(x) for x in target), reverse=True) + [Fraction(0)] * (n - len(target))
    best: Fraction | None = None
    tail_p, tail_q = Fraction(1), Fraction(1)
    for k in range(n - 1):
        tail_p -= ps[k]
        tail_q -= qs[k]
        if tail_q > 0:
            ratio = tail_p / tail_q
            if best is None or ratio < best:
                best = ratio
    if best is None:
        return Fraction(1)
    return max(Fraction(0), min(Fraction(1), best))


def exhaustive_strategy_search(probs: Sequence[Fraction]) -> tuple[Fraction, tuple[int, ...]]:
    """Best secret-bit probability over every deterministic merge of symbols.

    Iterates all labelings of the alphabet onto itself, coarse-grains, and
    applies the exact probabilistic conversion to the uniform bit.  Returns
    the maximum and one labeling achieving it.
    """
    m = len(probs)
    if m > MAX_ALPHABET:
        raise ValidationError(f"alphabet {m} too large for exhaustive search (max {MAX_ALPHABET})")
    vec = [Fraction(x) for x in probs]
    if any(x < 0 for x in vec) or sum(vec) != 1:
        raise ValidationError("probabilities must be nonnegative rationals summing to 1")
    sbit = (Fraction(1, 2), Fraction(1, 2))
    best = Fraction(0)
    best_labeling = tuple(range(m))
    for labeling in itertools.product(range(m), repeat=m):
        merged = [Fraction(0)] * (max(labeling) + 1)
        for i, l in enumerate(labeling):
            merged[l] += vec[i]
        value = conversion_probability_exact(merged, sbit)
        if value > best:
            best = value
            best_labeling = labeling
    return best, best_labeling


@dataclass(frozen=True)
class AnnouncementRule:
    """One candidate announcement function f(a1, a2) for the two-link relay."""

    table: tuple[int, int, int, int]  # f(0,0), f(0,1), f(1,0), f(1,1)
    decodable: bool  # f(0, a2) != f(1, a2) for both a2
    balanced: bool  # equal number of a2 values announcing 1 for a1=0 and a1=1
    leaks: bool  # some positive-weight announcement pins down a1
    success_probability: Fraction | None  # for admissible rules


@dataclass(frozen=True)
class UniquenessReport:
    p: Fraction
    rules: tuple[AnnouncementRule, ...]
    survivors: tuple[tuple[int, int, int, int], ...]
    degenerate: bool

    XOR = (0, 1, 1, 0)
    XNOR = (1, 0, 0, 1)


def xor_uniqueness_check(p: Fraction) -> UniquenessReport:
    """Test all 16 deterministic announcement rules for the two-link relay.

    A rule survives iff the far node can decode (a) and no announcement with
    positive probability reveals the relayed bit to the eavesdropper (b).
    For p in (0, 1/2] exactly the XOR and its complement survive; at p = 0
    condition (b) holds vacuously for every rule and the report is flagged
    degenerate.
    """
    p = Fraction(p)
    if not (0 <= p <= Fraction(1, 2)):
        raise ValidationError(f"link parameter {p} not in [0, 1/2]")
    pa2 = (1 - p, p)  # distribution of the second link bit
    degenerate = p == 0
    rules: list[AnnouncementRule] = []
    survivors: list[tuple[int, int, int, int]] = []
    for table in itertools.product((0, 1), repeat=4):
        f = lambda a1, a2: table[2 * a1 + a2]
        decodable = all(f(0, a2) != f(1, a2) for a2 in (0, 1))
        balanced = f(0, 0) + f(0, 1) == f(1, 0) + f(1, 1)
        # weight of announcement z given a1
        w = {
            (a1, z): sum(pa2[a2] for a2 in (0, 1) if f(a1, a2) == z)
            for a1 in (0, 1)
            for z in (0, 1)
        }
        leaks = any(
            (w[(0, z)] == 0) != (w[(1, z)] == 0) for z in (0, 1) if w[(0, z)] + w[(1, z)] > 0
        )
        admissible = decodable and not leaks
        success: Fraction | None = None
        if admissible:
            success = Fraction(0)
            for z in (0, 1):
                p0 = (1 - p) * w[(0, z)]
                p1 = p * w[(1, z)]
                success += 2 * min(p0, p1)
        rules.append(AnnouncementRule(table, decodable, balanced, leaks, success))
        if admissible:
            survivors.append(table)
    return UniquenessReport(p, tuple(rules), tuple(survivors), degenerate)
