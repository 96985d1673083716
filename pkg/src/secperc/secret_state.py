"""Pure classical secret correlations and their local/public transformations.

A shared-symbol distribution between two parties (with the adversary
uncorrelated) is fully described by its probability vector.  This module
implements the majorization order on such vectors, deterministic and
probabilistic conversion between them, merging of parallel links, and the
one-time-pad composition of two biased links.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .errors import ValidationError

PROB_TOL = 1e-12

# p*(2-p) reaches 1/2 here; above it two merged parallel links convert surely.
PARALLEL_SATURATION = 1.0 - 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class SecretState:
    """Probability vector of a shared symbol, adversary uncorrelated.

    Entries must be nonnegative and sum to 1 within ``PROB_TOL``.
    """

    probs: tuple[float, ...]

    def __init__(self, probs: Sequence[float]):
        object.__setattr__(self, "probs", tuple(float(x) for x in probs))
        self._validate()

    def _validate(self) -> None:
        if len(self.probs) < 1:
            raise ValidationError("probability vector must have length >= 1")
        for x in self.probs:
            if not math.isfinite(x) or x < 0.0:
                raise ValidationError(f"probability entry {x} is not in [0, 1]")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROB_TOL:
            raise ValidationError(f"probabilities sum to {total}, not 1")

    def __len__(self) -> int:
        return len(self.probs)

    def sorted_desc(self) -> tuple[float, ...]:
        return tuple(sorted(self.probs, reverse=True))


SBIT = SecretState((0.5, 0.5))


@dataclass(frozen=True)
class BiasedLink:
    """A perfectly correlated shared bit, equal to 1 with probability p <= 1/2.

    Constructing with p > 1/2 relabels the bit values so the stored p is
    always in canonical range.
    """

    p: float

    def __init__(self, p: float):
        p = float(p)
        if not math.isfinite(p) or p < 0.0 or p > 1.0:
            raise ValidationError(f"link parameter {p} is not in [0, 1]")
        if p > 0.5:
            p = 1.0 - p
        object.__setattr__(self, "p", p)

    @property
    def state(self) -> SecretState:
        return SecretState((1.0 - self.p, self.p))


@dataclass(frozen=True)
class PosteriorBranch:
    """One public-announcement branch: the announced bit, its probability,
    and the parties' conditional shared-symbol distribution."""

    announcement: int
    weight: float
    posterior: SecretState

    def __post_init__(self):
        if self.announcement not in (0, 1):
            raise ValidationError("announcement must be a bit")
        if not (-PROB_TOL <= self.weight <= 1.0 + PROB_TOL):
            raise ValidationError(f"branch weight {self.weight} not in [0, 1]")


def _padded_desc(a: SecretState, b: SecretState) -> tuple[tuple[float, ...], tuple[float, ...]]:
    n = max(len(a), len(b))
    pa = a.sorted_desc() + (0.0,) * (n - len(a))
    pb = b.sorted_desc() + (0.0,) * (n - len(b))
    return pa, pb


def majorizes(q: SecretState, p: SecretState) -> bool:
    """True iff every descending prefix sum of q is >= the one of p.

    Vectors of different lengths are zero-padded.  Governs which
    deterministic conversions are possible: p can be turned into q with
    certainty iff q majorizes p.
    """
    qs, ps = _padded_desc(q, p)
    acc_q = 0.0
    acc_p = 0.0
    for x, y in zip(qs, ps):
        acc_q += x
        acc_p += y
        if acc_q < acc_p - PROB_TOL:
            return False
    return True


def conversion_probability(source: SecretState, target: SecretState) -> float:
    """Maximal probability of converting `source` into `target`.

    Computed as min over k of (1 - sum of the k largest source entries) /
    (1 - sum of the k largest target entries); prefixes whose denominator
    vanishes impose no finite constraint and are skipped.  Returns exactly
    1.0 whenever the conversion is deterministic (target majorizes source).
    """
    if majorizes(target, source):
        return 1.0
    ps, qs = _padded_desc(source, target)
    best = math.inf
    tail_p = 1.0
    tail_q = 1.0
    for k in range(len(ps) - 1):
        tail_p -= ps[k]
        tail_q -= qs[k]
        if tail_q > PROB_TOL:
            best = min(best, tail_p / tail_q)
    if not math.isfinite(best):
        # target tail vanishes everywhere => target is a point mass, which
        # is majorized by everything; handled by the branch above.
        return 1.0
    return min(1.0, max(0.0, best))


def sbit_probability(source: SecretState) -> float:
    """Maximal probability of converting `source` into an unbiased secret bit.

    For a biased link with parameter p this is 2p.
    """
    if len(source) < 2:
        raise ValidationError("cannot target a secret bit from a single-symbol state")
    return conversion_probability(source, SBIT)


def product(a: SecretState, b: SecretState) -> SecretState:
    """Joint state of two independent links over the pair alphabet."""
    return SecretState(tuple(x * y for x in a.probs for y in b.probs))


def coarse_grain(s: SecretState, labeling: Mapping[int, int] | Sequence[int]) -> SecretState:
    """Merge symbols according to `labeling` (old index -> new index).

    The labeling must assign every symbol of `s`; merged probabilities add.
    """
    if isinstance(labeling, Mapping):
        labels = [labeling.get(i) for i in range(len(s))]
    else:
        labels = list(labeling) + [None] * (len(s) - len(labeling))
    if any(l is None for l in labels):
        raise ValidationError("labeling does not cover the whole alphabet")
    labels = [int(l) for l in labels]  # type: ignore[arg-type]
    if any(l < 0 for l in labels):
        raise ValidationError("labels must be nonnegative")
    out = [0.0] * (max(labels) + 1)
    for i, l in enumerate(labels):
        out[l] += s.probs[i]
    return SecretState(out)


class ParallelSuccess(NamedTuple):
    probability: float
    saturated: bool  # True when p exceeds the range of the 2p(2-p) optimum


def parallel_link_success(p: float) -> ParallelSuccess:
    """Success probability of distilling one secret bit from two parallel
    biased links with the same parameter: min(1, 2p(2-p)).

    The OR-merge value 2p(2-p) is the optimum only for p up to
    ``PARALLEL_SATURATION``; `saturated` flags parameters beyond that point,
    where the returned value is simply 1.
    """
    if not (0.0 <= p <= 0.5):
        raise ValidationError(f"link parameter {p} not in [0, 1/2]")
    return ParallelSuccess(min(1.0, 2.0 * p * (2.0 - p)), p > PARALLEL_SATURATION)


def otp_compose(a: BiasedLink, b: BiasedLink) -> tuple[PosteriorBranch, PosteriorBranch]:
    """One-time-pad relay across two links sharing a middle node.

    The middle node announces the XOR z of its two bits.  Returns the two
    announcement branches with the end parties' posterior bit distribution;
    averaging `sbit_probability` over the branches gives the two-link chain
    success probability 2*min(p, q).
    """
    p, q = a.p, b.p
    w1 = p * (1.0 - q) + q * (1.0 - p)
    w0 = p * q + (1.0 - p) * (1.0 - q)

    def branch(announcement: int, weight: float, one_mass: float) -> PosteriorBranch:
        if weight <= PROB_TOL:
            return PosteriorBranch(announcement, 0.0, SecretState((1.0, 0.0)))
        theta = one_mass / weight
        return PosteriorBranch(announcement, weight, SecretState((1.0 - theta, theta)))

    return (
        branch(0, w0, p * q),
        branch(1, w1, p * (1.0 - q)),
    )
