"""Exact and Monte-Carlo evaluation of p-biased coverage probabilities.

The central quantity: for a family F of subsets of [n], a fixed set Y and a
p-biased random set W,

    coverage(F, Y, p) = Pr[ exists F in F : F subset of W union Y ].

Only the elements E = union(F \\ Y) matter.  The exact engine computes the
probability as a rational number by whichever of two strategies is cheaper:

* inclusion-exclusion over nonempty subfamilies (2^|F'| terms after
  antichain-minimizing the reduced family F'), or
* enumeration of the 2^|E| restrictions of W to E, aggregated into covered
  counts per Hamming weight (vectorized), then combined with exact weights
  p^w (1-p)^(|E|-w).

Both refuse when the effective enumeration exceeds the work cap.  The
Monte-Carlo engine samples W restricted to E (slot layout: sample s uses
counter slots s*|E| + j for the j-th element of E in ascending order) and
reports a Wilson score interval.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Optional

import numpy as np

from .errors import EmptyFamilyError, ExactIntractableError
from .rng import CounterStream
from .setfamily import SetFamily, core, elements_of

DEFAULT_WORK_CAP_BITS = 24
_IE_LIMIT = 20  # max family size for the inclusion-exclusion strategy


@dataclass(frozen=True)
class PBiasedParams:
    p: float
    n: int

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must be in (0, 1)")


@dataclass(frozen=True)
class ExactProbability:
    """An exact rational probability plus its float shadow."""

    value: Fraction

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise ValueError("probability outside [0, 1]")

    @property
    def shadow(self) -> float:
        return float(self.value)

    def __float__(self) -> float:
        return self.shadow


@dataclass(frozen=True)
class Estimate:
    """A Monte-Carlo estimate with a Wilson score half-width."""

    value: float
    half_width: float
    confidence: float
    samples: int
    seed: int

    @property
    def low(self) -> float:
        return max(0.0, self.value - self.half_width)

    @property
    def high(self) -> float:
        return min(1.0, self.value + self.half_width)

    def to_json(self) -> str:
        return json.dumps(
            {
                "value": self.value,
                "half_width": self.half_width,
                "confidence": self.confidence,
                "samples": self.samples,
                "seed": self.seed,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "Estimate":
        d = json.loads(text)
        return cls(d["value"], d["half_width"], d["confidence"], d["samples"], d["seed"])


def wilson_half_width(hits: int, samples: int, confidence: float) -> float:
    """Half-width of the two-sided Wilson score interval.

    Chosen over the normal approximation because coverage events live near
    probability 0 or 1, where the Wald interval degenerates.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    phat = hits / samples
    denom = 1.0 + z * z / samples
    return (z / denom) * math.sqrt(phat * (1 - phat) / samples + z * z / (4.0 * samples * samples))


def sample_p_subset(n: int, p, stream: CounterStream) -> int:
    """One p-biased subset of [n]; consumes exactly n counter slots."""
    bits = stream.bernoulli_block(stream.index, n, p)
    stream.index += n
    mask = 0
    for j in range(n):
        if bits[j]:
            mask |= 1 << j
    return mask


def _minimize_masks(masks) -> list[int]:
    """Keep only inclusion-minimal masks (supersets are redundant for coverage)."""
    distinct = sorted(set(masks), key=lambda m: m.bit_count())
    out: list[int] = []
    for m in distinct:
        if not any(k & m == k for k in out):
            out.append(m)
    return out


def _reduced_family(family: SetFamily, y: int) -> list[int]:
    return _minimize_masks(m & ~y for m in family.members)


def _ie_union_probability(masks: list[int], p: Fraction) -> Fraction:
    """Pr[some mask subset of W] by inclusion-exclusion over subfamilies."""
    powers: dict[int, Fraction] = {0: Fraction(1)}

    def ppow(k: int) -> Fraction:
        if k not in powers:
            powers[k] = ppow(k - 1) * p
        return powers[k]

    total = Fraction(0)
    m = len(masks)
    stack = [(0, 0, 1)]
    while stack:
        start, union, sign = stack.pop()
        for j in range(start, m):
            u = union | masks[j]
            total += sign * ppow(u.bit_count())
            stack.append((j + 1, u, -sign))
    return total


_POPCOUNT16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)


def _covered_weight_counts(masks: list[int], width: int) -> list[int]:
    """Count covered W-restrictions per Hamming weight, enumerating 2^width."""
    total = 1 << width
    counts = np.zeros(width + 1, dtype=np.int64)
    rs = np.array(masks, dtype=np.uint32)
    chunk = 1 << 20
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        arr = np.arange(lo, hi, dtype=np.uint32)
        covered = np.zeros(hi - lo, dtype=bool)
        for r in rs:
            covered |= (arr & r) == r
        sel = arr[covered]
        w = _POPCOUNT16[sel & np.uint32(0xFFFF)] + _POPCOUNT16[sel >> np.uint32(16)]
        counts += np.bincount(w, minlength=width + 1)[: width + 1]
    return counts.tolist()


def coverage_exact(
    family: SetFamily,
    y: int,
    p,
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
) -> ExactProbability:
    """Exact Pr over p-biased W of: some member is contained in W union Y."""
    pf = Fraction(p)
    if not 0 <= pf <= 1:
        raise ValueError("p must be in [0, 1]")
    if not family.members:
        return ExactProbability(Fraction(0))
    reduced = _reduced_family(family, y)
    if reduced[0] == 0:
        return ExactProbability(Fraction(1))  # some member already inside Y
    env = 0
    for m in reduced:
        env |= m
    width = env.bit_count()
    ie_ok = len(reduced) <= _IE_LIMIT
    enum_ok = width <= min(work_cap_bits, 30)
    if not ie_ok and not enum_ok:
        raise ExactIntractableError(min(len(reduced), width), work_cap_bits)
    if ie_ok and (not enum_ok or len(reduced) <= width):
        return ExactProbability(_ie_union_probability(reduced, pf))
    # enumeration path: remap E to contiguous bits
    positions = [e - 1 for e in elements_of(env)]
    remap = {pos: j for j, pos in enumerate(positions)}
    remasks = []
    for m in reduced:
        rm = 0
        for pos in positions:
            if m >> pos & 1:
                rm |= 1 << remap[pos]
        remasks.append(rm)
    counts = _covered_weight_counts(remasks, width)
    q = 1 - pf
    prob = Fraction(0)
    for w, cnt in enumerate(counts):
        if cnt:
            prob += cnt * pf**w * q ** (width - w)
    return ExactProbability(prob)


def _sorted_env_positions(reduced: list[int]) -> list[int]:
    env = 0
    for m in reduced:
        env |= m
    return [e - 1 for e in elements_of(env)]


def coverage_mc(
    family: SetFamily,
    y: int,
    p,
    samples: int,
    confidence: float = 0.99,
    seed: int = 0,
) -> Estimate:
    """Empirical coverage frequency with a Wilson interval at ``confidence``."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    if not family.members:
        return Estimate(0.0, 0.0, confidence, samples, seed)
    reduced = _minimize_masks(m & ~y for m in family.members)
    if reduced[0] == 0:
        return Estimate(1.0, 0.0, confidence, samples, seed)
    positions = _sorted_env_positions(reduced)
    width = len(positions)
    remap = {pos: j for j, pos in enumerate(positions)}
    remapped = [sum(1 << remap[pos] for pos in positions if m >> pos & 1) for m in reduced]
    stream = CounterStream(seed, stream=0)
    hits = 0
    chunk = max(1, (1 << 21) // max(width, 1))
    done = 0
    while done < samples:
        take = min(chunk, samples - done)
        bits = stream.bernoulli_block(done * width, take * width, p).reshape(take, width)
        if width <= 64:
            remasks = np.array(remapped, dtype=np.uint64)
            w = np.zeros(take, dtype=np.uint64)
            for j in range(width):
                w |= bits[:, j].astype(np.uint64) << np.uint64(j)
            covered = np.zeros(take, dtype=bool)
            for r in remasks:
                covered |= (w & r) == r
            hits += int(covered.sum())
        else:
            packed = np.packbits(bits, axis=1, bitorder="little")
            for row in packed:
                w = int.from_bytes(row.tobytes(), "little")
                if any(w & r == r for r in remapped):
                    hits += 1
        done += take
    value = hits / samples
    return Estimate(value, wilson_half_width(hits, samples, confidence), confidence, samples, seed)


@dataclass(frozen=True)
class RobustnessCheck:
    """Decision record for the strict coverage > 1 - eps test.

    ``decision`` is None when a Monte-Carlo estimate lands within one
    half-width of the threshold (indeterminate).
    """

    decision: Optional[bool]
    kernel: int
    threshold: float
    probability: object  # ExactProbability or Estimate
    engine: str

    @property
    def margin(self) -> float:
        return float(self.probability) - self.threshold


def is_robust_sunflower(
    family: SetFamily,
    p,
    eps,
    engine: str = "exact",
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
    samples: int = 100_000,
    confidence: float = 0.99,
    seed: int = 0,
) -> RobustnessCheck:
    """Strict test: coverage over the family's own core exceeds 1 - eps."""
    if not family.members:
        raise EmptyFamilyError("robustness of an empty family is undefined")
    y = core(family)
    if engine == "exact":
        prob = coverage_exact(family, y, p, work_cap_bits)
        decision = prob.value > 1 - Fraction(eps)
        return RobustnessCheck(decision, y, 1 - float(eps), prob, "exact")
    if engine == "mc":
        est = coverage_mc(family, y, p, samples, confidence, seed)
        threshold = 1 - float(eps)
        if abs(est.value - threshold) <= est.half_width:
            decision = None
        else:
            decision = est.value > threshold
        return RobustnessCheck(decision, y, threshold, est, "mc")
    raise ValueError(f"unknown engine {engine!r}")


class PBiasedDistribution:
    """p-biased distribution on subsets of [n], usable exactly or sampled."""

    def __init__(self, n: int, p):
        self.n = n
        self.p = p

    def exact_items(self, work_cap_bits: int = DEFAULT_WORK_CAP_BITS):
        if self.n > work_cap_bits:
            raise ExactIntractableError(self.n, work_cap_bits)
        pf = Fraction(self.p)
        q = 1 - pf
        for mask in range(1 << self.n):
            w = mask.bit_count()
            yield mask, pf**w * q ** (self.n - w)

    def sample(self, stream: CounterStream) -> int:
        return sample_p_subset(self.n, self.p, stream)


def mc_event_probability(
    predicate,
    sampler,
    samples: int,
    confidence: float = 0.99,
    seed: int = 0,
    stream_id: int = 0,
) -> Estimate:
    """Estimate Pr[predicate(sample)] for an arbitrary seeded sampler."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    stream = CounterStream(seed, stream=stream_id)
    hits = 0
    for _ in range(samples):
        if predicate(sampler(stream)):
            hits += 1
    return Estimate(hits / samples, wilson_half_width(hits, samples, confidence), confidence, samples, seed)


def exact_event_probability(predicate, items) -> ExactProbability:
    """Sum the exact weights of support points satisfying the predicate."""
    total = Fraction(0)
    for x, w in items:
        if predicate(x):
            total += w
    return ExactProbability(total)
