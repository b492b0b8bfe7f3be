"""Sunflower detection, robust-sunflower thresholds and constructive extraction.

A sunflower is a family whose pairwise intersections all equal a common
kernel; the robust variant asks instead that a p-biased set W joined with
the kernel covers some member with probability > 1 - eps.

``extract_robust_sunflower`` implements the spreadness recursion: a family
that is not r-spread has a popular set T whose link is a smaller uniform
family; extract there and lift by T.  A family that is r-spread (for
r = B*ln(l/eps)/p) is returned whole.  B is a tunable constant, so every
result is post-verified and carries a ``verified`` flag; a False flag with
a too-small B is a legitimate experimental outcome, not an error.

All logarithms are natural; a change of base is absorbed into B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import BaseCaseFailedError, ExactIntractableError, ThresholdNotMetError
from .probability import (
    DEFAULT_WORK_CAP_BITS,
    RobustnessCheck,
    is_robust_sunflower,
)
from .setfamily import SetFamily, check_spread, core, link, uniform_size


@dataclass(frozen=True)
class Sunflower:
    petals: SetFamily
    kernel: int

    def is_valid(self) -> bool:
        """Every pair of distinct petals intersects exactly in the kernel."""
        ms = self.petals.members
        for i in range(len(ms)):
            for j in range(i + 1, len(ms)):
                if ms[i] & ms[j] != self.kernel:
                    return False
        if len(ms) >= 2 and core(self.petals) != self.kernel:
            return False
        return True


@dataclass(frozen=True)
class ThresholdParams:
    """Tunable constant of the improved robust-sunflower threshold.

    The bound only guarantees that some B > 0 works; 64 is a generous
    default for experiments and is deliberately configurable.
    """

    B: float = 64.0

    def __post_init__(self):
        if self.B <= 0:
            raise ValueError("B must be positive")


def erdos_rado_threshold(size: int, petals: int) -> int:
    """l!(r-1)^l: families above this size contain an r-petal sunflower."""
    if size < 1 or petals < 2:
        raise ValueError("need size >= 1 and petals >= 2")
    return math.factorial(size) * (petals - 1) ** size


def robust_sunflower_threshold(size: int, p: float, eps: float) -> float:
    """l!(2 ln(1/eps)/p)^l: guarantees a (p,eps)-robust sunflower inside."""
    if not 0 < p <= 1 or not 0 < eps < 1:
        raise ValueError("need p in (0,1] and eps in (0,1)")
    return math.factorial(size) * (2.0 * math.log(1.0 / eps) / p) ** size


def improved_robust_threshold(
    size: int, p: float, eps: float, params: ThresholdParams = ThresholdParams()
) -> float:
    """(B ln(l/eps)/p)^l, valid for p, eps in (0, 1/2]."""
    if not 0 < p <= 0.5 or not 0 < eps <= 0.5:
        raise ValueError("need p and eps in (0, 1/2]")
    return (params.B * math.log(size / eps) / p) ** size


def spread_radius(size: int, p: float, eps: float, params: ThresholdParams) -> float:
    """r = B ln(l/eps)/p used by the extraction recursion."""
    return params.B * math.log(size / eps) / p


def uniform_sunflower_robustness(petals: int, p: float, size: int) -> float:
    """eps = exp(-r p^l): an l-uniform sunflower of r petals is (p, eps)-robust."""
    return math.exp(-petals * p**size)


def check_uniform_sunflower_robustness(
    sunflower: Sunflower, p, work_cap_bits: int = DEFAULT_WORK_CAP_BITS
) -> dict:
    """Exact coverage of a sunflower vs the two closed-form lower bounds.

    With r petals of size l and disjoint petal remainders, coverage equals
    1-(1-p^(l-|kernel|))^r >= 1-(1-p^l)^r >= 1-exp(-r p^l).
    """
    from .probability import coverage_exact

    r = len(sunflower.petals)
    size = uniform_size(sunflower.petals)
    cover = coverage_exact(sunflower.petals, sunflower.kernel, p, work_cap_bits)
    pf = Fraction(p)
    closed_form = 1 - (1 - pf ** (size - sunflower.kernel.bit_count())) ** r
    weaker = 1 - (1 - pf**size) ** r
    return {
        "coverage": cover,
        "closed_form": closed_form,
        "weak_bound": weaker,
        "exp_bound": 1.0 - uniform_sunflower_robustness(r, float(p), size),
    }


def _greedy_disjoint(family: SetFamily, petals: int) -> list[int]:
    taken: list[int] = []
    acc = 0
    for m in family.members:
        if m & acc == 0:
            taken.append(m)
            acc |= m
            if len(taken) == petals:
                break
    return taken


def find_sunflower(family: SetFamily, petals: int) -> Sunflower:
    """Find a sunflower with >= ``petals`` petals in a uniform family.

    Textbook induction: greedily collect pairwise-disjoint members; with
    fewer than r of them, every member meets their union, so some element
    lies in at least |F|/(l(r-1)) members; recurse on its link and lift.
    Succeeds whenever |F| > l!(r-1)^l; below the threshold it still tries
    and raises ThresholdNotMet only if the search fails.
    """
    if petals < 1:
        raise ValueError("petals must be >= 1")
    size = uniform_size(family) if family.members else 0

    def search(fam: SetFamily) -> Optional[Sunflower]:
        if not fam.members:
            return None
        taken = _greedy_disjoint(fam, petals)
        if len(taken) >= petals:
            return Sunflower(SetFamily.from_masks(fam.n, taken), 0)
        if all(m == 0 for m in fam.members):
            return None  # only the empty set remains; cannot reach r petals
        counts: dict[int, int] = {}
        for m in fam.members:
            mm = m
            while mm:
                low = mm & -mm
                counts[low] = counts.get(low, 0) + 1
                mm ^= low
        best = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))[0]
        sub = search(link(fam, best))
        if sub is None:
            return None
        lifted = [m | best for m in sub.petals.members]
        return Sunflower(SetFamily.from_masks(fam.n, lifted), sub.kernel | best)

    found = search(family)
    if found is not None and len(found.petals) >= petals:
        return found
    if size >= 1 and len(family) > erdos_rado_threshold(size, max(petals, 2)):
        raise AssertionError("family above the guarantee threshold but search failed")
    raise ThresholdNotMetError(
        f"no {petals}-petal sunflower found; family size {len(family)} is at or "
        f"below the guarantee threshold"
    )


@dataclass(frozen=True)
class TraceStep:
    depth: int
    uniform_size: int
    family_size: int
    r: float
    case: str
    chosen: Optional[int]

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "l": self.uniform_size,
            "family": self.family_size,
            "r": self.r,
            "case": self.case,
            "T": self.chosen,
        }


@dataclass(frozen=True)
class RobustSunflowerResult:
    subfamily: SetFamily
    kernel: int
    verified: bool
    probability: object  # ExactProbability or Estimate
    recursion_trace: tuple[TraceStep, ...] = field(default_factory=tuple)
    check: Optional[RobustnessCheck] = None


def extract_robust_sunflower(
    family: SetFamily,
    p,
    eps,
    params: ThresholdParams = ThresholdParams(),
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
    mc_samples: int = 100_000,
    seed: int = 0,
) -> RobustSunflowerResult:
    """Extract a candidate (p, eps)-robust sunflower and verify it.

    Base case (1-uniform): the family itself qualifies once
    (1-p)^|F| < eps; the exact inequality is used instead of the looser
    exp(-p|F|) <= eps, so strictly more extractions succeed.  Otherwise
    compute r = B ln(l/eps)/p: a spreadness violation T recurses into the
    link and lifts by T; an r-spread family is returned whole.
    """
    size = uniform_size(family)
    eps_f = Fraction(eps)
    p_f = Fraction(p)
    trace: list[TraceStep] = []

    def recurse(fam: SetFamily, depth: int) -> SetFamily:
        fam_size = uniform_size(fam) if fam.members else 0
        if fam_size == 0:
            # a member shrank to the empty set: coverage is certain
            trace.append(TraceStep(depth, 0, len(fam), 0.0, "trivial", None))
            return fam
        if fam_size == 1:
            if (1 - p_f) ** len(fam) < eps_f:
                trace.append(TraceStep(depth, 1, len(fam), 0.0, "base", None))
                return fam
            raise BaseCaseFailedError(
                f"(1-p)^{len(fam)} >= eps at the 1-uniform base case"
            )
        r = spread_radius(fam_size, float(p), float(eps), params)
        report = check_spread(fam, Fraction(r))
        if report.is_spread:
            trace.append(TraceStep(depth, fam_size, len(fam), r, "spread", None))
            return fam
        t = report.witness
        trace.append(TraceStep(depth, fam_size, len(fam), r, "link", t))
        sub = recurse(link(fam, t), depth + 1)
        return SetFamily.from_masks(fam.n, (m | t for m in sub.members))

    subfamily = recurse(family, 0)
    kernel = core(subfamily)
    try:
        chk = is_robust_sunflower(subfamily, p, eps, "exact", work_cap_bits)
    except ExactIntractableError:
        chk = is_robust_sunflower(
            subfamily, p, eps, "mc", samples=mc_samples, seed=seed
        )
    return RobustSunflowerResult(
        subfamily=subfamily,
        kernel=kernel,
        verified=chk.decision is True,
        probability=chk.probability,
        recursion_trace=tuple(trace),
        check=chk,
    )
