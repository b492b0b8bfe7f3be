"""Monotone Boolean functions as minterm antichains, and their approximators.

A monotone function is represented by its set of minterms (minimal accepted
inputs), stored as a canonical antichain of bit masks.  The empty antichain
is the constant 0; the single minterm "empty set" is the constant 1.

The approximator algebra replaces OR by trim(cl(f or g)) and AND by
trim(cl(f and g)), where cl is the closure operator: the minimal monotone
function above f for which near-certain acceptance under noise,
Pr[f(N or x_A) = 1] > 1 - eps for |A| <= c, forces acceptance of x_A
itself.  Gate-by-gate replacement of a circuit yields an approximator plus
an exact ledger of the per-gate approximation errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, NamedTuple, Optional

from .probability import (
    DEFAULT_WORK_CAP_BITS,
    coverage_exact,
    coverage_mc,
)
from .setfamily import SetFamily, canonical_key


def antichain_minimize(masks: Iterable[int]) -> tuple[int, ...]:
    """Keep inclusion-minimal masks, canonically ordered."""
    distinct = sorted(set(masks), key=canonical_key)
    out: list[int] = []
    for m in distinct:
        if not any(k & m == k for k in out):
            out.append(m)
    return tuple(out)


@dataclass(frozen=True)
class MonotoneFunction:
    n: int
    minterms: tuple[int, ...]

    def __post_init__(self):
        if antichain_minimize(self.minterms) != self.minterms:
            raise ValueError("minterms must form a canonical antichain")

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "MonotoneFunction":
        return cls(n, antichain_minimize(masks))

    @classmethod
    def constant0(cls, n: int) -> "MonotoneFunction":
        return cls(n, ())

    @classmethod
    def constant1(cls, n: int) -> "MonotoneFunction":
        return cls(n, (0,))

    @classmethod
    def indicator(cls, n: int, mask: int) -> "MonotoneFunction":
        """The function accepting exactly the supersets of ``mask``."""
        return cls(n, (mask,))

    def __call__(self, x: int) -> int:
        return 1 if any(m & x == m for m in self.minterms) else 0

    def __or__(self, other: "MonotoneFunction") -> "MonotoneFunction":
        if self.n != other.n:
            raise ValueError("universe mismatch")
        return MonotoneFunction.from_masks(self.n, self.minterms + other.minterms)

    def __and__(self, other: "MonotoneFunction") -> "MonotoneFunction":
        if self.n != other.n:
            raise ValueError("universe mismatch")
        return MonotoneFunction.from_masks(
            self.n, (a | b for a in self.minterms for b in other.minterms)
        )

    def le(self, other: "MonotoneFunction") -> bool:
        """Pointwise f <= g, decided on f's minterms."""
        return all(other(m) for m in self.minterms)

    @property
    def is_constant0(self) -> bool:
        return not self.minterms

    @property
    def is_constant1(self) -> bool:
        return self.minterms == (0,)

    def minterm_family(self) -> SetFamily:
        return SetFamily.from_masks(self.n, self.minterms)


def minterms_of_size(f: MonotoneFunction, size: int) -> SetFamily:
    return SetFamily.from_masks(f.n, (m for m in f.minterms if m.bit_count() == size))


def iter_masks_of_weight(n: int, w: int) -> Iterator[int]:
    """Masks of Hamming weight w in increasing numeric order (Gosper)."""
    if w == 0:
        yield 0
        return
    if w > n:
        return
    v = (1 << w) - 1
    top = 1 << n
    while v < top:
        yield v
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r


def iter_masks_up_to(n: int, c: int) -> Iterator[int]:
    """All masks with |A| <= c in canonical order (weight, then value)."""
    for w in range(min(c, n) + 1):
        yield from iter_masks_of_weight(n, w)


@dataclass(frozen=True)
class ClosureParams:
    """Noise test parameters: threshold eps, scan width c, noise bias."""

    eps: float
    c: int
    noise_p: float = 0.5

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError("eps must be in (0, 1)")
        if self.c < 0:
            raise ValueError("c must be >= 0")


class ClosednessReport(NamedTuple):
    closed: bool
    witness: Optional[int]
    probability: Optional[object]


def _acceptance_probability(
    f: MonotoneFunction, a: int, params: ClosureParams, engine: str,
    work_cap_bits: int, samples: int, seed: int,
):
    """Pr[f(N or x_A) = 1] for noise N, as coverage of f's minterms over Y=A."""
    fam = f.minterm_family()
    if engine == "exact":
        return coverage_exact(fam, a, params.noise_p, work_cap_bits)
    return coverage_mc(fam, a, params.noise_p, samples, seed=seed)


def is_closed(
    f: MonotoneFunction,
    params: ClosureParams,
    engine: str = "exact",
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
    samples: int = 100_000,
    seed: int = 0,
    _candidates: Optional[list[int]] = None,
) -> ClosednessReport:
    """Scan A with |A| <= c in canonical order; report the first violation.

    A violation is a set A with f(x_A) = 0 whose noisy acceptance
    probability strictly exceeds 1 - eps.  The scan includes the empty
    set, so a closure can reach the constant 1.
    """
    threshold = 1 - Fraction(params.eps)
    candidates = _candidates if _candidates is not None else iter_masks_up_to(f.n, params.c)
    for a in candidates:
        if f(a):
            continue
        prob = _acceptance_probability(f, a, params, engine, work_cap_bits, samples, seed)
        if engine == "exact":
            violated = prob.value > threshold
        else:
            violated = prob.value - prob.half_width > float(threshold)
        if violated:
            return ClosednessReport(False, a, prob)
    return ClosednessReport(True, None, None)


def closure(
    f: MonotoneFunction,
    params: ClosureParams,
    engine: str = "exact",
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
    samples: int = 100_000,
    seed: int = 0,
    scan: str = "canonical",
) -> MonotoneFunction:
    """The minimal closed monotone function above f.

    Fixpoint iteration: while some A violates closedness, add the indicator
    of A and rescan from the smallest A.  The scan order is fixed for
    determinism but does not affect the fixpoint (the closure is unique);
    ``scan="reversed"`` exists to let tests witness that invariance.
    """
    candidates = list(iter_masks_up_to(f.n, params.c))
    if scan == "reversed":
        candidates = list(reversed(candidates))
    elif scan != "canonical":
        raise ValueError("scan must be 'canonical' or 'reversed'")
    current = f
    while True:
        report = is_closed(
            current, params, engine, work_cap_bits, samples, seed, _candidates=candidates
        )
        if report.closed:
            return current
        current = current | MonotoneFunction.indicator(f.n, report.witness)


def trim(f: MonotoneFunction, max_size) -> MonotoneFunction:
    """Drop all minterms with more than ``max_size`` elements."""
    return MonotoneFunction.from_masks(
        f.n, (m for m in f.minterms if m.bit_count() <= max_size)
    )


def approx_or(
    f: MonotoneFunction, g: MonotoneFunction, params: ClosureParams, **kw
) -> MonotoneFunction:
    return trim(closure(f | g, params, **kw), params.c / 2)


def approx_and(
    f: MonotoneFunction, g: MonotoneFunction, params: ClosureParams, **kw
) -> MonotoneFunction:
    return trim(closure(f & g, params, **kw), params.c / 2)


# ---------------------------------------------------------------------------
# circuits


@dataclass(frozen=True)
class MonotoneCircuit:
    """DAG of OR/AND gates over variable indicators.

    Gates are 1-indexed in definition order and may only reference earlier
    gates, which makes the DAG acyclic by construction.  ``size`` counts
    OR/AND gates only.
    """

    n: int
    gates: tuple[tuple, ...]
    output: int

    def __post_init__(self):
        for idx, gate in enumerate(self.gates, start=1):
            kind = gate[0]
            if kind == "input":
                if not 1 <= gate[1] <= self.n:
                    raise ValueError(f"gate {idx}: variable {gate[1]} outside [1,{self.n}]")
            elif kind in ("or", "and"):
                a, b = gate[1], gate[2]
                if not (1 <= a < idx and 1 <= b < idx):
                    raise ValueError(f"gate {idx}: operands must reference earlier gates")
            else:
                raise ValueError(f"gate {idx}: unknown kind {kind!r}")
        if not 1 <= self.output <= len(self.gates):
            raise ValueError("output gate out of range")

    @property
    def size(self) -> int:
        return sum(1 for g in self.gates if g[0] in ("or", "and"))

    def eval(self, x: int) -> int:
        vals: list[int] = []
        for gate in self.gates:
            if gate[0] == "input":
                vals.append(x >> (gate[1] - 1) & 1)
            elif gate[0] == "or":
                vals.append(vals[gate[1] - 1] | vals[gate[2] - 1])
            else:
                vals.append(vals[gate[1] - 1] & vals[gate[2] - 1])
        return vals[self.output - 1]


def circuit_to_text(circuit: MonotoneCircuit) -> str:
    lines = []
    for gate in circuit.gates:
        if gate[0] == "input":
            lines.append(f"INPUT {gate[1]}")
        else:
            lines.append(f"{gate[0].upper()} {gate[1]} {gate[2]}")
    lines.append(f"OUTPUT {circuit.output}")
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str, n: int) -> MonotoneCircuit:
    """Parse the line format ``INPUT i`` / ``OR a b`` / ``AND a b`` / ``OUTPUT g``.

    Gates receive ids 1, 2, ... in order of appearance; OR/AND operands and
    the OUTPUT line refer to those ids.
    """
    gates: list[tuple] = []
    output = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        op = parts[0].upper()
        if op == "INPUT":
            gates.append(("input", int(parts[1])))
        elif op in ("OR", "AND"):
            gates.append((op.lower(), int(parts[1]), int(parts[2])))
        elif op == "OUTPUT":
            output = int(parts[1])
        else:
            raise ValueError(f"unknown directive {op!r}")
    if output is None:
        raise ValueError("missing OUTPUT line")
    return MonotoneCircuit(n, tuple(gates), output)


def circuit_function(circuit: MonotoneCircuit) -> MonotoneFunction:
    """The exact monotone function computed by the circuit (minterm form)."""
    fns: list[MonotoneFunction] = []
    for gate in circuit.gates:
        if gate[0] == "input":
            fns.append(MonotoneFunction.indicator(circuit.n, 1 << (gate[1] - 1)))
        elif gate[0] == "or":
            fns.append(fns[gate[1] - 1] | fns[gate[2] - 1])
        else:
            fns.append(fns[gate[1] - 1] & fns[gate[2] - 1])
    return fns[circuit.output - 1]


@dataclass(frozen=True)
class GateError:
    gate: int
    kind: str
    positive_error: object  # Fraction (exact) or float (mc)
    negative_error: object


@dataclass(frozen=True)
class ErrorLedger:
    entries: tuple[GateError, ...]

    @property
    def total_positive(self):
        return sum(e.positive_error for e in self.entries)

    @property
    def total_negative(self):
        return sum(e.negative_error for e in self.entries)

    def to_csv(self) -> str:
        lines = ["gate,kind,pos_err,neg_err"]
        for e in self.entries:
            lines.append(
                f"{e.gate},{e.kind},{float(e.positive_error)!r},{float(e.negative_error)!r}"
            )
        return "\n".join(lines) + "\n"


def approximate_circuit(
    circuit: MonotoneCircuit,
    params: ClosureParams,
    pos_dist,
    neg_dist,
    engine: str = "exact",
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
    samples: int = 100_000,
    seed: int = 0,
) -> tuple[MonotoneFunction, ErrorLedger]:
    """Replace every gate with its approximating gate, tracking exact errors.

    Inputs map to their indicators; an OR gate with child approximators
    f, g gets trim(cl(f or g)), an AND gate trim(cl(f and g)).  Per gate
    the ledger records the exact joint probabilities

        positive_error = Pr_pos[(f op g)(x) = 1 and approx(x) = 0]
        negative_error = Pr_neg[(f op g)(x) = 0 and approx(x) = 1]

    against the supplied test distributions; summed over gates, these
    union-bound the end-to-end disagreement between the circuit and the
    final approximator (the errors telescope through the DAG).
    """
    pos_items = list(pos_dist.exact_items()) if engine == "exact" else None
    neg_items = list(neg_dist.exact_items()) if engine == "exact" else None

    def joint(event: Callable[[int], bool], items, dist, stream_id: int):
        if engine == "exact":
            total = Fraction(0)
            for x, w in items:
                if event(x):
                    total += w
            return total
        from .probability import mc_event_probability

        est = mc_event_probability(
            event, dist.sample, samples, seed=seed, stream_id=stream_id
        )
        return est.value

    approx: list[MonotoneFunction] = []
    entries: list[GateError] = []
    for idx, gate in enumerate(circuit.gates, start=1):
        if gate[0] == "input":
            approx.append(MonotoneFunction.indicator(circuit.n, 1 << (gate[1] - 1)))
            entries.append(GateError(idx, "input", Fraction(0), Fraction(0)))
            continue
        fa, fb = approx[gate[1] - 1], approx[gate[2] - 1]
        raw = fa | fb if gate[0] == "or" else fa & fb
        ap = trim(
            closure(raw, params, engine, work_cap_bits, samples, seed), params.c / 2
        )
        approx.append(ap)
        pos = joint(lambda x: raw(x) == 1 and ap(x) == 0, pos_items, pos_dist, 2 * idx)
        neg = joint(lambda x: raw(x) == 0 and ap(x) == 1, neg_items, neg_dist, 2 * idx + 1)
        entries.append(GateError(idx, gate[0], pos, neg))
    return approx[circuit.output - 1], ErrorLedger(tuple(entries))


def closure_error_bound_check(
    f: MonotoneFunction,
    params: ClosureParams,
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
) -> tuple[Fraction, Fraction]:
    """Exact Pr[f(N)=0 and cl(f)(N)=1] vs the union bound eps * sum C(n,j).

    Since f <= cl(f) pointwise the joint probability is the difference of
    the two acceptance probabilities under the noise distribution.
    """
    cl = closure(f, params, work_cap_bits=work_cap_bits)
    p_f = coverage_exact(f.minterm_family(), 0, params.noise_p, work_cap_bits).value
    p_cl = coverage_exact(cl.minterm_family(), 0, params.noise_p, work_cap_bits).value
    lhs = p_cl - p_f
    rhs = Fraction(params.eps) * sum(math.comb(f.n, j) for j in range(params.c + 1))
    return lhs, rhs


def closed_minterm_bound_check(
    f_closed: MonotoneFunction, params: ClosureParams, B: float
) -> list[tuple[int, int, float]]:
    """Per size 1..c: (minterm count, (6 B c ln n)^size).

    Reported, not asserted: the bound is meaningful only when B is at least
    the (unverified) extraction constant.
    """
    out = []
    base = 6.0 * B * params.c * math.log(f_closed.n)
    for size in range(1, params.c + 1):
        count = sum(1 for m in f_closed.minterms if m.bit_count() == size)
        out.append((size, count, base**size))
    return out
