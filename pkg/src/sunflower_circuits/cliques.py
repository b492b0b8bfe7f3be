"""Graphs, clique indicators, clique-sunflowers and their Janson certificates.

Graphs on n vertices are edge bit-vectors over the C(n,2) vertex pairs:
edge {u, v} with 1 <= u < v <= n sits at index (v-1)(v-2)/2 + (u-1),
zero-based.  A clique family is a family of vertex subsets A; the derived
edge family {K_A} feeds the same coverage engine used for plain set
families, which keeps the two notions of sunflower aligned.

The (p, q) variant draws an edge-biased graph and an independent
q-biased vertex set; the q = 1 specialization coincides with the plain
clique-sunflower test.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import BaseCaseFailedError, EmptyFamilyError, ExactIntractableError
from .probability import (
    DEFAULT_WORK_CAP_BITS,
    Estimate,
    ExactProbability,
    coverage_exact,
    coverage_mc,
    wilson_half_width,
)
from .rng import CounterStream
from .setfamily import SetFamily, canonical_key, elements_of, iter_submasks
from .monotone import antichain_minimize, iter_masks_of_weight


def edge_count(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(u: int, v: int) -> int:
    """Zero-based index of edge {u, v}, 1 <= u < v."""
    if not 1 <= u < v:
        raise ValueError("need 1 <= u < v")
    return (v - 1) * (v - 2) // 2 + (u - 1)


def edge_endpoints(idx: int) -> tuple[int, int]:
    v = 2
    while (v - 1) * (v - 2) // 2 + (v - 2) < idx:
        v += 1
    u = idx - (v - 1) * (v - 2) // 2 + 1
    return u, v


@dataclass(frozen=True)
class Graph:
    n: int
    edges: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one vertex")
        if self.edges >> edge_count(self.n):
            raise ValueError("edge bits outside the pair range")

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        if u > v:
            u, v = v, u
        return bool(self.edges >> edge_index(u, v) & 1)

    def adjacency_masks(self) -> list[int]:
        """Per-vertex neighbor masks over 0-based vertex bits."""
        adj = [0] * self.n
        e = self.edges
        while e:
            low = e & -e
            u, v = edge_endpoints(low.bit_length() - 1)
            adj[u - 1] |= 1 << (v - 1)
            adj[v - 1] |= 1 << (u - 1)
            e ^= low
        return adj


def clique_edges(vertex_mask: int) -> int:
    """Edge mask of the clique on the given vertices (empty if <= 1 vertex)."""
    verts = elements_of(vertex_mask)
    edges = 0
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            edges |= 1 << edge_index(verts[i], verts[j])
    return edges


def clique_graph(n: int, vertex_mask: int) -> Graph:
    if vertex_mask >> n:
        raise ValueError("vertices outside [n]")
    return Graph(n, clique_edges(vertex_mask))


def graph_to_text(g: Graph) -> str:
    lines = [f"n={g.n}"]
    e = g.edges
    while e:
        low = e & -e
        u, v = edge_endpoints(low.bit_length() - 1)
        lines.append(f"{u} {v}")
        e ^= low
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("graph text must start with 'n=<int>'")
    n = int(lines[0][2:])
    edges = 0
    for ln in lines[1:]:
        u, v = (int(t) for t in ln.split())
        if u > v:
            u, v = v, u
        if not 1 <= u < v <= n:
            raise ValueError(f"bad edge {u} {v}")
        edges |= 1 << edge_index(u, v)
    return Graph(n, edges)


def gnp_sample(n: int, p, stream: CounterStream) -> Graph:
    """One draw of the binomial random graph; consumes C(n,2) counter slots."""
    m = edge_count(n)
    bits = stream.bernoulli_block(stream.index, m, p)
    stream.index += m
    edges = 0
    for i in range(m):
        if bits[i]:
            edges |= 1 << i
    return Graph(n, edges)


def _has_clique_masks(adj: list[int], k: int) -> bool:
    n = len(adj)
    if k <= 0:
        return True
    if k == 1:
        return n >= 1
    cand = (1 << n) - 1
    # iterated degree pruning: a k-clique needs minimum degree k-1 inside
    changed = True
    while changed:
        changed = False
        c = cand
        while c:
            low = c & -c
            vi = low.bit_length() - 1
            if (adj[vi] & cand).bit_count() < k - 1:
                cand ^= low
                changed = True
            c ^= low
    if cand.bit_count() < k:
        return False

    def expand(size: int, cand: int) -> bool:
        if size == k:
            return True
        if size + cand.bit_count() < k:
            return False
        # pivot on the candidate with most candidate-neighbors
        best, best_deg = -1, -1
        c = cand
        while c:
            low = c & -c
            vi = low.bit_length() - 1
            d = (adj[vi] & cand).bit_count()
            if d > best_deg:
                best, best_deg = vi, d
            c ^= low
        branch = cand & ~adj[best]
        while branch:
            low = branch & -branch
            vi = low.bit_length() - 1
            if expand(size + 1, cand & adj[vi]):
                return True
            cand ^= low
            branch ^= low
        return False

    return expand(0, cand)


def has_k_clique(g: Graph, k: int) -> bool:
    """Exact clique decision via pruned backtracking with pivoting."""
    if g.n > 128:
        raise ValueError("clique decision capped at 128 vertices")
    if k > g.n:
        return False
    return _has_clique_masks(g.adjacency_masks(), k)


@dataclass(frozen=True)
class CliqueFamily:
    """Distinct vertex subsets of [n]; members of size <= 1 denote the empty graph."""

    n: int
    members: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise ValueError("members must be distinct")
        for m in self.members:
            if m >> self.n:
                raise ValueError("vertices outside [n]")

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "CliqueFamily":
        return cls(n, tuple(sorted(set(masks), key=canonical_key)))

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "CliqueFamily":
        masks = []
        for s in sets:
            m = 0
            for v in s:
                if not 1 <= v <= n:
                    raise ValueError(f"vertex {v} outside [1,{n}]")
                m |= 1 << (v - 1)
            masks.append(m)
        return cls.from_masks(n, masks)

    def __len__(self) -> int:
        return len(self.members)

    def core(self) -> int:
        if not self.members:
            raise EmptyFamilyError("core of an empty clique family")
        y = (1 << self.n) - 1
        for m in self.members:
            y &= m
        return y

    def uniform_size(self) -> int:
        if not self.members:
            raise EmptyFamilyError("uniform size of an empty clique family")
        size = self.members[0].bit_count()
        if any(m.bit_count() != size for m in self.members):
            raise ValueError("clique family is not uniform")
        return size


def clique_minterms(f: Callable[[Graph], int], size: int, n: int) -> CliqueFamily:
    """All A of the given size with f(K_A) = 1 and f(K_{A-a}) = 0 for each a."""
    hits = []
    for vm in iter_masks_of_weight(n, size):
        if not f(clique_graph(n, vm)):
            continue
        if all(f(clique_graph(n, vm ^ low)) == 0 for low in _bits(vm)):
            hits.append(vm)
    return CliqueFamily.from_masks(n, hits)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def _edge_family(s: CliqueFamily) -> SetFamily:
    m = edge_count(s.n)
    if m == 0:
        raise ValueError("need at least two vertices for an edge family")
    return SetFamily.from_masks(m, (clique_edges(a) for a in s.members))


def clique_coverage(
    s: CliqueFamily,
    core_vertices: int,
    p,
    engine: str = "exact",
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
    samples: int = 100_000,
    confidence: float = 0.99,
    seed: int = 0,
):
    """Pr[some K_A lies inside G(n,p) union K_core], via the edge ground set."""
    if not s.members:
        return ExactProbability(Fraction(0)) if engine == "exact" else Estimate(
            0.0, 0.0, confidence, samples, seed
        )
    if edge_count(s.n) == 0:
        return ExactProbability(Fraction(1))  # only empty graphs exist
    fam = _edge_family(s)
    y = clique_edges(core_vertices)
    if engine == "exact":
        return coverage_exact(fam, y, p, work_cap_bits)
    return coverage_mc(fam, y, p, samples, confidence, seed)


def _minimize_pairs(pairs: list[tuple[int, int]]) -> list[int]:
    """Indices of pairs not dominated componentwise by another pair."""
    out: list[int] = []
    for i, (e1, v1) in enumerate(pairs):
        dominated = False
        for j, (e2, v2) in enumerate(pairs):
            if i == j:
                continue
            if e2 & e1 == e2 and v2 & v1 == v2 and (e2, v2) != (e1, v1):
                dominated = True
                break
            if (e2, v2) == (e1, v1) and j < i:
                dominated = True
                break
        if not dominated:
            out.append(i)
    return out


def pq_coverage_exact(
    s: CliqueFamily,
    core_vertices: int,
    p,
    q,
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
) -> ExactProbability:
    """Exact Pr[some A: K_A inside G union K_B and A inside U union B].

    The per-member event is a conjunction of independent coordinates (the
    missing edges of K_A must be in G, the missing vertices in U), so the
    union probability falls to inclusion-exclusion over subfamilies:
    each subfamily contributes p^|union of edges| q^|union of vertices|.
    Large families fall back to conditioning on U over the vertex
    envelope, with the edge coverage engine finishing per outcome.
    """
    if not s.members:
        return ExactProbability(Fraction(0))
    b = core_vertices
    b_edges = clique_edges(b)
    pairs = [(clique_edges(a) & ~b_edges, a & ~b) for a in s.members]
    keep = _minimize_pairs(pairs)
    pairs = [pairs[i] for i in keep]
    if any(e == 0 and v == 0 for e, v in pairs):
        return ExactProbability(Fraction(1))
    pf, qf = Fraction(p), Fraction(q)
    if len(pairs) <= 20:
        ppow: dict[int, Fraction] = {0: Fraction(1)}
        qpow: dict[int, Fraction] = {0: Fraction(1)}

        def power(table, base, k):
            if k not in table:
                table[k] = power(table, base, k - 1) * base
            return table[k]

        total = Fraction(0)
        m = len(pairs)
        stack = [(0, 0, 0, 1)]
        while stack:
            start, eu, vu, sign = stack.pop()
            for j in range(start, m):
                e2, v2 = eu | pairs[j][0], vu | pairs[j][1]
                total += sign * power(ppow, pf, e2.bit_count()) * power(
                    qpow, qf, v2.bit_count()
                )
                stack.append((j + 1, e2, v2, -sign))
        return ExactProbability(total)
    venv = 0
    for _, v in pairs:
        venv |= v
    width = venv.bit_count()
    if width > min(work_cap_bits, 20):
        raise ExactIntractableError(width, min(work_cap_bits, 20))
    total = Fraction(0)
    for u in iter_submasks(venv):
        stripped = [a for a in s.members if a & ~b & ~u == 0]
        if not stripped:
            continue
        sub = CliqueFamily.from_masks(s.n, stripped)
        cover = clique_coverage(sub, b, p, "exact", work_cap_bits)
        weight = qf ** u.bit_count() * (1 - qf) ** (width - u.bit_count())
        total += weight * cover.value
    return ExactProbability(total)


def pq_coverage_mc(
    s: CliqueFamily,
    core_vertices: int,
    p,
    q,
    samples: int,
    confidence: float = 0.99,
    seed: int = 0,
) -> Estimate:
    """Sampled joint coverage; each sample consumes C(n,2)+n slots (edges first)."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    stream = CounterStream(seed, stream=0)
    b = core_vertices
    b_edges = clique_edges(b)
    pairs = [(clique_edges(a) & ~b_edges, a & ~b) for a in s.members]
    m = edge_count(s.n)
    hits = 0
    for _ in range(samples):
        g = gnp_sample(s.n, p, stream)
        u = 0
        bits = stream.bernoulli_block(stream.index, s.n, q)
        stream.index += s.n
        for j in range(s.n):
            if bits[j]:
                u |= 1 << j
        if any(ge & ~g.edges == 0 and av & ~u == 0 for ge, av in pairs):
            hits += 1
    return Estimate(
        hits / samples, wilson_half_width(hits, samples, confidence), confidence, samples, seed
    )


@dataclass(frozen=True)
class CliqueCheck:
    decision: Optional[bool]
    core: int
    threshold: float
    probability: object
    engine: str


def is_clique_sunflower(
    s: CliqueFamily, p, eps, engine: str = "exact", **kw
) -> CliqueCheck:
    """Strict test: clique coverage over the family's vertex core > 1 - eps."""
    if not s.members:
        raise EmptyFamilyError("empty clique family")
    y = s.core()
    prob = clique_coverage(s, y, p, engine, **kw)
    threshold = 1 - float(eps)
    if engine == "exact":
        decision = prob.value > 1 - Fraction(eps)
    else:
        decision = None if abs(prob.value - threshold) <= prob.half_width else prob.value > threshold
    return CliqueCheck(decision, y, threshold, prob, engine)


def is_pq_clique_sunflower(
    s: CliqueFamily,
    p,
    q,
    eps,
    engine: str = "exact",
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
    samples: int = 100_000,
    confidence: float = 0.99,
    seed: int = 0,
) -> CliqueCheck:
    if not s.members:
        raise EmptyFamilyError("empty clique family")
    b = s.core()
    if engine == "exact":
        prob = pq_coverage_exact(s, b, p, q, work_cap_bits)
        decision = prob.value > 1 - Fraction(eps)
        return CliqueCheck(decision, b, 1 - float(eps), prob, "exact")
    est = pq_coverage_mc(s, b, p, q, samples, confidence, seed)
    threshold = 1 - float(eps)
    decision = None if abs(est.value - threshold) <= est.half_width else est.value > threshold
    return CliqueCheck(decision, b, threshold, est, "mc")


@lru_cache(maxsize=None)
def _s_poly_frac(size: int, t: Fraction) -> Fraction:
    if size == 0:
        return Fraction(1)
    return t * sum(math.comb(size, j) * _s_poly_frac(j, t) for j in range(size))


def s_poly_exact(size: int, t) -> Fraction:
    """s_0 = 1, s_l(t) = t * sum_{j<l} C(l,j) s_j(t), exactly."""
    if size < 0:
        raise ValueError("size must be >= 0")
    tf = Fraction(t)
    if tf <= 0:
        raise ValueError("t must be positive")
    return _s_poly_frac(size, tf)


def s_poly(size: int, t) -> float:
    return float(s_poly_exact(size, t))


def clique_sunflower_threshold(size: int, p: float, eps: float) -> float:
    """l!(2 ln(1/eps))^l (1/p)^C(l,2): guarantees a (p,eps)-clique-sunflower.

    Note the C(l,2) exponent sits on 1/p only; the log factor carries a
    plain l, which is what beats the generic robust-sunflower threshold.
    """
    if eps >= math.exp(-0.5):
        warnings.warn("threshold regime expects eps < e^{-1/2}", stacklevel=2)
    return (
        math.factorial(size)
        * (2.0 * math.log(1.0 / eps)) ** size
        * (1.0 / p) ** math.comb(size, 2)
    )


@dataclass(frozen=True)
class JansonCertificate:
    """exp(-mu^2/(mu+delta_bar)) upper bound on the all-miss probability."""

    mu: float
    delta_bar: float
    exponent: float
    bound: float
    mu_exact: Fraction
    delta_bar_exact: Fraction


def janson_certificate(s: CliqueFamily, p, q) -> JansonCertificate:
    """Certificate for Pr[forall A: K_A not in G(n,p) or A not in U(n,q)].

    mu sums the individual appearance probabilities q^l p^C(l,2);
    delta_bar sums, over ordered pairs with |A cap A'| = j in [1, l-1],
    the joint probabilities q^(2l-j) p^(2C(l,2)-C(j,2)).  Pairs with
    disjoint members share no edges or vertices and drop out.
    """
    if not s.members:
        raise EmptyFamilyError("empty clique family")
    if not 0 < float(q) <= 1 or not 0 < float(p) <= 1:
        raise ValueError("need p, q in (0, 1]")
    size = s.uniform_size()
    pf, qf = Fraction(p), Fraction(q)
    mu = len(s.members) * qf**size * pf ** math.comb(size, 2)
    delta = Fraction(0)
    for a in s.members:
        for a2 in s.members:
            if a == a2:
                continue
            j = (a & a2).bit_count()
            if j >= 1:
                delta += qf ** (2 * size - j) * pf ** (2 * math.comb(size, 2) - math.comb(j, 2))
    exponent = float(mu * mu / (mu + delta))
    return JansonCertificate(float(mu), float(delta), exponent, math.exp(-exponent), mu, delta)


@dataclass(frozen=True)
class CliqueTraceStep:
    depth: int
    uniform_size: int
    family_size: int
    case: str
    j: Optional[int]
    chosen: Optional[int]
    q: float

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "l": self.uniform_size,
            "family": self.family_size,
            "case": self.case,
            "j": self.j,
            "B": self.chosen,
            "q": self.q,
        }


@dataclass(frozen=True)
class CliqueSunflowerResult:
    subfamily: CliqueFamily
    core_set: int
    verified: bool
    status: str  # "ok" or "below_threshold"
    certificate: Optional[JansonCertificate]
    probability: Optional[object]
    trace: tuple[CliqueTraceStep, ...]


def find_clique_sunflower(
    s: CliqueFamily,
    p,
    q,
    eps,
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
    mc_samples: int = 100_000,
    seed: int = 0,
) -> CliqueSunflowerResult:
    """Extract a (p, q, eps)-clique-sunflower by the popular-core recursion.

    With c_j = s_j(ln(1/eps)): the 1-uniform base case succeeds once
    (1-q)^|S| < eps exactly; otherwise scan j ascending and cores B in
    canonical order for a B of size j contained in at least
    c_{l-j} (1/(q p^j))^{l-j} (1/p)^C(l-j,2) members, recurse on the
    vertex link with q' = q p^j and lift by B.  If no (j, B) qualifies the
    family itself is returned with its Janson certificate; the exponent
    must beat ln(1/eps), otherwise the input was below threshold and the
    result says so instead of crashing.
    """
    if not s.members:
        raise EmptyFamilyError("empty clique family")
    eps_f = Fraction(eps)
    ln_inv_eps = Fraction(math.log(1.0 / float(eps)))
    p_f = Fraction(p)
    trace: list[CliqueTraceStep] = []
    certificate: Optional[JansonCertificate] = None
    status = "ok"

    def recurse(fam: CliqueFamily, q_now: Fraction, depth: int) -> CliqueFamily:
        nonlocal certificate, status
        size = fam.uniform_size()
        if size == 0:
            trace.append(CliqueTraceStep(depth, 0, len(fam), "trivial", None, None, float(q_now)))
            return fam
        if size == 1:
            if (1 - q_now) ** len(fam) < eps_f:
                trace.append(CliqueTraceStep(depth, 1, len(fam), "base", None, None, float(q_now)))
                return fam
            raise BaseCaseFailedError("(1-q)^|S| >= eps at the 1-uniform base case")
        counts: dict[int, int] = {}
        for a in fam.members:
            for t in iter_submasks(a):
                if 0 < t.bit_count() < size:
                    counts[t] = counts.get(t, 0) + 1
        for j in range(1, size):
            rem = size - j
            threshold = (
                _s_poly_frac(rem, ln_inv_eps)
                * (1 / (q_now * p_f**j)) ** rem
                * (1 / p_f) ** math.comb(rem, 2)
            )
            hits = sorted(
                (b for b, cnt in counts.items() if b.bit_count() == j and cnt >= threshold),
                key=canonical_key,
            )
            if hits:
                b = hits[0]
                trace.append(
                    CliqueTraceStep(depth, size, len(fam), "link", j, b, float(q_now))
                )
                linked = CliqueFamily.from_masks(
                    fam.n, (a & ~b for a in fam.members if a & b == b)
                )
                sub = recurse(linked, q_now * p_f**j, depth + 1)
                return CliqueFamily.from_masks(fam.n, (a | b for a in sub.members))
        cert = janson_certificate(fam, p, float(q_now))
        certificate = cert
        if cert.exponent > float(ln_inv_eps):
            trace.append(CliqueTraceStep(depth, size, len(fam), "janson", None, None, float(q_now)))
        else:
            status = "below_threshold"
            trace.append(
                CliqueTraceStep(depth, size, len(fam), "below_threshold", None, None, float(q_now))
            )
        return fam

    subfamily = recurse(s, Fraction(q), 0)
    core_set = subfamily.core()
    probability = None
    verified = False
    if status == "ok":
        try:
            chk = is_pq_clique_sunflower(subfamily, p, q, eps, "exact", work_cap_bits)
        except ExactIntractableError:
            chk = is_pq_clique_sunflower(
                subfamily, p, q, eps, "mc", samples=mc_samples, seed=seed
            )
        probability = chk.probability
        verified = chk.decision is True
    return CliqueSunflowerResult(
        subfamily, core_set, verified, status, certificate, probability, tuple(trace)
    )


def clique_parameters(n: int, delta: float) -> tuple[int, float, float]:
    """(k, p, eps) = (round(n^(1/3-delta)), n^(-2/(k-1)), n^-k)."""
    if not 0 < delta < 1 / 3:
        raise ValueError("delta must be in (0, 1/3)")
    k = max(2, round(n ** (1 / 3 - delta)))
    p = n ** (-2.0 / (k - 1))
    eps = float(n) ** (-k)
    return k, p, eps


def verify_no_kclique_bound(
    n: int, k: int, p, samples: int, seed: int = 0, confidence: float = 0.99
) -> Estimate:
    """Monte-Carlo Pr[G(n,p) contains a k-clique]; the target bound is 3/4."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    m = edge_count(n)
    stream = CounterStream(seed, stream=0)
    endpoints = [edge_endpoints(i) for i in range(m)]
    hits = 0
    chunk = max(1, (1 << 21) // max(m, 1))
    done = 0
    while done < samples:
        take = min(chunk, samples - done)
        bits = stream.bernoulli_block(done * m, take * m, p).reshape(take, m)
        for row in bits:
            adj = [0] * n
            for i in np.flatnonzero(row):
                u, v = endpoints[i]
                adj[u - 1] |= 1 << (v - 1)
                adj[v - 1] |= 1 << (u - 1)
            if _has_clique_masks(adj, k):
                hits += 1
        done += take
    return Estimate(
        hits / samples, wilson_half_width(hits, samples, confidence), confidence, samples, seed
    )


def clique_spread_check(n: int, k: int, a_size: int) -> tuple[Fraction, Fraction]:
    """(containment probability, (k/n)^l) for a fixed l-set inside a uniform k-set.

    The containment probability of an l-subset in a uniform random k-subset
    of [n] is the hypergeometric ratio C(n-l, k-l)/C(n, k).
    """
    if not 0 <= a_size <= k <= n:
        raise ValueError("need 0 <= |A| <= k <= n")
    value = Fraction(math.comb(n - a_size, k - a_size), math.comb(n, k))
    bound = Fraction(k, n) ** a_size
    return value, bound


# ---------------------------------------------------------------------------
# clique-shaped monotone functions and their approximator algebra


@dataclass(frozen=True)
class CliqueShapedFunction:
    """Monotone function on graphs whose minterms are all cliques K_A.

    Members are vertex masks forming an antichain; any member with at most
    one vertex makes the function constant 1 (the empty graph is contained
    in everything), canonically stored as the single member 0.
    """

    n: int
    cliques: tuple[int, ...]

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "CliqueShapedFunction":
        ms = list(masks)
        if any(m.bit_count() <= 1 for m in ms):
            return cls(n, (0,))
        return cls(n, antichain_minimize(ms))

    @classmethod
    def constant0(cls, n: int) -> "CliqueShapedFunction":
        return cls(n, ())

    @classmethod
    def constant1(cls, n: int) -> "CliqueShapedFunction":
        return cls(n, (0,))

    @classmethod
    def indicator(cls, n: int, vertex_mask: int) -> "CliqueShapedFunction":
        return cls.from_masks(n, (vertex_mask,))

    def __call__(self, g: Graph) -> int:
        return 1 if any(clique_edges(a) & ~g.edges == 0 for a in self.cliques) else 0

    def eval_on_clique(self, vertex_mask: int) -> int:
        """f(K_A): some member is a vertex-subset of A (or f is constant 1)."""
        return 1 if any(
            m == 0 or (m & vertex_mask == m and m.bit_count() >= 2) for m in self.cliques
        ) else 0

    def family(self) -> CliqueFamily:
        return CliqueFamily.from_masks(self.n, self.cliques)

    @property
    def is_constant1(self) -> bool:
        return self.cliques == (0,)

    @property
    def is_constant0(self) -> bool:
        return not self.cliques


def clique_or(f: CliqueShapedFunction, g: CliqueShapedFunction) -> CliqueShapedFunction:
    return CliqueShapedFunction.from_masks(f.n, f.cliques + g.cliques)


def wedge(f: CliqueShapedFunction, g: CliqueShapedFunction) -> CliqueShapedFunction:
    """Replace every pairwise conjunction by the union-clique indicator.

    Pointwise below f and g's conjunction, but agrees with it on every
    clique input K_A, so it costs nothing on clique-shaped positives.
    """
    return CliqueShapedFunction.from_masks(
        f.n, (a | b for a in f.cliques for b in g.cliques)
    )


@dataclass(frozen=True)
class CliqueApproxParams:
    """Edge bias p, strictness eps, closure scan range and trim threshold."""

    p: float
    eps: float
    scan_max: int  # closure scans |A| in {2, ..., scan_max}
    trim_max: float  # trim drops clique-minterms larger than this

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError("eps must be in (0, 1)")
        if self.scan_max < 2:
            raise ValueError("scan_max must be >= 2")


def clique_closure(
    f: CliqueShapedFunction,
    params: CliqueApproxParams,
    work_cap_bits: int = DEFAULT_WORK_CAP_BITS,
) -> CliqueShapedFunction:
    """Minimal clique-closed function above f.

    The scan ranges over clique inputs K_A with |A| in {2, ..., scan_max}
    only; sizes 0 and 1 are deliberately excluded, unlike the plain-set
    closure which scans the empty set too.
    """
    current = f
    while True:
        witness = None
        for size in range(2, min(params.scan_max, f.n) + 1):
            for a in iter_masks_of_weight(f.n, size):
                if current.eval_on_clique(a):
                    continue
                prob = clique_coverage(current.family(), a, params.p, "exact", work_cap_bits)
                if prob.value > 1 - Fraction(params.eps):
                    witness = a
                    break
            if witness is not None:
                break
        if witness is None:
            return current
        current = CliqueShapedFunction.from_masks(f.n, current.cliques + (witness,))


def clique_trim(f: CliqueShapedFunction, trim_max) -> CliqueShapedFunction:
    return CliqueShapedFunction.from_masks(
        f.n, (m for m in f.cliques if m.bit_count() <= trim_max)
    )


def clique_approx_or(
    f: CliqueShapedFunction, g: CliqueShapedFunction, params: CliqueApproxParams, **kw
) -> CliqueShapedFunction:
    return clique_trim(clique_closure(clique_or(f, g), params, **kw), params.trim_max)


def clique_approx_and(
    f: CliqueShapedFunction, g: CliqueShapedFunction, params: CliqueApproxParams, **kw
) -> CliqueShapedFunction:
    return clique_trim(clique_closure(wedge(f, g), params, **kw), params.trim_max)
