"""Independent brute-force oracles for the test suite.

Everything here is deliberately dumb: full enumeration with exact
rationals, no sharing of code paths with the package under test.
"""

from fractions import Fraction
from itertools import combinations


def iter_bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def brute_coverage(members, y, p, n):
    """Pr over p-biased W of [n] that some member is inside W | y.

    Enumerates all 2^n outcomes of W (not just the relevant elements).
    """
    p = Fraction(p)
    total = Fraction(0)
    for w in range(1 << n):
        if any(m & ~(w | y) == 0 for m in members):
            weight = Fraction(1)
            for i in range(n):
                weight *= p if w >> i & 1 else 1 - p
            total += weight
    return total


def brute_spread(members, r, n):
    """Direct r-spread check over every nonempty T inside [n]."""
    r = Fraction(r)
    size = len(members)
    for t in range(1, 1 << n):
        cnt = sum(1 for m in members if m & t == t)
        if cnt * r ** bin(t).count("1") > size:
            return False
    return True


def brute_has_clique(n, edge_set, k):
    """edge_set: set of frozensets {u, v}; scan all C(n, k) vertex subsets."""
    if k <= 1:
        return k <= 0 or n >= 1
    for vs in combinations(range(1, n + 1), k):
        if all(frozenset((a, b)) in edge_set for a, b in combinations(vs, 2)):
            return True
    return False


def brute_containment_probability(n, k, a_size):
    """Pr[fixed a_size-set inside a uniform random k-subset of [n]]."""
    fixed = set(range(1, a_size + 1))
    hits = sum(1 for vs in combinations(range(1, n + 1), k) if fixed <= set(vs))
    import math

    return Fraction(hits, math.comb(n, k))


def edge_index(u, v):
    return (v - 1) * (v - 2) // 2 + (u - 1)


def clique_edge_mask(vertices):
    vs = sorted(vertices)
    e = 0
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            e |= 1 << edge_index(vs[i], vs[j])
    return e


def brute_pq_hit(vertex_masks, b_mask, p, q, n):
    """Exact Pr[some A: K_A in G|K_B and A in U|B], full joint enumeration."""
    p, q = Fraction(p), Fraction(q)
    m = n * (n - 1) // 2
    b_edges = clique_edge_mask([i + 1 for i in iter_bits(b_mask)])
    pairs = []
    for a in vertex_masks:
        a_edges = clique_edge_mask([i + 1 for i in iter_bits(a)])
        pairs.append((a_edges & ~b_edges, a & ~b_mask))
    total = Fraction(0)
    for g in range(1 << m):
        wg = Fraction(1)
        for i in range(m):
            wg *= p if g >> i & 1 else 1 - p
        for u in range(1 << n):
            if not any(ge & ~g == 0 and av & ~u == 0 for ge, av in pairs):
                continue
            wu = Fraction(1)
            for i in range(n):
                wu *= q if u >> i & 1 else 1 - q
            total += wg * wu
    return total


def pq_hit_inclusion_exclusion(vertex_masks, edge_masks, p, q):
    """Exact hit probability (no core) by inclusion-exclusion over subfamilies."""
    p, q = Fraction(p), Fraction(q)
    m = len(vertex_masks)
    total = Fraction(0)
    for sub in range(1, 1 << m):
        eu = 0
        vu = 0
        bits = 0
        s = sub
        while s:
            low = s & -s
            i = low.bit_length() - 1
            eu |= edge_masks[i]
            vu |= vertex_masks[i]
            bits += 1
            s ^= low
        term = p ** bin(eu).count("1") * q ** bin(vu).count("1")
        total += term if bits & 1 else -term
    return total


def enumerate_antichains(n):
    """All antichains of subsets of [n], i.e. all monotone functions."""
    masks = sorted(range(1 << n), key=lambda m: (bin(m).count("1"), m))
    out = []

    def comparable(a, b):
        return a & b == a or a & b == b

    def extend(start, chosen):
        out.append(tuple(chosen))
        for i in range(start, len(masks)):
            m = masks[i]
            if all(not comparable(m, c) for c in chosen):
                chosen.append(m)
                extend(i + 1, chosen)
                chosen.pop()

    extend(0, [])
    return out


def eval_antichain(minterms, x):
    return 1 if any(m & x == m for m in minterms) else 0


def brute_agreement(w1, w2):
    return sum(1 for a, b in zip(w1, w2) if a == b)
