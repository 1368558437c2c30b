"""Exact expected trace moments of A = U T V with independent Haar factors
and T = diag(s_1, ..., s_n).

Two statistics are computed, both exactly over rationals:

* trace_moment_uu:  E trace(A^k (A^k)^*)
* trace_moment_sq:  E |trace(A^k)|^2

Each expands as  sum_i  s_{i_1}^2 ... s_{i_k}^2 * (inner average), where i
runs over index tuples in {1..n}^k and the inner average (``f_i`` for the uu
statistic, ``g_i`` for the sq statistic) is a sum of Haar entry moments of
the unitary factor alone.

Every inner average is evaluated along two independent routes and the results
are compared:

* route A sums entry moments over representatives of index reorderings that
  leave the tuple fixed (one representative per stabilizer coset),
* route B pushes the delta constraints through the Weingarten sum and lands
  on a closed sum of Weingarten values over conjugation-and-transposition
  dressed words.

A disagreement raises ``CrossCheckError``; it would mean the two derivations
do not describe the same quantity, so no answer is returned in that case.

The inner averages depend on the index tuple only through its equality
pattern, so the n^k outer sum is folded into a sum over set partitions of the
k positions with exact injective-assignment weights.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Literal, Sequence

from .haar_moments import MomentSpec, entry_moment
from .permutations import (
    IndexTuple,
    Permutation,
    all_permutations,
    coset_representatives,
    enumerate_sk0,
    stabilizer,
)
from .profiles import SingularProfile
from .weingarten import wg_class_table

# trace_moment_uu needs the inner average at word length k-1, trace_moment_sq
# at word length k; both stay within the Weingarten table's degree ceiling.
MAX_UU_ORDER = 6
MAX_SQ_ORDER = 5
ENUMERATION_BUDGET = 10**7


class CrossCheckError(RuntimeError):
    """The two evaluation routes disagreed; the computation is unsound."""


class BudgetExceededError(RuntimeError):
    """The requested enumeration is larger than the configured budget."""


def _as_index_tuple(indices, n: int) -> IndexTuple:
    if isinstance(indices, IndexTuple):
        if indices.n != n:
            raise ValueError(f"index tuple carries n={indices.n}, call asked for {n}")
        return indices
    return IndexTuple(tuple(indices), n)


def f_paths(indices, n: int) -> tuple[Fraction, Fraction]:
    """Both evaluations of the uu inner average for one index tuple.

    Route A: for one representative phi per orbit of endpoint-fixing index
    symmetries, the entry moment of

        u[i_1, i_2] ... u[i_{k-1}, i_k]
        * conj(u[i_{phi(1)}, i_{phi(2)}]) ... conj(u[i_{phi(k-1)}, i_{phi(k)}])

    summed over representatives.

    Route B: with c the full cycle 1 -> 2 -> ... -> k -> 1,

        sum over l1, l2 in 1..k-1 with i[l1] == i[1] and i[l2 + 1] == i[k],
        phi endpoint-fixing, alpha an endpoint-fixing index symmetry, of the
        degree-(k-1) Weingarten value of
        (c^-1 phi^-1 alpha^-1 c (l2 k-1) (1 l1) phi) restricted to {1..k-1};
        the word always fixes the point k.

    The l1/l2 constraints are forced by the delta analysis: the realignment
    (1 l1) relating the conjugated row word to an index symmetry is itself an
    index symmetry only when positions 1 and l1 carry equal indices, and
    likewise (l2+1, k) on the column side before the shift by c.
    """
    i = _as_index_tuple(indices, n)
    k = i.k
    if k < 2:
        raise ValueError("uu inner average needs word length k >= 2")
    if k > MAX_UU_ORDER:
        raise ValueError(f"order {k} above supported ceiling {MAX_UU_ORDER}")
    if n < k - 1:
        raise ValueError(f"needs n >= k - 1 = {k - 1}, got {n}")
    idx = i.indices
    stab = stabilizer(i, "sk0")

    reps = coset_representatives(list(enumerate_sk0(k)), stab)
    route_a = Fraction(0)
    for phi in reps:
        img = phi.images
        route_a += entry_moment(
            MomentSpec(
                n,
                rows=idx[: k - 1],
                cols=idx[1:],
                conj_rows=tuple(idx[img[l] - 1] for l in range(k - 1)),
                conj_cols=tuple(idx[img[l] - 1] for l in range(1, k)),
            )
        )

    table = wg_class_table(k - 1, n)
    c = Permutation.full_cycle(k)
    c_inv = c.inverse()
    route_b = Fraction(0)
    for l1 in range(1, k):
        if idx[l1 - 1] != idx[0]:
            continue
        t1 = Permutation.transposition(k, 1, l1)
        for l2 in range(1, k):
            if idx[l2] != idx[k - 1]:
                continue
            t2 = Permutation.transposition(k, l2, k - 1)
            dressing = t2 * t1
            for phi in enumerate_sk0(k):
                tail = c * dressing * phi
                head = c_inv * phi.inverse()
                for alpha in stab:
                    word = head * alpha.inverse() * tail
                    if word(k) != k:
                        raise CrossCheckError(
                            f"route B word moves the endpoint for i={idx}"
                        )
                    route_b += table[word.restricted_to_prefix(k - 1).cycle_type()]
    return route_a, route_b


def f_i(indices, n: int) -> Fraction:
    """The uu inner average, cross-checked along both routes.

    >>> f_i((1, 2), 4)
    Fraction(1, 4)
    """
    route_a, route_b = f_paths(indices, n)
    if route_a != route_b:
        raise CrossCheckError(
            f"uu inner average mismatch for i={tuple(indices)}, n={n}: "
            f"{route_a} vs {route_b}"
        )
    return route_a


def g_paths(indices, n: int) -> tuple[Fraction, Fraction]:
    """Both evaluations of the sq inner average for one index tuple.

    Route A: for one representative phi per orbit of unrestricted index
    symmetries, the entry moment of the cyclic word

        u[i_1, i_2] u[i_2, i_3] ... u[i_k, i_1]
        * conj(u[i_{phi(1)}, i_{phi(2)}]) ... conj(u[i_{phi(k)}, i_{phi(1)}])

    summed over representatives.

    Route B: sum over phi in S_k and alpha an index symmetry of the
    degree-k Weingarten value of c^-1 phi^-1 alpha^-1 c phi.
    """
    i = _as_index_tuple(indices, n)
    k = i.k
    if k < 1:
        raise ValueError("sq inner average needs word length k >= 1")
    if k > MAX_SQ_ORDER:
        raise ValueError(f"order {k} above supported ceiling {MAX_SQ_ORDER}")
    if n < k:
        raise ValueError(f"needs n >= k = {k}, got {n}")
    idx = i.indices
    stab = stabilizer(i, "sk")

    reps = coset_representatives(list(all_permutations(k)), stab)
    cyc = idx[1:] + idx[:1]
    route_a = Fraction(0)
    for phi in reps:
        img = phi.images
        permuted = tuple(idx[img[l] - 1] for l in range(k))
        route_a += entry_moment(
            MomentSpec(
                n,
                rows=idx,
                cols=cyc,
                conj_rows=permuted,
                conj_cols=permuted[1:] + permuted[:1],
            )
        )

    table = wg_class_table(k, n)
    c = Permutation.full_cycle(k)
    c_inv = c.inverse()
    route_b = Fraction(0)
    for phi in all_permutations(k):
        head = c_inv * phi.inverse()
        tail = c * phi
        for alpha in stab:
            word = head * alpha.inverse() * tail
            route_b += table[word.cycle_type()]
    return route_a, route_b


def g_i(indices, n: int) -> Fraction:
    """The sq inner average, cross-checked along both routes.

    >>> g_i((1,), 3)
    Fraction(1, 3)
    """
    route_a, route_b = g_paths(indices, n)
    if route_a != route_b:
        raise CrossCheckError(
            f"sq inner average mismatch for i={tuple(indices)}, n={n}: "
            f"{route_a} vs {route_b}"
        )
    return route_a


def equality_patterns(k: int) -> Iterator[tuple[int, ...]]:
    """Canonical index tuples, one per equality pattern of k positions:
    entries are block labels 1, 2, ... in order of first appearance."""
    def rec(prefix: list[int], used: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for label in range(1, used + 2):
            yield from rec(prefix + [label], max(used, label))

    yield from rec([], 0)


def _require_exact(profile: SingularProfile) -> None:
    if not profile.is_exact:
        raise ValueError(
            "exact trace moments need rational singular values; "
            "use SingularProfile.to_exact for float data"
        )


def _ordered_injective_weight(
    profile: SingularProfile, sizes: Sequence[int], cache: dict
) -> Fraction:
    """sum over ordered tuples of distinct value positions (v_1, ..., v_p) of
    prod_j s_{v_j}^(2 * sizes_j).  Depends on the multiset of sizes only."""
    key = tuple(sorted(sizes))
    hit = cache.get(key)
    if hit is not None:
        return hit
    total = Fraction(0)
    values = profile.values
    for combo in itertools.permutations(range(profile.n), len(sizes)):
        term = Fraction(1)
        for pos, size in zip(combo, key):
            term *= values[pos] ** (2 * size)
        total += term
    cache[key] = total
    return total


def _pattern_sum(
    k: int, profile: SingularProfile, inner
) -> Fraction:
    """sum_i prod_l s_{i_l}^2 * inner(i) over all i in {1..n}^k, folded over
    equality patterns."""
    n = profile.n
    weight_cache: dict = {}
    total = Fraction(0)
    for pattern in equality_patterns(k):
        blocks = max(pattern)
        if blocks > n:
            continue
        sizes = tuple(pattern.count(b) for b in range(1, blocks + 1))
        weight = _ordered_injective_weight(profile, sizes, weight_cache)
        if weight == 0:
            continue
        total += inner(pattern) * weight
    return total


def trace_moment_uu(k: int, profile: SingularProfile) -> Fraction:
    """E trace(A^k (A^k)^*), exactly.

    k = 1 is deterministic: trace(A A^*) = sum s_i^2.  n = 1 collapses to
    s^(2k).  Otherwise the pattern-folded expansion over ``f_i`` is used;
    the raw enumeration size n^k is capped by ENUMERATION_BUDGET.
    """
    _require_exact(profile)
    if k < 1:
        raise ValueError("moment order must be at least 1")
    n = profile.n
    if k == 1:
        return Fraction(sum(v * v for v in profile.values))
    if n == 1:
        return profile.values[0] ** (2 * k)
    if n**k > ENUMERATION_BUDGET:
        raise BudgetExceededError(f"n^k = {n**k} exceeds {ENUMERATION_BUDGET}")
    return _pattern_sum(k, profile, lambda pattern: f_i(pattern, n))


def trace_moment_sq(k: int, profile: SingularProfile) -> Fraction:
    """E |trace(A^k)|^2, exactly.

    n = 1 collapses to s^(2k); otherwise the pattern-folded expansion over
    ``g_i`` is used (k = 1 works through the same machinery and equals b^2).
    """
    _require_exact(profile)
    if k < 1:
        raise ValueError("moment order must be at least 1")
    n = profile.n
    if n == 1:
        return profile.values[0] ** (2 * k)
    if n**k > ENUMERATION_BUDGET:
        raise BudgetExceededError(f"n^k = {n**k} exceeds {ENUMERATION_BUDGET}")
    return _pattern_sum(k, profile, lambda pattern: g_i(pattern, n))


@dataclass(frozen=True)
class BoundReport:
    """An exact moment next to the matching envelope value.

    ``bound_core`` is n k^2 (b^2 + k M^2 / n)^k for mode "uu" and
    (b^2 + k M^2 / n)^k for mode "sq"; the unspecified absolute constant is
    deliberately not applied, so ``ratio`` is the measured moment / core and
    is reported, never asserted against a constant.  ``applicable`` records
    whether k^6 < (2 - epsilon) n holds.
    """

    k: int
    n: int
    mode: str
    epsilon: Fraction
    exact_moment: Fraction | None
    bound_core: Fraction
    ratio: Fraction | None
    applicable: bool


def theorem_bound(
    k: int,
    profile: SingularProfile,
    mode: Literal["uu", "sq"] = "uu",
    epsilon: Fraction | float = Fraction(1, 2),
) -> BoundReport:
    """Envelope report for the chosen trace moment; see BoundReport."""
    _require_exact(profile)
    if mode not in ("uu", "sq"):
        raise ValueError(f"unknown mode {mode!r}")
    eps = Fraction(epsilon) if not isinstance(epsilon, Fraction) else epsilon
    if not 0 < eps < 2:
        raise ValueError("epsilon must lie strictly between 0 and 2")
    n = profile.n
    core = (profile.b2 + Fraction(k) * profile.M * profile.M / n) ** k
    if mode == "uu":
        core = n * k * k * core
    exact: Fraction | None
    try:
        if mode == "uu":
            exact = trace_moment_uu(k, profile)
        else:
            exact = trace_moment_sq(k, profile)
    except (ValueError, BudgetExceededError):
        exact = None
    ratio = exact / core if exact is not None and core != 0 else None
    applicable = k**6 < (2 - eps) * n
    return BoundReport(k, n, mode, eps, exact, core, ratio, applicable)


@dataclass(frozen=True)
class CountingCheck:
    """Exhaustive count against the combinatorial ceiling k^(4q) / (2q)!."""

    k: int
    l1: int
    l2: int
    alpha: Permutation
    q: int
    count: int
    bound: Fraction
    ok: bool


def verify_counting_lemma(
    k: int, l1: int, l2: int, alpha: Permutation, q: int
) -> CountingCheck:
    """Count endpoint-fixing phi whose dressed conjugation word

        c^-1 phi^-1 alpha^-1 c (l2 k-1) (1 l1) phi

    has transposition distance exactly q, and compare against the ceiling
    k^(4q) / (2q)!.  ``alpha`` must fix both endpoints."""
    if k < 2:
        raise ValueError("needs degree k >= 2")
    if k > 7:
        raise ValueError("exhaustive count supported for k <= 7")
    if not (1 <= l1 <= k - 1 and 1 <= l2 <= k - 1):
        raise ValueError(f"l1, l2 must lie in 1..{k - 1}")
    if alpha.degree != k or alpha(1) != 1 or alpha(k) != k:
        raise ValueError("alpha must be an endpoint-fixing permutation of degree k")
    if not 0 <= q <= k:
        raise ValueError(f"distance {q} outside 0..{k}")
    c = Permutation.full_cycle(k)
    head = c.inverse()
    tail = c * Permutation.transposition(k, l2, k - 1) * Permutation.transposition(k, 1, l1)
    mid = alpha.inverse() * tail
    count = 0
    for phi in enumerate_sk0(k):
        word = head * phi.inverse() * mid * phi
        if word.transposition_distance() == q:
            count += 1
    bound = Fraction(k ** (4 * q), math.factorial(2 * q))
    return CountingCheck(k, l1, l2, alpha, q, count, bound, count <= bound)


@dataclass(frozen=True)
class CensusReport:
    """Successive closed-form envelopes of the stabilizer-weighted power sum

        L0 = sum_i prod_l s_{i_l}^2 * #(endpoint-fixing symmetries of i).

    Each link majorizes the previous one:

    L1 folds the stabilizer size into the product of block factorials,
    L2 peels subleading factors to M^2 and closes the partition sums,
    L3 replaces the distinct-value sums by (n b^2)^p / p!,
    L4 absorbs the factorial ratio into (k M^2)^(k-p) binomials,
    L5 is the closed binomial form (n b^2 + k M^2)^k.

    ``value`` is (k^2 / n^(k-1)) * L5 = n k^2 (b^2 + k M^2 / n)^k, the
    envelope core without the unspecified absolute constant.
    """

    k: int
    n: int
    links: tuple[Fraction, Fraction, Fraction, Fraction, Fraction, Fraction]
    chain_ok: bool
    value: Fraction


def composition_census(k: int, profile: SingularProfile) -> CensusReport:
    """Evaluate every link of the counting chain exactly; see CensusReport."""
    _require_exact(profile)
    if k < 2:
        raise ValueError("census needs k >= 2")
    if k > 8:
        raise ValueError("census supported for k <= 8")
    n = profile.n
    values = profile.values
    b2 = profile.b2
    m2 = profile.M * profile.M

    weight_cache: dict = {}
    l0 = Fraction(0)
    l1 = Fraction(0)
    for pattern in equality_patterns(k):
        blocks = max(pattern)
        if blocks > n:
            continue
        sizes = tuple(pattern.count(bl) for bl in range(1, blocks + 1))
        weight = _ordered_injective_weight(profile, sizes, weight_cache)
        stab_size = len(stabilizer(IndexTuple(pattern, blocks), "sk0"))
        l0 += weight * stab_size
        l1 += weight * math.prod(math.factorial(s) for s in sizes)

    # elementary symmetric sums of the squared singular values
    elem = [Fraction(0)] * (n + 1)
    elem[0] = Fraction(1)
    for v in values:
        sq = v * v
        for p in range(n, 0, -1):
            elem[p] += elem[p - 1] * sq

    l2 = Fraction(0)
    l3 = Fraction(0)
    l4 = Fraction(0)
    for p in range(1, k + 1):
        lead = m2 ** (k - p)
        compositions = math.comb(k - 1, p - 1)
        if p <= n:
            l2 += lead * elem[p] * compositions * math.factorial(k)
        l3 += (
            lead
            * (n * b2) ** p
            * Fraction(
                math.factorial(k) * math.factorial(k - 1),
                math.factorial(p)
                * math.factorial(p - 1)
                * math.factorial(k - p),
            )
        )
        l4 += (Fraction(k) * m2) ** (k - p) * (n * b2) ** p * math.comb(k, p)
    l5 = (n * b2 + k * m2) ** k

    links = (l0, l1, l2, l3, l4, l5)
    chain_ok = all(x <= y for x, y in zip(links, links[1:]))
    value = Fraction(k * k, n ** (k - 1)) * l5
    return CensusReport(k, n, links, chain_ok, value)
