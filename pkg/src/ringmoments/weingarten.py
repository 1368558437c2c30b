"""Weingarten function of the unitary group at finite dimension.

Three views of the same object, all exact where exactness is claimed:

* ``wg_exact``: rational values obtained by inverting the convolution kernel
  sigma -> n^(#cycles(sigma)) on the group algebra of S_k.  The kernel and the
  unknown are class functions, so the k! x k! system collapses to one linear
  system indexed by the integer partitions of k, solved over Fraction.
* ``wg_series``: the alternating series n^-k * sum_r (-1)^r c_r(pi) / n^r,
  where c_r counts weakly monotone transposition words, truncated at a chosen
  order together with an explicit geometric bound on the discarded tail.
* ``wg_bound`` / ``wg_alt_bounds``: closed-form magnitude bounds.

This module does no floating-point arithmetic except in ``wg_alt_bounds``,
whose first bound carries a fractional exponent.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .permutations import (
    Permutation,
    compose_images,
    count_monotone_factorizations,
    cycle_count_of_images,
    cycle_type_of_images,
    invert_images,
)

# The class-system solve is exact at any degree, but the one-off census of
# S_k grows as k!; degree 8 (40320 elements) stays under a minute.
MAX_DEGREE = 8


def integer_partitions(k: int) -> tuple[tuple[int, ...], ...]:
    """All partitions of k as descending tuples, largest part first.

    >>> integer_partitions(4)
    ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))
    """
    def gen(remaining: int, cap: int) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for part in range(min(remaining, cap), 0, -1):
            for rest in gen(remaining - part, part):
                yield (part,) + rest

    return tuple(gen(k, k))


def class_representative(cycle_type: tuple[int, ...], k: int) -> Permutation:
    """A permutation of degree k with the given cycle type: consecutive blocks
    of points, each rotated."""
    if sum(cycle_type) != k:
        raise ValueError(f"cycle type {cycle_type} does not sum to {k}")
    images = []
    start = 1
    for length in cycle_type:
        block = list(range(start + 1, start + length)) + [start]
        images.extend(block)
        start += length
    return Permutation(tuple(images))


@lru_cache(maxsize=None)
def _orthogonality_counts(
    k: int,
) -> dict[tuple[tuple[int, ...], tuple[int, ...]], dict[int, int]]:
    """For each (target class mu, product class lam), the census
    {j: #{rho in S_k with j cycles and rho^-1 * rep(mu) in class lam}}.

    One pass over S_k; independent of the dimension n, so the per-(k, n)
    system assembly below is a cheap polynomial evaluation.
    """
    parts = integer_partitions(k)
    reps = {mu: class_representative(mu, k).images for mu in parts}
    counts: dict[tuple[tuple[int, ...], tuple[int, ...]], dict[int, int]] = {}
    for rho in itertools.permutations(range(1, k + 1)):
        inv = invert_images(rho)
        j = cycle_count_of_images(rho)
        for mu, rep in reps.items():
            lam = cycle_type_of_images(compose_images(inv, rep))
            bucket = counts.setdefault((mu, lam), {})
            bucket[j] = bucket.get(j, 0) + 1
    return counts


def _solve_linear_rational(
    matrix: list[list[Fraction]], rhs: list[Fraction]
) -> list[Fraction]:
    """Gaussian elimination over Fraction with first-nonzero pivoting."""
    size = len(matrix)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular linear system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][size] for r in range(size)]


@lru_cache(maxsize=None)
def wg_class_table(k: int, n: int) -> dict[tuple[int, ...], Fraction]:
    """Exact Weingarten values at degree k and dimension n, one per cycle
    type.  Defined by the orthogonality system

        sum_rho n^(#cycles(rho)) * wg(type(rho^-1 * pi)) = [pi == id]

    for every pi in S_k.  Requires n >= k, where the system is invertible.

    Safe for concurrent reads once built; construction is memoized per (k, n).
    """
    if not 1 <= k <= MAX_DEGREE:
        raise ValueError(f"degree {k} outside 1..{MAX_DEGREE}")
    if n < k:
        raise ValueError(f"dimension {n} below degree {k}: system is singular")
    parts = integer_partitions(k)
    counts = _orthogonality_counts(k)
    matrix = [
        [
            Fraction(
                sum(c * n**j for j, c in counts.get((mu, lam), {}).items())
            )
            for lam in parts
        ]
        for mu in parts
    ]
    identity_class = (1,) * k
    rhs = [Fraction(1 if mu == identity_class else 0) for mu in parts]
    solution = _solve_linear_rational(matrix, rhs)
    return {lam: value for lam, value in zip(parts, solution)}


def _beta_numbers(lam: tuple[int, ...]) -> list[int]:
    length = len(lam)
    return [lam[i] + (length - 1 - i) for i in range(length)]


def _partition_from_beta(beta: list[int]) -> tuple[int, ...]:
    ordered = sorted(beta, reverse=True)
    length = len(ordered)
    lam = tuple(ordered[i] - (length - 1 - i) for i in range(length))
    return tuple(part for part in lam if part > 0)


@lru_cache(maxsize=None)
def _irreducible_character(lam: tuple[int, ...], mu: tuple[int, ...]) -> int:
    """Symmetric-group character value chi_lam on class mu, by repeatedly
    stripping border strips of length mu[0] (beta-number formulation)."""
    if not mu:
        return 1
    strip = mu[0]
    beta = _beta_numbers(lam)
    beta_set = set(beta)
    total = 0
    for b in beta:
        lowered = b - strip
        if lowered < 0 or lowered in beta_set:
            continue
        height = sum(1 for x in beta if lowered < x < b)
        rest = _partition_from_beta([x for x in beta if x != b] + [lowered])
        value = _irreducible_character(rest, mu[1:])
        total += -value if height % 2 else value
    return total


@lru_cache(maxsize=None)
def wg_character_table(k: int, n: int) -> dict[tuple[int, ...], Fraction]:
    """Weingarten values by character expansion, defined for every n >= 1:

        wg(mu) = sum over partitions lam of k with at most n rows of
                 chi_lam(mu) / (hook_product(lam) * content_product(lam, n))

    with content_product(lam, n) = prod over cells (i, j) of (n + j - i).
    For n >= k this equals wg_class_table; for n < k it is the minimal-norm
    solution of the (singular) orthogonality system, which is exactly what
    entry moments of an n-dimensional Haar unitary require.
    """
    if not 1 <= k <= MAX_DEGREE:
        raise ValueError(f"degree {k} outside 1..{MAX_DEGREE}")
    if n < 1:
        raise ValueError("dimension must be at least 1")
    table: dict[tuple[int, ...], Fraction] = {}
    admissible = [lam for lam in integer_partitions(k) if len(lam) <= n]
    weights = []
    for lam in admissible:
        hook = 1
        content = 1
        for i, row in enumerate(lam):
            for j in range(row):
                arm = row - j - 1
                leg = sum(1 for below in lam[i + 1 :] if below > j)
                hook *= arm + leg + 1
                content *= n + j - i
        weights.append(Fraction(1, hook * content))
    for mu in integer_partitions(k):
        table[mu] = sum(
            (w * _irreducible_character(lam, mu) for lam, w in zip(admissible, weights)),
            Fraction(0),
        )
    return table


def wg_exact(k: int, n: int, pi: Permutation) -> Fraction:
    """Exact rational Weingarten value at degree k, dimension n.

    >>> wg_exact(2, 3, Permutation((1, 2)))
    Fraction(1, 8)
    >>> wg_exact(2, 3, Permutation((2, 1)))
    Fraction(-1, 24)
    """
    if pi.degree != k:
        raise ValueError(f"permutation degree {pi.degree} does not match k={k}")
    return wg_class_table(k, n)[pi.cycle_type()]


@dataclass(frozen=True)
class WeingartenValue:
    """A truncated series evaluation next to its exact counterpart.

    ``tail_bound`` bounds |exact - series_partial| and is None when no finite
    geometric bound applies (k^2 >= 2n).  ``exact`` is None when the
    orthogonality system is unavailable (n < k or k above MAX_DEGREE).
    """

    k: int
    n: int
    pi: Permutation
    series_partial: Fraction
    r_max: int
    tail_bound: Fraction | None
    exact: Fraction | None


def wg_series(
    k: int, n: int, pi: Permutation, r_max: int | None = None
) -> WeingartenValue:
    """Truncated alternating series for the Weingarten value.

    series_partial = n^-k * sum_{r=0}^{r_max} (-1)^r c_r(pi) / n^r with c_r
    the weakly monotone transposition word count.  The discarded tail obeys
    |tail| <= (2 / (n^k k^2)) * x^(r_max + 1) / (1 - x) with x = k^2 / (2n),
    finite exactly when k^2 < 2n.

    >>> v = wg_series(2, 10, Permutation((2, 1)), r_max=3)
    >>> v.series_partial
    Fraction(-101, 100000)
    """
    if pi.degree != k:
        raise ValueError(f"permutation degree {pi.degree} does not match k={k}")
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if r_max is None:
        r_max = k * k + 4
    if r_max < 0:
        raise ValueError("truncation order must be nonnegative")
    partial = Fraction(0)
    for r in range(r_max + 1):
        c = count_monotone_factorizations(pi, r)
        if c:
            term = Fraction(c, n ** (k + r))
            partial += -term if r % 2 else term
    tail: Fraction | None = None
    x = Fraction(k * k, 2 * n)
    if k == 1:
        # no transpositions exist: the series terminates at r = 0
        tail = Fraction(0)
    elif x < 1:
        tail = Fraction(2, n**k * k * k) * x ** (r_max + 1) / (1 - x)
    exact: Fraction | None = None
    if k <= MAX_DEGREE and n >= k:
        exact = wg_exact(k, n, pi)
    return WeingartenValue(k, n, pi, partial, r_max, tail, exact)


@dataclass(frozen=True)
class WgBound:
    """Closed-form bound on |wg| at (k, n); ``case`` records which branch."""

    k: int
    n: int
    distance: int
    value: Fraction
    case: str


def wg_bound(k: int, n: int, pi: Permutation) -> WgBound:
    """Magnitude bound on the Weingarten value, valid whenever k^2 < 2n.

    Identity:      |wg| <= 1/n^k + (k^2 / (2 n^(k+2))) / (1 - k^4 / (4 n^2)).
    Non-identity:  |wg| <= (2 / (n^k k^2)) * (k^2 / (2n))^d / (1 - k^2 / (2n)),
    with d the transposition distance of pi.
    """
    if pi.degree != k:
        raise ValueError(f"permutation degree {pi.degree} does not match k={k}")
    if k * k >= 2 * n:
        raise ValueError(f"bound needs k^2 < 2n; got k={k}, n={n}")
    d = pi.transposition_distance()
    if d == 0:
        value = Fraction(1, n**k) + (
            Fraction(k * k, 2 * n ** (k + 2))
            / (1 - Fraction(k**4, 4 * n * n))
        )
        return WgBound(k, n, d, value, "identity")
    x = Fraction(k * k, 2 * n)
    value = Fraction(2, n**k * k * k) * x**d / (1 - x)
    return WgBound(k, n, d, value, "non-identity")


@dataclass(frozen=True)
class AltBounds:
    """Alternative magnitude bounds; a member is None when its own
    applicability condition fails."""

    k: int
    n: int
    j: int
    power_bound: float | None
    catalan_bound: float | None


def wg_alt_bounds(
    k: int, n: int, pi: Permutation, j: int, kj_constant: float = 1.0
) -> AltBounds:
    """Two alternative bounds on |wg|.

    * power bound: kj_constant * n^(-k - d(1 - 2/j)), applicable when j >= 2
      and k^j <= n.  The prefactor constant is not pinned down by the source
      material; it is configurable and defaults to 1.
    * Catalan bound: (3 * catalan(k-1) / 2) * n^(-k - d), applicable when
      k^(3/2) <= n.
    """
    if pi.degree != k:
        raise ValueError(f"permutation degree {pi.degree} does not match k={k}")
    if j < 2:
        raise ValueError("exponent parameter j must be at least 2")
    d = pi.transposition_distance()
    power: float | None = None
    if k**j <= n:
        power = kj_constant * float(n) ** -(k + d * (1 - 2 / j))
    catalan: float | None = None
    if k**3 <= n * n:
        cat = math.comb(2 * (k - 1), k - 1) // k
        catalan = float(Fraction(3 * cat, 2) / Fraction(n ** (k + d)))
    return AltBounds(k, n, j, power, catalan)
