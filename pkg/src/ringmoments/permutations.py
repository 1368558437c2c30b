"""Permutation algebra on the point set {1, ..., k}.

Everything downstream (Weingarten values, unitary entry moments, trace-moment
expansions) manipulates permutations of small degree, so this module keeps one
concrete representation: one-line notation over 1-based points, with
``images[x - 1] == p(x)``.

Composition convention, fixed package-wide: ``(p * q)(x) == p(q(x))``, i.e. the
right factor acts first.  Products written as words, such as transposition
factorizations ``(s_1 t_1) ... (s_r t_r)``, are evaluated with the same rule:
the rightmost factor is applied first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Literal, Sequence


def compose_images(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """One-line images of p after q, i.e. x -> p(q(x)).  No validation."""
    return tuple(p[y - 1] for y in q)


def invert_images(p: Sequence[int]) -> tuple[int, ...]:
    """One-line images of the inverse.  No validation."""
    out = [0] * len(p)
    for x, y in enumerate(p, 1):
        out[y - 1] = x
    return tuple(out)


def cycle_count_of_images(p: Sequence[int]) -> int:
    """Number of cycles, fixed points included.  No validation."""
    seen = [False] * len(p)
    count = 0
    for start in range(len(p)):
        if seen[start]:
            continue
        count += 1
        x = start
        while not seen[x]:
            seen[x] = True
            x = p[x] - 1
    return count


def cycle_type_of_images(p: Sequence[int]) -> tuple[int, ...]:
    """Cycle lengths sorted descending, fixed points included.  No validation."""
    seen = [False] * len(p)
    lengths = []
    for start in range(len(p)):
        if seen[start]:
            continue
        size = 0
        x = start
        while not seen[x]:
            seen[x] = True
            size += 1
            x = p[x] - 1
        lengths.append(size)
    lengths.sort(reverse=True)
    return tuple(lengths)


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1, ..., k} stored as the image tuple (p(1), ..., p(k)).

    >>> p = Permutation((2, 1, 3))
    >>> p(1), p(2), p(3)
    (2, 1, 3)
    >>> str(p)
    '(1 2)'
    """

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        k = len(self.images)
        if k < 1:
            raise ValueError("degree must be at least 1")
        if sorted(self.images) != list(range(1, k + 1)):
            raise ValueError(f"not a bijection of 1..{k}: {self.images!r}")

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(1, k + 1)))

    @classmethod
    def transposition(cls, k: int, a: int, b: int) -> "Permutation":
        """The swap (a b); equal arguments give the identity."""
        if not (1 <= a <= k and 1 <= b <= k):
            raise ValueError(f"points {a}, {b} outside 1..{k}")
        images = list(range(1, k + 1))
        images[a - 1], images[b - 1] = b, a
        return cls(tuple(images))

    @classmethod
    def full_cycle(cls, k: int) -> "Permutation":
        """The k-cycle sending 1 -> 2 -> ... -> k -> 1."""
        return cls(tuple(range(2, k + 1)) + (1,))

    @classmethod
    def from_cycles(cls, k: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        """Product of the given cycles, rightmost cycle applied first.

        >>> Permutation.from_cycles(4, [(1, 2), (3, 4)]).images
        (2, 1, 4, 3)
        """
        result = cls.identity(k)
        for cycle in cycles:
            images = list(range(1, k + 1))
            for pos, point in enumerate(cycle):
                if not 1 <= point <= k:
                    raise ValueError(f"cycle point {point} outside 1..{k}")
                images[point - 1] = cycle[(pos + 1) % len(cycle)]
            if sorted(images) != list(range(1, k + 1)):
                raise ValueError(f"repeated point in cycle {tuple(cycle)}")
            result = result * cls(tuple(images))
        return result

    @classmethod
    def from_cycle_string(cls, text: str, k: int) -> "Permutation":
        """Parse cycle notation such as ``(1 2)(3 4)``; ``id`` or ``()`` parse
        to the identity."""
        stripped = text.strip()
        if stripped in ("id", "()", ""):
            return cls.identity(k)
        if stripped.count("(") != stripped.count(")") or not stripped.startswith("("):
            raise ValueError(f"malformed cycle notation: {text!r}")
        cycles = []
        for chunk in stripped.strip(")").split(")"):
            body = chunk.strip().lstrip("(").strip()
            if not body:
                continue
            try:
                cycles.append([int(tok) for tok in body.replace(",", " ").split()])
            except ValueError as exc:
                raise ValueError(f"malformed cycle notation: {text!r}") from exc
        return cls.from_cycles(k, cycles)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        if not 1 <= x <= self.degree:
            raise ValueError(f"point {x} outside 1..{self.degree}")
        return self.images[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition with the right factor acting first: (p * q)(x) = p(q(x))."""
        if self.degree != other.degree:
            raise ValueError(
                f"degree mismatch: {self.degree} vs {other.degree}"
            )
        return Permutation(compose_images(self.images, other.images))

    def inverse(self) -> "Permutation":
        return Permutation(invert_images(self.images))

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Disjoint cycles, each starting at its smallest point, fixed points
        included, ordered by smallest point."""
        seen = [False] * self.degree
        out = []
        for start in range(1, self.degree + 1):
            if seen[start - 1]:
                continue
            cycle = []
            x = start
            while not seen[x - 1]:
                seen[x - 1] = True
                cycle.append(x)
                x = self(x)
            out.append(tuple(cycle))
        return tuple(out)

    def cycle_type(self) -> tuple[int, ...]:
        return cycle_type_of_images(self.images)

    def num_cycles(self) -> int:
        return cycle_count_of_images(self.images)

    def transposition_distance(self) -> int:
        """Minimal number of transpositions multiplying to this permutation,
        equal to degree minus number of cycles (fixed points counted)."""
        return self.degree - self.num_cycles()

    def support(self) -> tuple[int, ...]:
        """Points moved by the permutation, ascending."""
        return tuple(x for x in range(1, self.degree + 1) if self(x) != x)

    def restricted_to_prefix(self, m: int) -> "Permutation":
        """Restriction to {1, ..., m}; every point above m must be fixed."""
        if not 1 <= m <= self.degree:
            raise ValueError(f"prefix length {m} outside 1..{self.degree}")
        if any(self(x) != x for x in range(m + 1, self.degree + 1)):
            raise ValueError(f"{self} moves a point above {m}")
        return Permutation(self.images[:m])

    def extended_to(self, k: int) -> "Permutation":
        """Embedding into degree k, new points fixed."""
        if k < self.degree:
            raise ValueError(f"cannot shrink degree {self.degree} to {k}")
        return Permutation(self.images + tuple(range(self.degree + 1, k + 1)))

    def __str__(self) -> str:
        moved = [c for c in self.cycles() if len(c) > 1]
        if not moved:
            return "id"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in moved)


def all_permutations(k: int) -> Iterator[Permutation]:
    """All of S_k in lexicographic image order."""
    if k < 1:
        raise ValueError("degree must be at least 1")
    for images in itertools.permutations(range(1, k + 1)):
        yield Permutation(images)


def enumerate_sk0(k: int) -> Iterator[Permutation]:
    """The (k-2)! permutations of degree k fixing both endpoints 1 and k.

    >>> [str(p) for p in enumerate_sk0(4)]
    ['id', '(2 3)']
    """
    if k < 2:
        raise ValueError("endpoint-fixing subgroup needs degree >= 2")
    for mid in itertools.permutations(range(2, k)):
        yield Permutation((1,) + mid + (k,))


@dataclass(frozen=True)
class IndexTuple:
    """A tuple of matrix indices i = (i_1, ..., i_k) with entries in 1..n."""

    indices: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        if len(self.indices) < 1:
            raise ValueError("index tuple must be nonempty")
        if self.n < 1:
            raise ValueError("ambient dimension must be at least 1")
        bad = [e for e in self.indices if not 1 <= e <= self.n]
        if bad:
            raise ValueError(f"entries {bad} outside 1..{self.n}")

    @property
    def k(self) -> int:
        return len(self.indices)

    def pattern(self) -> tuple[int, ...]:
        """Canonical equality pattern: entries renamed 1, 2, ... in order of
        first appearance.  Two tuples share a pattern iff positions agree and
        disagree in the same places."""
        names: dict[int, int] = {}
        out = []
        for e in self.indices:
            if e not in names:
                names[e] = len(names) + 1
            out.append(names[e])
        return tuple(out)


def stabilizer(i: IndexTuple, universe: Literal["sk", "sk0"]) -> list[Permutation]:
    """All permutations a in the chosen universe with i_{a(l)} == i_l for every l.

    ``universe`` selects S_k ("sk") or the endpoint-fixing subgroup ("sk0").
    """
    if universe == "sk":
        pool: Iterator[Permutation] = all_permutations(i.k)
    elif universe == "sk0":
        pool = enumerate_sk0(i.k)
    else:
        raise ValueError(f"unknown universe {universe!r}")
    idx = i.indices
    return [
        a for a in pool
        if all(idx[a.images[l] - 1] == idx[l] for l in range(i.k))
    ]


def coset_representatives(
    universe: Sequence[Permutation], stab: Sequence[Permutation]
) -> list[Permutation]:
    """One representative per orbit of the left action a . phi = a * phi of
    ``stab`` on ``universe``.  ``stab`` must be a subgroup contained in
    ``universe``; closure is checked."""
    universe_set = {p.images for p in universe}
    stab_set = {a.images for a in stab}
    if not stab:
        raise ValueError("stabilizer must contain the identity")
    degree = stab[0].degree
    if tuple(range(1, degree + 1)) not in stab_set:
        raise ValueError("stabilizer must contain the identity")
    if not stab_set <= universe_set:
        raise ValueError("stabilizer is not contained in the universe")
    for a in stab:
        for b in stab:
            if (a * b).images not in stab_set:
                raise ValueError("stabilizer is not closed under composition")
    reps = []
    seen: set[tuple[int, ...]] = set()
    for phi in universe:
        if phi.images in seen:
            continue
        reps.append(phi)
        for a in stab:
            seen.add((a * phi).images)
    return reps


@dataclass(frozen=True)
class MonotoneFactorization:
    """A word of transpositions (s_1 t_1) ... (s_r t_r) with s_j < t_j and the
    t_j weakly increasing (strictly when ``strict`` is set).  The word
    multiplies out with the rightmost factor applied first."""

    degree: int
    factors: tuple[tuple[int, int], ...]
    strict: bool = False

    def __post_init__(self) -> None:
        prev_t = 0
        for s, t in self.factors:
            if not (1 <= s < t <= self.degree):
                raise ValueError(f"factor ({s} {t}) is not an ordered pair in 1..{self.degree}")
            if self.strict:
                if t <= prev_t:
                    raise ValueError("larger points must strictly increase")
            elif t < prev_t:
                raise ValueError("larger points must weakly increase")
            prev_t = t

    @property
    def length(self) -> int:
        return len(self.factors)

    def product(self) -> Permutation:
        """Multiply the word out, left to right as written."""
        acc = Permutation.identity(self.degree)
        for s, t in self.factors:
            acc = acc * Permutation.transposition(self.degree, s, t)
        return acc


@lru_cache(maxsize=None)
def _monotone_count_table(k: int, r_max: int) -> tuple[dict[tuple[int, ...], int], ...]:
    """table[r][images] = number of weakly monotone transposition words of
    length r multiplying to the permutation with those images.

    Dynamic programming over (current product, floor for the next larger
    point); appending (s t) on the right multiplies the product on the right.
    Counts are exact arbitrary-precision integers.
    """
    identity = tuple(range(1, k + 1))
    pairs = [(s, t) for t in range(2, k + 1) for s in range(1, t)]
    levels: list[dict[tuple[int, ...], int]] = [{identity: 1}]
    frontier: dict[tuple[tuple[int, ...], int], int] = {(identity, 0): 1}
    for _ in range(r_max):
        nxt: dict[tuple[tuple[int, ...], int], int] = {}
        for (img, floor), cnt in frontier.items():
            for s, t in pairs:
                if t < floor:
                    continue
                swapped = list(img)
                swapped[s - 1], swapped[t - 1] = img[t - 1], img[s - 1]
                key = (tuple(swapped), t)
                nxt[key] = nxt.get(key, 0) + cnt
        frontier = nxt
        level: dict[tuple[int, ...], int] = {}
        for (img, _), cnt in frontier.items():
            level[img] = level.get(img, 0) + cnt
        levels.append(level)
    return tuple(levels)


def count_monotone_factorizations(p: Permutation, r: int) -> int:
    """Number of words (s_1 t_1) ... (s_r t_r) with s_j < t_j, the t_j weakly
    increasing, multiplying to p.  Zero whenever r is below the transposition
    distance or has the wrong parity; both fall out of the count itself.

    >>> count_monotone_factorizations(Permutation((2, 1, 3)), 3)
    5
    """
    if r < 0:
        raise ValueError("word length must be nonnegative")
    table = _monotone_count_table(p.degree, r)
    return table[r].get(p.images, 0)


def canonical_minimal_factorization(p: Permutation) -> MonotoneFactorization:
    """The unique strictly monotone transposition word of minimal length
    multiplying to p.

    Peels the largest moved point t and pairs it with its preimage; collecting
    the peeled factors in reverse gives strictly increasing larger points and
    exactly transposition_distance(p) factors.

    >>> canonical_minimal_factorization(Permutation((2, 3, 1))).factors
    ((1, 2), (2, 3))
    """
    w = p
    peeled = []
    while True:
        moved = w.support()
        if not moved:
            break
        t = moved[-1]
        s = w.inverse()(t)
        peeled.append((s, t))
        w = w * Permutation.transposition(p.degree, s, t)
    return MonotoneFactorization(p.degree, tuple(reversed(peeled)), strict=True)


def support_window(p: Permutation, q: int) -> frozenset[int]:
    """A set of exactly 2q points containing the support of p, completed with
    the smallest unused points of 1..k.  Requires transposition_distance(p)
    <= q and 2q <= k."""
    k = p.degree
    if 2 * q > k:
        raise ValueError(f"window size 2*{q} exceeds degree {k}")
    if q < p.transposition_distance():
        raise ValueError(
            f"window parameter {q} below transposition distance {p.transposition_distance()}"
        )
    window = set(p.support())
    for x in range(1, k + 1):
        if len(window) >= 2 * q:
            break
        window.add(x)
    return frozenset(window)
