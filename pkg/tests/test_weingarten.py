"""Weingarten table: exact values, series, and magnitude envelopes.

Oracle used here: the full k! x k! Gram matrix G[p, q] = n^{#cycles(p q^-1)}
inverted over exact rationals with sympy.  Its identity row is the Weingarten
function, independent of the class-function linear system in the package.
"""

import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ringmoments.permutations import Permutation, all_permutations
from ringmoments.weingarten import (
    MAX_DEGREE,
    class_representative,
    integer_partitions,
    wg_alt_bounds,
    wg_bound,
    wg_class_table,
    wg_exact,
    wg_series,
)


def gram_inverse_row(k: int, n: int) -> dict[tuple[int, ...], Fraction]:
    """Weingarten values by brute inversion of the moment Gram matrix."""
    perms = list(all_permutations(k))
    index = {p: a for a, p in enumerate(perms)}
    g = sympy.zeros(len(perms), len(perms))
    for a, p in enumerate(perms):
        for b, q in enumerate(perms):
            g[a, b] = sympy.Integer(n) ** (p * q.inverse()).num_cycles()
    inv = g.inv()
    ident = index[Permutation.identity(k)]
    out = {}
    for b, q in enumerate(perms):
        numer, denom = sympy.fraction(sympy.nsimplify(inv[ident, b]))
        val = Fraction(int(numer), int(denom))
        out.setdefault(q.cycle_type(), val)
        assert out[q.cycle_type()] == val, "inverse row not a class function"
    return out


class TestExactTable:
    @pytest.mark.parametrize("k,n", [(1, 1), (1, 4), (2, 2), (2, 5), (3, 3), (3, 6), (4, 4), (4, 7)])
    def test_matches_gram_inversion(self, k, n):
        oracle = gram_inverse_row(k, n)
        table = wg_class_table(k, n)
        assert table == oracle

    def test_degree_one(self):
        for n in range(1, 8):
            assert wg_exact(1, n, Permutation.identity(1)) == Fraction(1, n)

    def test_degree_two_closed_forms(self):
        for n in range(2, 9):
            assert wg_exact(2, n, Permutation.identity(2)) == Fraction(1, n * n - 1)
            assert wg_exact(2, n, Permutation.transposition(2, 1, 2)) == Fraction(
                -1, n * (n * n - 1)
            )

    def test_degree_three_closed_forms(self):
        for n in (3, 4, 5, 9):
            d = n * (n * n - 1) * (n * n - 4)
            assert wg_exact(3, n, Permutation.identity(3)) == Fraction(n * n - 2, d)
            assert wg_exact(3, n, Permutation.transposition(3, 1, 2)) == Fraction(
                -1, (n * n - 1) * (n * n - 4)
            )
            assert wg_exact(3, n, Permutation.full_cycle(3)) == Fraction(2, d)

    def test_class_function(self):
        for p in all_permutations(4):
            assert wg_exact(4, 5, p) == wg_exact(4, 5, class_representative(p.cycle_type(), 4))

    def test_orthogonality_relations(self):
        # sum over tau of n^{#cycles(tau^-1 pi)} Wg(tau) = [pi == id]
        for k in (2, 3, 4):
            for n in (k, k + 2, 11):
                taus = list(all_permutations(k))
                for lam in integer_partitions(k):
                    pi = class_representative(lam, k)
                    total = sum(
                        Fraction(n) ** (tau.inverse() * pi).num_cycles() * wg_exact(k, n, tau)
                        for tau in taus
                    )
                    assert total == (1 if pi == Permutation.identity(k) else 0)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            wg_class_table(0, 5)
        with pytest.raises(ValueError):
            wg_class_table(MAX_DEGREE + 1, 50)
        with pytest.raises(ValueError):
            wg_class_table(3, 2)  # n below degree: Gram system singular

    def test_high_degree_smoke(self):
        # k = 6 solves a 11-class system; spot the sign pattern (-1)^{distance}
        table = wg_class_table(6, 9)
        for lam, value in table.items():
            distance = 6 - len(lam)
            assert (value > 0) == (distance % 2 == 0)


class TestPartitions:
    def test_partition_counts(self):
        counts = {1: 1, 2: 2, 3: 3, 4: 5, 5: 7, 6: 11, 7: 15, 8: 22}
        for k, expect in counts.items():
            parts = list(integer_partitions(k))
            assert len(parts) == expect
            assert len(set(parts)) == expect
            for lam in parts:
                assert sum(lam) == k
                assert all(lam[a] >= lam[a + 1] for a in range(len(lam) - 1))

    def test_class_representative_type(self):
        for k in range(1, 7):
            for lam in integer_partitions(k):
                assert class_representative(lam, k).cycle_type() == lam


class TestSeries:
    def test_partial_sum_swap_example(self):
        val = wg_series(2, 10, Permutation.transposition(2, 1, 2), r_max=3)
        assert val.series_partial == Fraction(-101, 100000)
        assert val.exact == Fraction(-1, 990)
        assert val.tail_bound == Fraction(1, 100000)
        assert abs(val.exact - val.series_partial) <= val.tail_bound

    def test_partial_sum_identity_example(self):
        val = wg_series(2, 10, Permutation.identity(2), r_max=4)
        assert val.series_partial == Fraction(10101, 1000000)
        assert val.exact == Fraction(1, 99)

    def test_degree_one_is_exact_at_zero(self):
        val = wg_series(1, 7, Permutation.identity(1), r_max=0)
        assert val.series_partial == val.exact == Fraction(1, 7)
        assert val.tail_bound == 0

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_tail_bound_covers_truncation(self, k):
        for n in (2 * k * k, 2 * k * k + 5):
            for lam in integer_partitions(k):
                pi = class_representative(lam, k)
                for r_max in (k * k, k * k + 4):
                    val = wg_series(k, n, pi, r_max=r_max)
                    assert val.exact is not None
                    assert abs(val.exact - val.series_partial) <= val.tail_bound, (
                        f"k={k} n={n} type={lam} r_max={r_max}"
                    )

    def test_divergent_regime_marks_tail_infinite(self):
        # k^2 = 9 >= 2n = 8: partial sum still defined, tail marker None
        val = wg_series(3, 4, Permutation.identity(3))
        assert val.tail_bound is None
        assert val.series_partial is not None

    def test_truncation_error_decreases_beyond_k_squared(self):
        for k in (2, 3, 4):
            n = max(k * k, (k * k) // 2 + 1)
            if k * k >= 2 * n:
                n = k * k
            for lam in integer_partitions(k):
                pi = class_representative(lam, k)
                exact = wg_exact(k, n, pi)
                errors = [
                    abs(exact - wg_series(k, n, pi, r_max=r).series_partial)
                    for r in range(k * k, k * k + 6)
                ]
                assert all(errors[a] >= errors[a + 1] for a in range(len(errors) - 1))


class TestMagnitudeBound:
    def test_frozen_degree_two_values(self):
        b_id = wg_bound(2, 10, Permutation.identity(2))
        b_swap = wg_bound(2, 10, Permutation.transposition(2, 1, 2))
        assert b_id.value == Fraction(49, 4800)
        assert b_swap.value == Fraction(1, 800)

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_bound_dominates_exact(self, k):
        for n in range(max(k, (k * k) // 2 + 1), 26):
            if k * k >= 2 * n:
                continue
            for lam in integer_partitions(k):
                pi = class_representative(lam, k)
                assert abs(wg_exact(k, n, pi)) <= wg_bound(k, n, pi).value

    def test_bound_requires_margin(self):
        with pytest.raises(ValueError):
            wg_bound(4, 8, Permutation.identity(4))  # k^2 = 16 >= 2n = 16

    def test_identity_and_offdiagonal_scales(self):
        # identity bound ~ n^-k, distance-d bound ~ n^-(k+d)
        b0 = wg_bound(3, 50, Permutation.identity(3))
        b1 = wg_bound(3, 50, Permutation.transposition(3, 1, 2))
        b2 = wg_bound(3, 50, Permutation.full_cycle(3))
        assert b0.value > b1.value > b2.value


class TestAltBounds:
    def test_power_bound_applicability(self):
        # k^j = 4 > n = 3: inapplicable
        alt = wg_alt_bounds(2, 3, Permutation.transposition(2, 1, 2), j=2)
        assert alt.power_bound is None
        assert wg_alt_bounds(2, 4, Permutation.transposition(2, 1, 2), j=2).power_bound is not None

    def test_power_bound_values(self):
        # K_j defaults to 1 (the source leaves the constant unspecified), so
        # only the functional form is checked, never domination of the exact value
        pi = Permutation.transposition(2, 1, 2)
        alt = wg_alt_bounds(2, 16, pi, j=2)
        # exponent k + d(1 - 2/j) = 2 + 0 with j=2
        assert alt.power_bound == pytest.approx(16.0 ** -2)
        alt3 = wg_alt_bounds(2, 16, pi, j=3)
        assert alt3.power_bound == pytest.approx(16.0 ** -(2 + 1.0 / 3.0))

    def test_power_bound_scales_with_constant(self):
        pi = Permutation.transposition(2, 1, 2)
        base = wg_alt_bounds(2, 16, pi, j=2)
        doubled = wg_alt_bounds(2, 16, pi, j=2, kj_constant=2.0)
        assert doubled.power_bound == pytest.approx(2 * base.power_bound)

    def test_catalan_bound(self):
        pi = Permutation.identity(2)
        alt = wg_alt_bounds(2, 16, pi, j=2)
        # 3*C_1/2 = 3/2 at distance 0: 1.5 * n^-2; requires k^(3/2) <= n
        assert alt.catalan_bound == pytest.approx(1.5 * 16.0 ** -2)
        assert wg_alt_bounds(5, 11, Permutation.identity(5), j=2).catalan_bound is None

    def test_catalan_bound_dominates_exact_when_applicable(self):
        for k in (2, 3):
            for n in (k ** 2, k ** 2 + 5):
                for lam in integer_partitions(k):
                    pi = class_representative(lam, k)
                    alt = wg_alt_bounds(k, n, pi, j=3)
                    if alt.catalan_bound is not None:
                        val = abs(float(wg_exact(k, n, pi)))
                        assert val <= alt.catalan_bound * (1 + 1e-12)


class TestProperties:
    @settings(max_examples=25, deadline=None)
    @given(
        st.integers(min_value=1, max_value=5),
        st.integers(min_value=0, max_value=8),
    )
    def test_inversion_invariance(self, k, salt):
        perms = list(all_permutations(k))
        pi = perms[salt % len(perms)]
        n = k + 3
        assert wg_exact(k, n, pi) == wg_exact(k, n, pi.inverse())

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=2, max_value=5))
    def test_identity_dominates_class_values(self, k):
        n = 2 * k * k
        table = wg_class_table(k, n)
        top = table[tuple([1] * k)]
        assert all(abs(v) <= top for v in table.values())
