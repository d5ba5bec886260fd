import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_s1, successive_partitions, tsirelson_table_01
from schreierlab.ordinal import Ordinal
from schreierlab.spaces import (C0, L1, Bounds, Derived, FsVector,
                                MixedTsirelson, Schlumprecht, SpaceError,
                                Tsirelson, assoc_norm, dual_assoc_norm,
                                dual_norm, norm, norm_n, parse_space,
                                primal_from_dual, space_mode)

T12 = Tsirelson(Ordinal.from_int(1), Fraction(1, 2))


def small_vectors():
    entry = st.tuples(st.integers(1, 9),
                      st.fractions(min_value=-3, max_value=3, max_denominator=4))
    return st.lists(entry, max_size=5).map(
        lambda pairs: FsVector.from_pairs(dict(pairs).items()))


class TestFsVector:
    def test_validation(self):
        with pytest.raises(SpaceError):
            FsVector(((2, Fraction(1)), (1, Fraction(1))))
        with pytest.raises(SpaceError):
            FsVector(((1, Fraction(0)),))
        with pytest.raises(SpaceError):
            FsVector(((0, Fraction(1)),))

    def test_from_pairs_drops_zeros(self):
        x = FsVector.from_pairs([(3, 0), (1, "1/2")])
        assert x.entries == ((1, Fraction(1, 2)),)

    def test_algebra(self):
        x = FsVector.basis(1) + FsVector.basis(2).scale(Fraction(1, 2))
        y = x - FsVector.basis(1)
        assert y.entries == ((2, Fraction(1, 2)),)
        assert (x + y.scale(-1))[2] == 0

    def test_restrict_and_pair(self):
        x = FsVector.indicator([1, 2, 5])
        assert x.restrict((2, 5)).support == (2, 5)
        assert x.restrict([1, 5]).support == (1, 5)
        assert x.pair(FsVector.basis(5)) == 1
        assert x.interval_support() == (1, 5)

    @given(small_vectors(), small_vectors())
    def test_pair_symmetric(self, x, y):
        assert x.pair(y) == y.pair(x)


class TestDescriptorParsing:
    @pytest.mark.parametrize("text", [
        "C0", "L1", "SCHL", "T(S(1),1/2)", "T(S(w+1),2/3)",
        "MT[(S(1),1/2),(S(2),1/4)]", "NN(T(S(1),1/2),3)",
        "ASSOC(C0,S(2),adm)", "ASSOC(T(S(1),1/2),S(1),allow)",
    ])
    def test_round_trip(self, text):
        sp = parse_space(text)
        assert parse_space(str(sp)) == sp

    @pytest.mark.parametrize("bad", ["", "T(S(1))", "T(S(1),2)", "X9",
                                     "ASSOC(C0,S(1),weird)", "C0junk"])
    def test_rejects(self, bad):
        with pytest.raises(SpaceError):
            parse_space(bad)

    def test_modes(self):
        assert space_mode(parse_space("SCHL")) == "float"
        assert space_mode(parse_space("NN(SCHL,2)")) == "float"
        assert space_mode(parse_space("T(S(1),1/2)")) == "exact"


class TestBaseNorms:
    def test_c0_l1(self):
        x = FsVector.from_pairs([(1, "1/2"), (4, "-2")])
        assert norm(C0(), x) == 2
        assert norm(L1(), x) == Fraction(5, 2)
        assert norm(C0(), FsVector()) == 0


class TestTsirelsonNorm:
    def test_hand_values(self):
        assert norm(T12, FsVector.basis(1)) == 1
        assert norm(T12, FsVector.basis(1) + FsVector.basis(2)) == 1
        assert norm(T12, FsVector.indicator([2, 3])) == 1
        assert norm(T12, FsVector.average([4, 5, 6, 7])) == Fraction(1, 2)
        assert norm(T12, FsVector.indicator([3, 4, 5, 6, 9])) == 2
        assert norm(T12, FsVector.indicator([2, 3, 4, 5])) == Fraction(3, 2)

    def test_against_fixed_point_table(self):
        table = tsirelson_table_01(6)
        for S, want in table.items():
            assert norm(T12, FsVector.indicator(S)) == want, S

    @given(small_vectors())
    def test_norm_axioms(self, x):
        v = norm(T12, x)
        assert v >= (max(abs(c) for c in x.values) if x.entries else 0)
        assert v <= sum(abs(c) for c in x.values)  # dominated by l1
        assert norm(T12, x.scale(-2)) == 2 * v
        flipped = FsVector(tuple((i, -c if i % 2 else c)
                                 for i, c in x.entries))
        assert norm(T12, flipped) == v  # 1-unconditional

    @given(small_vectors(), small_vectors())
    def test_triangle(self, x, y):
        assert norm(T12, x + y) <= norm(T12, x) + norm(T12, y)

    @given(small_vectors())
    def test_bimonotone(self, x):
        if not x.entries:
            return
        lo, hi = x.interval_support()
        for cut in range(lo, hi + 1):
            assert norm(T12, x.restrict((lo, cut))) <= norm(T12, x)
            assert norm(T12, x.restrict((cut, hi))) <= norm(T12, x)


class TestHigherAndMixed:
    def test_s2_space_sees_deeper_splits(self):
        T2 = Tsirelson(Ordinal.from_int(2), Fraction(1, 2))
        x = FsVector.indicator([2, 3, 4, 5])
        assert norm(T2, x) == 2  # {2,3},{4,5} blocks make it admissible
        assert norm(T12, x) == Fraction(3, 2)

    def test_mixed_is_max_over_levels(self):
        M = MixedTsirelson(((Ordinal.from_int(1), Fraction(1, 2)),
                            (Ordinal.from_int(2), Fraction(1, 4))))
        x = FsVector.indicator(range(3, 10))
        v = norm(M, x)
        assert v >= norm(T12, x)
        assert v == Fraction(5, 2)

    def test_schlumprecht_two_elements(self):
        S = Schlumprecht()
        v = norm(S, FsVector.indicator([1, 2]))
        assert v == pytest.approx(2 / math.log2(3))
        w = norm(S, FsVector.indicator([1, 2, 3, 4]))
        assert w >= 4 / math.log2(5) - 1e-12


class TestDerivedNorms:
    def test_norm_n_values(self):
        x = FsVector.average([4, 5, 6, 7])
        assert norm_n(T12, 1, x) == Fraction(1, 2)
        assert norm_n(T12, 2, x) == Fraction(5, 8)
        assert norm_n(T12, 4, x) == 1
        assert norm(Derived(T12, ("nn", 2)), x) == Fraction(5, 8)

    def test_norm_n_monotone_in_n(self):
        x = FsVector.from_pairs([(2, 1), (3, "-1/2"), (5, "3/4"), (6, 1)])
        vals = [norm_n(T12, n, x) for n in range(1, 6)]
        assert vals == sorted(vals)
        assert vals[0] == norm(T12, x)

    def test_assoc_vs_brute_force(self):
        # oracle: sup over all admissible families of successive subsets
        x = FsVector.from_pairs([(2, 1), (3, "1/2"), (4, "-1"), (6, "1/3")])
        best = norm(T12, x)
        for pieces in successive_partitions(x.support):
            if not brute_s1(tuple(p[0] for p in pieces)):
                continue
            v = sum(norm(T12, x.restrict(p)) for p in pieces)
            best = max(best, v)
        assert assoc_norm(T12, 1, x) == best

    def test_assoc_of_uniform_average(self):
        x = FsVector.average([4, 5, 6, 7])
        assert assoc_norm(T12, 1, x) == 1
        assert assoc_norm(T12, 1, x, "allowable") == 1
        assert norm(Derived(T12, ("assoc", Ordinal.from_int(1),
                                  "admissible")), x) == 1

    def test_assoc_eta_zero_degenerates(self):
        x = FsVector.from_pairs([(2, 1), (5, "-1/2")])
        assert assoc_norm(T12, 0, x) == norm(T12, x)

    def test_allowable_guard(self):
        x = FsVector.indicator(range(1, 22))
        with pytest.raises(SpaceError):
            assoc_norm(T12, 1, x, "allowable")


class TestDuals:
    def test_exact_base_duals(self):
        phi = FsVector.from_pairs([(2, 1), (3, "-1/2")])
        b = dual_norm(C0(), phi)
        assert b.exact and b.lower == Fraction(3, 2)
        b = dual_norm(L1(), phi)
        assert b.exact and b.lower == 1

    def test_implicit_dual_bounds_contract(self):
        phi = FsVector.indicator([2, 3, 4])
        b = dual_norm(T12, phi)
        assert b.lower <= b.upper
        assert b.lower == 3  # witness e_2+e_3+e_4 has norm 1

    def test_dual_assoc_additive_for_c0(self):
        phi = FsVector.from_pairs([(1, "1/4"), (2, "1/4"), (5, "1/2")])
        b = dual_assoc_norm(C0(), phi, n=2)
        assert b.exact and b.lower == 1  # l1 mass is partition-invariant
        b = dual_assoc_norm(C0(), phi, alpha=1)
        assert b.exact and b.lower == 1

    def test_primal_from_dual_sandwich(self):
        x = FsVector.indicator([2, 3, 4])
        b = primal_from_dual(C0(), x, alpha=1)
        assert b.exact and b.lower == 1
        b2 = primal_from_dual(T12, x, n=2)
        assert b2.lower <= b2.upper
        assert b2.upper <= norm(T12, x)

    def test_bounds_arithmetic(self):
        a = Bounds(Fraction(1), Fraction(2))
        b = Bounds(Fraction(3), Fraction(3))
        assert (a + b).lower == 4 and (a + b).upper == 5
        assert b.exact and not a.exact
