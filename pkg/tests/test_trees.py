from fractions import Fraction

import pytest

from schreierlab.families import explicit_family, schreier
from schreierlab.ordinal import Ordinal
from schreierlab.spaces import C0, L1, FsVector, Tsirelson
from schreierlab.trees import (BlockTree, FiniteTree, SearchFailure, TreeError,
                               certify_block_tree, derivative, family_as_tree,
                               index_lower_bound_search, order, tree_to_family)

T12 = Tsirelson(Ordinal.from_int(1), Fraction(1, 2))


class TestFiniteTree:
    def test_prefix_closure_enforced(self):
        with pytest.raises(TreeError):
            FiniteTree(frozenset({(1, 2)}))
        FiniteTree(frozenset({(1,), (1, 2)}))

    def test_chain_derivative_order(self):
        c = FiniteTree.chain([1, 2, 3])
        assert order(c) == 3
        assert order(derivative(c)) == 2
        assert order(FiniteTree()) == 0
        c5 = FiniteTree.chain("abcde")
        assert order(c5) == 5

    def test_full_binary_depth_two(self):
        t = FiniteTree.from_sequences([(a, b) for a in (0, 1) for b in (0, 1)])
        d = derivative(t)
        assert d.nodes == frozenset({(0,), (1,)})
        assert order(t) == 2

    def test_order_drops_by_one(self):
        t = family_as_tree(schreier(2), 7)
        while not t.is_empty():
            assert order(derivative(t)) == order(t) - 1
            t = derivative(t)


class TestFamilyAsTree:
    def test_s0(self):
        t = family_as_tree(schreier(0), 4)
        assert t.nodes == frozenset({(1,), (2,), (3,), (4,)})
        assert order(t) == 1

    def test_s1_small_universe(self):
        t = family_as_tree(schreier(1), 2)
        assert t.nodes == frozenset({(1,), (2,)})
        assert order(t) == 1

    def test_empty_family(self):
        fam = explicit_family([()], close=False)
        assert family_as_tree(fam, 4).is_empty()

    def test_order_monotone(self):
        o1 = order(family_as_tree(schreier(1), 8))
        o2 = order(family_as_tree(schreier(2), 8))
        assert o1 < o2
        assert order(family_as_tree(schreier(1), 6)) <= o1


class TestCertification:
    def test_basis_branches_in_tsirelson(self):
        branches = [tuple(FsVector.basis(m) for m in F)
                    for F in [(2, 3), (3, 4, 5)]]
        bt = BlockTree.from_branches(branches, "l1", Fraction(2))
        cert = certify_block_tree(bt, T12)
        assert cert.ok
        assert dict((tuple(x.support[0] for x in br), v)
                    for br, v in cert.branch_values) == {
                        (2, 3): Fraction(1), (3, 4, 5): Fraction(3, 2)}

    def test_single_node_always_one_equivalent(self):
        bt = BlockTree.from_branches([(FsVector.basis(5),)], "l1", Fraction(1))
        assert certify_block_tree(bt, L1()).ok

    def test_c0_obstructs_l1(self):
        bt = BlockTree.from_branches(
            [(FsVector.basis(1), FsVector.basis(2))], "l1", Fraction(3, 2))
        v = certify_block_tree(bt, C0())
        assert not v.ok
        assert v.reason == "l1 lower estimate fails"
        assert v.coefficients == (1, 1) and v.value == 1

    def test_l1_obstructs_c0(self):
        bt = BlockTree.from_branches(
            [tuple(FsVector.basis(m) for m in (4, 5, 6, 7))],
            "c0", Fraction(3, 2))
        v = certify_block_tree(bt, T12)
        assert not v.ok and v.reason == "c0 upper estimate fails"
        assert v.value == 2

    def test_not_normalized(self):
        bt = BlockTree.from_branches([(FsVector.basis(1).scale(2),)],
                                     "l1", Fraction(1))
        assert certify_block_tree(bt, C0()).reason == "label not normalized"

    def test_supports_must_increase(self):
        bt = BlockTree.from_branches(
            [(FsVector.basis(3), FsVector.basis(2))], "l1", Fraction(2))
        v = certify_block_tree(bt, L1())
        assert v.reason == "supports not strictly increasing"


class TestTreeToFamily:
    def test_single_cap(self):
        bt = BlockTree.from_branches([(FsVector.basis(3),)], "l1", Fraction(1))
        fam = tree_to_family(bt, 5)
        assert sorted(fam.enumerate(5)) == [(), (3,), (4,), (5,)]

    def test_empty_tree(self):
        bt = BlockTree(FiniteTree(), "l1", Fraction(1))
        fam = tree_to_family(bt, 4)
        assert sorted(fam.enumerate(4)) == [()]

    def test_two_level_caps_by_brute_force(self):
        x1 = FsVector.basis(2)
        x2 = FsVector.indicator([3, 4])
        bt = BlockTree.from_branches([(x1, x2)], "l1", Fraction(2))
        fam = tree_to_family(bt, 6)
        got = set(fam.enumerate(6))
        assert (2, 4) in got and (3, 5) in got
        # brute-force tuple scan, then hereditary + spreading closure
        direct = set()
        for m1 in range(2, 7):
            direct.add((m1,))
            for m2 in range(max(4, m1 + 1), 7):
                direct.add((m1, m2))
        want = {(), }
        for F in direct:
            for r in range(len(F) + 1):
                import itertools
                want.update(itertools.combinations(F, r))
        assert got == want

    def test_output_regular_within_universe(self):
        bt = BlockTree.from_branches(
            [(FsVector.basis(2), FsVector.basis(4))], "l1", Fraction(2))
        rep = tree_to_family(bt, 6).check_regular(6)
        assert rep.hereditary and rep.spreading


class TestSearch:
    def test_basis_vectors_succeed(self):
        res = index_lower_bound_search(T12, schreier(1), 2, 6)
        assert not isinstance(res, SearchFailure)
        bt, cert = res
        assert cert.ok and bt.mode == "l1"
        assert order(bt.tree) == 3  # longest maximal member within 6

    def test_c0_failure_with_stats(self):
        res = index_lower_bound_search(C0(), schreier(1), Fraction(3, 2), 5)
        assert isinstance(res, SearchFailure)
        assert res.stats["strategies"]
        assert res.stats["branches"] > 0

    def test_empty_family_trivial_success(self):
        fam = explicit_family([()], close=False)
        bt, cert = index_lower_bound_search(T12, fam, 2, 5)
        assert cert.ok and bt.tree.is_empty()
