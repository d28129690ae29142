"""
Unit tests for reversible pairs of stabiliser groups.
"""

import pytest
from hypothesis import assume, given, settings, strategies as st

from tools.stabiliser.conjugacy import (
    ConjugatePair,
    NotReversible,
    check_reversible,
    commutation_matrix,
    group_intersection,
    quotient_basis,
    rebased_products,
)
from tools.stabiliser.errors import InvalidGroup, PauliLengthMismatch, RankMismatch, SignConflict
from tools.stabiliser.group import StabiliserGroup
from tools.stabiliser.pauli import PauliOperator, commutes, parse_pauli


def group(*texts):
    return StabiliserGroup.from_strings(*texts)


class TestCheckReversible:
    """Test the reversibility verdict."""

    def test_single_qubit(self):
        """<Z> and <X> share nothing and are conjugate."""
        pair = check_reversible(group("Z"), group("X"))
        assert isinstance(pair, ConjugatePair)
        assert pair.n_m == 1
        assert pair.intersection.rank == 0
        assert [str(p) for p in pair.basis_a] == ["+Z"]
        assert [str(p) for p in pair.basis_b] == ["+X"]
        assert pair.problems() == []

    def test_zz_xx_not_reversible(self):
        """ZZ commutes with XX, so XX witnesses the failure."""
        verdict = check_reversible(group("ZZ"), group("XX"))
        assert isinstance(verdict, NotReversible)
        assert not verdict.reversible
        assert str(verdict.witness) == "+XX"
        assert verdict.witness_side == "b"
        assert verdict.witness_commutation == (0,)

    def test_rebasing(self):
        """<ZI, IZ> against <XX, IX> rebases the B side to (XI, IX)."""
        pair = check_reversible(group("ZI", "IZ"), group("XX", "IX"))
        assert [list(r) for r in pair.commutation_before] == [[1, 0], [1, 1]]
        assert [str(p) for p in pair.basis_b] == ["+XI", "+IX"]
        assert commutation_matrix(pair.basis_a, pair.basis_b).tolist() == [[1, 0], [0, 1]]
        assert pair.problems() == []

    def test_shared_generator(self):
        pair = check_reversible(group("ZZ", "ZI"), group("ZZ", "XX"))
        assert str(pair.intersection) == "<+ZZ>"
        assert [str(p) for p in pair.basis_a] == ["+ZI"]
        assert [str(p) for p in pair.basis_b] == ["+XX"]

    def test_identical_groups(self):
        pair = check_reversible(group("ZZ"), group("ZZ"))
        assert pair.n_m == 0
        assert pair.problems() == []

    def test_rank_mismatch(self):
        with pytest.raises(RankMismatch):
            check_reversible(group("ZI", "IZ"), group("XX"))

    def test_length_mismatch(self):
        with pytest.raises(PauliLengthMismatch):
            check_reversible(group("Z"), group("XX"))

    def test_sign_conflict(self):
        """ZI is in both groups with opposite signs."""
        with pytest.raises(SignConflict):
            check_reversible(group("ZI", "IZ"), group("-ZI", "IX"))

    def test_to_dict(self):
        data = check_reversible(group("Z"), group("X")).to_dict()
        assert data["reversible"] is True
        assert data["basis_a"] == ["+Z"]
        assert data["commutation_after"] == [[1]]
        data = check_reversible(group("ZZ"), group("XX")).to_dict()
        assert data["reversible"] is False
        assert data["witness"] == "+XX"


class TestPairViews:
    """Test signed B groups, reversal and subset products."""

    def test_group_b_for_outcomes(self):
        pair = check_reversible(group("Z"), group("X"))
        assert str(pair.group_b_for([1])) == "<-X>"
        assert pair.group_b_for() == pair.group_b

    def test_reversed(self):
        pair = check_reversible(group("Z"), group("X"))
        back = pair.reversed([1])
        assert str(back.group_a) == "<-X>"
        assert back.group_b == pair.group_a
        assert [str(p) for p in back.basis_a] == ["-X"]
        assert [str(p) for p in back.basis_b] == ["+Z"]
        assert back.problems() == []

    def test_rebased_products(self):
        pair = check_reversible(group("ZI", "IZ"), group("XX", "IX"))
        assert rebased_products(pair, "11") == parse_pauli("XX")
        assert rebased_products(pair, [0, 1]) == parse_pauli("IX")
        assert rebased_products(pair, "00") == PauliOperator.identity(2)
        with pytest.raises(ValueError):
            rebased_products(pair, "1")


class TestIntersection:
    """Test signed intersections and quotient transversals."""

    def test_signed_intersection(self):
        shared = group_intersection(group("-ZZI", "IIX"), group("-ZZI", "IIZ"))
        assert str(shared) == "<-ZZI>"

    def test_opposite_signs(self):
        """(-ZZ)(XX) = +YY, which clashes with the B side."""
        with pytest.raises(SignConflict):
            group_intersection(group("-ZZ", "XX"), group("-YY", "-ZZ"))

    def test_trivial(self):
        assert group_intersection(group("Z"), group("X")).rank == 0

    def test_quotient_basis_order(self):
        """Generators already spanned by the subgroup are skipped."""
        basis = quotient_basis(group("ZZI", "ZII", "IIZ"), group("ZZI"))
        assert [str(p) for p in basis] == ["+ZII", "+IIZ"]

    def test_quotient_requires_subgroup(self):
        with pytest.raises(InvalidGroup):
            quotient_basis(group("ZI"), group("XI"))


class TestRandomPairs:
    """Z-type against X-type groups of equal rank."""

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(1, 31), min_size=1, max_size=4),
           st.lists(st.integers(1, 31), min_size=1, max_size=4))
    def test_verdict_is_consistent(self, z_masks, x_masks):
        a = StabiliserGroup.from_generators([PauliOperator(5, 0, m) for m in z_masks])
        b = StabiliserGroup.from_generators([PauliOperator(5, m, 0) for m in x_masks])
        assume(a.rank == b.rank)
        verdict = check_reversible(a, b)
        if verdict.reversible:
            assert verdict.problems() == []
            for i, ai in enumerate(verdict.basis_a):
                for j, bj in enumerate(verdict.basis_b):
                    assert commutes(ai, bj) == int(i == j)
        else:
            assert not verdict.witness.is_identity
            assert not any(commutes(verdict.witness, ai) for ai in verdict.basis_a)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
