"""
Unit tests for signed stabiliser groups, logical bases and measurement.
"""

import math

import pytest
from hypothesis import given, settings, strategies as st

from tools.stabiliser.errors import InvalidGroup, PauliLengthMismatch, PauliParseError
from tools.stabiliser.group import (
    LogicalBasis,
    StabiliserGroup,
    canonicalise,
    code_distance,
    contains,
    express,
    measure_pauli,
    normaliser_logicals,
)
from tools.stabiliser.outcomes import ForcedOutcomes
from tools.stabiliser.locality import Lattice, Region
from tools.stabiliser.pauli import PauliOperator, Support, parse_pauli

FIVE_QUBIT_CODE = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")


class TestConstruction:
    """Test validation of generator lists."""

    def test_from_generators_drops_dependent(self):
        group = StabiliserGroup.from_strings("ZZI", "IZZ", "ZIZ")
        assert group.rank == 2
        assert group.logical_count == 1

    def test_inconsistent_sign_raises(self):
        """ZZI * IZZ = ZIZ, so -ZIZ would put -I in the group."""
        with pytest.raises(InvalidGroup):
            StabiliserGroup.from_strings("ZZI", "IZZ", "-ZIZ")

    def test_anticommuting_raises(self):
        with pytest.raises(InvalidGroup):
            StabiliserGroup.from_strings("X", "Z")

    def test_non_hermitian_raises(self):
        with pytest.raises(InvalidGroup):
            StabiliserGroup(1, (parse_pauli("iZ"),))

    def test_identity_generator_raises(self):
        with pytest.raises(InvalidGroup):
            StabiliserGroup(2, (parse_pauli("II"),))

    def test_constructor_rejects_dependent(self):
        with pytest.raises(InvalidGroup):
            StabiliserGroup(2, (parse_pauli("ZZ"), parse_pauli("ZZ")))

    def test_length_mismatch(self):
        with pytest.raises(PauliLengthMismatch):
            StabiliserGroup(2, (parse_pauli("Z"),))

    def test_signs_and_sign_bits(self):
        group = StabiliserGroup.from_strings("-ZI", "IZ")
        assert group.signs == [1, 0]
        flipped = group.with_sign_bits([0, 1])
        assert str(flipped) == "<+ZI, -IZ>"
        assert flipped.same_unsigned(group)


class TestMembership:
    """Test contains and express."""

    def test_signed_membership(self):
        group = StabiliserGroup.from_strings("ZZ")
        assert contains(group, parse_pauli("ZZ")).sign == 1
        assert contains(group, parse_pauli("-ZZ")).sign == -1
        assert contains(group, parse_pauli("iZZ")).sign is None
        assert not contains(group, parse_pauli("XX")).member

    def test_product_membership(self):
        group = StabiliserGroup.from_strings("ZZI", "IZZ")
        assert contains(group, parse_pauli("ZIZ")).sign == 1
        assert express(group, parse_pauli("ZIZ")) == [0, 1]
        assert express(group, parse_pauli("XII")) is None

    def test_identity_is_member(self):
        group = StabiliserGroup.from_strings("XX")
        assert contains(group, PauliOperator.identity(2)).sign == 1


class TestCanonicalise:
    """Test reduced row echelon generators."""

    def test_echelon_form(self):
        """<ZZI, IZZ> becomes <ZIZ, IZZ> with pivots z0 and z1."""
        group = canonicalise(StabiliserGroup.from_strings("ZZI", "IZZ"))
        assert [str(g) for g in group.generators] == ["+ZIZ", "+IZZ"]

    def test_generating_sets_agree(self):
        first = canonicalise(StabiliserGroup.from_strings("XXXX", "ZZZZ", "-XXII"))
        second = canonicalise(StabiliserGroup.from_strings("-IIXX", "ZZZZ", "XXXX"))
        assert first == second

    def test_sequence_with_dependent_rows(self):
        group = canonicalise([parse_pauli("ZZ"), parse_pauli("ZZ")])
        assert group.rank == 1

    def test_sequence_with_sign_conflict(self):
        with pytest.raises(InvalidGroup):
            canonicalise([parse_pauli("ZZ"), parse_pauli("-ZZ")])


class TestLogicals:
    """Test normaliser logical bases."""

    def test_single_stabiliser(self):
        logicals = normaliser_logicals(StabiliserGroup.from_strings("ZI"))
        assert [(str(x), str(z)) for x, z in logicals.pairs] == [("+IX", "+IZ")]

    def test_zz(self):
        logicals = normaliser_logicals(StabiliserGroup.from_strings("ZZ"))
        assert [(str(x), str(z)) for x, z in logicals.pairs] == [("+XX", "+ZI")]

    @pytest.mark.parametrize("gens", [("ZZI", "IZZ"), FIVE_QUBIT_CODE, ("XXXX", "ZZZZ"), ("ZII",)])
    def test_basis_is_valid(self, gens):
        group = StabiliserGroup.from_strings(*gens)
        logicals = normaliser_logicals(group)
        assert logicals.k == group.logical_count
        assert logicals.problems(group) == []

    def test_trivial_group(self):
        logicals = normaliser_logicals(StabiliserGroup.trivial(2))
        assert logicals.k == 2

    def test_problems_detect_bad_basis(self):
        group = StabiliserGroup.from_strings("ZI")
        bad = LogicalBasis(((parse_pauli("XI"), parse_pauli("IZ")),))
        assert bad.problems(group)


class TestMeasurement:
    """Test projective Pauli measurement on groups."""

    def test_random_outcome_replaces_pivot(self):
        result = measure_pauli(StabiliserGroup.from_strings("Z"), parse_pauli("X"), ForcedOutcomes([-1]))
        assert str(result.group) == "<-X>"
        assert result.outcome == -1
        assert not result.deterministic

    def test_other_anticommuting_generators_fixed(self):
        group = StabiliserGroup.from_strings("ZI", "IZ")
        result = measure_pauli(group, parse_pauli("XX"), ForcedOutcomes([1]))
        assert str(result.group) == "<+XX, +ZZ>"

    def test_deterministic_outcome(self):
        group = StabiliserGroup.from_strings("-Z")
        result = measure_pauli(group, parse_pauli("Z"), ForcedOutcomes([]))
        assert result.deterministic
        assert result.outcome == -1
        assert result.group == group

    def test_logical_measurement_flagged(self):
        group = StabiliserGroup.from_strings("ZI")
        result = measure_pauli(group, parse_pauli("IZ"), ForcedOutcomes([1]))
        assert result.logical
        assert result.group == group

    def test_logical_measurement_absorbed(self):
        group = StabiliserGroup.from_strings("ZI")
        result = measure_pauli(group, parse_pauli("IZ"), ForcedOutcomes([-1]), absorb=True)
        assert str(result.group) == "<+ZI, -IZ>"

    def test_input_not_mutated(self):
        group = StabiliserGroup.from_strings("Z")
        measure_pauli(group, parse_pauli("X"), ForcedOutcomes([1]))
        assert str(group) == "<+Z>"


class TestCodeDistance:
    """Test brute-force code distance."""

    def test_no_logicals(self):
        assert code_distance(StabiliserGroup.from_strings("ZI", "IZ")) == math.inf

    def test_bare_qubit(self):
        assert code_distance(StabiliserGroup.from_strings("ZI")) == 1

    def test_five_qubit_code(self):
        assert code_distance(StabiliserGroup.from_strings(*FIVE_QUBIT_CODE)) == 3

    def test_weight_cap(self):
        assert code_distance(StabiliserGroup.from_strings(*FIVE_QUBIT_CODE), max_weight=2) is None


class TestSerialisation:
    """Test the group JSON form."""

    def test_round_trip(self):
        group = StabiliserGroup.from_strings("-ZZI", "IZZ")
        data = group.to_dict()
        assert data == {"n": 3, "generators": [{"pauli": "ZZI", "sign": "-"}, {"pauli": "IZZ", "sign": "+"}]}
        assert StabiliserGroup.from_dict(data) == group

    def test_string_generators(self):
        assert StabiliserGroup.from_dict({"n": 1, "generators": ["-X"]}).signs == [1]

    def test_empty_generators(self):
        assert StabiliserGroup.from_dict({"n": 2, "generators": []}).rank == 0

    @pytest.mark.parametrize("data", [{}, {"n": 1, "generators": [{"sign": "+"}]},
                                      {"n": 1, "generators": [{"pauli": "X", "sign": "i"}]}])
    def test_malformed(self, data):
        with pytest.raises(PauliParseError):
            StabiliserGroup.from_dict(data)


class TestRandomGroups:
    """Property checks on groups built from random commuting Z/X strings."""

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(1, 63), min_size=1, max_size=6))
    def test_canonical_form_is_stable(self, masks):
        """Z-type generators always commute; canonicalising twice changes nothing."""
        gens = [PauliOperator(6, 0, m) for m in masks]
        group = StabiliserGroup.from_generators(gens)
        once = canonicalise(group)
        assert canonicalise(once) == once
        assert once.rank == group.rank
        assert all(contains(once, g).sign == 1 for g in group.generators)



def public_callables(cls):
    for name, member in vars(cls).items():
        if name.startswith('_'):
            continue
        if isinstance(member, property):
            yield name, member.fget
        elif isinstance(member, (classmethod, staticmethod)):
            yield name, member.__func__
        elif callable(member):
            yield name, member


class TestDocumentation:
    """Test that the public API of the core value types is documented."""

    @pytest.mark.parametrize("cls", [PauliOperator, Support, StabiliserGroup, LogicalBasis,
                                     Lattice, Region])
    def test_public_methods_have_docstrings(self, cls):
        missing = [name for name, fn in public_callables(cls) if not (fn.__doc__ or '').strip()]
        assert missing == []


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
