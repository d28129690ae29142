"""
Unit tests for the built-in sequence catalog and the honeycomb layout.
"""

import itertools

import pytest

from tools.floquet.catalog import (
    CATALOG,
    CatalogEntry,
    build,
    get_entry,
    honeycomb,
    honeycomb_isg,
    honeycomb_layout,
    single_qubit_zx,
)
from tools.floquet.sequence import period_action, sweep_period_actions, validate
from tools.stabiliser.locality import ErrorClass, classify_error
from tools.stabiliser.outcomes import ForcedOutcomes, exhaustive_streams
from tools.stabiliser.pauli import commutes, parse_pauli


class TestSmallEntries:
    """Test the hand-written catalog sequences."""

    @pytest.mark.parametrize("name", ["single_qubit_zx", "two_qubit_logical", "double_zx",
                                      "three_qubit_logical"])
    def test_entry_validates(self, name):
        report = validate(build(name))
        assert report.valid, report.problems
        assert report.periodic

    def test_double_zx_measures_two_per_step(self):
        seq = build("double_zx")
        assert [p.n_m for p in seq.pairs] == [2, 2]
        assert [str(b) for b in seq.pairs[0].basis_b] == ["+XI", "+IX"]

    def test_two_qubit_error_taxonomy(self):
        """With no shared stabilisers, only errors on the measured qubit are corrected."""
        pair = build("two_qubit_logical").pairs[0]
        classes = {}
        for letters in itertools.product("IXYZ", repeat=2):
            if letters == ("I", "I"):
                continue
            text = "".join(letters)
            classes[text] = classify_error(pair, parse_pauli(text))
        corrected = sorted(t for t, c in classes.items() if c is ErrorClass.SELF_CORRECTING)
        assert corrected == ["XI", "YI", "ZI"]
        assert sum(c is ErrorClass.UNDETECTABLE_LOGICAL for c in classes.values()) == 12
        assert ErrorClass.DETECTABLE not in classes.values()

    def test_three_qubit_keeps_logical(self):
        seq = build("three_qubit_logical")
        assert seq.isgs[0].logical_count == 1
        action = period_action(seq, ForcedOutcomes([1, -1, -1, 1]))
        assert action.is_identity


class TestCatalogLookup:
    """Test entry lookup and parameter handling."""

    def test_unknown_entry(self):
        with pytest.raises(KeyError):
            get_entry("toric")

    def test_unknown_parameter(self):
        with pytest.raises(ValueError):
            build("single_qubit_zx", lx=3)

    def test_entry_to_dict(self):
        assert get_entry("honeycomb").to_dict() == {
            "name": "honeycomb",
            "description": "honeycomb code on a brick-wall torus (lx a multiple of 3, ly even)",
            "parameters": {"lx": 3, "ly": 2},
        }

    def test_every_entry_listed(self):
        assert sorted(CATALOG) == ["double_zx", "honeycomb", "single_qubit_zx",
                                   "three_qubit_logical", "two_qubit_logical"]
        assert all(isinstance(e, CatalogEntry) for e in CATALOG.values())

    def test_builder_names_sequence(self):
        assert single_qubit_zx().name == "single_qubit_zx"


class TestHoneycombLayout:
    """Test the brick-wall honeycomb construction."""

    @pytest.fixture
    def layout(self):
        return honeycomb_layout(3, 2)

    def test_counts(self, layout):
        assert layout.n == 12
        assert len(layout.edges) == 18
        assert len(layout.plaquettes) == 6
        assert [len(layout.edges_of_colour(c)) for c in range(3)] == [6, 6, 6]

    def test_plaquettes_commute_with_checks(self, layout):
        edges = [layout.edge_operator(i) for i in range(len(layout.edges))]
        for p in range(len(layout.plaquettes)):
            plaquette = layout.plaquette_operator(p)
            assert plaquette.is_hermitian
            assert not any(commutes(plaquette, e) for e in edges)

    def test_checks_of_one_colour_commute(self, layout):
        for colour in range(3):
            ops = [layout.edge_operator(i) for i in layout.edges_of_colour(colour)]
            assert not any(commutes(a, b) for a in ops for b in ops)

    def test_isg_ranks_agree(self, layout):
        ranks = {honeycomb_isg(layout, c).rank for c in range(3)}
        assert len(ranks) == 1

    @pytest.mark.parametrize("lx,ly", [(2, 2), (4, 2), (3, 3), (3, 0)])
    def test_bad_sizes(self, lx, ly):
        with pytest.raises(ValueError):
            honeycomb_layout(lx, ly)

    def test_qubit_index_wraps(self, layout):
        assert layout.qubit(6, 0) == layout.qubit(0, 0)
        assert layout.qubit(0, 2) == 0


class TestHoneycombSequence:
    """Test the three-round honeycomb period."""

    def test_validates(self):
        seq = honeycomb()
        report = validate(seq)
        assert report.valid, report.problems
        assert report.periodic
        assert seq.tau == 4
        assert [p.n_m for p in seq.pairs] == [4, 4, 4]
        assert seq.outcomes_per_period == 12

    def test_single_period_is_symplectic(self):
        action = period_action(honeycomb(), ForcedOutcomes([1] * 12))
        assert action.is_symplectic

    @pytest.mark.slow
    def test_sweep_is_consistent(self):
        seq = honeycomb()
        report = sweep_period_actions(seq, exhaustive_streams(seq.outcomes_per_period), threads=4)
        assert report.streams == 4096
        assert report.consistent


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
