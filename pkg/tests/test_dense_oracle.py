"""
Unit tests for the dense statevector and operator oracle.
"""

from functools import reduce
from unittest.mock import patch

import numpy as np
import pytest

from tools.floquet.catalog import double_zx, three_qubit_logical, two_qubit_logical
from tools.floquet.dense import (
    DenseOperator,
    DenseState,
    all_outcomes,
    apply_pauli,
    embed_local_operator,
    in_codespace,
    logical_expectation_check,
    measure_state,
    operator_norm,
    pauli_matrix,
    period_unitary,
    projector,
    random_codespace_state,
    transition_K,
    transition_V,
    uniform_probability_check,
    verify_pair_identities,
    verify_period_action,
    verify_transition_operators,
)
from tools.floquet.sequence import FloquetSequence, initial_state, step
from tools.stabiliser.conjugacy import check_reversible
from tools.stabiliser.errors import (
    DimensionLimitExceeded,
    NonPeriodicSequence,
    NonUnitaryOperator,
    NotCodePreserving,
    NotInNormaliser,
    PauliLengthMismatch,
    SignConflict,
    StateNotInCodespace,
)
from tools.stabiliser.group import StabiliserGroup, measure_pauli, normaliser_logicals
from tools.stabiliser.outcomes import ForcedOutcomes, SeededOutcomes, exhaustive_streams
from tools.stabiliser.pauli import PauliOperator, commutes, parse_pauli

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def kron(*mats):
    return reduce(np.kron, mats)


def pair_of(a, b):
    return check_reversible(StabiliserGroup.from_strings(*a), StabiliserGroup.from_strings(*b))


class TestPauliMatrices:
    """Test the permutation-and-phase Pauli representation."""

    def test_single_qubit(self):
        np.testing.assert_allclose(pauli_matrix(parse_pauli("X")), X)
        np.testing.assert_allclose(pauli_matrix(parse_pauli("Y")), Y)
        np.testing.assert_allclose(pauli_matrix(parse_pauli("-iZ")), -1j * Z)

    def test_qubit_zero_is_most_significant(self):
        np.testing.assert_allclose(pauli_matrix(parse_pauli("XZI")), kron(X, Z, I2))
        np.testing.assert_allclose(pauli_matrix(parse_pauli("IYX")), kron(I2, Y, X))

    def test_apply_matches_matrix(self):
        rng = np.random.default_rng(1)
        p = parse_pauli("-YXZ")
        vec = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        mat = rng.standard_normal((8, 3))
        np.testing.assert_allclose(apply_pauli(p, vec), pauli_matrix(p) @ vec)
        np.testing.assert_allclose(apply_pauli(p, mat), pauli_matrix(p) @ mat)

    def test_dense_limit(self):
        with patch("tools.floquet.dense.MAX_DENSE_QUBITS", 1):
            with pytest.raises(DimensionLimitExceeded):
                pauli_matrix(parse_pauli("XX"))


class TestDenseValues:
    """Test operator and state wrappers."""

    def test_operator_validation(self):
        with pytest.raises(ValueError):
            DenseOperator(np.eye(3))
        with pytest.raises(ValueError):
            DenseOperator(np.ones((2, 4)))
        with pytest.raises(ValueError):
            DenseOperator(np.array([[np.nan, 0], [0, 1]]))

    def test_operator_is_read_only(self):
        op = DenseOperator(np.eye(2))
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 2

    def test_operator_properties(self):
        op = DenseOperator(H)
        assert op.n == 1
        assert op.is_unitary()
        assert op.is_hermitian()
        np.testing.assert_allclose((op @ op.dagger()).matrix, I2, atol=1e-12)
        assert DenseOperator.from_dict(op.to_dict()).distance(op) == pytest.approx(0.0)

    def test_state_validation(self):
        with pytest.raises(ValueError):
            DenseState(np.array([1.0, 1.0]))
        state = DenseState.normalised(np.array([1.0, 1.0]))
        assert state.expectation(parse_pauli("X")) == pytest.approx(1.0)
        assert DenseState.basis(2, 3).expectation(parse_pauli("ZZ")) == pytest.approx(1.0)

    def test_operator_norm(self):
        assert operator_norm(np.diag([3.0, 1.0])) == pytest.approx(3.0)
        assert operator_norm(np.zeros((2, 2))) == 0.0
        assert operator_norm(X - Z) == pytest.approx(np.sqrt(2))

    def test_measure_state(self):
        state, prob = measure_state(DenseState.basis(1, 0), parse_pauli("X"), -1)
        assert prob == pytest.approx(0.5)
        np.testing.assert_allclose(state.vector, [1 / np.sqrt(2), -1 / np.sqrt(2)])
        with pytest.raises(ValueError):
            measure_state(DenseState.basis(1, 0), parse_pauli("Z"), -1)


class TestProjectors:
    """Test code-space projectors."""

    def test_single_qubit(self):
        np.testing.assert_allclose(projector(StabiliserGroup.from_strings("Z")).matrix, np.diag([1, 0]))
        np.testing.assert_allclose(projector(StabiliserGroup.from_strings("Z"), [1]).matrix, np.diag([0, 1]))
        np.testing.assert_allclose(projector(StabiliserGroup.from_strings("-Z")).matrix, np.diag([0, 1]))

    def test_zz(self):
        mat = projector(StabiliserGroup.from_strings("ZZ")).matrix
        np.testing.assert_allclose(mat, (np.eye(4) + kron(Z, Z)) / 2)

    def test_outcome_length(self):
        with pytest.raises(ValueError):
            projector(StabiliserGroup.from_strings("ZZ"), [0, 1])

    def test_outcome_order(self):
        assert all_outcomes(2) == [(0, 0), (1, 0), (0, 1), (1, 1)]

    def test_random_codespace_state(self):
        group = StabiliserGroup.from_strings("XXXX", "ZZZZ")
        state = random_codespace_state(group, np.random.default_rng(3))
        assert in_codespace(group, state)
        assert state.expectation(parse_pauli("XXXX")) == pytest.approx(1.0)

    def test_embed_local_operator(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((2, 2))
        b = rng.standard_normal((2, 2))
        full = embed_local_operator(3, [2, 0], np.kron(a, b))
        np.testing.assert_allclose(full.matrix, kron(b, I2, a))

    def test_embed_rejects_bad_qubits(self):
        with pytest.raises(ValueError):
            embed_local_operator(2, [0, 0], np.eye(4))
        with pytest.raises(ValueError):
            embed_local_operator(2, [0], np.eye(4))


class TestPairIdentities:
    """Test P_B P_A P_B = 2^-n_m P_B and its mirror."""

    def test_single_qubit_half(self):
        report = verify_pair_identities(pair_of(("Z",), ("X",)))
        assert report.passed
        assert report.max_residual < 1e-12

    def test_two_measured_quarter(self):
        report = verify_pair_identities(double_zx().pairs[0], threads=2)
        assert report.passed
        assert report.details["outcome_vectors"] == 4

    def test_commuting_pair_fails(self):
        report = verify_pair_identities(pair_of(("ZZ",), ("XX",)))
        assert not report.passed
        assert report.residuals["b_side"] == pytest.approx(0.5)
        assert report.to_dict()["max_residual"] == pytest.approx(0.5)


class TestUniformProbability:
    """Test outcome probabilities on code states."""

    def test_uniform(self):
        report = uniform_probability_check(pair_of(("Z",), ("X",)), DenseState.basis(1, 0))
        assert report.passed
        assert report.details["probabilities"] == pytest.approx({"0": 0.5, "1": 0.5})

    def test_rejects_outside_codespace(self):
        with pytest.raises(StateNotInCodespace):
            uniform_probability_check(pair_of(("Z",), ("X",)), DenseState.basis(1, 1))


class TestTransitionOperators:
    """Test K, V and the reverse transition."""

    def test_v_is_hadamard(self):
        np.testing.assert_allclose(transition_V(pair_of(("Z",), ("X",))).matrix, H, atol=1e-12)

    def test_k_on_single_qubit(self):
        k = transition_K(pair_of(("Z",), ("X",)), [1]).matrix
        np.testing.assert_allclose(k, np.array([[1, 0], [-1, 0]]) / np.sqrt(2), atol=1e-12)

    @pytest.mark.parametrize("pair", [
        pair_of(("Z",), ("X",)),
        pair_of(("ZI", "IZ"), ("XX", "IX")),
        pair_of(("ZZI", "ZII"), ("ZZI", "XXI")),
    ])
    def test_identities_hold(self, pair):
        report = verify_transition_operators(pair)
        assert report.passed, report.residuals


class TestLogicalExpectation:
    """Test that rewritten logicals keep their expectation values."""

    def test_spectator(self):
        pair = two_qubit_logical().pairs[0]
        state = random_codespace_state(pair.group_a, np.random.default_rng(7))
        assert logical_expectation_check(pair, state, parse_pauli("IX")).passed

    def test_rewritten_logical(self):
        """IZ must become ZZ to survive an XX measurement."""
        pair = pair_of(("ZI",), ("XX",))
        state = random_codespace_state(pair.group_a, np.random.default_rng(8))
        report = logical_expectation_check(pair, state, parse_pauli("IZ"))
        assert report.passed
        assert report.details["rewritten"] == "+ZZ"

    def test_rejects_non_normaliser(self):
        pair = two_qubit_logical().pairs[0]
        with pytest.raises(NotInNormaliser):
            logical_expectation_check(pair, DenseState.basis(2, 0), parse_pauli("XI"))



def teleport_sequence():
    """ZI -> XZ -> IX -> ZZ -> XI -> ZI swaps the logical X and Z over one period."""
    isgs = tuple(StabiliserGroup.from_strings(g) for g in ("ZI", "XZ", "IX", "ZZ", "XI", "ZI"))
    return FloquetSequence(isgs=isgs, name="teleport")


def replay(seq, stream, psi):
    """Run the tableau and the dense state side by side on one forced stream."""
    source = ForcedOutcomes(stream)
    state = initial_state(seq)
    for pair in seq.pairs:
        state = step(state, pair, source)
        for b, outcome in zip(pair.basis_b, state.history[-1]["outcomes"]):
            psi, _ = measure_state(psi, b, outcome)
        yield state, psi


class TestTableauAgreement:
    """Test the stabiliser tableau against a dense replay of every outcome stream."""

    @pytest.mark.parametrize("build", [two_qubit_logical, three_qubit_logical, double_zx])
    def test_post_groups_stabilise_dense_state(self, build):
        seq = build()
        rng = np.random.default_rng(11)
        for stream in exhaustive_streams(seq.outcomes_per_period):
            psi = random_codespace_state(seq.isgs[0], rng)
            for state, current in replay(seq, stream, psi):
                for g in state.group.generators:
                    assert current.expectation(g) == pytest.approx(1.0, abs=1e-9), (stream, str(g))

    @pytest.mark.parametrize("build", [two_qubit_logical, three_qubit_logical, double_zx])
    def test_logical_expectations_survive_period(self, build):
        seq = build()
        rng = np.random.default_rng(5)
        initial = initial_state(seq).logicals.operators()
        for stream in exhaustive_streams(seq.outcomes_per_period):
            psi = random_codespace_state(seq.isgs[0], rng)
            *_, (state, final) = replay(seq, stream, psi)
            before = [psi.expectation(q).real for q in initial]
            after = [final.expectation(q).real for q in state.logicals.operators()]
            np.testing.assert_allclose(after, before, atol=1e-9)


class TestPeriodUnitary:
    """Test composition of transition unitaries over a period."""

    @pytest.mark.parametrize("build", [two_qubit_logical, three_qubit_logical, teleport_sequence])
    def test_conjugation_matches_logical_action(self, build):
        report = verify_period_action(build())
        assert report.passed, report.residuals
        assert report.details["k"] == 1

    def test_teleport_exchanges_logicals(self):
        seq = teleport_sequence()
        w = period_unitary(seq).matrix
        p0 = projector(seq.isgs[0]).matrix
        logicals = normaliser_logicals(seq.isgs[0])
        lhs = w @ pauli_matrix(logicals.x_ops[0]) @ p0
        rhs = pauli_matrix(logicals.z_ops[0]) @ w @ p0
        assert min(operator_norm(lhs - rhs), operator_norm(lhs + rhs)) <= 1e-10

    def test_period_unitary_is_unitary(self):
        assert period_unitary(double_zx()).is_unitary()

    def test_stabiliser_interleave_is_invisible(self):
        seq = two_qubit_logical()
        p0 = projector(seq.isgs[0]).matrix
        plain = period_unitary(seq).matrix @ p0
        interleaved = period_unitary(seq, [DenseOperator.from_pauli(parse_pauli("ZI")),
                                           DenseOperator.from_pauli(parse_pauli("XI"))])
        np.testing.assert_allclose(interleaved.matrix @ p0, plain, atol=1e-12)

    def test_logical_interleave_applies_first(self):
        seq = two_qubit_logical()
        x = DenseOperator.from_pauli(parse_pauli("IX"))
        np.testing.assert_allclose(period_unitary(seq, [x, None]).matrix,
                                   period_unitary(seq).matrix @ x.matrix, atol=1e-12)

    def test_rejects_leaking_unitary(self):
        with pytest.raises(NotCodePreserving):
            period_unitary(two_qubit_logical(), [DenseOperator.from_pauli(parse_pauli("XI")), None])

    def test_rejects_non_unitary(self):
        with pytest.raises(NonUnitaryOperator):
            period_unitary(two_qubit_logical(), [DenseOperator(2 * np.eye(4)), None])

    def test_unitary_count_checked(self):
        with pytest.raises(ValueError):
            period_unitary(two_qubit_logical(), [None])

    def test_unitary_size_checked(self):
        with pytest.raises(PauliLengthMismatch):
            period_unitary(two_qubit_logical(), [DenseOperator(np.eye(2)), None])

    def test_needs_periodic_sequence(self):
        seq = FloquetSequence(isgs=(StabiliserGroup.from_strings("Z"), StabiliserGroup.from_strings("X")))
        with pytest.raises(NonPeriodicSequence):
            verify_period_action(seq)


def random_pauli(rng, n):
    while True:
        p = PauliOperator.from_vector(rng.integers(0, 2, 2 * n))
        if not p.is_identity:
            return p


def scramble(group, rng, rounds, source):
    """Measure random Paulis that anticommute with the group, keeping its rank."""
    for _ in range(rounds):
        p = random_pauli(rng, group.n)
        if any(commutes(g, p) for g in group.generators):
            group = measure_pauli(group, p, source).group
    return group


def random_pair(rng):
    """A reversible pair on 2..6 qubits reached by random measurements."""
    while True:
        n = int(rng.integers(2, 7))
        rank = int(rng.integers(1, n + 1))
        source = SeededOutcomes(int(rng.integers(1 << 30)))
        a = StabiliserGroup.from_generators([PauliOperator.single(n, q, "Z") for q in range(rank)])
        a = scramble(a, rng, 3 * n, source)
        b = scramble(a, rng, int(rng.integers(1, 4)), source)
        try:
            pair = check_reversible(a, b)
        except SignConflict:
            continue
        if pair.reversible and pair.n_m > 0:
            return pair


class TestRandomPairs:
    """Test the dense identities on pairs reached by random measurement."""

    def check_pair(self, pair, rng, states):
        assert verify_pair_identities(pair).passed
        assert verify_transition_operators(pair).passed
        for _ in range(states):
            state = random_codespace_state(pair.group_a, rng)
            report = uniform_probability_check(pair, state)
            assert report.passed, report.residuals

    def test_small_sample(self):
        rng = np.random.default_rng(2024)
        for _ in range(10):
            self.check_pair(random_pair(rng), rng, states=3)

    @pytest.mark.slow
    def test_hundred_pairs(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            self.check_pair(random_pair(rng), rng, states=50)

    def test_logicals_carried(self):
        rng = np.random.default_rng(99)
        for _ in range(10):
            pair = random_pair(rng)
            state = random_codespace_state(pair.group_a, rng)
            for q in normaliser_logicals(pair.group_a).operators():
                assert logical_expectation_check(pair, state, q).passed


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
