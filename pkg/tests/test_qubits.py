import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _strategies import density_states, pure_states, unitaries
from pathfusion.qubits import (
    CANONICAL_ORDER,
    HADAMARD,
    PAULI,
    DensityState,
    PauliString,
    PureState,
    RegisterError,
    ZeroProbabilityError,
    apply_cz,
    apply_local,
    apply_pauli,
    basis_vectors,
    canonical_register,
    expectation,
    fidelity,
    make_state,
    measure,
    partial_trace,
    plus_state,
    project,
    relabel,
    reorder,
    tensor,
    to_density,
)

REG3 = ("a", "b", "c")


def test_bitstring_order_leftmost_is_first_qubit():
    psi = make_state(("a", "b"), [("10", 1)])
    assert psi.amplitude("10") == 1
    assert expectation(psi, PauliString.from_dict({"a": "Z"})) == pytest.approx(-1)
    assert expectation(psi, PauliString.from_dict({"b": "Z"})) == pytest.approx(1)


def test_y_basis_convention():
    plus, minus = basis_vectors("Y")
    assert np.allclose(PAULI["Y"] @ plus, plus)
    assert np.allclose(PAULI["Y"] @ minus, -minus)
    assert np.allclose(plus, np.array([1, 1j]) / np.sqrt(2))


@pytest.mark.parametrize("basis", ["X", "Y", "Z"])
def test_pauli_basis_vectors_are_eigenvectors(basis):
    plus, minus = basis_vectors(basis)
    assert np.allclose(PAULI[basis] @ plus, plus)
    assert np.allclose(PAULI[basis] @ minus, -minus)


def test_bloch_angles_reproduce_x_basis():
    plus, minus = basis_vectors((np.pi / 2, 0.0))
    xp, xm = basis_vectors("X")
    assert abs(np.vdot(plus, xp)) == pytest.approx(1)
    assert abs(np.vdot(minus, xm)) == pytest.approx(1)


def test_invalid_inputs():
    with pytest.raises(RegisterError):
        make_state(("a", "a"), [("00", 1)])
    with pytest.raises(RegisterError):
        make_state(("a",), [("01", 1)])
    with pytest.raises(ZeroProbabilityError):
        make_state(("a",), [("0", 0)])
    with pytest.raises(ValueError):
        apply_local(plus_state(("a",)), "a", np.array([[1, 1], [0, 1]]))
    with pytest.raises(RegisterError):
        tensor(plus_state(("a",)), plus_state(("a",)))
    with pytest.raises(ZeroProbabilityError):
        measure(make_state(("a",), [("0", 1)]), "a", "Z", -1)
    with pytest.raises(ValueError):
        basis_vectors("W")


def test_canonical_register_puts_transients_last():
    assert canonical_register(["sA", "s3", "p1", "x"]) == ("p1", "s3", "sA", "x")
    assert canonical_register(reversed(CANONICAL_ORDER)) == CANONICAL_ORDER


def test_pauli_string_algebra():
    xz = PauliString.from_dict({"a": "X", "b": "Z"})
    zx = PauliString.from_dict({"a": "Z", "b": "X"})
    za = PauliString.from_dict({"a": "Z"})
    assert xz.commutes_with(zx)
    assert not xz.commutes_with(za)
    assert (-xz).sign == -1
    m = xz.matrix(("a", "b"))
    assert np.allclose(m, np.kron(PAULI["X"], PAULI["Z"]))


def test_cz_creates_bell_pair_stabilizers():
    psi = apply_cz(plus_state(("a", "b")), "a", "b")
    assert expectation(psi, PauliString.from_dict({"a": "X", "b": "Z"})) == pytest.approx(1)
    assert expectation(psi, PauliString.from_dict({"a": "Z", "b": "X"})) == pytest.approx(1)


def test_partial_trace_of_bell_pair_is_mixed():
    bell = make_state(("a", "b"), [("00", 1), ("11", 1)])
    r = partial_trace(bell, ["a"])
    assert np.allclose(r.matrix, np.eye(2) / 2)


def test_density_state_rejects_non_hermitian():
    with pytest.raises(ValueError):
        DensityState(("a",), np.array([[1, 1], [0, 0]]))


@settings(max_examples=60, deadline=None)
@given(pure_states(REG3), st.permutations(REG3))
def test_reorder_round_trip(psi, order):
    back = reorder(reorder(psi, order), REG3)
    assert np.allclose(back.amplitudes, psi.amplitudes)


@settings(max_examples=60, deadline=None)
@given(pure_states(REG3), st.permutations(REG3))
def test_expectation_independent_of_order(psi, order):
    op = PauliString.from_dict({"a": "X", "c": "Y"})
    assert expectation(psi, op) == pytest.approx(expectation(reorder(psi, order), op), abs=1e-12)
    assert expectation(to_density(psi), op) == pytest.approx(expectation(psi, op), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(pure_states(REG3), unitaries(), st.sampled_from(REG3))
def test_local_unitaries_preserve_norm(psi, u, q):
    out = apply_local(psi, q, u)
    assert out.norm() == pytest.approx(1, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(density_states(REG3), unitaries(), st.sampled_from(REG3))
def test_density_channels_stay_physical(rho, u, q):
    out = apply_local(rho, q, u)
    assert out.trace() == pytest.approx(1, abs=1e-10)
    assert out.min_eigenvalue() > -1e-9


@settings(max_examples=60, deadline=None)
@given(pure_states(REG3), st.sampled_from(REG3), st.sampled_from(["X", "Y", "Z"]))
def test_measurement_probabilities_sum_to_one(psi, q, basis):
    total = 0.0
    for outcome in (1, -1):
        try:
            p, post = measure(psi, q, basis, outcome)
        except ZeroProbabilityError:
            continue
        total += p
        assert post.n == 2
    assert total == pytest.approx(1, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(pure_states(REG3), st.sampled_from(REG3), st.sampled_from(["X", "Y", "Z"]))
def test_born_rule_matches_expectation(psi, q, basis):
    e = expectation(psi, PauliString.from_dict({q: basis}))
    try:
        p_plus, _ = measure(psi, q, basis, 1)
    except ZeroProbabilityError:
        p_plus = 0.0
    assert 2 * p_plus - 1 == pytest.approx(e, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(pure_states(REG3))
def test_density_and_pure_projection_agree(psi):
    v = basis_vectors("X")[0]
    p1, post1 = project(psi, "b", v)
    p2, post2 = project(to_density(psi), "b", v)
    assert p1 == pytest.approx(p2, abs=1e-12)
    assert fidelity(post2, post1) == pytest.approx(1, abs=1e-10)


def test_project_keep_leaves_qubit_in_vector():
    psi = plus_state(("a", "b"))
    _, post = measure(psi, "a", "Y", 1, keep=True)
    assert post.register == ("a", "b")
    assert expectation(post, PauliString.from_dict({"a": "Y"})) == pytest.approx(1)
    _, post_d = measure(to_density(psi), "a", "Y", -1, keep=True)
    assert expectation(post_d, PauliString.from_dict({"a": "Y"})) == pytest.approx(-1)


def test_pauli_application_matches_matrix():
    rng = np.random.default_rng(1)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi = PureState(REG3, v / np.linalg.norm(v))
    op = PauliString.from_dict({"a": "Y", "c": "X"}, sign=-1)
    assert np.allclose(apply_pauli(psi, op).amplitudes, op.matrix(REG3) @ psi.amplitudes)


def test_relabel_and_hadamard():
    psi = apply_local(make_state(("a",), [("0", 1)]), "a", HADAMARD)
    out = relabel(psi, {"a": "z"})
    assert out.register == ("z",)
    assert expectation(out, PauliString.from_dict({"z": "X"})) == pytest.approx(1)


def test_maximally_mixed_has_vanishing_paulis():
    rho = DensityState.maximally_mixed(REG3)
    assert expectation(rho, PauliString.from_dict({"a": "X", "b": "Z"})) == pytest.approx(0)
    assert rho.trace() == pytest.approx(1)
