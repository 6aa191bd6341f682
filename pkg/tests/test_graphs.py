import itertools
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathfusion.graphs import (
    PATH,
    POLARIZATION,
    GraphSpec,
    chain_2p4q,
    e_shaped_graph,
    fidelity_lower_bound,
    graph_to_state,
    measurement_settings,
    paper_graph_4p7q,
    stabilizer,
    stabilizers,
    two_coloring,
    witness_from_counts,
    witness_value,
)
from pathfusion.noise import outcome_probabilities
from pathfusion.qubits import CANONICAL_ORDER, DensityState, expectation, make_state, to_density

_P = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Z": np.diag([1, -1]),
}


def _oracle_stabilizer(g, root, register):
    """Dense matrix of X_root prod Z_neighbors built factor by factor."""
    nb = g.neighbors(root)
    return reduce(np.kron, [_P["X"] if q == root else _P["Z"] if q in nb else _P["I"] for q in register])


def _oracle_witness(rho, g, register):
    d = 2 ** len(register)
    terms = []
    for kind in (PATH, POLARIZATION):
        proj = np.eye(d)
        for q in g.of_kind(kind):
            proj = proj @ (_oracle_stabilizer(g, q, register) + np.eye(d)) / 2
        terms.append(np.real(np.trace(rho @ proj)))
    return 3 - 2 * sum(terms), terms


def test_reference_graph_structure():
    g = paper_graph_4p7q()
    assert set(g.ids) == set(CANONICAL_ORDER)
    assert g.neighbors("s3") == {"p1", "p2", "p3", "p4"}
    assert g.neighbors("p1") == {"s1", "s3"}
    assert g.is_kind_bipartite()
    assert set(g.of_kind(PATH)) == {"s1", "s2", "s3"}
    e = e_shaped_graph()
    assert "p4" not in e.ids and e.neighbors("s3") == {"p1", "p2", "p3"}


def test_ideal_stabilizers_all_one():
    g = paper_graph_4p7q()
    psi = graph_to_state(g)
    for s in stabilizers(g):
        assert expectation(psi, s.pauli) == pytest.approx(1, abs=1e-10)


def test_stabilizer_matches_oracle_matrix():
    g = paper_graph_4p7q()
    for q in g.ids:
        assert np.allclose(stabilizer(g, q).pauli.matrix(CANONICAL_ORDER), _oracle_stabilizer(g, q, CANONICAL_ORDER))


def test_witness_ideal_and_mixed():
    g = paper_graph_4p7q()
    assert witness_value(graph_to_state(g), g).value == pytest.approx(-1, abs=1e-10)
    mixed = DensityState.maximally_mixed(CANONICAL_ORDER)
    assert witness_value(mixed, g).value == pytest.approx(2.625, abs=1e-10)
    # projector ranks: three path and four polarization stabilizers
    d = 2**7
    ranks = []
    for kind in (PATH, POLARIZATION):
        proj = np.eye(d)
        for q in g.of_kind(kind):
            proj = proj @ (_oracle_stabilizer(g, q, CANONICAL_ORDER) + np.eye(d)) / 2
        ranks.append(np.linalg.matrix_rank(proj))
    assert 3 - 2 * (ranks[0] + ranks[1]) / d == pytest.approx(2.625, abs=1e-12)


def test_witness_agrees_with_oracle_on_noisy_mixture():
    g = paper_graph_4p7q()
    psi = to_density(graph_to_state(g))
    rho = DensityState(CANONICAL_ORDER, 0.7 * psi.matrix + 0.3 * np.eye(128) / 128)
    report = witness_value(rho, g)
    value, terms = _oracle_witness(rho.matrix, g, CANONICAL_ORDER)
    assert report.value == pytest.approx(value, abs=1e-10)
    assert (report.term_path, report.term_pol) == pytest.approx(tuple(terms), abs=1e-10)


def test_fidelity_lower_bound_identity():
    assert fidelity_lower_bound(-0.281) == pytest.approx(0.6405, abs=1e-15)
    assert fidelity_lower_bound(-1.0) == 1.0
    assert fidelity_lower_bound(1.0) == 0.0


def test_two_coloring_and_odd_cycle():
    g = paper_graph_4p7q()
    pol, path = two_coloring(g)
    assert path == {"s1", "s2", "s3"} and pol == {"p1", "p2", "p3", "p4"}
    tri = GraphSpec.build([("a", PATH, 1), ("b", POLARIZATION, 1), ("c", PATH, 2)], [("a", "b"), ("b", "c"), ("a", "c")])
    assert two_coloring(tri) is None
    assert not tri.is_kind_bipartite()
    with pytest.raises(ValueError):
        witness_value(graph_to_state(tri), tri)


def test_graph_json_round_trip_and_order_independence():
    g = paper_graph_4p7q()
    g2 = GraphSpec.from_json(g.to_json())
    assert g2 == g and hash(g2) == hash(g)
    shuffled = GraphSpec(tuple(reversed(g.vertices)), g.edges)
    assert shuffled == g


def test_graph_validation():
    with pytest.raises(ValueError):
        GraphSpec.build([("a", PATH, 1)], [("a", "a")])
    with pytest.raises(ValueError):
        GraphSpec.build([("a", PATH, 1)], [("a", "b")])
    with pytest.raises(ValueError):
        GraphSpec.build([("a", "spin", 1)], [])
    with pytest.raises(ValueError):
        chain_2p4q(("s1", "s2", "p1", "p2"))
    with pytest.raises(ValueError):
        chain_2p4q(("a", "b", "c", "d"))
    big = GraphSpec.build([(f"q{i}", PATH, i) for i in range(13)], [])
    with pytest.raises(ValueError):
        graph_to_state(big)


def test_chain_and_vertex_removal():
    c = chain_2p4q(("s1", "p1", "sA", "p3"))
    assert c.edges == {frozenset(e) for e in [("p1", "s1"), ("p1", "sA"), ("p3", "sA")]}
    assert c.vertex("s1").photon == c.vertex("p1").photon != c.vertex("p3").photon
    r = paper_graph_4p7q().remove_vertex("p4")
    assert r == e_shaped_graph() and r.degree("s3") == 3


def test_measurement_settings_two_colors():
    s = measurement_settings(paper_graph_4p7q())
    assert s["A"]["s3"] == "X" and s["A"]["p1"] == "Z"
    assert s["B"]["s3"] == "Z" and s["B"]["p1"] == "X"


def test_witness_from_exact_counts_recovers_value():
    """Counts proportional to Born probabilities reproduce the exact witness."""
    g = paper_graph_4p7q()
    psi = graph_to_state(g)
    rho = DensityState(CANONICAL_ORDER, 0.8 * to_density(psi).matrix + 0.2 * np.eye(128) / 128)
    settings_ = measurement_settings(g)
    scale = 10**9
    counts = {k: {o: round(p * scale) for o, p in outcome_probabilities(rho, settings_[k]).items()} for k in "AB"}
    est = witness_from_counts(counts["A"], counts["B"], g)
    assert est.value == pytest.approx(witness_value(rho, g).value, abs=1e-6)
    for q in CANONICAL_ORDER:
        exact = expectation(rho, stabilizer(g, q).pauli)
        assert est.stabilizer_values[q][0] == pytest.approx(exact, abs=1e-6)


def test_witness_from_counts_rejects_bad_input():
    g = paper_graph_4p7q()
    with pytest.raises(ValueError):
        witness_from_counts({}, {"0" * 7: 1}, g)
    with pytest.raises(ValueError):
        witness_from_counts({"01": 3}, {"0" * 7: 1}, g)


@st.composite
def bipartite_graphs(draw):
    n_path = draw(st.integers(1, 3))
    n_pol = draw(st.integers(1, 3))
    path = [f"s{i}" for i in range(n_path)]
    pol = [f"p{i}" for i in range(n_pol)]
    edges = [e for e in itertools.product(path, pol) if draw(st.booleans())]
    vertices = [(q, PATH, i) for i, q in enumerate(path)] + [(q, POLARIZATION, i) for i, q in enumerate(pol)]
    return GraphSpec.build(vertices, edges)


@settings(max_examples=40, deadline=None)
@given(bipartite_graphs())
def test_every_graph_state_is_stabilized(g):
    psi = graph_to_state(g)
    for s in stabilizers(g):
        assert expectation(psi, s.pauli) == pytest.approx(1, abs=1e-10)
    assert witness_value(psi, g).value == pytest.approx(-1, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(bipartite_graphs(), st.floats(0, 1))
def test_witness_is_affine_in_white_noise(g, p):
    psi = to_density(graph_to_state(g))
    d = psi.matrix.shape[0]
    rho = DensityState(psi.register, (1 - p) * psi.matrix + p * np.eye(d) / d)
    mixed = witness_value(DensityState.maximally_mixed(psi.register), g).value
    assert witness_value(rho, g).value == pytest.approx((1 - p) * -1 + p * mixed, abs=1e-10)


def test_bell_pair_as_two_vertex_graph():
    g = GraphSpec.build([("s", PATH, 1), ("p", POLARIZATION, 1)], [("s", "p")])
    psi = graph_to_state(g, ("p", "s"))
    ref = make_state(("p", "s"), [("00", 1), ("01", 1), ("10", 1), ("11", -1)])
    assert abs(np.vdot(psi.amplitudes, ref.amplitudes)) == pytest.approx(1)
