"""Hypothesis strategies shared by the test modules."""
import numpy as np
from hypothesis import strategies as st

from pathfusion.qubits import DensityState, PureState

_finite = st.floats(-1, 1, allow_nan=False, allow_infinity=False)


@st.composite
def state_vectors(draw, n):
    re = draw(st.lists(_finite, min_size=2**n, max_size=2**n))
    im = draw(st.lists(_finite, min_size=2**n, max_size=2**n))
    v = np.array(re) + 1j * np.array(im)
    if np.linalg.norm(v) < 1e-3:
        v = np.zeros(2**n, dtype=complex)
        v[0] = 1
    return v / np.linalg.norm(v)


@st.composite
def pure_states(draw, register):
    return PureState(tuple(register), draw(state_vectors(len(register))))


@st.composite
def density_states(draw, register, rank=2):
    n = len(register)
    vs = [draw(state_vectors(n)) for _ in range(rank)]
    w = np.array(draw(st.lists(st.floats(0.05, 1), min_size=rank, max_size=rank)))
    w = w / w.sum()
    m = sum(wi * np.outer(v, v.conj()) for wi, v in zip(w, vs))
    return DensityState(tuple(register), m)


@st.composite
def unitaries(draw):
    a = draw(state_vectors(2)).reshape(2, 2) + 0.5 * np.eye(2)
    q, r = np.linalg.qr(a)
    return q


def random_state(rng, register):
    v = rng.normal(size=2 ** len(register)) + 1j * rng.normal(size=2 ** len(register))
    return PureState(tuple(register), v / np.linalg.norm(v))


def rooted_trees(max_vertices):
    """Every tree up to isomorphism with each vertex as fusion root."""
    import networkx as nx

    out = [(nx.empty_graph(1), 0)]
    for n in range(2, max_vertices + 1):
        for t in nx.nonisomorphic_trees(n):
            out += [(t, r) for r in t.nodes]
    return out


def tree_spec(tree, root, prefix):
    """GraphSpec of a rooted tree with vertex kinds alternating from a path root."""
    import networkx as nx
    from pathfusion.graphs import PATH, POLARIZATION, GraphSpec

    depth = nx.single_source_shortest_path_length(tree, root)
    vertices = [(f"{prefix}{v}", PATH if depth[v] % 2 == 0 else POLARIZATION, v) for v in tree.nodes]
    edges = [(f"{prefix}{a}", f"{prefix}{b}") for a, b in tree.edges]
    return GraphSpec.build(vertices, edges), f"{prefix}{root}"


def symmetric_pol_state(rng):
    """Random state on (a, b, pa, pb, r) symmetric under pa <-> pb."""
    reg = ("a", "b", "pa", "pb", "r")
    psi = random_state(rng, reg)
    t = psi.amplitudes.reshape([2] * 5)
    sym = (t + np.swapaxes(t, 2, 3)).reshape(-1)
    return PureState(reg, sym / np.linalg.norm(sym))
