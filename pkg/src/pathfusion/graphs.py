"""Graph states of polarization and path qubits, their stabilizers, and the
two-setting entanglement witness."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .qubits import (
    DensityState,
    PauliString,
    PureState,
    RegisterError,
    apply_cz,
    canonical_register,
    expectation,
    partial_trace,
    plus_state,
    reorder,
    to_density,
)

POLARIZATION = "polarization"
PATH = "path"
MAX_VERTICES = 12


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: str
    photon: int

    def __post_init__(self):
        if self.kind not in (POLARIZATION, PATH):
            raise ValueError(f"vertex {self.id}: kind must be {POLARIZATION!r} or {PATH!r}")


@dataclass(frozen=True, eq=False)
class GraphSpec:
    vertices: tuple[Vertex, ...]
    edges: frozenset[frozenset[str]]

    def __post_init__(self):
        vertices = tuple(self.vertices)
        ids = [v.id for v in vertices]
        if len(set(ids)) != len(ids):
            raise RegisterError(f"duplicate vertex ids {ids}")
        edges = frozenset(frozenset(e) for e in self.edges)
        for e in edges:
            if len(e) != 2:
                raise ValueError(f"self-loop or malformed edge {sorted(e)}")
            if not e <= set(ids):
                raise ValueError(f"edge {sorted(e)} references undeclared vertices")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)

    def __eq__(self, other):
        if not isinstance(other, GraphSpec):
            return NotImplemented
        return set(self.vertices) == set(other.vertices) and self.edges == other.edges

    def __hash__(self):
        return hash((frozenset(self.vertices), self.edges))

    @classmethod
    def build(cls, vertices: Iterable[tuple[str, str, int]], edges: Iterable[Sequence[str]]) -> "GraphSpec":
        return cls(tuple(Vertex(*v) for v in vertices), frozenset(frozenset(e) for e in edges))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    def vertex(self, qubit: str) -> Vertex:
        for v in self.vertices:
            if v.id == qubit:
                return v
        raise RegisterError(f"no vertex {qubit!r}")

    def kind(self, qubit: str) -> str:
        return self.vertex(qubit).kind

    def neighbors(self, qubit: str) -> frozenset[str]:
        self.vertex(qubit)
        return frozenset(q for e in self.edges if qubit in e for q in e if q != qubit)

    def degree(self, qubit: str) -> int:
        return len(self.neighbors(qubit))

    def of_kind(self, kind: str) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices if v.kind == kind)

    def sorted_edges(self) -> list[tuple[str, str]]:
        order = {q: i for i, q in enumerate(self.ids)}
        return sorted((tuple(sorted(e, key=order.get)) for e in self.edges), key=lambda e: (order[e[0]], order[e[1]]))

    def is_kind_bipartite(self) -> bool:
        """Every edge joins a polarization vertex to a path vertex."""
        return all(len({self.kind(q) for q in e}) == 2 for e in self.edges)

    def remove_vertex(self, qubit: str) -> "GraphSpec":
        self.vertex(qubit)
        return GraphSpec(
            tuple(v for v in self.vertices if v.id != qubit),
            frozenset(e for e in self.edges if qubit not in e),
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "vertices": [{"id": v.id, "kind": v.kind, "photon": v.photon} for v in self.vertices],
                "edges": [list(e) for e in self.sorted_edges()],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "GraphSpec":
        data = json.loads(text)
        try:
            vertices = [(v["id"], v["kind"], int(v["photon"])) for v in data["vertices"]]
            edges = [tuple(e) for e in data["edges"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed graph JSON: missing or invalid field {exc}") from None
        return cls.build(vertices, edges)


def two_coloring(g: GraphSpec) -> Optional[tuple[frozenset[str], frozenset[str]]]:
    """Proper 2-coloring by BFS, or None if the graph has an odd cycle.

    When every edge joins a polarization and a path qubit the classes are exactly
    the two kinds, polarization first.
    """
    color: dict[str, int] = {}
    for start in g.ids:
        if start in color:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            q = queue.pop(0)
            for r in sorted(g.neighbors(q)):
                if r not in color:
                    color[r] = 1 - color[q]
                    queue.append(r)
                elif color[r] == color[q]:
                    return None
    if g.is_kind_bipartite():
        a = frozenset(g.of_kind(POLARIZATION))
        return a, frozenset(g.ids) - a
    a = frozenset(q for q, c in color.items() if c == 0)
    return a, frozenset(g.ids) - a


def paper_graph_4p7q() -> GraphSpec:
    """The fused four-photon seven-qubit graph.

    Path qubit ``s3`` (photon 3) is the fused vertex adjacent to all four
    polarization qubits; ``s1``/``s2`` hang off ``p1``/``p2``.
    """
    vertices = [
        ("p1", POLARIZATION, 1),
        ("p2", POLARIZATION, 2),
        ("p3", POLARIZATION, 3),
        ("p4", POLARIZATION, 4),
        ("s1", PATH, 1),
        ("s2", PATH, 2),
        ("s3", PATH, 3),
    ]
    edges = [("s1", "p1"), ("p1", "s3"), ("s3", "p2"), ("p2", "s2"), ("s3", "p3"), ("s3", "p4")]
    return GraphSpec.build(vertices, edges)


def e_shaped_graph() -> GraphSpec:
    """Six-qubit tree left after deleting ``p4``; used by the Deutsch-Jozsa pattern."""
    return paper_graph_4p7q().remove_vertex("p4")


def chain_2p4q(labels: Sequence[str], photons: Optional[Sequence[int]] = None, kinds: Optional[Sequence[str]] = None) -> GraphSpec:
    """Linear four-qubit chain produced by one two-photon source.

    ``labels`` alternate path/polarization (either parity).  Kinds are inferred
    from the leading letter (``s``=path, ``p``=polarization) unless given.
    Consecutive (path, polarization) labels that share a photon index are
    grouped on one photon when ``photons`` is omitted.
    """
    labels = list(labels)
    if len(labels) != 4:
        raise ValueError("a 2P4Q chain has exactly four qubits")
    if kinds is None:
        kinds = [PATH if q.startswith("s") else POLARIZATION if q.startswith("p") else None for q in labels]
        if None in kinds:
            raise ValueError(f"cannot infer qubit kinds from labels {labels}; pass kinds explicitly")
    if any(kinds[i] == kinds[i + 1] for i in range(3)):
        raise ValueError(f"chain kinds must alternate path/polarization, got {list(kinds)}")
    if photons is None:
        # neighbors (0,1) sit on one photon and (2,3) on the other
        photons = [1, 1, 2, 2]
    vertices = list(zip(labels, kinds, photons))
    edges = [(labels[i], labels[i + 1]) for i in range(3)]
    return GraphSpec.build(vertices, edges)


def graph_to_state(g: GraphSpec, register: Optional[Sequence[str]] = None) -> PureState:
    """|G> = prod_edges CZ |+>^n, on the canonical register unless one is given."""
    if len(g.vertices) > MAX_VERTICES:
        raise ValueError(f"graph has {len(g.vertices)} vertices; at most {MAX_VERTICES} supported")
    register = tuple(register) if register is not None else canonical_register(g.ids)
    if set(register) != set(g.ids):
        raise RegisterError(f"register {register} does not match graph vertices {g.ids}")
    state = plus_state(register)
    for a, b in g.sorted_edges():
        state = apply_cz(state, a, b)
    return state


@dataclass(frozen=True)
class Stabilizer:
    root: str
    pauli: PauliString


def stabilizer(g: GraphSpec, root: str) -> Stabilizer:
    factors = {root: "X", **{q: "Z" for q in g.neighbors(root)}}
    return Stabilizer(root, PauliString.from_dict(factors))


def stabilizers(g: GraphSpec) -> list[Stabilizer]:
    return [stabilizer(g, q) for q in g.ids]


@dataclass
class WitnessReport:
    value: float
    term_path: float
    term_pol: float
    stabilizer_values: dict[str, tuple[float, float]] = field(default_factory=dict)
    uncertainty: float = 0.0
    shots: Optional[dict[str, int]] = None

    @property
    def fidelity_lower_bound(self) -> float:
        return fidelity_lower_bound(self.value)

    @property
    def genuine_entanglement(self) -> bool:
        return self.value < 0

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "uncertainty": self.uncertainty,
            "term_path": self.term_path,
            "term_pol": self.term_pol,
            "fidelity_lower_bound": self.fidelity_lower_bound,
            "genuine_entanglement": self.genuine_entanglement,
            "stabilizers": {q: {"value": v, "uncertainty": s} for q, (v, s) in self.stabilizer_values.items()},
            **({"shots": self.shots} if self.shots else {}),
        }


def fidelity_lower_bound(witness: float) -> float:
    """Lower bound on the fidelity with the ideal graph state implied by a witness value."""
    return (1 - witness) / 2


def witness_from_terms(term_path: float, term_pol: float) -> float:
    return 3 - 2 * (term_path + term_pol)


def _require_kind_bipartite(g: GraphSpec) -> None:
    if not g.is_kind_bipartite():
        raise ValueError("witness needs every edge to join a polarization and a path qubit")


def stabilizer_projector(g: GraphSpec, roots: Iterable[str], register: Sequence[str]) -> np.ndarray:
    """prod_i (S(q_i) + I)/2 as a dense matrix on ``register``."""
    dim = 2 ** len(register)
    eye = np.eye(dim, dtype=complex)
    mats = [(stabilizer(g, q).pauli.matrix(register) + eye) / 2 for q in roots]
    return reduce(np.matmul, mats, eye)


def witness_value(state: PureState | DensityState, g: GraphSpec) -> WitnessReport:
    _require_kind_bipartite(g)
    missing = set(g.ids) - set(state.register)
    if missing:
        raise RegisterError(f"graph qubits {sorted(missing)} not in state register")
    rho = to_density(state)
    if set(rho.register) != set(g.ids):
        rho = partial_trace(rho, canonical_register(g.ids))
    rho = reorder(rho, canonical_register(g.ids))
    register = rho.register
    terms = []
    for kind in (PATH, POLARIZATION):
        proj = stabilizer_projector(g, g.of_kind(kind), register)
        terms.append(float(np.trace(proj @ rho.matrix).real))
    values = {q: (expectation(rho, stabilizer(g, q).pauli), 0.0) for q in register}
    return WitnessReport(witness_from_terms(*terms), terms[0], terms[1], values)


# --- two-setting estimate from counts -------------------------------------

def measurement_settings(g: GraphSpec) -> dict[str, dict[str, str]]:
    """Setting A: X on path / Z on polarization; setting B: the reverse."""
    _require_kind_bipartite(g)
    a = {q: ("X" if g.kind(q) == PATH else "Z") for q in g.ids}
    b = {q: ("Z" if g.kind(q) == PATH else "X") for q in g.ids}
    return {"A": a, "B": b}


def _eigen_signs(outcome: str, register: Sequence[str], qubits: Iterable[str]) -> int:
    idx = {q: i for i, q in enumerate(register)}
    return int(np.prod([1 - 2 * int(outcome[idx[q]]) for q in qubits]))


def stabilizer_signs(g: GraphSpec, register: Sequence[str], outcome: str, roots: Iterable[str]) -> dict[str, int]:
    """Product of +/-1 outcomes over each stabilizer's support for one outcome string."""
    return {q: _eigen_signs(outcome, register, stabilizer(g, q).pauli.qubits) for q in roots}


def witness_from_counts(
    counts_a: Mapping[str, int],
    counts_b: Mapping[str, int],
    g: GraphSpec,
    register: Optional[Sequence[str]] = None,
) -> WitnessReport:
    """Estimate the witness from setting-A and setting-B tallies.

    Outcome strings are read in ``register`` order (canonical by default); bit
    ``0`` is the +1 eigenvalue.  Errors propagate first-order Poisson noise on
    every outcome bin.
    """
    _require_kind_bipartite(g)
    register = tuple(register) if register is not None else canonical_register(g.ids)
    roots = {"A": g.of_kind(PATH), "B": g.of_kind(POLARIZATION)}
    terms, variances, values, totals = [], [], {}, {}
    for label, counts in (("A", counts_a), ("B", counts_b)):
        total = sum(int(c) for c in counts.values())
        if total <= 0:
            raise ValueError(f"setting {label} has no counts")
        totals[label] = total
        good = 0
        plus = {q: 0 for q in roots[label]}
        for outcome, c in counts.items():
            if len(outcome) != len(register):
                raise ValueError(f"outcome {outcome!r} does not match register of size {len(register)}")
            signs = stabilizer_signs(g, register, outcome, roots[label])
            if all(s == 1 for s in signs.values()):
                good += c
            for q, s in signs.items():
                if s == 1:
                    plus[q] += c
        f = good / total
        terms.append(f)
        # d f / d n_bin summed in quadrature with var(n_bin) = n_bin
        variances.append(f * (1 - f) / total)
        for q in roots[label]:
            e = (2 * plus[q] - total) / total
            values[q] = (e, float(np.sqrt(max(0.0, (1 - e * e) / total))))
    value = witness_from_terms(*terms)
    sigma = 2 * float(np.sqrt(sum(variances)))
    ordered = {q: values[q] for q in register if q in values}
    return WitnessReport(value, terms[0], terms[1], ordered, sigma, totals)
