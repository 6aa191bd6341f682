"""Dense state-vector and density-matrix simulation of a small labeled qubit register.

Qubits are addressed by string labels (``"p1"``, ``"s3"``, ...).  Bitstrings are
read left to right in register order, so ``"01"`` on register ``("a", "b")``
means ``a=0, b=1``.  All operations return new states; inputs are never mutated.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "CANONICAL_ORDER",
    "RegisterError",
    "ZeroProbabilityError",
    "PureState",
    "DensityState",
    "PauliString",
    "PAULI",
    "HADAMARD",
    "make_state",
    "plus_state",
    "tensor",
    "reorder",
    "canonical_register",
    "apply_local",
    "apply_cz",
    "apply_pauli",
    "expectation",
    "basis_vectors",
    "measure",
    "project",
    "to_density",
    "fidelity",
    "partial_trace",
    "relabel",
]

CANONICAL_ORDER = ("p1", "p2", "p3", "p4", "s1", "s2", "s3")

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

_SQ2 = 1 / np.sqrt(2)
# +1 eigenvector first; the Y convention puts +1 on (|0> + i|1>)/sqrt(2).
_PAULI_BASES = {
    "X": (np.array([_SQ2, _SQ2], dtype=complex), np.array([_SQ2, -_SQ2], dtype=complex)),
    "Y": (np.array([_SQ2, 1j * _SQ2]), np.array([_SQ2, -1j * _SQ2])),
    "Z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
}

Basis = Union[str, tuple[float, float]]


class RegisterError(ValueError):
    """Raised for unknown, duplicate, or mismatched qubit labels."""


class ZeroProbabilityError(ArithmeticError):
    """Raised when a projection annihilates the state."""


def _check_register(register: Sequence[str]) -> tuple[str, ...]:
    register = tuple(register)
    if len(set(register)) != len(register):
        raise RegisterError(f"duplicate labels in register {register}")
    return register


@dataclass(frozen=True, eq=False)
class PureState:
    register: tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        register = _check_register(self.register)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(register):
            raise RegisterError(f"{amps.size} amplitudes for {len(register)} qubits")
        amps.setflags(write=False)
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return len(self.register)

    def index(self, qubit: str) -> int:
        try:
            return self.register.index(qubit)
        except ValueError:
            raise RegisterError(f"unknown qubit {qubit!r}; register is {self.register}") from None

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[int(bits, 2)]) if bits else complex(self.amplitudes[0])

    def __repr__(self):
        nz = [
            f"{a:.4g}|{i:0{self.n}b}>"
            for i, a in enumerate(self.amplitudes)
            if abs(a) > 1e-12
        ]
        return f"PureState({','.join(self.register)}: {' + '.join(nz[:8])}{' ...' if len(nz) > 8 else ''})"


@dataclass(frozen=True, eq=False)
class DensityState:
    register: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        register = _check_register(self.register)
        dim = 2 ** len(register)
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (dim, dim):
            raise RegisterError(f"matrix shape {mat.shape} does not match {len(register)} qubits")
        if not np.allclose(mat, mat.conj().T, atol=1e-9):
            raise ValueError("density matrix is not Hermitian")
        mat.setflags(write=False)
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self) -> int:
        return len(self.register)

    def index(self, qubit: str) -> int:
        try:
            return self.register.index(qubit)
        except ValueError:
            raise RegisterError(f"unknown qubit {qubit!r}; register is {self.register}") from None

    def tensor_view(self) -> np.ndarray:
        return self.matrix.reshape([2] * (2 * self.n))

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)[0])

    @classmethod
    def maximally_mixed(cls, register: Sequence[str]) -> "DensityState":
        dim = 2 ** len(register)
        return cls(tuple(register), np.eye(dim, dtype=complex) / dim)

    def __repr__(self):
        return f"DensityState({','.join(self.register)}, trace={self.trace():.6f})"


State = Union[PureState, DensityState]


@dataclass(frozen=True)
class PauliString:
    """Signed tensor product of single-qubit Paulis; identity on unlisted qubits."""

    factors: tuple[tuple[str, str], ...]
    sign: int = 1

    def __post_init__(self):
        if isinstance(self.factors, Mapping):
            items = tuple(self.factors.items())
        else:
            items = tuple(tuple(f) for f in self.factors)
        labels = [q for q, _ in items]
        if len(set(labels)) != len(labels):
            raise RegisterError(f"repeated qubit in Pauli string {items}")
        for _, p in items:
            if p not in ("X", "Y", "Z"):
                raise ValueError(f"invalid Pauli factor {p!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "factors", tuple(sorted(items)))

    @classmethod
    def from_dict(cls, factors: Mapping[str, str], sign: int = 1) -> "PauliString":
        return cls(tuple(factors.items()), sign)

    @property
    def qubits(self) -> tuple[str, ...]:
        return tuple(q for q, _ in self.factors)

    def as_dict(self) -> dict[str, str]:
        return dict(self.factors)

    def __neg__(self) -> "PauliString":
        return PauliString(self.factors, -self.sign)

    def commutes_with(self, other: "PauliString") -> bool:
        mine = self.as_dict()
        clashes = sum(1 for q, p in other.factors if q in mine and mine[q] != p)
        return clashes % 2 == 0

    def matrix(self, register: Sequence[str]) -> np.ndarray:
        ops = self.as_dict()
        missing = set(ops) - set(register)
        if missing:
            raise RegisterError(f"Pauli acts on qubits {sorted(missing)} outside register")
        out = np.array([[complex(self.sign)]])
        for q in register:
            out = np.kron(out, PAULI[ops.get(q, "I")])
        return out

    def __str__(self):
        body = " ".join(f"{p}_{q}" for q, p in self.factors) or "I"
        return ("-" if self.sign < 0 else "") + body


def make_state(register: Sequence[str], kets: Iterable[tuple[str, complex]]) -> PureState:
    """Build a normalized state from ``(bitstring, amplitude)`` pairs."""
    register = _check_register(register)
    amps = np.zeros(2 ** len(register), dtype=complex)
    for bits, amp in kets:
        if len(bits) != len(register) or set(bits) - {"0", "1"}:
            raise RegisterError(f"bitstring {bits!r} does not fit register of size {len(register)}")
        amps[int(bits, 2) if bits else 0] += amp
    norm = np.linalg.norm(amps)
    if norm < 1e-15:
        raise ZeroProbabilityError("state has no nonzero amplitude")
    return PureState(register, amps / norm)


def plus_state(register: Sequence[str]) -> PureState:
    register = _check_register(register)
    dim = 2 ** len(register)
    return PureState(register, np.full(dim, 1 / np.sqrt(dim), dtype=complex))


def tensor(a: State, b: State) -> State:
    """Tensor product with ``a``'s qubits first.  Mixed inputs give a DensityState."""
    if set(a.register) & set(b.register):
        raise RegisterError(f"registers overlap: {set(a.register) & set(b.register)}")
    register = a.register + b.register
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(register, np.kron(a.amplitudes, b.amplitudes))
    return DensityState(register, np.kron(to_density(a).matrix, to_density(b).matrix))


def reorder(state: State, register: Sequence[str]) -> State:
    """Permute ``state`` onto ``register`` (same label set, new order)."""
    register = _check_register(register)
    if set(register) != set(state.register) or len(register) != state.n:
        raise RegisterError(f"cannot reorder {state.register} onto {register}")
    perm = [state.index(q) for q in register]
    if isinstance(state, PureState):
        return PureState(register, np.transpose(state.tensor_view(), perm).reshape(-1))
    n = state.n
    axes = perm + [p + n for p in perm]
    mat = np.transpose(state.tensor_view(), axes).reshape(2**n, 2**n)
    return DensityState(register, mat)


def canonical_register(labels: Iterable[str]) -> tuple[str, ...]:
    """Canonical order: p1..p4, s1..s3, then any transient labels in given order."""
    labels = list(labels)
    known = [q for q in CANONICAL_ORDER if q in labels]
    return tuple(known + [q for q in labels if q not in CANONICAL_ORDER])


def relabel(state: State, mapping: Mapping[str, str]) -> State:
    register = tuple(mapping.get(q, q) for q in state.register)
    if isinstance(state, PureState):
        return PureState(register, state.amplitudes)
    return DensityState(register, state.matrix)


def _is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    return u.shape == (2, 2) and np.allclose(u.conj().T @ u, np.eye(2), atol=tol)


def _apply_1q(state: State, k: int, u: np.ndarray) -> State:
    if isinstance(state, PureState):
        t = np.moveaxis(np.tensordot(u, state.tensor_view(), axes=([1], [k])), 0, k)
        return PureState(state.register, t.reshape(-1))
    n = state.n
    t = np.moveaxis(np.tensordot(u, state.tensor_view(), axes=([1], [k])), 0, k)
    t = np.moveaxis(np.tensordot(u.conj(), t, axes=([1], [n + k])), 0, n + k)
    return DensityState(state.register, t.reshape(2**n, 2**n))


def apply_local(state: State, qubit: str, unitary: np.ndarray) -> State:
    u = np.asarray(unitary, dtype=complex)
    if not _is_unitary(u):
        raise ValueError("operator is not a 2x2 unitary")
    return _apply_1q(state, state.index(qubit), u)


def apply_pauli(state: State, op: PauliString) -> State:
    """Apply a Pauli string as an operator (sign included)."""
    for q, p in op.factors:
        state = _apply_1q(state, state.index(q), PAULI[p])
    if op.sign < 0:
        if isinstance(state, PureState):
            state = PureState(state.register, -state.amplitudes)
        # conjugation by -P equals conjugation by P for density matrices
    return state


def apply_cz(state: State, a: str, b: str) -> State:
    if a == b:
        raise RegisterError("controlled-Z needs two distinct qubits")
    ia, ib = state.index(a), state.index(b)
    n = state.n
    sel = [slice(None)] * n
    sel[ia] = sel[ib] = 1
    if isinstance(state, PureState):
        t = state.tensor_view().copy()
        t[tuple(sel)] *= -1
        return PureState(state.register, t.reshape(-1))
    t = state.tensor_view().copy()
    t[tuple(sel + [slice(None)] * n)] *= -1
    t[tuple([slice(None)] * n + sel)] *= -1
    return DensityState(state.register, t.reshape(2**n, 2**n))


def expectation(state: State, op: PauliString) -> float:
    if isinstance(state, PureState):
        value = np.vdot(state.amplitudes, apply_pauli(state, op).amplitudes)
    else:
        value = _trace_pauli(state, op)
    if abs(value.imag) > 1e-10:
        raise ArithmeticError(f"expectation of {op} has imaginary part {value.imag:.3g}")
    return float(value.real)


def _trace_pauli(state: DensityState, op: PauliString) -> complex:
    n = state.n
    t = state.tensor_view()
    for q, p in op.factors:
        k = state.index(q)
        t = np.moveaxis(np.tensordot(PAULI[p], t, axes=([1], [k])), 0, k)
    return op.sign * np.trace(t.reshape(2**n, 2**n))


def basis_vectors(basis: Basis) -> tuple[np.ndarray, np.ndarray]:
    """(+1 eigenvector, -1 eigenvector) for a Pauli label or Bloch angles (theta, phi)."""
    if isinstance(basis, str):
        try:
            return _PAULI_BASES[basis.upper()]
        except KeyError:
            raise ValueError(f"unknown basis {basis!r}") from None
    theta, phi = basis
    plus = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    minus = np.array([np.sin(theta / 2), -np.exp(1j * phi) * np.cos(theta / 2)])
    return plus, minus


def project(state: State, qubit: str, vector: np.ndarray, keep: bool = False) -> tuple[float, State]:
    """Project ``qubit`` onto the (normalized) ``vector``.

    Returns the Born probability and the renormalized post-state.  The qubit is
    removed from the register unless ``keep`` is set.
    """
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    k = state.index(qubit)
    n = state.n
    rest = state.register[:k] + state.register[k + 1:]
    if isinstance(state, PureState):
        reduced = np.tensordot(v.conj(), state.tensor_view(), axes=([0], [k]))
        prob = float(np.vdot(reduced, reduced).real)
        if prob <= 1e-12:
            raise ZeroProbabilityError(f"projection of {qubit} has probability {prob:.3g}")
        reduced = reduced / np.sqrt(prob)
        if keep:
            full = np.moveaxis(np.multiply.outer(v, reduced), 0, k)
            return prob, PureState(state.register, full.reshape(-1))
        return prob, PureState(rest, reduced.reshape(-1))
    t = np.tensordot(v.conj(), state.tensor_view(), axes=([0], [k]))
    t = np.tensordot(v, t, axes=([0], [n - 1 + k]))  # bra axis shifted by one
    m = 2 ** (n - 1)
    reduced = t.reshape(m, m)
    prob = float(np.trace(reduced).real)
    if prob <= 1e-12:
        raise ZeroProbabilityError(f"projection of {qubit} has probability {prob:.3g}")
    reduced = reduced / prob
    if keep:
        vv = np.outer(v, v.conj())
        full = np.multiply.outer(vv, reduced.reshape([2] * (2 * (n - 1))))
        # axes now: ket_k, bra_k, ket_rest..., bra_rest...
        order = list(range(2, 2 + n - 1))
        ket_axes = order[:k] + [0] + order[k:]
        bra_rest = list(range(2 + n - 1, 2 + 2 * (n - 1)))
        bra_axes = bra_rest[:k] + [1] + bra_rest[k:]
        full = np.transpose(full, ket_axes + bra_axes)
        return prob, DensityState(state.register, full.reshape(2**n, 2**n))
    return prob, DensityState(rest, reduced)


def measure(state: State, qubit: str, basis: Basis, outcome: int = 1, keep: bool = False) -> tuple[float, State]:
    """Projective measurement of ``qubit`` with the given eigenvalue ``outcome`` (+1 or -1)."""
    if outcome not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    plus, minus = basis_vectors(basis)
    return project(state, qubit, plus if outcome == 1 else minus, keep=keep)


def to_density(state: State) -> DensityState:
    if isinstance(state, DensityState):
        return state
    a = state.amplitudes
    return DensityState(state.register, np.outer(a, a.conj()))


def fidelity(a: State, b: PureState) -> float:
    """<b|rho_a|b>, after reordering ``a`` onto ``b``'s register."""
    a = reorder(a, b.register)
    if isinstance(a, PureState):
        return float(abs(np.vdot(b.amplitudes, a.amplitudes)) ** 2)
    return float(np.vdot(b.amplitudes, a.matrix @ b.amplitudes).real)


def partial_trace(state: State, keep: Sequence[str]) -> DensityState:
    rho = to_density(state)
    keep = _check_register(keep)
    rest = [q for q in rho.register if q not in keep]
    rho = reorder(rho, tuple(keep) + tuple(rest))
    dk, dr = 2 ** len(keep), 2 ** len(rest)
    t = rho.matrix.reshape(dk, dr, dk, dr)
    return DensityState(keep, np.einsum("arbr->ab", t))
