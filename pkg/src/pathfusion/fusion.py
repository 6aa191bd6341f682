"""Type-I fusion of path qubits, at state level and as a graph rewrite."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import PATH, GraphSpec, Vertex
from .qubits import DensityState, PureState, RegisterError, ZeroProbabilityError

SWAP_ON_ONE = "swap-on-fused-1"


@dataclass(frozen=True)
class FusionOutcome:
    success_probability: float
    post_state: PureState | DensityState
    swapped_convention: str = SWAP_ON_ONE
    # local correction applied to reach the +1-stabilizer graph state; the bare
    # projector already lands there, so nothing is applied
    correction: str = "none"


def _fuse_axes(t: np.ndarray, ia: int, ib: int) -> np.ndarray:
    """Keep the ia==ib diagonal of a tensor, leaving the shared index at ia."""
    sel0 = [slice(None)] * t.ndim
    sel1 = [slice(None)] * t.ndim
    sel0[ia] = sel0[ib] = 0
    sel1[ia] = sel1[ib] = 1
    # removing ib shifts ia down when ib < ia
    pos = ia - (1 if ib < ia else 0)
    return np.stack([t[tuple(sel0)], t[tuple(sel1)]], axis=pos)


def fuse_ideal(state: PureState | DensityState, a: str, b: str, fused: str) -> FusionOutcome:
    """Apply K = |0><00| + |1><11| on qubits ``a``, ``b`` and renormalize.

    The surviving qubit takes ``a``'s register slot and is renamed ``fused``.
    """
    if a == b:
        raise RegisterError("fusion needs two distinct qubits")
    ia, ib = state.index(a), state.index(b)
    if fused in state.register and fused not in (a, b):
        raise RegisterError(f"fused label {fused!r} already in register")
    register = tuple(fused if q == a else q for q in state.register if q != b)
    n = state.n
    if isinstance(state, PureState):
        amps = _fuse_axes(state.tensor_view(), ia, ib).reshape(-1)
        prob = float(np.vdot(amps, amps).real)
        if prob <= 1e-14:
            raise ZeroProbabilityError(f"fusion of {a},{b} annihilates the state")
        return FusionOutcome(prob, PureState(register, amps / np.sqrt(prob)))
    t = _fuse_axes(state.tensor_view(), ia, ib)  # ket side done
    t = _fuse_axes(t, n - 1 + ia, n - 1 + ib)
    m = 2 ** (n - 1)
    mat = t.reshape(m, m)
    prob = float(np.trace(mat).real)
    if prob <= 1e-14:
        raise ZeroProbabilityError(f"fusion of {a},{b} annihilates the state")
    return FusionOutcome(prob, DensityState(register, mat / prob))


def controlled_swap(state: PureState, control: str, x: str, y: str) -> PureState:
    """Exchange qubits ``x`` and ``y`` on the branch where ``control`` is 1."""
    ic, ix, iy = state.index(control), state.index(x), state.index(y)
    if len({ic, ix, iy}) != 3:
        raise RegisterError("controlled swap needs three distinct qubits")
    t = state.tensor_view().copy()
    sel = [slice(None)] * state.n
    sel[ic] = 1
    branch = t[tuple(sel)]
    # after dropping the control axis, later axes shift down by one
    jx, jy = (ix - (ix > ic)), (iy - (iy > ic))
    t[tuple(sel)] = np.swapaxes(branch, jx, jy)
    return PureState(state.register, t.reshape(-1))


def fuse_physical(state: PureState, a: str, b: str, pol_a: str, pol_b: str, fused: str) -> FusionOutcome:
    """Fusion as realized by the interferometer: the two photons' polarization
    qubits trade places when the fused path qubit is |1>, then the paths fuse."""
    labels = {a, b, pol_a, pol_b}
    if len(labels) != 4:
        raise RegisterError("physical fusion needs four distinct qubits")
    for q in labels:
        state.index(q)
    # on the surviving K branch, a == b == fused value
    swapped = controlled_swap(state, a, pol_a, pol_b)
    return fuse_ideal(swapped, a, b, fused)


def fuse_graph(g1: GraphSpec, a: str, g2: GraphSpec, b: str, fused: str) -> GraphSpec:
    """Type-I fusion rewrite: ``a`` and ``b`` merge into ``fused`` with N(a) | N(b)."""
    if g1.kind(a) != PATH or g2.kind(b) != PATH:
        raise ValueError("only path qubits can be fused")
    overlap = set(g1.ids) & set(g2.ids)
    if overlap:
        raise RegisterError(f"graphs share vertex labels {sorted(overlap)}")
    taken = (set(g1.ids) | set(g2.ids)) - {a, b}
    if fused in taken:
        raise RegisterError(f"fused label {fused!r} already used")
    photon = g1.vertex(a).photon
    vertices = []
    for v in g1.vertices:
        vertices.append(Vertex(fused, PATH, photon) if v.id == a else v)
    vertices.extend(v for v in g2.vertices if v.id != b)
    rename = {a: fused, b: fused}
    edges = {frozenset(rename.get(q, q) for q in e) for e in g1.edges | g2.edges}
    return GraphSpec(tuple(vertices), frozenset(edges))
