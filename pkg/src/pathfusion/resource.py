"""Seven-qubit resource state built from the graph model or the optical circuit."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graphs import graph_to_state, paper_graph_4p7q
from .noise import NoiseModel, apply_post_fusion, noisy_state
from .qubits import DensityState, PureState

BUILDS = ("graph", "optics-npbs", "optics-bp")


@dataclass
class Resource:
    state: PureState | DensityState
    build: str
    postselection_probability: Optional[float] = None  # optics builds only


def build_resource(build: str = "graph", noise: Optional[NoiseModel] = None) -> Resource:
    """Ideal or noisy seven-qubit state.

    Optics builds run the full photonic circuit; noise on them is limited to
    the channels that act after fusion.
    """
    if build not in BUILDS:
        raise ValueError(f"unknown build {build!r}; expected one of {BUILDS}")
    if build == "graph":
        state = graph_to_state(paper_graph_4p7q()) if noise is None else noisy_state(noise)
        return Resource(state, build)
    from .optics import build_experiment_circuit, run_circuit

    run = run_circuit(build_experiment_circuit(build.split("-", 1)[1]))
    state = run.qubits if noise is None else apply_post_fusion(run.qubits, noise)
    return Resource(state, build, run.probability)


def build_state(build: str = "graph", noise: Optional[NoiseModel] = None) -> PureState | DensityState:
    return build_resource(build, noise).state
