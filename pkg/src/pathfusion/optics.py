"""Second-quantized simulation of few-photon states over (path, polarization) modes.

A :class:`PhotonicState` maps occupation multisets (sorted tuples of modes, one
entry per photon) to the amplitude of the normalized Fock state.  Elements act
linearly on creation operators; the bosonic sqrt(n!) factors are handled when
products of creation operators are expanded.

Conventions
-----------
* Beam splitters put a factor ``i`` on reflection.
* Wave-plate angles are in degrees (slow axis from horizontal); phases in radians.
* Polarization qubits use the diagonal basis: ``|0> = (H - V)/sqrt(2)`` (-45 deg),
  ``|1> = (H + V)/sqrt(2)`` (+45 deg).
"""
from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .qubits import PureState, RegisterError, ZeroProbabilityError, canonical_register

H, V = "H", "V"
POLS = (H, V)

Mode = tuple[str, str]  # (path, polarization)
Occupation = tuple[Mode, ...]

_SQ2 = 1 / math.sqrt(2)
_ZERO = 1e-14


class RoutingError(ValueError):
    """Two inputs of a birefringent prism were sent to one output mode."""


@dataclass(frozen=True, eq=False)
class PhotonicState:
    terms: Mapping[Occupation, complex]

    def __post_init__(self):
        terms = {}
        counts = set()
        for occ, amp in self.terms.items():
            occ = tuple(sorted(tuple(m) for m in occ))
            for _, pol in occ:
                if pol not in POLS:
                    raise ValueError(f"unknown polarization {pol!r}")
            if abs(amp) > _ZERO:
                terms[occ] = terms.get(occ, 0) + complex(amp)
                counts.add(len(occ))
        if len(counts) > 1:
            raise ValueError(f"terms carry different photon numbers {sorted(counts)}")
        object.__setattr__(self, "terms", terms)

    @property
    def n_photons(self) -> int:
        return len(next(iter(self.terms))) if self.terms else 0

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.terms.values()))

    def normalized(self) -> "PhotonicState":
        nrm = self.norm()
        if nrm < _ZERO:
            raise ZeroProbabilityError("photonic state has zero norm")
        return PhotonicState({k: v / nrm for k, v in self.terms.items()})

    def paths(self) -> set[str]:
        return {m[0] for occ in self.terms for m in occ}

    def amplitude(self, modes: Iterable[Mode]) -> complex:
        return self.terms.get(tuple(sorted(tuple(m) for m in modes)), 0j)

    def __add__(self, other: "PhotonicState") -> "PhotonicState":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return PhotonicState(out)

    def scaled(self, c: complex) -> "PhotonicState":
        return PhotonicState({k: c * v for k, v in self.terms.items()})

    def __repr__(self):
        parts = [f"{a:.3g}{list(k)}" for k, a in list(self.terms.items())[:4]]
        return f"PhotonicState(N={self.n_photons}, {len(self.terms)} terms: {' + '.join(parts)}{' ...' if len(self.terms) > 4 else ''})"


def fock(*modes: Mode, amplitude: complex = 1.0) -> PhotonicState:
    return PhotonicState({tuple(modes): amplitude})


def bell_pair(paths: tuple[str, str]) -> PhotonicState:
    """(a+_{aH} a+_{bH} + a+_{aV} a+_{bV})/sqrt(2) |vac>."""
    a, b = paths
    if a == b:
        raise RegisterError("a Bell pair needs two distinct paths")
    return PhotonicState({((a, H), (b, H)): _SQ2, ((a, V), (b, V)): _SQ2})


def combine(*states: PhotonicState) -> PhotonicState:
    """Product of states living on disjoint paths."""
    out: dict[Occupation, complex] = {(): 1.0}
    seen: set[str] = set()
    for st in states:
        paths = st.paths()
        if paths & seen:
            raise RegisterError(f"states share paths {sorted(paths & seen)}")
        seen |= paths
        out = {k1 + k2: a1 * a2 for k1, a1 in out.items() for k2, a2 in st.terms.items()}
    return PhotonicState(out)


# --- elements -------------------------------------------------------------

def _jones_rotated(theta_deg: float, retardance_phase: complex) -> np.ndarray:
    t = math.radians(theta_deg)
    r = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    return r @ np.diag([1, retardance_phase]) @ r.T


def hwp_matrix(theta_deg: float) -> np.ndarray:
    return _jones_rotated(theta_deg, -1)


def qwp_matrix(theta_deg: float) -> np.ndarray:
    return _jones_rotated(theta_deg, 1j)


class Element:
    """Base class; subclasses give the image of each creation operator they touch."""

    kind: str = ""

    def creation_map(self) -> dict[Mode, list[tuple[Mode, complex]]]:
        raise NotImplementedError

    def paths(self) -> set[str]:
        return {m[0] for m in self.creation_map()}

    def to_dict(self) -> dict:
        raise NotImplementedError


def _jones_map(path: str, j: np.ndarray) -> dict[Mode, list[tuple[Mode, complex]]]:
    return {
        (path, pin): [((path, pout), complex(j[o, i])) for o, pout in enumerate(POLS)]
        for i, pin in enumerate(POLS)
    }


@dataclass(frozen=True)
class NPBS(Element):
    """50:50 non-polarizing beam splitter mixing two paths (outputs keep the labels)."""

    path_a: str
    path_b: str
    kind = "NPBS"

    def creation_map(self):
        out = {}
        for pol in POLS:
            a, b = (self.path_a, pol), (self.path_b, pol)
            out[a] = [(a, _SQ2), (b, 1j * _SQ2)]
            out[b] = [(a, 1j * _SQ2), (b, _SQ2)]
        return out

    def to_dict(self):
        return {"kind": self.kind, "paths": [self.path_a, self.path_b]}


@dataclass(frozen=True)
class PBS(Element):
    """Transmits H within each path; reflects V into the other path with phase i."""

    path_a: str
    path_b: str
    kind = "PBS"

    def creation_map(self):
        a, b = self.path_a, self.path_b
        return {
            (a, H): [((a, H), 1)],
            (b, H): [((b, H), 1)],
            (a, V): [((b, V), 1j)],
            (b, V): [((a, V), 1j)],
        }

    def to_dict(self):
        return {"kind": self.kind, "paths": [self.path_a, self.path_b]}


@dataclass(frozen=True)
class HWP(Element):
    path: str
    angle: float  # degrees
    kind = "HWP"

    def creation_map(self):
        return _jones_map(self.path, hwp_matrix(self.angle))

    def to_dict(self):
        return {"kind": self.kind, "paths": [self.path], "angle_deg": self.angle}


@dataclass(frozen=True)
class QWP(Element):
    path: str
    angle: float  # degrees
    kind = "QWP"

    def creation_map(self):
        return _jones_map(self.path, qwp_matrix(self.angle))

    def to_dict(self):
        return {"kind": self.kind, "paths": [self.path], "angle_deg": self.angle}


@dataclass(frozen=True)
class PhaseShifter(Element):
    path: str
    phase: float  # radians
    kind = "PS"

    def creation_map(self):
        ph = complex(np.exp(1j * self.phase))
        return {(self.path, pol): [((self.path, pol), ph)] for pol in POLS}

    def to_dict(self):
        return {"kind": self.kind, "paths": [self.path], "phase_rad": self.phase}


@dataclass(frozen=True)
class Polarizer(Element):
    """Linear polarizer; the blocked component is absorbed (norm drops)."""

    path: str
    angle: float  # degrees
    kind = "Polarizer"

    def creation_map(self):
        t = math.radians(self.angle)
        c, s = math.cos(t), math.sin(t)
        p = self.path
        return {
            (p, H): [((p, H), c * c), ((p, V), c * s)],
            (p, V): [((p, H), s * c), ((p, V), s * s)],
        }

    def to_dict(self):
        return {"kind": self.kind, "paths": [self.path], "angle_deg": self.angle}


@dataclass(frozen=True)
class BP(Element):
    """Birefringent prism: polarization-dependent walk-off as a fixed routing table.

    ``routes`` maps (input path, polarization) to an output path; polarization
    is preserved.  Unlisted modes pass untouched.
    """

    routes: tuple[tuple[Mode, str], ...]
    kind = "BP"

    def __post_init__(self):
        routes = tuple((tuple(m), out) for m, out in (self.routes.items() if isinstance(self.routes, Mapping) else self.routes))
        object.__setattr__(self, "routes", routes)
        outputs = [(out, m[1]) for m, out in routes]
        dup = [m for m, c in Counter(outputs).items() if c > 1]
        if dup:
            raise RoutingError(f"birefringent prism routes several inputs to {dup}")

    def creation_map(self):
        return {m: [((out, m[1]), 1)] for m, out in self.routes}

    def check_collisions(self, state: PhotonicState) -> None:
        inputs = {m for m, _ in self.routes}
        outputs = {(out, m[1]) for m, out in self.routes}
        blocked = outputs - inputs
        for occ in state.terms:
            hit = blocked & set(occ)
            if hit:
                raise RoutingError(f"prism output modes {sorted(hit)} already occupied")

    def to_dict(self):
        return {
            "kind": self.kind,
            "routes": [{"in": [m[0], m[1]], "out": out} for m, out in self.routes],
        }


def apply_element(state: PhotonicState, e: Element) -> PhotonicState:
    cmap = e.creation_map()
    if isinstance(e, BP):
        e.check_collisions(state)
    out: dict[Occupation, complex] = defaultdict(complex)
    for occ, amp in state.terms.items():
        occupation = Counter(occ)
        # normalized Fock state = prod (a+)^n / sqrt(n!)
        coeff = amp / math.sqrt(math.prod(math.factorial(n) for n in occupation.values()))
        monomials: dict[Occupation, complex] = {(): coeff}
        for mode in occ:
            images = cmap.get(mode, [(mode, 1)])
            nxt: dict[Occupation, complex] = defaultdict(complex)
            for mono, c in monomials.items():
                for m2, u in images:
                    if u != 0:
                        nxt[mono + (m2,)] += c * u
            monomials = nxt
        for mono, c in monomials.items():
            key = tuple(sorted(mono))
            k = Counter(key)
            out[key] += c * math.sqrt(math.prod(math.factorial(n) for n in k.values()))
    return PhotonicState(dict(out))


def apply_elements(state: PhotonicState, elements: Iterable[Element]) -> PhotonicState:
    for e in elements:
        state = apply_element(state, e)
    return state


# --- detection and encoding -----------------------------------------------

@dataclass(frozen=True)
class DetectorGroup:
    name: str
    modes: frozenset[Mode]

    @classmethod
    def on_paths(cls, name: str, paths: Iterable[str]) -> "DetectorGroup":
        return cls(name, frozenset((p, pol) for p in paths for pol in POLS))

    def to_dict(self):
        return {"name": self.name, "modes": [list(m) for m in sorted(self.modes)]}


def postselect(state: PhotonicState, groups: Sequence[DetectorGroup]) -> tuple[float, PhotonicState]:
    """Keep the sector with exactly one photon in every detector group."""
    seen: set[Mode] = set()
    for g in groups:
        if g.modes & seen:
            raise ValueError(f"detector group {g.name} overlaps another group")
        seen |= g.modes
    if state.n_photons != len(groups):
        raise ValueError(f"{state.n_photons} photons cannot give one click in each of {len(groups)} groups")
    kept = {}
    for occ, amp in state.terms.items():
        if all(sum(1 for m in occ if m in g.modes) == 1 for g in groups):
            kept[occ] = amp
    sub = PhotonicState(kept)
    prob = sub.norm() ** 2
    if prob < 1e-14:
        raise ZeroProbabilityError("post-selection probability is zero")
    return prob, sub.normalized()


@dataclass(frozen=True)
class PhotonEncoding:
    """How the photon clicking a detector group maps onto qubits.

    ``path_bits`` assigns each accepted path to a value of ``path_qubit``;
    with ``path_qubit=None`` the group must see a single path.
    """

    group: str
    pol_qubit: Optional[str]
    path_qubit: Optional[str] = None
    path_bits: Mapping[str, int] = field(default_factory=dict)

    def to_dict(self):
        return {
            "group": self.group,
            "pol_qubit": self.pol_qubit,
            "path_qubit": self.path_qubit,
            "path_bits": dict(self.path_bits),
        }


# amplitude <logical|pol>: |0>=(H-V)/sqrt2, |1>=(H+V)/sqrt2
_POL_TO_LOGICAL = {H: (_SQ2, _SQ2), V: (-_SQ2, _SQ2)}


def encode_to_qubits(
    state: PhotonicState,
    groups: Sequence[DetectorGroup],
    encodings: Sequence[PhotonEncoding],
    register: Optional[Sequence[str]] = None,
) -> PureState:
    """Map a one-photon-per-group state onto the qubit register."""
    by_group = {g.name: g for g in groups}
    labels = []
    for enc in encodings:
        if enc.group not in by_group:
            raise ValueError(f"no detector group {enc.group!r}")
        labels += [q for q in (enc.pol_qubit, enc.path_qubit) if q is not None]
    register = tuple(register) if register is not None else canonical_register(labels)
    if sorted(register) != sorted(labels):
        raise RegisterError(f"register {register} does not match encoded qubits {labels}")
    pos = {q: i for i, q in enumerate(register)}
    amps = np.zeros(2 ** len(register), dtype=complex)
    unencoded_pols: dict[str, set[str]] = {}
    for occ, amp in state.terms.items():
        # list of (qubit index, [amplitude for value 0, value 1]) factors
        factors = []
        for enc in encodings:
            g = by_group[enc.group]
            inside = [m for m in occ if m in g.modes]
            if len(inside) != 1:
                raise ValueError(f"group {enc.group} holds {len(inside)} photons; post-select first")
            path, pol = inside[0]
            if enc.path_qubit is not None:
                try:
                    bit = enc.path_bits[path]
                except KeyError:
                    raise ValueError(f"path {path!r} has no bit assignment for {enc.path_qubit}") from None
                factors.append((pos[enc.path_qubit], (1.0, 0.0) if bit == 0 else (0.0, 1.0)))
            elif len({m[0] for m in g.modes}) > 1:
                raise ValueError(f"group {enc.group} spans several paths but encodes no path qubit")
            if enc.pol_qubit is not None:
                factors.append((pos[enc.pol_qubit], _POL_TO_LOGICAL[pol]))
            else:
                seen = unencoded_pols.setdefault(enc.group, set())
                seen.add(pol)
                if len(seen) > 1:
                    raise ValueError(f"group {enc.group} sees both polarizations but encodes none")
        vec = np.array([amp])
        order = []
        for idx, f in factors:
            vec = np.kron(vec, np.array(f, dtype=complex))
            order.append(idx)
        t = vec.reshape([2] * len(order)) if order else vec
        t = np.transpose(t, np.argsort(order)) if order else t
        amps += t.reshape(-1)
    nrm = np.linalg.norm(amps)
    if nrm < 1e-14:
        raise ZeroProbabilityError("encoded state vanishes")
    return PureState(register, amps / nrm)


# --- the experiment -------------------------------------------------------

FUSION_VARIANTS = ("bp", "npbs", "none")


@dataclass(frozen=True)
class ExperimentCircuit:
    sources: tuple[tuple[str, str], ...]
    elements: tuple[Element, ...]
    groups: tuple[DetectorGroup, ...]
    encodings: tuple[PhotonEncoding, ...]
    register: tuple[str, ...]
    variant: str
    calibration: tuple[str, ...] = ()

    def initial_state(self) -> PhotonicState:
        return combine(*(bell_pair(p) for p in self.sources))

    def to_json(self) -> str:
        return json.dumps(
            {
                "variant": self.variant,
                "sources": [list(s) for s in self.sources],
                "elements": [e.to_dict() for e in self.elements],
                "detectors": [g.to_dict() for g in self.groups],
                "encodings": [e.to_dict() for e in self.encodings],
                "register": list(self.register),
                "calibration": list(self.calibration),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentCircuit":
        data = json.loads(text)
        return cls(
            sources=tuple(tuple(s) for s in data["sources"]),
            elements=tuple(element_from_dict(e) for e in data["elements"]),
            groups=tuple(DetectorGroup(g["name"], frozenset(tuple(m) for m in g["modes"])) for g in data["detectors"]),
            encodings=tuple(
                PhotonEncoding(e["group"], e["pol_qubit"], e["path_qubit"], dict(e["path_bits"])) for e in data["encodings"]
            ),
            register=tuple(data["register"]),
            variant=data["variant"],
            calibration=tuple(data.get("calibration", ())),
        )


def element_from_dict(d: Mapping) -> Element:
    kind = d["kind"]
    if kind == "NPBS":
        return NPBS(*d["paths"])
    if kind == "PBS":
        return PBS(*d["paths"])
    if kind == "HWP":
        return HWP(d["paths"][0], float(d["angle_deg"]))
    if kind == "QWP":
        return QWP(d["paths"][0], float(d["angle_deg"]))
    if kind == "PS":
        return PhaseShifter(d["paths"][0], float(d["phase_rad"]))
    if kind == "Polarizer":
        return Polarizer(d["paths"][0], float(d["angle_deg"]))
    if kind == "BP":
        return BP(tuple(((r["in"][0], r["in"][1]), r["out"]) for r in d["routes"]))
    raise ValueError(f"unknown element kind {kind!r}")


def _npbs_side(photon: int) -> list[Element]:
    """Path split of the NPBS-side photon with the polarization flip on arm 1."""
    p0, p1 = f"s{photon}_0", f"s{photon}_1"
    return [NPBS(p0, p1), HWP(p1, 45.0), PhaseShifter(p1, math.pi / 2)]


def build_experiment_circuit(variant: str = "bp") -> ExperimentCircuit:
    """Ideal optical circuit for the seven-qubit state.

    ``variant`` selects the fusion hardware: ``"bp"`` (birefringent prism
    splitting and recombining both beams), ``"npbs"`` (PBS splitting plus a
    50:50 beam splitter on the two middle arms, one output discarded) or
    ``"none"`` (two independent four-qubit chains).

    Photons 1 and 3 come from one Bell source, photons 2 and 4 from the other.
    Photon 3's path arms are ``a0``/``a1``-like modes, photon 4's
    ``c0``/``c1``-like; labels are chosen per variant below.
    """
    if variant not in FUSION_VARIANTS:
        raise ValueError(f"unknown fusion variant {variant!r}; choose from {FUSION_VARIANTS}")
    sources = (("s1_0", "u3"), ("s2_0", "u4"))
    elements: list[Element] = _npbs_side(1) + _npbs_side(2)
    calibration = ["PS(+pi/2) on s1_1 and s2_1 fixes the NPBS reflection phase"]
    g1 = DetectorGroup.on_paths("SPC1", ["s1_0", "s1_1"])
    g2 = DetectorGroup.on_paths("SPC2", ["s2_0", "s2_1"])
    enc1 = PhotonEncoding("SPC1", "p1", "s1", {"s1_0": 0, "s1_1": 1})
    enc2 = PhotonEncoding("SPC2", "p2", "s2", {"s2_0": 0, "s2_1": 1})

    if variant == "bp":
        # the V arm of photon 3 and the H arm of photon 4 leave in one beam
        elements.append(BP((
            (("u3", H), "s3_0"),
            (("u3", V), "c4"),
            (("u4", H), "c4"),
            (("u4", V), "s3_1"),
        )))
        g3 = DetectorGroup.on_paths("SPC3", ["s3_0", "s3_1"])
        g4 = DetectorGroup.on_paths("SPC4", ["c4"])
        enc3 = PhotonEncoding("SPC3", "p3", "s3", {"s3_0": 0, "s3_1": 1})
        enc4 = PhotonEncoding("SPC4", "p4")
        register = canonical_register(["p1", "p2", "p3", "p4", "s1", "s2", "s3"])
    elif variant == "npbs":
        elements += [
            PBS("u3", "a1"),
            PBS("u4", "c1"),
            PhaseShifter("a1", -math.pi / 2),
            PhaseShifter("c1", -math.pi / 2),
            # u4 carries photon 4's H arm: it meets photon 3's V arm
            NPBS("a1", "u4"),
            PhaseShifter("c1", math.pi / 2),
        ]
        calibration += [
            "PS(-pi/2) on a1 and c1 cancels the PBS reflection phase",
            "PS(+pi/2) on c1 equalizes the fusion branches after the NPBS",
        ]
        g3 = DetectorGroup.on_paths("SPC3", ["u3", "c1"])
        g4 = DetectorGroup.on_paths("SPC4", ["a1"])  # the u4 output port is discarded
        enc3 = PhotonEncoding("SPC3", "p3", "s3", {"u3": 0, "c1": 1})
        enc4 = PhotonEncoding("SPC4", "p4")
        register = canonical_register(["p1", "p2", "p3", "p4", "s1", "s2", "s3"])
    else:
        elements.append(BP((
            (("u3", H), "sA_0"),
            (("u3", V), "sA_1"),
            (("u4", H), "sB_0"),
            (("u4", V), "sB_1"),
        )))
        g3 = DetectorGroup.on_paths("SPC3", ["sA_0", "sA_1"])
        g4 = DetectorGroup.on_paths("SPC4", ["sB_0", "sB_1"])
        enc3 = PhotonEncoding("SPC3", "p3", "sA", {"sA_0": 0, "sA_1": 1})
        enc4 = PhotonEncoding("SPC4", "p4", "sB", {"sB_0": 0, "sB_1": 1})
        register = canonical_register(["p1", "p2", "p3", "p4", "s1", "s2", "sA", "sB"])
    return ExperimentCircuit(
        sources=sources,
        elements=tuple(elements),
        groups=(g1, g2, g3, g4),
        encodings=(enc1, enc2, enc3, enc4),
        register=register,
        variant=variant,
        calibration=tuple(calibration),
    )


@dataclass(frozen=True)
class CircuitRun:
    probability: float
    photonic: PhotonicState
    qubits: PureState


def run_circuit(circuit: ExperimentCircuit) -> CircuitRun:
    final = apply_elements(circuit.initial_state(), circuit.elements)
    prob, kept = postselect(final, circuit.groups)
    return CircuitRun(prob, kept, encode_to_qubits(kept, circuit.groups, circuit.encodings, circuit.register))


def fusion_interferometer(variant: str = "bp") -> tuple[PhotonicState, list[Element], list[DetectorGroup], list[PhotonEncoding]]:
    """Two-photon fusion gate alone, fed with path qubits in |+>.

    Photon 1 (paths ``a0``/``a1``) carries H on both arms, photon 2
    (``b0``/``b1``) carries V, so the BP variant can merge ``a1`` with ``b0``.
    Returns the input state, elements, detector groups and the encoding of the
    surviving path qubit ``f`` (with the photons' polarizations ``pa``, ``pb``).
    """
    a = PhotonicState({((p, H),): _SQ2 for p in ("a0", "a1")})
    b = PhotonicState({((p, V),): _SQ2 for p in ("b0", "b1")})
    state = combine(a, b)
    if variant == "bp":
        # orthogonal polarizations let a1 and b0 share one output beam
        elements: list[Element] = [BP(((("a1", H), "m"), (("b0", V), "m")))]
        groups = [DetectorGroup.on_paths("D1", ["a0", "b1"]), DetectorGroup.on_paths("D2", ["m"])]
    elif variant == "npbs":
        elements = [NPBS("a1", "b0"), PhaseShifter("b1", math.pi / 2)]
        groups = [DetectorGroup.on_paths("D1", ["a0", "b1"]), DetectorGroup.on_paths("D2", ["a1"])]
    else:
        raise ValueError(f"unknown fusion variant {variant!r}")
    encodings = [PhotonEncoding("D1", "pa", "f", {"a0": 0, "b1": 1}), PhotonEncoding("D2", "pb")]
    return state, elements, groups, encodings


def s3_analyzer(phase: float) -> list[Element]:
    """Photon-3 analyzer behind the fusion prism (BP variant paths).

    A HWP at 45 deg swaps polarizations on both arms, a second prism merges the
    arms into ``out3`` and a QWP-HWP-QWP stack swaps polarizations again while setting
    the relative phase ``phase`` between the (polarization-tagged) arms.  Follow with a :class:`Polarizer` on
    ``out3`` to pick the joint polarization/path projection.
    """
    # QWP(45) HWP(t) QWP(-45): H -> e^{2it} V, V -> -e^{-2it} H
    t = math.degrees(phase - math.pi) / 4
    return [
        HWP("s3_0", 45.0),
        HWP("s3_1", 45.0),
        BP(((("s3_0", V), "out3"), (("s3_1", H), "out3"))),
        QWP("out3", 45.0),
        HWP("out3", t),
        QWP("out3", -45.0),
    ]
