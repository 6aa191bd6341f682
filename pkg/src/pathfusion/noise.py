"""Noise channels, the calibrated noise model of the seven-qubit source, and
counting statistics."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import numpy as np

from .fusion import fuse_ideal
from .graphs import (
    GraphSpec,
    WitnessReport,
    measurement_settings,
    paper_graph_4p7q,
    stabilizer,
    witness_from_counts,
    witness_value,
)
from .qubits import (
    CANONICAL_ORDER,
    HADAMARD,
    PAULI,
    DensityState,
    PureState,
    apply_cz,
    apply_local,
    basis_vectors,
    canonical_register,
    expectation,
    make_state,
    partial_trace,
    plus_state,
    reorder,
    tensor,
    to_density,
)


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


# --- channels -------------------------------------------------------------

def apply_werner(state: DensityState, pair: tuple[str, str], weight: float) -> DensityState:
    """rho -> (1-w) rho + w (I/4 (x) Tr_pair rho) on the two qubits in ``pair``."""
    weight = _check_unit("Werner weight", weight)
    rho = to_density(state)
    a, b = pair
    if a == b:
        raise ValueError("Werner channel needs two distinct qubits")
    rest = [q for q in rho.register if q not in pair]
    order = (a, b, *rest)
    r = reorder(rho, order)
    if rest:
        reduced = partial_trace(r, rest).matrix
        mixed = np.kron(np.eye(4) / 4, reduced)
    else:
        mixed = np.eye(4) / 4
    out = DensityState(order, (1 - weight) * r.matrix + weight * mixed)
    return reorder(out, rho.register)


def _pauli_channel(state: DensityState, qubit: str, probs: Mapping[str, float]) -> DensityState:
    rho = to_density(state)
    k = rho.index(qubit)
    n = rho.n
    t = rho.tensor_view()
    out = np.zeros_like(t)
    for p, w in probs.items():
        if w == 0:
            continue
        u = PAULI[p]
        s = np.moveaxis(np.tensordot(u, t, axes=([1], [k])), 0, k)
        s = np.moveaxis(np.tensordot(u.conj(), s, axes=([1], [n + k])), 0, n + k)
        out = out + w * s
    return DensityState(rho.register, out.reshape(2**n, 2**n))


def apply_dephasing(state: DensityState, qubit: str, visibility: float) -> DensityState:
    """Scale the Z-basis coherences of ``qubit`` by ``visibility``."""
    visibility = _check_unit("visibility", visibility)
    p = (1 - visibility) / 2
    return _pauli_channel(state, qubit, {"I": 1 - p, "Z": p})


def apply_depolarizing(state: DensityState, qubit: str, eps: float) -> DensityState:
    """rho -> (1-eps) rho + eps/3 (X rho X + Y rho Y + Z rho Z)."""
    eps = _check_unit("depolarizing strength", eps)
    return _pauli_channel(state, qubit, {"I": 1 - eps, "X": eps / 3, "Y": eps / 3, "Z": eps / 3})


def concurrence(state: DensityState) -> float:
    """Wootters concurrence of a two-qubit state."""
    rho = to_density(state).matrix
    if rho.shape != (4, 4):
        raise ValueError("concurrence is defined for two qubits")
    yy = np.kron(PAULI["Y"], PAULI["Y"])
    r = rho @ yy @ rho.conj() @ yy
    lam = np.sqrt(np.clip(np.sort(np.linalg.eigvals(r).real)[::-1], 0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def werner_weight_for_concurrence(c: float) -> float:
    """Inverse of C = max(0, (3(1-w) - 1)/2) on the entangled branch."""
    c = _check_unit("concurrence", c)
    return 2 * (1 - c) / 3


# --- the calibrated model -------------------------------------------------

@dataclass(frozen=True)
class NoiseModel:
    """Effective imperfections of the seven-qubit source.

    ``bell_white_noise`` mixes each Bell pair with white noise (Werner weight),
    ``s3_visibility`` keeps that fraction of the fused path qubit's coherence,
    ``path_dephasing`` and ``polarization_dephasing`` remove that fraction of
    the coherence of every path or polarization qubit, and
    ``per_qubit_depolarizing`` depolarizes all seven qubits.
    """

    bell_white_noise: float = 0.0
    s3_visibility: float = 1.0
    path_dephasing: float = 0.0
    polarization_dephasing: float = 0.0
    per_qubit_depolarizing: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _check_unit(f.name, getattr(self, f.name)))

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Mapping) -> "NoiseModel":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown noise field(s) {sorted(unknown)}; expected {sorted(known)}")
        values = {}
        for k, v in data.items():
            try:
                values[k] = float(v)
            except (TypeError, ValueError):
                raise ValueError(f"noise field {k!r}: expected a number, got {v!r}") from None
        return cls(**values)

    @classmethod
    def from_json(cls, text: str) -> "NoiseModel":
        return cls.from_dict(json.loads(text))

    @property
    def is_ideal(self) -> bool:
        return self == NoiseModel()


BELL_REGISTER = ("sA", "p1")


def werner_bell_pair(weight: float, register: tuple[str, str] = BELL_REGISTER) -> DensityState:
    bell = make_state(register, [("00", 1), ("11", 1)])
    return apply_werner(to_density(bell), register, weight)


def encode_pair(pair: DensityState, photon_a: tuple[str, str], photon_b: tuple[str, str]) -> DensityState:
    """Qubit-level 2P4Q generator acting on a polarization Bell pair.

    ``pair`` lives on (path qubit of photon A, polarization qubit of photon B).
    Photon A = (path, pol): its H/V label becomes the path value and its
    polarization qubit is tied to it by a CZ.  Photon B = (pol, path): its H/V
    label is rotated into the diagonal basis and its path qubit is tied to it by
    a CZ.  Yields the chain path_B - pol_B - path_A - pol_A.
    """
    s_a, p_a = photon_a
    p_b, s_b = photon_b
    rho = DensityState((s_a, p_b), pair.matrix)
    rho = apply_local(rho, p_b, HADAMARD)
    rho = tensor(rho, to_density(plus_state((p_a, s_b))))
    rho = apply_cz(rho, s_a, p_a)
    rho = apply_cz(rho, s_b, p_b)
    return rho


@lru_cache(maxsize=512)
def _fused_source(weight: float) -> DensityState:
    pair = werner_bell_pair(weight)
    chain1 = encode_pair(pair, ("sA", "p3"), ("p1", "s1"))
    chain2 = encode_pair(DensityState(("sB", "p2"), pair.matrix), ("sB", "p4"), ("p2", "s2"))
    fused = fuse_ideal(tensor(chain1, chain2), "sA", "sB", "s3").post_state
    return reorder(fused, CANONICAL_ORDER)


def apply_post_fusion(state: PureState | DensityState, model: NoiseModel) -> DensityState:
    """Dephasing and depolarizing channels of ``model`` on a fused seven-qubit state.

    Werner noise acts on the Bell pairs before fusion and cannot be added here.
    """
    if model.bell_white_noise > 0:
        raise ValueError("Bell-pair white noise acts before fusion; build the state with noisy_state")
    rho = to_density(state)
    if model.s3_visibility < 1:
        rho = apply_dephasing(rho, "s3", model.s3_visibility)
    if model.path_dephasing > 0:
        for q in ("s1", "s2", "s3"):
            rho = apply_dephasing(rho, q, 1 - model.path_dephasing)
    if model.polarization_dephasing > 0:
        for q in ("p1", "p2", "p3", "p4"):
            rho = apply_dephasing(rho, q, 1 - model.polarization_dephasing)
    if model.per_qubit_depolarizing > 0:
        for q in CANONICAL_ORDER:
            rho = apply_depolarizing(rho, q, model.per_qubit_depolarizing)
    return rho


def noisy_state(model: Optional[NoiseModel] = None) -> DensityState:
    """Seven-qubit state with the model's channels applied in source order.

    Werner noise hits both Bell pairs before the chains are fused; dephasing and
    depolarizing act on the fused state.
    """
    model = model or NoiseModel()
    source = _fused_source(model.bell_white_noise)
    return apply_post_fusion(source, NoiseModel(**{**model.as_dict(), "bell_white_noise": 0.0}))


def stabilizer_profile(model: Optional[NoiseModel] = None, g: Optional[GraphSpec] = None) -> dict[str, float]:
    """Stabilizer expectations of :func:`noisy_state`, computed densely."""
    g = g or paper_graph_4p7q()
    rho = noisy_state(model)
    return {q: expectation(rho, stabilizer(g, q).pauli) for q in CANONICAL_ORDER}


@lru_cache(maxsize=512)
def _source_profile(weight: float) -> tuple[tuple[str, float], ...]:
    g = paper_graph_4p7q()
    rho = _fused_source(weight)
    return tuple((q, expectation(rho, stabilizer(g, q).pauli)) for q in CANONICAL_ORDER)


def coherence_retention(model: NoiseModel) -> dict[str, float]:
    """Factor by which each qubit's dephasing channels scale X or Y on it."""
    path = 1 - model.path_dephasing
    pol = 1 - model.polarization_dephasing
    out = {q: pol for q in ("p1", "p2", "p3", "p4")}
    out.update(s1=path, s2=path, s3=path * model.s3_visibility)
    return out


def fast_stabilizer_profile(model: Optional[NoiseModel] = None) -> dict[str, float]:
    """Closed form of :func:`stabilizer_profile` for the seven-qubit graph.

    Every channel after fusion is a Pauli channel, so a Pauli string is only
    rescaled: by the dephasing retention of each qubit where it acts as X or Y,
    and by 1 - 4 eps / 3 for each qubit in its support.
    """
    model = model or NoiseModel()
    g = paper_graph_4p7q()
    keep = coherence_retention(model)
    depol = 1 - 4 * model.per_qubit_depolarizing / 3
    out = {}
    for q, value in _source_profile(model.bell_white_noise):
        factors = stabilizer(g, q).pauli.as_dict()
        for label, p in factors.items():
            if p in "XY":
                value *= keep[label]
            value *= depol
        out[q] = value
    return out


# --- fitting --------------------------------------------------------------

FIT_PARAMETERS = ("s3_visibility", "path_dephasing", "polarization_dephasing")


class FitError(ArithmeticError):
    """The stabilizer targets admit no weighted least-squares fit."""


@dataclass
class FitResult:
    model: NoiseModel
    chi2: float
    predicted: dict[str, float]
    residuals: dict[str, float]  # (model - target) / sigma
    sigmas: dict[str, float]
    evaluations: int
    parameters: tuple[str, ...] = FIT_PARAMETERS

    def within(self, k: float = 2.0) -> bool:
        return all(abs(r) <= k for r in self.residuals.values())


def effective_sigmas(targets: Mapping[str, tuple[float, float]]) -> dict[str, float]:
    """Replace zero uncertainties by the smallest nonzero one in the table."""
    positive = [s for _, s in targets.values() if s > 0]
    if not positive:
        raise FitError("all target uncertainties are zero; the weighted fit is undefined")
    floor = min(positive)
    return {q: (s if s > 0 else floor) for q, (_, s) in targets.items()}


def fit_noise(
    targets: Mapping[str, tuple[float, float]],
    parameters: Sequence[str] = FIT_PARAMETERS,
    base: Optional[NoiseModel] = None,
    grid_points: int = 21,
    tol: float = 1e-4,
) -> FitResult:
    """Weighted least-squares fit of three model parameters to stabilizer targets.

    Parameters not in ``parameters`` keep their value from ``base``.  Zero
    uncertainties are replaced by the smallest nonzero one (see
    :func:`effective_sigmas`).

    A ``grid_points``**3 grid over [0, 1]^3 picks the start; coordinate descent
    with step halving refines it until the step falls below ``tol``.  Ties are
    broken by grid order, so the result is deterministic.
    """
    missing = set(CANONICAL_ORDER) - set(targets)
    if missing:
        raise ValueError(f"targets missing for {sorted(missing)}")
    parameters = tuple(parameters)
    if len(parameters) != 3 or len(set(parameters)) != 3:
        raise ValueError("fit_noise adjusts exactly three distinct parameters")
    base = base or NoiseModel()
    sigmas = effective_sigmas(targets)
    keys = sorted(targets)
    target_v = np.array([targets[q][0] for q in keys])
    sigma_v = np.array([sigmas[q] for q in keys])
    evals = 0

    def model_at(x) -> NoiseModel:
        return NoiseModel(**{**base.as_dict(), **dict(zip(parameters, (float(v) for v in x)))})

    def chi2(x) -> float:
        nonlocal evals
        evals += 1
        prof = fast_stabilizer_profile(model_at(x))
        r = (np.array([prof[q] for q in keys]) - target_v) / sigma_v
        return float(r @ r)

    axis = np.linspace(0.0, 1.0, grid_points)
    best_x, best = None, math.inf
    for x in itertools.product(axis, repeat=3):
        c = chi2(x)
        if c < best - 1e-12:
            best_x, best = np.array(x), c
    step = axis[1] - axis[0]
    x = best_x
    while step >= tol:
        improved = False
        for i in range(3):
            for direction in (-1, 1):
                trial = x.copy()
                trial[i] = min(1.0, max(0.0, trial[i] + direction * step))
                if trial[i] == x[i]:
                    continue
                c = chi2(trial)
                if c < best - 1e-12:
                    x, best, improved = trial, c, True
        if not improved:
            step /= 2
    if not math.isfinite(best):
        raise FitError("fit did not converge")
    model = model_at(np.round(x, 10))
    prof = stabilizer_profile(model)
    residuals = {q: (prof[q] - targets[q][0]) / sigmas[q] for q in CANONICAL_ORDER}
    return FitResult(model, best, prof, residuals, sigmas, evals, parameters)


# --- counting -------------------------------------------------------------

def _basis_token(basis) -> str:
    if isinstance(basis, str):
        return basis
    theta, phi = basis
    return f"{float(theta)!r},{float(phi)!r}"


def _parse_basis(token: str):
    if "," in token:
        theta, phi = token.split(",")
        return (float(theta), float(phi))
    return token


@dataclass
class CountRecord:
    setting: str
    register: tuple[str, ...]
    tallies: dict[str, int]
    bases: dict[str, object] = field(default_factory=dict)
    seed: Optional[int] = None
    shots: Optional[int] = None
    duration: Optional[float] = None

    def __post_init__(self):
        for k, v in self.tallies.items():
            if v < 0:
                raise ValueError(f"negative tally for {k}")

    @property
    def total(self) -> int:
        return int(sum(self.tallies.values()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        meta = {"setting": self.setting, "seed": self.seed, "shots": self.shots,
                "register": "".join(f"{q};" for q in self.register).rstrip(";")}
        if self.bases:
            meta["bases"] = ";".join(f"{q}={_basis_token(b)}" for q, b in self.bases.items())
        if self.duration is not None:
            meta["duration_s"] = self.duration
        buf.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["outcome", "count"])
        for outcome in sorted(self.tallies):
            w.writerow([outcome, self.tallies[outcome]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CountRecord":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ValueError("count record needs a '#' metadata header")
        meta = dict(item.split("=", 1) for item in lines[0][1:].split())
        rows = list(csv.reader(lines[1:]))
        if rows[0] != ["outcome", "count"]:
            raise ValueError(f"unexpected columns {rows[0]}")
        tallies = {r[0]: int(r[1]) for r in rows[1:] if r}
        bases = {}
        if "bases" in meta:
            for item in meta["bases"].split(";"):
                q, token = item.split("=", 1)
                bases[q] = _parse_basis(token)

        def opt_int(v):
            return None if v in (None, "None") else int(v)

        return cls(
            setting=meta["setting"],
            register=tuple(meta["register"].split(";")),
            tallies=tallies,
            bases=bases,
            seed=opt_int(meta.get("seed")),
            shots=opt_int(meta.get("shots")),
            duration=float(meta["duration_s"]) if "duration_s" in meta else None,
        )


def outcome_probabilities(state: PureState | DensityState, setting: Mapping[str, object]) -> dict[str, float]:
    """Born probabilities of joint outcomes for per-qubit bases (bit 0 = +1 eigenvalue)."""
    rho = to_density(state)
    missing = set(rho.register) - set(setting)
    if missing:
        raise ValueError(f"no basis given for {sorted(missing)}")
    for q in rho.register:
        plus, minus = basis_vectors(setting[q])
        u = np.array([plus.conj(), minus.conj()])
        rho = apply_local(rho, q, u)
    diag = np.clip(np.diag(rho.matrix).real, 0, None)
    diag = diag / diag.sum()
    n = rho.n
    return {format(i, f"0{n}b"): float(p) for i, p in enumerate(diag)}


def sample_counts(
    state: PureState | DensityState,
    setting: Mapping[str, object],
    shots: int,
    seed: int,
    label: str = "",
) -> CountRecord:
    """Multinomial draw of ``shots`` outcomes from the Born distribution."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    probs = outcome_probabilities(state, setting)
    outcomes = list(probs)
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, [probs[o] for o in outcomes])
    tallies = {o: int(c) for o, c in zip(outcomes, draws)}
    register = to_density(state).register
    return CountRecord(label, register, tallies, {q: setting[q] for q in register}, seed, shots)


def shots_for_witness_sigma(state: PureState | DensityState, g: GraphSpec, sigma: float) -> int:
    """Shots per setting for which the propagated witness error equals ``sigma``."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    report = witness_value(state, g)
    spread = sum(f * (1 - f) for f in (report.term_path, report.term_pol))
    if spread < 1e-12:
        raise ValueError("the witness estimate of this state has no shot noise to match")
    return max(1, int(round(4 * spread / sigma**2)))


def sampled_witness(
    state: PureState | DensityState, g: GraphSpec, shots: int, seed: int
) -> tuple[WitnessReport, CountRecord, CountRecord]:
    """Draw both witness settings and estimate the witness from the tallies.

    Setting A uses ``seed`` and setting B uses ``seed + 1``.
    """
    rho = reorder(to_density(state), canonical_register(g.ids))
    settings = measurement_settings(g)
    rec_a = sample_counts(rho, settings["A"], shots, seed, label="A")
    rec_b = sample_counts(rho, settings["B"], shots, seed + 1, label="B")
    report = witness_from_counts(rec_a.tallies, rec_b.tallies, g, rho.register)
    return report, rec_a, rec_b


def poisson_errors(counts: Sequence[int]) -> np.ndarray:
    return np.sqrt(np.asarray(counts, dtype=float))


def bell_concurrence_for(model: NoiseModel) -> float:
    return concurrence(werner_bell_pair(model.bell_white_noise))


REFERENCE_TARGETS = {
    "p1": (1.000, 0.0),
    "p2": (0.948, 0.025),
    "p3": (0.974, 0.018),
    "p4": (0.961, 0.022),
    "s1": (0.925, 0.022),
    "s2": (0.933, 0.007),
    "s3": (0.454, 0.052),
}
REFERENCE_WITNESS = (-0.281, 0.069)
