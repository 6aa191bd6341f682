"""Experiment drivers behind the command line: each returns a self-describing
:class:`ResultTable` that serializes to CSV or JSON."""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .fusion import fuse_graph, fuse_ideal
from .graphs import (
    PATH,
    chain_2p4q,
    fidelity_lower_bound,
    graph_to_state,
    paper_graph_4p7q,
    stabilizer,
    witness_value,
)
from .mbqc import FUNCTIONS, dja
from .noise import (
    REFERENCE_WITNESS,
    NoiseModel,
    fit_noise,
    noisy_state,
    sampled_witness,
    shots_for_witness_sigma,
)
from .qubits import (
    CANONICAL_ORDER,
    DensityState,
    PureState,
    expectation,
    measure,
    reorder,
    tensor,
    to_density,
)
from .resource import BUILDS, build_resource

DEFAULT_SHOTS = 10_000
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid run configuration or input file."""


# --- configuration --------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    build: str = "graph"
    noise: Optional[NoiseModel] = None
    shots: Optional[int] = None
    seed: Optional[int] = None
    output: Optional[str] = None
    format: str = "csv"
    noise_source: Optional[str] = None

    def __post_init__(self):
        if self.build not in BUILDS:
            raise ConfigError(f"build: expected one of {BUILDS}, got {self.build!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format: expected one of {FORMATS}, got {self.format!r}")
        if self.shots is not None:
            if self.shots <= 0:
                raise ConfigError(f"shots: must be positive, got {self.shots}")
            if self.seed is None:
                raise ConfigError("seed: required when shots are set")
        if self.noise is not None and self.build != "graph" and self.noise.bell_white_noise > 0:
            raise ConfigError("noise: bell_white_noise acts before fusion and needs --build graph")

    @property
    def sampling(self) -> bool:
        return self.shots is not None

    def echo(self) -> dict:
        """Config fields that influence the output."""
        out: dict[str, Any] = {"build": self.build, "noise": self.noise.as_dict() if self.noise else None}
        if self.sampling:
            out.update(shots=self.shots, seed=self.seed)
        return out


def _json_error(path: str, err: json.JSONDecodeError) -> ConfigError:
    return ConfigError(f"{path}:{err.lineno}:{err.colno}: {err.msg}")


def read_json_file(path: str) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"{path}: {err.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise _json_error(path, err) from None


def load_noise(path: str) -> NoiseModel:
    """Noise model from a JSON file: a bare model or the JSON output of ``fit``."""
    data = read_json_file(path)
    if isinstance(data, dict) and "meta" in data and "model" in data.get("meta", {}):
        data = data["meta"]["model"]
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object of noise fields")
    try:
        return NoiseModel.from_dict(data)
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from None


def load_targets(path: Optional[str] = None) -> dict[str, tuple[float, float]]:
    """Stabilizer targets from JSON ({"stabilizers": {q: {value, sigma}}}) or CSV (qubit,value,sigma)."""
    if path is None:
        data = json.loads(resources.files("pathfusion").joinpath("data/reference_targets.json").read_text())
        source = "reference_targets.json"
    elif path.endswith(".csv"):
        try:
            text = Path(path).read_text()
        except OSError as err:
            raise ConfigError(f"{path}: {err.strerror}") from None
        rows = [r for r in csv.reader(line for line in text.splitlines() if not line.startswith("#")) if r]
        if not rows or [c.strip() for c in rows[0]] != ["qubit", "value", "sigma"]:
            raise ConfigError(f"{path}:1: expected header 'qubit,value,sigma'")
        data = {"stabilizers": {}}
        for lineno, r in enumerate(rows[1:], start=2):
            if len(r) != 3:
                raise ConfigError(f"{path}:{lineno}: expected 3 fields, got {len(r)}")
            data["stabilizers"][r[0].strip()] = {"value": r[1], "sigma": r[2]}
        source = path
    else:
        data = read_json_file(path)
        source = path
    stabs = data.get("stabilizers") if isinstance(data, dict) else None
    if not isinstance(stabs, dict):
        raise ConfigError(f"{source}: missing 'stabilizers' object")
    out = {}
    for q, entry in stabs.items():
        if q not in CANONICAL_ORDER:
            raise ConfigError(f"{source}: unknown qubit {q!r}")
        try:
            value, sigma = float(entry["value"]), float(entry["sigma"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"{source}: stabilizers.{q}: needs numeric 'value' and 'sigma'") from None
        if sigma < 0:
            raise ConfigError(f"{source}: stabilizers.{q}.sigma: must be nonnegative")
        out[q] = (value, sigma)
    missing = set(CANONICAL_ORDER) - set(out)
    if missing:
        raise ConfigError(f"{source}: targets missing for {sorted(missing)}")
    return out


_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*(\*?\s*pi)?\s*$")


def _parse_angle(token: str) -> float:
    m = _NUMBER.match(token)
    if not m or not (m.group(1) or m.group(2)):
        raise ConfigError(f"phases: cannot read {token!r} as a number (suffix 'pi' allowed)")
    value = float(m.group(1)) if m.group(1) else 1.0
    return value * math.pi if m.group(2) else value


def parse_phases(spec: str) -> np.ndarray:
    """``start:stop:count`` with both ends included, e.g. ``0:2pi:23``."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"phases: expected start:stop:count, got {spec!r}")
    start, stop = _parse_angle(parts[0]), _parse_angle(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise ConfigError(f"phases: count must be an integer, got {parts[2]!r}") from None
    if count < 1:
        raise ConfigError("phases: count must be positive")
    return np.linspace(start, stop, count)


# --- result tables --------------------------------------------------------

_TYPES = {"str": str, "int": int, "float": float, "bool": lambda s: s == "True"}


@dataclass
class ResultTable:
    command: str
    columns: tuple[tuple[str, str], ...]  # (name, type)
    rows: list[tuple]
    meta: dict = field(default_factory=dict)

    def full_meta(self) -> dict:
        return {"command": self.command, "version": f"pathfusion {__version__}", **self.meta,
                "columns": [f"{n}:{t}" for n, t in self.columns]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.full_meta(), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([n for n, _ in self.columns])
        for row in self.rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        data = {"meta": self.full_meta(), "rows": [dict(zip((n for n, _ in self.columns), r)) for r in self.rows]}
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()

    def column(self, name: str) -> list:
        i = [n for n, _ in self.columns].index(name)
        return [r[i] for r in self.rows]

    @classmethod
    def from_csv(cls, text: str) -> "ResultTable":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# "):
            raise ValueError("result CSV needs a '# ' metadata line")
        meta = json.loads(lines[0][2:])
        columns = tuple(tuple(c.split(":", 1)) for c in meta.pop("columns"))
        command = meta.pop("command")
        meta.pop("version")
        reader = csv.reader(lines[1:])
        header = next(reader)
        if header != [n for n, _ in columns]:
            raise ValueError(f"CSV columns {header} differ from declared {columns}")
        rows = [tuple(_TYPES[t](v) for (_, t), v in zip(columns, r)) for r in reader if r]
        return cls(command, columns, rows, meta)

    @classmethod
    def from_json(cls, text: str) -> "ResultTable":
        data = json.loads(text)
        meta = dict(data["meta"])
        columns = tuple(tuple(c.split(":", 1)) for c in meta.pop("columns"))
        command = meta.pop("command")
        meta.pop("version")
        rows = [tuple(r[n] for n, _ in columns) for r in data["rows"]]
        return cls(command, columns, rows, meta)


def _fidelity(state: PureState | DensityState, ideal: PureState) -> float:
    rho = reorder(to_density(state), ideal.register)
    v = ideal.amplitudes
    return float(np.real(v.conj() @ rho.matrix @ v))


# --- commands -------------------------------------------------------------

def cmd_state(config: RunConfig) -> ResultTable:
    """Stabilizer table and fidelity with the ideal seven-qubit graph state."""
    g = paper_graph_4p7q()
    res = build_resource(config.build, config.noise)
    ideal = graph_to_state(g)
    rows = [(q, expectation(res.state, stabilizer(g, q).pauli)) for q in CANONICAL_ORDER]
    meta = {"config": config.echo(), "fidelity": _fidelity(res.state, ideal),
            "postselection_probability": res.postselection_probability}
    return ResultTable("state", (("qubit", "str"), ("expectation", "float")), rows, meta)


def cmd_witness(config: RunConfig, match_sigma: Optional[float] = None) -> ResultTable:
    """Exact witness, plus a two-setting sampled estimate when shots are set.

    ``match_sigma`` replaces the shot budget by the one whose propagated error
    equals it.
    """
    g = paper_graph_4p7q()
    state = build_resource(config.build, config.noise).state
    exact = witness_value(state, g)
    meta: dict[str, Any] = {"config": config.echo(), "witness": exact.value,
                            "fidelity_lower_bound": exact.fidelity_lower_bound,
                            "genuine_entanglement": exact.genuine_entanglement,
                            "term_path": exact.term_path, "term_pol": exact.term_pol}
    columns = (("qubit", "str"), ("exact", "float"))
    rows = [(q, v) for q, (v, _) in exact.stabilizer_values.items()]
    if match_sigma is not None and config.seed is None:
        raise ConfigError("seed: required when sampling")
    if config.sampling or match_sigma is not None:
        shots = config.shots or DEFAULT_SHOTS
        if match_sigma is not None:
            try:
                shots = shots_for_witness_sigma(state, g, match_sigma)
            except ValueError as err:
                raise ConfigError(f"match-sigma: {err}") from None
            meta["matched_sigma"] = match_sigma
        sampled, _, _ = sampled_witness(state, g, shots, config.seed)
        meta["config"] = {**meta["config"], "shots": shots, "seed": config.seed}
        meta["sampled"] = {"witness": sampled.value, "sigma": sampled.uncertainty,
                           "fidelity_lower_bound": sampled.fidelity_lower_bound,
                           "shots_per_setting": shots}
        columns += (("sampled", "float"), ("sigma", "float"))
        rows = [(q, v, *sampled.stabilizer_values[q]) for q, v in rows]
    return ResultTable("witness", columns, rows, meta)


@dataclass
class FringeScan:
    phases: np.ndarray
    expected: np.ndarray
    sampled: Optional[np.ndarray]
    errors: Optional[np.ndarray]
    fitted_visibility: float
    fitted_offset: float
    fitted_rate: float
    visibility_sigma: float
    residual: float  # chi2 when sampled, RMS otherwise


def fringe_probabilities(state: PureState | DensityState, phases: Sequence[float]) -> np.ndarray:
    """Probability of projecting p1..p4 on |0>, s1, s2 on |+> and s3 on (|0> + e^{i phi}|1>)/sqrt2."""
    rho = to_density(state)
    weight = 1.0
    for q in ("p1", "p2", "p3", "p4"):
        p, rho = measure(rho, q, "Z", +1)
        weight *= p
    for q in ("s1", "s2"):
        p, rho = measure(rho, q, "X", +1)
        weight *= p
    m = rho.matrix
    out = []
    for phi in phases:
        v = np.array([1, np.exp(1j * phi)]) / np.sqrt(2)
        out.append(weight * float(np.real(v.conj() @ m @ v)))
    return np.array(out)


def fit_fringe(phases: np.ndarray, counts: np.ndarray, errors: Optional[np.ndarray] = None) -> tuple:
    """Least squares of R (1 + V cos(phi - phi0)) / 2 via its linear form a + b cos + c sin."""
    design = np.column_stack([np.ones_like(phases), np.cos(phases), np.sin(phases)])
    w = np.ones_like(phases) if errors is None else 1 / np.maximum(errors, 1.0)
    coef, *_ = np.linalg.lstsq(design * w[:, None], counts * w, rcond=None)
    a, b, c = coef
    amp = math.hypot(b, c)
    vis = min(1.0, amp / a) if a > 0 else 0.0
    offset = math.atan2(c, b)
    resid = counts - design @ coef
    if errors is None:
        return vis, offset, 2 * a, 0.0, float(np.sqrt(np.mean(resid**2)))
    cov = np.linalg.inv((design * w[:, None] ** 2).T @ design)
    grad = np.array([-amp / a**2, b / (amp * a), c / (amp * a)]) if amp > 0 else np.array([0, 1 / a, 0])
    sigma = float(np.sqrt(grad @ cov @ grad))
    return vis, offset, 2 * a, sigma, float(np.sum((resid * w) ** 2))


def coherence_scan(config: RunConfig, phases: Sequence[float]) -> FringeScan:
    phases = np.asarray(phases, dtype=float)
    if len(phases) < 5 or np.ptp(phases) < 2 * math.pi - 1e-9:
        raise ConfigError("phases: need at least 5 points spanning 2 pi")
    state = build_resource(config.build, config.noise).state
    trials = config.shots or DEFAULT_SHOTS
    expected = trials * fringe_probabilities(state, phases)
    if not config.sampling:
        vis, off, rate, sig, res = fit_fringe(phases, expected)
        return FringeScan(phases, expected, None, None, vis, off, rate, sig, res)
    rng = np.random.default_rng(config.seed)
    sampled = rng.poisson(expected)
    errors = np.sqrt(sampled)
    vis, off, rate, sig, res = fit_fringe(phases, sampled.astype(float), errors)
    return FringeScan(phases, expected, sampled, errors, vis, off, rate, sig, res)


def cmd_coherence(config: RunConfig, phases: Sequence[float]) -> ResultTable:
    scan = coherence_scan(config, phases)
    meta = {"config": config.echo(), "trials_per_point": config.shots or DEFAULT_SHOTS,
            "fitted_visibility": scan.fitted_visibility, "fitted_offset": scan.fitted_offset,
            "fitted_rate": scan.fitted_rate, "visibility_sigma": scan.visibility_sigma,
            "residual": scan.residual}
    if scan.sampled is None:
        columns = (("phase", "float"), ("expected", "float"))
        rows = [(float(p), float(e)) for p, e in zip(scan.phases, scan.expected)]
    else:
        columns = (("phase", "float"), ("expected", "float"), ("counts", "int"), ("error", "float"))
        rows = [(float(p), float(e), int(c), float(s))
                for p, e, c, s in zip(scan.phases, scan.expected, scan.sampled, scan.errors)]
    return ResultTable("coherence", columns, rows, meta)


def cmd_dja(config: RunConfig, function: str = "all") -> ResultTable:
    """Output distribution of the Deutsch-Jozsa pattern, eight rows per function."""
    names = list(FUNCTIONS) if function == "all" else [function]
    unknown = [n for n in names if n not in FUNCTIONS]
    if unknown:
        raise ConfigError(f"function: expected one of {sorted(FUNCTIONS)} or 'all', got {function!r}")
    columns = (("function", "str"), ("class", "str"), ("verdict", "str"), ("output", "str"),
               ("probability", "float"), ("success_probability", "float"))
    if config.sampling:
        columns += (("counts", "int"),)
    rows, summary = [], {}
    rng = np.random.default_rng(config.seed) if config.sampling else None
    for name in names:
        result = dja(name, config.noise, config.build)
        outputs = sorted(result.distribution)
        probs = [result.distribution[o] for o in outputs]
        counts = rng.multinomial(config.shots, np.clip(probs, 0, None) / sum(probs)) if rng is not None else None
        for i, o in enumerate(outputs):
            row = (name, FUNCTIONS[name].kind, result.verdict, "".join(map(str, o)), probs[i], result.success_probability)
            rows.append(row + ((int(counts[i]),) if counts is not None else ()))
        summary[name] = result.success_probability
    return ResultTable("dja", columns, rows, {"config": config.echo(), "success": summary,
                                              "output_bits": "y x1 x2"})


def cmd_fit(config: RunConfig, targets_path: Optional[str] = None) -> ResultTable:
    targets = load_targets(targets_path)
    fit = fit_noise(targets)
    report = witness_value(noisy_state(fit.model), paper_graph_4p7q())
    rows = [(q, targets[q][0], targets[q][1], fit.sigmas[q], fit.predicted[q], fit.residuals[q])
            for q in CANONICAL_ORDER]
    columns = (("qubit", "str"), ("target", "float"), ("sigma", "float"), ("sigma_used", "float"),
               ("model", "float"), ("residual", "float"))
    meta = {"targets": targets_path or "reference_targets.json", "model": fit.model.as_dict(),
            "parameters": list(fit.parameters), "chi2": fit.chi2, "within_2sigma": fit.within(2.0),
            "witness": report.value, "fidelity_lower_bound": report.fidelity_lower_bound,
            "reference_witness": list(REFERENCE_WITNESS)}
    return ResultTable("fit", columns, rows, meta)


def cmd_fuse_demo(config: RunConfig) -> ResultTable:
    """Fuse two linear two-photon chains and compare the three build routes."""
    g1 = chain_2p4q(("s1", "p1", "sA", "p3"), photons=(1, 1, 3, 3))
    g2 = chain_2p4q(("s2", "p2", "sB", "p4"), photons=(2, 2, 4, 4))
    fused_graph = fuse_graph(g1, "sA", g2, "sB", "s3")
    outcome = fuse_ideal(tensor(graph_to_state(g1), graph_to_state(g2)), "sA", "sB", "s3")
    target = graph_to_state(paper_graph_4p7q())
    rows = [
        ("graph", "fusion_success_probability", outcome.success_probability),
        ("graph", "fidelity", _fidelity(outcome.post_state, target)),
        ("graph", "equals_reference_graph", float(fused_graph == paper_graph_4p7q())),
    ]
    probs = {}
    for build in ("optics-bp", "optics-npbs"):
        res = build_resource(build, None)
        probs[build] = res.postselection_probability
        rows.append((build, "postselection_probability", res.postselection_probability))
        rows.append((build, "fidelity", _fidelity(res.state, target)))
    rows.append(("optics", "npbs_to_bp_ratio", probs["optics-npbs"] / probs["optics-bp"]))
    meta = {"config": {"build": "all"}, "fused_graph": json.loads(fused_graph.to_json()),
            "path_qubits": list(fused_graph.of_kind(PATH)),
            "reference_lower_bound": fidelity_lower_bound(REFERENCE_WITNESS[0])}
    return ResultTable("fuse-demo", (("route", "str"), ("quantity", "str"), ("value", "float")), rows, meta)
