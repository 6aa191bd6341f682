import json
import math
import subprocess
import sys

import numpy as np
import pytest

from pathfusion.cli import main
from pathfusion.experiments import (
    ConfigError,
    ResultTable,
    RunConfig,
    coherence_scan,
    fit_fringe,
    load_targets,
    parse_phases,
)
from pathfusion.noise import REFERENCE_TARGETS, NoiseModel

SCAN = parse_phases("0:2pi:23")


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _table(capsys, *argv):
    code, out, err = _run(capsys, *argv)
    assert code == 0, err
    fmt = "json" if "json" in argv else "csv"
    return ResultTable.from_json(out) if fmt == "json" else ResultTable.from_csv(out)


@pytest.mark.parametrize("build", ["graph", "optics-bp", "optics-npbs"])
def test_state_ideal_on_every_build(capsys, build):
    t = _table(capsys, "state", "--build", build)
    assert t.column("expectation") == pytest.approx([1.0] * 7, abs=1e-9)
    assert t.meta["fidelity"] == pytest.approx(1, abs=1e-9)
    assert t.meta["config"]["build"] == build


def test_optics_postselection_ratio(capsys):
    bp = _table(capsys, "state", "--build", "optics-bp").meta["postselection_probability"]
    npbs = _table(capsys, "state", "--build", "optics-npbs").meta["postselection_probability"]
    assert npbs / bp == pytest.approx(0.5, abs=1e-12)


def test_fit_then_state_and_witness(capsys, tmp_path):
    fit_path = tmp_path / "fit.json"
    assert main(["fit", "--format", "json", "--out", str(fit_path)]) == 0
    fit = ResultTable.from_json(fit_path.read_text())
    assert fit.meta["within_2sigma"] is True
    assert all(abs(r) <= 2 for r in fit.column("residual"))
    state = _table(capsys, "state", "--noise", str(fit_path))
    for q, v in zip(state.column("qubit"), state.column("expectation")):
        target, _ = REFERENCE_TARGETS[q]
        assert abs(v - target) <= 2 * fit.rows[fit.column("qubit").index(q)][3]
    w = _table(capsys, "witness", "--noise", str(fit_path))
    assert -0.35 <= w.meta["witness"] <= -0.21
    assert w.meta["genuine_entanglement"] is True


def test_witness_ideal_and_sampled(capsys, tmp_path):
    exact = _table(capsys, "witness")
    assert exact.meta["witness"] == pytest.approx(-1, abs=1e-10)
    model = tmp_path / "noise.json"
    model.write_text(NoiseModel(s3_visibility=0.5, path_dephasing=0.07).to_json())
    t = _table(capsys, "witness", "--noise", str(model), "--match-sigma", "0.069", "--seed", "3")
    shots = t.meta["sampled"]["shots_per_setting"]
    assert t.meta["config"]["shots"] == shots
    assert abs(t.meta["sampled"]["sigma"] - 0.069) <= 0.2 * 0.069
    assert [n for n, _ in t.columns] == ["qubit", "exact", "sampled", "sigma"]


def test_default_shot_budget_recorded(capsys):
    t = _table(capsys, "witness", "--shots", "10000", "--seed", "1")
    assert t.meta["sampled"]["shots_per_setting"] == 10000
    assert t.meta["sampled"]["witness"] == pytest.approx(-1, abs=1e-12)


@pytest.mark.parametrize("argv", [
    ["witness", "--shots", "500", "--seed", "9"],
    ["coherence", "--shots", "800", "--seed", "9"],
    ["dja", "--shots", "300", "--seed", "9", "--function", "v"],
])
def test_same_seed_gives_identical_bytes(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    other = list(argv)
    other[other.index("--seed") + 1] = "10"
    assert main(other + ["--out", str(b)]) == 0
    assert a.read_bytes() != b.read_bytes()


@pytest.mark.parametrize("command", ["state", "witness", "fit", "fuse-demo"])
def test_exact_mode_ignores_seed(capsys, command):
    _, plain, _ = _run(capsys, command)
    _, seeded, _ = _run(capsys, command, "--seed", "77")
    assert plain == seeded


@pytest.mark.parametrize("command", ["state", "witness", "coherence", "dja", "fit", "fuse-demo"])
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_outputs_round_trip(capsys, command, fmt):
    code, out, _ = _run(capsys, command, "--format", fmt)
    assert code == 0
    t = ResultTable.from_csv(out) if fmt == "csv" else ResultTable.from_json(out)
    assert t.command == command
    assert t.render(fmt) == out
    for (name, typ), v in zip(t.columns, t.rows[0]):
        assert isinstance(v, {"str": str, "float": float, "int": int}[typ])


def test_csv_header_is_self_describing(capsys):
    _, out, _ = _run(capsys, "coherence", "--shots", "100", "--seed", "4")
    meta = json.loads(out.splitlines()[0][2:])
    assert meta["version"].startswith("pathfusion ")
    assert meta["config"] == {"build": "graph", "noise": None, "shots": 100, "seed": 4}


def test_dja_table(capsys):
    t = _table(capsys, "dja")
    assert len(t.rows) == 32
    assert all(p == pytest.approx(1, abs=1e-10) for p in t.column("success_probability"))
    for fn, cls, verdict in zip(t.column("function"), t.column("class"), t.column("verdict")):
        assert cls == verdict
    one = _table(capsys, "dja", "--function", "iii", "--shots", "1000", "--seed", "2")
    assert len(one.rows) == 8 and sum(one.column("counts")) == 1000


def test_fuse_demo(capsys):
    t = _table(capsys, "fuse-demo")
    values = {(r, q): v for r, q, v in t.rows}
    assert values[("graph", "fusion_success_probability")] == pytest.approx(0.5, abs=1e-12)
    assert values[("graph", "equals_reference_graph")] == 1.0
    assert values[("optics", "npbs_to_bp_ratio")] == pytest.approx(0.5, abs=1e-12)
    assert values[("optics-bp", "fidelity")] == pytest.approx(1, abs=1e-9)


def test_coherence_fringe_exact():
    ideal = coherence_scan(RunConfig(), SCAN)
    assert ideal.fitted_visibility == pytest.approx(1, abs=1e-9)
    noisy = coherence_scan(RunConfig(noise=NoiseModel(s3_visibility=0.49)), SCAN)
    assert abs(noisy.fitted_visibility - 0.49) <= 0.01
    assert noisy.residual == pytest.approx(0, abs=1e-6)


def test_coherence_fringe_sampled():
    scan = coherence_scan(RunConfig(noise=NoiseModel(s3_visibility=0.49), shots=800, seed=21), SCAN)
    assert len(scan.phases) == 23
    assert np.array_equal(scan.errors, np.sqrt(scan.sampled))
    assert 0 <= scan.fitted_visibility <= 1
    assert abs(scan.fitted_visibility - 0.49) <= 2 * scan.visibility_sigma


def test_fringe_fit_recovers_offset():
    phases = np.linspace(0, 2 * math.pi, 11)
    counts = 100 * (1 + 0.7 * np.cos(phases - 0.4)) / 2
    vis, offset, rate, _, res = fit_fringe(phases, counts)
    assert (vis, offset, rate) == pytest.approx((0.7, 0.4, 100))
    assert res == pytest.approx(0, abs=1e-9)


def test_parse_phases():
    assert parse_phases("0:2pi:23")[-1] == pytest.approx(2 * math.pi)
    assert len(parse_phases("-1:1.5:4")) == 4
    assert parse_phases("0:0.5pi:3")[1] == pytest.approx(math.pi / 4)
    for bad in ("0:2pi", "0:x:3", "0:1:0", "0:1:two"):
        with pytest.raises(ConfigError):
            parse_phases(bad)


def test_load_targets_formats(tmp_path):
    assert load_targets() == REFERENCE_TARGETS
    csv_path = tmp_path / "t.csv"
    csv_path.write_text("qubit,value,sigma\n" + "".join(f"{q},{v},{s}\n" for q, (v, s) in reversed(REFERENCE_TARGETS.items())))
    assert load_targets(str(csv_path)) == REFERENCE_TARGETS
    csv_path.write_text("qubit,value,sigma\np1,1.0\n")
    with pytest.raises(ConfigError, match=r"t.csv:2"):
        load_targets(str(csv_path))


def test_fit_from_unit_targets(capsys, tmp_path):
    path = tmp_path / "ones.json"
    path.write_text(json.dumps({"stabilizers": {q: {"value": 1.0, "sigma": 0.01} for q in REFERENCE_TARGETS}}))
    t = _table(capsys, "fit", "--targets", str(path), "--format", "json")
    assert NoiseModel.from_dict(t.meta["model"]).is_ideal


def test_config_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"s3_visibility": 0.5,\n "oops"}')
    code, _, err = _run(capsys, "state", "--noise", str(bad))
    assert code == 2 and "bad.json:2:" in err
    unknown = tmp_path / "unknown.json"
    unknown.write_text('{"temperature": 1}')
    assert _run(capsys, "state", "--noise", str(unknown))[0] == 2
    assert _run(capsys, "state", "--noise", str(tmp_path / "missing.json"))[0] == 2
    assert _run(capsys, "witness", "--shots", "10")[0] == 2
    assert _run(capsys, "witness", "--shots", "0", "--seed", "1")[0] == 2
    assert _run(capsys, "witness", "--match-sigma", "0.05", "--seed", "1")[0] == 2
    assert _run(capsys, "coherence", "--phases", "0:1:10")[0] == 2
    assert _run(capsys, "coherence", "--phases", "0:2pi")[0] == 2
    werner = tmp_path / "werner.json"
    werner.write_text(NoiseModel(bell_white_noise=0.1).to_json())
    assert _run(capsys, "state", "--build", "optics-bp", "--noise", str(werner))[0] == 2
    targets = tmp_path / "short.json"
    targets.write_text('{"stabilizers": {"p1": {"value": 1, "sigma": 0.1}}}')
    assert _run(capsys, "fit", "--targets", str(targets))[0] == 2


def test_numerical_failure_exit_3(capsys, tmp_path):
    path = tmp_path / "zero.json"
    path.write_text(json.dumps({"stabilizers": {q: {"value": 0.9, "sigma": 0.0} for q in REFERENCE_TARGETS}}))
    code, _, err = _run(capsys, "fit", "--targets", str(path))
    assert code == 3 and "numerical failure" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "pathfusion", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("pathfusion ")
