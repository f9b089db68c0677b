import csv
import io
import json

import numpy as np
import pytest

from holophase.cli import RunConfig, derive_seed, main, simulate, sweep_rows
from holophase.phases import entanglement_phase_closed


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_no_arguments_prints_help(capsys):
    code, out, _ = run(capsys)
    assert code == 0 and "usage" in out.lower()
    for cmd in ("phase", "sweep", "simulate", "schmidt", "topology", "verify"):
        assert cmd in out


def test_phase_separable(capsys):
    code, out, _ = run(capsys, "phase", "--alpha", "0", "--s", "0.3")
    assert code == 0
    report = json.loads(out.strip().splitlines()[-1])
    assert report["holonomic_wrapped"] == pytest.approx(-0.6, abs=1e-8)
    assert abs(report["dynamical"]) <= 1e-8


def test_phase_mes_beyond_transition(capsys):
    code, out, _ = run(capsys, "phase", "--alpha", str(np.pi / 2), "--s", str(0.3 * np.pi))
    report = json.loads(out.strip().splitlines()[-1])
    assert code == 0
    assert abs(abs(report["holonomic_wrapped"]) - np.pi) <= 1e-6


def test_phase_transition_point_exits_2(capsys):
    code, _, err = run(capsys, "phase", "--alpha", str(np.pi / 2), "--s", str(np.pi / 4))
    assert code == 2 and "undefined" in err


def test_phase_degrees(capsys):
    code, out, _ = run(capsys, "phase", "--alpha", "0", "--s", "30", "--degrees")
    report = json.loads(out.strip().splitlines()[-1])
    assert code == 0 and report["s"] == pytest.approx(np.pi / 6)
    assert report["holonomic_wrapped"] == pytest.approx(-np.pi / 3, abs=1e-8)


def test_phase_missing_arguments_is_config_error(capsys):
    assert run(capsys, "phase", "--s", "0.3")[0] == 1


def test_bad_flag_is_config_error(capsys):
    assert run(capsys, "sweep", "--no-such-flag")[0] == 1
    assert run(capsys, "sweep", "--format", "xml")[0] == 1


def test_invalid_config_values(capsys, tmp_path):
    assert run(capsys, "sweep", "--n", "10", "--n0", "20")[0] == 1
    assert run(capsys, "simulate", "--phi-points", "3")[0] == 1
    assert run(capsys, "sweep", "--s", "2.0")[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    assert run(capsys, "sweep", "--config", str(bad))[0] == 1
    assert run(capsys, "sweep", "--config", str(tmp_path / "missing.json"))[0] == 1


def test_sweep_small_grid(capsys):
    code, out, _ = run(capsys, "sweep", "--alpha", "0", str(np.pi / 2), "--s", "0.3", str(np.pi / 4),
                       "--samples", "256")
    rows = read_csv(out)
    assert code == 0 and len(rows) == 4
    assert list(rows[0]) == ["alpha", "s", "phi_closed", "phi_numeric", "v_t", "dyn_residual", "status"]
    first = rows[0]
    assert float(first["phi_closed"]) == pytest.approx(-0.6, abs=1e-12)
    last = rows[-1]
    assert last["status"] == "undefined" and float(last["v_t"]) == 0.0
    assert "\r" not in out


@pytest.mark.slow
def test_sweep_default_grid():
    cfg = RunConfig().validate()
    rows = sweep_rows(cfg)
    assert len(rows) == 861
    undefined = [r for r in rows if r[6] == "undefined"]
    assert len(undefined) == 1
    assert undefined[0][0] == pytest.approx(np.pi / 2) and undefined[0][1] == pytest.approx(np.pi / 4)
    ok = [r for r in rows if r[6] == "ok"]
    assert len(ok) == 860
    assert max(abs(np.angle(np.exp(1j * (r[2] - r[3])))) for r in ok) <= 1e-6


def test_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha_grid": [0.0], "s_grid": [0.1, 0.2], "samples_per_segment": 128}))
    code, out, _ = run(capsys, "sweep", "--config", str(cfg))
    assert code == 0 and len(read_csv(out)) == 2
    code, out, _ = run(capsys, "sweep", "--config", str(cfg), "--s", "0.3")
    rows = read_csv(out)
    assert len(rows) == 1 and float(rows[0]["s"]) == 0.3


def test_config_file_in_degrees(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha_grid": [0.0], "s_grid": [45.0]}))
    code, out, _ = run(capsys, "sweep", "--config", str(cfg), "--degrees", "--samples", "64")
    assert float(read_csv(out)[0]["s"]) == pytest.approx(np.pi / 4)


def test_json_format(capsys):
    code, out, _ = run(capsys, "sweep", "--alpha", "0", "--s", "0.3", "--format", "json", "--samples", "64")
    data = json.loads(out)
    assert data[0]["phi_closed"] == pytest.approx(-0.6)


def test_schmidt_command(capsys):
    code, out, _ = run(capsys, "schmidt", "--tangle", "0", "0.5", "1", "--samples", "512")
    rows = read_csv(out)
    assert code == 0 and list(rows[0]) == ["T", "phi_closed_eq2", "phi_numeric_unwrapped"]
    assert float(rows[0]["phi_closed_eq2"]) == 0.0
    assert abs(float(rows[0]["phi_numeric_unwrapped"])) <= 1e-6
    for r in rows[1:]:
        expected = -2 * np.pi * (1 - np.sqrt(1 - float(r["T"])))
        assert float(r["phi_closed_eq2"]) == pytest.approx(expected, abs=1e-12)
        assert float(r["phi_numeric_unwrapped"]) == pytest.approx(expected, abs=1e-6)
    assert float(rows[-1]["phi_numeric_unwrapped"]) == pytest.approx(entanglement_phase_closed(1.0), abs=1e-6)


@pytest.mark.parametrize("argv,expected", [
    (["--schmidt"], 2),
    (["--s", str(0.3 * np.pi / 2)], 0),
    (["--s", str(0.7 * np.pi / 2)], 1),
])
def test_topology_command(capsys, argv, expected):
    code, out, err = run(capsys, "topology", *argv)
    summary = json.loads(err.strip().splitlines()[-1])
    assert code == 0 and summary["crossings"] == expected
    rows = read_csv(out)
    assert list(rows[0]) == ["t", "r_x", "r_y", "r_z", "segment_index", "crossing_flag"]
    assert sum(int(r["crossing_flag"]) for r in rows) == expected


def test_topology_rejects_non_mes(capsys):
    assert run(capsys, "topology", "--alpha", "1.0", "--s", "0.3")[0] == 1


def test_verify_clean_and_faulty(capsys):
    code, out, _ = run(capsys, "verify")
    report = json.loads(out)
    assert code == 0
    assert report["passed"]
    assert all(c["value"] <= 1e-8 for c in report["checks"])
    code, _, _ = run(capsys, "verify", "--inject-fault", "1e-3")
    assert code == 3


def small_cfg(**kw):
    base = dict(alpha_grid=[0.4 * np.pi, np.pi / 2], s_grid=[0.0, 0.7 * np.pi / 2, np.pi / 4], reps=3)
    base.update(kw)
    return RunConfig(**base).validate()


def test_simulate_noiseless_reference_point():
    summary, _ = simulate(small_cfg(alpha_grid=[8 * np.pi / 20], s_grid=[0.0], noiseless=True, reps=1))
    point = summary["points"][0]
    assert abs(point["fitted_phase"]) <= 1e-9 and abs(point["extracted_phase"]) <= 1e-9
    assert summary["reference_phase"] == pytest.approx(0.0, abs=1e-9)


def test_simulate_noiseless_exact_everywhere():
    summary, _ = simulate(small_cfg(noiseless=True, reps=1))
    for p in summary["points"]:
        if p["true_phase"] is None:
            assert p["status"] == "undetermined"
        else:
            assert abs(np.angle(np.exp(1j * (p["fitted_phase"] - p["true_phase"])))) <= 1e-9


def test_simulate_coverage_at_high_s():
    cfg = small_cfg(alpha_grid=[0.4 * np.pi], s_grid=[0.7 * np.pi / 2], reps=200)
    point = simulate(cfg)[0]["points"][0]
    assert point["coverage_3sigma"] >= 0.99


def test_simulate_outside_dip_visibility_ratio():
    inside = simulate(small_cfg(s_grid=[0.0], reps=1, noiseless=True))[0]
    outside = simulate(small_cfg(s_grid=[0.0], reps=1, noiseless=True, n=10000, n0=5068))[0]
    ratio = outside["points"][0]["visibility"] / inside["points"][0]["visibility"]
    assert abs(ratio - 0.430) <= 0.005


def test_simulate_outputs(capsys, tmp_path):
    out = tmp_path / "fringes.csv"
    code, _, _ = run(capsys, "simulate", "--alpha", "0.5", "--s", "0", "0.4", "--reps", "2",
                     "--out", str(out), "--seed", "3")
    assert code == 0
    rows = read_csv(out.read_text())
    assert list(rows[0]) == ["alpha", "s", "rep", "phi_rad", "counts"]
    assert len(rows) == 2 * 2 * 21
    assert all(r["counts"].isdigit() for r in rows)
    summary = json.loads((tmp_path / "fringes.summary.json").read_text())
    assert len(summary["points"]) == 2


def test_seed_derivation_is_local():
    a = simulate(small_cfg(s_grid=[0.2, 0.5], reps=2))[1]
    b = simulate(small_cfg(s_grid=[0.2, 0.9], reps=2))[1]
    # grid index 0 (alpha 0.4pi, s 0.2) keeps its seed and its counts
    first_a = [r for r in a if r[0] == 0.4 * np.pi and r[1] == 0.2]
    first_b = [r for r in b if r[0] == 0.4 * np.pi and r[1] == 0.2]
    assert first_a == first_b
    assert derive_seed(0, 0, 1, 0) != derive_seed(0, 0, 2, 0)
    assert derive_seed(0, 0, 1, 0) != derive_seed(1, 0, 1, 0)
    c = simulate(small_cfg(s_grid=[0.2, 0.5], reps=2, seed=99))[1]
    assert [r[4] for r in a] != [r[4] for r in c]


def test_repeated_runs_are_byte_identical(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"sweep{k}.csv"
        run(capsys, "sweep", "--alpha", "0.3", "1.2", "--s", "0.1", "0.9", "--samples", "128", "--out", str(path))
        outs.append(path.read_bytes())
        sim = tmp_path / f"sim{k}.csv"
        run(capsys, "simulate", "--alpha", "0.3", "--s", "0", "0.9", "--reps", "2", "--out", str(sim))
        outs.append(sim.read_bytes() + (tmp_path / f"sim{k}.summary.json").read_bytes())
    assert outs[0] == outs[2] and outs[1] == outs[3]
