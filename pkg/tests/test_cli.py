import json
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

from unistoch.cli import main
from unistoch.scenario import Scenario, ScenarioError, named_rng, run_scenario

DEMO = resources.files("unistoch") / "data" / "demo_scenario.json"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return path


def scenario(tasks, objects=None, seed=1):
    return {"schema": 1, "name": "t", "seed": seed, "objects": objects or {}, "tasks": tasks}


def test_hadamard_gamma_scenario(tmp_path, capsys):
    s = scenario(
        [{"task": "gamma_from_theta", "theta": "h"}],
        {"h": {"type": "evolution", "value": [[0.7071067811865476, 0.7071067811865476], [0.7071067811865476, -0.7071067811865476]]}},
    )
    code, out, _ = run(["run", write(tmp_path, "s.json", s)], capsys)
    assert code == 0
    report = json.loads(out)
    np.testing.assert_allclose(report["tasks"][0]["result"]["gamma"], [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)


def test_divisibility_scenario(tmp_path, capsys):
    s = scenario(
        [{"task": "divisibility", "process": "p", "t": 1.0471975511965976, "t_prime": 0.6}],
        {"p": {"type": "process", "builtin": "pauli_x_gamma", "times": [0.6, 1.0471975511965976], "initial": [1, 0]}},
    )
    code, out, _ = run(["run", write(tmp_path, "s.json", s)], capsys)
    result = json.loads(out)["tasks"][0]
    assert result["holds"] is None
    assert result["result"]["is_stochastic"] is False
    assert result["result"]["min_entry"] == pytest.approx(-0.19, abs=0.01)
    assert code == 0


def test_divisibility_expectation_failure_exits_one(tmp_path, capsys):
    s = scenario(
        [{"task": "divisibility", "process": "p", "t": 1.0471975511965976, "t_prime": 0.6, "expect": True}],
        {"p": {"type": "process", "builtin": "pauli_x_gamma", "times": [0.6, 1.0471975511965976], "initial": [1, 0]}},
    )
    code, out, _ = run(["run", write(tmp_path, "s.json", s)], capsys)
    assert code == 1
    assert json.loads(out)["all_hold"] is False


def test_malformed_json_exit_two(tmp_path, capsys):
    code, _, err = run(["run", write(tmp_path, "bad.json", '{"schema": 1,\n  "seed": }')], capsys)
    assert code == 2
    assert "bad.json:2:" in err


def test_missing_file_exit_two(tmp_path, capsys):
    code, _, err = run(["run", tmp_path / "nope.json"], capsys)
    assert code == 2 and "nope.json" in err


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({"schema": 2, "seed": 1, "tasks": []}, "schema"),
        ({"schema": 1, "tasks": []}, "seed"),
        (scenario([{"task": "levitate"}]), "unknown task"),
        (scenario([{"task": "realify", "matrix": "ghost"}]), "unresolved reference 'ghost'"),
        (scenario([], {"m": {"type": "matrix", "value": [[1, 2], [3]]}}), "object 'm'"),
        (scenario([], {"m": {"type": "evolution", "value": [[1, 1], [1, 1]]}}), "unit norm"),
        (scenario([{"task": "realify"}], {}), "missing parameter"),
    ],
)
def test_validation_errors_exit_three(tmp_path, capsys, doc, fragment):
    code, out, err = run(["run", write(tmp_path, "s.json", doc)], capsys)
    assert code == 3
    assert out == ""
    assert fragment in err


def test_demo_is_deterministic_and_passes(capsys):
    code1, out1, _ = run(["run", DEMO, "--no-timing"], capsys)
    code2, out2, _ = run(["run", DEMO, "--no-timing", "--jobs", "4"], capsys)
    assert code1 == code2 == 0
    assert out1 == out2


def test_timing_outside_deterministic_region(capsys):
    _, out, _ = run(["run", DEMO], capsys)
    report = json.loads(out)
    assert report["timing"]["elapsed_seconds"] >= 0
    report.pop("timing")
    _, again, _ = run(["run", DEMO, "--no-timing"], capsys)
    assert json.dumps(report, sort_keys=True, indent=2) + "\n" == again


def test_seed_override_changes_random_tasks(capsys):
    _, a, _ = run(["run", DEMO, "--no-timing", "--seed", "1"], capsys)
    _, b, _ = run(["run", DEMO, "--no-timing", "--seed", "2"], capsys)
    ra, rb = json.loads(a), json.loads(b)
    assert ra["seed"] == 1 and rb["seed"] == 2
    st_a = [t for t in ra["tasks"] if t["task"] == "stinespring"][0]["result"]["unitary"]
    st_b = [t for t in rb["tasks"] if t["task"] == "stinespring"][0]["result"]["unitary"]
    assert st_a != st_b


def test_named_rng_independent_of_order():
    a = named_rng(3, "task:1").standard_normal(3)
    named_rng(3, "task:0").standard_normal(10)
    np.testing.assert_array_equal(a, named_rng(3, "task:1").standard_normal(3))
    assert not np.array_equal(a, named_rng(3, "task:2").standard_normal(3))


def test_env_tolerance(monkeypatch, tmp_path, capsys):
    path = write(tmp_path, "m.json", [[1, 1e-7], [0, 1]])
    assert run(["validate", "--matrix", path, "--check", "unitary"], capsys)[0] == 1
    monkeypatch.setenv("UNISTOCH_TOL", "1e-6")
    code, out, _ = run(["validate", "--matrix", path, "--check", "unitary"], capsys)
    assert code == 0
    assert json.loads(out)["tolerance"]["alg"] == 1e-6
    monkeypatch.setenv("UNISTOCH_TOL", "lots")
    assert run(["validate", "--matrix", path, "--check", "unitary"], capsys)[0] == 3


def test_validate_subcommand(tmp_path, capsys):
    ident = write(tmp_path, "id.json", [[1, 0], [0, 1]])
    code, out, _ = run(["validate", "--matrix", ident, "--check", "unitary", "--format", "text"], capsys)
    assert code == 0 and out.startswith("scenario validate") and "PASS" in out
    code, _, _ = run(["validate", "--matrix", write(tmp_path, "p.json", [[1, 2], [2, 1]]), "--check", "psd"], capsys)
    assert code == 1
    code, _, _ = run(["validate", "--matrix", write(tmp_path, "d.json", [[1, 0], [0, 1]]), "--check", "density"], capsys)
    assert code == 1


def test_divisibility_subcommand(tmp_path, capsys):
    times = [0.6, 1.0472]
    proc = {"dim": 2, "initial": [1, 0], "samples": [{"t": t, "gamma": np.round([[np.cos(t) ** 2, np.sin(t) ** 2], [np.sin(t) ** 2, np.cos(t) ** 2]], 17).tolist()} for t in times]}
    f = write(tmp_path, "f.json", proc)
    code, out, _ = run(["divisibility", "--process", f, "--t", "1.0472", "--tprime", "0.6"], capsys)
    res = json.loads(out)["tasks"][0]["result"]
    assert code == 0 and res["is_stochastic"] is False and res["min_entry"] < -0.15
    code, _, _ = run(["divisibility", "--process", f, "--t", "1.0472", "--tprime", "0.6", "--expect", "indivisible"], capsys)
    assert code == 0
    code, _, _ = run(["divisibility", "--process", f, "--t", "1.0472", "--tprime", "0.6", "--expect", "divisible"], capsys)
    assert code == 1


def test_stinespring_subcommand(tmp_path, capsys):
    p = 0.3
    ks = {"operators": [[[np.sqrt(1 - p), 0], [0, np.sqrt(1 - p)]], [[0, np.sqrt(p)], [np.sqrt(p), 0]]]}
    out_file = tmp_path / "report.json"
    code, out, _ = run(["stinespring", "--kraus", write(tmp_path, "bitflip03.json", ks), "--out", out_file], capsys)
    assert code == 0 and out == ""
    res = json.loads(out_file.read_text())["tasks"][0]["result"]
    assert np.array(res["unitary"]).shape == (4, 4, 2)
    np.testing.assert_allclose(res["gamma"], [[0.7, 0.3], [0.3, 0.7]], atol=1e-10)


def test_evolve_subcommand(tmp_path, capsys):
    h = write(tmp_path, "h.json", [[0.7071067811865476, 0.7071067811865476], [0.7071067811865476, -0.7071067811865476]])
    code, out, _ = run(["evolve", "--theta", h, "--p0", "1,0", "--gamma"], capsys)
    tasks = json.loads(out)["tasks"]
    assert code == 0 and [t["task"] for t in tasks] == ["gamma_from_theta", "evolve"]
    np.testing.assert_allclose(tasks[1]["result"]["probabilities"], [0.5, 0.5])
    rho = write(tmp_path, "rho.json", [[0.5, 0.5], [0.5, 0.5]])
    code, out, _ = run(["evolve", "--theta", h, "--rho", rho], capsys)
    res = json.loads(out)["tasks"][0]
    assert code == 0 and res["holds"] is None and res["result"]["initial_diagonal"] is False
    np.testing.assert_allclose(res["result"]["probabilities"], [1.0, 0.0], atol=1e-12)


def test_gauge_subcommand(tmp_path, capsys):
    c, s = np.cos(0.4), np.sin(0.4)
    theta = write(tmp_path, "t.json", [[c, [0, -s]], [[0, -s], c]])
    rho = write(tmp_path, "r.json", [[0.6, 0.2], [0.2, 0.4]])
    gen = write(tmp_path, "g.json", [[1, 0], [0, -1]])
    obs = write(tmp_path, "o.json", {"type": "observable", "beable": [1, 2]})
    code, out, _ = run(
        ["gauge-check", "--theta", theta, "--rho", rho, "--generator", gen, "--observable", obs, "--t", "0.4"], capsys
    )
    tasks = json.loads(out)["tasks"]
    assert code == 0 and [t["task"] for t in tasks] == ["sh_gauge", "fw_gauge"]
    v = write(tmp_path, "v.json", [[0, 1], [1, 0]])
    assert run(["gauge-check", "--theta", theta, "--rho", rho, "--v", v], capsys)[0] == 0
    assert run(["gauge-check", "--theta", theta, "--rho", rho], capsys)[0] == 3


def test_symmetry_subcommand(tmp_path, capsys):
    c, s = np.cos(0.4), np.sin(0.4)
    theta = write(tmp_path, "t.json", [[c, [0, -s]], [[0, -s], c]])
    vz = write(tmp_path, "z.json", [[1, 0], [0, -1]])
    code, out, _ = run(["symmetry-check", "--theta", theta, "--v", vz, "--wigner-trials", "8"], capsys)
    res = json.loads(out)["tasks"][0]["result"]
    assert code == 0 and res["classification"] == "AntiUnitary" and res["wigner"]["holds"]
    h = write(tmp_path, "h.json", [[0.7071067811865476, 0.7071067811865476], [0.7071067811865476, -0.7071067811865476]])
    assert run(["symmetry-check", "--theta", theta, "--v", h], capsys)[0] == 1


def test_dilate_and_realify_subcommands(tmp_path, capsys):
    h = write(tmp_path, "h.json", [[0.7071067811865476, 0.7071067811865476], [0.7071067811865476, -0.7071067811865476]])
    code, out, _ = run(["dilate", "--theta", h, "--d", "3", "--gamma-index", "2"], capsys)
    res = json.loads(out)["tasks"][0]["result"]
    assert code == 0 and res["dilated"]["internal_dim"] == 3
    np.testing.assert_allclose(res["gamma"], [[0.5, 0.5], [0.5, 0.5]], atol=1e-12)
    code, out, _ = run(["realify", "--matrix", write(tmp_path, "i.json", [[[0, 1]]])], capsys)
    assert code == 0
    assert json.loads(out)["tasks"][0]["result"]["real"] == [[0.0, -1.0], [1.0, 0.0]]


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["validate", "--check", "unitary"])
    assert exc.value.code == 2


def test_text_format_marks_informational_tasks(capsys):
    code, out, _ = run(["run", DEMO, "--format", "text"], capsys)
    assert code == 0
    assert out.splitlines()[-1] == "all verdicts hold"
    assert sum(line.startswith("PASS") for line in out.splitlines()) == 15


def test_run_scenario_api():
    s = Scenario.from_dict(scenario([{"task": "realify", "matrix": "m"}], {"m": {"type": "matrix", "builtin": "pauli_y"}}))
    report = run_scenario(s, 1e-10)
    assert report["all_hold"] and report["tasks"][0]["holds"]
    with pytest.raises(ScenarioError):
        Scenario.from_dict([])


def test_console_script_entry_point(tmp_path):
    path = write(tmp_path, "id.json", [[1, 0], [0, 1]])
    proc = subprocess.run(
        [sys.executable, "-m", "unistoch.cli", "validate", "--matrix", str(path), "--check", "unitary"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["all_hold"] is True


def test_scenario_object_kinds(tmp_path, capsys):
    proc = {"dim": 2, "initial": [0.5, 0.5], "samples": [{"t": 1.0, "gamma": [[0.9, 0.2], [0.1, 0.8]]}, {"t": 2.0, "gamma": [[0.83, 0.34], [0.17, 0.66]]}]}
    write(tmp_path, "proc.json", proc)
    objects = {
        "h": {"type": "hamiltonian", "diag": [1.0, -0.5]},
        "fam": {"type": "family", "hamiltonian": "h"},
        "still": {"type": "family", "builtin": "identity", "dim": 2},
        "u": {"type": "evolution", "family": "fam", "t": 1.2},
        "phi": {"type": "phases", "random": 4, "dim": 2},
        "ks": {"type": "kraus", "from_evolution": "u"},
        "markov": {"type": "process", "file": "proc.json"},
        "rho": {"type": "density", "value": [[0.5, [0, 0.25]], [[0, -0.25], 0.5]]},
        "a": {"type": "observable", "value": [[0, 1], [1, 0]]},
        "heis": {"type": "fw_transform", "builtin": "adjoint_of_family", "family": "fam"},
        "g": {"type": "matrix", "ref": "a"},
    }
    tasks = [
        {"task": "sh_gauge", "theta": "u", "phases": "phi"},
        {"task": "validate", "object": "ks", "check": "kraus"},
        {"task": "divisibility", "process": "markov", "t": 2.0, "t_prime": 1.0, "expect": True},
        {"task": "fw_gauge", "theta": "u", "rho": "rho", "transform": "heis", "t": 1.2, "observables": ["a"]},
        {"task": "integrate", "hamiltonian": "h", "psi": [0.6, [0, 0.8]], "t_end": 1.0},
        {"task": "noether", "generator": "g", "family": "fam", "rho": "rho", "times": [0.5, 1.0]},
        {"task": "noether", "generator": "g", "family": "still", "rho": "rho", "times": [0.5, 1.0]},
        {"task": "stinespring", "kraus": "ks"},
        {"task": "evolve", "theta": "u", "rho": "rho"},
    ]
    code, out, err = run(["run", write(tmp_path, "s.json", scenario(tasks, objects))], capsys)
    assert code == 0, err
    holds = [t["holds"] for t in json.loads(out)["tasks"]]
    # non-commuting generator and coherent initial state give informational entries
    assert holds == [True, True, True, True, True, None, True, True, None]


def test_circular_reference(tmp_path, capsys):
    objects = {"a": {"type": "matrix", "ref": "b"}, "b": {"type": "matrix", "ref": "a"}}
    code, _, err = run(["run", write(tmp_path, "s.json", scenario([], objects))], capsys)
    assert code == 3 and "circular" in err
