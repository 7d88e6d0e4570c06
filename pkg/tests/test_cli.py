import csv
import io
import json

import pytest

from sipw import __version__
from sipw.cli import run
from sipw.config import ConfigError, RunConfig, config_from_dict, load_config

RADIAL = ["--family", "radial-oscillator", "--b", "1", "--d", "0"]


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list_text(capsys):
    code, out, _ = invoke(capsys, "list")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 10  # header + 9 families
    assert sum("trivial-only" in line for line in lines) == 2
    assert sum(" deformable" in line for line in lines) == 7


def test_list_csv(capsys):
    code, out, _ = invoke(capsys, "list", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 9
    assert {r["family"] for r in rows if r["status"] == "trivial-only"} == {"linear", "inverse-m"}


def test_verify_radial_passes(capsys):
    code, out, _ = invoke(capsys, "verify", *RADIAL, "--m", "-2")
    assert code == 0
    report = json.loads(out)
    assert report["pass"] and report["version"] == __version__
    ids = {c["check_id"] for c in report["checks"]}
    assert {"bernoulli_plus", "bernoulli_minus", "compatibility_algebraic",
            "compatibility_full", "strong_shape_invariance", "shape_invariance_derivative",
            "partner_derivative", "partner_quadratic", "two_route_pair"} <= ids
    for c in report["checks"]:
        assert c["max_relative_residual"] < 1e-9
    assert report["grid"]["n"] == 1000 and report["tolerances"]["residual"] == 1e-9


@pytest.mark.parametrize("argv", [
    ["--family", "linear", "--b", "1", "--d", "0", "--m", "0"],
    ["--family", "inverse-m", "--b", "1", "--m", "2"],
])
def test_verify_negative_result_exits_zero(capsys, argv):
    code, out, _ = invoke(capsys, "verify", *argv)
    assert code == 0
    checks = {c["check_id"]: c for c in json.loads(out)["checks"]}
    assert checks["no_nontrivial_solution"]["pass"]
    assert "no" in checks["no_nontrivial_solution"]["detail"]


def test_verify_failure_exits_one(capsys):
    code, out, _ = invoke(capsys, "verify", *RADIAL, "--m", "-2", "--residual-tol", "1e-30")
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_verify_complex_family(capsys):
    code, out, _ = invoke(capsys, "verify", "--family", "complex-exponential", "--b", "1",
                          "--d", "1", "--m", "1")
    assert code == 0
    ids = {c["check_id"] for c in json.loads(out)["checks"]}
    assert "bernoulli_plus" in ids and "partner_derivative" not in ids


def test_report_round_trip(capsys):
    _, out, _ = invoke(capsys, "verify", *RADIAL, "--m", "-2")
    report = json.loads(out)
    again = json.loads(json.dumps(report))
    assert [c["pass"] for c in again["checks"]] == [c["pass"] for c in report["checks"]]
    assert again["pass"] == all(c["pass"] for c in report["checks"])


def test_deterministic_without_timestamp(capsys):
    argv = ["verify", *RADIAL, "--m", "-2", "--no-timestamp"]
    _, first, _ = invoke(capsys, *argv)
    _, second, _ = invoke(capsys, *argv)
    assert first == second and "timestamp" not in json.loads(first)
    _, stamped, _ = invoke(capsys, "verify", *RADIAL, "--m", "-2")
    assert "timestamp" in json.loads(stamped)


@pytest.mark.parametrize("threads", ["0", "3"])
def test_sweep_keeps_input_order(capsys, monkeypatch, threads):
    monkeypatch.setenv("SIPW_THREADS", threads)
    code, out, _ = invoke(capsys, "verify", *RADIAL, "--sweep-m=-5:-1:9", "--no-timestamp")
    assert code == 0
    sweep = json.loads(out)["data"]["sweep"]
    assert [s["m"] for s in sweep] == [-5 + 0.5 * i for i in range(9)]


def test_sweep_serial_and_threaded_agree(capsys, monkeypatch):
    outs = []
    for threads in ("0", "4"):
        monkeypatch.setenv("SIPW_THREADS", threads)
        outs.append(invoke(capsys, "verify", *RADIAL, "--sweep-m=-6:-2:7", "--no-timestamp")[1])
    assert outs[0] == outs[1]


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("SIPW_THREADS", "many")
    code, _, err = invoke(capsys, "verify", *RADIAL, "--sweep-m=-3:-2:2")
    assert code == 2 and "SIPW_THREADS" in err


def test_domain_scan(capsys):
    code, out, _ = invoke(capsys, "domain", "--family", "gen-poschl-teller", "--d", "1",
                          "--m-min", "-1", "--m-max", "1", "--m-steps", "9", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    for r in rows:
        assert (r["verdict"] == "free") == (float(r["m"]) < 0.5)
        assert (r["witness_x"] == "") == (r["verdict"] == "free")


def test_domain_trivial_family_is_usage_error(capsys):
    code, _, err = invoke(capsys, "domain", "--family", "linear", "--b", "1")
    assert code == 2 and err.count("\n") == 1


def test_build_five_points(capsys):
    code, out, _ = invoke(capsys, "build", *RADIAL, "--m", "-2", "--n", "5", "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 6
    assert lines[0] == "x,W,W1plus,W1minus,V,Vtilde"
    x = float(lines[1].split(",")[0])
    assert x == 20 / 6  # exact repr round trip


def test_build_pole_row_has_empty_cells(capsys):
    # gen_PT(b=0,c=1,d=1,m=1) has a pole at acosh(1.5) = 0.9624236501192069
    pole = 0.9624236501192069
    code, out, _ = invoke(capsys, "build", "--family", "gen-poschl-teller", "--d", "1",
                          "--m", "1", "--n", "1", "--x-min", repr(pole - 0.5),
                          "--x-max", repr(pole + 0.5), "--format", "csv")
    assert code == 0
    row = out.strip().split("\n")[1]
    assert row.endswith(",,,,,") and len(row.split(",")) == 6


def test_build_trivial_family(capsys):
    code, out, _ = invoke(capsys, "build", "--family", "linear", "--b", "1", "--n", "3",
                          "--format", "csv")
    assert code == 0
    for row in list(csv.DictReader(io.StringIO(out))):
        assert float(row["W1plus"]) == 0.0 == float(row["W1minus"])


def test_build_complex_rejected(capsys):
    code, _, err = invoke(capsys, "build", "--family", "complex-exponential")
    assert code == 2 and "non-Hermitian" in err


def test_spectrum_end_to_end(capsys):
    code, out, _ = invoke(capsys, "spectrum", *RADIAL, "--m", "-3", "--x-max", "25",
                          "--n", "2048", "--no-timestamp")
    assert code == 0
    report = json.loads(out)
    assert report["data"]["unbroken"]
    assert report["data"]["energies"][1] == pytest.approx(2.0, abs=5e-4)


def test_spectrum_singular_is_usage_error(capsys):
    code, _, err = invoke(capsys, "spectrum", "--family", "gen-poschl-teller", "--d", "1",
                          "--m", "1", "--n", "256")
    assert code == 2 and "singular" in err


def test_ladder_end_to_end(capsys):
    code, out, _ = invoke(capsys, "ladder", *RADIAL, "--m", "-3", "--x-max", "25",
                          "--n", "1024", "--depth", "2", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 2
    assert all(float(r["R"]) == pytest.approx(2.0, abs=1e-9) for r in rows)


def test_ladder_failing_rung_reported(capsys):
    code, _, err = invoke(capsys, "ladder", "--family", "gen-poschl-teller", "--d", "-1",
                          "--m", "-0.4", "--n", "256")
    assert code == 2 and "rung 1" in err


@pytest.mark.parametrize("argv", [
    ["verify", "--family", "morse"],
    ["verify"],
    ["verify", "--family", "radial-oscillator", "--c"],
    ["verify", "--family", "gen-poschl-teller", "--c", "-1"],
    ["frobnicate"],
    ["verify", "--family", "radial-oscillator", "--sweep-m", "1:2"],
])
def test_usage_errors(capsys, argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 2
    assert err.startswith("sipw: error:") and err.count("\n") == 1


def test_output_io_failure(capsys, tmp_path):
    code, _, err = invoke(capsys, "verify", *RADIAL, "--m", "-2",
                          "--output", str(tmp_path / "missing" / "r.json"))
    assert code == 1 and "cannot write" in err


def test_output_to_file(capsys, tmp_path):
    target = tmp_path / "r.csv"
    code, out, _ = invoke(capsys, "verify", *RADIAL, "--m", "-2", "--format", "csv",
                          "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("check_id,")


# ------------------------------------------------------------------ configuration


def test_minimal_config_fills_defaults(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"family": "radial-oscillator", "params": {"m": -2}}')
    cfg = load_config(path)
    assert cfg.family == "radial_oscillator" and cfg.params.m == -2.0
    assert cfg.tolerances.residual == RunConfig().tolerances.residual
    assert cfg.spectral.k == 4 and cfg.output.format == "json"


def test_unknown_family_names_field(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"family": "morse"}')
    with pytest.raises(ConfigError, match="family"):
        load_config(path)


@pytest.mark.parametrize("data,fragment", [
    ({"bogus": 1}, "bogus"),
    ({"params": {"e": 1}}, "params.e"),
    ({"params": {"b": "x"}}, "params.b"),
    ({"spectral": {"k": 1.5}}, "spectral.k"),
    ({"output": {"format": "xml"}}, "output.format"),
    ({"tolerances": {"residual": -1}}, "tolerances.residual"),
])
def test_config_field_errors(data, fragment):
    with pytest.raises(ConfigError, match=fragment.replace(".", r"\.")):
        config_from_dict(data)


def test_config_syntax_error_has_position(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{\n  "family": "linear",,\n}')
    with pytest.raises(ConfigError, match=r"c\.json:2:\d+"):
        load_config(path)


def test_config_error_exit_code(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"grid": {"z": 1}}')
    code, _, err = invoke(capsys, "verify", "--config", str(path))
    assert code == 2 and "grid.z" in err


def test_full_config_dump_round_trip(capsys, tmp_path):
    full = {
        "family": "gen_poschl_teller",
        "params": {"b": 1.0, "c": 1.0, "d": 9.0, "sign": 1, "m": 5.0},
        "grid": {"a": 0.0, "b": 20.0, "n": 4096},
        "spectral": {"k": 3, "depth": 1},
        "tolerances": {"residual": 1e-10, "spectral": 1e-4},
        "output": {"format": "csv", "path": "-"},
    }
    path = tmp_path / "full.json"
    path.write_text(json.dumps(full, indent=4))
    code, dumped, _ = invoke(capsys, "verify", "--config", str(path), "--dump-config")
    assert code == 0
    assert json.loads(dumped) == full
    again = tmp_path / "again.json"
    again.write_text(dumped)
    _, dumped2, _ = invoke(capsys, "verify", "--config", str(again), "--dump-config")
    assert dumped2 == dumped


def test_flags_override_config(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"family": "linear", "params": {"b": 3, "m": 1}}')
    _, dumped, _ = invoke(capsys, "verify", "--config", str(path), "--m", "-2",
                          "--family", "radial-oscillator", "--dump-config")
    cfg = json.loads(dumped)
    assert cfg["family"] == "radial_oscillator"
    assert cfg["params"]["m"] == -2.0 and cfg["params"]["b"] == 3.0
