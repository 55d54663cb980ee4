import csv
import io
import json

import pytest

from ffrestrict.cli import main
from ffrestrict.errors import ContractError
from ffrestrict.experiments import (
    VERIFY_SUITES,
    ExperimentConfig,
    default_config,
    emit_config,
    parse_config,
    run,
)
from ffrestrict.norms import CSV_HEADER

SMALL_VERIFY = ["verify", "--dims", "2", "--qs", "3,5", "--samples", "3"]


def small(name, **kw):
    return default_config(name).with_overrides(**kw)


@pytest.mark.parametrize("name", ("verify", "scan", "witness", "energy", "report"))
def test_config_round_trip(name):
    cfg = small(name, seed=12345678901234567890, samples=7)
    assert parse_config(emit_config(cfg)) == cfg


def test_config_rejects_bad_input():
    with pytest.raises(ContractError):
        ExperimentConfig("verify", suites=("nope",))
    with pytest.raises(ContractError):
        ExperimentConfig("scan", pairs=(("1/2", "4"),))
    with pytest.raises(ContractError):
        ExperimentConfig("verify", seed=2**64)
    with pytest.raises(ContractError):
        parse_config("[verify]\nbogus = 1\n")
    with pytest.raises(ContractError):
        parse_config("[scan]\n", "verify")


def test_partial_config_takes_defaults():
    cfg = parse_config("[witness]\nqs = 3, 7\n")
    assert cfg.qs == (3, 7) and cfg.pairs == default_config("witness").pairs


def test_verify_is_deterministic_and_passes():
    cfg = small("verify", dims=(2,), qs=(3, 5), samples=3)
    a, b = run(cfg), run(cfg)
    assert a.passed
    assert a.to_json(timing=False) == b.to_json(timing=False)
    assert {r["check"] for r in a.results} >= set(VERIFY_SUITES) - {"slice", "bounds", "decomposition"}


def test_verify_seed_changes_samples():
    a = run(small("verify", dims=(2,), qs=(3,), samples=3, suites=("plancherel",), seed=1))
    b = run(small("verify", dims=(2,), qs=(3,), samples=3, suites=("plancherel",), seed=2))
    assert a.passed and b.passed
    assert a.results[0]["max_error"] != b.results[0]["max_error"]


def test_verify_parallel_matches_serial():
    cfg = small("verify", dims=(2,), qs=(3, 5), samples=2, suites=("plancherel", "duality"))
    assert run(cfg, jobs=2).payload() == run(cfg).payload()


def test_gauss_fault_is_caught():
    rep = run(small("verify", dims=(2,), qs=(5,), samples=2, suites=("dsigma_explicit",)), gauss_override=1 + 0j)
    assert not rep.passed and rep.failed_checks == ["dsigma_explicit"]


def test_cli_exit_codes(capsys):
    assert main(SMALL_VERIFY) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["summary"]["passed"] is True
    assert main(SMALL_VERIFY, gauss_override=1 + 0j) == 1
    assert "FAIL: " in capsys.readouterr().err
    assert main(["verify", "--dims", "", "--qs", "3"]) == 2
    assert "no cases" in capsys.readouterr().err
    assert main(["frobnicate"]) == 2
    assert main(["verify", "--seed", "-1"]) == 2
    assert main(["verify", "--qs", "6"]) == 2


def test_cli_fault_names_the_check(capsys):
    assert main(SMALL_VERIFY, gauss_override=1 + 0j) == 1
    assert "dsigma_explicit" in capsys.readouterr().err


def test_cli_grid_cap(capsys):
    assert main(["verify", "--dims", "4", "--qs", "7", "--grid-cap", "300"]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_writes_out_file(tmp_path):
    out = tmp_path / "report.md"
    assert main(["report", "--out", str(out)]) == 0
    assert out.read_text() == run(default_config("report")).render("markdown")


def test_cli_config_file(tmp_path, capsys):
    path = tmp_path / "w.ini"
    path.write_text("[witness]\ndims = 5\nqs = 3, 7\npairs = 5/2:2\n")
    assert main(["witness", "--config", str(path)]) == 0
    obj = json.loads(capsys.readouterr().out)
    (entry,) = obj["results"]
    assert entry["k"] == 2 and abs(entry["slope"] - 0.3) < 0.05


def test_scan_csv(capsys):
    assert main(["scan", "--qs", "3,5,7"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == CSV_HEADER + ["slope", "intercept", "residual"]
    assert len(rows) == 1 + 3 * 3
    assert main(["scan", "--qs", "3,5"]) == 2


def test_witness_default_grid():
    rep = run(default_config("witness"))
    assert rep.passed
    slopes = {(e["p"], e["r"]): (e["slope"], e["predicted_slope"]) for e in rep.results}
    assert slopes[("5/2", "2")][1] == pytest.approx(0.3)
    assert slopes[("5/2", "4")][1] == pytest.approx(-0.45)


def test_energy_small_grid():
    rep = run(small("energy", qs=(3,), samples=5, trials=4))
    assert rep.passed
    assert rep.summary["max_corollary_ratio"]["even"] <= 8
    assert any(r["check"] == "energy_methods" for r in rep.results)


def test_energy_d2_closed_form():
    rep = run(small("energy", dims=(2,), qs=(3, 5), sizes=(3,), samples=3, trials=2))
    full = [r for r in rep.results if r["check"] == "energy_full_parabola"]
    assert [r["energy"] for r in full] == [15, 45]


@pytest.mark.parametrize("fmt", ("markdown", "csv", "json"))
def test_report_formats(fmt):
    rep = run(default_config("report"))
    text = rep.render(fmt)
    assert text.strip()
    if fmt == "json":
        assert json.loads(text)["summary"]["rows"] == len(rep.results)


@pytest.mark.parametrize("fmt", ("markdown", "csv"))
def test_verify_renders_tables(fmt):
    rep = run(small("verify", dims=(2,), qs=(3,), samples=2, suites=("plancherel",)))
    assert "plancherel" in rep.render(fmt)
