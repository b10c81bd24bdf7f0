import copy
import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import pytest

from jlmeasure import schemas
from jlmeasure.cli import main
from jlmeasure.symexpr import evaluate_at, parse

ROOT = Path(__file__).resolve().parents[1]
EXAMPLES = ROOT / "docs" / "examples"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_ratio(capsys):
    code, out, _ = run(capsys, "ratio", "--n", "1", "--d", "2", "--dv", "2")
    assert code == 0 and out.strip() == "1"
    code, out, _ = run(capsys, "ratio", "--n", "2", "--d", "3", "--dv", "3", "--convention", "n",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["ratio"] == "1" and doc["convention"] == "n"


def test_volume_json_parses_back(capsys):
    code, out, _ = run(capsys, "volume", "--n", "1", "--d", "2", "--dv", "2", "--format", "json")
    assert code == 0
    v = parse(json.loads(out)["value"])
    assert evaluate_at(v, 3).value == Fraction(4, 3)
    code, out, _ = run(capsys, "volume", "--n", "1", "--d", "2", "--dv", "2", "--q", "2",
                       "--normalization", "tamagawa")
    assert out.strip() == "3/4"


def test_volume_numeric(capsys):
    code, out, _ = run(capsys, "volume", "--n", "2", "--d", "1", "--dv", "1", "--q", "2", "--numeric")
    assert code == 0 and float(out) == 0.75
    code, _, err = run(capsys, "volume", "--n", "1", "--d", "2", "--dv", "2", "--numeric")
    assert code == 1 and "concrete q" in err


def test_disc_norm(capsys):
    assert run(capsys, "disc-norm", "--n", "1", "--d", "2", "--dv", "1", "--disc", "4")[1].strip() == "256"
    assert run(capsys, "disc-norm", "--n", "1", "--d", "2", "--dv", "2", "--q", "3")[1].strip() == "9"


def test_steinberg(capsys):
    code, out, _ = run(capsys, "steinberg", "--m", "2", "--e", "2", "--q", "3")
    assert code == 0 and out.strip() == "2"


def test_arch_degree(capsys):
    code, out, _ = run(capsys, "arch-degree", "--k", "3")
    assert code == 0 and parse(out.strip()) == parse("3/2*pi^-2")
    code, out, _ = run(capsys, "arch-degree", "--k", "3", "--numeric", "--digits", "9")
    assert out.strip() == "0.151981775"
    code, out, _ = run(capsys, "arch-degree", "--k-max", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["k"] for r in rows] == ["1", "2", "3", "4"] and set(rows[0]) == {"k", "degree"}
    code, _, err = run(capsys, "arch-degree", "--blocks", "ds:2,ds:3")
    assert code == 1 and "jlm: error" in err


def test_jl_real(capsys):
    code, out, _ = run(capsys, "jl-real", "--blocks", "ds:2,ch:+:0.7,ch:-:0.1")
    assert code == 0 and out.strip() == "0"
    code, out, _ = run(capsys, "jl-real", "--k", "5", "--format", "json")
    assert json.loads(out)["image"]["target"] == "quaternionic_group"
    code, _, err = run(capsys, "jl-real", "--blocks", "xx:1")
    assert code == 1 and "bad block" in err


def test_gamma_dim(capsys):
    code, out, _ = run(capsys, "gamma-dim", "--covol", "1/2", "--degree", "3/(2*pi^2)")
    assert code == 0 and parse(out.strip()) == parse("3/4*pi^-2")
    code, out, _ = run(capsys, "gamma-dim", "--covol", "pi/3", "--degree", "(k-1)/(4*pi)",
                       "--k-range", "2:12", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["gamma_dimension"] for r in rows][:2] == ["1/12", "1/6"] and len(rows) == 11


def test_gamma_density(capsys):
    code, out, _ = run(capsys, "gamma-density", "--t", "2", "--format", "json")
    row = json.loads(out)
    assert code == 0 and abs(float(row["ps_density"]) - 0.0792808) < 1e-7
    code, out, _ = run(capsys, "gamma-density", "--sign", "-", "--format", "json")
    assert json.loads(out)["profile"] == "t_coth"
    code, _, _ = run(capsys, "gamma-density", "--t", "0")
    assert code == 1


def test_covolume(capsys):
    code, out, _ = run(capsys, "covolume", "--input", str(EXAMPLES / "zeta2_covolume.json"),
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["exact"] is False and float(doc["error_bound"]) < 1e-6


def test_covolume_prime_cap(capsys, monkeypatch):
    path = str(EXAMPLES / "zeta2_covolume.json")
    monkeypatch.setenv("JLM_PRIME_CAP", "5000")
    code, _, err = run(capsys, "covolume", "--input", path)
    assert code == 1 and "bound" in err
    monkeypatch.setenv("JLM_PRIME_CAP", "abc")
    assert run(capsys, "covolume", "--input", path)[0] == 1
    monkeypatch.delenv("JLM_PRIME_CAP")
    assert run(capsys, "covolume", "--input", path, "--prime-cap", "2000")[0] == 1


def test_check_covolume_eq_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "check-covolume-eq", "--input", str(EXAMPLES / "covolume_check_equal.json"))
    assert code == 0 and out.startswith("equal")
    code, out, _ = run(capsys, "check-covolume-eq", "--format", "json",
                       "--input", str(EXAMPLES / "covolume_check_ram_outside_S.json"))
    assert code == 3 and json.loads(out)["verdict"] == "inconclusive"
    data = json.loads((EXAMPLES / "covolume_check_equal.json").read_text())
    bad = copy.deepcopy(data)
    bad["right"]["tamagawa_number"] = "2"
    code, out, _ = run(capsys, "check-covolume-eq", "--input", write(tmp_path, "ne.json", bad),
                       "--format", "json")
    doc = json.loads(out)
    assert code == 2 and doc["verdict"] == "not_equal" and doc["witness"] == "tamagawa_number"


def test_schema_errors_report_pointer(capsys, tmp_path):
    data = json.loads((EXAMPLES / "covolume_check_equal.json").read_text())
    data["setup"]["places"][0]["q"] = "two"
    code, _, err = run(capsys, "check-covolume-eq", "--input", write(tmp_path, "bad.json", data))
    assert code == 1 and "/setup/places/0/q" in err
    (tmp_path / "junk.json").write_text("{")
    assert run(capsys, "covolume", "--input", str(tmp_path / "junk.json"))[0] == 1
    assert run(capsys, "covolume", "--input", str(tmp_path / "missing.json"))[0] == 1
    assert run(capsys, "covolume")[0] == 1


def test_usage_errors(capsys):
    assert run(capsys)[0] == 1
    assert run(capsys, "nosuch")[0] == 1
    assert run(capsys, "ratio", "--n", "1")[0] == 1
    assert run(capsys, "ratio", "--n", "1", "--d", "2", "--dv", "3")[0] == 1


def test_verify_jl(capsys, tmp_path):
    path = str(EXAMPLES / "quaternion_setup.json")
    code, out, _ = run(capsys, "verify-jl", "--input", path)
    assert code == 0 and "verdict: equal" in out
    code, out, _ = run(capsys, "verify-jl", "--input", path, "--format", "json")
    doc = json.loads(out)
    assert [r["place"] for r in doc["places"]] == ["2", "3", "5", "inf1"]
    assert all(r["ratio"] == "1" for r in doc["places"])
    assert doc["tamagawa_compatibility"]["verdict"] == "equal"
    data = json.loads(Path(path).read_text())
    data["local_specs"]["3"] = {"n": 1, "d": 2, "n_v": 1, "d_v": 2, "q": 3}
    code, _, err = run(capsys, "verify-jl", "--input", write(tmp_path, "off.json", data))
    assert code == 1 and "jlm: error" in err


def test_verify_all_small(capsys):
    code, out, _ = run(capsys, "verify-all", "--max-nd", "4", "--skip-oracle", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["all_passed"] and all(r["passed"] for r in doc["rows"])
    code, out, _ = run(capsys, "verify-all", "--max-nd", "3", "--skip-oracle")
    assert code == 0 and "FAIL" not in out and "PASS" in out


def test_schema_files_current():
    for name, schema in schemas.SCHEMAS.items():
        on_disk = json.loads((ROOT / "docs" / "schemas" / f"{name}.schema.json").read_text())
        assert on_disk == schema


def test_example_files_validate():
    schemas.validate(json.loads((EXAMPLES / "zeta2_covolume.json").read_text()), "covolume_expr")
    schemas.validate(json.loads((EXAMPLES / "quaternion_setup.json").read_text()), "jl_setup")
    for f in ("covolume_check_equal.json", "covolume_check_ram_outside_S.json"):
        schemas.validate(json.loads((EXAMPLES / f).read_text()), "covolume_check")
