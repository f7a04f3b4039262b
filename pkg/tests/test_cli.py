import json
import math
import subprocess
import sys

import pytest

from drillgauge.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_slope_length_modulus(capsys):
    code, out, _ = run(["slope-length", "--modulus", "0", "1", "--slope", "3", "4"], capsys)
    rec = json.loads(out)
    assert code == 0
    assert rec["normalized_length"] == 5.0 and rec["extremal_length"] == 25.0
    assert '"normalized_length": 5.000000000000' in out


def test_slope_length_basis(capsys):
    code, out, _ = run(["slope-length", "--basis", "1", "0", "0", "1", "--slope", "1", "0"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["normalized_length"] == 1.0 and rec["extremal_length"] == 1.0


def test_parse_error_names_field(capsys):
    code, _, err = run(["slope-length", "--modulus", "0", "1", "--slope", "3,0.5"], capsys)
    assert code == 2 and "--slope" in err


def test_zero_class_is_domain_error(capsys):
    code, _, err = run(["slope-length", "--modulus", "0", "1", "--slope", "0", "0"], capsys)
    assert code == 3 and "ZeroClass" in err


def test_missing_shape(capsys):
    code, _, err = run(["slope-length", "--slope", "1", "0"], capsys)
    assert code == 2


def test_argparse_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["slope-length", "--bogus"])
    assert exc.value.code == 2


def test_count_excluded(capsys):
    code, out, _ = run(["count-excluded", "--modulus", "0", "1", "--bound", "7.515", "--verify"], capsys)
    rec = json.loads(out)
    assert code == 0 and isinstance(rec["count"], int)
    assert rec["count"] == rec["box_scan_count"]


def test_moduli_max_small(capsys):
    code, out, _ = run(["moduli-max", "--bound", "4", "--nx", "11", "--ny", "10", "--rounds", "1",
                        "--verify"], capsys)
    rec = json.loads(out)
    assert code == 0
    assert rec["oracle_mismatches"] == 0 and rec["max_count"] <= 60


def test_certify_exit_codes(capsys):
    code, out, _ = run(["certify", "--modulus", "0", "64", "--slope", "0", "1"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["verdict"] == "CertifiedHyperbolic"
    assert rec["paper_constants_version"] == "HK-exposition"
    code, out, _ = run(["certify", "--modulus", "0", "25", "--slope", "0", "1"], capsys)
    assert code == 10 and json.loads(out)["verdict"] == "Inconclusive"
    code, _, _ = run(["certify", "--modulus", "0", "1", "--slope", "2", "4"], capsys)
    assert code == 3


def test_certify_integrate(capsys):
    code, out, _ = run(["certify", "--modulus", "0", "64", "--slope", "0", "1", "--integrate",
                        "--dalpha-max", "0.05"], capsys)
    rec = json.loads(out)
    assert code == 0 and "family" in rec["enclosures"]
    assert rec["enclosures"]["family"]["status"] in ("Ok", "HypothesisViolated", "RadiusUncertified")


def test_certify_batch_preserves_order(tmp_path, capsys):
    lines = []
    for k in range(40):
        y = (5 + k * 0.1) ** 2
        lines.append(json.dumps({"name": f"s{k}", "modulus": [0, y], "slope": [0, 1]}))
    lines.insert(7, "not json")
    batch = tmp_path / "in.jsonl"
    batch.write_text("\n".join(lines) + "\n")
    code, out, _ = run(["certify", "--batch", str(batch)], capsys)
    recs = [json.loads(ln) for ln in out.splitlines()]
    assert len(recs) == 41
    assert "error" in recs[7]
    names = [r["subject"]["shape"] for r in recs if "subject" in r]
    assert names == [f"s{k}" for k in range(40)]
    assert code == 2


def test_integrate_model(capsys, tmp_path):
    csv_path = tmp_path / "trace.csv"
    code, out, _ = run(["integrate", "--lhat", "7.583", "--model", "--alpha-start", "1e-6",
                        "--dalpha-max", "0.1", "--trace-csv", str(csv_path)], capsys)
    rec = json.loads(out)
    assert code == 0
    assert rec["dv_hi"] == pytest.approx(math.pi**2 / 7.583**2, abs=1e-9)
    assert rec["nz_reference"] == pytest.approx(math.pi**2 / 7.583**2, abs=1e-12)
    assert csv_path.read_text().startswith("alpha,ell_lo,ell_hi,dv_lo,dv_hi,radius,status")


def test_drill(capsys):
    code, out, _ = run(["drill", "--geodesic", "0.16"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["verdict"] == "Drillable"
    assert rec["numbers"]["volume_lower_bound_rounded"] == 1.701
    code, out, _ = run(["drill", "--geodesic", "0.2"], capsys)
    assert code == 10
    code, _, _ = run(["drill", "--geodesic", "-1"], capsys)
    assert code == 3


def test_hds_region_and_bounds(capsys):
    code, out, _ = run(["hds-region", "--modulus", "0", "1", "--class", "8", "0"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["in_region"] is True and rec["threshold"] == 7.583
    code, out, _ = run(["bounds", "--alpha", "6.283185307179586", "--ell", "0.1", "--radius", "1"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["l2_upper"] == rec["b00_upper"]
    code, out, _ = run(["bounds", "--alpha", "1", "--ell", "1", "--radius", "0"], capsys)
    assert code == 3


def test_output_formats(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(["slope-length", "--modulus", "0", "1", "--slope", "3", "4",
                        "--output", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["normalized_length"] == 5.0
    code, out, _ = run(["slope-length", "--modulus", "0", "1", "--slope", "3", "4", "--format", "csv"], capsys)
    assert code == 0 and "5.000000000000" in out
    code, out, _ = run(["slope-length", "--modulus", "0", "1", "--slope", "3", "4", "--format", "table"],
                       capsys)
    assert code == 0 and "normalized_length" in out


def test_config_strict(tmp_path, capsys, monkeypatch):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"alpha_start": 1e-4, "mystery": 1}))
    code, _, err = run(["drill", "--geodesic", "0.1", "--config", str(bad)], capsys)
    assert code == 2 and "mystery" in err
    neg = tmp_path / "neg.json"
    neg.write_text(json.dumps({"dalpha_max": -1}))
    assert run(["drill", "--geodesic", "0.1", "--config", str(neg)], capsys)[0] == 2
    ver = tmp_path / "ver.json"
    ver.write_text(json.dumps({"constants_version": "other"}))
    assert run(["drill", "--geodesic", "0.1", "--config", str(ver)], capsys)[0] == 2
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"output_format": "table"}))
    monkeypatch.setenv("DRILLGAUGE_CONFIG", str(good))
    code, out, _ = run(["drill", "--geodesic", "0.1"], capsys)
    assert code == 0 and not out.lstrip().startswith("{")


def test_deterministic_bytes(capsys):
    argv = ["certify", "--modulus", "0.13", "50", "--slope", "1", "7", "--integrate",
            "--dalpha-max", "0.05"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "drillgauge", "drill", "--geodesic", "0.16"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "Drillable" in res.stdout
