import csv
import io
import json

import mpmath
import pytest

from fibids import export
from fibids.approximants import build_band_tree
from fibids.cli import main, read_config
from fibids.cli import UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_number_format_round_trips():
    x = 0.1 + 0.2
    assert float(export.fmt_number(x)) == x
    assert export.fmt_number(3) == "3"
    assert export.fmt_number(None) == ""
    with mpmath.workdps(40):
        v = mpmath.mpf(1) / 3
    assert export.fmt_number(v) == "0.33333333333333333"


def test_csv_header_always_present():
    assert export.to_csv([], export.IDS_FIELDS) == "E,N,level,error_bound\n"


def test_tree_json_has_edges():
    doc = json.loads(export.tree_json(build_band_tree(5.0, 4)))
    assert doc["max_level"] == 4
    assert len(doc["records"]) == 1 + 1 + 2 + 3 + 5
    assert {"parent": [0, 0], "child": [2, 0]} in doc["edges"]


def test_bands_csv(capsys):
    code, out, _ = run(capsys, "bands", "--lambda", "5", "--level", "6", "--format", "csv")
    assert code == 0
    r = rows(out)
    assert len(r) == 13
    assert sum(x["kind"] == "A" for x in r) == 5
    assert list(r[0]) == list(export.BAND_FIELDS)


def test_bands_small_coupling_needs_scan(capsys):
    code, out, err = run(capsys, "bands", "--lambda", "3", "--level", "6")
    assert code == 2 and out == ""
    assert err.strip() == "ERROR coupling: hierarchy requires lambda > 4; use --scan"
    code, out, _ = run(capsys, "bands", "--lambda", "0.5", "--scan", "--level", "8")
    assert code == 0 and len(rows(out)) == 34


def test_ids_grid_monotone(capsys):
    code, out, _ = run(capsys, "ids", "--lambda", "5", "--grid", "-3:8:1101", "--level", "12")
    assert code == 0
    n = [float(r["N"]) for r in rows(out)]
    assert len(n) == 1101 and all(a <= b for a, b in zip(n, n[1:]))


def test_ids_energy_file(capsys, tmp_path):
    f = tmp_path / "e.txt"
    f.write_text("2.5\n")
    code, out, _ = run(capsys, "ids", "--lambda", "5", "--energies", str(f), "--level", "14")
    assert code == 0
    assert float(rows(out)[0]["N"]) == pytest.approx(0.381967, abs=1e-6)
    code, _, err = run(capsys, "ids", "--lambda", "5", "--energies", str(tmp_path / "no"), "--level", "4")
    assert code == 1 and err.startswith("ERROR usage:") and err.count("\n") == 1


def test_ids_free(capsys):
    code, out, _ = run(capsys, "ids", "--free", "--grid", "-2:2:5")
    assert code == 0
    assert [float(r["N"]) for r in rows(out)] == pytest.approx([0, 1 / 3, 1 / 2, 2 / 3, 1], abs=1e-12)


def test_holder_rows_inside_envelope(capsys):
    code, out, _ = run(capsys, "holder", "--lambda", "8", "--kmax", "10")
    assert code == 0
    r = rows(out)
    assert {int(x["k"]) for x in r} == set(range(4, 11))
    for x in r:
        assert float(x["gamma_lower"]) <= float(x["exponent"]) <= float(x["gamma_tilde_k"])


def test_dynamics_commands(capsys):
    code, out, _ = run(capsys, "dynamics", "per2", "--lambda", "0")
    assert code == 0 and float(rows(out)[0]["mu_u"]) == pytest.approx(6.854102, abs=1e-6)
    code, out, _ = run(capsys, "dynamics", "escape-raster", "--lambda", "5", "--grid", "-3:8:12")
    assert code == 0 and len(rows(out)) == 12
    code, out, _ = run(capsys, "dynamics", "semiconj", "--size", "40", "--format", "json")
    assert code == 0 and json.loads(out)[0]["max_defect"] < 1e-10


def test_seeded_output_is_deterministic(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}.csv"
        assert main(["dynamics", "semiconj", "--samples", "50", "--seed", "7", "-o", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    main(["bands", "--lambda", "6", "--level", "8", "--format", "json", "-o", str(a)])
    main(["bands", "--lambda", "6", "--level", "8", "--format", "json", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_overrides(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sample\nlambda = 5\nlevel = 4\n")
    assert read_config(str(cfg)) == {"coupling": 5.0, "max_level": 4}
    code, out, _ = run(capsys, "bands", "--config", str(cfg))
    assert code == 0 and len(rows(out)) == 5
    code, out, _ = run(capsys, "bands", "--config", str(cfg), "--level", "5")
    assert len(rows(out)) == 8
    cfg.write_text("colour = red\n")
    with pytest.raises(UsageError):
        read_config(str(cfg))
    code, _, err = run(capsys, "bands", "--config", str(cfg))
    assert code == 1 and err.startswith("ERROR usage:")


def test_usage_errors_exit_one(capsys):
    code, _, err = run(capsys, "bands", "--bogus")
    assert code == 1 and err.splitlines()[-1].startswith("ERROR usage:")
    code, _, err = run(capsys, "bands", "--lambda", "5")
    assert code == 1 and "--level" in err
    code, _, err = run(capsys, "ids", "--lambda", "5", "--level", "4")
    assert code == 1


def test_computation_errors_exit_two(capsys):
    code, _, err = run(capsys, "bands", "--lambda", "1", "--scan", "--level", "19")
    assert code in (1, 2) and err.startswith("ERROR ")
    code, _, err = run(capsys, "dynamics", "per2", "--lambda", "5")
    assert code == 2 and err.startswith("ERROR domain:")
