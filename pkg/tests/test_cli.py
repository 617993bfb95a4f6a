import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from catvisc.cli import main
from catvisc.config import COUNTEREXAMPLE_SCHEMA, LEMMA_REPORT_SCHEMA, SUMMARY_SCHEMA

CONFIGS = Path(__file__).resolve().parents[1] / "scripts" / "configs"


def _short_config(tmp_path, name, **overrides):
    doc = json.loads((CONFIGS / name).read_text())
    doc.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_counterexample_text(capsys):
    assert main(["counterexample"]) == 0
    out = capsys.readouterr().out
    assert out.rstrip().endswith("N-property: VIOLATED")
    assert "FAILED" not in out


def test_counterexample_json(tmp_path):
    out = tmp_path / "ce.json"
    assert main(["counterexample", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, COUNTEREXAMPLE_SCHEMA)
    assert doc["verdict"] == "VIOLATED"
    assert doc["distances"]["d(A,C)"] == pytest.approx(17**0.5, abs=1e-14)
    first = out.read_text()
    main(["counterexample", "--format", "json", "--out", str(out)])
    assert out.read_text() == first


def test_lemmas_pass_and_report(tmp_path):
    out = tmp_path / "lemmas.json"
    assert main(["lemmas", "--suite", "four-point", "--trials", "1000", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, LEMMA_REPORT_SCHEMA)
    assert doc["passed"] and doc["suites"][0]["name"] == "four-point"


def test_lemmas_mutated_exit_one(tmp_path):
    out = tmp_path / "lemmas.json"
    assert main(["lemmas", "--suite", "chord-convexity", "--trials", "500", "--mutate",
                 "--out", str(out)]) == 1


@pytest.mark.parametrize("argv", [
    ["lemmas", "--trials", "0"],
    ["lemmas", "--suite", "nonexistent"],
    ["lemmas", "--seed", "-1"],
    ["lemmas", "--seed", str(2**64)],
    [],
])
def test_usage_errors_exit_two(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_iterate_writes_valid_deterministic_outputs(tmp_path):
    cfg = _short_config(tmp_path, "plane_segment.json", max_iter=2000)
    paths = []
    for tag in ("a", "b"):
        trace, summ = tmp_path / f"{tag}.csv", tmp_path / f"{tag}.json"
        assert main(["iterate", "--config", cfg, "--trace", str(trace), "--out", str(summ)]) == 0
        paths.append((trace, summ))
    (ta, sa), (tb, sb) = paths
    assert ta.read_bytes() == tb.read_bytes()
    assert sa.read_bytes() == sb.read_bytes()
    doc = json.loads(sa.read_text())
    jsonschema.validate(doc, SUMMARY_SCHEMA)
    assert doc["iterations"] == 2000
    assert doc["q"] == pytest.approx([0.4, 0.0], abs=1e-12)


def test_iterate_k_bound_exit_two(tmp_path, capsys):
    cfg = _short_config(tmp_path, "sphere_k_too_large.json", max_iter=10)
    assert main(["iterate", "--config", cfg]) == 2
    assert "[k-bound]" in capsys.readouterr().err


def test_schema_errors_carry_a_pointer(tmp_path, capsys):
    doc = json.loads((CONFIGS / "plane_segment.json").read_text())
    doc["sequences"]["t"] = {"kind": "harmonic", "c": -1}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert main(["iterate", "--config", str(path)]) == 2
    assert "at /sequences/t" in capsys.readouterr().err


def test_unreadable_config_exit_two(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ not json")
    assert main(["iterate", "--config", str(path)]) == 2
    assert main(["iterate", "--config", str(tmp_path / "missing.json")]) == 2


def test_glued_needs_flag(tmp_path, capsys):
    cfg = _short_config(tmp_path, "glued_explore.json", max_iter=50)
    assert main(["iterate", "--config", cfg]) == 2
    assert "--explore-no-N" in capsys.readouterr().err
    out = tmp_path / "g.json"
    assert main(["iterate", "--config", cfg, "--explore-no-N", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["exploratory"] is True


def test_halpern_subcommand(tmp_path):
    cfg = _short_config(tmp_path, "plane_segment.json", max_iter=500)
    out = tmp_path / "h.json"
    assert main(["halpern", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["mode"] == "halpern"
    assert doc["q"] == pytest.approx([0.5, 0.0], abs=1e-12)


def test_project_subcommand(tmp_path, capsys):
    cfg = str(CONFIGS / "plane_segment.json")
    assert main(["project", "--config", cfg, "--point", "[0.3, 0.7]"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["point"] == pytest.approx([0.3, 0.0])
    assert doc["distance"] == pytest.approx(0.7)
    assert main(["project", "--config", cfg, "--point", "[0.3"]) == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "catvisc", "counterexample"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "N-property: VIOLATED" in proc.stdout
