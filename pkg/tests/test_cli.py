from __future__ import annotations

import json

from tracerecon.cli import main
from tracerecon.evalharness.incidents import INCIDENT_IDS
from tracerecon.synthgen import suite_digest


def digest_line(out: str) -> str:
    return next(line for line in out.splitlines() if line.startswith("digest"))


def test_generate_is_reproducible_and_refuses_to_clobber(tmp_path, capsys):
    assert main(["generate", "--seed", "42", "--out", str(tmp_path / "a")]) == 0
    first = digest_line(capsys.readouterr().out)
    assert main(["generate", "--seed", "42", "--out", str(tmp_path / "b")]) == 0
    assert digest_line(capsys.readouterr().out) == first
    assert suite_digest(tmp_path / "a") == suite_digest(tmp_path / "b")
    assert (tmp_path / "a" / "run_config.json").exists()
    assert main(["generate", "--out", str(tmp_path / "a")]) == 2
    assert main(["generate", "--out", str(tmp_path / "a"), "--overwrite"]) == 0


def test_evaluate_in_memory_passes(tmp_path, capsys):
    assert main(["evaluate", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "premium\t14.0" in out
    assert "FAIL" not in out
    assert (tmp_path / "T3.tsv").exists()


def test_evaluate_seed_mismatch_is_usage_error(tmp_path, capsys):
    main(["generate", "--seed", "42", "--out", str(tmp_path / "s")])
    assert main(["evaluate", "--suite", str(tmp_path / "s"), "--seed", "7"]) == 2


def test_evaluate_other_seed_still_calibrates(tmp_path, capsys):
    # profiles do not depend on the seed, so another seed still calibrates
    assert main(["evaluate", "--seed", "7", "--format", "document"]) == 0
    out = capsys.readouterr().out
    doc = json.loads(out[: out.rindex("}") + 1])
    assert doc["master_seed"] == 7


def test_reconstruct_and_rate_an_incident(tmp_path, capsys):
    from importlib import resources
    fixture = resources.files("tracerecon.evalharness").joinpath(f"incidents/{INCIDENT_IDS[0]}.json")
    path = tmp_path / "incident.json"
    path.write_text(fixture.read_text())
    assert main(["reconstruct", "--input", str(path), "--out", str(tmp_path / "r")]) == 0
    assert "0.5714" in capsys.readouterr().out
    [report] = list((tmp_path / "r").glob("*.report.json"))
    assert main(["rate", "--report", str(report), "--tested-rows", "policy_basis"]) == 0
    assert "aggregate\t2" in capsys.readouterr().out
    assert main(["rate", "--report", str(report), "--tested-rows", ""]) == 2


def test_reconstruct_gate_failures_exit_three(tmp_path, capsys):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    assert main(["reconstruct", "--input", str(empty)]) == 3
    junk = tmp_path / "junk.jsonl"
    junk.write_text("not json\n{{{\n")
    assert main(["reconstruct", "--input", str(junk)]) == 3
    assert "regime_unsupported" in capsys.readouterr().err


def test_bad_threshold_is_usage_error(capsys):
    assert main(["evaluate", "--theta", "2"]) == 2


def test_evaluate_refuses_a_perturbed_suite(tmp_path, capsys):
    suite_dir = tmp_path / "s"
    main(["generate", "--out", str(suite_dir)])
    for path in sorted(suite_dir.rglob("*.manifest.json")):
        doc = json.loads(path.read_text())
        if doc["expected_profile"]["inputs"]["tag"] == "fully_fillable":
            doc["expected_profile"]["inputs"] = {"confidence": 0.0, "tag": "structurally_unfillable"}
            path.write_text(json.dumps(doc))
            break
    capsys.readouterr()
    assert main(["evaluate", "--suite", str(suite_dir)]) == 4
    captured = capsys.readouterr()
    assert "C1 violated: inputs unfillable count 2 ≠ 1" in captured.err
    assert "T3" not in captured.out


def test_rate_all_full_report(tmp_path, capsys):
    from tracerecon.pipeline import reconstruct_fragments

    from .builders import full_trace

    path = tmp_path / "r.json"
    path.write_text(reconstruct_fragments(full_trace())[0].dumps())
    assert main(["rate", "--report", str(path), "--tested-rows", "inputs,output_action",
                 "--format", "document"]) == 0
    assert json.loads(capsys.readouterr().out)["aggregate_level"] == 5
