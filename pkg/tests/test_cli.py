"""Command-line behavior: exit codes, error payloads, piping, goldens."""
import json
import os
from pathlib import Path

import pytest

from gpdflow.algebra import preset_group
from gpdflow.cli import COMMANDS, emit_report, fixture_models, main, \
    run_command
from gpdflow.fixtures import named_bundles
from gpdflow.serialize import bundle_to_json, canonical_dumps, parse_model

GOLDEN = Path(__file__).parent / "golden"
REGOLD = os.environ.get("GPDFLOW_REGOLD") == "1"


def run_cli(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def write_bundle(tmp_path, key, filename="bundle.json"):
    path = tmp_path / filename
    path.write_text(canonical_dumps(bundle_to_json(named_bundles()[key])))
    return str(path)


# --- golden corpus --------------------------------------------------------------


@pytest.mark.parametrize("command", COMMANDS)
def test_fixture_corpus_matches_golden(command, capsys):
    code, out = run_cli(capsys, [command, "--fixtures"])
    assert code == 0
    path = GOLDEN / f"{command}.json"
    if REGOLD:
        GOLDEN.mkdir(exist_ok=True)
        path.write_text(out)
    assert out == path.read_text()


@pytest.mark.parametrize("command", COMMANDS)
def test_fixture_corpus_is_deterministic(command, capsys):
    _, first = run_cli(capsys, [command, "--fixtures"])
    _, second = run_cli(capsys, [command, "--fixtures"])
    assert first == second


# --- exit codes and error payloads ------------------------------------------------


def test_verify_failing_group_exits_1(tmp_path, capsys):
    path = tmp_path / "badgroup.json"
    path.write_text(json.dumps({"kind": "group", "order": 2, "identity": 0,
                                "mult": [[0, 1], [1, 1]]}))
    code, out = run_cli(capsys, ["verify", str(path)])
    report = json.loads(out)
    assert code == 1
    assert report["ok"] is False
    verdict = report["runs"][0]["verdicts"][0]
    assert verdict["ok"] is False
    assert verdict["witness"] is not None


@pytest.mark.parametrize("text,code", [
    ("{not json", 10),
    ('{"kind":"nope"}', 11),
    ('{"kind":"bundle","graph":{"vertices":2,"edges":[[0,1]]},'
     '"group":{"preset":"Z2"},"labels":[7]}', 12),
])
def test_load_errors_exit_2_with_payload_code(tmp_path, capsys, text, code):
    path = tmp_path / "model.json"
    path.write_text(text)
    exit_code, out = run_cli(capsys, ["verify", str(path)])
    report = json.loads(out)
    assert exit_code == 2
    assert report["error"]["code"] == code


def test_bad_label_error_names_the_edge(tmp_path, capsys):
    path = tmp_path / "model.json"
    path.write_text(json.dumps({"kind": "bundle",
                                "graph": {"vertices": 2, "edges": [[0, 1]]},
                                "group": {"preset": "Z2"}, "labels": [7]}))
    _, out = run_cli(capsys, ["verify", str(path)])
    assert "edge 0" in json.loads(out)["error"]["message"]


def test_wrong_kind_for_command_exits_2(tmp_path, capsys):
    path = write_bundle(tmp_path, "triangle-z2-twisted")
    code, out = run_cli(capsys, ["ea", path])
    assert code == 2
    assert "group model" in json.loads(out)["error"]["message"]


def test_no_files_without_fixtures_exits_2(capsys):
    code, out = run_cli(capsys, ["verify"])
    assert code == 2


def test_files_and_fixtures_together_exit_2(tmp_path, capsys):
    path = write_bundle(tmp_path, "triangle-z1")
    code, _ = run_cli(capsys, ["verify", path, "--fixtures"])
    assert code == 2


def test_basepoint_out_of_range_exits_2(tmp_path, capsys):
    path = write_bundle(tmp_path, "triangle-z1")
    code, out = run_cli(capsys, ["holonomy", path, "--basepoint", "9"])
    assert code == 2
    assert "out of range" in json.loads(out)["error"]["message"]


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate", "x.json"])
    assert err.value.code == 2


# --- individual commands -----------------------------------------------------------


def test_trivial_answers_no_with_witness_but_exits_0(tmp_path, capsys):
    path = write_bundle(tmp_path, "triangle-z2-twisted")
    code, out = run_cli(capsys, ["trivial", path])
    facts = json.loads(out)["runs"][0]["facts"]
    assert code == 0
    assert facts["trivial"] is False
    assert facts["witness_cycles"]
    assert facts["section"] is None


def test_trivial_answers_yes_with_section(tmp_path, capsys):
    path = write_bundle(tmp_path, "triangle-z2-trivial")
    code, out = run_cli(capsys, ["trivial", path])
    facts = json.loads(out)["runs"][0]["facts"]
    assert code == 0
    assert facts["trivial"] is True
    assert facts["section"] is not None
    assert facts["witness_cycles"] == []


def test_roundtrip_reports_iso_witness(tmp_path, capsys):
    path = write_bundle(tmp_path, "wedge2-z3")
    code, out = run_cli(capsys, ["roundtrip", path])
    run = json.loads(out)["runs"][0]
    assert code == 0
    assert run["facts"]["witness_gauge"] is not None
    assert {"property": "triviality agreement", "ok": True,
            "failure": None, "witness": [False, False], "notes": {}} \
        in run["verdicts"]


def test_groupoidify_reports_arrow_count_law(tmp_path, capsys):
    path = write_bundle(tmp_path, "edge-s3")
    code, out = run_cli(capsys, ["groupoidify", path])
    run = json.loads(out)["runs"][0]
    assert code == 0
    assert run["facts"]["arrows"] == 2 * 2 * 6
    assert run["model"]["kind"] == "groupoid"
    assert "connection" in run["model"]


def test_pipe_groupoidify_bundleize_holonomy_conjugate(tmp_path, capsys,
                                                       monkeypatch):
    """groupoidify | bundleize | holonomy gives a subgroup conjugate to
    the holonomy of the original bundle."""
    import io
    path = write_bundle(tmp_path, "edge-s3")
    code, out = run_cli(capsys, ["groupoidify", path])
    gpd_model = json.loads(out)["runs"][0]["model"]

    monkeypatch.setattr("sys.stdin",
                        io.StringIO(json.dumps({"model": gpd_model})))
    code, out = run_cli(capsys, ["bundleize", "-", "--basepoint", "0"])
    assert code == 0
    bundle_model = json.loads(out)["runs"][0]["model"]

    monkeypatch.setattr("sys.stdin",
                        io.StringIO(json.dumps({"model": bundle_model})))
    code, out = run_cli(capsys, ["holonomy", "-"])
    assert code == 0
    piped = set(json.loads(out)["runs"][0]["facts"]["subgroup"])

    code, out = run_cli(capsys, ["holonomy", path])
    original = set(json.loads(out)["runs"][0]["facts"]["subgroup"])

    grp = preset_group("S3")
    conjugates = [{grp.conjugate(g, h) for g in original}
                  for h in grp.elements]
    assert piped in conjugates


def test_orbits_on_action_file(tmp_path, capsys):
    from gpdflow.dynamics import base_action
    from gpdflow.ehresmann import groupoid_of_bundle
    from gpdflow.serialize import action_to_json
    action = base_action(
        groupoid_of_bundle(named_bundles()["triangle-z2-twisted"]).groupoid)
    path = tmp_path / "action.json"
    path.write_text(canonical_dumps(action_to_json(action)))
    code, out = run_cli(capsys, ["orbits", str(path)])
    facts = json.loads(out)["runs"][0]["facts"]
    assert code == 0
    assert facts["orbits"] == [[0, 1, 2]]


def test_sections_counts_match_at_other_basepoint(tmp_path, capsys):
    path = write_bundle(tmp_path, "triangle-z1")
    for basepoint in ("0", "1", "2"):
        code, out = run_cli(capsys,
                            ["sections", path, "--basepoint", basepoint])
        facts = json.loads(out)["runs"][0]["facts"]
        assert code == 0
        assert facts["count"] == 1


def test_universal_on_ambit_self_maps(tmp_path, capsys):
    path = write_bundle(tmp_path, "triangle-z2-twisted")
    code, out = run_cli(capsys, ["universal", path])
    facts = json.loads(out)["runs"][0]["facts"]
    assert code == 0
    assert facts["count"] == 2
    for entry in facts["maps"]:
        assert sorted(entry["values"]) == list(range(6))


def test_ea_verdicts(tmp_path, capsys):
    path = tmp_path / "group.json"
    path.write_text(json.dumps({"kind": "group", "preset": "Z1"}))
    code, out = run_cli(capsys, ["ea", str(path)])
    facts = json.loads(out)["runs"][0]["facts"]
    assert code == 0 and facts["extremely_amenable"] is True

    path.write_text(json.dumps({"kind": "group", "preset": "S3"}))
    code, out = run_cli(capsys, ["ea", str(path)])
    facts = json.loads(out)["runs"][0]["facts"]
    assert code == 0 and facts["extremely_amenable"] is False
    assert facts["free"] is True and facts["fixed"] == []


# --- report formats ------------------------------------------------------------------


def test_json_report_is_canonical(tmp_path, capsys):
    path = write_bundle(tmp_path, "wedge2-z3")
    _, out = run_cli(capsys, ["holonomy", path])
    parsed = json.loads(out)
    assert out == canonical_dumps(parsed) + "\n"


def test_text_report_carries_the_same_verdicts(tmp_path, capsys):
    path = write_bundle(tmp_path, "triangle-z2-twisted")
    _, json_out = run_cli(capsys, ["semigroup", path])
    _, text_out = run_cli(capsys, ["semigroup", path, "--format", "text"])
    report = json.loads(json_out)
    for run in report["runs"]:
        for verdict in run["verdicts"]:
            assert verdict["property"] in text_out
        for key in run["facts"]:
            assert f"fact {key}:" in text_out
    assert text_out.strip().endswith("result: pass")
    digest = report["inputs"][0]["digest"]
    assert f"sha256:{digest}" in text_out


def test_text_report_for_errors(tmp_path, capsys):
    path = tmp_path / "model.json"
    path.write_text('{"kind":"nope"}')
    code, out = run_cli(capsys, ["verify", str(path), "--format", "text"])
    assert code == 2
    assert "error 11:" in out
    assert out.strip().endswith("result: error")


def test_run_command_over_parsed_models():
    models = fixture_models("ea")
    report = run_command("ea", models)
    assert report["ok"] is True
    assert [entry["name"] for entry in report["inputs"]] == \
        ["Z1", "Z2", "Z3", "S3", "S4"]
    emitted = emit_report(report, "json")
    assert json.loads(emitted)["command"] == "ea"


def test_stdin_without_envelope(capsys, monkeypatch):
    import io
    model = bundle_to_json(named_bundles()["triangle-z1"])
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(model)))
    code, out = run_cli(capsys, ["verify", "-"])
    assert code == 0
    assert json.loads(out)["inputs"][0]["name"] == "stdin"


def test_whole_report_pipes_into_next_command(tmp_path, capsys, monkeypatch):
    """The unmodified output of groupoidify feeds bundleize directly."""
    import io
    path = write_bundle(tmp_path, "wedge2-z3")
    code, report_out = run_cli(capsys, ["groupoidify", path])
    assert code == 0
    monkeypatch.setattr("sys.stdin", io.StringIO(report_out))
    code, out = run_cli(capsys, ["bundleize", "-", "--basepoint", "0"])
    assert code == 0
    rebuilt = json.loads(out)["runs"][0]["model"]
    assert rebuilt["kind"] == "bundle"
    assert rebuilt["labels"] == [1, 0]
