#!/usr/bin/env python3
"""Tests for the khtorsion command: exit statuses and report contents."""
import json

import pytest

from conftest import TREFOIL
from khtorsion.main import REPORT_SCHEMA, main

P = ["--prime", "10007"]


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out


def run_json(capsys, argv):
    code, out = run(capsys, argv)
    return code, json.loads(out.out)


@pytest.fixture
def pd_file(tmp_path):
    def write(text, name="knot.pd"):
        path = tmp_path / name
        path.write_text(text + "\n")
        return str(path)
    return write


def test_homology_of_the_trefoil(capsys, clean_env, pd_file):
    code, report = run_json(capsys, ["homology", pd_file(TREFOIL)] + P)
    assert code == 0
    assert report["schema"] == REPORT_SCHEMA
    assert report["command"] == "homology"
    assert report["pass"] is True
    results = report["results"]
    assert results["xo"] == 1
    assert results["ul_b_lower_bound"] == "ul_b(K) >= 1"
    assert results["free_rank"] == 1
    assert results["torsion_exponents"] == [1]
    assert results["consistent"]
    assert sum(results["t0_dimensions"].values()) == 4
    assert report["config"]["prime"] == 10007
    assert "timing" not in report


def test_homology_of_the_unknot(capsys, clean_env, pd_file):
    code, report = run_json(capsys, ["homology", pd_file("O(1)")] + P + ["--timing"])
    assert code == 0
    assert report["results"]["xo"] == 0
    assert report["results"]["decomposition"] == ["F[x]{0,1}"]
    assert "total_seconds" in report["timing"]


def test_basepoint_option(capsys, clean_env, pd_file):
    code, report = run_json(capsys, ["homology", pd_file(TREFOIL), "--basepoint", "4"] + P)
    assert code == 0
    assert report["results"]["basepoint"] == 4
    assert report["results"]["xo"] == 1


def test_text_format(capsys, clean_env, pd_file):
    code, out = run(capsys, ["homology", pd_file(TREFOIL), "--format", "text"] + P)
    assert code == 0
    assert "xo = 1" in out.out
    assert "ul_b(K) >= 1" in out.out


@pytest.mark.parametrize("text, error", [
    ("X(1,2,3)", "MalformedPD"),
    ("X(1,2,3,4)", "ArcMultiplicity"),
    ("O(1) O(2)", "NotAKnot"),
])
def test_bad_diagrams_exit_2(capsys, clean_env, pd_file, text, error):
    code, out = run(capsys, ["homology", pd_file(text)] + P)
    assert code == 2
    report = json.loads(out.out)
    assert report["pass"] is False
    assert report["error"]["type"] == error
    assert error in out.err


def test_prime_two_is_rejected(capsys, clean_env, pd_file):
    code, report = run_json(capsys, ["homology", pd_file(TREFOIL), "--prime", "2"])
    assert code == 2
    assert report["error"]["type"] == "ConfigError"


def test_missing_file(capsys, clean_env, tmp_path):
    code, report = run_json(capsys, ["homology", str(tmp_path / "nope.pd")])
    assert code == 2
    assert report["error"]["type"] == "FileNotFoundError"


def test_no_command_prints_help(capsys, clean_env):
    code, out = run(capsys, [])
    assert code == 2
    assert "homology" in out.out


def test_version(capsys, clean_env):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert capsys.readouterr().out.startswith("khtorsion ")


def test_movie_checks(capsys, clean_env, corpus):
    argv = ["movie", str(corpus / "ribbon.json"), "--checks", "theorem1", "ribbon", "corollary"] + P
    code, report = run_json(capsys, argv)
    assert code == 0
    assert report["results"]["movie"]["m"] == 1
    assert [c["check"] for c in report["results"]["checks"]] == ["theorem1", "ribbon", "corollary"]
    assert all(c["pass"] for c in report["results"]["checks"])


def test_movie_default_check_is_theorem1(capsys, clean_env, corpus):
    code, report = run_json(capsys, ["movie", str(corpus / "tube.json")] + P)
    assert code == 0
    assert [c["check"] for c in report["results"]["checks"]] == ["theorem1"]
    assert report["results"]["checks"][0]["unit_scalar"] in (1, -1)


def test_movie_neck_at_every_pair(capsys, clean_env, corpus):
    code, out = run(capsys, ["movie", str(corpus / "tube.json"), "--checks", "neck", "-f", "text"] + P)
    assert code == 0
    assert "neck at moves [0, 1]: PASS" in out.out


def test_movie_check_preconditions_exit_2(capsys, clean_env, corpus):
    code, report = run_json(capsys, ["movie", str(corpus / "ribbon.json"), "--checks", "neck"] + P)
    assert code == 2
    assert report["error"]["type"] == "NoSuchHandle"


def test_movie_bad_frame_reports_move_index(capsys, clean_env, corpus):
    code, report = run_json(capsys, ["movie", str(corpus / "bad_frame.json")] + P)
    assert code == 2
    assert report["error"]["type"] == "FrameMismatch"
    assert report["error"]["move_index"] == 0


def test_batch_keeps_row_order_and_reports_bad_rows(capsys, clean_env, tmp_path):
    table = tmp_path / "table.json"
    table.write_text(json.dumps([
        {"name": "3_1", "pd": TREFOIL},
        {"name": "broken", "pd": "X(1,2,3)"},
        {"name": "0_1", "pd": "O(1)"},
    ]))
    code, report = run_json(capsys, ["batch", str(table)] + P)
    assert code == 2
    rows = report["results"]["rows"]
    assert [r["name"] for r in rows] == ["3_1", "broken", "0_1"]
    assert rows[0]["xo"] == 1
    assert rows[1]["error"]["type"] == "MalformedPD"
    assert rows[2]["xo"] == 0


def test_batch_on_an_empty_table(capsys, clean_env, tmp_path):
    table = tmp_path / "empty.json"
    table.write_text("[]")
    code, report = run_json(capsys, ["batch", str(table)] + P)
    assert code == 0
    assert report["results"]["rows"] == []


def test_batch_rejects_a_non_table(capsys, clean_env, tmp_path):
    table = tmp_path / "table.json"
    table.write_text(json.dumps({"pd": TREFOIL}))
    code, report = run_json(capsys, ["batch", str(table)] + P)
    assert code == 2
    assert report["error"]["type"] == "MalformedPD"


@pytest.mark.slow
def test_batch_with_workers(capsys, clean_env, corpus):
    code, report = run_json(capsys, ["batch", str(corpus), "--workers", "2"] + P)
    assert code == 0
    rows = report["results"]["rows"]
    assert rows[0]["name"] == "0_1"
    assert all(r["free_rank"] == 1 for r in rows)
