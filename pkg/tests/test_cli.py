import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bjorth import ModuleSpace, ParseError, ProblemFile, ShapeError
from bjorth.cli import main
from bjorth.interchange import parse_algebra_spec
from strategies import SPACES, element, seeds

E12 = [[0, 1], [0, 0]]


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc), encoding="utf-8")
    return str(p)


def _pair_file(tmp_path, space, x, y, name="pair.json"):
    p = tmp_path / name
    ProblemFile(space, space.element(x), space.element(y)).write(p)
    return str(p)


# -- interchange ---------------------------------------------------------------

@given(st.sampled_from(SPACES), seeds)
def test_problem_file_round_trip_is_exact(space, seed):
    pf = ProblemFile(space, element(space, seed), element(space, seed + 1), {"note": "x"})
    back = ProblemFile.loads(pf.dumps())
    assert back.space == pf.space
    for a, b in zip(pf.x.blocks + pf.y.blocks, back.x.blocks + back.y.blocks):
        assert np.array_equal(a, b)
    assert back.extra == {"note": "x"}


def test_module_rows_default_to_blocks():
    pf = ProblemFile.from_dict({"algebra": {"blocks": [1, 2]}, "x": [[[[1, 0]]], [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]],
                                "y": [[[[0, 0]]], [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]]})
    assert pf.space == ModuleSpace.of([1, 2])


@pytest.mark.parametrize(
    "doc, where",
    [
        ({"algebra": {"blocks": [2]}, "x": [[[[1, 0], [0, 0]], [[0, 0]]]], "y": [[[[0, 0], [0, 0]], [[0, 0], [0, 0]]]]}, "$.x[0][1]"),
        ({"algebra": {"blocks": [2]}, "x": [[[[1, 0], [0, 0]], [[0, 0], [1]]]], "y": []}, "$.x[0][1][1]"),
        ({"algebra": {"blocks": [2]}, "y": []}, "$"),
        ({"algebra": {"blocks": ["two"]}, "x": [], "y": []}, "$.algebra.blocks"),
    ],
)
def test_parse_errors_are_positioned(doc, where):
    with pytest.raises(ParseError) as exc:
        ProblemFile.from_dict(doc)
    assert where in str(exc.value)


def test_block_count_mismatch_is_shape_error():
    with pytest.raises(ShapeError):
        ProblemFile.from_dict({"algebra": {"blocks": [1, 1]}, "x": [[[[1, 0]]]], "y": [[[[1, 0]]]]})


def test_invalid_json_reports_line():
    with pytest.raises(ParseError) as exc:
        ProblemFile.loads('{"algebra":\n  {"blocks": [2],}\n}')
    assert "line 2" in str(exc.value)


def test_algebra_spec_strings():
    assert parse_algebra_spec("1, 2,2") == (1, 2, 2)
    for bad in ("", "a", "0,1", "1,,2"):
        with pytest.raises(ParseError):
            parse_algebra_spec(bad)


# -- check / witness -------------------------------------------------------------

def test_check_bj_on_sign_pair(tmp_path, capsys):
    f = _pair_file(tmp_path, ModuleSpace.of([1, 1]), [[[1]], [[1]]], [[[1]], [[-1]]])
    assert main(["check", "bj", f]) == 0
    out = capsys.readouterr().out
    assert "answer: holds" in out and "tolerances:" in out


def test_check_strong_fails_with_certificate(tmp_path, capsys):
    f = _pair_file(tmp_path, ModuleSpace.of([2]), [np.diag([1, 0.5])], [E12])
    assert main(["check", "strong", f, "--json"]) == 1
    d = json.loads(capsys.readouterr().out)
    cert = d["failure_certificate"]
    assert cert["lambda"][0] == pytest.approx(-0.5, abs=1e-6)
    assert cert["achieved_norm"] == pytest.approx(0.5, abs=1e-9)
    assert d["replay"]["norm_decrease"] > 0.49
    assert d["tolerances"]["eps_zero"] == 1e-9


def test_witness_command_prints_state(tmp_path, capsys):
    f = _pair_file(tmp_path, ModuleSpace.of([2]), [np.diag([1, 0.5])], [E12])
    assert main(["witness", "quasi", f, "--json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["witness"]["type"] == "pure" and d["replay"]["zero"] <= 1e-12


def test_malformed_json_exit_3(tmp_path):
    assert main(["check", "bj", _write(tmp_path, "bad.json", '{"algebra": ')]) == 3


def test_missing_file_exit_3(tmp_path):
    assert main(["check", "bj", str(tmp_path / "nope.json")]) == 3


def test_dimension_mismatch_exit_4(tmp_path):
    doc = {"algebra": {"blocks": [2]}, "x": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]], "y": [[[[1, 0]]]]}
    assert main(["check", "bj", _write(tmp_path, "mm.json", doc)]) == 4


def test_bad_tolerance_exit_5(tmp_path):
    f = _pair_file(tmp_path, ModuleSpace.of([1, 1]), [[[1]], [[1]]], [[[1]], [[-1]]])
    assert main(["check", "bj", f, "--tol", "-1"]) == 5


def test_unknown_relation_exit_3(tmp_path):
    assert main(["check", "orthogonal", "f.json"]) == 3


# -- counterexample ----------------------------------------------------------------

def test_sqc_counterexample_round_trips_through_check(tmp_path):
    out = str(tmp_path / "sqc.json")
    assert main(["counterexample", "sqc", "--algebra", "2", "--seed", "4", "--out", out]) == 0
    assert json.loads(open(out, encoding="utf-8").read())["certificates"]["kind"] == "sqc"
    assert main(["check", "quasi", out]) == 0
    assert main(["check", "strong", out]) == 1


def test_sqc_quartic_profile(tmp_path):
    out = str(tmp_path / "q.json")
    assert main(["counterexample", "sqc", "--algebra", "1,3", "--profile", "paper_quartic", "--case", "II",
                 "--out", out]) == 0
    cert = json.loads(open(out, encoding="utf-8").read())["certificates"]
    assert cert["case"] == "II" and cert["failure"]["achieved_norm"] <= 0.25 + 1e-9


def test_prime_counterexample(tmp_path, capsys):
    assert main(["counterexample", "prime", "--algebra", "1,1"]) == 0
    pf = ProblemFile.loads(capsys.readouterr().out)
    assert [b[0, 0] for b in pf.x.blocks] == [1, 1]
    assert [b[0, 0] for b in pf.y.blocks] == [1, -1]
    f = str(tmp_path / "p.json")
    pf.write(f)
    assert main(["check", "bj", f]) == 0
    assert main(["check", "quasi", f]) == 1


def test_prime_on_module_rows(tmp_path):
    out = str(tmp_path / "p.json")
    assert main(["counterexample", "prime", "--algebra", "2,1", "--rows", "3,2", "--random", "--seed", "1",
                 "--blocks", "1,0", "--out", out]) == 0
    assert main(["check", "bj", out]) == 0
    assert main(["check", "quasi", out]) == 1


def test_generator_preconditions_exit_6(capsys):
    assert main(["counterexample", "sqc", "--algebra", "1,1"]) == 6
    assert "commutative" in capsys.readouterr().err
    assert main(["counterexample", "prime", "--algebra", "3"]) == 6
    assert "prime" in capsys.readouterr().err


def test_rows_length_mismatch_exit_4():
    assert main(["counterexample", "prime", "--algebra", "1,1", "--rows", "1"]) == 4


def test_seed_from_environment(tmp_path, monkeypatch):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    monkeypatch.setenv("BJO_SEED", "17")
    main(["counterexample", "sqc", "--algebra", "3", "--out", a])
    main(["counterexample", "sqc", "--algebra", "3", "--seed", "17", "--out", b])
    assert open(a, encoding="utf-8").read() == open(b, encoding="utf-8").read()
    monkeypatch.setenv("BJO_SEED", "seventeen")
    assert main(["counterexample", "sqc", "--algebra", "3"]) == 3


# -- survey ------------------------------------------------------------------------

def test_survey_inline_flags(tmp_path, capsys):
    out, csv_path = str(tmp_path / "s.json"), str(tmp_path / "s.csv")
    code = main(["survey", "--spaces", "1,1;2;2/3", "--samples", "40", "--seed", "42", "--out", out, "--csv", csv_path])
    assert code == 0
    doc = json.loads(open(out, encoding="utf-8").read())
    assert all(s["pattern_match"] for s in doc["equivalence"]["spaces"])
    text = open(csv_path, encoding="utf-8", newline="").read()
    assert text.count("\r\n") == 7 and '"1,1"' in text


def test_survey_config_file(tmp_path):
    cfg = _write(tmp_path, "cfg.json", {"spaces": [{"blocks": [1]}, {"blocks": [1, 2]}], "samples_per_space": 20,
                                         "seed": 3})
    assert main(["survey", "--config", cfg]) == 0


def test_survey_zero_samples_is_config_error():
    assert main(["survey", "--spaces", "2", "--samples", "0"]) == 3


def test_survey_inflated_tolerance_exit_7(capsys):
    assert main(["survey", "--spaces", "1,1", "--samples", "20", "--tol", "10"]) == 7
    err = capsys.readouterr().err
    assert "tolerance" in err and "--seed" in err


def test_survey_bad_kind_exit_3():
    assert main(["survey", "--spaces", "2", "--samples", "5", "--kinds", "ginibre,cauchy"]) == 3


# -- verify-paper --------------------------------------------------------------------

def test_verify_paper_small_scale(tmp_path, capsys):
    out = str(tmp_path / "v.json")
    assert main(["verify-paper", "--scale", "0.01", "--seed", "7", "--out", out]) == 0
    table = capsys.readouterr().out
    assert table.count("PASS") == 9 and "SKIP" in table
    report = json.loads(open(out, encoding="utf-8").read())
    assert report["passed"] and len(report["criteria"]) == 9


def test_verify_paper_interrupt_prints_partial_table(monkeypatch, capsys):
    from bjorth import verify

    real = verify.run_criterion

    def fake(number, seed=0, scale=1.0):
        if number == 3:
            raise KeyboardInterrupt
        return real(number, seed, 0.005)

    monkeypatch.setattr(verify, "run_criterion", fake)
    assert main(["verify-paper"]) == 7
    captured = capsys.readouterr()
    assert captured.out.count("PASS") == 2 and "interrupted" in captured.err


def test_console_script_entry_point(tmp_path):
    f = _pair_file(tmp_path, ModuleSpace.of([1, 1]), [[[1]], [[1]]], [[[1]], [[-1]]])
    env = dict(os.environ)
    r = subprocess.run([sys.executable, "-m", "bjorth.cli", "check", "quasi", f], capture_output=True, text=True, env=env)
    assert r.returncode == 1 and "answer: fails" in r.stdout
