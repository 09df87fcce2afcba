import json

import pytest

from thetalab.cli import (
    EXIT_FAIL,
    EXIT_INPUT,
    EXIT_PASS,
    build_parser,
    load_spec_file,
    load_tset,
    run,
)
from thetalab.theta import CURATED_GENUS4, parse_series


def run_capture(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, out


def test_validate_e8_passes(capsys):
    code, out = run_capture(capsys, ["validate", "--lattice", "E8"])
    assert code == EXIT_PASS
    assert "status: pass" in out
    assert "det: 1" in out and "root_count: 240" in out and "root_system: E8" in out


def test_validate_failing_gram(tmp_path, capsys):
    spec = tmp_path / "zz.json"
    spec.write_text(json.dumps({"name": "2Z^2", "gram": [[2, 0], [0, 2]]}))
    code, out = run_capture(capsys, ["validate", "--spec", str(spec)])
    assert code == EXIT_FAIL
    assert "det: 4" in out


def test_unknown_lattice_is_input_error(capsys):
    assert run(["validate", "--lattice", "Leech"]) == EXIT_INPUT


def test_missing_lattice_is_input_error(capsys):
    assert run(["validate"]) == EXIT_INPUT


def test_spec_file_gram_components_dplus(tmp_path, capsys):
    gram = tmp_path / "a1.json"
    gram.write_text(json.dumps({"name": "A1A1", "gram": [[2, 0], [0, 2]]}))
    lat = load_spec_file(str(gram))
    assert lat.rank == 2

    comp = tmp_path / "e8x3.json"
    comp.write_text(
        json.dumps({"name": "E8^3", "components": [["E", 8], ["E", 8], ["E", 8]], "glue_words": []})
    )
    lat = load_spec_file(str(comp))
    assert lat.rank == 24

    dplus = tmp_path / "d16.json"
    dplus.write_text(json.dumps({"name": "D16+", "construction": "D_plus", "n": 16}))
    lat = load_spec_file(str(dplus))
    assert lat.rank == 16


def test_spec_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(Exception):
        load_spec_file(str(bad))
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"name": "x"}))
    with pytest.raises(Exception):
        load_spec_file(str(empty))


def test_shells_job(capsys):
    code, out = run_capture(capsys, ["shells", "--lattice", "E8", "--norm-bound", "4"])
    assert code == EXIT_PASS
    assert "0 1" in out and "2 240" in out and "4 2160" in out


def test_theta_job_exports_parseable_series(capsys):
    code, out = run_capture(
        capsys, ["theta", "--lattice", "E8", "--genus", "1", "--trace-bound", "4"]
    )
    assert code == EXIT_PASS
    body = out[out.index("# thetalab-series 1") :]
    series = parse_series(body)
    flat = {t.key(): c for t, c in series.coeffs.items()}
    assert flat == {"1|0": 1, "1|2": 240, "1|4": 2160}


def test_diff_job_reports_zero(capsys):
    code, out = run_capture(
        capsys,
        ["diff", "--pair", "E8+E8:D16+", "--genus", "1", "--trace-bound", "6"],
    )
    assert code == EXIT_PASS
    assert "is_zero: true" in out


def test_product_job(capsys):
    code, out = run_capture(
        capsys,
        ["product", "--pair", "E8:E8", "--genus", "1", "--trace-bound", "4"],
    )
    assert code == EXIT_PASS
    assert "61920" in out


def test_restrict_job(capsys):
    code, out = run_capture(
        capsys, ["restrict", "--lattice", "E8", "--genus", "2", "--trace-bound", "4"]
    )
    assert code == EXIT_PASS
    assert "equal: true" in out


def test_hyp_predicate_values(capsys):
    code, out = run_capture(capsys, ["hyp-predicate", "--pair", "E8+E8:D16+"])
    assert code == EXIT_PASS
    assert "predicate: true" in out
    code, out = run_capture(capsys, ["hyp-predicate", "--pair", "E8D16:E8^3"])
    assert code == EXIT_PASS  # computed, not a failure
    assert "predicate: false" in out


def test_a4_separation_fails_on_identical_pair(capsys):
    code, out = run_capture(
        capsys, ["a4-separation", "--pair", "E8^3:E8^3", "--norm-bound", "4"]
    )
    assert code == EXIT_FAIL
    assert "separated: false" in out


def test_k_identity_zero_tset_is_input_error(tmp_path, capsys):
    tset = tmp_path / "tset.json"
    tset.write_text(json.dumps([[0] * 10]))
    code = run(["k-identity", "--pair", "E8D16:E8^3", "--tset", str(tset)])
    assert code == EXIT_INPUT


def test_load_tset_default_and_file(tmp_path):
    assert load_tset(None) == CURATED_GENUS4
    f = tmp_path / "t.json"
    f.write_text(json.dumps([[2], [2, 1, 2]]))
    targets = load_tset(str(f))
    assert [t.genus for t in targets] == [1, 2]
    with pytest.raises(Exception):
        load_tset(str(tmp_path / "missing.json"))


def test_witt_small_is_deterministic_across_jobs(capsys):
    argv = ["witt", "--max-genus", "1", "--trace-bound", "6"]
    code1, out1 = run_capture(capsys, argv + ["--jobs", "1"])
    code2, out2 = run_capture(capsys, argv + ["--jobs", "2"])
    assert code1 == code2 == EXIT_PASS
    assert out1 == out2


def test_report_written_to_file(tmp_path, capsys):
    out_path = tmp_path / "report.txt"
    code = run(["validate", "--lattice", "E8", "--out", str(out_path)])
    assert code == EXIT_PASS
    text = out_path.read_text()
    assert text.startswith("# thetalab-report 1")
    assert "lattice: E8 " in text


def test_list_contains_registry(capsys):
    code, out = run_capture(capsys, ["list"])
    assert code == EXIT_PASS
    for name in ("E8:", "E8+E8:", "D16+:", "A5^4D4:", "E8^3:"):
        assert name in out
    for r2 in (144, 240, 288, 432, 720):
        assert f"r2={r2}" in out


def test_jobs_must_be_positive(capsys):
    assert run(["validate", "--lattice", "E8", "--jobs", "0"]) == EXIT_INPUT


def test_parser_rejects_unknown_kind():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["frobnicate"])
