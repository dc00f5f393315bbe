from fractions import Fraction

import pytest

from weaklg import catalog
from weaklg.cli import main
from weaklg.dseries import DOperator, solve_series
from weaklg.laurent import LaurentPoly, constant_term_series


@pytest.fixture()
def v16_files(tmp_path):
    rec = catalog.builtin("V16")
    poly = tmp_path / "v16.poly"
    op = tmp_path / "v16.op"
    poly.write_text(rec.model.to_text())
    op.write_text(rec.operator.to_text())
    return poly, op


def test_series_output_matches_library(v16_files, capsys):
    poly, _ = v16_files
    assert main(["series", "-f", str(poly), "-N", "8"]) == 0
    out = capsys.readouterr().out
    assert out == constant_term_series(catalog.builtin("V16").model, 8).to_text()


def test_series_mitm_flag_changes_nothing(v16_files, capsys):
    poly, _ = v16_files
    main(["series", "-f", str(poly), "-N", "8"])
    plain = capsys.readouterr().out
    main(["series", "-f", str(poly), "-N", "8", "--mitm"])
    assert capsys.readouterr().out == plain


def test_solve_output_matches_library(v16_files, capsys):
    _, op = v16_files
    assert main(["solve", "-L", str(op), "-N", "8"]) == 0
    out = capsys.readouterr().out
    assert out == solve_series(catalog.builtin("V16").operator, 8).to_text()


def test_manual_composition_agrees_with_verify(v16_files, capsys):
    """series and solve outputs compared by hand give the verify verdict."""
    poly, op = v16_files
    main(["series", "-f", str(poly), "-N", "12"])
    from_poly = capsys.readouterr().out
    main(["solve", "-L", str(op), "-N", "12"])
    from_op = capsys.readouterr().out
    assert from_poly == from_op
    code = main(["verify", "-f", str(poly), "-L", str(op), "-N", "12"])
    out = capsys.readouterr().out
    assert code == 0
    assert "verdict: very-weak-confirmed-to-12" in out


def test_manual_composition_detects_the_v22_mismatch(tmp_path, capsys):
    rec = catalog.builtin("V22")
    poly = tmp_path / "v22.poly"
    op = tmp_path / "v22.op"
    poly.write_text(rec.model.to_text())
    op.write_text(rec.operator.to_text())
    main(["series", "-f", str(poly), "-N", "2"])
    from_poly = capsys.readouterr().out
    main(["solve", "-L", str(op), "-N", "2"])
    from_op = capsys.readouterr().out
    assert from_poly != from_op
    assert main(["verify", "-f", str(poly), "-L", str(op)]) == 3
    assert "first-mismatch: 1" in capsys.readouterr().out


def test_verify_catalog_records(capsys):
    assert main(["verify", "--catalog", "V16", "-N", "6"]) == 0
    capsys.readouterr()
    assert main(["verify", "--catalog", "V22", "-N", "6"]) == 3
    out = capsys.readouterr().out
    assert "verdict: mismatch" in out
    assert "first-mismatch: 1" in out


def test_verify_derived_operator_closes_the_gap(capsys):
    assert main(["verify", "--catalog", "V22", "--derived", "-N", "6"]) == 0
    assert "very-weak-confirmed-to-6" in capsys.readouterr().out


def test_verify_derived_without_catalog_is_usage_error(v16_files, capsys):
    poly, op = v16_files
    code = main(["verify", "-f", str(poly), "-L", str(op), "--derived"])
    assert code == 1
    assert "usage error" in capsys.readouterr().err


def test_verify_unknown_catalog_name(capsys):
    assert main(["verify", "--catalog", "V99"]) == 2
    assert "error:" in capsys.readouterr().err


def test_verify_pretty_appends_a_table(capsys):
    main(["verify", "--catalog", "V16", "-N", "4", "--pretty"])
    out = capsys.readouterr().out
    assert out.count("verdict:") == 2


def test_fit_recovers_the_generating_operator(tmp_path, capsys):
    op = catalog.builtin("V16").operator
    series = tmp_path / "v16.series"
    series.write_text(solve_series(op, 25).to_text())
    code = main(["fit", "-s", str(series), "-m", "3", "-r", "2"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("basis-size: 1\nelement: 0\n")
    fitted = DOperator.from_text(out.split("element: 0\n", 1)[1])
    assert fitted.table == op.table


def _write_search_inputs(tmp_path, constant, *, domain="free"):
    planted = LaurentPoly(1, {(1,): 1, (-1,): constant})
    series = tmp_path / "target.series"
    series.write_text(constant_term_series(planted, 8).to_text())
    ansatz = tmp_path / "toy.ansatz"
    ansatz.write_text(f"# dim 1\n1 : apex : fixed 1\n-1 : tail : {domain}\n")
    return planted, series, ansatz


def test_search_finds_a_planted_coefficient(tmp_path, capsys):
    planted, series, ansatz = _write_search_inputs(tmp_path, 3)
    argv = [
        "search", "-a", str(ansatz), "-s", str(series),
        "--prime", "7", "--height", "5",
    ]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert "matches: 1" in first
    body = first.split("\n\n", 1)[1]
    match_text = body[: body.index("prime.")]
    assert LaurentPoly.from_text(match_text) == planted
    assert "lifts-tried:" in first
    assert main(argv) == 0
    assert capsys.readouterr().out == first


def test_search_with_no_survivors_exits_empty(tmp_path, capsys):
    _, series, ansatz = _write_search_inputs(tmp_path, 3, domain="choice 8")
    code = main(["search", "-a", str(ansatz), "-s", str(series), "--prime", "7"])
    captured = capsys.readouterr()
    assert code == 4
    assert "matches: 0" in captured.out
    assert "no candidates found" in captured.err


def test_search_height_bound_exits_empty_with_stats(tmp_path, capsys):
    _, series, ansatz = _write_search_inputs(tmp_path, 6)
    code = main([
        "search", "-a", str(ansatz), "-s", str(series),
        "--prime", "13", "--height", "5",
    ])
    captured = capsys.readouterr()
    assert code == 4
    assert captured.err.startswith("search stopped:")
    assert "matches: 0" in captured.out
    assert "lifts-tried: 0" in captured.out


def test_search_rejects_a_composite_modulus(tmp_path, capsys):
    _, series, ansatz = _write_search_inputs(tmp_path, 3)
    code = main(["search", "-a", str(ansatz), "-s", str(series), "--prime", "6"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_search_requires_exactly_one_target_source(tmp_path, capsys):
    _, series, ansatz = _write_search_inputs(tmp_path, 3)
    both = main([
        "search", "-a", str(ansatz), "-s", str(series), "--catalog", "V16",
    ])
    assert both == 1
    capsys.readouterr()
    assert main(["search", "-a", str(ansatz)]) == 1


def test_polytope_from_vertex_file(tmp_path, capsys):
    verts = tmp_path / "octa.verts"
    verts.write_text("1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1\n")
    assert main(["polytope", "-p", str(verts)]) == 0
    out = capsys.readouterr().out
    assert "degree: 48" in out
    assert "sections: 27" in out
    assert "picard-rank: 3" in out
    assert "picard-rank-dual-fan: 1" in out


def test_polytope_catalog_expectations_can_mismatch(tmp_path, capsys):
    poly = tmp_path / "p3.poly"
    poly.write_text(catalog.builtin("P3-sample").model.to_text())
    code = main(["polytope", "-f", str(poly), "--catalog", "V16"])
    out = capsys.readouterr().out
    assert code == 3
    assert "matches-expected: false" in out
    assert "mismatch.degree: expected 16, computed 64" in out


def test_polytope_catalog_self_report_is_clean(capsys):
    assert main(["polytope", "--catalog", "V18"]) == 0
    out = capsys.readouterr().out
    assert "matches-expected: true" in out
    assert "degree: 18" in out


def test_polytope_expect_file_overrides_catalog(tmp_path, capsys):
    from dataclasses import replace

    rec = replace(
        catalog.builtin("V16"), name="wrong", degree=60, h0=33, genus=31
    )
    expect = tmp_path / "wrong.rec"
    expect.write_text(catalog.dumps(rec))
    code = main(["polytope", "--catalog", "V16", "--expect", str(expect)])
    out = capsys.readouterr().out
    assert code == 3
    assert "mismatch.degree: expected 60, computed 16" in out


def test_polytope_source_usage_errors(tmp_path, v16_files, capsys):
    poly, _ = v16_files
    verts = tmp_path / "v.verts"
    verts.write_text("1 0 0\n")
    assert main(["polytope", "-p", str(verts), "-f", str(poly)]) == 1
    capsys.readouterr()
    assert main(["polytope"]) == 1


def test_catalog_list_and_show(capsys):
    assert main(["catalog", "list"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines() == list(catalog.names())
    assert main(["catalog", "show", "V16"]) == 0
    assert capsys.readouterr().out == catalog.dumps(catalog.builtin("V16"))


def test_catalog_usage_and_unknown_name(capsys):
    assert main(["catalog", "show"]) == 1
    capsys.readouterr()
    assert main(["catalog", "list", "V16"]) == 1
    capsys.readouterr()
    assert main(["catalog", "show", "V99"]) == 2


def test_bad_input_files_exit_2(tmp_path, capsys):
    empty = tmp_path / "empty.poly"
    empty.write_text("")
    assert main(["series", "-f", str(empty)]) == 2
    capsys.readouterr()
    assert main(["series", "-f", str(tmp_path / "absent.poly")]) == 2
    capsys.readouterr()
    degenerate = tmp_path / "bad.op"
    degenerate.write_text("order 1, tdeg 1\n0 0\n1 1\n")
    assert main(["solve", "-L", str(degenerate)]) == 2
    assert "error:" in capsys.readouterr().err


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    capsys.readouterr()
    assert main(["frobnicate"]) == 1
    capsys.readouterr()
    assert main(["series"]) == 1
    capsys.readouterr()
    assert main(["series", "--bogus"]) == 1


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "series" in capsys.readouterr().out
