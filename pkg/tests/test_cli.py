"""Command line client against the in-process service."""

import pytest

from multitime_qsim.cli import build_parser, main

CERTAINTY_DOC = """\
system S dim 2
state up = [1, 0]
state plusx = [0.7071067811865476, 0.7071067811865476]
operator Z = [[1, 0], [0, -1]]
prepare S up
measure S projective Z as m
postselect S plusx
"""


@pytest.fixture()
def abl_file(tmp_path):
    path = tmp_path / "certainty.mtq"
    path.write_text(CERTAINTY_DOC, encoding="utf-8")
    return str(path)


def test_run_prints_report(abl_file, capsys):
    code = main(["run", abl_file, "--engine", "both"])
    out, err = capsys.readouterr()
    assert code == 0
    assert out.startswith("# multitime-qsim report\n")
    assert "# equivalence: PASS" in out
    assert err == ""


def test_run_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO(CERTAINTY_DOC))
    code = main(["run", "-"])
    out, _ = capsys.readouterr()
    assert code == 0
    assert "1\t1.000000000" in out


def test_run_diagnostics_go_to_stderr(tmp_path, capsys):
    bad = tmp_path / "bad.mtq"
    bad.write_text("system S dim\n", encoding="utf-8")
    code = main(["run", str(bad)])
    out, err = capsys.readouterr()
    assert code == 1
    assert out == ""
    assert "1:" in err and "SyntaxError" in err


def test_run_impossible_postselection_exit_two(tmp_path, capsys):
    doc = (
        "system S dim 2\n"
        "state up = [1, 0]\n"
        "state down = [0, 1]\n"
        "prepare S up\n"
        "postselect S down\n"
    )
    path = tmp_path / "zero.mtq"
    path.write_text(doc, encoding="utf-8")
    code = main(["run", str(path)])
    _, err = capsys.readouterr()
    assert code == 2
    assert "impossible post-selection" in err


def test_parse_ok(abl_file, capsys):
    code = main(["parse", abl_file])
    out, _ = capsys.readouterr()
    assert code == 0
    assert out.strip() == "ok: 7 statements"


def test_parse_invalid(tmp_path, capsys):
    bad = tmp_path / "bad.mtq"
    bad.write_text("prepare S x\n", encoding="utf-8")
    code = main(["parse", str(bad)])
    _, err = capsys.readouterr()
    assert code == 1
    assert "UnknownSystem" in err


def test_corpus_generate_to_stdout(capsys):
    code = main(["corpus", "generate", "--count", "2", "--seed", "4"])
    out, _ = capsys.readouterr()
    assert code == 0
    assert out.count("# --- document") == 2
    assert "system" in out


def test_corpus_generate_to_directory(tmp_path, capsys):
    out_dir = tmp_path / "corpus"
    code = main(
        ["corpus", "generate", "--count", "3", "--seed", "4", "--out", str(out_dir)]
    )
    out, _ = capsys.readouterr()
    assert code == 0
    files = sorted(out_dir.glob("*.mtq"))
    assert len(files) == 3
    assert str(files[0]) in out
    # written corpus must match a rerun with the same seed
    rerun = tmp_path / "again"
    main(["corpus", "generate", "--count", "3", "--seed", "4", "--out", str(rerun)])
    capsys.readouterr()
    for a, b in zip(files, sorted(rerun.glob("*.mtq"))):
        assert a.read_text() == b.read_text()


def test_run_with_tolerance_flag(abl_file, capsys):
    code = main(["run", abl_file, "--engine", "both", "--tolerance", "1e-12"])
    out, _ = capsys.readouterr()
    assert code == 0
    assert "# equivalence: PASS" in out


def test_parser_requires_subcommand():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
