from plotviz.cli import main


def run(*argv):
    return main(list(argv))


def test_renders_png(make_csv, tmp_path, capsys):
    path = make_csv([(105, 0.0498, 0.0001), (210, 0.0505, 0.0001)])
    out = tmp_path / "fig.png"
    assert run("--csv", str(path), "--out", str(out)) == 0
    assert out.stat().st_size > 0
    assert "wrote" in capsys.readouterr().out


def test_title_alpha_ylim_flags(make_csv, tmp_path):
    import warnings

    path = make_csv([(105, 0.0498, 0.0001), (210, 0.0505, 0.0001)])
    out = tmp_path / "fig.png"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # deliberate alpha mismatch
        code = run(
            "--csv", str(path), "--out", str(out),
            "--title", "check", "--alpha", "1/10", "--ylim", "0,0.2",
        )
    assert code == 0


def test_schema_error_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("n,mean\n1,2\n")
    out = tmp_path / "fig.png"
    assert run("--csv", str(bad), "--out", str(out)) == 1
    assert "missing required columns" in capsys.readouterr().err
    assert not out.exists()


def test_missing_input_exits_one(tmp_path, capsys):
    assert run("--csv", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "f.png")) == 1


def test_bad_ylim_exits_one(make_csv, tmp_path, capsys):
    path = make_csv([(105, 0.05, 0.0001)])
    code = run("--csv", str(path), "--out", str(tmp_path / "f.png"), "--ylim", "1,0")
    assert code == 1


def test_missing_required_flag_exits_one(capsys):
    assert run("--csv", "x.csv") == 1
