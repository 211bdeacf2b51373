import csv
import io
import subprocess
import sys

import pytest

from serf import ablation
from serf.cli import EXIT_FAIL, EXIT_IO, EXIT_OK, build_parser, main

SUBCOMMANDS = ["curves", "gradcheck", "landscape", "ablate", "summarize", "decompose"]

ONE_CELL = """\
[axis]
name = dense_units
values = 8

[train]
lr = 0.1
epochs = 1

[data]
name = blobs
classes = 3
dim = 4
train_per_class = 10
test_per_class = 5

[sweep]
activations = serf
seeds = 0
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_curves_small_grid(capsys):
    code, out, _ = run(capsys, "curves", "--kinds", "serf", "--xmin", "-5", "--xmax", "5", "--n", "3")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["x"]) for r in rows] == [-5.0, 0.0, 5.0]
    assert float(rows[1]["f"]) == 0.0


def test_curves_asymptotes_and_kinds(capsys, tmp_path):
    out = tmp_path / "c.csv"
    code, _, _ = run(capsys, "curves", "--xmin", "0", "--xmax", "40", "--n", "2", "--out", str(out))
    assert code == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert {r["kind"] for r in rows} == {"swish", "mish", "serf"}
    big = next(r for r in rows if r["kind"] == "serf" and float(r["x"]) == 40.0)
    assert float(big["f"]) == pytest.approx(40.0) and float(big["df"]) == pytest.approx(1.0)
    assert abs(float(big["d2f"])) < 1e-12


@pytest.mark.parametrize("argv,msg", [
    (["--kinds", "serf,softsign"], "valid kinds"),
    (["--xmin", "1", "--xmax", "0"], "--xmin"),
    (["--n", "1"], "--n"),
])
def test_curves_validation(capsys, argv, msg):
    code, _, err = run(capsys, "curves", *argv)
    assert code == EXIT_FAIL and msg in err


def test_gradcheck_default_passes(capsys):
    code, out, _ = run(capsys, "gradcheck", "--samples", "2000")
    assert code == EXIT_OK
    assert "11/11 kinds passed" in out
    assert out.count("worst_x=") == 11


def test_gradcheck_zero_tolerance_fails(capsys):
    code, out, _ = run(capsys, "gradcheck", "--kinds", "serf", "--samples", "100", "--tol", "0")
    assert code == EXIT_FAIL and out.startswith("FAIL")


def test_gradcheck_relu_kink(capsys):
    code, out, _ = run(capsys, "gradcheck", "--kinds", "relu", "--no-kink-exclusion")
    assert code == EXIT_FAIL
    worst = float(out.split("worst_x=")[1].split()[0])
    assert abs(worst) < 1e-4


def test_gradcheck_negative_tol_rejected(capsys):
    assert run(capsys, "gradcheck", "--tol", "-1")[0] == EXIT_FAIL


def _stat(out):
    return float(out.split("mean_abs_laplacian=")[1].split()[0])


def test_landscape_relu_vs_serf(capsys, tmp_path):
    stats = {}
    for kind in ("relu", "serf", "identity"):
        code, out, _ = run(capsys, "landscape", "--activation", kind, "--res", "64",
                           "--out", str(tmp_path / kind))
        assert code == EXIT_OK
        assert (tmp_path / f"{kind}.pgm").exists() and (tmp_path / f"{kind}.csv").exists()
        stats[kind] = _stat(out)
    assert stats["serf"] < stats["relu"]
    assert stats["identity"] < 1e-9


def test_landscape_degenerate_grid(capsys, tmp_path):
    code, out, _ = run(capsys, "landscape", "--res", "2", "--out", str(tmp_path / "g"))
    assert code == EXIT_OK
    assert "mean_abs_laplacian=0 (undefined" in out
    assert (tmp_path / "g.pgm").read_bytes().startswith(b"P5\n2 2\n")


def test_landscape_io_error_names_path(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "landscape", "--res", "4", "--out", str(blocker / "x"))
    assert code == EXIT_IO and str(blocker / "x") in err


def test_landscape_validation(capsys):
    assert run(capsys, "landscape", "--res", "1")[0] == EXIT_FAIL
    assert run(capsys, "landscape", "--activation", "nope")[0] == EXIT_FAIL


def test_ablate_one_cell(capsys, tmp_path):
    cfg = tmp_path / "one.ini"
    cfg.write_text(ONE_CELL)
    code, out, _ = run(capsys, "ablate", "--config", str(cfg), "--out-dir", str(tmp_path / "o"))
    assert code == EXIT_OK
    recs = ablation.read_records(tmp_path / "o" / "records.csv")
    assert len(recs) == 1 and "ordering at 8: serf" in out


def test_ablate_config_error_shows_line(capsys, tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(ONE_CELL.replace("epochs = 1", "epochs = -3"))
    code, _, err = run(capsys, "ablate", "--config", str(cfg))
    assert code == EXIT_IO and f"{cfg}:7:" in err


def test_ablate_missing_config(capsys, tmp_path):
    code, _, err = run(capsys, "ablate", "--config", str(tmp_path / "none.ini"))
    assert code == EXIT_IO and "none.ini" in err


def test_summarize_golden(capsys, fixtures_dir):
    code, out, _ = run(capsys, "summarize", "--records", str(fixtures_dir / "sample_records.csv"))
    assert code == EXIT_OK
    assert out == (fixtures_dir / "sample_summary.txt").read_text()
    code, out, _ = run(capsys, "summarize", "--format", "csv",
                       "--records", str(fixtures_dir / "sample_records.csv"))
    assert out == (fixtures_dir / "sample_summary.csv").read_text()


def test_summarize_errors(capsys, tmp_path):
    assert run(capsys, "summarize", "--records", str(tmp_path / "none.csv"))[0] == EXIT_IO
    bad = tmp_path / "bad.csv"
    bad.write_text("not records\n")
    assert run(capsys, "summarize", "--records", str(bad))[0] == EXIT_IO
    empty = tmp_path / "empty.csv"
    empty.write_text(ablation.records_header())
    assert run(capsys, "summarize", "--records", str(empty))[0] == EXIT_FAIL


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--x", "0", "10", "-1.5")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert len(lines) == 3
    for line in lines:
        fields = dict(kv.split("=") for kv in line.split())
        assert set(fields) == {"x", "precond", "swish", "gate", "total", "residual"}
        assert float(fields["residual"]) <= 1e-15


def test_deterministic_output(capsys):
    a = run(capsys, "curves", "--kinds", "mish,gelu", "--n", "50")[1]
    b = run(capsys, "curves", "--kinds", "mish,gelu", "--n", "50")[1]
    assert a == b


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help_documents_every_flag(sub, capsys):
    with pytest.raises(SystemExit) as info:
        main([sub, "--help"])
    assert info.value.code == 0
    text = capsys.readouterr().out
    sp = build_parser()._subparsers._group_actions[0].choices[sub]
    for action in sp._actions:
        for flag in action.option_strings:
            assert flag in text
        assert action.help, action.dest


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as info:
        main(["curves", "--bogus"])
    assert info.value.code == 2
    assert "usage:" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "serf", "decompose", "--x", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "residual=0.0" in proc.stdout
