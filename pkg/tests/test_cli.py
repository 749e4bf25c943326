import subprocess
import sys
from pathlib import Path

import pytest

from h1minimal.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(*argv):
    return main([str(a) for a in argv])


@pytest.mark.parametrize(
    "name, code",
    [
        ("xy_half", 0),
        ("paraboloid", 1),
        ("catenoid_implicit", 0),
        ("saddle_intrinsic", 0),
        ("catenoid", 0),
        ("circle_seed", 0),
    ],
)
def test_check_minimal(name, code, capsys):
    assert run("check-minimal", CONFIGS / f"{name}.cfg") == code
    last = capsys.readouterr().out.strip().splitlines()[-1]
    assert last.startswith("PASS" if code == 0 else "FAIL")


def test_strip_csv_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("strip", CONFIGS / "circle_seed.cfg", "--csv", a) == 0
    assert run("strip", CONFIGS / "circle_seed.cfg", "--csv", b) == 0
    data = a.read_bytes()
    assert data == b.read_bytes()
    assert b"\r" not in data
    assert data.splitlines()[0] == b"s,F,G,sigma,strict,noncharacteristic"


def test_strip_not_strict(capsys):
    assert run("strip", CONFIGS / "vertical_plane.cfg") == 1
    assert "not strict" in capsys.readouterr().out


def test_second_variation_and_search(capsys, tmp_path):
    assert run("second-variation", CONFIGS / "catenoid.cfg", "--k", "16,32") == 0
    out = capsys.readouterr().out
    assert "k=32" in out and "verdict=UNSTABLE" in out
    csv = tmp_path / "sweep.csv"
    assert run("instability-search", CONFIGS / "catenoid.cfg", "--kmax", "64", "--csv", csv) == 0
    assert capsys.readouterr().out.strip().splitlines()[-1].startswith("UNSTABLE k=32 ")
    assert csv.read_text().splitlines()[0].startswith("k,")


def test_generic_search(capsys, tmp_path):
    csv = tmp_path / "coef.csv"
    assert run("generic-search", CONFIGS / "saddle_intrinsic.cfg", "--grid", "8", "--csv", csv) == 0
    assert capsys.readouterr().out.strip().splitlines()[-1].startswith("UNSTABLE basis=8x8 V=-")
    assert len(csv.read_text().splitlines()) == 1 + 64
    assert run("generic-search", CONFIGS / "plane_intrinsic.cfg", "--grid", "8") == 0
    assert capsys.readouterr().out.strip().splitlines()[-1] == "NO-WITNESS"


def test_trace(capsys, tmp_path):
    csv = tmp_path / "trace.csv"
    assert run("trace", CONFIGS / "xy_half.cfg", "--start", "0,1", "--span", "0.5", "--csv", csv) == 0
    rows = csv.read_text().splitlines()
    assert rows[0] == "s,gamma1,gamma2,h0,speed,dir_a,dir_b,t_slope,residual"
    assert len(rows) > 10
    assert run("trace", CONFIGS / "xy_half.cfg", "--start", "1,0") == 0
    assert "warning" in capsys.readouterr().err


def test_report_to_file(tmp_path, capsys):
    out = tmp_path / "report.txt"
    assert run("check-minimal", CONFIGS / "xy_half.cfg", "--out", out) == 0
    assert capsys.readouterr().out == ""
    assert out.read_text().strip().endswith("PASS (tolerance 1e-08)")


@pytest.mark.parametrize(
    "argv",
    [
        ("check-minimal", "/nonexistent.cfg"),
        ("strip", CONFIGS / "xy_half.cfg"),
        ("trace", CONFIGS / "xy_half.cfg", "--start", "nope"),
    ],
)
def test_config_errors_exit_2(argv, capsys):
    assert run(*argv) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_bad_expression_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text('type = tgraph\ng = "x**"\nxmin = 0\nxmax = 1\nymin = 0\nymax = 1\n')
    assert run("check-minimal", p) == 2
    assert "offset 2" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        run("nonsense", CONFIGS / "xy_half.cfg")
    assert info.value.code == 2


def test_numerical_failure_exit_3(tmp_path, capsys):
    p = tmp_path / "empty.cfg"
    p.write_text('type = implicit\nf = "x^2 + y^2 + t^2 + 1"\nx0 = 0\ny0 = 0\nt0 = 0\n')
    assert run("check-minimal", p) == 3
    assert capsys.readouterr().err.startswith("numerical failure:")


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "h1minimal", "check-minimal", str(CONFIGS / "xy_half.cfg")],
        capture_output=True, text=True,
    )
    assert res.returncode == 0
    assert res.stdout.strip().endswith("PASS (tolerance 1e-08)")
