import csv
import io
import math

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from ratiter.cli import main


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    return list(csv.reader(line for line in text.splitlines() if not line.startswith("#")))


class TestAccelerate:
    def test_single_step(self, capsys, monkeypatch):
        code, out, _ = run(["accelerate"], capsys, "3\n2\n1.5\n", monkeypatch)
        assert code == 0
        rows = table(out)
        assert rows[0] == ["row_0", "row_1", "degenerate_1"]
        assert rows[1] == ["3", "1", "false"]
        assert rows[2] == ["2", "", ""]

    def test_constant_input_degenerate(self, capsys, monkeypatch):
        _, out, _ = run(["accelerate"], capsys, "2\n" * 5, monkeypatch)
        flags = [r[2] for r in table(out)[1:4]]
        assert flags == ["true"] * 3

    def test_alternating_harmonic_depth_two(self, tmp_path, capsys):
        partial, s = [], 0.0
        for k in range(1, 10):
            s += (-1) ** (k + 1) / k
            partial.append(s)
        path = tmp_path / "seq.txt"
        path.write_text("# partial sums\n" + "\n".join(repr(v) for v in partial) + "\n\n")
        code, out, _ = run(["accelerate", str(path), "--depth", "2"], capsys)
        assert code == 0
        row2 = [float(r[2]) for r in table(out)[1:] if r[2]]
        assert len(row2) == 5
        assert abs(row2[-1] - math.log(2)) == pytest.approx(3.648e-6, rel=1e-3)

    def test_parse_error_line_number(self, capsys, monkeypatch):
        code, _, err = run(["accelerate"], capsys, "1\n# c\nabc\n", monkeypatch)
        assert code == 2 and "line 3" in err

    def test_too_short(self, capsys, monkeypatch):
        code, _, _ = run(["accelerate", "--depth", "2"], capsys, "1\n2\n3\n4\n", monkeypatch)
        assert code == 3

    def test_out_file(self, tmp_path, capsys, monkeypatch):
        dest = tmp_path / "o.csv"
        code, out, _ = run(["accelerate", "--out", str(dest)], capsys, "3\n2\n1.5\n", monkeypatch)
        assert code == 0 and out == ""
        assert dest.read_text().startswith("row_0,row_1")

    @settings(suppress_health_check=[HealthCheck.function_scoped_fixture], max_examples=50)
    @given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=3, max_size=12))
    def test_row0_round_trip(self, capsys, monkeypatch, values):
        text = "\n".join(f"{v:.12g}" for v in values) + "\n"
        code, out, _ = run(["accelerate"], capsys, text, monkeypatch)
        assert code == 0
        assert [r[0] for r in table(out)[1:]] == text.split()

    @settings(suppress_health_check=[HealthCheck.function_scoped_fixture], max_examples=50)
    @given(st.lists(st.text(alphabet="0123456789.eE+-xyz", min_size=1, max_size=6),
                    min_size=1, max_size=6))
    def test_malformed_input_exit_codes(self, capsys, monkeypatch, lines):
        code, _, _ = run(["accelerate"], capsys, "\n".join(lines) + "\n", monkeypatch)
        parses = True
        for line in lines:
            try:
                parses &= math.isfinite(float(line))
            except ValueError:
                parses = False
        if not parses:
            assert code == 2
        else:
            assert code == (0 if len(lines) >= 3 else 3)


class TestSteffensen:
    def test_cos(self, capsys):
        code, out, _ = run(["steffensen", "--map", "cos(x)", "--x0", "0.5"], capsys)
        assert code == 0
        rows = table(out)
        assert rows[0] == ["k", "x_k", "residual", "degenerate"]
        assert abs(float(rows[-1][1]) - 0.7390851332) < 1e-10
        summary = out.splitlines()[-1]
        assert summary.startswith("# converged=true")

    def test_identity_map(self, capsys):
        code, out, _ = run(["steffensen", "--map", "x", "--x0", "1"], capsys)
        assert code == 0
        rows = table(out)
        assert rows[-1][1:] == ["1", "0", "true"]

    def test_no_fixed_point(self, capsys):
        code, out, _ = run(["steffensen", "--map", "x+1", "--x0", "0", "--max-iter", "10"], capsys)
        assert code == 4
        assert "converged=false" in out

    def test_parse_error(self, capsys):
        code, _, err = run(["steffensen", "--map", "cos(x", "--x0", "0"], capsys)
        assert code == 2 and "position" in err

    def test_non_finite(self, capsys):
        code, _, _ = run(["steffensen", "--map", "log(x)", "--x0", "-1"], capsys)
        assert code == 5

    def test_negative_start(self, capsys):
        code, out, _ = run(["steffensen", "--map", "cos(x)", "--x0", "-2e-1"], capsys)
        assert code == 0 and table(out)[1][1] == "-0.2"


class TestRoots:
    def test_cubic(self, capsys):
        code, out, _ = run(["roots", "--coeffs", "-8,14,-7,1", "--n", "60"], capsys)
        assert code == 0
        rows = table(out)[1:]
        assert [float(r[1]) for r in rows] == pytest.approx([4, 2, 1], abs=1e-6)

    def test_linear(self, capsys):
        _, out, _ = run(["roots", "--coeffs", "-5,1"], capsys)
        assert float(table(out)[1][1]) == pytest.approx(5)

    def test_quadratic(self, capsys):
        _, out, _ = run(["roots", "--coeffs", "2,-3,1", "--no-accelerate"], capsys)
        assert [float(r[1]) for r in table(out)[1:]] == pytest.approx([2, 1], abs=1e-6)

    def test_equal_moduli(self, capsys):
        code, _, err = run(["roots", "--coeffs", "-4,0,1"], capsys)
        assert code == 6 and "m = 1" in err

    @pytest.mark.parametrize("coeffs", ["a,b", "0,1", "3"])
    def test_bad_coefficients(self, capsys, coeffs):
        code, _, _ = run(["roots", "--coeffs", coeffs], capsys)
        assert code == 2


class TestShootAndReplicate:
    def test_shoot_three(self, capsys):
        code, out, _ = run(["shoot", "--x-star", "3"], capsys)
        assert code == 0
        assert table(out)[1][1] == "0.618340077402"

    def test_shoot_ten_with_trajectory(self, capsys, tmp_path):
        dump = tmp_path / "traj.csv"
        _, out, _ = run(["shoot", "--x-star", "1e1", "--trajectory", str(dump)], capsys)
        assert table(out)[1][1] == "0.618340077404"
        rows = table(dump.read_text())
        assert rows[0] == ["x", "y", "h_accepted"]
        assert rows[1][:2] == ["10", "10"]
        assert float(rows[-1][0]) == 0
        assert all(float(r[2]) < 0 for r in rows[2:])

    def test_shoot_bad_start(self, capsys):
        code, _, _ = run(["shoot", "--x-star", "0.5"], capsys)
        assert code == 7

    def test_replicate(self, capsys):
        code, out, _ = run(["replicate"], capsys)
        assert code == 0
        rows = table(out)
        assert rows[0] == ["x", "y1", "y0", "y2", "y_rational", "y_reference", "flag_degenerate"]
        assert rows[1][0] == "0"
        assert rows[1][1] == "0.550321208149"
        assert rows[1][5] == "0.618340077404"
        _, again, _ = run(["replicate"], capsys)
        assert again == out

    def test_replicate_failure(self, capsys):
        code, _, _ = run(["replicate", "--h", "0.3", "--x-hi", "0.9"], capsys)
        assert code == 7


def test_tolerances_must_be_positive(capsys):
    with pytest.raises(SystemExit) as info:
        main(["shoot", "--rtol", "-1"])
    assert info.value.code == 2
