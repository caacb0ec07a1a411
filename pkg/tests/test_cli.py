"""Command-line harness: commands, exit codes, serialization round-trips."""

import csv
import io
import json
import math

import numpy as np
import pytest

from latgreen import GreenParams, OutputRecord, green_bessel, mass
from latgreen.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0] == "# schema=1"
    reader = csv.reader(io.StringIO("\n".join(lines[1:])))
    rows = list(reader)
    header, body = rows[0], rows[1:]
    return header, body


class TestEval:
    def test_closed_d1_example(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "--d", "1", "--a", "1", "--q", "1",
            "--x", "0", "--method", "closed-d1",
        )
        assert code == 0
        header, body = parse_csv(out)
        rec = OutputRecord.from_csv_row(body[0])
        assert rec.value == pytest.approx(0.5773503, abs=1e-7)
        assert rec.method == "closed_d1"

    def test_massless_d3_origin(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "--d", "3", "--a", "0", "--q", "1",
            "--x", "0,0,0", "--method", "bessel",
        )
        assert code == 0
        _, body = parse_csv(out)
        rec = OutputRecord.from_csv_row(body[0])
        assert rec.value == pytest.approx(1.5163861, abs=1e-6)

    def test_bitwise_equality_with_library(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "--d", "2", "--a", "0.7", "--q", "1.5",
            "--x", "2,1", "--method", "bessel",
        )
        assert code == 0
        _, body = parse_csv(out)
        rec = OutputRecord.from_csv_row(body[0])
        lib = green_bessel(GreenParams(2, 0.7, 1.5), [2, 1])
        assert rec.value == lib.value
        assert rec.log_value == lib.log_value

    def test_divergent_case_exits_2(self, capsys):
        code, _, err = run_cli(
            capsys, "eval", "--d", "2", "--a", "0", "--q", "1",
            "--x", "0,0", "--method", "bessel",
        )
        assert code == 2
        assert "diverges" in err

    def test_usage_error_exits_64(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(
                capsys, "eval", "--d", "2", "--a", "1", "--q", "1",
                "--x", "0,0", "--method", "closed-d1",
            )
        assert exc.value.code == 64

    def test_missing_flag_exits_64(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(capsys, "eval", "--d", "2", "--a", "1", "--q", "1")
        assert exc.value.code == 64

    def test_monte_carlo_method(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "--d", "1", "--a", "1", "--q", "1",
            "--x", "0", "--method", "mc", "--walks", "20000", "--seed", "5",
        )
        assert code == 0
        _, body = parse_csv(out)
        rec = OutputRecord.from_csv_row(body[0])
        assert rec.method == "monte_carlo"
        assert rec.value == pytest.approx(1.0 / math.sqrt(3.0), abs=5 * rec.est_error)

    def test_multiple_points(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "--d", "1", "--a", "0.5", "--q", "2",
            "--x", "0", "--x", "3", "--method", "closed-d1",
        )
        assert code == 0
        _, body = parse_csv(out)
        assert len(body) == 2

    def test_json_lines(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "--d", "1", "--a", "1", "--q", "1",
            "--x", "2", "--method", "closed-d1", "--json",
        )
        assert code == 0
        rec = OutputRecord.from_json(out.splitlines()[0])
        assert rec.x == (2,)

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "result.csv"
        code, out, _ = run_cli(
            capsys, "eval", "--d", "1", "--a", "1", "--q", "1",
            "--x", "0", "--method", "closed-d1", "--out", str(target),
        )
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("# schema=1")


class TestNorm:
    def test_unit_vector(self, capsys):
        code, out, _ = run_cli(
            capsys, "norm", "--d", "3", "--a", "0.5", "--x", "1,0,0"
        )
        assert code == 0
        header, body = parse_csv(out)
        row = dict(zip(header, body[0]))
        assert float(row["norm"]) == pytest.approx(1.0, abs=1e-12)
        assert row["sandwich_ok"] == "True"

    def test_near_euclidean(self, capsys):
        code, out, _ = run_cli(
            capsys, "norm", "--d", "2", "--a", "0.01", "--x", "3,4"
        )
        header, body = parse_csv(out)
        row = dict(zip(header, body[0]))
        assert float(row["norm"]) == pytest.approx(5.0, abs=1e-3)

    def test_zero_vector(self, capsys):
        code, out, _ = run_cli(capsys, "norm", "--d", "1", "--a", "1", "--x", "0")
        assert code == 0
        header, body = parse_csv(out)
        row = dict(zip(header, body[0]))
        assert float(row["norm"]) == 0.0
        assert row["u"] == ""

    def test_nonpositive_killing_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "norm", "--d", "1", "--a", "0", "--x", "1")
        assert code == 2


class TestBall:
    def test_axis_points_and_sandwich(self, capsys):
        code, out, _ = run_cli(
            capsys, "ball", "--d", "2", "--a", "20", "--points", "360"
        )
        assert code == 0
        header, body = parse_csv(out)
        pts = np.array([[float(r[1]), float(r[2])] for r in body])
        assert len(pts) == 360
        # axis direction appears with radius exactly 1
        assert pts[0, 0] == pytest.approx(1.0, abs=1e-12)
        assert pts[0, 1] == 0.0
        l2 = np.linalg.norm(pts, axis=1)
        l1 = np.abs(pts).sum(axis=1)
        assert np.all(l2 <= 1.0 + 1e-10)
        assert np.all(l1 >= 1.0 - 1e-10)
        # diagonal point from the equal-coordinate closed form
        a = 20.0
        u = math.sqrt((1.0 + a * a) ** 2 - 1.0)
        want = math.sqrt(2.0) / (2.0 * math.asinh(u) / mass(2, a)) / math.sqrt(2.0)
        assert pts[45, 0] == pytest.approx(want, rel=1e-10)
        assert pts[45, 0] == pytest.approx(pts[45, 1], rel=1e-12)

    def test_small_killing_round(self, capsys):
        code, out, _ = run_cli(
            capsys, "ball", "--d", "2", "--a", "0.05", "--points", "100"
        )
        _, body = parse_csv(out)
        radii = [math.hypot(float(r[1]), float(r[2])) for r in body]
        assert max(abs(r - 1.0) for r in radii) < 1e-2

    def test_three_dimensional(self, capsys):
        code, out, _ = run_cli(
            capsys, "ball", "--d", "3", "--a", "1.0", "--points", "16"
        )
        assert code == 0
        header, body = parse_csv(out)
        assert header == ["theta", "phi", "x1", "x2", "x3"]

    def test_unsupported_dimension(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(capsys, "ball", "--d", "1", "--a", "1", "--points", "16")
        assert exc.value.code == 64


class TestAsy:
    def test_regime_one_converges(self, capsys):
        code, out, _ = run_cli(
            capsys, "asy", "--d", "1", "--q", "1", "--x", "1",
            "--a", "0.5", "--n-list", "1,2,4,8,16,32,64",
        )
        assert code == 0
        header, body = parse_csv(out)
        ratios = [
            float(dict(zip(header, r))["ratio"])
            for r in body
            if dict(zip(header, r))["regime"].startswith("I_")
        ]
        assert ratios[-1] == pytest.approx(1.0, abs=1e-9)

    def test_critical_regime_converges(self, capsys):
        code, out, _ = run_cli(
            capsys, "asy", "--d", "3", "--q", "1", "--x", "1,0,0",
            "--s", "0", "--n-list", "8,16,32,64",
        )
        assert code == 0
        header, body = parse_csv(out)
        ratios = [float(dict(zip(header, r))["ratio"]) for r in body]
        assert abs(ratios[-1] - 1.0) < 0.01
        assert abs(ratios[-1] - 1.0) < abs(ratios[0] - 1.0)

    def test_isotropic_tracking_with_vanishing_killing(self, capsys):
        # scan n with a_n = n^{-1/2}: the two OZ estimates approach 1
        gaps = []
        for n in (100, 10_000):
            a_n = n**-0.5
            code, out, _ = run_cli(
                capsys, "asy", "--d", "2", "--q", "1", "--x", "1,1",
                "--a", repr(a_n), "--n-list", str(n),
            )
            assert code == 0
            header, body = parse_csv(out)
            by_regime = {
                dict(zip(header, r))["regime"]: float(
                    dict(zip(header, r))["estimate_log"]
                )
                for r in body
            }
            gaps.append(
                abs(by_regime["II_isotropic_OZ"] - by_regime["I_anisotropic_OZ"])
            )
        assert gaps[1] < gaps[0]
        assert gaps[1] < 0.01

    def test_requires_exactly_one_mode(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(
                capsys, "asy", "--d", "1", "--q", "1", "--x", "1",
                "--a", "0.5", "--s", "1", "--n-list", "2",
            )
        assert exc.value.code == 64


class TestGbar:
    def test_curve_family(self, capsys):
        code, out, _ = run_cli(
            capsys, "gbar", "--d", "1", "--x", "1", "--a-list", "0.25,0.5,1",
            "--y-range", "0.4:2.5", "--y-steps", "85",
        )
        assert code == 0
        header, body = parse_csv(out)
        rows = [dict(zip(header, r)) for r in body]
        for a in ("0.25", "0.5", "1.0"):
            curve = [r for r in rows if float(r["a"]) == float(a)]
            assert len(curve) == 85
            assert curve[0]["curve_convex"] == "True"
            assert abs(float(curve[0]["curve_min_y"]) - 1.0) < 0.015
        # minima ordered by killing strength, and the unit-killing minimum
        # equals arccosh(2)
        minima = {
            float(r["a"]): float(r["curve_min_value"]) for r in rows
        }
        assert minima[0.25] < minima[0.5] < minima[1.0]
        assert minima[1.0] == pytest.approx(math.acosh(2.0), abs=1e-4)

    def test_empty_grid_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(
                capsys, "gbar", "--d", "1", "--x", "1", "--a-list", "1",
                "--y-range", "2:1", "--y-steps", "10",
            )
        assert exc.value.code == 64


class TestBound:
    def test_holds_with_frozen_constants(self, capsys):
        code, out, _ = run_cli(
            capsys, "bound", "--d", "3", "--q", "1", "--kappa", "0.5",
            "--kappa1", "0.6", "--a-grid", "0,0.25,1", "--box", "3",
        )
        assert code == 0
        header, body = parse_csv(out)
        row = dict(zip(header, body[0]))
        assert row["holds"] == "True"
        assert float(row["worst_ratio"]) < 1.0

    def test_violation_exits_1(self, capsys):
        code, out, _ = run_cli(
            capsys, "bound", "--d", "3", "--q", "1", "--kappa", "0.5",
            "--kappa1", "0.01", "--a-grid", "0.25", "--box", "2",
        )
        assert code == 1
        header, body = parse_csv(out)
        assert dict(zip(header, body[0]))["holds"] == "False"

    def test_higher_exponent_dimension_five(self, capsys):
        code, out, _ = run_cli(
            capsys, "bound", "--d", "5", "--q", "2", "--kappa", "0.5",
            "--kappa1", "0.9", "--a-grid", "0,0.5", "--box", "2",
        )
        assert code == 0

    def test_kappa_out_of_range(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(
                capsys, "bound", "--d", "3", "--q", "1", "--kappa", "1.5",
                "--kappa1", "1", "--a-grid", "0.5", "--box", "2",
            )
        assert exc.value.code == 64


class TestRecordRoundTrip:
    def test_csv(self):
        rec = OutputRecord(
            method="bessel_rep", d=3, a=0.25, q=1.5, s=None, n=17,
            x=(1, -2, 0), value=1.25e-7, log_value=-15.895,
            est_error=3.2e-16, regime="I_anisotropic_OZ",
        )
        back = OutputRecord.from_csv_row(rec.to_csv_row())
        assert back == OutputRecord(
            method="bessel_rep", d=3, a=0.25, q=1.5, s=None, n=17,
            x=(1.0, -2.0, 0.0), value=1.25e-7, log_value=-15.895,
            est_error=3.2e-16, regime="I_anisotropic_OZ",
        )

    def test_json(self):
        rec = OutputRecord(
            method="fourier", d=2, a=0.0, q=1.0, s=0.5, n=None,
            x=(4.0, 5.0), value=0.125, log_value=math.log(0.125),
            est_error=1e-12, regime=None,
        )
        assert OutputRecord.from_json(rec.to_json()) == rec

    def test_json_lines_parse(self):
        rec = OutputRecord(
            method="closed_d1", d=1, a=1.0, q=1.0, s=None, n=None,
            x=(0.0,), value=0.5, log_value=math.log(0.5), est_error=0.0,
        )
        obj = json.loads(rec.to_json())
        assert obj["params"]["d"] == 1


class TestEnvironmentAndWorkers:
    def test_rel_tol_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("LATGREEN_REL_TOL", "1e-8")
        code, out, _ = run_cli(
            capsys, "eval", "--d", "1", "--a", "1", "--q", "1",
            "--x", "1", "--method", "bessel",
        )
        assert code == 0
        _, body = parse_csv(out)
        rec = OutputRecord.from_csv_row(body[0])
        lib = green_bessel(GreenParams(1, 1.0, 1.0), [1])
        assert rec.value == pytest.approx(lib.value, rel=1e-7)

    def test_bound_workers_deterministic(self, capsys):
        outs = []
        for workers in ("1", "4"):
            code, out, _ = run_cli(
                capsys, "bound", "--d", "3", "--q", "1", "--kappa", "0.5",
                "--kappa1", "0.6", "--a-grid", "0.5", "--box", "2",
                "--workers", workers,
            )
            assert code == 0
            outs.append(out)
        assert outs[0] == outs[1]


class TestAccuracyExitCode:
    def test_accuracy_error_exits_3(self, capsys, monkeypatch):
        import latgreen.cli as cli_mod
        from latgreen import AccuracyError

        def boom(*args, **kwargs):
            raise AccuracyError("synthetic quadrature failure", best=None)

        monkeypatch.setattr(cli_mod, "green_bessel", boom)
        code, _, err = run_cli(
            capsys, "eval", "--d", "1", "--a", "1", "--q", "1",
            "--x", "0", "--method", "bessel",
        )
        assert code == 3
        assert "accuracy" in err
