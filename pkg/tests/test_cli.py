import csv
import io
import json

import numpy as np
import pytest

from khabconv import cli
from khabconv.errors import DomainError
from khabconv.io import csv_text, json_text, parse_grid, write_atomic

ONE = '{"terms": [{"c": 1, "beta": 0}]}'


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestParseGrid:
    def test_forms(self):
        g = parse_grid("log:0.01:100:5")
        assert g[0] == 0.01 and g[-1] == 100.0 and np.allclose(g, [0.01, 0.1, 1, 10, 100])
        assert np.allclose(parse_grid("lin:1:2:3"), [1.0, 1.5, 2.0])
        assert parse_grid("0.5, 1").tolist() == [0.5, 1.0]
        assert parse_grid("lin:3:3:1").tolist() == [3.0]

    @pytest.mark.parametrize(
        "spec", ["", "  ", "log:0:1:5", "log:1:0.5:3", "lin:1:2", "lin:1:2:0", "1,1", "2,1", "a,b", "-1,2", "1,inf"]
    )
    def test_invalid(self, spec):
        with pytest.raises(DomainError):
            parse_grid(spec)


class TestFormats:
    def test_csv_text(self):
        text = csv_text(["a", "b", "c"], [(0.1, True, "x"), (1.0, False, 2)])
        assert text == "a,b,c\n0.10000000000000001,true,x\n1,false,2\n"

    def test_json_text(self):
        text = json_text({"x": 0.1, "y": [1.0, float("nan")], "z": {"ok": True}, "e": []})
        data = json.loads(text)
        assert data == {"x": 0.1, "y": [1.0, None], "z": {"ok": True}, "e": []}
        assert "0.10000000000000001" in text and "1.0" in text

    def test_write_atomic(self, tmp_path):
        path = tmp_path / "out.csv"
        write_atomic(path, "a\n")
        write_atomic(path, "b\n")
        assert path.read_text() == "b\n"
        assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]


class TestKernelCommand:
    def test_examples(self, capsys):
        code, out = run(capsys, "kernel", "--n", "1", "--grid", "0.5,1")
        assert code == 0
        r = rows(out)
        assert float(r[0]["A_n"]) == pytest.approx(0.1931471805599453)
        assert float(r[0]["dA_n_dx"]) == pytest.approx(-1.0)
        assert (r[1]["x"], r[1]["A_n"], r[1]["dA_n_dx"]) == ("1", "0", "0")
        code, out = run(capsys, "kernel", "--n", "0", "--grid", "1")
        assert out.splitlines()[1] == "1,0,-1"

    @pytest.mark.parametrize("argv", [["--grid", ""], ["--grid", "0.5,2"], ["--grid", "0.5", "--n", "13"]])
    def test_invalid(self, capsys, argv):
        args = ["kernel", "--n", "1", *argv] if "--n" not in argv else ["kernel", *argv]
        assert cli.main(args) == 2

    def test_io_failure(self, tmp_path):
        assert cli.main(["kernel", "--n", "1", "--grid", "0.5", "--out", str(tmp_path / "no" / "x.csv")]) == 1

    def test_out_file(self, tmp_path):
        path = tmp_path / "k.csv"
        assert cli.main(["kernel", "--n", "2", "--grid", "lin:0.1:1:10", "--out", str(path)]) == 0
        assert len(rows(path.read_text())) == 10


class TestTransformCommand:
    def test_examples(self, capsys, tmp_path):
        code, out = run(capsys, "transform", "--q", ONE, "--n", "2", "--grid", "3")
        assert code == 0
        (r,) = rows(out)
        assert float(r["g"]) == pytest.approx(1.0, rel=1e-12)
        assert float(r["g_prime"]) == pytest.approx(1 / 3, rel=1e-12)
        assert float(r["error_estimate"]) <= 1e-10
        code, out = run(capsys, "transform", "--q", '{"terms": []}', "--n", "2", "--grid", "1,2")
        assert code == 0 and all(float(r["g"]) == 0.0 for r in rows(out))

    def test_bad_exponent(self, tmp_path):
        path = tmp_path / "q.json"
        path.write_text('{"terms": [{"c": 1, "beta": -1.5}]}')
        assert cli.main(["transform", "--q", str(path), "--n", "2", "--grid", "3"]) == 2

    def test_missing_file(self):
        assert cli.main(["transform", "--q", "/nonexistent/q.json", "--n", "1", "--grid", "1"]) == 1

    def test_divergent_sampled_q(self, tmp_path):
        # samples cannot be integrated down to 0 (no extrapolation): bad input
        path = tmp_path / "q.csv"
        path.write_text("t,value\n1,1\n2,1\n3,1\n4,1\n")
        assert cli.main(["transform", "--q", str(path), "--n", "1", "--grid", "2"]) == 2

    def test_negative_tolerance(self):
        assert cli.main(["transform", "--q", ONE, "--n", "1", "--grid", "1", "--tol-rel", "-1"]) == 2


class TestInvertCommand:
    def test_analytic(self, capsys):
        code, out = run(capsys, "invert", "--g", '{"terms": [{"c": 0.25, "beta": 1}]}', "--n", "3", "--grid", "1.7,2")
        assert code == 0
        assert all(float(r["q_hat"]) == pytest.approx(1.0, rel=1e-14) for r in rows(out))
        code, out = run(capsys, "invert", "--g", '{"terms": []}', "--n", "3", "--grid", "1")
        assert float(rows(out)[0]["q_hat"]) == 0.0

    def test_file_roundtrip(self, tmp_path, capsys):
        g_path = tmp_path / "g.csv"
        q_path = tmp_path / "q.csv"
        assert cli.main(["transform", "--q", ONE, "--n", "2", "--grid", "log:0.1:10:200", "--out", str(g_path)]) == 0
        assert cli.main(["invert", "--g", str(g_path), "--n", "2", "--mode", "numeric", "--out", str(q_path)]) == 0
        r = rows(q_path.read_text())
        assert len(r) > 150
        assert max(abs(float(x["q_hat"]) - 1.0) for x in r) <= 1e-4

    def test_needs_grid_for_mix(self):
        assert cli.main(["invert", "--g", ONE, "--n", "1"]) == 2

    def test_conditioning_failure(self, tmp_path):
        rng = np.random.default_rng(3)
        grid = np.geomspace(0.5, 2.0, 60)
        path = tmp_path / "g.csv"
        path.write_text(csv_text(["t", "g"], zip(grid, grid / 3 + 1e-3 * rng.standard_normal(60))))
        assert cli.main(["invert", "--g", str(path), "--n", "4", "--grid", "1"]) == 4


class TestCheckCommand:
    def test_extremal(self, capsys):
        code, out = run(capsys, "check", "--q", "extremal", "--alpha", "0.5", "--n", "2", "--grid", "log:0.01:100:30")
        assert code == 0
        report = json.loads(out)
        assert report["verdict"] == "consistent" and report["ratio"] == pytest.approx(1.0, abs=1e-3)

    def test_zero_and_doubled(self, capsys):
        code, out = run(capsys, "check", "--q", '{"terms": []}', "--alpha", "0.5", "--n", "1", "--grid", "1,2")
        assert code == 0 and json.loads(out)["verdict"] == "consistent"
        code, out = run(capsys, "check", "--q", "extremal", "--scale", "2", "--alpha", "0.5", "--n", "1", "--grid", "1,2")
        assert code == 0 and json.loads(out)["verdict"] == "premise-violated"

    def test_divergent(self, capsys):
        code, out = run(capsys, "check", "--q", ONE, "--alpha", "0.5", "--n", "1", "--grid", "1,2")
        assert code == 3
        assert json.loads(out)["diverged"] is True

    @pytest.mark.parametrize("argv", [["--alpha", "0"], ["--alpha", "0.5", "--n", "0"]])
    def test_invalid(self, argv):
        base = ["check", "--q", "extremal", "--grid", "1"]
        if "--n" not in argv:
            argv = [*argv, "--n", "1"]
        assert cli.main(base + argv) == 2


class TestSweepCommand:
    def write(self, tmp_path, config):
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps(config))
        return str(path)

    def test_extremal(self, tmp_path, capsys):
        cfg = self.write(tmp_path, {"alphas": [0.5], "ns": [1, 2, 3], "family": "extremal", "grid": "log:0.01:100:20"})
        code, out = run(capsys, "sweep", "--config", cfg)
        assert code == 0
        r = rows(out)
        assert [x["n"] for x in r] == ["1", "2", "3"]
        assert all(abs(float(x["ratio"]) - 1.0) <= 1e-3 for x in r)
        assert list(r[0]) == cli.SWEEP_HEADER

    def test_empty(self, tmp_path, capsys):
        code, out = run(capsys, "sweep", "--config", self.write(tmp_path, {"alphas": [], "ns": []}))
        assert code == 0 and out == "alpha,n,family_id,premise_ok,ratio,verdict\n"

    def test_cardinality(self, tmp_path, capsys):
        cfg = self.write(tmp_path, {"alphas": [0.25, 0.5], "ns": [1, 2], "grid": "log:0.01:100:10", "workers": 2})
        code, out = run(capsys, "sweep", "--config", cfg)
        assert code == 0 and len(rows(out)) == 4

    def test_mix_family(self, tmp_path, capsys):
        family = {"kind": "mixes", "mixes": [{"terms": [{"c": 0.1, "beta": -0.5}]}], "names": ["small"]}
        cfg = self.write(tmp_path, {"alphas": [0.5], "ns": [1], "family": family, "grid": "1,2"})
        code, out = run(capsys, "sweep", "--config", cfg)
        (r,) = rows(out)
        assert r["family_id"] == "small" and r["verdict"] == "consistent"
        assert float(r["ratio"]) == pytest.approx(0.4, rel=1e-10)

    @pytest.mark.parametrize(
        "config", ['{"alphas": [0.5], "ns": ["x"]}', "[1, 2]", "{broken", '{"alphas": [0.5], "ns": [1], "family": "other"}']
    )
    def test_malformed(self, tmp_path, config):
        path = tmp_path / "bad.json"
        path.write_text(config)
        assert cli.main(["sweep", "--config", str(path)]) == 2

    def test_deterministic(self, tmp_path):
        cfg = self.write(tmp_path, {"alphas": [0.25, 0.5], "ns": [1, 2], "grid": "log:0.01:100:10"})
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["sweep", "--config", cfg, "--out", str(a)]) == 0
        assert cli.main(["sweep", "--config", cfg, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
