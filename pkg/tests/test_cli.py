"""Command-line front end: configs, sweeps, inversion, validation."""
import json

import numpy as np
import pytest

from starscatter import cli
from starscatter.errors import ResonanceError


def write_config(tmp_path, doc, name="net.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=1))
    return str(path)


def uniform_branch(kind="infinite", length=None):
    prof = {"family": "uniform", "inductance": 1.0, "capacitance": 1.0}
    if length is not None:
        prof["length"] = length
    return {"kind": kind, "profile": prof}


def uniform_config(m, stub_lengths=()):
    return {"schema_version": 1,
            "branches": [uniform_branch() for _ in range(m)]
            + [uniform_branch("finite", length) for length in stub_lengths]}


class TestForward:
    def test_three_way_junction(self, tmp_path, capsys):
        cfg = write_config(tmp_path, uniform_config(3))
        out = tmp_path / "sweep.csv"
        rc = cli.main(["forward", "--config", cfg, "--kmin", "10",
                       "--kmax", "12", "--dk", "1", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "k,re_R1,im_R1,abs_R1,re_T2,im_T2,re_T3,im_T3"
        assert len(lines) == 4
        for line in lines[1:]:
            parts = line.split(",")
            assert float(parts[3]) == pytest.approx(1.0 / 3.0, abs=1e-10)

    def test_matched_line_zero_reflection(self, tmp_path):
        cfg = write_config(tmp_path, uniform_config(2))
        out = tmp_path / "sweep.csv"
        assert cli.main(["forward", "--config", cfg, "--kmin", "5",
                         "--kmax", "6", "--dk", "0.5", "--out", str(out)]) == 0
        for line in out.read_text().strip().split("\n")[1:]:
            assert float(line.split(",")[3]) == 0.0

    def test_byte_stable(self, tmp_path):
        cfg = write_config(tmp_path, uniform_config(1, [1.0]))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["forward", "--config", cfg, "--kmin", "10", "--kmax", "11",
                "--dk", "0.01"]
        assert cli.main(args + ["--out", str(a)]) == 0
        assert cli.main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"schema_version": 1, "branches": [}')
        rc = cli.main(["forward", "--config", str(path), "--kmin", "5",
                       "--kmax", "6", "--dk", "1", "--out",
                       str(tmp_path / "o.csv")])
        assert rc == 2
        assert "invalid JSON" in capsys.readouterr().err

    def test_missing_key_named(self, tmp_path, capsys):
        doc = {"schema_version": 1,
               "branches": [{"profile": {"family": "uniform"}}]}
        rc = cli.main(["forward", "--config", write_config(tmp_path, doc),
                       "--kmin", "5", "--kmax", "6", "--dk", "1",
                       "--out", str(tmp_path / "o.csv")])
        assert rc == 2
        assert "branches[0].kind" in capsys.readouterr().err

    def test_bad_grid(self, tmp_path, capsys):
        cfg = write_config(tmp_path, uniform_config(2))
        rc = cli.main(["forward", "--config", cfg, "--kmin", "5",
                       "--kmax", "6", "--dk", "-1",
                       "--out", str(tmp_path / "o.csv")])
        assert rc == 2
        rc = cli.main(["forward", "--config", cfg, "--kmin", "0.01",
                       "--kmax", "6", "--dk", "1",
                       "--out", str(tmp_path / "o.csv")])
        assert rc == 2

    def test_solver_failure_exit_code(self, tmp_path, monkeypatch, capsys):
        cfg = write_config(tmp_path, uniform_config(2))

        def boom(*a, **kw):
            raise ResonanceError("synthetic failure")

        monkeypatch.setattr(cli.scattering, "reflectogram", boom)
        rc = cli.main(["forward", "--config", cfg, "--kmin", "5",
                       "--kmax", "6", "--dk", "1",
                       "--out", str(tmp_path / "o.csv")])
        assert rc == 3

    def test_thread_cap_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("STAR_SCATTER_THREADS", "2")
        assert cli._thread_count() <= 2
        cfg = write_config(tmp_path, uniform_config(2))
        assert cli.main(["forward", "--config", cfg, "--kmin", "5",
                        "--kmax", "7", "--dk", "0.01",
                         "--out", str(tmp_path / "o.csv")]) == 0


class TestInvert:
    def test_round_trip(self, tmp_path, capsys):
        cfg = write_config(tmp_path, uniform_config(1, [1.0]))
        csv = tmp_path / "sweep.csv"
        assert cli.main(["forward", "--config", cfg, "--kmin", "60",
                         "--kmax", "80", "--dk", "0.005",
                         "--out", str(csv)]) == 0
        report = tmp_path / "report.json"
        rc = cli.main(["invert", "--csv", str(csv), "--out", str(report)])
        assert rc == 0
        doc = json.loads(report.read_text())
        assert doc["m_hat"] == 1
        assert len(doc["taus"]) == 1
        assert abs(doc["taus"][0] - 1.0) < 0.01
        assert "m_hat=1" in capsys.readouterr().out

    def test_all_zero_reflection(self, tmp_path):
        csv = tmp_path / "zeros.csv"
        rows = ["k,re_R1,im_R1,abs_R1"]
        for k in np.arange(60.0, 61.0, 0.01):
            rows.append(f"{k},0,0,0")
        csv.write_text("\n".join(rows) + "\n")
        report = tmp_path / "r.json"
        assert cli.main(["invert", "--csv", str(csv),
                         "--out", str(report)]) == 0
        doc = json.loads(report.read_text())
        assert doc["m_hat"] == 2
        assert doc["taus"] == []

    def test_too_few_rows(self, tmp_path):
        csv = tmp_path / "short.csv"
        csv.write_text("k,re_R1,im_R1,abs_R1\n"
                       + "".join(f"{60 + i},0,0,0\n" for i in range(5)))
        assert cli.main(["invert", "--csv", str(csv)]) == 4

    def test_nan_rows_skipped(self, tmp_path):
        csv = tmp_path / "gaps.csv"
        rows = ["k,re_R1,im_R1,abs_R1"]
        for i, k in enumerate(np.arange(60.0, 61.0, 0.01)):
            rows.append(f"{k},NaN,NaN,NaN" if i == 3 else f"{k},0,0,0")
        csv.write_text("\n".join(rows) + "\n")
        samples = cli.read_reflectogram_csv(str(csv))
        assert len(samples) == 99

    def test_bad_header(self, tmp_path):
        csv = tmp_path / "bad.csv"
        csv.write_text("frequency,r\n1,0\n")
        assert cli.main(["invert", "--csv", str(csv)]) == 2


class TestValidate:
    def test_uniform_three_way(self, tmp_path, capsys):
        cfg = write_config(tmp_path, uniform_config(3))
        assert cli.main(["validate", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert "PASS flux_conservation" in out
        assert "PASS oracle_comparison" in out
        assert "FAIL" not in out

    def test_direct_potential_network(self, tmp_path, capsys):
        xs = np.linspace(0.0, 0.6, 121)
        vs = 0.5 * np.sin(np.pi * xs / 0.6) ** 2
        table = tmp_path / "V.csv"
        table.write_text("x,V\n" + "".join(f"{x},{v}\n"
                                           for x, v in zip(xs, vs)))
        doc = {"schema_version": 1, "branches": [
            {"kind": "infinite",
             "direct": {"potential_table_path": "V.csv"}},
            {"kind": "finite",
             "direct": {"potential_table_path": "V.csv", "tau": 0.9,
                        "h": 0.2}}]}
        cfg = write_config(tmp_path, doc)
        assert cli.main(["validate", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert "PASS kernel_vs_ivp" in out
        assert "FAIL" not in out

    def test_a5_violation_rejected_at_load(self, tmp_path, capsys):
        doc = uniform_config(2)
        doc["branches"][1]["profile"]["capacitance"] = 2.0
        cfg = write_config(tmp_path, doc)
        assert cli.main(["validate", "--config", cfg]) == 2
        assert "matched-node" in capsys.readouterr().err

    def test_failing_check_exit_code(self, tmp_path, monkeypatch, capsys):
        cfg = write_config(tmp_path, uniform_config(3))

        def rigged(net):
            yield ("flux_conservation", False, "rigged")

        monkeypatch.setattr(cli, "_run_checks", rigged)
        assert cli.main(["validate", "--config", cfg]) == 5
        assert "flux_conservation" in capsys.readouterr().err
