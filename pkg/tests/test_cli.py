import csv
import io
import json
import os
import subprocess
import sys
import time

import pytest

from evdd.circuit import to_qasm
from evdd.cli import BENCH_HEADER, main
from evdd import corpus

SMALL = ["--node-table-size", "16", "--value-table-size", "16",
         "--op-cache-size", "14", "--workers", "1"]


@pytest.fixture
def ghz3_file(tmp_path):
    path = tmp_path / "ghz3.qasm"
    path.write_text(to_qasm(corpus.ghz(3)))
    return str(path)


def run_main(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSim:
    def test_json_report_schema(self, capsys, ghz3_file):
        code, out, _ = run_main(capsys, "sim", ghz3_file,
                                "--output", "json", *SMALL)
        assert code == 0
        report = json.loads(out)
        assert {"command", "circuit", "n", "gates", "status", "seconds",
                "final_nodes", "peak_nodes", "sharing", "l2_norm",
                "workers", "norm_strategy", "tolerance", "seed",
                "shots"} <= set(report)
        assert report["n"] == 3
        assert report["gates"] == 3
        assert abs(report["l2_norm"] - 1.0) < 1e-3
        assert report["final_nodes"] == 5
        assert report["status"] == "ok"

    def test_histogram_with_shots(self, capsys, ghz3_file):
        code, out, _ = run_main(capsys, "sim", ghz3_file, "--output", "json",
                                "--shots", "1000", "--seed", "7", *SMALL)
        report = json.loads(out)
        assert set(report["histogram"]) == {"000", "111"}
        assert sum(report["histogram"].values()) == 1000

    def test_histogram_seeded_identically(self, capsys, ghz3_file):
        _, out1, _ = run_main(capsys, "sim", ghz3_file, "--output", "json",
                              "--shots", "500", "--seed", "3", *SMALL)
        _, out2, _ = run_main(capsys, "sim", ghz3_file, "--output", "json",
                              "--shots", "500", "--seed", "3", *SMALL)
        assert json.loads(out1)["histogram"] == json.loads(out2)["histogram"]

    def test_empty_circuit(self, capsys, tmp_path):
        path = tmp_path / "empty.qasm"
        path.write_text('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\n')
        code, out, _ = run_main(capsys, "sim", str(path),
                                "--output", "json", *SMALL)
        assert code == 0
        report = json.loads(out)
        assert report["gates"] == 0
        assert report["l2_norm"] == 1.0

    def test_unsupported_feature_is_error_exit(self, capsys, tmp_path):
        path = tmp_path / "iffy.qasm"
        path.write_text('OPENQASM 2.0;\ninclude "qelib1.inc";\n'
                        "qreg q[1];\ncreg c[1];\nif (c==1) x q[0];\n")
        code, _, err = run_main(capsys, "sim", str(path), *SMALL)
        assert code == 1
        assert "'if'" in err

    def test_missing_file_is_error_exit(self, capsys):
        code, _, err = run_main(capsys, "sim", "/nonexistent/x.qasm", *SMALL)
        assert code == 1
        assert err

    def test_timeout_exit_and_grace(self, capsys, tmp_path):
        path = tmp_path / "big.qasm"
        path.write_text(to_qasm(corpus.random_dense(16, layers=4)))
        t0 = time.perf_counter()
        code, _, err = run_main(capsys, "sim", str(path), "--timeout", "1",
                                "--node-table-size", "20",
                                "--value-table-size", "20",
                                "--op-cache-size", "16", "--workers", "1")
        elapsed = time.perf_counter() - t0
        assert code == 2
        assert "timeout" in err
        assert elapsed < 3.0

    def test_text_output(self, capsys, ghz3_file):
        code, out, _ = run_main(capsys, "sim", ghz3_file, *SMALL)
        assert code == 0
        assert "l2_norm" in out

    def test_csv_output(self, capsys, ghz3_file):
        code, out, _ = run_main(capsys, "sim", ghz3_file,
                                "--output", "csv", *SMALL)
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) == 2
        assert "l2_norm" in rows[0]


class TestEqcheck:
    def test_equivalent_exit_zero(self, capsys, tmp_path):
        a = tmp_path / "a.qasm"
        b = tmp_path / "b.qasm"
        base = corpus.ghz(3)
        a.write_text(to_qasm(base))
        b.write_text(to_qasm(base))
        for algorithm in ("alternating", "pauli"):
            code, out, _ = run_main(capsys, "eqcheck", str(a), str(b),
                                    "--algorithm", algorithm,
                                    "--output", "json", *SMALL)
            assert code == 0
            report = json.loads(out)
            assert report["equivalent"] is True
            assert report["factor_re"] == pytest.approx(1.0)
            assert report["algorithm"] == algorithm

    def test_non_equivalent_exit_three(self, capsys, tmp_path):
        from evdd.circuit import missing_gate_mutations
        base = corpus.ghz(3)
        _, mutant = next(missing_gate_mutations(base))
        a = tmp_path / "a.qasm"
        b = tmp_path / "b.qasm"
        a.write_text(to_qasm(base))
        b.write_text(to_qasm(mutant))
        code, out, _ = run_main(capsys, "eqcheck", str(a), str(b),
                                "--output", "json", *SMALL)
        assert code == 3
        report = json.loads(out)
        assert report["equivalent"] is False
        assert report["witness"]

    def test_missing_file_exit_one(self, capsys, ghz3_file):
        code, _, err = run_main(capsys, "eqcheck", ghz3_file,
                                "/nonexistent/v.qasm", *SMALL)
        assert code == 1

    def test_qubit_mismatch_exit_one(self, capsys, tmp_path):
        a = tmp_path / "a.qasm"
        b = tmp_path / "b.qasm"
        a.write_text(to_qasm(corpus.ghz(2)))
        b.write_text(to_qasm(corpus.ghz(3)))
        code, _, err = run_main(capsys, "eqcheck", str(a), str(b), *SMALL)
        assert code == 1
        assert "qubits" in err


class TestBench:
    @pytest.fixture
    def bench_dir(self, tmp_path):
        d = tmp_path / "circuits"
        d.mkdir()
        for c in (corpus.ghz(3), corpus.qft(3), corpus.w_state(3)):
            (d / f"{c.source_name}.qasm").write_text(to_qasm(c))
        return d

    def test_csv_rows_and_header(self, capsys, bench_dir):
        code, out, _ = run_main(capsys, "bench", str(bench_dir), *SMALL)
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == BENCH_HEADER
        assert len(rows) == 4
        assert all(r[3] == "ok" for r in rows[1:])

    def test_error_row_does_not_abort_sweep(self, capsys, bench_dir):
        (bench_dir / "broken.qasm").write_text("OPENQASM 2.0;\nqreg q[\n")
        code, out, err = run_main(capsys, "bench", str(bench_dir), *SMALL)
        assert code == 0
        rows = {r[0]: r for r in list(csv.reader(io.StringIO(out)))[1:]}
        assert rows["broken"][3] == "error"
        assert sum(1 for r in rows.values() if r[3] == "ok") == 3

    def test_timeout_row_has_no_nodes(self, capsys, tmp_path):
        d = tmp_path / "c"
        d.mkdir()
        (d / "huge.qasm").write_text(to_qasm(corpus.random_dense(16,
                                                                 layers=4)))
        code, out, _ = run_main(capsys, "bench", str(d), "--timeout", "1",
                                "--node-table-size", "20",
                                "--value-table-size", "20",
                                "--op-cache-size", "16", "--workers", "1")
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[1][3] == "timeout"
        assert rows[1][5] == ""

    def test_baseline_speedup_summary(self, capsys, bench_dir, tmp_path):
        code, out, _ = run_main(capsys, "bench", str(bench_dir), *SMALL)
        baseline = tmp_path / "baseline.csv"
        baseline.write_text(out)
        code, out2, _ = run_main(capsys, "bench", str(bench_dir),
                                 "--baseline", str(baseline), *SMALL)
        assert code == 0
        summary = [l for l in out2.splitlines() if l.startswith("# speedup")]
        assert summary
        assert "median=" in summary[0] and "p99=" in summary[0]

    def test_eqcheck_mode_pairs_by_suffix(self, capsys, tmp_path):
        d = tmp_path / "pairs"
        d.mkdir()
        base = corpus.ghz(3)
        from evdd.circuit import rewrite_equivalent
        (d / "ghz_03.qasm").write_text(to_qasm(base))
        (d / "ghz_03_alt.qasm").write_text(
            to_qasm(rewrite_equivalent(base, 1)))
        (d / "unpaired.qasm").write_text(to_qasm(corpus.ghz(2)))
        code, out, _ = run_main(capsys, "bench", str(d),
                                "--mode", "eqcheck", *SMALL)
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) == 2
        assert rows[1][0] == "ghz_03"
        assert rows[1][7] == "equivalent"

    def test_bad_directory(self, capsys):
        code, _, err = run_main(capsys, "bench", "/nonexistent/dir", *SMALL)
        assert code == 1


class TestPlot:
    def test_figures_rendered_from_csv(self, capsys, tmp_path):
        d = tmp_path / "circuits"
        d.mkdir()
        for c in (corpus.ghz(3), corpus.random_dense(4)):
            (d / f"{c.source_name}.qasm").write_text(to_qasm(c))
        code, out, _ = run_main(capsys, "bench", str(d), *SMALL)
        results = tmp_path / "results.csv"
        results.write_text(out)
        outdir = tmp_path / "figs"
        code, out2, _ = run_main(capsys, "plot", str(results),
                                 "--out-dir", str(outdir))
        assert code == 0
        written = out2.splitlines()
        assert any(p.endswith("dd_sizes.png") for p in written)
        assert any(p.endswith("runtimes.png") for p in written)
        for p in written:
            assert os.path.getsize(p) > 1000

    def test_baseline_figures(self, capsys, tmp_path):
        d = tmp_path / "circuits"
        d.mkdir()
        for c in (corpus.ghz(3), corpus.qft(3)):
            (d / f"{c.source_name}.qasm").write_text(to_qasm(c))
        _, out, _ = run_main(capsys, "bench", str(d), *SMALL)
        results = tmp_path / "results.csv"
        results.write_text(out)
        outdir = tmp_path / "figs"
        code, out2, _ = run_main(capsys, "plot", str(results),
                                 "--out-dir", str(outdir),
                                 "--baseline", str(results))
        written = out2.splitlines()
        assert any(p.endswith("runtime_scatter.png") for p in written)
        assert any(p.endswith("speedups.png") for p in written)


def test_console_script_smoke(tmp_path):
    path = tmp_path / "ghz2.qasm"
    path.write_text(to_qasm(corpus.ghz(2)))
    proc = subprocess.run(
        [sys.executable, "-m", "evdd.cli", "sim", str(path),
         "--output", "json", *SMALL],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "ok"
