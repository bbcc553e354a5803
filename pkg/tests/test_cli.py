import json
import xml.etree.ElementTree as ET

import pytest

from vqclab.ansatz import build_ttn
from vqclab.circuit import bind, load_circuit
from vqclab.cli import main
from vqclab.grad import ReparamMode, free_all_angles, grad_variance, reparameterize
from vqclab.harness import read_csv
from vqclab.sim import expect_z
from vqclab.transpiler import transpile
from vqclab.backend import make_line


def run(*argv):
    return main([str(a) for a in argv])


class TestBuild:
    def test_writes_loadable_circuit(self, tmp_path, capsys):
        out = tmp_path / "c.txt"
        assert run("build", "--ansatz", "ttn", "--qubits", "4", "--reps", "2", "--out", out) == 0
        assert load_circuit(out) == build_ttn(4, 2)
        assert "parameters" in capsys.readouterr().out

    def test_rejects_unknown_ansatz(self, tmp_path):
        with pytest.raises(SystemExit):
            run("build", "--ansatz", "nope", "--qubits", "2", "--reps", "1", "--out", tmp_path / "x")


class TestTranspileCommand:
    def test_files_and_provenance(self, tmp_path, capsys):
        circ = tmp_path / "c.txt"
        phys = tmp_path / "p.txt"
        prov = tmp_path / "prov.json"
        run("build", "--ansatz", "real_amplitudes", "--qubits", "2", "--reps", "1", "--out", circ)
        code = run(
            "transpile", "--in", circ, "--backend", "line:2", "--out", phys,
            "--provenance", prov, "--reps", "1",
        )
        assert code == 0
        expected = transpile(load_circuit(circ), make_line(2))
        assert load_circuit(phys) == expected.physical
        payload = json.loads(prov.read_text())
        assert set(payload) == {str(i) for i in range(expected.physical.num_symbols)}
        kinds = {entry["kind"] for entry in payload.values()}
        assert kinds == {"logical", "const"}
        logical_entries = [e for e in payload.values() if e["kind"] == "logical"]
        assert all(e["coeff"] in (1, -1) for e in logical_entries)
        assert "final layout" in capsys.readouterr().out

    def test_backend_file_reference(self, tmp_path):
        from vqclab.backend import save_backend

        backend_path = tmp_path / "b.json"
        save_backend(make_line(2), backend_path)
        circ = tmp_path / "c.txt"
        run("build", "--ansatz", "real_amplitudes", "--qubits", "2", "--reps", "1", "--out", circ)
        assert run("transpile", "--in", circ, "--backend", backend_path, "--out", tmp_path / "p.txt") == 0

    def test_unfit_backend_fails_cleanly(self, tmp_path, capsys):
        circ = tmp_path / "c.txt"
        run("build", "--ansatz", "ttn", "--qubits", "4", "--reps", "1", "--out", circ)
        assert run("transpile", "--in", circ, "--backend", "line:3", "--out", tmp_path / "p.txt") == 1
        assert "does not fit" in capsys.readouterr().err


class TestExpectCommand:
    def test_matches_library(self, tmp_path, capsys):
        circ = tmp_path / "c.txt"
        run("build", "--ansatz", "ttn", "--qubits", "2", "--reps", "1", "--out", circ)
        theta_file = tmp_path / "theta.txt"
        theta = [0.3, 1.2, 2.5]
        theta_file.write_text("\n".join(str(t) for t in theta))
        capsys.readouterr()
        assert run("expect", "--in", circ, "--theta", theta_file, "--qubit", "0") == 0
        printed = float(capsys.readouterr().out.strip())
        assert printed == pytest.approx(expect_z(bind(build_ttn(2, 1), theta), 0))


class TestGradvarCommand:
    def test_all_angles_matches_library(self, tmp_path, capsys):
        circ = tmp_path / "c.txt"
        run("build", "--ansatz", "real_amplitudes", "--qubits", "2", "--reps", "1", "--out", circ)
        capsys.readouterr()
        assert run("gradvar", "--in", circ, "--samples", "60", "--seed", "5") == 0
        payload = json.loads(capsys.readouterr().out)
        expected = grad_variance(free_all_angles(load_circuit(circ)), 60, 5, 0)
        assert payload["grad_var"] == pytest.approx(expected.grad_var)
        assert payload["samples"] == 60
        assert payload["stderr"] == pytest.approx(expected.stderr)

    def test_symbol_derived_with_provenance(self, tmp_path, capsys):
        circ, phys, prov = tmp_path / "c.txt", tmp_path / "p.txt", tmp_path / "prov.json"
        run("build", "--ansatz", "real_amplitudes", "--qubits", "2", "--reps", "1", "--out", circ)
        run("transpile", "--in", circ, "--backend", "line:2", "--out", phys, "--provenance", prov)
        capsys.readouterr()
        t = transpile(load_circuit(circ), make_line(2))
        code = run(
            "gradvar", "--in", phys, "--mode", "symbol-derived", "--provenance", prov,
            "--samples", "60", "--seed", "5", "--cost-qubit", t.cost_qubit,
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        expected = grad_variance(reparameterize(t, ReparamMode.SYMBOL_DERIVED), 60, 5, t.cost_qubit)
        assert payload["grad_var"] == pytest.approx(expected.grad_var)


class TestSweepCommand:
    def test_end_to_end_outputs(self, tmp_path, capsys):
        config = {
            "ansatz": ["real_amplitudes"],
            "qubits": [2, 3],
            "reps": [1],
            "samples": 30,
            "base_seed": 3,
            "backend": "line:3",
        }
        config_path = tmp_path / "sweep.json"
        config_path.write_text(json.dumps(config))
        csv_path = tmp_path / "results.csv"
        out_dir = tmp_path / "maps"
        code = run("sweep", "--config", config_path, "--out-csv", csv_path, "--out-dir", out_dir)
        assert code == 0
        records = read_csv(csv_path)
        assert len(records) == 2
        svg = out_dir / "delta_gradvar_real_amplitudes.svg"
        assert svg.exists()
        ET.parse(svg)
        assert (tmp_path / "results.jsonl").exists()
        out = capsys.readouterr().out
        assert "[2/2]" in out

    def test_missing_config_fails(self, tmp_path, capsys):
        assert run("sweep", "--config", tmp_path / "nope.json") == 1
        assert "error:" in capsys.readouterr().err
