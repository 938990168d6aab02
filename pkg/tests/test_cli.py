import json

import pytest

from aadual.cli import main
from aadual.rng import SplitMix64


def write_config(tmp_path, **overrides):
    cfg = {
        "params": {"n": 2, "mu": 0.5, "u": -1.0, "v": 0.3},
        "seed": 42,
        "cases": 8,
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


class TestVerify:
    def test_default_config_passes(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["--config", cfg, "verify"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["all_passed"] is True
        names = {c["name"] for c in out["checks"]}
        assert {"admissibility", "round_trip", "hamiltonian_reduction"} <= names

    def test_equal_moduli_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, params={"n": 2, "mu": 0.5, "u": -1.0, "v": 1.0})
        assert main(["--config", cfg, "verify"]) == 2
        assert "|u| = |v|" in capsys.readouterr().err

    def test_unattainable_tolerance(self, tmp_path):
        cfg = write_config(tmp_path, tolerances={"iwasawa": 1e-30})
        assert main(["--config", cfg, "verify"]) == 1


class TestTriple:
    def test_vertex(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["--config", cfg, "triple", "--zeta", "0"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["residuals"]["passed"] is True
        lam = out["triple"]["lambda"]
        assert lam == pytest.approx([1.5, 1.0])

    def test_random_zeta(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["--config", cfg, "triple", "--zeta", "0.3+0.4j,-0.2+0.1j"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["residuals"]["max_residual"] < 1e-10

    def test_malformed(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["--config", cfg, "triple", "--zeta", "nope,1"]) == 2
        assert main(["--config", cfg, "triple", "--zeta", "0.1"]) == 2

    def test_non_section_params(self, tmp_path):
        cfg = write_config(tmp_path, params={"n": 2, "mu": 0.5, "u": 1.0, "v": 0.3})
        assert main(["--config", cfg, "triple", "--zeta", "0"]) == 2


class TestFlow:
    def test_action_flow_zero_drift(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out_csv = tmp_path / "traj.csv"
        rc = main(["--config", cfg, "flow", "--hamiltonian", "action:1",
                   "--zeta", "0.4+0.2j,0.5-0.1j", "--t1", "1.0", "--dt", "0.05",
                   "--out", str(out_csv)])
        assert rc == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["action_drift"] == 0.0
        assert summary["energy_drift"] < 1e-12
        lines = out_csv.read_text().strip().split("\n")
        assert lines[0].startswith("t,lambda_1")
        assert len(lines) == 22

    def test_main_flow(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out_csv = tmp_path / "traj.csv"
        rc = main(["--config", cfg, "flow", "--hamiltonian", "H",
                   "--init", "2.6,1.7,0.4,2.2", "--t1", "0.5", "--dt", "0.001",
                   "--out", str(out_csv), "--no-dual-actions"])
        assert rc == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["energy_drift"] < 1e-8
        times = [float(line.split(",")[0]) for line in out_csv.read_text().strip().split("\n")[1:]]
        assert all(b > a for a, b in zip(times, times[1:]))


class TestDuality:
    def test_report(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        rc = main(["--config", cfg, "duality", "--zeta", "0.5+0.1j,0.2-0.3j"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["max_residual"] < 1e-9
        assert len(out["lambda"]) == 2
        assert out["hat_lambda"][0] <= 0.0
        assert all(m >= -1e-10 for m in out["Z_moduli_squared"])

    def test_vertex_in_closed_hat_domain(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        rc = main(["--config", cfg, "duality", "--zeta", "0"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["lambda"] == pytest.approx([1.5, 1.0], abs=1e-9)
        h = out["hat_lambda"]
        assert h[0] <= 1e-10
        assert h[0] - h[1] >= 0.5 - 1e-10

    def test_byte_identical_output(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        main(["--config", cfg, "duality", "--zeta", "0.5+0.1j,0.2-0.3j"])
        first = capsys.readouterr().out
        main(["--config", cfg, "duality", "--zeta", "0.5+0.1j,0.2-0.3j"])
        second = capsys.readouterr().out
        assert first == second


class TestVdLimitAndSpectrum:
    def test_vdlimit_table(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        rc = main(["--config", cfg, "vdlimit", "--a=-10,-20", "--b", "10,20"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        errs = {(row["a"], row["b"]): row["error"] for row in out["table"]}
        assert errs[(-20.0, 20.0)] < 1e-6
        assert errs[(-20.0, 20.0)] < errs[(-10.0, 10.0)]

    def test_spectrum_lattice(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        rc = main(["--config", cfg, "spectrum", "--j", "1", "--max-occupation", "2"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["rows"]) == 9  # (2+1)^2
        ground = out["rows"][0]
        assert ground["occupations"] == [0, 0]
        assert all(row["energy"] >= ground["energy"] for row in out["rows"])


class TestGoldenRng:
    def test_seed_zero_stream(self):
        import pathlib

        golden = json.loads(
            (pathlib.Path(__file__).parent / "golden" / "splitmix64_seed0.json").read_text()
        )
        r = SplitMix64(0)
        assert [r.next_u64() for _ in range(10)] == golden["next_u64"]
        r = SplitMix64(0)
        assert [f"{r.uniform():.17g}" for _ in range(5)] == golden["uniform"]
        r = SplitMix64(0)
        assert [f"{r.normal():.17g}" for _ in range(5)] == golden["normal"]

    def test_reference_vector(self):
        # first output of the published splitmix64 stream for seed 0
        assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF
