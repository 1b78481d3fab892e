import json
import os
from pathlib import Path

import pytest

from rwre_lab.cli import main


def write_config(tmp_path: Path, name: str, cfg: dict) -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(cfg, indent=1))
    return path


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


def simulate_config(**overrides) -> dict:
    cfg = {
        "experiment": "simulate",
        "dimension": 2,
        "master_seed": 777,
        "n_walks": 10,
        "horizon": 40,
        "model": {"kind": "homogeneous", "probs": [0.4, 0.1, 0.25, 0.25]},
    }
    cfg.update(overrides)
    return cfg


class TestRun:
    def test_simulate_writes_rows_and_manifest(self, tmp_path):
        cfg = write_config(tmp_path, "sim.json", simulate_config())
        out = tmp_path / "out"
        assert run_cli("run", "--config", cfg, "--out", out) == 0
        rows = [json.loads(l) for l in (out / "results.jsonl").read_text().splitlines()]
        assert len(rows) == 10
        assert all(r["record"] == "trajectory" for r in rows)
        assert all("config_hash" in r for r in rows)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["master_seed"] == 777
        assert "results.jsonl" in manifest["outputs"]

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, "sim.json", simulate_config())
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert run_cli("run", "--config", cfg, "--out", out_a) == 0
        assert run_cli("run", "--config", cfg, "--out", out_b) == 0
        assert (out_a / "results.jsonl").read_bytes() == (out_b / "results.jsonl").read_bytes()

    def test_thread_count_does_not_change_output(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "dir.json",
            {
                "experiment": "direction",
                "dimension": 2,
                "master_seed": 4242,
                "n_walks": 120,
                "horizon": 1200,
                "confirm_horizon": 120,
                "model": {"kind": "homogeneous", "probs": [0.4, 0.1, 0.25, 0.25]},
                "l": [1, 0],
                "cone": {"sigma": [1, 1], "basis": [[1, 1], [1, -1]], "l": [1, 0], "lambda": "1/2"},
            },
        )
        out_a, out_b = tmp_path / "t1", tmp_path / "t8"
        assert run_cli("run", "--config", cfg, "--out", out_a, "--threads", 1) == 0
        assert run_cli("run", "--config", cfg, "--out", out_b, "--threads", 8) == 0
        assert (out_a / "results.jsonl").read_bytes() == (out_b / "results.jsonl").read_bytes()

    def test_seed_override_changes_results(self, tmp_path):
        cfg = write_config(tmp_path, "sim.json", simulate_config())
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert run_cli("run", "--config", cfg, "--out", out_a) == 0
        assert run_cli("run", "--config", cfg, "--out", out_b, "--seed", 778) == 0
        assert (out_a / "results.jsonl").read_bytes() != (out_b / "results.jsonl").read_bytes()

    def test_unknown_key_exits_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "bad.json", simulate_config(typo_key=1))
        assert run_cli("run", "--config", cfg, "--out", tmp_path / "o") == 2
        assert "typo_key" in capsys.readouterr().err

    def test_unknown_nested_key_exits_2(self, tmp_path, capsys):
        bad = simulate_config()
        bad["model"]["probz"] = [1]
        cfg = write_config(tmp_path, "bad.json", bad)
        assert run_cli("run", "--config", cfg, "--out", tmp_path / "o") == 2
        assert "probz" in capsys.readouterr().err

    def test_invalid_json_diagnostic(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"experiment": "simulate",\n  "oops\n}')
        assert run_cli("run", "--config", path, "--out", tmp_path / "o") == 2
        assert "line" in capsys.readouterr().err

    def test_oracle_compare_slab(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "oracle.json",
            {
                "experiment": "oracle-compare",
                "dimension": 1,
                "master_seed": 11,
                "n_walks": 20000,
                "horizon": 2000,
                "model": {"kind": "homogeneous", "probs": [0.7, 0.3]},
                "oracle": {
                    "region": {"kind": "interval", "lo": -2, "hi": 2},
                    "target_class": "Right",
                    "n_env": 1,
                },
            },
        )
        out = tmp_path / "out"
        assert run_cli("run", "--config", cfg, "--out", out) == 0
        rows = [json.loads(l) for l in (out / "results.jsonl").read_text().splitlines()]
        row = rows[0]
        assert abs(row["exact_mean"] - 49 / 58) < 1e-9
        assert abs(row["closed_form_right"] - 49 / 58) < 1e-12
        assert row["agree_3sigma"] is True

    def test_insufficient_data_exits_3(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "scan.json",
            {
                "experiment": "renewal-identity",
                "dimension": 2,
                "master_seed": 5,
                "n_walks": 40,
                "horizon": 1500,
                "confirm_horizon": 500,
                "model": {"kind": "homogeneous", "probs": [0.25, 0.25, 0.25, 0.25]},
                "cone": {"sigma": [1, 1], "basis": [[1, 1], [1, -1]], "l": [1, 0], "lambda": "scan"},
            },
        )
        out = tmp_path / "out"
        assert run_cli("run", "--config", cfg, "--out", out) == 3
        rows = [json.loads(l) for l in (out / "results.jsonl").read_text().splitlines()]
        assert any(r.get("insufficient_data") for r in rows)

    def test_slab_curves_csv(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "slab.json",
            {
                "experiment": "slab",
                "dimension": 1,
                "master_seed": 6,
                "n_walks": 2000,
                "horizon": 5000,
                "model": {"kind": "homogeneous", "probs": [0.6, 0.4]},
                "slab": {"l_prime": [1.0], "b": 1.0, "L_list": [2, 4]},
            },
        )
        out = tmp_path / "out"
        assert run_cli("run", "--config", cfg, "--out", out) == 0
        lines = (out / "curves.csv").read_text().splitlines()
        assert lines[0] == "L,p_left,ci_low,ci_high"
        assert len(lines) == 3


class TestCompare:
    def make_results(self, tmp_path) -> Path:
        out = tmp_path / "res"
        cfg = write_config(tmp_path, "sim.json", simulate_config(n_walks=4))
        assert run_cli("run", "--config", cfg, "--out", out) == 0
        return out / "results.jsonl"

    def test_file_vs_itself(self, tmp_path):
        res = self.make_results(tmp_path)
        assert run_cli("compare", res, res) == 0

    def test_perturbed_file_diffs(self, tmp_path, capsys):
        res = self.make_results(tmp_path)
        rows = [json.loads(l) for l in res.read_text().splitlines()]
        rows[1]["final"][0] += 1
        other = tmp_path / "perturbed.jsonl"
        other.write_text("\n".join(json.dumps(r, sort_keys=True) for r in rows) + "\n")
        assert run_cli("compare", res, other) == 1
        assert "final" in capsys.readouterr().out

    def test_tolerance_allows_drift(self, tmp_path):
        res = self.make_results(tmp_path)
        rows = [json.loads(l) for l in res.read_text().splitlines()]
        rows[0]["final"][0] += 1
        other = tmp_path / "close.jsonl"
        other.write_text("\n".join(json.dumps(r, sort_keys=True) for r in rows) + "\n")
        assert run_cli("compare", res, other, "--tol", "final=2") == 0

    def test_schema_mismatch_exits_2(self, tmp_path, capsys):
        res = self.make_results(tmp_path)
        rows = [json.loads(l) for l in res.read_text().splitlines()]
        rows[0].pop("final")
        other = tmp_path / "schema.jsonl"
        other.write_text("\n".join(json.dumps(r, sort_keys=True) for r in rows) + "\n")
        assert run_cli("compare", res, other) == 2
        assert "schema mismatch" in capsys.readouterr().err


class TestSeedStability:
    def test_direction_agrees_across_seeds(self, tmp_path):
        import numpy as np

        cfg = write_config(
            tmp_path,
            "dir.json",
            {
                "experiment": "direction",
                "dimension": 2,
                "master_seed": 100,
                "n_walks": 200,
                "horizon": 2500,
                "confirm_horizon": 250,
                "model": {"kind": "homogeneous", "probs": [0.4, 0.1, 0.25, 0.25]},
                "l": [1, 0],
                "cone": {"sigma": [1, 1], "basis": [[1, 1], [1, -1]], "l": [1, 0], "lambda": "1/2"},
            },
        )
        nus = []
        for seed, out in ((100, tmp_path / "a"), (200, tmp_path / "b")):
            assert run_cli("run", "--config", cfg, "--out", out, "--seed", seed) == 0
            rows = [json.loads(l) for l in (out / "results.jsonl").read_text().splitlines()]
            nus.append(
                next(np.asarray(r["nu_hat"]) for r in rows if r["record"] == "direction-raw-limit")
            )
        cos = float(nus[0] @ nus[1]) / (np.linalg.norm(nus[0]) * np.linalg.norm(nus[1]))
        assert np.arccos(np.clip(cos, -1, 1)) < 0.05


class TestMisc:
    def test_schema_prints_json(self, capsys):
        assert run_cli("schema") == 0
        schema = json.loads(capsys.readouterr().out)
        assert "experiment" in schema

    def test_env_var_threads(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RWRE_LAB_THREADS", "2")
        cfg = write_config(tmp_path, "sim.json", simulate_config(n_walks=3))
        out = tmp_path / "out"
        assert run_cli("run", "--config", cfg, "--out", out) == 0
        monkeypatch.setenv("RWRE_LAB_THREADS", "zebra")
        assert run_cli("run", "--config", cfg, "--out", out) == 2
