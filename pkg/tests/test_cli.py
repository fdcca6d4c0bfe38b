"""Command-line interface: exit codes, output layout, determinism."""

import json
from pathlib import Path

import pytest

from hyperbalance.cli import main

FIG_JSON = '{"n": 4, "edges": [[0, 1, 2], [1, 3], [2, 3]]}'
P_JSON = ('{"types": [{"counts": {"2": 1}, "p": 0.5},'
          ' {"counts": {"2": 2}, "p": 0.5}]}')


@pytest.fixture
def files(tmp_path):
    h = tmp_path / "H.json"
    h.write_text(FIG_JSON)
    p = tmp_path / "P.json"
    p.write_text(P_JSON)
    return tmp_path, str(h), str(p)


def tree(root: Path):
    return sorted(str(f.relative_to(root)) for f in root.rglob("*") if f.is_file())


class TestBalanceCommand:
    def test_outputs(self, files):
        tmp, h, _ = files
        out = tmp / "out"
        assert main(["balance", h, "--out", str(out), "--tag", "x"]) == 0
        run = out / "balance" / "x"
        assert {"allocation.json", "loads.json", "report.json",
                "manifest.json"} <= {f.name for f in run.iterdir()}
        loads = json.loads((run / "loads.json").read_text())["loads"]
        assert all(abs(v - 0.75) < 1e-7 for v in loads)
        report = json.loads((run / "report.json").read_text())
        assert report["converged"] and report["max_violation"] < 1e-8

    def test_epsilon_mode(self, files):
        tmp, h, _ = files
        out = tmp / "out"
        assert main(["balance", h, "--eps", "0.5", "--out", str(out),
                     "--tag", "e"]) == 0
        report = json.loads((out / "balance/e/report.json").read_text())
        assert report["mode"] == "epsilon"

    def test_nonconvergence_exit_2(self, files):
        tmp, h, _ = files
        assert main(["balance", h, "--tol", "1e-15", "--max-iters", "1",
                     "--out", str(tmp / "o"), "--tag", "n"]) == 2

    def test_missing_file_exit_1(self, tmp_path):
        assert main(["balance", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o"), "--tag", "m"]) == 1

    def test_malformed_exit_1(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 2, "edges": [[0, 0]]}')
        assert main(["balance", str(bad), "--out", str(tmp_path / "o"),
                     "--tag", "m"]) == 1


class TestMaxloadCommand:
    @pytest.mark.parametrize("method", ["brute", "flow", "allocation"])
    def test_rho_agrees(self, files, method):
        tmp, h, _ = files
        out = tmp / "out"
        assert main(["maxload", h, "--method", method, "--out", str(out),
                     "--tag", method]) == 0
        res = json.loads((out / "maxload" / method / "result.json").read_text())
        assert res["rho"] == pytest.approx(0.75, abs=1e-6)


class TestSampleCommand:
    def test_config_erased(self, files):
        tmp, _, p = files
        out = tmp / "out"
        assert main(["sample", "--model", "config", "--dist", p, "--n", "30",
                     "--seed", "7", "--erase", "--out", str(out),
                     "--tag", "c"]) == 0
        obj = json.loads((out / "sample/c/hypergraph.json").read_text())
        assert obj["n"] == 30 and "multi" not in obj

    def test_config_multi_without_erase(self, files):
        tmp, _, p = files
        out = tmp / "out"
        main(["sample", "--model", "config", "--dist", p, "--n", "30",
              "--seed", "7", "--out", str(out), "--tag", "m"])
        obj = json.loads((out / "sample/m/hypergraph.json").read_text())
        assert obj.get("multi") is True

    def test_explicit_types(self, files):
        tmp, _, _ = files
        types = tmp / "types.json"
        types.write_text('{"types": [{"2": 1}, {"2": 1}, {"2": 2}, {"2": 2}]}')
        out = tmp / "out"
        assert main(["sample", "--model", "config", "--types", str(types),
                     "--seed", "1", "--out", str(out), "--tag", "t"]) == 0

    def test_ugwt(self, files):
        tmp, _, p = files
        out = tmp / "out"
        assert main(["sample", "--model", "ugwt", "--dist", p, "--depth", "2",
                     "--seed", "2", "--out", str(out), "--tag", "u"]) == 0

    def test_config_without_inputs_exit_1(self, files):
        tmp, _, _ = files
        assert main(["sample", "--model", "config", "--out",
                     str(tmp / "o"), "--tag", "z"]) == 1


class TestRdeCommand:
    def test_single_t(self, files):
        tmp, _, p = files
        out = tmp / "out"
        assert main(["rde", p, "--t", "0.3", "--pool-size", "3000",
                     "--iterations", "40", "--eval-samples", "5000",
                     "--out", str(out), "--tag", "r"]) == 0
        obj = json.loads((out / "rde/r/phi.json").read_text())
        assert set(obj) == {"t", "phi", "stderr", "term1", "term2"}

    def test_grid_csv(self, files):
        tmp, _, p = files
        out = tmp / "out"
        assert main(["rde", p, "--t-grid", "0.0", "0.6", "3",
                     "--pool-size", "2000", "--iterations", "30",
                     "--eval-samples", "4000", "--out", str(out),
                     "--tag", "g"]) == 0
        lines = (out / "rde/g/phi.csv").read_text().splitlines()
        assert lines[0].startswith("# seed=")
        assert lines[1] == "t,phi,stderr,term1,term2"
        assert len(lines) == 5

    def test_requires_mode_exit_1(self, files):
        tmp, _, p = files
        assert main(["rde", p, "--out", str(tmp / "o"), "--tag", "x"]) == 1


class TestDeterminism:
    def test_byte_identical_reruns(self, files):
        tmp, _, p = files
        args = ["lwc", p, "--n-grid", "40", "--reps", "2", "--depth", "1",
                "--ugwt-samples", "500", "--seed", "3", "--tag", "d"]
        for out in ("o1", "o2"):
            assert main(args + ["--out", str(tmp / out)]) == 0
        f1 = tree(tmp / "o1")
        assert f1 == tree(tmp / "o2")
        for rel in f1:
            assert (tmp / "o1" / rel).read_bytes() == (tmp / "o2" / rel).read_bytes()

    def test_seed_env_fallback(self, files, monkeypatch):
        tmp, _, p = files
        monkeypatch.setenv("HYPERBALANCE_SEED", "11")
        assert main(["sample", "--model", "config", "--dist", p, "--n", "20",
                     "--erase", "--out", str(tmp / "a"), "--tag", "s"]) == 0
        monkeypatch.delenv("HYPERBALANCE_SEED")
        assert main(["sample", "--model", "config", "--dist", p, "--n", "20",
                     "--seed", "11", "--erase", "--out", str(tmp / "b"),
                     "--tag", "s"]) == 0
        a = (tmp / "a/sample/s/hypergraph.json").read_bytes()
        b = (tmp / "b/sample/s/hypergraph.json").read_bytes()
        assert a == b

    def test_manifest_records_config_not_location(self, files):
        tmp, h, _ = files
        main(["balance", h, "--out", str(tmp / "o"), "--tag", "m"])
        manifest = json.loads((tmp / "o/balance/m/manifest.json").read_text())
        assert manifest["command"] == "balance"
        assert "out" not in manifest["config"]
        assert manifest["config"]["tol"] == 1e-10


class TestUsage:
    def test_unknown_command(self):
        assert main(["frobnicate"]) == 1

    def test_no_args(self):
        assert main([]) == 1
