import csv
import json
import math

import numpy as np
import pytest

import spanlab as sl
from spanlab.cli import main
from spanlab.instances import load_instance, read_spanner_csv, schedule_sidecar_path


def run(args, capsys=None):
    code = main(args)
    return code


class TestExitCodes:
    def test_alg1_verify_final_ok(self, tmp_path, capsys):
        inst = tmp_path / "pts.json"
        assert run(["gen", "random", "--d", "2", "--n", "24", "--seed", "1",
                    "--out", str(inst)]) == 0
        out = tmp_path / "sp.csv"
        code = run(["alg1", "--eps", "0.25", "--input", str(inst),
                    "--verify", "final", "--out", str(out)])
        assert code == 0
        g = read_spanner_csv(out)
        assert g.edge_count > 0

    def test_usage_error_t_below_one(self, tmp_path, capsys):
        inst = tmp_path / "pts.json"
        run(["gen", "random", "--d", "2", "--n", "4", "--out", str(inst)])
        assert run(["greedy", "--t", "0.5", "--input", str(inst)]) == 1

    def test_usage_error_unknown_flag(self, capsys):
        assert run(["alg1", "--nonsense"]) == 1

    def test_generator_infeasibility_exit_3(self, tmp_path, capsys):
        assert run(["gen", "hypercube", "--d", "16", "--eps", "0.25",
                    "--size", "500", "--out", str(tmp_path / "h.json")]) == 3

    def test_lattice_bad_params_exit_3(self, tmp_path, capsys):
        assert run(["gen", "l1-lattice", "--d", "2", "--eps", "0.4",
                    "--out", str(tmp_path / "l.json")]) == 3

    def test_verify_failure_exit_2(self, tmp_path, capsys):
        inst = tmp_path / "pts.json"
        run(["gen", "random", "--d", "2", "--n", "16", "--seed", "3", "--out", str(inst)])
        sp = tmp_path / "sp.csv"
        assert run(["greedy", "--t", "3", "--input", str(inst), "--out", str(sp)]) == 0
        assert run(["verify", "--input", str(inst), "--spanner", str(sp),
                    "--bound", "3.0"]) == 0
        assert run(["verify", "--input", str(inst), "--spanner", str(sp),
                    "--bound", "1.0000001"]) == 2

    def test_alg1_rejects_l1_points(self, tmp_path, capsys):
        inst = tmp_path / "lat.json"
        run(["gen", "l1-lattice", "--d", "2", "--eps", "0.125", "--out", str(inst)])
        assert run(["alg1", "--eps", "0.25", "--input", str(inst)]) == 1

    def test_hst_rejects_non_ultrametric(self, tmp_path, capsys):
        inst = tmp_path / "pts.json"
        run(["gen", "random", "--d", "2", "--n", "8", "--out", str(inst)])
        assert run(["hst", "--alpha", "2", "--input", str(inst)]) == 1

    def test_config_echoed_to_stderr(self, tmp_path, capsys):
        inst = tmp_path / "pts.json"
        run(["gen", "random", "--d", "2", "--n", "4", "--out", str(inst)])
        capsys.readouterr()
        run(["greedy", "--t", "2", "--input", str(inst), "--out", str(tmp_path / "s.csv")])
        err = capsys.readouterr().err
        assert err.startswith("config: ")


class TestGenOutputs:
    def test_lattice_sidecar(self, tmp_path):
        inst = tmp_path / "lat.json"
        run(["gen", "l1-lattice", "--d", "2", "--eps", "0.125", "--out", str(inst)])
        assert schedule_sidecar_path(inst).exists()
        bundle = load_instance(inst)
        assert bundle.schedule is not None and len(bundle.schedule) == 16
        assert bundle.meta["generator"] == "l1-lattice"

    def test_girth_star_matrix(self, tmp_path, capsys):
        inst = tmp_path / "g.json"
        run(["gen", "girth", "--graph", "heawood", "--k", "2", "--star",
             "--out", str(inst)])
        bundle = load_instance(inst)
        assert bundle.kind == "matrix" and bundle.n == 15
        assert bundle.schedule[-1] == 1
        assert sl.validate_metric(bundle.metric()) == []

    def test_random_hst_round_trip(self, tmp_path):
        inst = tmp_path / "h.json"
        run(["gen", "random-hst", "--n", "12", "--seed", "2", "--out", str(inst)])
        bundle = load_instance(inst)
        assert bundle.kind == "hst" and bundle.n == 12
        assert sl.ultrametric_violations(bundle.metric()) == []

    def test_stdout_emission(self, tmp_path, capsys):
        assert run(["gen", "random", "--d", "2", "--n", "3", "--seed", "0"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["kind"] == "points" and len(payload["points"]) == 3


class TestRunOutputs:
    def test_spanner_csv_stdout(self, tmp_path, capsys):
        inst = tmp_path / "pts.json"
        run(["gen", "random", "--d", "2", "--n", "8", "--out", str(inst)])
        capsys.readouterr()
        assert run(["greedy", "--t", "2", "--input", str(inst)]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "u,v,w" and len(lines) > 1

    def test_json_format(self, tmp_path, capsys):
        inst = tmp_path / "pts.json"
        run(["gen", "random", "--d", "2", "--n", "6", "--out", str(inst)])
        capsys.readouterr()
        assert run(["greedy", "--t", "2", "--input", str(inst), "--format", "json"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert isinstance(rows, list) and {"u", "v", "w"} <= set(rows[0])

    def test_alg1_trace(self, tmp_path, capsys):
        inst = tmp_path / "pts.json"
        run(["gen", "random", "--d", "2", "--n", "12", "--seed", "5", "--out", str(inst)])
        trace = tmp_path / "trace.csv"
        assert run(["alg1", "--eps", "0.5", "--input", str(inst),
                    "--out", str(tmp_path / "sp.csv"), "--trace", str(trace)]) == 0
        with open(trace) as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["step", "level", "u", "v", "w"]
        assert len(rows) > 1

    def test_shuffle_reproducible(self, tmp_path, capsys):
        inst = tmp_path / "pts.json"
        run(["gen", "random", "--d", "2", "--n", "16", "--seed", "8", "--out", str(inst)])
        outs = []
        for _ in range(2):
            sp = tmp_path / "sp.csv"
            run(["greedy", "--t", "2", "--input", str(inst), "--shuffle", "42",
                 "--out", str(sp)])
            outs.append(sp.read_text())
        assert outs[0] == outs[1]

    def test_schedule_sidecar_orders_arrival(self, tmp_path, capsys):
        inst = tmp_path / "lat.json"
        run(["gen", "l1-lattice", "--d", "2", "--eps", "0.125", "--out", str(inst)])
        sp = tmp_path / "sp.csv"
        assert run(["greedy", "--t", "1.125", "--input", str(inst),
                    "--verify", "prefix", "--out", str(sp)]) == 0


class TestBenchCli:
    def test_single_spec(self, tmp_path, capsys):
        inst = tmp_path / "pts.json"
        run(["gen", "random", "--d", "2", "--n", "16", "--seed", "2", "--out", str(inst)])
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"instance": str(inst), "algorithm": "greedy", "t": 2.0}))
        out = tmp_path / "res.csv"
        assert run(["bench", "--spec", str(spec), "--out", str(out)]) == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0].startswith("#") and len(lines) == 3

    def test_grid_spec(self, tmp_path, capsys):
        inst = tmp_path / "pts.json"
        run(["gen", "random", "--d", "2", "--n", "12", "--seed", "2", "--out", str(inst)])
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "template": {"instance": str(inst), "algorithm": "greedy", "t": 2.0},
            "grid": {"t": [1.5, 2.5, 4.0]},
        }))
        out = tmp_path / "res.csv"
        assert run(["bench", "--spec", str(spec), "--out", str(out)]) == 0
        assert len(out.read_text().strip().split("\n")) == 5


class TestRoundTripMatrix:
    """gen X | run Y | verify for every compatible pair in the documented matrix."""

    CASES = [
        (["gen", "random", "--d", "2", "--n", "20", "--seed", "4"], "alg1",
         ["--eps", "0.5"], 2.25),
        (["gen", "random", "--d", "3", "--n", "12", "--seed", "4"], "alg1",
         ["--eps", "0.5"], 2.25),
        (["gen", "random", "--d", "2", "--n", "20", "--seed", "4"], "greedy",
         ["--t", "2"], 2.0),
        (["gen", "l1-lattice", "--d", "2", "--eps", "0.125"], "greedy",
         ["--t", "1.125"], 1.125),
        (["gen", "girth", "--graph", "heawood", "--k", "2", "--star"], "greedy",
         ["--t", "3"], 3.0),
        (["gen", "hypercube", "--d", "64", "--eps", "0.4", "--size", "12",
          "--seed", "1"], "greedy", ["--t", "1.9"], 1.9),
        (["gen", "random-hst", "--n", "16", "--seed", "5"], "hst",
         ["--alpha", "2"], 8.0),
        (["gen", "random-hst", "--n", "16", "--seed", "5"], "hst2e",
         ["--eps", "0.25"], 3.5),
        (["gen", "random-hst", "--n", "16", "--seed", "5"], "greedy",
         ["--t", "2"], 2.0),
    ]

    @pytest.mark.parametrize("gen_args,alg,alg_args,bound", CASES)
    def test_round_trip(self, tmp_path, capsys, gen_args, alg, alg_args, bound):
        inst = tmp_path / "inst.json"
        assert run(gen_args + ["--out", str(inst)]) == 0
        sp = tmp_path / "sp.csv"
        assert run([alg, *alg_args, "--input", str(inst), "--verify", "prefix",
                    "--out", str(sp)]) == 0
        assert run(["verify", "--input", str(inst), "--spanner", str(sp),
                    "--bound", str(bound)]) == 0
