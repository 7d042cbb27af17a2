"""End-to-end tests of the command-line surface.

Commands are invoked in-process through ``cli.main`` (it returns the exit
code); one subprocess smoke test covers the installed entry point.
"""

import subprocess
import sys

import numpy as np
import pytest

from wsnec import cli
from wsnec.config import sample_config
from wsnec.energy_core import Constituent
from wsnec.traceio import (
    read_coefficients,
    read_observations,
    read_trace,
    write_trace,
)
from wsnec.simulator import Phase, SliceRecord
from wsnec.energy_core import ConstituentFlowVector

MINIMAL = "[sim]\nseed = 5\nnodes = 2\ntotal_slices = 12\n"


def write_cfg(tmp_path, text, name="scenario.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestSimulate:
    def test_minimal_two_node_scenario(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, MINIMAL)
        out = tmp_path / "trace.csv"
        assert cli.main(["simulate", "--config", cfg, "--output", str(out)]) == 0
        assert "seed: 5" in capsys.readouterr().out
        records = read_trace(str(out))
        assert len(records) == 12
        assert records[0].alive_nodes == 2

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = write_cfg(tmp_path, MINIMAL)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["simulate", "--config", cfg, "--output", str(a)]) == 0
        assert cli.main(["simulate", "--config", cfg, "--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_boundary_violation_exit_code_and_message(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "[sim]\nseed = 1\nnodes = 2\nr_sense = 0\n")
        out = tmp_path / "trace.csv"
        assert cli.main(["simulate", "--config", cfg, "--output", str(out)]) == 1
        assert "r_sense > 0" in capsys.readouterr().err

    def test_seed_override_changes_trace(self, tmp_path):
        cfg = write_cfg(tmp_path, MINIMAL)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["simulate", "--config", cfg, "--output", str(a)])
        cli.main(["simulate", "--config", cfg, "--output", str(b), "--seed", "99"])
        assert a.read_bytes() != b.read_bytes()


class TestFit:
    def _exact_trace(self, tmp_path, alpha=(2e-4, 1e-4, 3e-4)):
        rng = np.random.default_rng(11)
        records = []
        for i in range(40):
            flows = ConstituentFlowVector(*rng.uniform(1, 50, size=3), 0.0, 0.0)
            energy = float(np.dot(alpha, flows.as_tuple()[:3]))
            records.append(SliceRecord(i, 1.0, Phase.COLLECTION, flows, energy, 5))
        path = tmp_path / "exact.csv"
        write_trace(str(path), records)
        return str(path)

    def test_exact_linear_trace_has_zero_mape(self, tmp_path, capsys):
        trace = self._exact_trace(tmp_path)
        report = tmp_path / "report.csv"
        assert cli.main(["fit", "--input", trace, "--output", str(report)]) == 0
        out = capsys.readouterr().out
        mape = float(out.split("MAPE: ")[1].split("%")[0])
        assert mape < 0.001
        coeffs = read_coefficients(str(report))
        assert coeffs.alpha[:3] == pytest.approx((2e-4, 1e-4, 3e-4), rel=1e-6)

    def test_default_trace_dominant_is_global(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "[sim]\nseed = 1\nnodes = 25\n")
        trace = tmp_path / "trace.csv"
        cli.main(["simulate", "--config", cfg, "--output", str(trace)])
        report = tmp_path / "report.csv"
        assert cli.main(["fit", "--input", str(trace), "--output", str(report),
                         "--fit-fraction", "0.7"]) == 0
        assert "dominant constituent: global" in capsys.readouterr().out
        assert "global" in report.read_text().rstrip().splitlines()[-1]

    def test_rank_error_names_columns_exit_2(self, tmp_path, capsys):
        trace = self._exact_trace(tmp_path)
        report = tmp_path / "report.csv"
        code = cli.main(["fit", "--input", trace, "--output", str(report),
                         "--mask", "individual,local,global,environment,snk"])
        assert code == 2
        err = capsys.readouterr().err
        assert "b_environment" in err and "b_snk" in err

    def test_rolling_window_report(self, tmp_path):
        trace = self._exact_trace(tmp_path)
        report = tmp_path / "rolling.csv"
        assert cli.main(["fit", "--input", trace, "--output", str(report),
                         "--window", "10"]) == 0
        text = report.read_text()
        assert text.startswith("window_start,window_stop,constituent,alpha")
        assert "skipped_windows" in text

    def test_bad_mask_rejected(self, tmp_path):
        trace = self._exact_trace(tmp_path)
        assert cli.main(["fit", "--input", trace, "--output",
                         str(tmp_path / "r.csv"), "--mask", "bogus"]) == 1


class TestSweep:
    def test_single_run_matches_simulate_aggregation(self, tmp_path):
        # a sweep with no ranges and one run is the plain scenario, aggregated
        cfg = write_cfg(tmp_path, MINIMAL + "\n[sweep]\nruns = 1\n")
        obs_path = tmp_path / "obs.csv"
        assert cli.main(["sweep", "--config", cfg, "--output", str(obs_path)]) == 0
        obs = read_observations(str(obs_path), active=(True,) * 5)

        import random
        expected_seed = random.Random(5).getrandbits(32)
        trace = tmp_path / "trace.csv"
        cli.main(["simulate", "--config", write_cfg(tmp_path, MINIMAL, "plain.ini"),
                  "--output", str(trace), "--seed", str(expected_seed)])
        records = read_trace(str(trace))
        totals = np.array([r.flows.as_tuple() for r in records]).sum(axis=0)
        assert obs.flows[0] == pytest.approx(totals)
        assert obs.energy[0] == pytest.approx(sum(r.energy_j for r in records), rel=1e-12)

    def test_sweep_is_deterministic(self, tmp_path):
        cfg = write_cfg(tmp_path, sample_config())
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["sweep", "--config", cfg, "--output", str(a), "--runs", "3"]) == 0
        assert cli.main(["sweep", "--config", cfg, "--output", str(b), "--runs", "3"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_range_violating_boundary_rejected(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, MINIMAL + "\n[sweep]\nruns = 2\nr_sense = 0.0:5.0\n")
        assert cli.main(["sweep", "--config", cfg, "--output",
                         str(tmp_path / "o.csv")]) == 1
        assert "r_sense > 0" in capsys.readouterr().err


class TestBudget:
    TASKS = ("id,constituent,pf_size,importance,mandatory\n"
             "1,local,1,1.0,true\n"
             "2,global,1,1.0,true\n"
             "3,individual,2,5.0,false\n"
             "4,individual,3,4.0,false\n")
    MODEL = "constituent,alpha\nindividual,1.0\nlocal,1.0\nglobal,1.0\n"

    def _paths(self, tmp_path):
        tasks = tmp_path / "tasks.csv"
        tasks.write_text(self.TASKS)
        model = tmp_path / "model.csv"
        model.write_text(self.MODEL)
        return str(tasks), str(model), str(tmp_path / "schedule.csv")

    def test_feasible_schedule(self, tmp_path, capsys):
        tasks, model, out = self._paths(tmp_path)
        code = cli.main(["budget", "--tasks", tasks, "--model", model,
                         "--battery", "10.0", "--output", out])
        assert code == 0
        text = open(out).read()
        assert "true,exact-dp" in text

    def test_infeasible_exit_code_2_with_report(self, tmp_path, capsys):
        tasks, model, out = self._paths(tmp_path)
        code = cli.main(["budget", "--tasks", tasks, "--model", model,
                         "--battery", "1.5", "--output", out])
        assert code == 2
        assert "infeasible" in capsys.readouterr().err
        assert "false,exact-dp" in open(out).read()

    def test_worked_example_through_files(self, tmp_path):
        # optional costs 3,4,5,6 with importances 3,4,5,7 under a strict
        # budget of 10 for the optionals: {3,6} wins with importance 10
        tasks = tmp_path / "tasks.csv"
        tasks.write_text(
            "id,constituent,pf_size,importance,mandatory\n"
            "90,local,1,1.0,true\n"
            "91,global,1,1.0,true\n"
            "0,individual,3,3.0,false\n"
            "1,individual,4,4.0,false\n"
            "2,individual,5,5.0,false\n"
            "3,individual,6,7.0,false\n")
        model = tmp_path / "model.csv"
        model.write_text("constituent,alpha\nindividual,1.0\nlocal,0.5\nglobal,0.5\n")
        out = tmp_path / "schedule.csv"
        assert cli.main(["budget", "--tasks", str(tasks), "--model", str(model),
                         "--battery", "11.0", "--output", str(out)]) == 0
        body = out.read_text()
        schedule_rows = body.split("\n\n")[0].splitlines()[1:]
        chosen = {int(row.split(",")[1]) for row in schedule_rows}
        assert chosen == {90, 91, 0, 3}

    def test_missing_mandatory_pair_is_validation_error(self, tmp_path, capsys):
        tasks = tmp_path / "tasks.csv"
        tasks.write_text("id,constituent,pf_size,importance,mandatory\n"
                         "1,individual,1,1.0,true\n")
        model = tmp_path / "model.csv"
        model.write_text(self.MODEL)
        code = cli.main(["budget", "--tasks", str(tasks), "--model", str(model),
                         "--battery", "10.0", "--output", str(tmp_path / "s.csv")])
        assert code == 1


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "wsnec.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "simulate" in proc.stdout and "budget" in proc.stdout
