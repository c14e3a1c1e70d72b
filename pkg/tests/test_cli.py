import json
import math

import numpy as np
import pytest

from qwlab import cli, markov
from qwlab.numkernel import SeededRng
from qwlab.walksim.instances import (
    grouped_matrix_set,
    planted_collision_function,
    save_function_instance,
    save_matrix_set,
    verification_triple,
)


def run(argv):
    return cli.main(argv)


def load(path):
    with open(path) as fh:
        return json.load(fh)


@pytest.fixture
def two_state_file(tmp_path):
    p = markov.TransitionMatrix([[0.5, 0.5], [0.5, 0.5]])
    path = tmp_path / "two.json"
    markov.save_chain(path, p, markov.MarkedSet([1], 2))
    return str(path)


class TestJohnson:
    def test_spectrum_report(self, tmp_path):
        out = tmp_path / "report.json"
        chain = tmp_path / "chain.json"
        code = run(["johnson", "4", "2", "--seed", "1", "--out", str(out), "--chain-out", str(chain)])
        assert code == 0
        report = load(out)
        spectrum = [(e["value"], e["multiplicity"]) for e in report["adjacency_eigenvalues"]]
        assert spectrum == [(4, 1), (0, 3), (-2, 2)]
        p, marked = markov.load_chain(chain)
        assert p.n_states == 6 and marked.is_empty

    def test_three_one_chain_file(self, tmp_path):
        chain = tmp_path / "chain.json"
        assert run(["johnson", "3", "1", "--seed", "1", "--chain-out", str(chain), "--out", "-"]) == 0
        p, _ = markov.load_chain(chain)
        assert np.allclose(p.probs, (np.ones((3, 3)) - np.eye(3)) / 2.0)

    def test_invalid_sizes_exit_code(self, capsys):
        assert run(["johnson", "4", "4", "--seed", "1"]) == cli.EXIT_INPUT
        assert "error" in capsys.readouterr().err


class TestHit:
    def test_two_state_report(self, two_state_file, tmp_path):
        out = tmp_path / "hit.json"
        code = run(["hit", two_state_file, "--seed", "2", "--trials", "20000", "--out", str(out)])
        assert code == 0
        report = load(out)
        assert report["exact"] == pytest.approx(1.0)
        assert report["agreement"]["exact_vs_spectral"] is True
        assert report["agreement"]["mc_within_3_sigma"] is True

    def test_start_on_marked(self, two_state_file, tmp_path):
        out = tmp_path / "hit.json"
        run(["hit", two_state_file, "--start", "state:1", "--seed", "2", "--trials", "1000", "--out", str(out)])
        report = load(out)
        assert report["exact"] == 0.0
        assert report["monte_carlo"]["mean"] == 0.0

    def test_empty_marked_sentinel(self, tmp_path, capsys):
        p = markov.TransitionMatrix([[0.5, 0.5], [0.5, 0.5]])
        path = tmp_path / "chain.json"
        markov.save_chain(path, p, markov.MarkedSet([], 2))
        out = tmp_path / "hit.json"
        assert run(["hit", str(path), "--seed", "2", "--out", str(out)]) == 0
        assert "infinite" in capsys.readouterr().err
        assert load(out)["exact"] == "infinite"


class TestSzegedy:
    def test_full_report(self, two_state_file, tmp_path):
        out = tmp_path / "sz.json"
        code = run(["szegedy", two_state_file, "--seed", "3", "--trials", "20000", "--out", str(out)])
        assert code == 0
        report = load(out)
        assert report["singular_values"] == [1.0, 0.5]
        assert report["t_bound"] == 96
        assert report["avg_deviation"] >= (48 / 25) * 0.5
        assert report["detection"]["total"] >= 0.7
        assert len(report["eigenphases"]) == 4
        assert report["seed"] == 3

    def test_budget_guard(self, tmp_path):
        p = markov.build_johnson_walk(8, 2)
        path = tmp_path / "big.json"
        markov.save_chain(path, p, markov.MarkedSet([0], p.n_states))
        assert run(["szegedy", str(path), "--seed", "1", "--max-states", "10"]) == cli.EXIT_INPUT

    def test_unmarked_chain_has_infinite_deviation_bound(self, tmp_path):
        p = markov.TransitionMatrix([[0.5, 0.5], [0.5, 0.5]])
        path = tmp_path / "plain.json"
        markov.save_chain(path, p, markov.MarkedSet([], 2))
        out = tmp_path / "sz.json"
        assert run(["szegedy", str(path), "--seed", "4", "--trials", "1000", "--out", str(out)]) == 0
        report = load(out)
        assert report["deviation_bound"] == "infinite"
        assert report["detection"]["total"] == 0.0


class TestSimulate:
    def test_ed_run(self, tmp_path):
        values, _ = planted_collision_function(10, SeededRng(5))
        inst = tmp_path / "ed.json"
        save_function_instance(inst, values)
        out = tmp_path / "report.json"
        code = run(
            ["simulate", "ed", str(inst), "--r", "3", "--steps", "50", "--trials", "20",
             "--seed", "6", "--out", str(out)]
        )
        assert code == 0
        report = load(out)
        assert report["trials"] == 20
        assert all(r["queries_used"] == 3 + r["steps_taken"] for r in report["reports"])

    def test_verify_clean_instance(self, tmp_path):
        inst_path = tmp_path / "mv.json"
        save_matrix_set(inst_path, verification_triple(5, SeededRng(7)))
        out = tmp_path / "report.json"
        code = run(
            ["simulate", "verify", str(inst_path), "--r", "2", "--steps", "10",
             "--trials", "10", "--seed", "8", "--out", str(out)]
        )
        assert code == 0
        report = load(out)
        assert report["found_count"] == 0
        setup, per_step = 2 * 2 * 5 + 4, 2 * 5 + 4 * 2
        assert report["mean_queries"] == setup + 10 * per_step

    def test_promise_violation_exit_code(self, tmp_path):
        inst = grouped_matrix_set(2, 2, 4, SeededRng(9), violation=True)
        bad = [m.copy() for m in inst.matrices]
        bad[0] = np.diag(np.arange(1, 5)).astype(np.int64)
        bad[1] = bad[0].copy()
        bad[1][0, 1] = 3
        inst.matrices = bad
        path = tmp_path / "grp.json"
        save_matrix_set(path, inst)
        code = run(
            ["simulate", "threeparam", str(path), "--r", "2", "--s", "2", "--t", "2",
             "--steps", "5", "--trials", "1", "--seed", "10"]
        )
        assert code == cli.EXIT_INPUT

    def test_jobs_do_not_change_results(self, tmp_path):
        inst_path = tmp_path / "mv.json"
        save_matrix_set(inst_path, verification_triple(4, SeededRng(11), defect=True))
        outs = []
        for jobs in ("1", "3"):
            out = tmp_path / f"r{jobs}.json"
            run(["simulate", "verify", str(inst_path), "--r", "2", "--steps", "15",
                 "--trials", "30", "--seed", "12", "--jobs", jobs, "--out", str(out)])
            report = load(out)
            del report["manifest"]
            outs.append(report)
        assert outs[0] == outs[1]


class TestCost:
    def test_single_optimization(self, tmp_path):
        out = tmp_path / "cost.json"
        assert run(["cost", "ed", "--param", "n=1000000", "--seed", "1", "--out", str(out)]) == 0
        report = load(out)
        assert report["best_sizes"]["r"] == pytest.approx((1e6 / 2) ** (2 / 3), rel=0.01)
        assert report["boundary"] is False

    def test_sweep_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = run(
            ["cost", "ed", "--sweep", "n", "1e4", "1e6", "6", "--seed", "1",
             "--format", "csv", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "model,param,value,t,r,s,cost,boundary"
        assert len(lines) == 7

    def test_unknown_model_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            run(["cost", "bogus", "--seed", "1"])
        assert err.value.code == 2


class TestAdversary:
    def test_search_report(self, tmp_path):
        out = tmp_path / "adv.json"
        assert run(["adversary", "search", "--size", "n=5", "--seed", "1", "--out", str(out)]) == 0
        report = load(out)
        assert report["m"] == 1 and report["m_prime"] == 5 and report["l"] == 1
        assert report["bound"] == pytest.approx(math.sqrt(5))
        assert report["verified_by_enumeration"] is True
        assert report["exact"] == {"m": 1, "m_prime": 5, "l": 1}


class TestReproducibility:
    def test_byte_identical_reruns(self, two_state_file, tmp_path):
        argv_template = ["szegedy", two_state_file, "--seed", "42", "--trials", "5000"]
        paths = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            run(argv_template + ["--out", str(out)])
            paths.append(out.read_bytes())
        # manifests embed the out path, so compare with it normalized
        a = paths[0].replace(b"a.json", b"x.json")
        b = paths[1].replace(b"b.json", b"x.json")
        assert a == b

    def test_missing_seed_drawn_and_echoed(self, two_state_file, tmp_path, capsys):
        out = tmp_path / "r.json"
        run(["hit", two_state_file, "--trials", "100", "--out", str(out)])
        err = capsys.readouterr().err
        assert "seed drawn from entropy" in err
        assert load(out)["manifest"]["seed"] >= 0
