import json
import subprocess
import sys

import pytest

from secperc.cli import main


def run_json(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    assert code == 0
    return json.loads(out)


class TestConvert:
    def test_biased_link(self, capsys):
        payload = run_json(["convert", "--p", "0.25"], capsys)
        assert payload["schema_version"] == 1
        assert payload["command"] == "convert"
        assert payload["config"]["p"] == 0.25
        assert payload["result"]["conversion_probability"] == pytest.approx(0.5, abs=1e-12)

    def test_already_unbiased(self, capsys):
        payload = run_json(["convert", "--p", "0.5"], capsys)
        assert payload["result"]["conversion_probability"] == 1.0
        assert payload["result"]["deterministic"]

    def test_explicit_vectors(self, capsys):
        payload = run_json(
            ["convert", "--from", "0.5625,0.1875,0.1875,0.0625", "--to", "0.5,0.5"], capsys
        )
        assert payload["result"]["conversion_probability"] == pytest.approx(0.875, abs=1e-12)

    def test_bad_vector_exits_2(self, capsys):
        assert main(["convert", "--from", "0.9,0.9"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_input_exits_2(self, capsys):
        assert main(["convert"]) == 2


class TestChain:
    def test_table(self, capsys):
        payload = run_json(["chain", "--n", "3", "--p", "0.25"], capsys)
        result = payload["result"]
        assert result["exact"] == pytest.approx(0.3125, abs=1e-12)
        assert result["upper_bound"] == pytest.approx(0.649519, abs=1e-6)
        assert result["naive"] == pytest.approx(0.125, abs=1e-12)

    def test_single_link_all_equal(self, capsys):
        result = run_json(["chain", "--n", "1", "--p", "0.25"], capsys)["result"]
        assert result["exact"] == result["naive"] == pytest.approx(0.5, abs=1e-12)

    def test_perfect_links(self, capsys):
        result = run_json(["chain", "--n", "5", "--p", "0.5"], capsys)["result"]
        assert result["exact"] == result["upper_bound"] == result["naive"] == 1.0

    def test_simulation_column(self, capsys):
        payload = run_json(
            ["chain", "--n", "3", "--p", "0.25", "--simulate", "20000", "--seed", "5"], capsys
        )
        assert abs(payload["result"]["simulated"] - 0.3125) < 0.02
        assert payload["config"]["trials"] == 20000

    def test_csv_format(self, capsys):
        code = main(["chain", "--n", "2", "--p", "0.1", "--format", "csv"])
        out = capsys.readouterr().out
        assert code == 0
        header, row = out.strip().splitlines()
        assert header.split(",")[:2] == ["n", "p"]
        assert row.split(",")[0] == "2"

    def test_invalid_p_exits_2(self, capsys):
        assert main(["chain", "--n", "3", "--p", "0.7"]) == 2


class TestPercolate:
    def test_raw_edge_probability(self, capsys):
        payload = run_json(
            ["percolate", "--family", "square", "--size", "12", "--p-edge", "1.0",
             "--trials", "32", "--seed", "3"],
            capsys,
        )
        assert payload["result"]["crossing_frequency"] == 1.0
        assert payload["result"]["cluster_samples"][0]["largest_fraction"] == 1.0

    def test_naive_strategy(self, capsys):
        payload = run_json(
            ["percolate", "--family", "honeycomb", "--size", "12", "--multiplicity", "2",
             "--p", "0.25", "--trials", "64", "--seed", "3"],
            capsys,
        )
        assert 0.0 <= payload["result"]["crossing_frequency"] <= 1.0

    def test_transform_strategy(self, capsys):
        payload = run_json(
            ["percolate", "--family", "honeycomb", "--size", "12", "--multiplicity", "2",
             "--p", "0.25", "--strategy", "transform", "--trials", "64", "--seed", "3"],
            capsys,
        )
        assert 0.0 <= payload["result"]["crossing_frequency"] <= 1.0

    def test_export_graph(self, tmp_path, capsys):
        path = tmp_path / "graph.txt"
        run_json(
            ["percolate", "--family", "square", "--size", "8", "--p-edge", "0.5",
             "--trials", "8", "--export-graph", str(path)],
            capsys,
        )
        text = path.read_text()
        assert text.startswith("node 0 ")
        assert "\nedge " in text

    def test_csv_rows(self, capsys):
        code = main(
            ["percolate", "--family", "square", "--size", "8", "--p-edge", "0.4",
             "--trials", "16", "--cluster-samples", "4", "--format", "csv"]
        )
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "trial,largest_fraction,n_clusters,spanning"
        assert len(lines) == 5

    def test_missing_probability_exits_2(self, capsys):
        assert main(["percolate", "--family", "square", "--size", "8"]) == 2


class TestThreshold:
    def test_small_square(self, capsys):
        payload = run_json(
            ["threshold", "--family", "square", "--sizes", "12,16", "--trials", "400",
             "--seed", "9"],
            capsys,
        )
        result = payload["result"]
        assert abs(result["p_c"] - 0.5) < 0.05
        assert result["half_width"] > 0
        assert result["sizes"] == [12, 16]
        assert len(result["sweep"]) == 2 * 21

    def test_csv_sweep(self, capsys):
        code = main(
            ["threshold", "--family", "square", "--sizes", "12", "--trials", "200",
             "--format", "csv", "--seed", "9"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[0] == "size,p,frequency"


class TestWindow:
    def test_comparison_rows(self, capsys):
        payload = run_json(
            ["window", "--p", "0.176", "--sizes", "8,16", "--trials", "200", "--seed", "7"],
            capsys,
        )
        result = payload["result"]
        assert result["naive_edge_prob"] == pytest.approx(0.642048, abs=1e-9)
        assert result["transformed_edge_prob"] == pytest.approx(0.352, abs=1e-12)
        assert [r["size"] for r in result["rows"]] == [8, 16]

    def test_csv(self, capsys):
        code = main(["window", "--p", "0.2", "--sizes", "8", "--trials", "100", "--format", "csv"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[0] == "size,naive_frequency,transformed_frequency,gap"


class TestVerify:
    def test_chain_report(self, capsys):
        payload = run_json(["verify", "--n", "3", "--p", "1/4"], capsys)
        result = payload["result"]
        assert result["secrecy_ok"]
        assert result["max_bias"] == "0"
        assert result["exact_success"] == "5/16"
        assert result["closed_form_matches"]
        assert result["xor_unique"]
        assert sorted(result["xor_survivors"]) == [[0, 1, 1, 0], [1, 0, 0, 1]]

    def test_rational_input_preserved(self, capsys):
        payload = run_json(["verify", "--n", "2", "--p", "1/3"], capsys)
        assert payload["config"]["p"] == "1/3"
        assert payload["result"]["exact_success"] == "2/3"

    def test_bad_rational_exits_2(self, capsys):
        assert main(["verify", "--n", "2", "--p", "zebra"]) == 2

    def test_cost_guard_exits_2(self, capsys):
        assert main(["verify", "--n", "20", "--p", "1/4"]) == 2


class TestReproducibility:
    def test_identical_output_for_same_seed(self, capsys):
        argv = ["percolate", "--family", "triangular", "--size", "10", "--p-edge", "0.35",
                "--trials", "64", "--seed", "123"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        second = capsys.readouterr().out
        assert first == second

    def test_threads_do_not_change_output(self, capsys):
        base = ["window", "--p", "0.2", "--sizes", "8", "--trials", "128", "--seed", "5"]
        main(base)
        single = capsys.readouterr().out
        main(base + ["--threads", "3"])
        multi = capsys.readouterr().out
        single = json.loads(single)
        multi = json.loads(multi)
        assert single["result"] == multi["result"]

    def test_out_file(self, tmp_path, capsys):
        path = tmp_path / "result.json"
        code = main(["convert", "--p", "0.25", "--out", str(path)])
        assert code == 0
        assert json.loads(path.read_text())["result"]["conversion_probability"] == 0.5


class TestEntryPoint:
    def test_console_script(self):
        proc = subprocess.run(
            [sys.executable, "-m", "secperc.cli", "convert", "--p", "0.25"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["result"]["conversion_probability"] == 0.5

    def test_unknown_family_exits_2(self):
        proc = subprocess.run(
            [sys.executable, "-m", "secperc.cli", "percolate", "--family", "kagome",
             "--size", "8", "--p-edge", "0.5"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 2
