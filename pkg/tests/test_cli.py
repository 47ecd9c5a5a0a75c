import functools
import json
import math

import pytest

from pqforge import cli
from pqforge.ntru import optimize_ntru
from pqforge.report import dumps


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--format", "json", *argv)
    return code, json.loads(out) if out else None, err


class TestEntropyCommand:
    def test_inline(self, capsys):
        code, rep, _ = run_json(capsys, "entropy", "--dist", "0.5,0.25,0.25", "--alpha", "2",
                                "--alpha", "inf")
        assert code == 0
        bits = {e["alpha"]: e["bits"] for e in rep["results"]["entropies"]}
        assert bits["inf"] == 1.0
        assert rep["results"]["collision_entropy"] == pytest.approx(1.4150374992788438, abs=1e-12)

    def test_uniform(self, capsys):
        code, rep, _ = run_json(capsys, "entropy", "--dist", "uniform:1024", "--alpha", "shannon")
        assert code == 0 and rep["results"]["entropies"][0]["bits"] == pytest.approx(10.0)

    def test_normalize(self, capsys):
        code, rep, _ = run_json(capsys, "entropy", "--dist", "2,1,1", "--normalize")
        assert code == 0 and rep["results"]["outcomes"] == 3

    def test_unnormalized_rejected(self, capsys):
        code, _, err = run(capsys, "entropy", "--dist", "2,1,1")
        assert code == 2 and "error" in err

    def test_file_parse_error_names_line(self, capsys, tmp_path):
        f = tmp_path / "p.txt"
        f.write_text("0.5\n# comment\n0.25 oops\n")
        code, _, err = run(capsys, "entropy", "--dist", str(f))
        assert code == 2 and "p.txt:3" in err

    def test_file_input(self, capsys, tmp_path):
        f = tmp_path / "p.txt"
        f.write_text("0.5\n0.25, 0.25\n")
        code, rep, _ = run_json(capsys, "entropy", "--dist", str(f))
        assert code == 0 and rep["results"]["outcomes"] == 3

    def test_bad_alpha(self, capsys):
        code, _, _ = run(capsys, "entropy", "--dist", "1", "--alpha", "-2")
        assert code == 2

    def test_text_output(self, capsys):
        code, out, _ = run(capsys, "--format", "text", "entropy", "--dist", "0.5,0.5")
        assert code == 0 and "H_2" in out


class TestGlobals:
    def test_flags_after_subcommand(self, capsys):
        code, out, _ = run(capsys, "entropy", "--dist", "0.5,0.5", "--format", "json")
        assert code == 0 and json.loads(out)["results"]["collision_entropy"] == 1.0

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "r.json"
        code, out, _ = run(capsys, "--output", str(path), "--format", "json", "bound", "decoherence-floor")
        assert code == 0 and out == ""
        assert json.loads(path.read_text())["results"]["value"] == pytest.approx(88722839.111673, rel=1e-12)

    def test_seed_lands_in_config(self, capsys):
        code, rep, _ = run_json(capsys, "--seed", "7", "bound", "grover-cost")
        assert code == 0 and rep["config"]["oracle"]["seed"] == 7

    def test_bad_config(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        path.write_text('{"ntru": {"lambda": 128,\n "bogus": 1}}')
        code, _, err = run(capsys, "--config", str(path), "compare")
        assert code == 2 and "bogus" in err

    def test_env_config(self, capsys, tmp_path, monkeypatch):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"ntru": {"lambda": 64}}))
        monkeypatch.setenv("PQFORGE_CONFIG", str(path))
        code, rep, _ = run_json(capsys, "optimize", "ntru")
        assert code == 0 and rep["config"]["ntru"]["lambda"] == 64

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            cli.main([])
        assert exc.value.code == 2


class TestOptimize:
    def test_sphincs(self, capsys):
        code, rep, _ = run_json(capsys, "optimize", "sphincs", "--lambda", "64")
        assert code == 0
        res = rep["results"]
        assert res["cost_log2"] >= 64
        assert "sphincs.cost" in rep["anchors"]

    def test_ntru_success(self, capsys):
        code, rep, _ = run_json(capsys, "optimize", "ntru", "--lambda", "128")
        assert code == 0 and rep["results"]["outcome"] == "SUCCESS"

    def test_ntru_increase_lambda(self, capsys):
        code, rep, _ = run_json(capsys, "optimize", "ntru", "--lambda", "128", "--mode", "closed-form",
                                "--schedule", "power-of-two")
        assert code == 3
        assert "UNREACHABLE" in rep["flags"]

    def test_iteration_cap_exit(self, capsys, monkeypatch):
        monkeypatch.setattr(cli, "optimize_ntru", functools.partial(optimize_ntru, iteration_cap=2))
        code, out, err = run(capsys, "optimize", "ntru", "--mode", "closed-form")
        assert code == 4 and out == ""
        state = json.loads(err.split("\n", 1)[1])
        assert state["iterations"] == 2

    def test_ideal_device(self, capsys):
        # without decoherence the sieve cost plateaus near 76 bits on the prime schedule
        code, rep, _ = run_json(capsys, "optimize", "ntru", "--lambda-d", "inf")
        assert code == 3 and rep["results"]["outcome"] == "INCREASE_LAMBDA"
        assert "DECOHERENCE_TERM_ABSENT" in rep["flags"]
        assert rep["results"]["c_quant_log2"] < 128


class TestBound:
    @pytest.mark.parametrize("name", sorted(cli.BOUNDS))
    def test_every_bound_defaults(self, capsys, name):
        code, rep, _ = run_json(capsys, "bound", name)
        assert code == 0
        value = rep["results"]["value"]
        assert isinstance(value, (bool, int, float, str))
        assert rep["anchors"] == {name: cli.BOUNDS[name].anchor}

    def test_decoherence_floor(self, capsys):
        code, rep, _ = run_json(capsys, "bound", "decoherence-floor", "--lambda", "128", "--lambda-d", "1e6")
        assert rep["results"]["value"] == pytest.approx(1e6 * 128 * math.log(2), rel=1e-12)

    def test_power_notation(self, capsys):
        code, rep, _ = run_json(capsys, "bound", "decoherence-floor", "--lambda-d", "10^6")
        assert rep["results"]["inputs"]["lambda-d"] == 1e6

    def test_text(self, capsys):
        code, out, _ = run(capsys, "--format", "text", "bound", "grover-cost")
        assert code == 0 and out.startswith("grover-cost = ")


class TestCompare:
    def test_values(self, capsys):
        code, rep, _ = run_json(capsys, "compare")
        assert code == 0
        res = rep["results"]
        assert {r["parameter"] for r in res["rows"]} == {"hash_size", "signature_size", "dimension_N",
                                                         "modulus_q"}
        assert all(abs(r["discrepancy_pp"]) <= 0.1 for r in res["rows"])
        assert res["sphincs"]["effective_h2"] == pytest.approx(134.4456421267026, abs=1e-9)
        assert res["sphincs"]["signature_size_kb_model"] == pytest.approx(6.6875)
        assert res["ntru"]["lambda1_gaussian_heuristic"] == pytest.approx(675.37978136357, abs=1e-9)
        assert {"NTRU_REPORTED_MODULUS_NOT_PRIME", "NTRU_REPORTED_HQ_GAP",
                "SPHINCS_REPORTED_ENTROPY_BELOW_THRESHOLD"} <= set(rep["flags"])
        assert all(r["source"] == "reported" for r in res["rows"])

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "--format", "csv", "compare")
        assert code == 0 and out.startswith("field,value\n")


class TestVerify:
    ARGS = ("--trials", "200")

    def test_pass_and_csv_reproducible(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        code_a, rep, _ = run_json(capsys, "verify", *self.ARGS, "--csv", str(a))
        code_b, _, _ = run_json(capsys, "verify", *self.ARGS, "--csv", str(b))
        assert code_a == code_b == 0 and rep["results"]["passed"]
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().startswith("t,empirical_tail,bound_tail,trials,seed\n")

    def test_tampered_constant_fails(self, capsys):
        code, rep, err = run_json(capsys, "verify", *self.ARGS, "--bound-constant", "30")
        assert code == 5
        assert not rep["results"]["passed"]
        assert any(f["name"] == "margin_reduction" for f in json.loads(err))


class TestCanonicalJson:
    def test_round_trip_bytes(self, capsys, tmp_path):
        path = tmp_path / "r.json"
        assert cli.main(["--format", "json", "--output", str(path), "optimize", "ntru", "--lambda", "96"]) == 0
        text = path.read_text()
        assert dumps(json.loads(text)) == text

    def test_repeated_runs_identical(self, capsys):
        _, a, _ = run(capsys, "--format", "json", "compare")
        _, b, _ = run(capsys, "--format", "json", "compare")
        assert a == b
