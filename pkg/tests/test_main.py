"""Tests for the quantum-mceliece command line."""

import json
from fractions import Fraction

import numpy as np
import pytest
from click.testing import CliRunner

from quantum_mceliece import attacks, formats, qsim
from quantum_mceliece.main import main


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, ["--log-level", "WARNING", *map(str, args)])


def load_state(path):
    return formats.state_from_file(formats.load(formats.StateFile, path))


class TestPipeline:
    """keygen, state, encrypt and decrypt through files."""

    def test_single_roundtrip(self, runner, tmp_path):
        """Test keygen, encrypt and decrypt through files."""
        pub, priv = tmp_path / "pub.json", tmp_path / "priv.json"
        result = invoke(runner, "keygen", "--seed", 7, "--out", pub, priv)
        assert result.exit_code == 0, result.output
        assert result.stdout.strip() == "[7,4] key pair with t=1"

        assert invoke(runner, "state", "--random", 4, "--seed", 1, "--out", tmp_path / "m.json").exit_code == 0
        assert invoke(
            runner, "encrypt", "--pub", pub, "--in", tmp_path / "m.json", "--seed", 2,
            "--out", tmp_path / "c.json",
        ).exit_code == 0
        assert load_state(tmp_path / "c.json").qubits == 7

        result = invoke(
            runner, "decrypt", "--priv", priv, "--in", tmp_path / "c.json",
            "--out", tmp_path / "d.json",
        )
        assert result.exit_code == 0, result.output
        fidelity = qsim.fidelity(load_state(tmp_path / "d.json"), load_state(tmp_path / "m.json"))
        assert fidelity >= 1 - 1e-9

    def test_simulated_measurement(self, runner, tmp_path):
        """Test decryption with a simulated syndrome measurement."""
        pub, priv = tmp_path / "pub.json", tmp_path / "priv.json"
        invoke(runner, "keygen", "--seed", 3, "--out", pub, priv)
        invoke(runner, "state", "--bits", "1010", "--out", tmp_path / "m.json")
        invoke(runner, "encrypt", "--pub", pub, "--in", tmp_path / "m.json", "--leq-weight",
               "--out", tmp_path / "c.json")
        result = invoke(runner, "decrypt", "--priv", priv, "--in", tmp_path / "c.json",
                        "--simulate-measurement", "--seed", 5, "--out", tmp_path / "d.json")
        assert result.exit_code == 0, result.output
        assert qsim.support(load_state(tmp_path / "d.json")).tolist() == [0b1010]

    def test_reruns_are_byte_identical(self, runner, tmp_path):
        """Test that the same seeds give the same files."""
        for run in ("a", "b"):
            d = tmp_path / run
            d.mkdir()
            invoke(runner, "keygen", "--seed", 11, "--out", d / "pub.json", d / "priv.json")
            invoke(runner, "state", "--random", 4, "--seed", 11, "--out", d / "m.json")
            invoke(runner, "encrypt", "--pub", d / "pub.json", "--in", d / "m.json",
                   "--seed", 11, "--out", d / "c.json")
        for name in ("pub.json", "priv.json", "m.json", "c.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_double_roundtrip_and_attack(self, runner, tmp_path):
        """Test double encryption, decryption and attack."""
        key, public = tmp_path / "dk.json", tmp_path / "dk-public.json"
        result = invoke(runner, "keygen-double", "--seed", 4, "--out", key, "--public-out", public)
        assert result.exit_code == 0, result.output
        assert result.stdout.startswith("[7,4] + [15,7] keys")
        assert json.loads(public.read_text())["first_private"] is None

        invoke(runner, "state", "--random", 4, "--seed", 8, "--out", tmp_path / "m.json")
        result = invoke(runner, "encrypt2", "--key", public, "--in", tmp_path / "m.json",
                        "--seed", 9, "--out", tmp_path / "c.json")
        assert result.exit_code == 0, result.output
        assert load_state(tmp_path / "c.json").qubits == 15

        invoke(runner, "decrypt2", "--key", key, "--in", tmp_path / "c.json",
               "--out", tmp_path / "d.json")
        fidelity = qsim.fidelity(load_state(tmp_path / "d.json"), load_state(tmp_path / "m.json"))
        assert fidelity >= 1 - 1e-9

        result = invoke(runner, "attack", "double", "--pub", public, "--cipher", tmp_path / "c.json",
                        "--u-seed", 1, "--residual", tmp_path / "res.json")
        assert result.exit_code == 0, result.output
        lines = result.stdout.splitlines()
        assert lines[0].startswith("outer leak: ")
        assert lines[1].startswith("inner leak: ")
        assert load_state(tmp_path / "res.json").qubits == 4

    def test_decrypt2_needs_private_halves(self, runner, tmp_path):
        """Test decrypt2 with a public-only bundle."""
        key, public = tmp_path / "dk.json", tmp_path / "dk-public.json"
        invoke(runner, "keygen-double", "--seed", 4, "--out", key, "--public-out", public)
        invoke(runner, "state", "--random", 4, "--out", tmp_path / "m.json")
        invoke(runner, "encrypt2", "--key", key, "--in", tmp_path / "m.json", "--out", tmp_path / "c.json")
        result = invoke(runner, "decrypt2", "--key", public, "--in", tmp_path / "c.json",
                        "--out", tmp_path / "d.json")
        assert result.exit_code == 3
        assert result.stderr.startswith("Error:")


def test_attack_single_report(runner, tmp_path):
    """Test the single attack report."""
    pub, priv = tmp_path / "pub.json", tmp_path / "priv.json"
    invoke(runner, "keygen", "--seed", 7, "--out", pub, priv)
    invoke(runner, "state", "--bits", "0110", "--out", tmp_path / "m.json")
    invoke(runner, "encrypt", "--pub", pub, "--in", tmp_path / "m.json", "--out", tmp_path / "c.json")

    report = tmp_path / "attack.csv"
    result = invoke(runner, "attack", "single", "--pub", pub, "--cipher", tmp_path / "c.json",
                    "--u-seed", 2, "--report", report)
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("single leak: ")

    config, rows = formats.read_report(report)
    assert config["command"] == "attack"
    assert config["u_seed"] == 2
    assert len(rows) == 1
    assert rows[0]["layer"] == "single"
    assert rows[0]["leak_rank"] == "3"
    assert len(rows[0]["leak"]) == 7


def test_search_report(runner, tmp_path):
    """Test the search report rows and header."""
    report = tmp_path / "search.csv"
    result = invoke(runner, "search", "--engine", "greedy", "--n", 12, "--k", 6,
                    "--budget", 4, "--seeds", "0..4", "--report", report)
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("greedy: 5 instances, mean weight ")

    config, rows = formats.read_report(report)
    assert config["engine"] == "greedy"
    assert config["seeds"] == [0, 1, 2, 3, 4]
    assert [row["seed"] for row in rows] == ["0", "1", "2", "3", "4"]
    assert all(len(row["e"]) == 12 for row in rows)


def test_search_report_carries_leak_probability(runner, tmp_path):
    """Test that each search row records the exact Pr[r·e = 0] for its weight."""
    report = tmp_path / "search.csv"
    result = invoke(runner, "search", "--engine", "random", "--n", 12, "--k", 6, "--t", 3,
                    "--budget", 4, "--seeds", "0..2", "--report", report)
    assert result.exit_code == 0, result.output

    config, rows = formats.read_report(report)
    assert config["t"] == 3
    assert config["compare_exhaustive"] is False
    for row in rows:
        assert row["t"] == "3"
        value = Fraction(int(row["prob_num"]), int(row["prob_den"]))
        assert value == attacks.prob_r_dot_e_zero(12, 3, int(row["weight"]))
        assert row["prob_decimal"] == attacks.format_rational(value)
        assert row["exhaustive_weight"] == ""


def test_search_compare_exhaustive(runner, tmp_path):
    """Test the greedy-versus-exhaustive success rate and its report column."""
    report = tmp_path / "search.csv"
    result = invoke(runner, "search", "--engine", "greedy", "--n", 10, "--k", 5,
                    "--budget", 8, "--seeds", "0..9", "--compare-exhaustive", "--report", report)
    assert result.exit_code == 0, result.output

    summary = result.stdout.splitlines()[1]
    assert summary.startswith("greedy reaches the exhaustive minimum on ")
    hits = int(summary.split(" on ")[1].split("/")[0])

    _, rows = formats.read_report(report)
    matched = [row["weight"] == row["exhaustive_weight"] for row in rows]
    assert hits == sum(matched)
    assert summary.endswith(f"/10 instances ({hits / 10:.3f})")
    assert all(int(row["exhaustive_weight"]) <= int(row["weight"]) for row in rows)


def test_search_engines_are_ordered(runner):
    """Test the engine order on mean weights."""
    means = {}
    for engine in ("random", "greedy", "exhaustive"):
        result = invoke(runner, "search", "--engine", engine, "--n", 10, "--k", 5,
                        "--budget", 8, "--seeds", "0..9")
        assert result.exit_code == 0, result.output
        means[engine] = float(result.stdout.split("mean weight ")[1].split(",")[0])
    assert means["exhaustive"] <= means["greedy"] <= means["random"]


def test_prob(runner):
    """Test the exact probability output."""
    result = invoke(runner, "prob", "--n", 4, "--t", 2, "--w", 2)
    assert result.exit_code == 0, result.output
    assert result.stdout.splitlines() == ["1/3", "0." + "3" * 30]


def test_prob_with_estimate(runner):
    """Test the Monte Carlo estimate line."""
    result = invoke(runner, "prob", "--n", 10, "--t", 3, "--w", 4, "--trials", 2000, "--seed", 1)
    lines = result.stdout.splitlines()
    assert len(lines) == 3
    exact = float(lines[1])
    estimate = float(lines[2].rsplit(" ", 1)[1])
    assert abs(estimate - exact) < 0.05


def test_cwcode(runner):
    """Test constant-weight encode and decode."""
    result = invoke(runner, "cwcode", "encode", "--n", 4, "--t", 2, "--value", "11")
    assert result.stdout.strip() == "1001"
    result = invoke(runner, "cwcode", "decode", "--n", 4, "--t", 2, "--value", "1001")
    assert result.stdout.strip() == "11"
    result = invoke(runner, "cwcode", "decode", "--n", 4, "--t", 2, "--value", "1110")
    assert result.exit_code == 3


def test_feasible(runner, tmp_path):
    """Test the feasibility command on a matrix file."""
    shrink = tmp_path / "shrink.json"
    formats.save(formats.MatrixFile(cols=1, rows=["1", "1"]), shrink)
    result = invoke(runner, "feasible", "--matrix", shrink)
    assert result.exit_code == 0, result.output
    assert result.stdout.strip() == "Infeasible: 01 and 10 map to 1"

    ident = tmp_path / "ident.json"
    formats.save(formats.MatrixFile(cols=4, rows=["1000", "0100", "0010", "0001"]), ident)
    result = invoke(runner, "feasible", "--matrix", ident, "--domain", "cw:2", "--annihilator")
    assert result.stdout.splitlines() == ["Feasible", "annihilator dimension: 1", "1111"]


def test_ratios(runner):
    """Test the expansion ratios output."""
    result = invoke(runner, "ratios", "--k", 524, "--n", 1024, "--nprime", 2048)
    assert result.exit_code == 0, result.output
    lines = result.stdout.splitlines()
    assert lines[0].startswith("cipher_expansion: 512/131 = 3.908")
    assert lines[1] == "key_bit_expansion: 3 = 3"
    assert lines[2] == "random_bits: 3072"


@pytest.mark.parametrize("name", ["roundtrip", "classical-decrypt", "double-attack", "theorem1", "eq9"])
def test_demos_pass(runner, name):
    """Test that each built-in demo passes."""
    result = invoke(runner, "demo", name)
    assert result.exit_code == 0, result.output
    assert " PASS " in result.stdout


def test_roundtrip_demo_reports_fidelity(runner):
    result = invoke(runner, "demo", "roundtrip")
    detail = dict(part.split("=") for part in result.stdout.split()[2:])
    assert float(detail["min_fidelity"]) >= 1 - 1e-9
    assert detail["sweep"] == "112/112"


def test_config_option(runner, tmp_path):
    """Test running with a --config file."""
    path = tmp_path / "run.yaml"
    path.write_text("seed: 5\nsearch:\n  engine: random\n  budget: 3\n")
    result = invoke(runner, "--config", path, "search", "--n", 8, "--k", 4)
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("random: 1 instances")


class TestExitCodes:
    def test_usage_error(self, runner, tmp_path):
        """Test that a missing option exits with 2."""
        result = invoke(runner, "state", "--out", tmp_path / "s.json")
        assert result.exit_code == 2

    def test_format_error(self, runner, tmp_path):
        """Test that a malformed key file exits with 3."""
        broken = tmp_path / "broken.json"
        broken.write_text("{")
        invoke(runner, "state", "--bits", "0000", "--out", tmp_path / "m.json")
        result = invoke(runner, "encrypt", "--pub", broken, "--in", tmp_path / "m.json",
                        "--out", tmp_path / "c.json")
        assert result.exit_code == 3
        assert result.stderr.startswith("Error:")

    def test_invalid_config(self, runner, tmp_path):
        """Test that a bad config file exits with 3."""
        path = tmp_path / "bad.yaml"
        path.write_text("- a\n- list\n")
        result = runner.invoke(main, ["--config", str(path), "ratios", "--k", "1", "--n", "2",
                                      "--nprime", "3"])
        assert result.exit_code == 3

    def test_ragged_state_file(self, runner, tmp_path):
        """Test that a state with a one-element amplitude exits with 3."""
        pub, priv = tmp_path / "pub.json", tmp_path / "priv.json"
        invoke(runner, "keygen", "--out", pub, priv)
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({
            "format_version": 1, "qubits": 2, "amplitudes": [[1, 0], [0], [0, 0], [0, 0]],
        }))
        result = invoke(runner, "encrypt", "--pub", pub, "--in", bad, "--out", tmp_path / "c.json")
        assert result.exit_code == 3
        assert result.stderr.startswith("Error:")

    def test_non_utf8_input(self, runner, tmp_path):
        """Test that binary garbage is a format error, not a crash."""
        bad = tmp_path / "m.json"
        bad.write_bytes(b"\xff\xfe\x00garbage")
        result = invoke(runner, "feasible", "--matrix", bad)
        assert result.exit_code == 3
        assert result.stderr.startswith("Error:")

    def test_parameter_error(self, runner):
        """Test that infeasible parameters exit with 4."""
        assert invoke(runner, "prob", "--n", 4, "--t", 5, "--w", 1).exit_code == 4
        assert invoke(runner, "search", "--n", 8, "--k", 4, "--seeds", "5..2").exit_code == 4
        assert invoke(runner, "cwcode", "encode", "--n", 4, "--t", 5, "--value", "1").exit_code == 4

    def test_dimension_mismatch(self, runner, tmp_path):
        """Test that a key and state of different sizes exit with 4."""
        pub, priv = tmp_path / "pub.json", tmp_path / "priv.json"
        invoke(runner, "keygen", "--out", pub, priv)
        invoke(runner, "state", "--bits", "101", "--out", tmp_path / "m.json")
        result = invoke(runner, "encrypt", "--pub", pub, "--in", tmp_path / "m.json",
                        "--out", tmp_path / "c.json")
        assert result.exit_code == 4

    def test_budget_error(self, runner):
        """Test that an oversized exhaustive search exits with 5."""
        result = invoke(runner, "search", "--engine", "exhaustive", "--n", 22, "--k", 4)
        assert result.exit_code == 5
        assert "Error:" in result.stderr
        assert result.stdout == ""


def test_state_file_from_bits(runner, tmp_path):
    """Test writing a basis state from a bit string."""
    invoke(runner, "state", "--bits", "01", "--out", tmp_path / "s.json")
    amplitudes = np.asarray(json.loads((tmp_path / "s.json").read_text())["amplitudes"])
    np.testing.assert_array_equal(amplitudes[:, 0], [0.0, 1.0, 0.0, 0.0])
