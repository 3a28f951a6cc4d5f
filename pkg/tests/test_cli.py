"""CLI tests: subcommand output, exit codes, file round-trips."""

import json

import numpy as np
import pytest

from qmoney import cli, schemes


def run_cli(argv, capsys):
    """Invoke the CLI and parse its key-value stdout lines."""
    code = cli.main(argv)
    captured = capsys.readouterr()
    record = {}
    for line in captured.out.strip().splitlines():
        key, _, value = line.partition(" ")
        record[key] = value
    return code, record


class TestResolveScheme:
    def test_builtin_kinds(self):
        assert cli.resolve_scheme("wiesner").kind == "quantum"
        assert cli.resolve_scheme("six-state").kind == "quantum"
        assert cli.resolve_scheme("sic").kind == "quantum"
        assert cli.resolve_scheme("symmetric:3").haar
        assert cli.resolve_scheme("ticket:2").kind == "ticket"

    def test_rejects_unknown_names_and_bad_dimensions(self):
        for spec in ("nonsense", "ticket:x", "ticket:1", "symmetric:0"):
            with pytest.raises(ValueError):
                cli.resolve_scheme(spec)

    def test_loads_scheme_files(self, tmp_path):
        quantum = tmp_path / "ens.json"
        ticket = tmp_path / "ticket.json"
        schemes.save_scheme(str(quantum), schemes.wiesner_ensemble())
        schemes.save_scheme(str(ticket), schemes.fourier_ticket_scheme(2))
        assert cli.resolve_scheme(str(quantum)).kind == "quantum"
        assert cli.resolve_scheme(str(ticket)).kind == "ticket"


class TestAnalyze:
    def test_wiesner_single(self, capsys):
        code, rec = run_cli(["analyze", "--scheme", "wiesner"], capsys)
        assert code == 0
        assert abs(float(rec["single_value"]) - 0.75) < 1e-6
        assert rec["certified"] == "true"

    def test_wiesner_ten_notes(self, capsys):
        code, rec = run_cli(["analyze", "--scheme", "wiesner", "--n", "10"], capsys)
        assert code == 0
        assert abs(float(rec["value"]) - 0.75**10) < 1e-6

    def test_ticket_value(self, capsys):
        code, rec = run_cli(["analyze", "--scheme", "ticket:2"], capsys)
        assert code == 0
        assert abs(float(rec["value"]) - (0.75 + 2.0**0.5 / 8.0)) < 1e-6

    def test_symmetric_value(self, capsys):
        code, rec = run_cli(["analyze", "--scheme", "symmetric:4"], capsys)
        assert code == 0
        assert abs(float(rec["value"]) - 0.4) < 1e-6

    def test_unknown_scheme_is_a_usage_error(self, capsys):
        code, _ = run_cli(["analyze", "--scheme", "nonsense"], capsys)
        assert code == 2

    def test_output_embeds_a_recertifiable_certificate(self, tmp_path, capsys):
        out = tmp_path / "record.json"
        code, _ = run_cli(
            ["analyze", "--scheme", "wiesner", "--n", "3", "--output", str(out)], capsys
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["scheme"] == "wiesner"
        assert abs(payload["repeated_value"] - 0.75**3) < 1e-6
        code, rec = run_cli(["certify", str(out)], capsys)
        assert code == 0
        assert rec["certified"] == "true"


class TestCertify:
    @pytest.fixture()
    def certificate(self, tmp_path, capsys):
        path = tmp_path / "cert.json"
        code, _ = run_cli(["analyze", "--scheme", "wiesner", "--output", str(path)], capsys)
        assert code == 0
        return path

    def test_corrupted_dual_fails_with_reported_residual(self, certificate, capsys):
        payload = json.loads(certificate.read_text())
        eye = np.eye(2)
        payload["dual_y"] = [[[0.3 * eye[i, j], 0.0] for j in range(2)] for i in range(2)]
        bad = certificate.parent / "bad.json"
        bad.write_text(json.dumps(payload))
        code, rec = run_cli(["certify", str(bad)], capsys)
        assert code == 1
        assert rec["certified"] == "false"
        assert abs(float(rec["dual_min_eigenvalue"]) + 0.075) < 1e-9

    def test_empty_file_is_a_parse_error(self, tmp_path, capsys):
        empty = tmp_path / "empty.json"
        empty.write_text("")
        code, _ = run_cli(["certify", str(empty)], capsys)
        assert code == 2

    def test_tolerance_override_can_reject(self, certificate, capsys):
        code, rec = run_cli(["certify", str(certificate), "--tol", "1e-12"], capsys)
        assert code == 1
        assert rec["certified"] == "false"


class TestSimulate:
    def test_wiesner_optimal(self, capsys):
        argv = [
            "simulate", "--scheme", "wiesner", "--strategy", "optimal",
            "--trials", "50000", "--seed", "7",
        ]
        code, rec = run_cli(argv, capsys)
        assert code == 0
        assert abs(float(rec["analytic"]) - 0.75) < 1e-6
        assert abs(float(rec["z"])) <= 5.0

    def test_fixed_seed_reproduces_stdout(self, capsys):
        argv = ["simulate", "--scheme", "ticket:2", "--trials", "20000", "--seed", "5"]
        code_a, rec_a = run_cli(argv, capsys)
        code_b, rec_b = run_cli(argv, capsys)
        assert code_a == code_b == 0
        assert rec_a == rec_b

    def test_bell_attack(self, capsys):
        argv = ["simulate", "--attack", "bell", "--n", "2", "--trials", "50000"]
        code, rec = run_cli(argv, capsys)
        assert code == 0
        assert float(rec["analytic"]) == 0.25
        assert abs(float(rec["z"])) <= 5.0
        assert float(rec["conditional"]) == 1.0

    def test_honest_ticket_verification(self, capsys):
        argv = [
            "simulate", "--scheme", "ticket:2", "--strategy", "honest",
            "--trials", "20000",
        ]
        code, rec = run_cli(argv, capsys)
        assert code == 0
        assert rec["successes"] == rec["trials"]

    def test_loaded_quantum_scheme_uses_solver_strategy(self, tmp_path, capsys):
        path = tmp_path / "ens.json"
        schemes.save_scheme(str(path), schemes.wiesner_ensemble())
        argv = ["simulate", "--scheme", str(path), "--trials", "20000", "--seed", "3"]
        code, rec = run_cli(argv, capsys)
        assert code == 0
        assert abs(float(rec["analytic"]) - 0.75) < 1e-6
        assert abs(float(rec["z"])) <= 5.0

    def test_usage_errors(self, capsys):
        bad = [
            ["simulate", "--trials", "10"],
            ["simulate", "--scheme", "wiesner", "--attack", "bell", "--trials", "10"],
            ["simulate", "--scheme", "wiesner", "--strategy", "bogus", "--trials", "10"],
            ["simulate", "--scheme", "wiesner", "--trials", "0"],
            ["simulate", "--scheme", "ticket:2", "--strategy", "honest", "--n", "2",
             "--trials", "10"],
        ]
        for argv in bad:
            code, _ = run_cli(argv, capsys)
            assert code == 2, argv

    def test_output_file_keeps_report_fields(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        argv = [
            "simulate", "--scheme", "wiesner", "--trials", "10000",
            "--seed", "2", "--output", str(out),
        ]
        code, _ = run_cli(argv, capsys)
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["trials"] == 10000
        assert set(payload) >= {"empirical", "analytic", "z", "successes"}


class TestThreshold:
    def test_wiesner_tail(self, capsys):
        code, rec = run_cli(["threshold", "--scheme", "wiesner", "--n", "3", "--t", "2"], capsys)
        assert code == 0
        assert abs(float(rec["value"]) - 27.0 / 32.0) < 1e-9
        assert abs(float(rec["alpha"]) - 0.75) < 1e-9
        assert rec["conditions"] == "certified"

    def test_six_state_tail(self, capsys):
        code, rec = run_cli(
            ["threshold", "--scheme", "six-state", "--n", "2", "--t", "2"], capsys
        )
        assert code == 0
        assert abs(float(rec["value"]) - 4.0 / 9.0) < 1e-9

    def test_symmetric_scheme_is_not_certified(self, capsys):
        code, rec = run_cli(
            ["threshold", "--scheme", "symmetric:3", "--n", "2", "--t", "1"], capsys
        )
        assert code == 1
        assert rec["conditions"] == "not-certified"
        assert abs(float(rec["value"]) - 0.75) < 1e-6

    def test_threshold_above_n_is_a_usage_error(self, capsys):
        code, _ = run_cli(["threshold", "--scheme", "wiesner", "--n", "2", "--t", "3"], capsys)
        assert code == 2

    def test_output_file(self, tmp_path, capsys):
        out = tmp_path / "threshold.json"
        argv = [
            "threshold", "--scheme", "wiesner", "--n", "2", "--t", "1",
            "--output", str(out),
        ]
        code, _ = run_cli(argv, capsys)
        assert code == 0
        payload = json.loads(out.read_text())
        assert abs(payload["value"] - 15.0 / 16.0) < 1e-9
        assert payload["conditions"] == "certified"
