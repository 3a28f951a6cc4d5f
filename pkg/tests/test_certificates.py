"""Certificate checks: analytic pairs, solver output, file round-trips."""

import json
import math

import numpy as np
import pytest

from qmoney import certificates, cloners, schemes, sdp
from qmoney.exceptions import DimensionError, FileFormatError


def _wiesner_problem():
    return sdp.CloningSdp(
        schemes.cloning_objective(schemes.wiesner_ensemble()), dims=(2, 2, 2)
    )


class TestAnalyticPairs:
    def test_four_state_pair_certifies(self):
        problem = _wiesner_problem()
        x = cloners.wiesner_optimal_cloner().matrix
        y = 0.375 * np.eye(2)
        report = certificates.certify(x, y, problem)
        assert report.certified
        assert abs(report.primal_value - 0.75) < 1e-12
        assert abs(report.dual_value - 0.75) < 1e-12

    @pytest.mark.parametrize(
        "ensemble", [schemes.six_state_ensemble(), schemes.sic_qubit_ensemble()]
    )
    def test_universal_cloner_pair_certifies_at_two_thirds(self, ensemble):
        problem = sdp.CloningSdp(schemes.cloning_objective(ensemble), dims=(2, 2, 2))
        x = cloners.buzek_hillery_cloner().matrix
        y = np.eye(2) / 3.0
        report = certificates.certify(x, y, problem)
        assert report.certified
        assert abs(report.primal_value - 2.0 / 3.0) < 1e-12

    def test_zero_primal_is_infeasible(self):
        problem = _wiesner_problem()
        check = certificates.check_primal(np.zeros((8, 8)), problem)
        assert not check.feasible
        assert check.trace_defect == pytest.approx(1.0)

    def test_zero_dual_is_infeasible(self):
        problem = _wiesner_problem()
        check = certificates.check_dual(np.zeros((2, 2)), problem)
        assert not check.feasible
        assert check.min_eigenvalue < -0.3

    def test_corrupted_dual_is_reported(self):
        problem = _wiesner_problem()
        x = cloners.wiesner_optimal_cloner().matrix
        report = certificates.certify(x, 0.3 * np.eye(2), problem)
        assert not report.certified
        assert not report.dual.feasible
        # the largest objective eigenvalue is 3/8, so the slack dips to 0.3 - 0.375
        assert report.dual.min_eigenvalue == pytest.approx(-0.075, abs=1e-9)

    def test_classical_block_dual(self):
        for d in (2, 3, 4, 5):
            scheme = schemes.fourier_ticket_scheme(d)
            blocks, _ = schemes.classical_objective_blocks(scheme)
            q = schemes.assemble_challenge_block(blocks, d, 0, 1)
            problem = sdp.CloningSdp(q, dims=(d, d, d))
            c = schemes.effective_overlap(scheme.pair)
            y = (1.0 + math.sqrt(c)) / (2.0 * d) * np.eye(d)
            check = certificates.check_dual(y, problem)
            assert check.feasible
            assert abs(check.value - (1.0 + math.sqrt(c)) / 2.0) < 1e-12

    def test_mixed_challenge_pair_certifies(self):
        scheme = schemes.fourier_ticket_scheme(2)
        blocks, _ = schemes.classical_objective_blocks(scheme)
        q = schemes.assemble_challenge_block(blocks, 2, 0, 1)
        problem = sdp.CloningSdp(q, dims=(2, 2, 2))
        x = schemes.classical_primal_witness(scheme)[(0, 1)]
        y = (1.0 + math.sqrt(0.5)) / 4.0 * np.eye(2)
        report = certificates.certify(x, y, problem)
        assert report.certified
        assert abs(report.primal_value - (1.0 + math.sqrt(0.5)) / 2.0) < 1e-12


class TestSolverIntegration:
    @pytest.mark.parametrize(
        "objective,dims",
        [
            (schemes.cloning_objective(schemes.wiesner_ensemble()), (2, 2, 2)),
            (schemes.cloning_objective(schemes.sic_qubit_ensemble()), (2, 2, 2)),
            (schemes.symmetric_cloning_objective(3), (3, 3, 3)),
        ],
    )
    def test_solver_output_passes_at_ten_times_tolerance(self, objective, dims):
        problem = sdp.CloningSdp(objective, dims=dims)
        sol = sdp.solve(problem, tol=1e-8)
        report = certificates.certify(sol.primal_x, sol.dual_y, problem, tol=1e-7)
        assert report.certified

    def test_verdict_monotone_in_tolerance(self):
        problem = _wiesner_problem()
        sol = sdp.solve(problem, tol=1e-6)
        tols = (1e-5, 1e-4, 1e-3)
        verdicts = [
            certificates.certify(sol.primal_x, sol.dual_y, problem, tol=t).certified
            for t in tols
        ]
        assert verdicts[0]
        assert verdicts == sorted(verdicts)

    def test_never_certified_with_a_wide_gap(self):
        problem = _wiesner_problem()
        x = cloners.wiesner_optimal_cloner().matrix
        y = np.eye(2)  # feasible but far from optimal: value 2
        report = certificates.certify(x, y, problem, tol=1e-3)
        assert report.primal.feasible and report.dual.feasible
        assert not report.certified
        assert report.gap > 1.0

    def test_report_constructor_rejects_inconsistent_verdict(self):
        problem = _wiesner_problem()
        x = cloners.wiesner_optimal_cloner().matrix
        good = certificates.certify(x, 0.375 * np.eye(2), problem)
        with pytest.raises(ValueError):
            certificates.CertificateReport(
                primal=good.primal,
                dual=good.dual,
                gap=good.gap,
                tolerance=good.tolerance,
                certified=False,
            )

    def test_dimension_mismatches_rejected(self):
        problem = _wiesner_problem()
        with pytest.raises(DimensionError):
            certificates.check_primal(np.eye(4), problem)
        with pytest.raises(DimensionError):
            certificates.check_dual(np.eye(3), problem)


class TestCertificateFiles:
    def test_round_trip(self, tmp_path):
        problem = _wiesner_problem()
        x = cloners.wiesner_optimal_cloner().matrix
        y = 0.375 * np.eye(2)
        path = tmp_path / "cert.json"
        certificates.save_certificate(str(path), problem, x, y, 1e-7, 0.75)
        loaded = certificates.load_certificate(str(path))
        assert loaded.problem.dims == (2, 2, 2)
        assert abs(loaded.value - 0.75) < 1e-15
        report = loaded.verify()
        assert report.certified
        assert abs(report.primal_value - loaded.value) <= loaded.tolerance

    def test_round_trip_without_dims_field(self, tmp_path):
        problem = _wiesner_problem()
        x = cloners.wiesner_optimal_cloner().matrix
        y = 0.375 * np.eye(2)
        path = tmp_path / "cert.json"
        certificates.save_certificate(str(path), problem, x, y, 1e-7, 0.75)
        payload = json.loads(path.read_text())
        del payload["dims"]
        del payload["n_out"]
        path.write_text(json.dumps(payload))
        loaded = certificates.load_certificate(str(path))
        assert loaded.problem.dims == (4, 2)
        assert loaded.verify().certified

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda p: p.pop("q"),
            lambda p: p.pop("dual_y"),
            lambda p: p.pop("tolerance"),
            lambda p: p.pop("value"),
            lambda p: p.update(tolerance=-1.0),
            lambda p: p.update(tolerance="tight"),
            lambda p: p.update(value="best"),
            lambda p: p.update(dims=[2, 0, 2]),
            lambda p: p.update(dims=[3, 3, 3]),
            lambda p: p.update(q=[[1.0, 2.0]]),
        ],
    )
    def test_malformed_payloads_rejected(self, tmp_path, mutate):
        problem = _wiesner_problem()
        x = cloners.wiesner_optimal_cloner().matrix
        y = 0.375 * np.eye(2)
        path = tmp_path / "cert.json"
        certificates.save_certificate(str(path), problem, x, y, 1e-7, 0.75)
        payload = json.loads(path.read_text())
        mutate(payload)
        path.write_text(json.dumps(payload))
        with pytest.raises(FileFormatError):
            certificates.load_certificate(str(path))

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("")
        with pytest.raises(FileFormatError):
            certificates.load_certificate(str(path))

    def test_mismatched_primal_shape_rejected(self, tmp_path):
        problem = _wiesner_problem()
        x = cloners.wiesner_optimal_cloner().matrix
        y = 0.375 * np.eye(2)
        path = tmp_path / "cert.json"
        certificates.save_certificate(str(path), problem, x, y, 1e-7, 0.75)
        payload = json.loads(path.read_text())
        payload["primal_x"] = payload["dual_y"]
        path.write_text(json.dumps(payload))
        with pytest.raises(FileFormatError):
            certificates.load_certificate(str(path))
