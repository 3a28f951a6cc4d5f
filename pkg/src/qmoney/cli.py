"""Command-line front end: analyze, certify, simulate, threshold.

Exit codes: 0 on success (certified, conditions hold), 1 on numeric failure
(solver breakdown, certification or conditions failure), 2 on usage or parse
errors.  Floating-point values print with 10 significant digits; files
written through ``--output`` keep full binary64 precision.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import certificates, channels, cloners, composition, linalg, schemes, sdp, simulator
from .exceptions import (
    CertificationError,
    DimensionError,
    FileFormatError,
    QuantumMoneyError,
    SolverError,
)

BUILTIN_SCHEMES = ("wiesner", "six-state", "sic", "symmetric:d", "ticket:d")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _emit(record: dict) -> None:
    for key, value in record.items():
        print(key, _fmt(value))


def _write_output(path: Optional[str], payload: dict) -> None:
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=1)


@dataclass(frozen=True)
class ResolvedScheme:
    """A named scheme resolved to concrete problem data.

    ``kind`` is "quantum" (an ensemble with a cloning objective) or "ticket"
    (a classical-verification scheme analyzed through its challenge blocks).
    ``haar`` marks the symmetric scheme, whose objective averages over all
    pure states rather than over ``ensemble`` (kept for simulation only).
    """

    ident: str
    kind: str
    ensemble: Optional[schemes.Ensemble] = None
    ticket: Optional[schemes.TicketScheme] = None
    objective: Optional[np.ndarray] = None
    dims: Optional[tuple[int, ...]] = None
    strategy_factory: Optional[Callable] = None
    haar: bool = False

    def problem(self) -> sdp.CloningSdp:
        if self.kind != "quantum":
            raise ValueError(f"scheme {self.ident!r} has no single cloning objective")
        return sdp.CloningSdp(self.objective, dims=self.dims)

    def challenge_blocks(self):
        blocks, weights = schemes.classical_objective_blocks(self.ticket)
        d = self.ticket.dim
        order = []
        weight_list = []
        for c1, c2 in cloners.CHALLENGE_PAIRS:
            op = schemes.assemble_challenge_block(blocks, d, c1, c2)
            order.append(sdp.CloningSdp(op, dims=(d, d, d)))
            weight_list.append(weights[(c1, c2)])
        return order, weight_list

    def cloning_ensemble(self) -> Optional[schemes.Ensemble]:
        """The key-state ensemble whose quantum cloning the scheme implies."""
        if self.kind == "ticket":
            return self.ticket.ensemble()
        if self.haar:
            return None
        return self.ensemble


def _quantum_entry(ident, ensemble, factory) -> ResolvedScheme:
    d = ensemble.dim
    return ResolvedScheme(
        ident=ident,
        kind="quantum",
        ensemble=ensemble,
        objective=schemes.cloning_objective(ensemble),
        dims=(d, d, d),
        strategy_factory=factory,
    )


def resolve_scheme(spec: str) -> ResolvedScheme:
    """Map a scheme name, name:d pair, or file path to problem data."""
    if spec == "wiesner":
        return _quantum_entry(spec, schemes.wiesner_ensemble(), cloners.wiesner_optimal_cloner)
    if spec == "six-state":
        return _quantum_entry(spec, schemes.six_state_ensemble(), cloners.buzek_hillery_cloner)
    if spec == "sic":
        return _quantum_entry(spec, schemes.sic_qubit_ensemble(), cloners.buzek_hillery_cloner)
    name, _, tail = spec.partition(":")
    if name in ("symmetric", "ticket") and tail:
        try:
            d = int(tail)
        except ValueError:
            raise ValueError(f"scheme {spec!r} needs an integer dimension") from None
        if d < 2:
            raise ValueError(f"scheme {spec!r} needs dimension at least 2")
        if name == "symmetric":
            return ResolvedScheme(
                ident=spec,
                kind="quantum",
                ensemble=schemes.fourier_ticket_scheme(d).ensemble(),
                objective=schemes.symmetric_cloning_objective(d),
                dims=(d, d, d),
                strategy_factory=lambda: cloners.werner_cloner(d),
                haar=True,
            )
        return ResolvedScheme(
            ident=spec,
            kind="ticket",
            ticket=schemes.fourier_ticket_scheme(d),
            strategy_factory=lambda: cloners.ticket_cloner(d),
        )
    if os.path.exists(spec):
        loaded = schemes.load_scheme(spec)
        if isinstance(loaded, schemes.Ensemble):
            return _quantum_entry(spec, loaded, None)
        return ResolvedScheme(ident=spec, kind="ticket", ticket=loaded)
    raise ValueError(
        f"unknown scheme {spec!r}: expected one of {', '.join(BUILTIN_SCHEMES)} "
        "or a scheme file path"
    )


def _check_tol(tol: float) -> float:
    if not 0.0 < tol <= 1.0:
        raise ValueError(f"tolerance must lie in (0, 1], got {tol}")
    return tol


def cmd_analyze(args) -> int:
    entry = resolve_scheme(args.scheme)
    if args.n < 1:
        raise ValueError(f"repetition count must be at least 1, got {args.n}")
    tol = _check_tol(args.tol)
    cert_tol = min(1.0, 10.0 * tol)
    if entry.kind == "ticket":
        blocks, weights = entry.challenge_blocks()
        problem = sdp.assemble_block_sdp(blocks, weights)
        solution = sdp.solve_block_diagonal(blocks, weights, tol=tol)
    else:
        problem = entry.problem()
        solution = sdp.solve(problem, tol=tol)
    report = certificates.certify(
        solution.primal_x, solution.dual_y, problem, tol=cert_tol
    )
    single = min(1.0, max(0.0, solution.primal_value))
    value = single**args.n
    record = {
        "scheme": entry.ident,
        "n": args.n,
        "single_value": single,
        "value": value,
        "iterations": solution.iterations,
        "gap": report.gap,
        "certified": report.certified,
    }
    _emit(record)
    payload = certificates.certificate_payload(
        problem, solution.primal_x, solution.dual_y, cert_tol, single
    )
    payload.update(
        scheme=entry.ident,
        n=args.n,
        repeated_value=value,
        iterations=solution.iterations,
        certified=report.certified,
    )
    _write_output(args.output, payload)
    return 0 if report.certified else 1


def cmd_certify(args) -> int:
    loaded = certificates.load_certificate(args.certificate)
    tol = loaded.tolerance if args.tol is None else _check_tol(args.tol)
    report = certificates.certify(
        loaded.primal_x, loaded.dual_y, loaded.problem, tol=tol
    )
    record = {
        "certificate": args.certificate,
        "tolerance": tol,
        "claimed_value": loaded.value,
        "primal_feasible": report.primal.feasible,
        "dual_feasible": report.dual.feasible,
        "primal_value": report.primal_value,
        "dual_value": report.dual_value,
        "primal_min_eigenvalue": report.primal.min_eigenvalue,
        "dual_min_eigenvalue": report.dual.min_eigenvalue,
        "gap": report.gap,
        "certified": report.certified,
    }
    _emit(record)
    _write_output(args.output, record)
    return 0 if report.certified else 1


def _report_record(report: simulator.TrialReport) -> dict:
    record = {
        "successes": report.successes,
        "trials": report.trials,
        "empirical": report.empirical,
        "analytic": report.analytic,
        "z": report.z_score,
    }
    if report.conditional_rate is not None:
        record["conditional"] = report.conditional_rate
    return record


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise ValueError(f"trial count must be at least 1, got {args.trials}")
    if args.attack == "bell":
        if args.scheme is not None:
            raise ValueError("choose either --attack bell or --scheme, not both")
        report = simulator.simulate_bell_attack(args.n, args.trials, seed=args.seed)
        record = {
            "attack": "bell",
            "n": args.n,
            "trials": args.trials,
            "seed": args.seed,
            **_report_record(report),
        }
        _emit(record)
        _write_output(args.output, record)
        return 0
    if args.scheme is None:
        raise ValueError("simulate needs --scheme NAME or --attack bell")
    entry = resolve_scheme(args.scheme)
    if args.n < 1:
        raise ValueError(f"repetition count must be at least 1, got {args.n}")
    if entry.kind == "ticket":
        report = _simulate_ticket(entry, args)
    else:
        report = _simulate_quantum(entry, args)
    record = {
        "scheme": entry.ident,
        "strategy": args.strategy,
        "trials": args.trials,
        "seed": args.seed,
        "n": args.n,
        **_report_record(report),
    }
    _emit(record)
    _write_output(args.output, record)
    return 0


def _simulate_quantum(entry: ResolvedScheme, args) -> simulator.TrialReport:
    if args.strategy != "optimal":
        raise ValueError(
            f"unknown strategy {args.strategy!r} for scheme {entry.ident!r}; "
            "quantum schemes support 'optimal'"
        )
    if entry.strategy_factory is not None:
        strategy = entry.strategy_factory()
    else:
        problem = entry.problem()
        solution = sdp.solve(problem, tol=1e-9)
        strategy = channels.ChoiOperator(
            solution.primal_x, problem.in_dim, problem.out_dim
        )
    cfg = simulator.TrialConfig(
        entry.ensemble, strategy, args.trials, seed=args.seed, repetitions=args.n
    )
    return simulator.simulate_quantum_attack(cfg)


def _simulate_ticket(entry: ResolvedScheme, args) -> simulator.TrialReport:
    if args.strategy == "honest":
        if args.n != 1:
            raise ValueError("honest verification simulates a single note")
        return simulator.simulate_honest_verification(
            entry.ticket, args.trials, seed=args.seed
        )
    if args.strategy in ("optimal", "ticket-cloner"):
        if entry.strategy_factory is None:
            raise ValueError(
                f"scheme {entry.ident!r} has no built-in optimal strategy; "
                "use --strategy honest"
            )
        cfg = simulator.TrialConfig(
            entry.ticket,
            entry.strategy_factory(),
            args.trials,
            seed=args.seed,
            repetitions=args.n,
        )
        return simulator.simulate_ticket_attack(cfg)
    raise ValueError(
        f"unknown strategy {args.strategy!r} for scheme {entry.ident!r}; "
        "ticket schemes support 'optimal', 'ticket-cloner', 'honest'"
    )


def cmd_threshold(args) -> int:
    entry = resolve_scheme(args.scheme)
    if args.n < 1:
        raise ValueError(f"repetition count must be at least 1, got {args.n}")
    if not 1 <= args.t <= args.n:
        raise ValueError(f"threshold must lie in [1, {args.n}], got {args.t}")
    tol = _check_tol(args.tol)
    ensemble = entry.cloning_ensemble()
    if ensemble is None:
        solution = sdp.solve(entry.problem(), tol=tol)
        alpha = min(1.0, max(0.0, solution.primal_value))
        conditions = False
    else:
        objective = schemes.cloning_objective(ensemble)
        d = ensemble.dim
        solution = sdp.solve(sdp.CloningSdp(objective, dims=(d, d, d)), tol=tol)
        solved = min(1.0, max(0.0, solution.primal_value))
        conditions = composition.threshold_conditions_hold(ensemble, solved)
        alpha = d * linalg.operator_norm(objective) if conditions else solved
    value = composition.threshold_value(alpha, args.n, args.t)
    record = {
        "scheme": entry.ident,
        "n": args.n,
        "t": args.t,
        "alpha": alpha,
        "value": value,
        "conditions": "certified" if conditions else "not-certified",
    }
    _emit(record)
    _write_output(args.output, record)
    return 0 if conditions else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmoney",
        description=(
            "Optimal counterfeiting analysis: solve cloning problems, verify "
            "certificates, simulate attacks, and bound threshold verification."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser(
        "analyze", help="solve a scheme's counterfeiting problem and certify it"
    )
    analyze.add_argument(
        "--scheme",
        required=True,
        help=f"built-in name ({', '.join(BUILTIN_SCHEMES)}) or scheme file path",
    )
    analyze.add_argument("--n", type=int, default=1, help="independent notes per trial")
    analyze.add_argument("--tol", type=float, default=sdp.DEFAULT_TOL, help="solver tolerance")
    analyze.add_argument("--output", help="write the record with an embedded certificate")
    analyze.set_defaults(func=cmd_analyze)

    certify = sub.add_parser("certify", help="verify a stored certificate file")
    certify.add_argument("certificate", help="certificate file path")
    certify.add_argument(
        "--tol", type=float, default=None, help="override the stored tolerance"
    )
    certify.add_argument("--output", help="write the verification report")
    certify.set_defaults(func=cmd_certify)

    simulate = sub.add_parser("simulate", help="Monte Carlo attack simulation")
    simulate.add_argument("--scheme", default=None, help="scheme name or file path")
    simulate.add_argument(
        "--strategy",
        default="optimal",
        help="attack strategy: optimal, ticket-cloner, honest",
    )
    simulate.add_argument(
        "--attack", choices=("bell",), default=None, help="run a named attack instead"
    )
    simulate.add_argument("--trials", type=int, default=1_000_000)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument(
        "--n",
        type=int,
        default=1,
        help="notes per trial (qubits per note for --attack bell)",
    )
    simulate.add_argument("--output", help="write the trial report")
    simulate.set_defaults(func=cmd_simulate)

    threshold = sub.add_parser(
        "threshold", help="tail bound for accepting t of n verifications"
    )
    threshold.add_argument("--scheme", required=True, help="scheme name or file path")
    threshold.add_argument("--n", type=int, required=True, help="number of verifications")
    threshold.add_argument("--t", type=int, required=True, help="acceptance threshold")
    threshold.add_argument("--tol", type=float, default=sdp.DEFAULT_TOL, help="solver tolerance")
    threshold.add_argument("--output", help="write the threshold record")
    threshold.set_defaults(func=cmd_threshold)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CertificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DimensionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuantumMoneyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
