"""Optimal counterfeiting attacks on quantum money schemes.

Computes exact optimal success probabilities for simple counterfeiting
attacks as semidefinite programs, certifies the values with primal/dual
feasibility checks, builds the known analytic attack channels, and runs
Monte Carlo protocol simulations.
"""

from .certificates import (
    CertificateReport,
    certify,
    check_dual,
    check_primal,
    load_certificate,
    save_certificate,
)
from .channels import ChoiOperator, apply_channel, choi_from_kraus, success_probability
from .cloners import (
    TicketStrategy,
    buzek_hillery_cloner,
    evaluate_ticket_strategy,
    ticket_cloner,
    werner_cloner,
    wiesner_optimal_cloner,
)
from .composition import (
    repeated_sdp,
    repeated_value,
    tensor_certificates,
    threshold_sdp,
    threshold_value,
)
from .exceptions import QuantumMoneyError
from .schemes import (
    Ensemble,
    TicketScheme,
    fourier_ticket_scheme,
    load_scheme,
    save_scheme,
    sic_qubit_ensemble,
    six_state_ensemble,
    wiesner_ensemble,
)
from .sdp import CloningSdp, SdpSolution, solve, solve_block_diagonal
from .simulator import (
    TrialConfig,
    TrialReport,
    simulate_bell_attack,
    simulate_quantum_attack,
    simulate_ticket_attack,
)

__version__ = "0.1.0"

__all__ = [
    "CertificateReport",
    "ChoiOperator",
    "CloningSdp",
    "Ensemble",
    "QuantumMoneyError",
    "SdpSolution",
    "TicketScheme",
    "TicketStrategy",
    "TrialConfig",
    "TrialReport",
    "apply_channel",
    "buzek_hillery_cloner",
    "certify",
    "check_dual",
    "check_primal",
    "choi_from_kraus",
    "evaluate_ticket_strategy",
    "fourier_ticket_scheme",
    "load_certificate",
    "load_scheme",
    "repeated_sdp",
    "repeated_value",
    "save_certificate",
    "save_scheme",
    "sic_qubit_ensemble",
    "simulate_bell_attack",
    "simulate_quantum_attack",
    "simulate_ticket_attack",
    "six_state_ensemble",
    "solve",
    "solve_block_diagonal",
    "success_probability",
    "tensor_certificates",
    "threshold_sdp",
    "threshold_value",
    "ticket_cloner",
    "werner_cloner",
    "wiesner_ensemble",
    "wiesner_optimal_cloner",
]
