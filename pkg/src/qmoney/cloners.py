"""Explicit attack strategies with exactly evaluable success probabilities.

Three channel constructions cover the quantum-verification schemes: the
optimal attack on the four-state qubit scheme, the universal symmetric qubit
cloner, and its d-dimensional generalization acting through the symmetric
subspace.  For classical-verification schemes the attacker is a family of
measurements instead of a channel; those are represented measurement-first,
as one positive operator valued measure per challenge pair together with the
answer pair attached to each outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import linalg, schemes
from .channels import ChoiOperator, choi_from_kraus
from .exceptions import ChannelValidationError, DimensionError

POVM_COMPLETENESS_TOL = 1e-10
POVM_POSITIVITY_TOL = 1e-10
PAULI_CONJUGATION_TOL = 1e-12

CHALLENGE_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


def wiesner_optimal_cloner() -> ChoiOperator:
    """Optimal attack channel against the four-state qubit scheme.

    Two Kraus operators map one qubit to two.  Feeding any of the four scheme
    states and projecting both outputs back onto that state succeeds with
    probability 3/4, which matches the scheme's optimal counterfeiting value.
    """
    a0 = np.array(
        [[3.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]], dtype=np.complex128
    ) / math.sqrt(12.0)
    a1 = np.array(
        [[0.0, 1.0], [1.0, 0.0], [1.0, 0.0], [0.0, 3.0]], dtype=np.complex128
    ) / math.sqrt(12.0)
    return choi_from_kraus([a0, a1])


def buzek_hillery_cloner() -> ChoiOperator:
    """Universal symmetric qubit cloner.

    Both clones have overlap exactly 2/3 with every pure input state, so this
    single channel is an optimal attack against every qubit scheme whose
    value is 2/3, regardless of which ensemble realizes that value.
    """
    a0 = np.array(
        [[2.0, 0.0], [0.0, 1.0], [0.0, 1.0], [0.0, 0.0]], dtype=np.complex128
    ) / math.sqrt(6.0)
    a1 = np.array(
        [[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 2.0]], dtype=np.complex128
    ) / math.sqrt(6.0)
    return choi_from_kraus([a0, a1])


def werner_cloner(d: int) -> ChoiOperator:
    """Universal symmetric cloner on C^d.

    Acts as rho -> (2/(d+1)) S (rho tensor identity) S with S the projector
    onto the symmetric subspace of two copies.  The joint overlap of the two
    clones with any pure input is 2/(d+1).  The Choi operator is assembled by
    applying the action formula to matrix units, and the constructor's CP/TP
    validation doubles as a correctness check of the assembly.
    """
    if d < 2:
        raise DimensionError(f"need dimension at least 2, got {d}")
    sym = linalg.symmetric_projector(d, 2)
    scale = 2.0 / (d + 1.0)
    eye = np.eye(d, dtype=np.complex128)
    choi = np.zeros((d * d, d, d * d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=np.complex128)
            unit[i, j] = 1.0
            choi[:, i, :, j] = scale * (sym @ np.kron(unit, eye) @ sym)
    return ChoiOperator(choi.reshape(d**3, d**3), d, d * d)


@dataclass(frozen=True)
class PauliOperators:
    """Generalized Pauli operators on C^d.

    ``shift`` permutes the computational basis cyclically, ``phase`` rotates
    basis vector j by the j-th power of the primitive d-th root of unity, and
    ``fourier`` is the unitary conjugating phase into shift.
    """

    dim: int
    shift: np.ndarray
    phase: np.ndarray
    fourier: np.ndarray

    def __post_init__(self):
        eye = np.eye(self.dim)
        for name in ("shift", "phase", "fourier"):
            u = getattr(self, name)
            if u.shape != (self.dim, self.dim):
                raise DimensionError(f"{name} has shape {u.shape}, expected square of {self.dim}")
            if np.abs(u.conj().T @ u - eye).max() > PAULI_CONJUGATION_TOL:
                raise ChannelValidationError(f"{name} is not unitary")
        defect = np.abs(
            self.shift - self.fourier @ self.phase @ self.fourier.conj().T
        ).max()
        if defect > PAULI_CONJUGATION_TOL:
            raise ChannelValidationError(
                f"shift is not the Fourier conjugate of phase: defect {defect:.3e}"
            )


def pauli_operators(d: int) -> PauliOperators:
    """Shift, phase, and Fourier unitaries on C^d with shift = F phase F*."""
    if d < 2:
        raise DimensionError(f"need dimension at least 2, got {d}")
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)
    phase = np.diag(omega ** np.arange(d))
    fourier = np.array(
        [[omega ** (-(i * j)) for j in range(d)] for i in range(d)],
        dtype=np.complex128,
    ) / math.sqrt(d)
    return PauliOperators(d, shift, phase, fourier)


@dataclass(frozen=True)
class TicketStrategy:
    """Measurement attack on a classical-verification scheme.

    For each challenge pair (c1, c2) the attacker measures the note once with
    a POVM; each outcome carries the answer pair (a1, a2) it reports, a1 to
    the first verifier and a2 to the second.  Every plan must be a complete
    measurement: positive effects summing to the identity.
    """

    dim: int
    plans: Mapping[tuple[int, int], tuple[tuple[np.ndarray, tuple[int, int]], ...]]

    def __post_init__(self):
        if set(self.plans) != set(CHALLENGE_PAIRS):
            raise DimensionError(
                f"plans must cover exactly the challenge pairs {CHALLENGE_PAIRS}"
            )
        eye = np.eye(self.dim)
        for pair, plan in self.plans.items():
            total = np.zeros((self.dim, self.dim), dtype=np.complex128)
            for effect, answers in plan:
                if effect.shape != (self.dim, self.dim):
                    raise DimensionError(
                        f"effect for challenges {pair} has shape {effect.shape}"
                    )
                if len(answers) != 2:
                    raise DimensionError(f"outcome must carry an answer pair, got {answers}")
                if linalg.min_eigenvalue(linalg.as_hermitian(effect, tol=1e-9)) < -POVM_POSITIVITY_TOL:
                    raise ChannelValidationError(
                        f"effect for challenges {pair} is not positive semidefinite"
                    )
                total += effect
            defect = np.abs(total - eye).max()
            if defect > POVM_COMPLETENESS_TOL:
                raise ChannelValidationError(
                    f"measurement for challenges {pair} is incomplete: defect {defect:.3e}"
                )


def _ticket_state(d: int, paulis: PauliOperators) -> np.ndarray:
    """Normalized sum of the first vectors of the two encoding bases."""
    e0 = np.zeros(d, dtype=np.complex128)
    e0[0] = 1.0
    uniform = np.full(d, 1.0 / math.sqrt(d), dtype=np.complex128)
    vec = e0 + uniform
    return vec / math.sqrt(2.0 + 2.0 / math.sqrt(d))


def ticket_cloner(d: int) -> TicketStrategy:
    """Optimal simple counterfeiting strategy for the Fourier ticket scheme.

    Equal challenge pairs are answered by measuring in the challenged basis
    and repeating the outcome.  Mixed pairs use the covariant POVM whose d^2
    effects are shifted and phased projections of one fixed state; outcome
    (s, t) answers s to the challenge-0 verifier and t to the challenge-1
    verifier.  The attack succeeds with probability 3/4 + 1/(4 sqrt(d)).
    """
    if d < 2:
        raise DimensionError(f"need dimension at least 2, got {d}")
    paulis = pauli_operators(d)
    scheme = schemes.fourier_ticket_scheme(d)
    psi = _ticket_state(d, paulis)

    projectors: dict[tuple[int, int], np.ndarray] = {}
    shift_pow = np.eye(d, dtype=np.complex128)
    for s in range(d):
        phase_pow = np.eye(d, dtype=np.complex128)
        for t in range(d):
            vec = shift_pow @ phase_pow @ psi
            projectors[(s, t)] = np.outer(vec, vec.conj())
            phase_pow = phase_pow @ paulis.phase
        shift_pow = shift_pow @ paulis.shift

    mixed_01 = tuple(
        (projectors[(s, t)] / d, (s, t)) for s in range(d) for t in range(d)
    )
    mixed_10 = tuple(
        (projectors[(s, t)] / d, (t, s)) for s in range(d) for t in range(d)
    )
    plans: dict[tuple[int, int], tuple] = {(0, 1): mixed_01, (1, 0): mixed_10}
    for c in (0, 1):
        plan = []
        for t in range(d):
            vec = scheme.pair.vector(t, c)
            plan.append((np.outer(vec, vec.conj()), (t, t)))
        plans[(c, c)] = tuple(plan)
    return TicketStrategy(d, plans)


def evaluate_ticket_strategy(
    strategy: TicketStrategy, scheme: schemes.TicketScheme
) -> float:
    """Exact success probability of a measurement strategy against a scheme.

    Averages over the 2d equiprobable keys and the four equiprobable
    challenge pairs; for each, sums the Born probabilities of the outcomes
    whose answer pair passes both verifications.
    """
    if strategy.dim != scheme.dim:
        raise DimensionError(
            f"strategy dimension {strategy.dim} does not match scheme dimension {scheme.dim}"
        )
    p_key = 1.0 / (2 * scheme.dim)
    total = 0.0
    for (c1, c2), plan in strategy.plans.items():
        for key in scheme.keys():
            state = scheme.key_state(key)
            for effect, (a1, a2) in plan:
                if scheme.accept(a1, c1, key) and scheme.accept(a2, c2, key):
                    total += 0.25 * p_key * float(
                        np.real(state.conj() @ effect @ state)
                    )
    return min(1.0, max(0.0, total))
