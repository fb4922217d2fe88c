"""Qubit velocity weakly coupled to a two-state ancilla (the waiting detector).

The composite Hamiltonian is::

    H = (omega/2) sigma_x ⊗ 1 + lam * omega * sigma_y ⊗ (|0><1| + |1><0|)

It squares to ``(Omega**2 / 4) * 1`` with ``Omega = omega * sqrt(1 + 4 lam**2)``,
which gives the propagator in closed form.  Starting from ancilla ``|0>`` the
propagator splits into two system operators ``A0`` (no click) and ``A1``
(click); all statistics below are built from them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import UnusableReadoutError, ZeroProbabilityBranchError
from .spin import ProtocolParams, correlation
from .streams import map_chunks

MIN_BRANCH_PROB = 1e-14

_SAMPLE_TAG = 0x5157


def big_omega(params: ProtocolParams) -> float:
    return params.omega * math.sqrt(1.0 + 4.0 * params.lam**2)


@dataclass(frozen=True)
class CoupledModel:
    """Convenience wrapper bundling the parameters with the derived frequency."""

    params: ProtocolParams

    @property
    def big_omega(self) -> float:
        return big_omega(self.params)

    @property
    def hamiltonian(self) -> np.ndarray:
        return coupled_hamiltonian(self.params)

    def unitary(self, t: float) -> np.ndarray:
        return evolution_unitary(self.params, t)

    def kraus(self, t: float) -> "KrausPair":
        return kraus_pair(self.params, t)


@dataclass(frozen=True)
class KrausPair:
    a0: np.ndarray
    a1: np.ndarray
    t: float

    def completeness_residual(self) -> float:
        total = la.dag(self.a0) @ self.a0 + la.dag(self.a1) @ self.a1
        return float(np.max(np.abs(total - np.eye(2))))

    def proportionality_residual(self) -> float:
        """How far each of ``A0†A0`` and ``A1†A1`` is from a multiple of 1."""
        worst = 0.0
        for a in (self.a0, self.a1):
            m = la.dag(a) @ a
            scalar = np.trace(m) / 2.0
            worst = max(worst, float(np.max(np.abs(m - scalar * np.eye(2)))))
        return worst


def coupled_hamiltonian(params: ProtocolParams) -> np.ndarray:
    w, lam = params.omega, params.lam
    return 0.5 * w * la.tensor(la.pauli("x"), la.identity()) + lam * w * la.tensor(
        la.pauli("y"), la.FLIP
    )


def evolution_unitary(params: ProtocolParams, t: float) -> np.ndarray:
    om = big_omega(params)
    h = coupled_hamiltonian(params)
    return math.cos(om * t / 2.0) * np.eye(4) - (2j / om) * math.sin(om * t / 2.0) * h


def kraus_pair(params: ProtocolParams, t: float) -> KrausPair:
    w, lam = params.omega, params.lam
    om = big_omega(params)
    c, s = math.cos(om * t / 2.0), math.sin(om * t / 2.0)
    a0 = c * np.eye(2) - (1j * w / om) * s * la.pauli("x")
    a1 = -(2j * lam * w / om) * s * la.pauli("y")
    return KrausPair(a0=a0.astype(complex), a1=a1.astype(complex), t=float(t))


def p1_closed_form(params: ProtocolParams, t: float) -> float:
    """Click probability ``(2 lam^2 omega^2 / Omega^2) (1 - cos Omega t)``."""
    om = big_omega(params)
    return 2.0 * params.lam**2 * params.omega**2 / om**2 * (1.0 - math.cos(om * t))


def detection_probabilities(params: ProtocolParams, t: float, psi) -> tuple[float, float]:
    """Return ``(p0, p1)``, the no-click and click probabilities at time ``t``."""
    psi = la.pure_state(psi)
    k = kraus_pair(params, t)
    p0 = float(np.vdot(k.a0 @ psi, k.a0 @ psi).real)
    p1 = float(np.vdot(k.a1 @ psi, k.a1 @ psi).real)
    return p0, p1


def readout_correlation(p1: float, lam: float) -> float:
    """Weak-coupling inversion ``C12 = 1 - p1 / (2 lam^2)``.

    Exact only to leading order: the true click probability carries the
    shifted frequency Omega, which biases the estimate by O(lam^2).
    """
    if lam == 0:
        raise UnusableReadoutError("readout requires lambda > 0")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    if not (0.0 <= p1 <= 1.0):
        raise ValueError(f"p1 must be a probability, got {p1!r}")
    return 1.0 - p1 / (2.0 * lam**2)


def readout_lambda_sensitivity(p1: float, lam: float, rel_step: float = 1e-6) -> float:
    """Numerical ``dC12/dlam`` at fixed measured ``p1`` (central difference)."""
    h = lam * rel_step
    return (readout_correlation(p1, lam + h) - readout_correlation(p1, lam - h)) / (2.0 * h)


@dataclass(frozen=True)
class SameDiffDecomposition:
    p_same: float
    p_diff: float
    p0: float
    p1: float
    lam: float

    @property
    def residual_p1(self) -> float:
        """``p1 - 4 lam^2 pD``; O(lam^4)."""
        return self.p1 - 4.0 * self.lam**2 * self.p_diff

    @property
    def residual_p0(self) -> float:
        """``p0 - (pS + (1 - 4 lam^2) pD)``; O(lam^4)."""
        return self.p0 - (self.p_same + (1.0 - 4.0 * self.lam**2) * self.p_diff)


def same_diff_decomposition(params: ProtocolParams, t: float) -> SameDiffDecomposition:
    """Compare exact ancilla statistics with the same/different-sign split of ``Q``."""
    c12 = correlation(params.omega, 0.0, t)
    p1 = p1_closed_form(params, t)
    return SameDiffDecomposition(
        p_same=0.5 * (1.0 + c12),
        p_diff=0.5 * (1.0 - c12),
        p0=1.0 - p1,
        p1=p1,
        lam=params.lam,
    )


def reduced_state(rho0, params: ProtocolParams, t: float) -> np.ndarray:
    rho0 = la.density_matrix(rho0)
    k = kraus_pair(params, t)
    return k.a0 @ rho0 @ la.dag(k.a0) + k.a1 @ rho0 @ la.dag(k.a1)


def conditional_expectation(psi, obs, branch: int, params: ProtocolParams, t: float) -> float:
    """Average of ``obs`` given that the ancilla reads ``branch`` at time ``t``."""
    psi = la.pure_state(psi)
    obs = np.asarray(obs, dtype=complex)
    if not la.is_hermitian(obs):
        raise ValueError("observable must be Hermitian")
    if branch not in (0, 1):
        raise ValueError("branch must be 0 or 1")
    k = kraus_pair(params, t)
    phi = (k.a0 if branch == 0 else k.a1) @ psi
    prob = float(np.vdot(phi, phi).real)
    if prob <= MIN_BRANCH_PROB:
        raise ZeroProbabilityBranchError(
            f"branch {branch} has probability {prob:.3g} at t={t!r}"
        )
    return float(np.vdot(phi, obs @ phi).real) / prob


def conditional_disturbance(psi, obs, branch: int, params: ProtocolParams, t: float) -> float:
    """Shift of the conditioned average relative to the uncoupled (lam -> 0) dynamics.

    With no coupling the system just precesses, so the reference value is
    ``<psi(t)| obs |psi(t)>`` for the free evolution.
    """
    value = conditional_expectation(psi, obs, branch, params, t)
    psi = la.pure_state(psi)
    free = la.mat_exp(0.5 * params.omega * la.pauli("x"), t) @ psi
    return value - la.expectation(free, np.asarray(obs, dtype=complex))


def _ancilla_projector(i: int) -> np.ndarray:
    p = np.zeros((2, 2), dtype=complex)
    p[i, i] = 1.0
    return la.tensor(la.identity(), p)


def back_action_history_probs(psi, params: ProtocolParams, t: float) -> tuple[float, float]:
    """Probabilities of the ancilla histories 0->1->0 and 0->1->1 at times 0, t, 2t.

    The ancilla is read projectively at ``t`` and again at ``2t``.
    """
    psi = la.pure_state(psi)
    u = evolution_unitary(params, t)
    start = la.tensor(psi.reshape(2, 1), np.array([[1.0], [0.0]])).reshape(4)
    mid = _ancilla_projector(1) @ u @ start
    after = u @ mid
    branch0 = _ancilla_projector(0) @ after
    branch1 = _ancilla_projector(1) @ after
    p010 = float(np.vdot(branch0, branch0).real)
    p011 = float(np.vdot(branch1, branch1).real)
    return p010, p011


def back_action_closed_form(params: ProtocolParams, t: float) -> tuple[float, float]:
    w, lam = params.omega, params.lam
    om = big_omega(params)
    s, c = math.sin(om * t / 2.0), math.cos(om * t / 2.0)
    p010 = 16.0 * lam**4 * w**4 / om**4 * s**4
    p011 = 4.0 * lam**2 * w**2 / om**2 * s**2 * (c**2 + w**2 / om**2 * s**2)
    return p010, p011


@dataclass(frozen=True)
class ProtocolSample:
    n0: int
    n1: int
    c12_hat: float
    stderr: float


def sample_protocol(
    params: ProtocolParams,
    t: float,
    psi,
    n_runs: int,
    seed: int,
    workers: int = 1,
) -> ProtocolSample:
    """Monte Carlo emulation of ``n_runs`` repetitions of the single-interval protocol.

    Each run reads the ancilla once at ``t``; the click count is binomial
    with the exact ``p1``.  The estimate ``c12_hat`` uses the weak readout
    and ``stderr`` is the binomial error pushed through it.
    """
    if params.lam <= 0:
        raise UnusableReadoutError("readout requires lambda > 0")
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    _, p1 = detection_probabilities(params, t, psi)
    p1 = min(max(p1, 0.0), 1.0)

    counts = map_chunks(lambda rng, m: int(rng.binomial(m, p1)), n_runs, seed, _SAMPLE_TAG, workers)
    n1 = sum(counts)
    n0 = n_runs - n1
    f = n1 / n_runs
    scale = 2.0 * params.lam**2
    return ProtocolSample(
        n0=n0,
        n1=n1,
        c12_hat=1.0 - f / scale,
        stderr=math.sqrt(f * (1.0 - f) / n_runs) / scale,
    )


def velocity_frame_operator(omega: float, t: float) -> np.ndarray:
    """``Q U - U Q`` for the free propagator ``U``; proportional to sigma_y."""
    u = la.mat_exp(0.5 * omega * la.pauli("x"), t)
    q = la.pauli("z")
    return q @ u - u @ q

