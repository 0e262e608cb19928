"""Full atom-cavity master equation on a truncated Fock space.

This is the model before any dispersive approximation: a Jaynes-Cummings
interaction in the frame rotating with the atom, plus thermal atomic
emission and absorption.  It serves as an independent check of the
effective walk.

Composite basis order is ``|qubit> (x) |k>`` with the qubit most
significant: ``(e,0), (e,1), ..., (e,n_max), (g,0), ..., (g,n_max)``.
"""

from __future__ import annotations

import warnings
from collections.abc import Callable, Sequence
from functools import lru_cache

import numpy as np

from .linalg import annihilation, kron, matrix_exponential, number, pauli
from .ode import OdeProblem, integrate
from .thermal import ModelParams
from .walk import QUBIT_STATES, extract_blocks

__all__ = [
    "build_h_int",
    "excitation_number",
    "full_lindblad_rhs",
    "build_rotation",
    "effective_hamiltonian",
    "diagonality_residual",
    "product_state",
    "reduced_photon_distribution",
    "reduced_qubit_state",
    "photon_blocks",
    "evolve_full",
    "min_eigenvalue",
]

CUTOFF_WARN = 1e-6


def _check_cutoff(n_max: int) -> None:
    if int(n_max) != n_max or n_max < 2:
        raise ValueError(f"Fock cutoff must be an integer >= 2, got {n_max}")


@lru_cache(maxsize=32)
def _operators(n_max: int) -> dict[str, np.ndarray]:
    a = annihilation(n_max)
    eye_f = np.eye(n_max + 1, dtype=complex)
    eye_q = pauli("identity")
    return {
        "a": kron(eye_q, a),
        "ad": kron(eye_q, a.conj().T),
        "n": kron(eye_q, number(n_max)),
        "sp": kron(pauli("plus"), eye_f),
        "sm": kron(pauli("minus"), eye_f),
        "sz": kron(pauli("z"), eye_f),
        "eye": np.eye(2 * (n_max + 1), dtype=complex),
    }


def build_h_int(p: ModelParams, n_max: int) -> np.ndarray:
    """``delta a^dagger a + g (a sigma_plus + a^dagger sigma_minus)``."""
    _check_cutoff(n_max)
    op = _operators(n_max)
    return p.delta * op["n"] + p.g * (op["a"] @ op["sp"] + op["ad"] @ op["sm"])


def excitation_number(n_max: int) -> np.ndarray:
    """``a^dagger a + sigma_z / 2``, conserved by the interaction away from the cutoff."""
    op = _operators(n_max)
    return op["n"] + 0.5 * op["sz"]


@lru_cache(maxsize=32)
def _effective_generator(p: ModelParams, n_max: int) -> np.ndarray:
    # H - (i/2) sum_j rate_j L_j^dagger L_j; s+ s- and s- s+ are the |e> and |g> projectors
    half = n_max + 1
    decay = np.zeros(2 * half)
    decay[:half] = p.gamma * (p.n_th + 1)
    decay[half:] = p.gamma * p.n_th
    return build_h_int(p, n_max) - 0.5j * np.diag(decay)


def full_lindblad_rhs(rho: np.ndarray, p: ModelParams) -> np.ndarray:
    """Master-equation derivative for a density matrix of dimension ``2 (n_max + 1)``.

    Evaluates ``-i[H, rho] + gamma (n_th+1) L[s-, s+] rho + gamma n_th L[s+, s-] rho``
    as ``-i (K rho - rho K^dagger)`` plus the two jump terms, where ``K``
    folds the anticommutators into a non-Hermitian generator.  The jumps
    only move qubit blocks: ``s- rho s+`` copies the ``ee`` block to ``gg``.
    """
    dim = rho.shape[0]
    if rho.shape != (dim, dim) or dim % 2:
        raise ValueError(f"expected an even-dimensional square matrix, got {rho.shape}")
    n_max = dim // 2 - 1
    _check_cutoff(n_max)
    k = _effective_generator(p, n_max)
    out = -1j * (k @ rho - rho @ k.conj().T)
    half = n_max + 1
    out[half:, half:] += p.gamma * (p.n_th + 1) * rho[:half, :half]
    out[:half, :half] += p.gamma * p.n_th * rho[half:, half:]
    return out


def build_rotation(p: ModelParams, n_max: int) -> np.ndarray:
    """Small unitary rotation ``exp(eps (a^dagger sigma_minus - a sigma_plus))``."""
    _check_cutoff(n_max)
    op = _operators(n_max)
    generator = p.epsilon * (op["ad"] @ op["sm"] - op["a"] @ op["sp"])
    return matrix_exponential(generator)


def effective_hamiltonian(p: ModelParams, n_max: int) -> np.ndarray:
    """``delta a^dagger a - (g^2/delta)(a^dagger a sigma_z + sigma_z/2 + 1/2)``."""
    op = _operators(n_max)
    return p.delta * op["n"] - p.chi * (op["n"] @ op["sz"] + 0.5 * op["sz"] + 0.5 * op["eye"])


def _low_photon_index(n_max: int) -> np.ndarray:
    keep = np.arange(n_max // 2 + 1)
    return np.concatenate([keep, keep + n_max + 1])


def _qubit_offdiag_norm(m: np.ndarray) -> float:
    half = m.shape[0] // 2
    return float(np.sqrt(np.linalg.norm(m[:half, half:]) ** 2 + np.linalg.norm(m[half:, :half]) ** 2))


def diagonality_residual(p: ModelParams, n_max: int) -> tuple[float, float, float]:
    """How far the rotated interaction is from qubit-diagonal.

    Returns ``(r_before, r_after, d)``: Frobenius norms of the part of
    ``H_int`` and of ``U H_int U^dagger`` that flips the qubit, and the
    distance of ``U H_int U^dagger`` from the effective Hamiltonian.  All
    are evaluated on photon numbers ``<= n_max // 2`` to stay clear of
    truncation artifacts.
    """
    h = build_h_int(p, n_max)
    u = build_rotation(p, n_max)
    rotated = u @ h @ u.conj().T
    idx = _low_photon_index(n_max)
    sub = np.ix_(idx, idx)
    r_before = _qubit_offdiag_norm(h[sub])
    r_after = _qubit_offdiag_norm(rotated[sub])
    d = float(np.linalg.norm((rotated - effective_hamiltonian(p, n_max))[sub]))
    return r_before, r_after, d


def product_state(qubit: str | np.ndarray, k: int, n_max: int) -> np.ndarray:
    """``rho_qubit (x) |k><k|`` on the composite space."""
    _check_cutoff(n_max)
    if not 0 <= k <= n_max:
        raise ValueError(f"photon number {k} outside [0, {n_max}]")
    rho_q = QUBIT_STATES[qubit] if isinstance(qubit, str) else np.asarray(qubit, dtype=complex)
    fock = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    fock[k, k] = 1.0
    return np.kron(rho_q, fock)


def reduced_photon_distribution(rho: np.ndarray) -> np.ndarray:
    diag = np.real(np.diagonal(rho)).reshape(2, -1)
    return diag.sum(axis=0)


def reduced_qubit_state(rho: np.ndarray) -> np.ndarray:
    n = rho.shape[0] // 2
    return np.trace(rho.reshape(2, n, 2, n), axis1=1, axis2=3)


def photon_blocks(rho: np.ndarray) -> np.ndarray:
    """Qubit block ``<k| rho |k>`` for every photon number, shape ``(n_max+1, 2, 2)``."""
    return extract_blocks(rho)


def min_eigenvalue(rho: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])


def evolve_full(
    rho0: np.ndarray,
    p: ModelParams,
    t_end: float,
    dt_ode: float | None = None,
    sample_times: Sequence[float] | None = None,
    recorder: Callable[[float, np.ndarray], None] | None = None,
) -> np.ndarray:
    """Integrate the full master equation from ``rho0`` to ``t_end`` with RK4.

    The default step keeps ``omega dt <= 0.1`` for the fastest free
    oscillation ``delta n_max`` (and at most ``p.dt / 10``).  Warns when more than
    ``CUTOFF_WARN`` of the photon population sits above ``n_max / 2`` at
    the end.
    """
    n_max = rho0.shape[0] // 2 - 1
    if dt_ode is None:
        fastest = p.delta * n_max + 2 * p.g * np.sqrt(n_max) + p.gamma * (2 * p.n_th + 1)
        dt_ode = min(p.dt / 10 if p.dt > 0 else np.inf, 0.1 / fastest)
    problem = OdeProblem(np.asarray(rho0, dtype=complex), lambda r: full_lindblad_rhs(r, p), 0.0, t_end, dt_ode)
    final = integrate(problem, recorder, sample_times)
    high = reduced_photon_distribution(final)[n_max // 2 + 1 :].sum()
    if high > CUTOFF_WARN:
        warnings.warn(f"{high:.2e} of the photon population lies above n_max/2; cutoff artifacts likely", stacklevel=2)
    return final
