"""Two-level atom in a detuned cavity with a thermal environment.

In the dispersive limit ``eps = g / delta << 1`` the photon number ``k``
labels the walker's site and the atom is its internal qubit.  This module
builds the per-site jump operators of the resulting walk, the equivalent
block master equation, and the photon-number dependent local Hamiltonian.

Rates and times are in the units of ``delta``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import lindblad_term, matrix_exponential, pauli, psd_sqrt_2x2
from .walk import TransitionSet, WalkerState

__all__ = [
    "ModelParams",
    "ParameterError",
    "CompletionFailed",
    "MODES",
    "thermal_occupation",
    "local_hamiltonian",
    "build_site_operators",
    "build_completed_site_operators",
    "build_transition_set",
    "ode_rhs",
]

MODES = ("paper", "completed")

EPS_WARN = 0.1
EPS_LIMIT = 0.3
DEFAULT_K_MAX = 200

SIGMA_PLUS = pauli("plus")
SIGMA_MINUS = pauli("minus")
SIGMA_Z = pauli("z")
IDENTITY = pauli("identity")
PROJ_E = SIGMA_PLUS @ SIGMA_MINUS
PROJ_G = SIGMA_MINUS @ SIGMA_PLUS


class ParameterError(ValueError):
    pass


class CompletionFailed(ParameterError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the cavity walk.

    ``g`` coupling, ``delta`` detuning, ``gamma`` atomic emission rate,
    ``n_th`` mean thermal photon number, ``dt`` discrete step and ``k_max``
    the highest Fock state kept.  Defaults: ``g = 0.02``, ``delta = 1``,
    ``gamma = 0.2``, ``dt = 0.02``, ``n_th = 1``.
    """

    g: float = 0.02
    delta: float = 1.0
    gamma: float = 0.2
    n_th: float = 1.0
    dt: float = 0.02
    k_max: int = DEFAULT_K_MAX

    def __post_init__(self) -> None:
        for name in ("g", "delta", "gamma", "n_th", "dt"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}")
        if self.delta <= 0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        if self.g < 0:
            raise ParameterError(f"g must be non-negative, got {self.g}")
        if self.gamma < 0:
            raise ParameterError(f"gamma must be non-negative, got {self.gamma}")
        if self.n_th < 0:
            raise ParameterError(f"n_th must be non-negative, got {self.n_th}")
        if self.dt < 0:
            raise ParameterError(f"dt must be non-negative, got {self.dt}")
        if int(self.k_max) != self.k_max or self.k_max < 0:
            raise ParameterError(f"k_max must be a non-negative integer, got {self.k_max}")

        eps = self.epsilon
        if eps >= EPS_LIMIT:
            raise ParameterError(f"epsilon = g/delta = {eps:g} is outside the dispersive regime (>= {EPS_LIMIT})")
        if eps > EPS_WARN:
            warnings.warn(f"epsilon = {eps:g} exceeds {EPS_WARN}; dispersive approximation is poor", stacklevel=3)
        if self.k_max > self.k_ceiling:
            raise ParameterError(
                f"k_max = {self.k_max} exceeds the dispersive ceiling {self.k_ceiling} "
                f"(square-root arguments turn negative)"
            )
        # jump probabilities are monotone in k, so checking k = 0 suffices
        e2 = eps * eps
        p_down = self.gamma * (self.n_th + 1) * self.dt * (1 - 2 * e2)
        p_up = self.gamma * self.n_th * self.dt * (1 - 3 * e2)
        if p_down > 1 or p_up > 1:
            raise ParameterError(
                f"jump probabilities per step exceed 1 (emission {p_down:g}, absorption {p_up:g}); reduce dt"
            )

    @property
    def epsilon(self) -> float:
        return self.g / self.delta

    @property
    def chi(self) -> float:
        """Dispersive shift ``g**2 / delta``."""
        return self.g * self.g / self.delta

    @property
    def k_ceiling(self) -> int | float:
        """Largest site for which every square-root argument is non-negative."""
        e2 = self.epsilon**2
        if e2 == 0:
            return math.inf
        return math.floor((1.0 / e2 - 3.0) / 2.0)

    def replace(self, **changes) -> ModelParams:
        fields = {name: getattr(self, name) for name in ("g", "delta", "gamma", "n_th", "dt", "k_max")}
        fields.update(changes)
        return ModelParams(**fields)

    def rates(self, k):
        """Per-site rates ``(emission, absorption, down_jump, up_jump)``.

        Emission and absorption multiply the sigma_minus / sigma_plus
        dissipators; the jump rates move the walker from ``k`` to ``k - 1``
        and ``k + 1``.  ``k`` may be an integer or an array.
        """
        e2 = self.epsilon**2
        k = np.asarray(k, dtype=float)
        emission = self.gamma * (self.n_th + 1) * (1 - 2 * e2 * (k + 1))
        absorption = self.gamma * self.n_th * (1 - e2 * (2 * k + 3))
        down = self.gamma * (self.n_th + 1) * e2 * k
        up = self.gamma * self.n_th * e2 * (k + 1)
        return emission, absorption, down, up


def thermal_occupation(beta_omega: float) -> float:
    """Bose-Einstein occupation ``1 / (exp(beta hbar omega) - 1)``."""
    if not beta_omega > 0:
        raise ValueError(f"beta_omega must be positive, got {beta_omega}")
    return 1.0 / math.expm1(beta_omega)


def local_hamiltonian(p: ModelParams, k: int) -> np.ndarray:
    """Block of the dispersive shift at photon number ``k``: ``chi (k sz + sz/2 + 1/2)``."""
    if k < 0:
        raise ValueError(f"site must be non-negative, got {k}")
    return p.chi * (k * SIGMA_Z + 0.5 * SIGMA_Z + 0.5 * IDENTITY)


def _check_site(p: ModelParams, k: int) -> None:
    if not 0 <= k <= p.k_max:
        raise ParameterError(f"site {k} outside [0, {p.k_max}]")


def build_site_operators(p: ModelParams, k: int) -> list[tuple[int, np.ndarray]]:
    """The five Kraus operators leaving site ``k`` as ``(target, operator)``.

    Order: emission (``sigma_minus``), absorption (``sigma_plus``), the
    no-jump operator, the jump to ``k - 1`` and the jump to ``k + 1``.  The
    set is trace preserving only to first order in ``dt``.
    """
    _check_site(p, k)
    emission, absorption, down, up = (float(r) for r in p.rates(k))
    dt = p.dt
    no_jump = (
        IDENTITY
        + 1j * dt * local_hamiltonian(p, k)
        - 0.5 * dt * down * IDENTITY
        - 0.5 * dt * emission * PROJ_E
        - 0.5 * dt * absorption * PROJ_G
        - 0.5 * dt * up * IDENTITY
    )
    return [
        (k, math.sqrt(emission * dt) * SIGMA_MINUS),
        (k, math.sqrt(absorption * dt) * SIGMA_PLUS),
        (k, no_jump),
        (k - 1, math.sqrt(down * dt) * SIGMA_Z),
        (k + 1, math.sqrt(up * dt) * SIGMA_Z),
    ]


def build_completed_site_operators(p: ModelParams, k: int) -> list[tuple[int, np.ndarray]]:
    """Same operators with the no-jump term replaced to make the set exactly CPTP.

    The no-jump operator becomes ``exp(i dt H_k) sqrt(I - S_k)`` where
    ``S_k`` sums ``B^dagger B`` over the four jump operators.
    """
    ops = build_site_operators(p, k)
    jumps = [op for i, (_, op) in enumerate(ops) if i != 2]
    s_k = sum(op.conj().T @ op for op in jumps)
    remainder = IDENTITY - s_k
    try:
        root = psd_sqrt_2x2(remainder)
    except ValueError:
        raise CompletionFailed(
            f"I - S_k is not positive semidefinite at site {k}; parameters too aggressive"
        ) from None
    phase = matrix_exponential(1j * p.dt * local_hamiltonian(p, k))
    ops[2] = (k, phase @ root)
    return ops


def build_transition_set(p: ModelParams, mode: str = "paper") -> TransitionSet:
    """Transition set over sites ``0..p.k_max`` in ``paper`` or ``completed`` mode."""
    if mode == "paper":
        builder, norm = build_site_operators, "first_order"
    elif mode == "completed":
        builder, norm = build_completed_site_operators, "exact"
    else:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    nodes = [builder(p, k) for k in range(p.k_max + 1)]
    return TransitionSet.from_node_lists(nodes, normalization=norm, dt=p.dt)


def ode_rhs(state: WalkerState | np.ndarray, p: ModelParams) -> np.ndarray:
    """Time derivative of every block under the block master equation.

    Neighbour blocks beyond ``[0, k_max]`` count as zero, so probability
    flowing upward from ``k_max`` is lost exactly as in the discrete walk.
    """
    rho = state.blocks if isinstance(state, WalkerState) else np.asarray(state)
    if rho.shape != (p.k_max + 1, 2, 2):
        raise ParameterError(f"state shape {rho.shape} does not match k_max = {p.k_max}")
    k = np.arange(p.k_max + 1)
    emission, absorption, down, up = (r[:, None, None] for r in p.rates(k))

    # diagonal local Hamiltonian: chi (k + 1) on |e>, -chi k on |g>
    h = np.zeros_like(rho)
    h[:, 0, 0] = p.chi * (k + 1)
    h[:, 1, 1] = -p.chi * k
    drho = 1j * (h @ rho - rho @ h)

    zrz = SIGMA_Z @ rho @ SIGMA_Z
    from_above = np.zeros_like(rho)
    from_above[:-1] = zrz[1:]
    from_below = np.zeros_like(rho)
    from_below[1:] = zrz[:-1]
    # arrival rates evaluated at the source site
    drho[:-1] += down[1:] * from_above[:-1]
    drho[1:] += up[:-1] * from_below[1:]
    drho -= (down + up) * rho

    drho += emission * lindblad_term(SIGMA_MINUS, SIGMA_PLUS, rho)
    drho += absorption * lindblad_term(SIGMA_PLUS, SIGMA_MINUS, rho)
    return drho
