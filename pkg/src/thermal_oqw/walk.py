"""Discrete-time open quantum walks on a finite line.

The walker state is block diagonal in position: one 2x2 density block per
site ``k = 0..k_max``.  Transitions are Kraus operators ``B`` attached to a
source site and a nearest-neighbour target; one step maps

    rho_k' = sum over (source j -> k) of  B rho_j B^dagger.

Contributions whose target lies outside ``[0, k_max]`` are dropped and their
trace is metered as leak.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .linalg import adjoint, min_eigenvalues_2x2

__all__ = [
    "WalkerState",
    "TransitionSet",
    "StepPolicy",
    "WalkError",
    "LeakExceeded",
    "PositivityBreach",
    "verify_normalization",
    "step",
    "evolve",
    "dilate_global",
    "embed_global",
    "extract_blocks",
    "apply_kraus",
]

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
PSD_HARD_LIMIT = -1e-8
EXACT_TOL = 1e-12
MAX_DILATION_SITES = 9

QUBIT_STATES = {
    "excited": np.array([[1, 0], [0, 0]], dtype=complex),
    "ground": np.array([[0, 0], [0, 1]], dtype=complex),
}


class WalkError(RuntimeError):
    """Base class for runtime invariant breaches during a walk."""

    step: int | None = None


class LeakExceeded(WalkError):
    pass


class PositivityBreach(WalkError):
    pass


@dataclass
class WalkerState:
    """Position-diagonal walker: ``blocks[k]`` is the 2x2 block on site ``k``.

    ``leak`` is the cumulative probability dropped at the lattice edges and
    ``trace_pre_renorm`` the total trace just before the last renormalisation
    (1 when nothing was rescaled).
    """

    blocks: np.ndarray
    leak: float = 0.0
    trace_pre_renorm: float = 1.0

    def __post_init__(self) -> None:
        self.blocks = np.asarray(self.blocks, dtype=complex)
        if self.blocks.ndim != 3 or self.blocks.shape[1:] != (2, 2):
            raise ValueError(f"blocks must have shape (sites, 2, 2), got {self.blocks.shape}")

    @classmethod
    def point_mass(cls, k_max: int, site: int, qubit: str | np.ndarray = "ground") -> WalkerState:
        if not 0 <= site <= k_max:
            raise ValueError(f"site {site} outside [0, {k_max}]")
        rho = QUBIT_STATES[qubit] if isinstance(qubit, str) else np.asarray(qubit, dtype=complex)
        blocks = np.zeros((k_max + 1, 2, 2), dtype=complex)
        blocks[site] = rho
        return cls(blocks)

    @property
    def k_max(self) -> int:
        return self.blocks.shape[0] - 1

    def traces(self) -> np.ndarray:
        return self.blocks[:, 0, 0].real + self.blocks[:, 1, 1].real

    def total_trace(self) -> float:
        return float(np.sum(self.traces()))

    def min_eigenvalue(self) -> float:
        return float(np.min(min_eigenvalues_2x2(self.blocks)))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.blocks - adjoint(self.blocks))))

    def check(self, trace_tol: float = 1e-9) -> None:
        """Raise ``ValueError`` if a state invariant is violated."""
        if self.hermiticity_error() > HERMITIAN_TOL:
            raise ValueError("walker blocks are not Hermitian")
        if self.min_eigenvalue() < -PSD_TOL:
            raise ValueError("walker block is not positive semidefinite")
        if abs(self.total_trace() - 1.0) > trace_tol:
            raise ValueError(f"total trace {self.total_trace()!r} differs from 1")


@dataclass
class TransitionSet:
    """Nearest-neighbour Kraus operators for every source site.

    ``channels`` is a list of ``(shift, ops)`` where ``ops[k]`` is the 2x2
    operator carrying site ``k`` to site ``k + shift``; ``shift`` is -1, 0
    or +1.  ``normalization`` is ``"exact"`` or ``"first_order"``; for the
    latter ``residual_constant`` holds ``max_k residual_k / dt**2`` measured
    when the set was built.
    """

    channels: list[tuple[int, np.ndarray]]
    normalization: str = "exact"
    dt: float | None = None
    residual_constant: float | None = None

    def __post_init__(self) -> None:
        if not self.channels:
            raise ValueError("a transition set needs at least one channel")
        sizes = {ops.shape[0] for _, ops in self.channels}
        if len(sizes) != 1:
            raise ValueError("all channels must cover the same sites")
        for shift, ops in self.channels:
            if shift not in (-1, 0, 1):
                raise ValueError(f"only nearest-neighbour shifts are allowed, got {shift}")
            if ops.shape[1:] != (2, 2):
                raise ValueError("transition operators must be 2x2")
        if self.normalization not in ("exact", "first_order"):
            raise ValueError(f"unknown normalization class {self.normalization!r}")
        if self.normalization == "first_order" and self.residual_constant is None:
            if self.dt is None:
                raise ValueError("first_order sets need dt")
            worst = float(np.max(verify_normalization(self)))
            self.residual_constant = worst / self.dt**2 if self.dt > 0 else 0.0

    @classmethod
    def from_node_lists(
        cls,
        node_ops: Mapping[int, Sequence[tuple[int, np.ndarray]]] | Sequence[Sequence[tuple[int, np.ndarray]]],
        **kwargs,
    ) -> TransitionSet:
        """Build from per-source lists of ``(target, operator)`` pairs.

        Sources must be ``0..k_max`` without gaps.  The j-th operator with a
        given shift at every node lands in the same channel; missing entries
        are zero.
        """
        if isinstance(node_ops, Mapping):
            keys = sorted(node_ops)
            if keys != list(range(len(keys))):
                raise ValueError("source nodes must be 0..k_max without gaps")
            lists = [node_ops[k] for k in keys]
        else:
            lists = list(node_ops)
        n_sites = len(lists)
        slots: dict[tuple[int, int], np.ndarray] = {}
        for k, pairs in enumerate(lists):
            seen: dict[int, int] = {}
            for target, op in pairs:
                shift = int(target) - k
                j = seen.get(shift, 0)
                seen[shift] = j + 1
                if (shift, j) not in slots:
                    slots[(shift, j)] = np.zeros((n_sites, 2, 2), dtype=complex)
                slots[(shift, j)][k] = op
        order = sorted(slots, key=lambda key: (abs(key[0]), -key[0], key[1]))
        return cls([(shift, slots[(shift, j)]) for shift, j in order], **kwargs)

    @property
    def k_max(self) -> int:
        return self.channels[0][1].shape[0] - 1

    def node_operators(self, k: int) -> list[tuple[int, np.ndarray]]:
        return [(k + shift, ops[k]) for shift, ops in self.channels]


@dataclass(frozen=True)
class StepPolicy:
    renormalize: bool = False
    leak_tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if not self.leak_tolerance > 0:
            raise ValueError("leak_tolerance must be positive")

    @classmethod
    def default_for(cls, ts: TransitionSet, **kwargs) -> StepPolicy:
        kwargs.setdefault("renormalize", ts.normalization == "first_order")
        return cls(**kwargs)


def verify_normalization(ts: TransitionSet) -> np.ndarray:
    """Per-source Frobenius residual ``|| sum_j B_j^dagger B_j - I ||``."""
    total = np.zeros((ts.k_max + 1, 2, 2), dtype=complex)
    for _, ops in ts.channels:
        total += adjoint(ops) @ ops
    return np.linalg.norm(total - np.eye(2), axis=(1, 2))


def _sandwich(ops: np.ndarray, blocks: np.ndarray) -> np.ndarray:
    return ops @ blocks @ adjoint(ops)


def step(state: WalkerState, ts: TransitionSet, policy: StepPolicy | None = None) -> WalkerState:
    """Apply one CPTP step and return the new state.

    Per site the summation order is fixed: stay terms, then arrivals from
    the left neighbour, then arrivals from the right neighbour.
    """
    if ts.k_max != state.k_max:
        raise ValueError(f"transition set covers {ts.k_max + 1} sites, state has {state.k_max + 1}")
    if policy is None:
        policy = StepPolicy.default_for(ts)
    rho = state.blocks
    new = np.zeros_like(rho)
    leak = 0.0
    for wanted in (0, 1, -1):
        for shift, ops in ts.channels:
            if shift != wanted:
                continue
            contrib = _sandwich(ops, rho)
            if shift == 0:
                new += contrib
            elif shift == 1:
                new[1:] += contrib[:-1]
                leak += float(contrib[-1, 0, 0].real + contrib[-1, 1, 1].real)
            else:
                new[:-1] += contrib[1:]
                leak += float(contrib[0, 0, 0].real + contrib[0, 1, 1].real)

    # Kraus sandwiches are Hermitian up to rounding; restore it exactly.
    new = 0.5 * (new + adjoint(new))
    cumulative = state.leak + leak
    if cumulative > policy.leak_tolerance:
        raise LeakExceeded(f"cumulative leak {cumulative:.3e} exceeds {policy.leak_tolerance:.3e}")
    min_eig = float(np.min(min_eigenvalues_2x2(new)))
    if min_eig < PSD_HARD_LIMIT:
        raise PositivityBreach(f"block eigenvalue {min_eig:.3e} below {PSD_HARD_LIMIT:.0e}")
    trace = float(np.sum(new[:, 0, 0].real + new[:, 1, 1].real))
    if policy.renormalize:
        new /= trace
    return WalkerState(new, leak=cumulative, trace_pre_renorm=trace)


def evolve(
    state: WalkerState,
    ts: TransitionSet | Callable[[int], TransitionSet],
    policy: StepPolicy | None = None,
    n_steps: int = 1,
    record_every: int = 1,
    recorder: Callable[[int, WalkerState], None] | None = None,
) -> WalkerState:
    """Step ``n_steps`` times, calling ``recorder(step, state)`` along the way.

    ``ts`` may be a fixed transition set or a callable returning the set for
    a given step index.  Records are emitted at multiples of ``record_every``
    and at the final step.  Errors from ``step`` carry the failing step index
    in their ``step`` attribute.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    if record_every < 1:
        raise ValueError("record_every must be at least 1")
    source = ts if callable(ts) else (lambda _n: ts)
    if recorder is not None:
        recorder(0, state)
    for n in range(1, n_steps + 1):
        current = source(n - 1)
        try:
            state = step(state, current, policy if policy is not None else StepPolicy.default_for(current))
        except WalkError as exc:
            exc.step = n
            exc.args = (f"step {n}: {exc.args[0]}",)
            raise
        if recorder is not None and (n % record_every == 0 or n == n_steps):
            recorder(n, state)
    return state


def dilate_global(ts: TransitionSet, k_max: int | None = None) -> list[np.ndarray]:
    """Kraus operators ``B (x) |target><source|`` on the qubit (x) lattice space.

    The composite index is ``qubit * (k_max + 1) + site``.  Targets outside
    the lattice are omitted, so the operator sum is the identity only up to
    the leak at the edges.
    """
    k_max = ts.k_max if k_max is None else k_max
    if k_max != ts.k_max:
        raise ValueError("k_max does not match the transition set")
    n_sites = k_max + 1
    if n_sites > MAX_DILATION_SITES:
        raise ValueError(f"dilation is limited to {MAX_DILATION_SITES} sites, got {n_sites}")
    kraus = []
    for source in range(n_sites):
        for target, op in ts.node_operators(source):
            if not 0 <= target < n_sites:
                continue
            hop = np.zeros((n_sites, n_sites), dtype=complex)
            hop[target, source] = 1.0
            kraus.append(np.kron(op, hop))
    return kraus


def embed_global(state: WalkerState) -> np.ndarray:
    """Block-diagonal density matrix ``sum_k rho_k (x) |k><k|``."""
    n = state.k_max + 1
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    for k in range(n):
        proj = np.zeros((n, n))
        proj[k, k] = 1.0
        out += np.kron(state.blocks[k], proj)
    return out


def extract_blocks(rho: np.ndarray) -> np.ndarray:
    """Position-diagonal blocks ``<k| rho |k>`` of a qubit (x) lattice matrix."""
    n = rho.shape[0] // 2
    r = rho.reshape(2, n, 2, n)
    idx = np.arange(n)
    # advanced indices on axes 1 and 3 move to the front: result[k, q, q']
    return r[:, idx, :, idx]


def apply_kraus(kraus: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho, dtype=complex)
    for m in kraus:
        out += m @ rho @ m.conj().T
    return out
