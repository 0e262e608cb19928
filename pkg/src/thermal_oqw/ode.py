"""Fixed-step classical Runge-Kutta integration.

The state may be any ``numpy`` array, real or complex; the right-hand side
maps an array to an array of the same shape.  Steps are fixed so that runs
are exactly reproducible; the last step is shortened to land on ``t_end``.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

__all__ = ["OdeProblem", "IntegrationError", "rk4_step", "integrate"]


class IntegrationError(FloatingPointError):
    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


@dataclass
class OdeProblem:
    state: np.ndarray
    rhs: Callable[[np.ndarray], np.ndarray]
    t0: float
    t_end: float
    dt_ode: float

    def __post_init__(self) -> None:
        if not self.dt_ode > 0:
            raise ValueError(f"dt_ode must be positive, got {self.dt_ode}")
        if self.t_end < self.t0:
            raise ValueError(f"t_end {self.t_end} precedes t0 {self.t0}")


def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _grid(t0: float, t_end: float, dt: float) -> np.ndarray:
    # the relative slack keeps t_end = n * dt from spawning a sliver step
    n_steps = max(int(np.ceil((t_end - t0) / dt - 1e-9)), 0)
    times = t0 + dt * np.arange(n_steps + 1)
    times[-1] = t_end
    return times


def integrate(
    problem: OdeProblem,
    recorder: Callable[[float, np.ndarray], None] | None = None,
    sample_times: Sequence[float] | None = None,
) -> np.ndarray:
    """Integrate ``problem`` with classical RK4 and return the final state.

    ``recorder(t, y)`` is called at the grid point nearest to each entry of
    ``sample_times`` (once per distinct grid point, in time order).
    """
    y = np.array(problem.state, copy=True)
    times = _grid(problem.t0, problem.t_end, problem.dt_ode)

    wanted: set[int] = set()
    if sample_times is not None:
        for ts in sample_times:
            if not problem.t0 <= ts <= problem.t_end:
                raise ValueError(f"sample time {ts} outside [{problem.t0}, {problem.t_end}]")
            wanted.add(int(np.argmin(np.abs(times - ts))))

    if recorder is not None and 0 in wanted:
        recorder(float(times[0]), y)
    for i in range(1, len(times)):
        y = rk4_step(problem.rhs, y, float(times[i] - times[i - 1]))
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state at t = {times[i]:g}", float(times[i]))
        if recorder is not None and i in wanted:
            recorder(float(times[i]), y)
    return y
