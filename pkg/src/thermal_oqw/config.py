"""Run configuration: a flat ``key = value`` text format.

Example::

    # thermal walk, n_th = 5
    g = 0.02
    delta = 1
    gamma = 0.2
    n_th = 5
    dt = 0.02
    n_steps = 20000
    initial_site = 20

Blank lines and ``#`` comments are ignored; unknown or repeated keys are
errors.  ``initial_qubit`` is ``ground``, ``excited`` or four comma-separated
reals ``rho_ee, rho_gg, re_rho_eg, im_rho_eg``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .linalg import hermitian_eigenvalues_2x2
from .thermal import DEFAULT_K_MAX, MODES, ModelParams, ParameterError

__all__ = ["RunConfig", "ConfigParseError", "ConfigValidationError", "parse_config", "serialize_config"]

KEYS = (
    "g",
    "delta",
    "gamma",
    "n_th",
    "dt",
    "k_max",
    "n_steps",
    "record_every",
    "initial_site",
    "initial_qubit",
    "mode",
    "renormalize",
    "out_dir",
)
REQUIRED = ("g", "delta", "gamma", "n_th", "dt", "n_steps", "initial_site")
QUBIT_TOL = 1e-9


class ConfigParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ConfigValidationError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    g: float
    delta: float
    gamma: float
    n_th: float
    dt: float
    n_steps: int
    initial_site: int
    k_max: int = DEFAULT_K_MAX
    record_every: int | None = None
    initial_qubit: str | tuple[float, float, float, float] = "ground"
    mode: str = "paper"
    # None defers to the mode: on for paper, off for completed
    renormalize: bool | None = None
    out_dir: str = "results"

    def __post_init__(self) -> None:
        try:
            self.params
        except ParameterError as exc:
            raise ConfigValidationError(str(exc)) from None
        if self.n_steps < 0:
            raise ConfigValidationError(f"n_steps must be non-negative, got {self.n_steps}")
        if self.record_every is not None and self.record_every < 1:
            raise ConfigValidationError(f"record_every must be at least 1, got {self.record_every}")
        if not 0 <= self.initial_site <= self.k_max:
            raise ConfigValidationError(f"initial_site {self.initial_site} outside [0, {self.k_max}]")
        if self.mode not in MODES:
            raise ConfigValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if isinstance(self.initial_qubit, str):
            if self.initial_qubit not in ("ground", "excited"):
                raise ConfigValidationError(f"unknown initial_qubit {self.initial_qubit!r}")
        else:
            rho = self.qubit_matrix
            if abs(np.trace(rho).real - 1.0) > QUBIT_TOL:
                raise ConfigValidationError("initial_qubit must have unit trace")
            if hermitian_eigenvalues_2x2(rho)[0] < -QUBIT_TOL:
                raise ConfigValidationError("initial_qubit must be positive semidefinite")

    @property
    def params(self) -> ModelParams:
        return ModelParams(
            g=self.g, delta=self.delta, gamma=self.gamma, n_th=self.n_th, dt=self.dt, k_max=self.k_max
        )

    @property
    def effective_record_every(self) -> int:
        if self.record_every is not None:
            return self.record_every
        return max(1, self.n_steps // 10)

    @property
    def effective_renormalize(self) -> bool:
        if self.renormalize is not None:
            return self.renormalize
        return self.mode == "paper"

    @property
    def qubit_matrix(self) -> np.ndarray:
        if self.initial_qubit == "excited":
            return np.array([[1, 0], [0, 0]], dtype=complex)
        if self.initial_qubit == "ground":
            return np.array([[0, 0], [0, 1]], dtype=complex)
        ee, gg, re, im = self.initial_qubit
        return np.array([[ee, re + 1j * im], [re - 1j * im, gg]], dtype=complex)

    def with_changes(self, **changes) -> RunConfig:
        values = asdict(self)
        values.update(changes)
        return RunConfig(**values)


def _as_int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def _as_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _as_qubit(text: str):
    if text in ("ground", "excited"):
        return text
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 4:
        raise ValueError("initial_qubit needs 'ground', 'excited' or four comma-separated reals")
    return tuple(float(s) for s in parts)


_CONVERTERS = {
    "g": float,
    "delta": float,
    "gamma": float,
    "n_th": float,
    "dt": float,
    "k_max": _as_int,
    "n_steps": _as_int,
    "record_every": _as_int,
    "initial_site": _as_int,
    "initial_qubit": _as_qubit,
    "mode": str,
    "renormalize": _as_bool,
    "out_dir": str,
}


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text.

    Raises ``ConfigParseError`` (with the line number) for malformed input
    and ``ConfigValidationError`` when a value violates a model invariant.
    """
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONVERTERS:
            raise ConfigParseError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigParseError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ConfigParseError(f"empty value for {key!r}", lineno)
        try:
            values[key] = _CONVERTERS[key](value)
        except ValueError as exc:
            raise ConfigParseError(f"bad value for {key!r}: {exc}", lineno) from None
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigParseError(f"missing required keys: {', '.join(missing)}")
    return RunConfig(**values)


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for key in KEYS:
        value = getattr(cfg, key)
        if value is None:
            continue
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = repr(value)
        elif isinstance(value, tuple):
            text = ", ".join(repr(float(v)) for v in value)
        else:
            text = str(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"
