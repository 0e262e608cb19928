"""Run orchestration and CSV/JSON output.

Every run writes ``distribution.csv``, ``summary.csv`` and ``manifest.json``
into its output directory.  Floats are printed with 17 significant digits
so they parse back to the same binary64 value.
"""

from __future__ import annotations

import csv
import json
import time
from collections.abc import Sequence
from dataclasses import asdict
from importlib import metadata
from pathlib import Path

import numpy as np

from .config import RunConfig
from .observables import ObservableRecord, first_moment, make_record, mean_and_variance
from .ode import OdeProblem, integrate
from .reference import evolve_full, min_eigenvalue, photon_blocks, product_state, reduced_photon_distribution
from .thermal import build_transition_set, ode_rhs
from .walk import StepPolicy, WalkError, WalkerState, evolve

__all__ = [
    "DISTRIBUTION_HEADER",
    "SUMMARY_HEADER",
    "SWEEP_HEADER",
    "TraceBreach",
    "RunResult",
    "run_walk",
    "run_ode",
    "run_reference",
    "run_sweep",
    "run_validate",
    "read_csv",
]

DISTRIBUTION_HEADER = ("step", "time", "k", "p", "rho_ee", "rho_gg", "re_rho_eg", "im_rho_eg")
SUMMARY_HEADER = (
    "step",
    "time",
    "trace_pre_renorm",
    "mu",
    "sigma2",
    "v_mu_step",
    "v_mu_time",
    "v_sigma2_step",
    "v_sigma2_time",
    "leak",
    "min_block_eig",
)
SWEEP_HEADER = (
    "n_th",
    "steps",
    "time",
    "mu",
    "sigma2",
    "v_mu_step",
    "v_mu_time",
    "v_sigma2_step",
    "v_sigma2_time",
)
EXACT_TRACE_TOL = 1e-9


class TraceBreach(WalkError):
    pass


class RunResult:
    """Records and final state of one run, plus where it was written."""

    def __init__(self, records: list[ObservableRecord], blocks: list[np.ndarray], final, out_dir: Path):
        self.records = records
        self.blocks = blocks
        self.final = final
        self.out_dir = out_dir


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def read_csv(path: str | Path) -> list[dict[str, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _distribution_rows(records: list[ObservableRecord], blocks: list[np.ndarray]):
    for rec, rho in zip(records, blocks):
        for k in range(rho.shape[0]):
            yield (
                rec.step,
                rec.time,
                k,
                rec.p[k],
                rho[k, 0, 0].real,
                rho[k, 1, 1].real,
                rho[k, 0, 1].real,
                rho[k, 0, 1].imag,
            )


def _summary_row(rec: ObservableRecord):
    return tuple(getattr(rec, name) for name in SUMMARY_HEADER)


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _write_outputs(out_dir: Path, kind: str, cfg: RunConfig, records, blocks, diagnostics, started) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(out_dir / "distribution.csv", DISTRIBUTION_HEADER, _distribution_rows(records, blocks))
    _write_csv(out_dir / "summary.csv", SUMMARY_HEADER, (_summary_row(r) for r in records))
    manifest = {
        "command": kind,
        "mode": cfg.mode,
        "renormalize": cfg.effective_renormalize,
        "record_every": cfg.effective_record_every,
        "version": _version(),
        "wall_clock_seconds": time.perf_counter() - started,
        **{f"config_{k}": (list(v) if isinstance(v, tuple) else v) for k, v in asdict(cfg).items()},
        **diagnostics,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _initial_state(cfg: RunConfig) -> WalkerState:
    return WalkerState.point_mass(cfg.k_max, cfg.initial_site, cfg.qubit_matrix)


def run_walk(cfg: RunConfig, out_dir: str | Path | None = None, centered: bool = False) -> RunResult:
    """Discrete-time walk from a point mass at ``initial_site``."""
    started = time.perf_counter()
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    params = cfg.params
    ts = build_transition_set(params, cfg.mode)
    policy = StepPolicy(renormalize=cfg.effective_renormalize)
    state = _initial_state(cfg)
    mu0 = float(cfg.initial_site) if centered else None
    records: list[ObservableRecord] = []
    blocks: list[np.ndarray] = []

    def recorder(n: int, s: WalkerState) -> None:
        records.append(make_record(s, n, cfg.dt, mu0))
        blocks.append(s.blocks.copy())

    final = evolve(state, ts, policy, cfg.n_steps, cfg.effective_record_every, recorder)
    if ts.normalization == "exact" and not policy.renormalize:
        drift = abs(final.total_trace() + final.leak - 1.0)
        if drift > EXACT_TRACE_TOL:
            raise TraceBreach(f"trace drift {drift:.3e} in an exactly normalised walk")
    diagnostics = {
        "final_trace": final.total_trace(),
        "final_leak": final.leak,
        "final_min_block_eig": final.min_eigenvalue(),
        "final_hermiticity_error": final.hermiticity_error(),
        "transition_residual_constant": ts.residual_constant,
    }
    _write_outputs(out, "walk", cfg, records, blocks, diagnostics, started)
    return RunResult(records, blocks, final, out)


def _record_from_blocks(blocks: np.ndarray, t: float, cfg: RunConfig, mu0, min_eig=None) -> ObservableRecord:
    step = int(round(t / cfg.dt)) if cfg.dt > 0 else 0
    state = WalkerState(blocks, trace_pre_renorm=float(np.sum(blocks[:, 0, 0].real + blocks[:, 1, 1].real)))
    state.leak = max(0.0, 1.0 - state.trace_pre_renorm)
    rec = make_record(state, step, cfg.dt, mu0)
    if min_eig is not None:
        rec = ObservableRecord(**{**rec.__dict__, "min_block_eig": min_eig})
    return rec


def _sample_times(cfg: RunConfig) -> list[float]:
    every = cfg.effective_record_every
    steps = sorted(set(range(0, cfg.n_steps + 1, every)) | {cfg.n_steps})
    return [n * cfg.dt for n in steps]


def run_ode(
    cfg: RunConfig, out_dir: str | Path | None = None, centered: bool = False, dt_ode: float | None = None
) -> RunResult:
    """Continuous-time walk (block master equation) sampled at the recorded step times."""
    started = time.perf_counter()
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    params = cfg.params
    dt_ode = dt_ode if dt_ode is not None else cfg.dt / 10
    mu0 = float(cfg.initial_site) if centered else None
    records: list[ObservableRecord] = []
    blocks: list[np.ndarray] = []

    def recorder(t: float, y: np.ndarray) -> None:
        records.append(_record_from_blocks(y, t, cfg, mu0))
        blocks.append(y.copy())

    problem = OdeProblem(_initial_state(cfg).blocks, lambda y: ode_rhs(y, params), 0.0, cfg.n_steps * cfg.dt, dt_ode)
    final = integrate(problem, recorder, _sample_times(cfg))
    final_state = WalkerState(final)
    diagnostics = {
        "dt_ode": dt_ode,
        "final_trace": final_state.total_trace(),
        "final_min_block_eig": final_state.min_eigenvalue(),
        "final_hermiticity_error": final_state.hermiticity_error(),
    }
    _write_outputs(out, "ode", cfg, records, blocks, diagnostics, started)
    return RunResult(records, blocks, final_state, out)


def run_reference(
    cfg: RunConfig,
    fock_cutoff: int = 40,
    out_dir: str | Path | None = None,
    centered: bool = False,
    dt_ode: float | None = None,
) -> RunResult:
    """Full atom-cavity master equation with Fock cutoff ``fock_cutoff``."""
    from .config import ConfigValidationError

    started = time.perf_counter()
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    if cfg.initial_site > fock_cutoff // 2:
        raise ConfigValidationError(
            f"initial_site {cfg.initial_site} must not exceed half the Fock cutoff ({fock_cutoff // 2})"
        )
    params = cfg.params.replace(k_max=min(cfg.k_max, fock_cutoff))
    rho0 = product_state(cfg.qubit_matrix, cfg.initial_site, fock_cutoff)
    mu0 = float(cfg.initial_site) if centered else None
    records: list[ObservableRecord] = []
    blocks: list[np.ndarray] = []

    def recorder(t: float, rho: np.ndarray) -> None:
        b = photon_blocks(rho)
        records.append(_record_from_blocks(b, t, cfg, mu0, min_eig=min_eigenvalue(rho)))
        blocks.append(b.copy())

    final = evolve_full(rho0, params, cfg.n_steps * cfg.dt, dt_ode, _sample_times(cfg), recorder)
    diagnostics = {
        "fock_cutoff": fock_cutoff,
        "final_trace": float(np.trace(final).real),
        "final_min_eig": min_eigenvalue(final),
        "final_hermiticity_error": float(np.max(np.abs(final - final.conj().T))),
        "final_mu": mean_and_variance(reduced_photon_distribution(final))[0],
    }
    _write_outputs(out, "reference", cfg, records, blocks, diagnostics, started)
    return RunResult(records, blocks, final, out)


def run_sweep(
    cfg: RunConfig, n_th_values: Sequence[float], out_dir: str | Path | None = None, centered: bool = False
) -> list[ObservableRecord]:
    """One walk per thermal occupation; writes ``sweep.csv`` with the final records."""
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    finals = []
    rows = []
    for n_th in n_th_values:
        point = cfg.with_changes(n_th=float(n_th))
        result = run_walk(point, out / f"n_th_{float(n_th):g}", centered=centered)
        rec = result.records[-1]
        finals.append(rec)
        rows.append(
            (
                float(n_th),
                rec.step,
                rec.time,
                rec.mu,
                rec.sigma2,
                rec.v_mu_step,
                rec.v_mu_time,
                rec.v_sigma2_step,
                rec.v_sigma2_time,
            )
        )
    _write_csv(out / "sweep.csv", SWEEP_HEADER, rows)
    return finals


def run_validate(cfg: RunConfig, out=print) -> bool:
    """Normalisation order, exact completion, trace closure and dilation checks."""
    from .observables import birth_death_rhs
    from .walk import apply_kraus, dilate_global, embed_global, extract_blocks, step, verify_normalization

    params = cfg.params
    results: list[tuple[str, bool, str]] = []

    r_full = float(np.max(verify_normalization(build_transition_set(params, "paper"))))
    r_half = float(np.max(verify_normalization(build_transition_set(params.replace(dt=params.dt / 2), "paper"))))
    ratio = r_half / r_full if r_full else float("nan")
    results.append(
        (
            "paper-mode residual order",
            0.2 <= ratio <= 0.3,
            f"max residual {r_full:.6e} at dt, {r_half:.6e} at dt/2, ratio {ratio:.4f}",
        )
    )

    r_exact = float(np.max(verify_normalization(build_transition_set(params, "completed"))))
    results.append(("completed-mode residual", r_exact <= 1e-12, f"max residual {r_exact:.3e}"))

    rng = np.random.default_rng(12345)
    x = rng.normal(size=(params.k_max + 1, 2, 2)) + 1j * rng.normal(size=(params.k_max + 1, 2, 2))
    rho = x @ np.conj(np.swapaxes(x, 1, 2))
    rho[-1] = 0.0
    rho /= np.sum(rho[:, 0, 0].real + rho[:, 1, 1].real)
    d = ode_rhs(rho, params)
    traces = d[:, 0, 0].real + d[:, 1, 1].real
    total = abs(float(np.sum(traces)))
    closure = float(np.max(np.abs(traces - birth_death_rhs(rho[:, 0, 0].real + rho[:, 1, 1].real, params))))
    results.append(("block equation conserves trace", total <= 1e-14, f"|sum tr drho/dt| = {total:.3e}"))
    results.append(("trace closure matches birth-death chain", closure <= 1e-13, f"max deviation {closure:.3e}"))

    small = params.replace(k_max=2)
    ts = build_transition_set(small, cfg.mode)
    x = rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2))
    blocks = x @ np.conj(np.swapaxes(x, 1, 2))
    state = WalkerState(blocks / np.sum(blocks[:, 0, 0].real + blocks[:, 1, 1].real))
    blockwise = step(state, ts, StepPolicy(renormalize=False, leak_tolerance=1.0)).blocks
    dilated = extract_blocks(apply_kraus(dilate_global(ts), embed_global(state)))
    diff = float(np.max(np.abs(blockwise - dilated)))
    results.append(("blockwise step equals dilated map", diff <= 1e-12, f"max entry difference {diff:.3e}"))

    mu_t = first_moment(cfg.initial_site, params, 1000.0)
    out(f"first-moment law: mu(t=1000) = {mu_t:.6f} for initial site {cfg.initial_site}")
    for name, ok, detail in results:
        out(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return all(ok for _, ok, _ in results)
