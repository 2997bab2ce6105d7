"""Run configuration and the discretize -> modes -> trajectory -> analysis pipeline."""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (detect_recurrence, equilibration_time, fit_decay_rate,
                       fit_envelope_rate, oscillation_period, relative_residual)
from .bath import SCHEMES, DiscretizedBath, discretize, recurrence_estimate
from .dynamics import CovarianceTrajectory, subsystem_coefficient, thermal_occupations, trajectory
from .errors import InvalidParam, OscEquilError, RecurrenceWarning
from .modes import NormalModes, normal_modes, verify_identities
from .spectral import (EquilibriumMoments, OhmicSpectrum, SystemParams, equilibrium_moments,
                       g_inverse_continuum, isolated_moments, j_value, thermal_p2, thermal_q2)

log = logging.getLogger(__name__)

COMM_TOL = 1e-8
VERIFY_THRESHOLDS = {
    "orthogonality": 1e-8,
    "completeness": 1e-8,
    "max_row_defect": 1e-8,
    "row0_defect": 1e-8,
    "trace_residual": 1e-10,
    "determinant_residual": 1e-10,
    "weight_check": 1e-10,
    "im_g_inverse_residual": 1e-12,
}
SWEEP_PARAMS = ("n_modes", "eta", "beta", "cutoff")


class ConfigError(InvalidParam):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    omega0: float = 1.0
    eta: float = 0.2
    cutoff: float = 20.0
    beta: float = 2.0
    n_modes: int = 1200
    scheme: str = "midpoint"
    t_max: float = 60.0
    dt: float = 0.05
    grid: str = "uniform"
    times: list | None = None
    fit_channel: str = "p2"
    fit_window: list | None = None
    rel_tol: float = 0.01
    free_run: bool = False
    bath_file: str | None = None
    method: str = "secular"
    output_dir: str = "out"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a flat JSON object")
        return cls.from_dict(data)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def validate(self) -> None:
        for name in ("omega0", "cutoff", "beta", "t_max", "dt"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise ConfigError(f"{name} must be a positive number, got {val!r}")
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise ConfigError(f"eta must be a non-negative number, got {self.eta!r}")
        if self.eta == 0 and not self.free_run:
            raise ConfigError("eta must be positive; use --free-run for the uncoupled control")
        if self.bath_file is None and (not isinstance(self.n_modes, int) or self.n_modes < 1):
            raise ConfigError(f"n_modes must be a positive integer, got {self.n_modes!r}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.grid not in ("uniform", "log"):
            raise ConfigError(f"grid must be 'uniform' or 'log', got {self.grid!r}")
        if self.fit_channel not in ("p2", "q2"):
            raise ConfigError(f"fit_channel must be 'p2' or 'q2', got {self.fit_channel!r}")
        if self.method not in ("secular", "dense"):
            raise ConfigError(f"method must be 'secular' or 'dense', got {self.method!r}")
        if self.fit_window is not None and (len(self.fit_window) != 2
                                            or not self.fit_window[0] < self.fit_window[1]):
            raise ConfigError(f"fit_window must be [t_lo, t_hi] with t_lo < t_hi")
        if not self.rel_tol > 0:
            raise ConfigError("rel_tol must be positive")

    def time_grid(self) -> np.ndarray:
        if self.times is not None:
            return np.asarray(self.times, dtype=float)
        npts = int(round(self.t_max / self.dt)) + 1
        if self.grid == "uniform":
            return np.arange(npts) * self.dt
        return np.concatenate([[0.0], np.geomspace(self.dt, self.t_max, npts - 1)])


@dataclass
class Model:
    system: SystemParams
    spectrum: OhmicSpectrum
    bath: DiscretizedBath
    modes: NormalModes = field(repr=False)


def build_model(cfg: RunConfig) -> Model:
    cfg.validate()
    system = SystemParams(omega0=float(cfg.omega0), beta=float(cfg.beta))
    spectrum = OhmicSpectrum(eta=float(cfg.eta), cutoff=float(cfg.cutoff))
    if cfg.bath_file is not None:
        bath = DiscretizedBath.from_csv(cfg.bath_file)
    else:
        bath = discretize(spectrum, cfg.n_modes, cfg.scheme)
    if cfg.free_run:
        bath = bath.decoupled()
    modes = normal_modes(system, bath, method=cfg.method)
    return Model(system, spectrum, bath, modes)


def _check(value: float, threshold: float) -> dict:
    return {"value": float(value), "threshold": threshold, "passed": bool(value < threshold)}


def run_verify(cfg: RunConfig) -> dict:
    """Structural identities of the normal modes and the continuum boundary values."""
    model = build_model(cfg)
    report = verify_identities(model.modes, model.system, model.bath).to_dict()
    w = np.linspace(0, cfg.cutoff, 1002)[1:-1]
    ginv = g_inverse_continuum(model.system, model.spectrum, w, side="below")
    jw = j_value(model.spectrum, w)
    scale = max(float(np.max(jw)), 1.0)
    report["im_g_inverse_residual"] = float(np.max(np.abs(ginv.imag + jw)) / scale)
    checks = {name: _check(report[name], thr) for name, thr in VERIFY_THRESHOLDS.items()}
    return {
        "version": __version__,
        "parameters": cfg.to_dict(),
        "n_modes": model.bath.n,
        "checks": checks,
        "determinant_probes": report["determinant_probes"],
        "passed": all(c["passed"] for c in checks.values()),
    }


def _late_residuals(traj: CovarianceTrajectory, eq: EquilibriumMoments) -> dict:
    late = traj.window(0.5 * traj.times[-1], traj.times[-1])
    return {
        "window": [float(late.times[0]), float(late.times[-1])],
        "p2": float(np.max(np.abs(late.p2 - eq.p2)) / eq.p2),
        "q2": float(np.max(np.abs(late.q2 - eq.q2)) / eq.q2),
        "pq": float(np.max(np.abs(late.pq)) / math.sqrt(eq.p2 * eq.q2)),
    }


def _guarded(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except OscEquilError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}


def run_evolve(cfg: RunConfig) -> tuple[dict, dict, CovarianceTrajectory]:
    """Run the full pipeline; returns ``(summary, equilibrium, trajectory)``."""
    model = build_model(cfg)
    sys_, spec, bath, modes = model.system, model.spectrum, model.bath, model.modes
    occ = thermal_occupations(sys_, bath)
    times = cfg.time_grid()
    horizon = recurrence_estimate(bath) if bath.n >= 2 else math.inf
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RecurrenceWarning)
        traj = trajectory(modes, occ, times, horizon=horizon)
    past_horizon = any(issubclass(w.category, RecurrenceWarning) for w in caught)

    coupled = not cfg.free_run
    eq = equilibrium_moments(sys_, spec) if coupled else isolated_moments(sys_)
    finite = EquilibriumMoments(p2=modes.spectral_sum(lambda w: thermal_p2(w, sys_.beta)),
                                q2=modes.spectral_sum(lambda w: thermal_q2(w, sys_.beta)))
    equilibrium = {"continuum": eq.to_dict(), "finite_bath": finite.to_dict()}

    period = None
    if coupled and spec.eta < 2 * sys_.omega0:
        period = oscillation_period(sys_, spec)
    if cfg.fit_window is not None:
        window = tuple(map(float, cfg.fit_window))
    else:
        window = (2.0 / spec.eta if spec.eta > 0 else 0.0,
                  float(min(traj.times[-1], horizon / 2)))

    def fit(channel):
        res = fit_decay_rate(traj, eq, channel, window, system=sys_, spectrum=spec,
                             period=period)
        return res.to_dict()

    def coefficient_fit():
        xc0 = subsystem_coefficient(modes, traj.times)
        floor = 64 * np.finfo(float).eps
        rate, err, npts = fit_envelope_rate(traj.times, xc0, window,
                                            None if period is None else 2 * period, floor)
        return {"channel": "xc0", "rate": rate, "rate_stderr": err,
                "window": list(window), "n_points": npts}

    t_eq = equilibration_time(traj, eq, cfg.rel_tol)
    detected = detect_recurrence(traj, eq, period=period) if coupled else None
    comm_dev = traj.max_comm_deviation
    failures = []
    if comm_dev > COMM_TOL:
        failures.append(f"max |comm - 1| = {comm_dev:.3g} exceeds {COMM_TOL:g}")

    summary = {
        "version": __version__,
        "parameters": cfg.to_dict(),
        "n_modes": bath.n,
        "n_times": len(traj),
        "max_comm_deviation": comm_dev,
        "initial": {
            "p2": float(traj.p2[0]), "q2": float(traj.q2[0]),
            "uncoupled_p2": float(occ.p2[0]), "uncoupled_q2": float(occ.q2[0]),
        },
        "late_residuals": _late_residuals(traj, eq),
        "predicted_rate": spec.eta / 2,
        "decay_fit": _guarded(fit, cfg.fit_channel),
        "decay_fit_other": _guarded(fit, "q2" if cfg.fit_channel == "p2" else "p2"),
        "coefficient_decay": _guarded(coefficient_fit),
        "equilibration_time": t_eq,
        "equilibration_rel_tol": cfg.rel_tol,
        "recurrence": {
            "estimate": horizon if math.isfinite(horizon) else None,
            "detected": detected,
            "warning": past_horizon,
        },
        "failed": bool(failures),
        "failures": failures,
    }
    return summary, equilibrium, traj


def _dump_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n")


def write_verify(cfg: RunConfig, out: Path) -> dict:
    report = run_verify(cfg)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(out / "verify.json", report)
    return report


def write_evolve(cfg: RunConfig, out: Path) -> dict:
    summary, equilibrium, traj = run_evolve(cfg)
    out.mkdir(parents=True, exist_ok=True)
    traj.to_csv(out / "trajectory.csv")
    _dump_json(out / "equilibrium.json", equilibrium)
    _dump_json(out / "summary.json", summary)
    return summary


SWEEP_COLUMNS = ("parameter", "value", "status", "p2_rel_residual", "q2_rel_residual",
                 "pq_rel_residual", "fitted_rate", "fitted_rate_stderr", "coefficient_rate",
                 "predicted_rate", "equilibration_time", "error")


def run_sweep(cfg: RunConfig, vary: str, values) -> list[dict]:
    """One pipeline run per value of ``vary``; failures are recorded per row."""
    if vary not in SWEEP_PARAMS:
        raise ConfigError(f"can only vary one of {SWEEP_PARAMS}, got {vary!r}")
    values = list(values)
    if not values:
        raise ConfigError("sweep needs at least one value")
    rows = []
    for value in values:
        value = int(value) if vary == "n_modes" else float(value)
        row = dict.fromkeys(SWEEP_COLUMNS, "")
        row.update(parameter=vary, value=value)
        try:
            summary, _, _ = run_evolve(cfg.replace(**{vary: value}))
        except OscEquilError as exc:
            row.update(status="error", error=f"{type(exc).__name__}: {exc}")
            log.warning("sweep %s=%s failed: %s", vary, value, exc)
            rows.append(row)
            continue
        late = summary["late_residuals"]
        fit = summary["decay_fit"]
        coef = summary["coefficient_decay"]
        row.update(
            status="failed" if summary["failed"] else "ok",
            p2_rel_residual=late["p2"], q2_rel_residual=late["q2"], pq_rel_residual=late["pq"],
            fitted_rate=fit.get("rate", ""), fitted_rate_stderr=fit.get("rate_stderr", ""),
            coefficient_rate=coef.get("rate", ""), predicted_rate=summary["predicted_rate"],
            equilibration_time="" if summary["equilibration_time"] is None
            else summary["equilibration_time"],
            error="; ".join(d["error"] for d in (fit, coef) if "error" in d),
        )
        rows.append(row)
    return rows


def write_sweep(cfg: RunConfig, vary: str, values, out: Path) -> list[dict]:
    rows = run_sweep(cfg, vary, values)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in row.items()})
    return rows
