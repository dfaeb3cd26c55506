"""Experiment orchestration: run one configured experiment, write artifacts.

Every experiment produces flat files in the configured output directory
plus a ``manifest.json`` echoing the configuration, the derived
parameters, and a SHA-256 digest of each data file.  Data bytes are a
pure function of (config, seed, package version): numbers are formatted
with locale-independent printf codes, JSON keys are sorted, and files
are written atomically (temp file then rename).
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .chain import evolve, make_context
from .config import ExperimentConfig, config_values
from .errors import ConfigError, NotLocalizedError
from .observables import (
    ModeReport,
    detect_accelerator_modes,
    fit_localization_length,
    ipr,
    max_concurrence,
    mode_decay,
    q_measure,
    site_distribution,
    spread_variance,
)
from .params import ChainParams, derived_params
from .protocol import run_protocol
from .qkr import rechester_d
from .state import site_state
from .validation import validate_suite

# Probabilities below this floor are clamped before taking the log so the
# profile column stays finite for gnuplot-style tooling.
LOG_FLOOR = 1e-320


@dataclass(frozen=True)
class RunManifest:
    """What was run, from what inputs, producing which bytes."""

    experiment: str
    version: str
    config: dict
    derived: dict
    wall_clock_seconds: float
    output_dir: str
    files: dict


def _fmt(value: float) -> str:
    return "%.12g" % value


def _table(header: tuple[str, ...], rows: list[tuple], fmt: str) -> str:
    """Render a column table as CSV text or as a JSON columns/rows object."""
    if fmt == "csv":
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(str(v) if isinstance(v, int) else _fmt(v) for v in row))
        return "\n".join(lines) + "\n"
    payload = {"columns": list(header), "rows": [list(row) for row in rows]}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _json_text(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _table_name(stem: str, fmt: str) -> str:
    return f"{stem}.csv" if fmt == "csv" else f"{stem}.json"


def _mode_report_dict(report: ModeReport) -> dict:
    return {
        "pulse": report.pulse_index,
        "remnant_weight": report.remnant_weight,
        "modes": [
            {
                "position": m.position,
                "amplitude": m.amplitude,
                "width_parameter": m.width_parameter,
                "weight": m.weight,
            }
            for m in report.modes
        ],
    }


def trackable_pulses(p: ChainParams) -> int:
    """Last pulse whose ballistic packets still fit on the chain.

    A packet at pulse j sits 2*pi*j/b_q sites out; past the point where
    that position plus the corridor slack and a 3-sigma packet margin
    reaches a chain end, detection would confuse boundary pile-up with
    transport, so reports stop there.
    """
    if p.b_q <= 0.0:
        return 0
    advance = 2.0 * math.pi / p.b_q
    margin = 0.25 * advance + 3.0 / math.sqrt(p.b_q)
    half_extent = min(p.center - 1, p.n_sites - p.center)
    return max(0, int((half_extent - margin) / advance))


def _trajectory(cfg: ExperimentConfig):
    ctx = make_context(cfg.chain)
    start = site_state(cfg.chain.n_sites, cfg.chain.center)
    return evolve(start, ctx, cfg.n_periods, record_every=cfg.record_every, engine=cfg.engine)


def _distribution_rows(traj) -> list[tuple]:
    rows: list[tuple] = []
    for period, state in traj:
        probs = site_distribution(state).probabilities
        for site0, prob in enumerate(probs):
            rows.append((period, site0 + 1, float(prob)))
    return rows


def _run_evolve(cfg: ExperimentConfig) -> dict:
    traj = _trajectory(cfg)
    name = _table_name("distribution", cfg.format)
    return {name: _table(("period", "site", "probability"), _distribution_rows(traj), cfg.format)}


def _mode_reports(cfg: ExperimentConfig, traj) -> list[ModeReport]:
    last = trackable_pulses(cfg.chain)
    return [
        detect_accelerator_modes(state, period, cfg.chain)
        for period, state in traj
        if 1 <= period <= last
    ]


def _run_fig1(cfg: ExperimentConfig) -> dict:
    traj = _trajectory(cfg)
    reports = _mode_reports(cfg, traj)
    name = _table_name("distribution", cfg.format)
    return {
        name: _table(("period", "site", "probability"), _distribution_rows(traj), cfg.format),
        "modes.json": _json_text({"reports": [_mode_report_dict(r) for r in reports]}),
    }


def _run_diffusion(cfg: ExperimentConfig) -> dict:
    traj = _trajectory(cfg)
    p = cfg.chain
    k_s = derived_params(p).k_s
    d_classical = rechester_d(k_s) if k_s > 0.0 else 0.0
    rows = [
        (period, spread_variance(site_distribution(state), p.center, p.b_q), d_classical * period)
        for period, state in traj
    ]
    name = _table_name("variance", cfg.format)
    return {name: _table(("period", "variance", "classical_prediction"), rows, cfg.format)}


def _run_localization(cfg: ExperimentConfig) -> dict:
    traj = _trajectory(cfg)
    p = cfg.chain
    dist = site_distribution(traj.final)
    rows = [
        (site0 + 1, float(np.log(max(prob, LOG_FLOOR))))
        for site0, prob in enumerate(dist.probabilities)
    ]
    try:
        fit = fit_localization_length(dist, p.center)
        fit_payload = {
            "localized": True,
            "length": fit.length,
            "intercept": fit.intercept,
            "residual": fit.residual,
            "window": list(fit.window),
            "predicted_length": p.beta**2 / 4.0,
        }
    except NotLocalizedError as exc:
        fit_payload = {"localized": False, "detail": str(exc)}
    name = _table_name("profile", cfg.format)
    return {
        name: _table(("site", "log_probability"), rows, cfg.format),
        "fit.json": _json_text(fit_payload),
    }


def _run_entanglement(cfg: ExperimentConfig) -> dict:
    traj = _trajectory(cfg)
    rows = [
        (period, q_measure(state), ipr(state), max_concurrence(state))
        for period, state in traj
    ]
    name = _table_name("measures", cfg.format)
    return {name: _table(("period", "q_measure", "ipr", "max_concurrence"), rows, cfg.format)}


def _run_accel(cfg: ExperimentConfig) -> dict:
    last = trackable_pulses(cfg.chain)
    usable = [
        j for j in range(1, cfg.n_periods + 1)
        if j % cfg.record_every == 0 or j == cfg.n_periods
    ]
    fit_pulses = [j for j in usable if 2 <= j <= last]
    if len(fit_pulses) < 5:
        raise ConfigError(
            "accel needs at least 5 recorded pulses in [2, "
            f"{last}] (chain geometry cap); got {len(fit_pulses)} "
            "from keys 'n_periods'/'record_every'/'n_sites'"
        )
    traj = _trajectory(cfg)
    reports = _mode_reports(cfg, traj)
    decay = mode_decay(r for r in reports if r.pulse_index >= 2)
    return {
        "modes.json": _json_text({"reports": [_mode_report_dict(r) for r in reports]}),
        "decay.json": _json_text(
            {
                "rate": decay.rate,
                "oscillatory": decay.oscillatory,
                "residual": decay.residual,
                "pulse_range": [fit_pulses[0], fit_pulses[-1]],
            }
        ),
    }


def _run_protocol(cfg: ExperimentConfig) -> dict:
    report = run_protocol(cfg.chain, cfg.n_periods)
    payload = {"n_pulses": cfg.n_periods, **asdict(report)}
    return {"report.json": _json_text(payload)}


def _run_validate(cfg: ExperimentConfig) -> dict:
    return {"validation.json": _json_text(validate_suite().as_dict())}


_RUNNERS = {
    "evolve": _run_evolve,
    "fig1": _run_fig1,
    "diffusion": _run_diffusion,
    "localization": _run_localization,
    "entanglement": _run_entanglement,
    "accel": _run_accel,
    "protocol": _run_protocol,
    "validate": _run_validate,
}


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _derived_dict(p: ChainParams) -> dict:
    # Non-finite values (hop distance at b_q = 0) have no strict-JSON
    # representation and are stored as null.
    return {
        key: (value if math.isfinite(value) else None)
        for key, value in asdict(derived_params(p)).items()
    }


def run_experiment(cfg: ExperimentConfig) -> RunManifest:
    """Run ``cfg.experiment``, write its artifacts, and return the manifest.

    The manifest is also written to ``manifest.json``.  Its wall-clock
    entry varies run to run; every other output byte is reproducible.
    """
    started = time.monotonic()
    outputs = _RUNNERS[cfg.experiment](cfg)

    os.makedirs(cfg.output_dir, exist_ok=True)
    digests = {}
    for filename in sorted(outputs):
        text = outputs[filename]
        _atomic_write(os.path.join(cfg.output_dir, filename), text)
        digests[filename] = hashlib.sha256(text.encode("utf-8")).hexdigest()

    manifest = RunManifest(
        experiment=cfg.experiment,
        version=__version__,
        config=config_values(cfg),
        derived=_derived_dict(cfg.chain),
        wall_clock_seconds=time.monotonic() - started,
        output_dir=cfg.output_dir,
        files=digests,
    )
    _atomic_write(os.path.join(cfg.output_dir, "manifest.json"), _json_text(asdict(manifest)))
    return manifest
