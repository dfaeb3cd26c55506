"""Strict key=value experiment configuration.

One ``key = value`` per line, ``#`` starts a comment, unknown keys are
rejected by name.  The defaults reproduce the headline accelerator-mode
run: a 1401-site chain kicked at b_q = 1/15 with hopping phase 100.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ConfigError
from .params import ChainParams

EXPERIMENTS = (
    "evolve", "fig1", "diffusion", "localization",
    "entanglement", "accel", "protocol", "validate",
)
ENGINES = ("dense", "transform")
FORMATS = ("csv", "json")
BOUNDARIES = ("open", "ring")

DEFAULTS = {
    "experiment": "fig1",
    "n_sites": 1401,
    "center": 701,
    "beta": 100.0,
    "b_q": 1.0 / 15.0,
    "boundary": "open",
    "n_periods": 6,
    "record_every": 1,
    "engine": "transform",
    "seed": 0,
    "output_dir": "out",
    "format": "csv",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated run description; ``chain`` carries the physical geometry."""

    experiment: str
    chain: ChainParams
    n_periods: int
    record_every: int
    engine: str
    seed: int
    output_dir: str
    format: str


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw, 10)
    except ValueError:
        raise ConfigError(f"key '{key}': expected an integer, got {raw!r}") from None


def _parse_float(key: str, raw: str) -> float:
    try:
        val = float(raw)
    except ValueError:
        raise ConfigError(f"key '{key}': expected a number, got {raw!r}") from None
    return val


def _parse_choice(key: str, raw: str, allowed: tuple[str, ...]) -> str:
    if raw not in allowed:
        raise ConfigError(f"key '{key}': must be one of {', '.join(allowed)}, got {raw!r}")
    return raw


def _validated(values: dict) -> ExperimentConfig:
    if values["n_sites"] < 2:
        raise ConfigError(f"key 'n_sites': need at least 2 sites, got {values['n_sites']}")
    if not 1 <= values["center"] <= values["n_sites"]:
        raise ConfigError(
            f"key 'center': must lie in [1, {values['n_sites']}], got {values['center']}"
        )
    if values["beta"] < 0.0:
        raise ConfigError(f"key 'beta': must be nonnegative, got {values['beta']}")
    if values["b_q"] < 0.0:
        raise ConfigError(f"key 'b_q': must be nonnegative, got {values['b_q']}")
    if values["n_periods"] < 0:
        raise ConfigError(f"key 'n_periods': must be nonnegative, got {values['n_periods']}")
    if values["record_every"] < 1:
        raise ConfigError(f"key 'record_every': must be >= 1, got {values['record_every']}")
    if values["seed"] < 0:
        raise ConfigError(f"key 'seed': must be nonnegative, got {values['seed']}")
    try:
        chain = ChainParams(
            n_sites=values["n_sites"],
            center=values["center"],
            beta=values["beta"],
            b_q=values["b_q"],
            boundary=values["boundary"],
        )
    except ValueError as exc:
        raise ConfigError(f"chain geometry: {exc}") from exc
    return ExperimentConfig(
        experiment=values["experiment"],
        chain=chain,
        n_periods=values["n_periods"],
        record_every=values["record_every"],
        engine=values["engine"],
        seed=values["seed"],
        output_dir=values["output_dir"],
        format=values["format"],
    )


def _apply(values: dict, key: str, raw: str) -> None:
    if key == "experiment":
        values[key] = _parse_choice(key, raw, EXPERIMENTS)
    elif key in ("n_sites", "center", "n_periods", "record_every", "seed"):
        values[key] = _parse_int(key, raw)
    elif key in ("beta", "b_q"):
        values[key] = _parse_float(key, raw)
    elif key == "boundary":
        values[key] = _parse_choice(key, raw, BOUNDARIES)
    elif key == "engine":
        values[key] = _parse_choice(key, raw, ENGINES)
    elif key == "format":
        values[key] = _parse_choice(key, raw, FORMATS)
    elif key == "output_dir":
        if not raw:
            raise ConfigError("key 'output_dir': must not be empty")
        values[key] = raw
    else:
        raise ConfigError(f"unknown configuration key '{key}'")


def parse_config(text: str) -> ExperimentConfig:
    """Parse configuration text, applying defaults for absent keys."""
    values = dict(DEFAULTS)
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, _, raw = stripped.partition("=")
        _apply(values, key.strip(), raw.strip())
    return _validated(values)


def apply_overrides(cfg: ExperimentConfig, overrides: list[str]) -> ExperimentConfig:
    """Apply ``key=value`` strings (CLI --set) on top of an existing config."""
    values = config_values(cfg)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected 'key=value'")
        key, _, raw = item.partition("=")
        _apply(values, key.strip(), raw.strip())
    return _validated(values)


def config_values(cfg: ExperimentConfig) -> dict:
    """Flat key-value view of a config, in the documented key order."""
    return {
        "experiment": cfg.experiment,
        "n_sites": cfg.chain.n_sites,
        "center": cfg.chain.center,
        "beta": cfg.chain.beta,
        "b_q": cfg.chain.b_q,
        "boundary": cfg.chain.boundary,
        "n_periods": cfg.n_periods,
        "record_every": cfg.record_every,
        "engine": cfg.engine,
        "seed": cfg.seed,
        "output_dir": cfg.output_dir,
        "format": cfg.format,
    }


def serialize_config(cfg: ExperimentConfig) -> str:
    """Render a config as parseable text; parse(serialize(c)) == c."""
    values = config_values(cfg)
    lines = []
    for key in DEFAULTS:
        val = values[key]
        if isinstance(val, float):
            lines.append(f"{key} = {val!r}")
        else:
            lines.append(f"{key} = {val}")
    return "\n".join(lines) + "\n"


def with_experiment(cfg: ExperimentConfig, experiment: str) -> ExperimentConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"key 'experiment': must be one of {', '.join(EXPERIMENTS)}, got {experiment!r}")
    return replace(cfg, experiment=experiment)


def with_output_dir(cfg: ExperimentConfig, output_dir: str) -> ExperimentConfig:
    if not output_dir:
        raise ConfigError("key 'output_dir': must not be empty")
    return replace(cfg, output_dir=output_dir)
