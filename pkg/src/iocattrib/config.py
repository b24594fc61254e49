"""Run configuration: one JSON file describes a reproducible experiment.

Paths may be absolute, relative to the config file, or ``pkg:<name>`` for
the packaged fixtures.  Every stochastic component must end up with a
seed; model seeds not given explicitly are derived from the global seed,
so two runs of the same config are identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, ValidationError
from .evaluate import CvConfig
from .fixtures import fixture_path
from .models import ModelSpec, known_algorithms
from .streams import derive_seed
from .synth import DEFAULT_RATES, NoiseSpec


@dataclass(frozen=True)
class RunConfig:
    seed: int
    output_dir: Path
    high_matrix: Path | None
    stix_bundle: Path | None
    low_records: Path | None
    noise: NoiseSpec
    cv: CvConfig
    high_models: tuple[ModelSpec, ...]
    low_models: tuple[ModelSpec, ...]
    incident: Path | None
    threshold: float
    jobs: int
    config_hash: str

    @property
    def stamp(self) -> dict:
        """Provenance fields embedded in every artifact."""
        return {"config_hash": self.config_hash, "seed": self.seed}


def _resolve_path(value: str | None, base: Path) -> Path | None:
    if value is None:
        return None
    if value.startswith("pkg:"):
        return fixture_path(value[4:])
    path = Path(value)
    return path if path.is_absolute() else (base / path).resolve()


def _model_spec(data: dict, fallback_seed: int, context: str) -> ModelSpec:
    if not isinstance(data, dict) or "algorithm" not in data:
        raise ConfigError(f"{context}: each model needs an 'algorithm' field")
    algorithm = data["algorithm"]
    if algorithm not in known_algorithms():
        raise ConfigError(
            f"{context}: unknown algorithm {algorithm!r}; known: {', '.join(known_algorithms())}"
        )
    seed = data.get("seed", fallback_seed)
    bases = tuple(
        _model_spec(b, derive_seed(seed, "base", i), f"{context}.bases[{i}]")
        for i, b in enumerate(data.get("bases", []))
    )
    try:
        return ModelSpec(
            algorithm=algorithm,
            params=data.get("params", {}),
            bases=bases,
            seed=seed,
            name=data.get("name"),
        )
    except ValidationError as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def _model_list(raw: list | None, level: str, global_seed: int) -> tuple[ModelSpec, ...]:
    if not raw:
        return ()
    specs = []
    for i, entry in enumerate(raw):
        fallback = derive_seed(global_seed, "model", level, i)
        specs.append(_model_spec(entry, fallback, f"models.{level}[{i}]"))
    names = [s.label for s in specs]
    if len(set(names)) != len(names):
        raise ConfigError(f"models.{level}: model labels must be unique (use 'name')")
    return tuple(specs)


def load_config(
    path: str | Path,
    seed: int | None = None,
    output_dir: str | None = None,
    models: list[str] | None = None,
    threshold: float | None = None,
    jobs: int | None = None,
) -> RunConfig:
    """Load and validate a config file; keyword arguments override fields."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    base = path.parent

    if seed is None:
        seed = raw.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("config needs an integer 'seed' (no silent nondeterminism)")

    out = output_dir if output_dir is not None else raw.get("output_dir", "out")
    high_matrix = _resolve_path(raw.get("high_matrix"), base)
    stix_bundle = _resolve_path(raw.get("stix_bundle"), base)
    low_records = _resolve_path(raw.get("low_records"), base)
    incident = _resolve_path(raw.get("incident"), base)
    if (high_matrix is None) == (stix_bundle is None):
        raise ConfigError("config needs exactly one high-level source: high_matrix or stix_bundle")

    noise_raw = raw.get("noise", {})
    try:
        noise = NoiseSpec(
            rates=tuple(noise_raw.get("rates", DEFAULT_RATES)),
            seed=noise_raw.get("seed", derive_seed(seed, "noise")),
        )
    except ValidationError as exc:
        raise ConfigError(f"noise: {exc}") from exc

    cv_raw = raw.get("cv", {})
    try:
        cv = CvConfig(
            k=cv_raw.get("k", 10),
            seed=cv_raw.get("seed", derive_seed(seed, "cv")),
            stratified=cv_raw.get("stratified", True),
        )
    except ValidationError as exc:
        raise ConfigError(f"cv: {exc}") from exc

    models_raw = raw.get("models", {})
    high_models = _model_list(models_raw.get("high"), "high", seed)
    low_models = _model_list(models_raw.get("low"), "low", seed)
    if models:
        wanted = set(models)
        known = {s.label for s in high_models} | {s.label for s in low_models}
        missing = wanted - known
        if missing:
            raise ConfigError(f"--models selects unknown labels: {', '.join(sorted(missing))}")
        high_models = tuple(s for s in high_models if s.label in wanted)
        low_models = tuple(s for s in low_models if s.label in wanted)

    if threshold is None:
        threshold = raw.get("threshold", 0.80)
    if not isinstance(threshold, (int, float)) or not (0.0 <= threshold <= 1.0):
        raise ConfigError("threshold must lie in [0, 1]")

    if jobs is None:
        jobs = raw.get("jobs", 1)
    if not isinstance(jobs, int) or jobs < 1:
        raise ConfigError("jobs must be a positive integer")

    hash_source = json.dumps(
        {
            "raw": raw,
            "overrides": {
                "seed": seed,
                "output_dir": str(out),
                "models": sorted(models) if models else None,
                "threshold": threshold,
            },
        },
        sort_keys=True,
    )
    config_hash = hashlib.sha256(hash_source.encode("utf-8")).hexdigest()[:12]

    return RunConfig(
        seed=seed,
        output_dir=Path(out),
        high_matrix=high_matrix,
        stix_bundle=stix_bundle,
        low_records=low_records,
        noise=noise,
        cv=cv,
        high_models=high_models,
        low_models=low_models,
        incident=incident,
        threshold=float(threshold),
        jobs=jobs,
        config_hash=config_hash,
    )
