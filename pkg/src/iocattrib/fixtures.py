"""Access to the datasets packaged with the library."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import ConfigError

FIXTURES = (
    "highlevel_matrix.csv",
    "lowlevel_iocs.csv",
    "attack_bundle.json",
    "incident_redcross.json",
)


def fixture_path(name: str) -> Path:
    """Filesystem path of a packaged fixture (``pkg:<name>`` in configs)."""
    if name not in FIXTURES:
        raise ConfigError(f"unknown packaged fixture {name!r}; available: {', '.join(FIXTURES)}")
    return Path(str(resources.files("iocattrib").joinpath("data", name)))
