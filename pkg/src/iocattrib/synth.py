"""Noise synthesis: expand one-instance-per-actor data into a noisy
multi-instance training set.

Each actor gains one synthesized sibling per noise rate.  A noised copy
flips every bit independently with probability r, which simultaneously
models lost positives (1 -> 0) and poisoned stray positives (0 -> 1).
Streams are keyed by (seed, rate, actor), so output is independent of
instance order and parallel scheduling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .featurize import Dataset, FeatureVector, Instance, Provenance
from .ingest import FeatureId
from .streams import keyed_stream

DEFAULT_RATES = (0.10, 0.20, 0.30)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise rates plus the seed all flip streams derive from."""

    rates: tuple[float, ...] = DEFAULT_RATES
    seed: int = 0

    def __post_init__(self) -> None:
        rates = tuple(float(r) for r in self.rates)
        if any(not (0.0 < r < 1.0) for r in rates):
            raise ValidationError("noise rates must lie strictly between 0 and 1")
        if len(set(rates)) != len(rates):
            raise ValidationError("noise rates must be distinct")
        object.__setattr__(self, "rates", rates)


def flip_noise(vector: FeatureVector, rate: float, stream: np.random.Generator) -> FeatureVector:
    """Flip each bit independently with probability rate."""
    if not (0.0 <= rate <= 1.0):
        raise ValidationError("flip rate must lie in [0, 1]")
    flips = stream.random(len(vector)) < rate
    return FeatureVector(np.bitwise_xor(vector.bits, flips.astype(np.uint8)))


def expected_positive_count(n1: float, n_features: int, rate: float) -> float:
    """Analytic mean positive count after flipping: n1 + r * (N - 2 * n1)."""
    if not (0 <= n1 <= n_features):
        raise ValidationError("n1 must lie in [0, N]")
    return n1 + rate * (n_features - 2.0 * n1)


def synthesize_dataset(dataset: Dataset, spec: NoiseSpec) -> Dataset:
    """Originals plus one synthesized instance per (actor, rate).

    Output order: each original followed by its synthesized siblings in
    rate order.  Rejects datasets that already contain synthesized
    instances (no double-noising).
    """
    if any(not inst.provenance.is_original for inst in dataset.instances):
        raise ValidationError("dataset already contains synthesized instances")
    if not spec.rates:
        return dataset
    instances: list[Instance] = []
    seen_per_label: dict[str, int] = {}
    for inst in dataset.instances:
        occurrence = seen_per_label.get(inst.label, 0)
        seen_per_label[inst.label] = occurrence + 1
        instances.append(inst)
        for rate in spec.rates:
            stream = keyed_stream(spec.seed, rate, inst.label, occurrence)
            noisy = flip_noise(inst.vector, rate, stream)
            instances.append(
                Instance(inst.label, noisy, Provenance("synthesized", rate, spec.seed))
            )
    return Dataset(dataset.space, tuple(instances), dataset.level)


def write_dataset_csv(dataset: Dataset, path: str | Path, comment: str | None = None) -> None:
    """Write a dataset as CSV: instance_id,noise_rate,seed,actor,<features>."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["instance_id", "noise_rate", "seed", "actor"] + [f.id for f in dataset.space.features])
        for i, inst in enumerate(dataset.instances):
            prov = inst.provenance
            rate = "" if prov.rate is None else repr(prov.rate)
            seed = "" if prov.seed is None else str(prov.seed)
            writer.writerow(
                [str(i), rate, seed, inst.label] + [str(int(v)) for v in inst.vector.bits]
            )


def load_dataset_csv(path: str | Path, level) -> Dataset:
    """Load a dataset written by write_dataset_csv."""
    from .featurize import DatasetLevel, FeatureSpace

    path = Path(path)
    header: list[str] | None = None
    instances: list[Instance] = []
    features: tuple[FeatureId, ...] = ()
    with open(path, newline="", encoding="utf-8") as fh:
        for cells in csv.reader(fh):
            if not cells or cells[0].startswith("#"):
                continue
            if header is None:
                header = cells
                if header[:4] != ["instance_id", "noise_rate", "seed", "actor"]:
                    raise ParseError(f"{path}: unexpected dataset header")
                features = tuple(FeatureId.parse(token) for token in header[4:])
                continue
            _, rate, seed, actor = cells[:4]
            bits = np.array([int(v) for v in cells[4:]], dtype=np.uint8)
            if rate:
                prov = Provenance("synthesized", float(rate), int(seed))
            else:
                prov = Provenance("original")
            instances.append(Instance(actor, FeatureVector(bits), prov))
    if header is None:
        raise ParseError(f"{path}: empty dataset file")
    space = FeatureSpace(features)
    if isinstance(level, str):
        level = DatasetLevel(level)
    return Dataset(space, tuple(instances), level)
