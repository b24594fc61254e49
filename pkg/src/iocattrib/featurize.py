"""Turn matrices and IOC records into labeled binary-vector datasets.

A FeatureSpace fixes the vector dimensionality and a canonical feature
order (by kind, then id) that is stable across runs.  Instances carry
provenance so synthesized rows stay distinguishable from originals.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ValidationError
from .ingest import ActorTechniqueMatrix, FeatureId, IocRecord


class DatasetLevel(Enum):
    HIGH = "high"
    LOW = "low"


@dataclass(frozen=True)
class FeatureSpace:
    """Ordered catalog of feature identifiers; defines vector length N."""

    features: tuple[FeatureId, ...]

    def __post_init__(self) -> None:
        ids = [f.id for f in self.features]
        if len(set(ids)) != len(ids):
            raise ValidationError("feature space contains duplicate ids")
        object.__setattr__(self, "_index", {f.id: i for i, f in enumerate(self.features)})

    @property
    def size(self) -> int:
        return len(self.features)

    def index_of(self, feature_id: str) -> int | None:
        return self._index.get(feature_id)

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for f in self.features:
            h.update(f.id.encode("utf-8"))
            h.update(b"\x1f")
        return h.hexdigest()


@dataclass(frozen=True)
class FeatureVector:
    """A binary observation vector over some FeatureSpace."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or not np.isin(bits, (0, 1)).all():
            raise ValidationError("feature vector must be a 1-D array of 0/1 values")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def positive_count(self) -> int:
        return int(self.bits.sum())

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class Provenance:
    """Where an instance came from: an original row or a noised copy."""

    origin: str  # "original" | "synthesized"
    rate: float | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.origin == "original":
            if self.rate is not None or self.seed is not None:
                raise ValidationError("original instances carry no rate/seed")
        elif self.origin == "synthesized":
            if self.rate is None or not (0.0 < self.rate < 1.0) or self.seed is None:
                raise ValidationError("synthesized instances need rate in (0,1) and a seed")
        else:
            raise ValidationError(f"unknown provenance origin {self.origin!r}")

    @property
    def is_original(self) -> bool:
        return self.origin == "original"


ORIGINAL = Provenance("original")


@dataclass(frozen=True)
class Instance:
    """One labeled training example."""

    label: str
    vector: FeatureVector
    provenance: Provenance = ORIGINAL


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of instances over one FeatureSpace."""

    space: FeatureSpace
    instances: tuple[Instance, ...]
    level: DatasetLevel

    def __post_init__(self) -> None:
        for inst in self.instances:
            if len(inst.vector) != self.space.size:
                raise ValidationError(
                    f"instance {inst.label!r} has length {len(inst.vector)}, "
                    f"space has {self.space.size}"
                )

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(inst.label for inst in self.instances)

    @property
    def classes(self) -> tuple[str, ...]:
        """Distinct labels in canonical (sorted) order."""
        return tuple(sorted(set(self.labels)))

    def originals(self) -> tuple[Instance, ...]:
        return tuple(inst for inst in self.instances if inst.provenance.is_original)

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
        """Matrix view: (X uint8 [n, N], y class indices, classes)."""
        classes = self.classes
        class_index = {c: i for i, c in enumerate(classes)}
        X = np.stack([inst.vector.bits for inst in self.instances]) if self.instances else np.zeros((0, self.space.size), dtype=np.uint8)
        y = np.array([class_index[inst.label] for inst in self.instances], dtype=np.int64)
        return X, y, classes

    def subset(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.space, tuple(self.instances[i] for i in indices), self.level)


def canonical_features(features) -> tuple[FeatureId, ...]:
    """Sort features by (kind, id); deduplicates while preserving identity."""
    unique = {f.id: f for f in features}
    return tuple(sorted(unique.values(), key=lambda f: f.sort_index))


def build_feature_space(source: ActorTechniqueMatrix | list[IocRecord]) -> FeatureSpace:
    """Build the canonical feature catalog from a matrix or IOC records."""
    if isinstance(source, ActorTechniqueMatrix):
        return FeatureSpace(canonical_features(source.features))
    if not source:
        raise ValidationError("cannot build a feature space from an empty source")
    tokens = [FeatureId.lowlevel(rec.kind, rec.value) for rec in source]
    return FeatureSpace(canonical_features(tokens))


def vectorize_matrix(matrix: ActorTechniqueMatrix, space: FeatureSpace) -> Dataset:
    """One original instance per matrix row, re-indexed into the space."""
    positions = []
    for feat in matrix.features:
        pos = space.index_of(feat.id)
        if pos is None:
            raise ValidationError(f"matrix feature {feat.id!r} is not in the feature space")
        positions.append(pos)
    instances = []
    for actor, row in zip(matrix.actors, matrix.cells):
        bits = np.zeros(space.size, dtype=np.uint8)
        bits[positions] = row
        instances.append(Instance(actor, FeatureVector(bits)))
    return Dataset(space, tuple(instances), DatasetLevel.HIGH)


def vectorize_lowlevel(records: list[IocRecord], space: FeatureSpace) -> tuple[Dataset, list[str]]:
    """One instance per (actor, report_id) group.

    Returns the dataset plus warnings for report groups contributing no
    known tokens (those groups are skipped).
    """
    if not records:
        raise ValidationError("no IOC records to vectorize")
    groups: dict[tuple[str, str], list[int]] = {}
    for rec in records:
        key = (rec.actor, rec.report_id)
        pos = space.index_of(FeatureId.lowlevel(rec.kind, rec.value).id)
        groups.setdefault(key, [])
        if pos is not None:
            groups[key].append(pos)
    instances = []
    warnings = []
    for (actor, report_id), positions in groups.items():
        if not positions:
            warnings.append(f"report group ({actor}, {report_id}) has no known tokens; skipped")
            continue
        bits = np.zeros(space.size, dtype=np.uint8)
        bits[positions] = 1
        instances.append(Instance(actor, FeatureVector(bits)))
    return Dataset(space, tuple(instances), DatasetLevel.LOW), warnings


def encode_incident(ids: list[str], space: FeatureSpace) -> tuple[FeatureVector, list[str]]:
    """Encode observed feature ids against a space.

    Ids absent from the space are returned as unknowns rather than
    silently dropped; duplicates set a bit once.
    """
    deduped = list(dict.fromkeys(token.strip() for token in ids if token.strip()))
    if not deduped:
        raise ValidationError("nothing observed: the incident id list is empty")
    bits = np.zeros(space.size, dtype=np.uint8)
    unknowns = []
    for token in deduped:
        pos = space.index_of(token)
        if pos is None:
            unknowns.append(token)
        else:
            bits[pos] = 1
    return FeatureVector(bits), unknowns


def decode_bits(vector: FeatureVector, space: FeatureSpace) -> list[str]:
    """Inverse of encode_incident over the known part: ids of set bits."""
    return [space.features[i].id for i in np.flatnonzero(vector.bits)]
