"""Loaders for the three input shapes.

Three kinds of files feed the pipeline:

* an actor x feature binary matrix CSV (header ``actor,<feature-id>,...``),
* a low-level IOC record CSV (header ``actor,report_id,kind,value``),
* an ATT&CK-style STIX 2.x JSON bundle.

All loaders are pure functions of file content and return immutable
structures.  Lines starting with ``#`` in CSV files are provenance
comments and are skipped.
"""

from __future__ import annotations

import csv
import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError


class FeatureKind(Enum):
    """Kind of a feature identifier, in canonical sort order."""

    TECHNIQUE = "technique"
    SOFTWARE = "software"
    FILE_HASH = "file_hash"
    IP = "ip"
    DOMAIN = "domain"


_KIND_ORDER = {kind: i for i, kind in enumerate(FeatureKind)}
_LOWLEVEL_PREFIX = {
    FeatureKind.FILE_HASH: "hash:",
    FeatureKind.IP: "ip:",
    FeatureKind.DOMAIN: "domain:",
}
_TECHNIQUE_RE = re.compile(r"^T\d+$")
_SOFTWARE_RE = re.compile(r"^S\d+$")


@dataclass(frozen=True, order=True)
class FeatureId:
    """A single feature identifier: technique, software, or IOC token."""

    sort_index: tuple[int, str] = field(init=False, repr=False)
    id: str
    kind: FeatureKind

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("feature id must be non-empty")
        object.__setattr__(self, "sort_index", (_KIND_ORDER[self.kind], self.id))

    @staticmethod
    def parse(token: str) -> "FeatureId":
        """Classify a raw token into a FeatureId.

        T-prefixed numeric ids are techniques, S-prefixed are software;
        low-level tokens carry an explicit ``hash:``/``ip:``/``domain:`` tag.
        """
        token = token.strip()
        if _TECHNIQUE_RE.match(token):
            return FeatureId(token, FeatureKind.TECHNIQUE)
        if _SOFTWARE_RE.match(token):
            return FeatureId(token, FeatureKind.SOFTWARE)
        for kind, prefix in _LOWLEVEL_PREFIX.items():
            if token.startswith(prefix) and len(token) > len(prefix):
                return FeatureId(token, kind)
        raise ParseError(f"unrecognized feature id {token!r}")

    @staticmethod
    def lowlevel(kind: FeatureKind, value: str) -> "FeatureId":
        """Build the kind-prefixed token for a low-level IOC value."""
        if kind not in _LOWLEVEL_PREFIX:
            raise ValidationError(f"{kind} is not a low-level kind")
        return FeatureId(_LOWLEVEL_PREFIX[kind] + value, kind)


@dataclass(frozen=True)
class ActorTechniqueMatrix:
    """Actors x features binary usage matrix."""

    actors: tuple[str, ...]
    features: tuple[FeatureId, ...]
    cells: np.ndarray  # shape (len(actors), len(features)), values in {0, 1}

    def __post_init__(self) -> None:
        if len(self.actors) == 0 or len(self.features) == 0:
            raise ValidationError("matrix needs at least one actor and one feature")
        if len(set(self.actors)) != len(self.actors):
            dupes = sorted({a for a in self.actors if self.actors.count(a) > 1})
            raise ValidationError(f"duplicate actor name(s): {', '.join(dupes)}")
        ids = [f.id for f in self.features]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"duplicate feature id(s): {', '.join(dupes)}")
        cells = np.asarray(self.cells, dtype=np.uint8)
        if cells.shape != (len(self.actors), len(self.features)):
            raise ValidationError(
                f"cell block shape {cells.shape} does not match "
                f"{len(self.actors)} actors x {len(self.features)} features"
            )
        if not np.isin(cells, (0, 1)).all():
            raise ValidationError("matrix cells must be 0 or 1")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    def row(self, actor: str) -> np.ndarray:
        return self.cells[self.actors.index(actor)]


@dataclass(frozen=True)
class IocRecord:
    """One low-level IOC observation from a CTI report."""

    actor: str
    report_id: str
    kind: FeatureKind
    value: str


@dataclass(frozen=True)
class StixGroup:
    stix_id: str
    name: str
    external_id: str


@dataclass(frozen=True)
class StixFeature:
    stix_id: str
    external_id: str
    kind: FeatureKind


@dataclass(frozen=True)
class StixView:
    """The subset of a STIX bundle the pipeline consumes.

    Groups are intrusion-sets; features are attack-patterns (techniques)
    and tools/malware (software); edges are "uses" relationships sourced
    at an intrusion-set.  Revoked and deprecated objects are excluded and
    counted in the load report.
    """

    groups: tuple[StixGroup, ...]
    features: tuple[StixFeature, ...]
    uses_edges: tuple[tuple[str, str], ...]
    excluded_revoked: int = 0
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        group_ids = {g.stix_id for g in self.groups}
        feature_ids = {f.stix_id for f in self.features}
        for src, dst in self.uses_edges:
            if src not in group_ids or dst not in feature_ids:
                raise ValidationError(f"uses edge ({src}, {dst}) has a dangling endpoint")


@dataclass(frozen=True)
class MatrixValidationReport:
    """Report-only findings about a loaded matrix.

    ``sparse_actors`` lists actors with at most two positive features,
    the population that attribution predictably fails on.
    """

    sparse_actors: tuple[tuple[str, int], ...]
    zero_actors: tuple[str, ...]
    all_zero_features: tuple[str, ...]
    duplicate_rows: tuple[tuple[str, ...], ...]
    source_fingerprint: str = ""

    @property
    def is_clean(self) -> bool:
        return not (self.sparse_actors or self.all_zero_features or self.duplicate_rows)


def _data_rows(path: Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    """Read a CSV, returning the header and (1-based data row, cells) pairs.

    Comment lines (leading ``#``) are skipped and do not count as rows.
    """
    header: list[str] | None = None
    rows: list[tuple[int, list[str]]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        for cells in csv.reader(fh):
            if not cells or (cells[0].startswith("#") and header is None):
                continue
            if cells[0].startswith("#"):
                continue
            if header is None:
                header = cells
            else:
                rows.append((len(rows) + 1, cells))
    if header is None:
        raise ParseError(f"{path}: no header row found")
    return header, rows


def file_fingerprint(path: str | Path) -> str:
    """SHA-256 of the file bytes, recorded in load and validation reports."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_matrix_csv(path: str | Path) -> ActorTechniqueMatrix:
    """Load an actor x feature binary matrix.

    The first header cell names the actor column; remaining header cells
    are feature ids.  Cells must be 0 or 1; a malformed cell is reported
    with its 1-based data row and CSV column.
    """
    path = Path(path)
    header, rows = _data_rows(path)
    if len(header) < 2:
        raise ParseError(f"{path}: header must name an actor column and at least one feature")
    features = tuple(FeatureId.parse(token) for token in header[1:])
    actors: list[str] = []
    cells = np.zeros((len(rows), len(features)), dtype=np.uint8)
    for r, (row_no, row) in enumerate(rows):
        if len(row) != len(header):
            raise ParseError(f"{path}: row {row_no} has {len(row)} cells, expected {len(header)}")
        actors.append(row[0].strip())
        for c, cell in enumerate(row[1:], start=2):
            value = cell.strip()
            if value not in ("0", "1"):
                raise ParseError(
                    f"{path}: malformed cell {value!r} at row {row_no} / column {c} (expected 0 or 1)"
                )
            cells[r, c - 2] = int(value)
    return ActorTechniqueMatrix(tuple(actors), features, cells)


def write_matrix_csv(matrix: ActorTechniqueMatrix, path: str | Path, comment: str | None = None) -> None:
    """Write a matrix in the canonical CSV layout (round-trips exactly)."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["actor"] + [f.id for f in matrix.features])
        for actor, row in zip(matrix.actors, matrix.cells):
            writer.writerow([actor] + [str(int(v)) for v in row])


_KIND_TOKENS = {
    "file_hash": FeatureKind.FILE_HASH,
    "ip": FeatureKind.IP,
    "domain": FeatureKind.DOMAIN,
}


def load_lowlevel_csv(path: str | Path) -> list[IocRecord]:
    """Load low-level IOC records, deduplicated on the full tuple.

    Expected header: ``actor,report_id,kind,value`` with kind one of
    file_hash, ip, domain.  Duplicate (actor, report_id, kind, value)
    rows collapse to one record; first-seen order is preserved.
    """
    path = Path(path)
    header, rows = _data_rows(path)
    expected = ["actor", "report_id", "kind", "value"]
    if [h.strip() for h in header] != expected:
        raise ParseError(f"{path}: header must be {','.join(expected)}")
    records: list[IocRecord] = []
    seen: set[tuple[str, str, str, str]] = set()
    for row_no, row in rows:
        if len(row) != 4:
            raise ParseError(f"{path}: row {row_no} has {len(row)} cells, expected 4")
        actor, report_id, kind_token, value = (cell.strip() for cell in row)
        if kind_token not in _KIND_TOKENS:
            raise ParseError(f"{path}: unknown kind {kind_token!r} at row {row_no}")
        if not value:
            raise ParseError(f"{path}: empty value at row {row_no}")
        key = (actor, report_id, kind_token, value)
        if key in seen:
            continue
        seen.add(key)
        records.append(IocRecord(actor, report_id, _KIND_TOKENS[kind_token], value))
    return records


def actor_kind_counts(records: list[IocRecord]) -> dict[str, dict[FeatureKind, int]]:
    """Distinct (kind, value) counts per actor, e.g. for summary statistics."""
    per_actor: dict[str, dict[FeatureKind, set[str]]] = {}
    for rec in records:
        kinds = per_actor.setdefault(rec.actor, {k: set() for k in _KIND_TOKENS.values()})
        kinds[rec.kind].add(rec.value)
    return {
        actor: {kind: len(values) for kind, values in kinds.items()}
        for actor, kinds in per_actor.items()
    }


def _external_id(obj: dict) -> str:
    for ref in obj.get("external_references", []):
        ext = ref.get("external_id", "")
        if ref.get("source_name") == "mitre-attack" and ext:
            return ext
    return ""


def load_stix_bundle(path: str | Path) -> StixView:
    """Extract the group/feature/uses subgraph from a STIX 2.x bundle.

    Only intrusion-set, attack-pattern, tool and malware objects are kept,
    plus "uses" relationships sourced at an intrusion-set.  Revoked or
    deprecated objects are excluded (counted); relationships with missing
    endpoints are skipped with a warning.
    """
    path = Path(path)
    try:
        bundle = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from exc
    objects = bundle.get("objects")
    if not isinstance(objects, list):
        raise ParseError(f"{path}: bundle has no objects array")

    groups: list[StixGroup] = []
    features: list[StixFeature] = []
    relationships: list[dict] = []
    seen_ids: set[str] = set()
    excluded = 0
    warnings: list[str] = []

    for obj in objects:
        obj_type = obj.get("type", "")
        stix_id = obj.get("id", "")
        if obj_type in ("intrusion-set", "attack-pattern", "tool", "malware", "relationship"):
            if not stix_id:
                raise ValidationError(f"{path}: {obj_type} object missing id")
            if stix_id in seen_ids:
                raise ValidationError(f"{path}: duplicate stix id {stix_id}")
            seen_ids.add(stix_id)
        if obj.get("revoked") or obj.get("x_mitre_deprecated"):
            if obj_type in ("intrusion-set", "attack-pattern", "tool", "malware"):
                excluded += 1
            continue
        if obj_type == "intrusion-set":
            groups.append(StixGroup(stix_id, obj.get("name", ""), _external_id(obj)))
        elif obj_type == "attack-pattern":
            features.append(StixFeature(stix_id, _external_id(obj), FeatureKind.TECHNIQUE))
        elif obj_type in ("tool", "malware"):
            features.append(StixFeature(stix_id, _external_id(obj), FeatureKind.SOFTWARE))
        elif obj_type == "relationship":
            relationships.append(obj)

    group_ids = {g.stix_id for g in groups}
    feature_ids = {f.stix_id for f in features}
    edges: list[tuple[str, str]] = []
    for rel in relationships:
        if rel.get("relationship_type") != "uses":
            continue
        src, dst = rel.get("source_ref", ""), rel.get("target_ref", "")
        if not src.startswith("intrusion-set--"):
            continue
        if src not in group_ids or dst not in feature_ids:
            warnings.append(f"skipped uses edge with dangling endpoint: {src} -> {dst}")
            continue
        edges.append((src, dst))

    return StixView(
        groups=tuple(groups),
        features=tuple(features),
        uses_edges=tuple(edges),
        excluded_revoked=excluded,
        warnings=tuple(warnings),
    )


def matrix_from_stix(view: StixView) -> ActorTechniqueMatrix:
    """Join groups to features over uses edges into a binary matrix.

    One row per group (sorted by name), features sorted by external id;
    duplicate edges collapse to a single 1.
    """
    for group in view.groups:
        if not group.name:
            raise ValidationError(f"group {group.stix_id} has no name")
    groups = sorted(view.groups, key=lambda g: g.name)
    features = sorted(view.features, key=lambda f: f.external_id)
    for feat in features:
        if not feat.external_id:
            raise ValidationError(f"feature {feat.stix_id} has no external id")
    g_index = {g.stix_id: i for i, g in enumerate(groups)}
    f_index = {f.stix_id: i for i, f in enumerate(features)}
    cells = np.zeros((len(groups), len(features)), dtype=np.uint8)
    for src, dst in view.uses_edges:
        cells[g_index[src], f_index[dst]] = 1
    feature_ids = tuple(FeatureId(f.external_id, f.kind) for f in features)
    return ActorTechniqueMatrix(tuple(g.name for g in groups), feature_ids, cells)


def validate_matrix(matrix: ActorTechniqueMatrix, source_fingerprint: str = "") -> MatrixValidationReport:
    """Report sparse actors, dead feature columns, and duplicate rows."""
    positives = matrix.cells.sum(axis=1)
    sparse = tuple(
        (actor, int(n1))
        for actor, n1 in zip(matrix.actors, positives)
        if n1 <= 2
    )
    zero_actors = tuple(a for a, n1 in zip(matrix.actors, positives) if n1 == 0)
    dead = tuple(
        f.id for f, col in zip(matrix.features, matrix.cells.sum(axis=0)) if col == 0
    )
    by_row: dict[bytes, list[str]] = {}
    for actor, row in zip(matrix.actors, matrix.cells):
        by_row.setdefault(row.tobytes(), []).append(actor)
    duplicates = tuple(tuple(names) for names in by_row.values() if len(names) > 1)
    return MatrixValidationReport(
        sparse_actors=sparse,
        zero_actors=zero_actors,
        all_zero_features=dead,
        duplicate_rows=duplicates,
        source_fingerprint=source_fingerprint,
    )
