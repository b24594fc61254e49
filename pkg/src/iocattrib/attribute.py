"""Incident attribution: per-model rankings and a consensus tally."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, ValidationError
from .evaluate import MetricsReport
from .featurize import FeatureSpace, encode_incident
from .models import TrainedModel


@dataclass(frozen=True)
class IncidentObservation:
    """Observed feature ids for one incident, deduplicated."""

    name: str
    observed: tuple[str, ...]
    notes: str = ""

    def __post_init__(self) -> None:
        deduped = tuple(dict.fromkeys(t.strip() for t in self.observed if t.strip()))
        if not deduped:
            raise ValidationError("incident has no observed feature ids")
        object.__setattr__(self, "observed", deduped)

    @staticmethod
    def from_json(path: str | Path) -> "IncidentObservation":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: not valid JSON ({exc})") from exc
        if isinstance(data, list):
            return IncidentObservation(name=Path(path).stem, observed=tuple(data))
        return IncidentObservation(
            name=data.get("name", Path(path).stem),
            observed=tuple(data.get("observed", [])),
            notes=data.get("notes", ""),
        )


@dataclass(frozen=True)
class AttributionResult:
    incident: str
    per_model: dict[str, list[tuple[str, float]]]  # model label -> ranked (actor, score)
    model_accuracies: dict[str, float]
    threshold: float
    unknown_ids: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "incident": self.incident,
            "per_model": {m: [list(r) for r in ranks] for m, ranks in self.per_model.items()},
            "model_accuracies": dict(self.model_accuracies),
            "threshold": self.threshold,
            "unknown_ids": list(self.unknown_ids),
            "consensus": [list(t) for t in consensus(self)],
        }


def attribute_incident(
    models: list[tuple[TrainedModel, MetricsReport]],
    incident: IncidentObservation,
    space: FeatureSpace,
    threshold: float = 0.80,
) -> AttributionResult:
    """Consult every model whose CV accuracy reaches the threshold.

    The incident is encoded once against the space; ids the space does
    not know are surfaced in the result instead of silently dropped.
    """
    if not (0.0 <= threshold <= 1.0):
        raise ValidationError("threshold must lie in [0, 1]")
    if not models:
        raise ValidationError("no models supplied")
    fingerprints = {model.fingerprint for model, _ in models}
    if fingerprints != {space.fingerprint()}:
        raise ValidationError("models were trained on a different feature space")

    vector, unknowns = encode_incident(list(incident.observed), space)
    if vector.positive_count == 0:
        raise ValidationError("no known observations: every observed id is outside the feature space")

    included = [(m, r) for m, r in models if r.accuracy >= threshold]
    if not included:
        best = max(r.accuracy for _, r in models)
        raise ValidationError(
            f"no model reaches accuracy threshold {threshold:.2f}; best available is {best:.4f}"
        )

    per_model: dict[str, list[tuple[str, float]]] = {}
    accuracies: dict[str, float] = {}
    for model, report in included:
        ranked = model.predict_scores(vector).ranked()
        per_model[report.model] = ranked
        accuracies[report.model] = report.accuracy
    return AttributionResult(
        incident=incident.name,
        per_model=per_model,
        model_accuracies=accuracies,
        threshold=threshold,
        unknown_ids=tuple(unknowns),
    )


def consensus(result: AttributionResult) -> list[tuple[str, int]]:
    """Actors by descending count of first-place votes.

    Ties break by mean rank across all consulted models (lower is
    better), then by actor name.
    """
    if not result.per_model:
        raise ValidationError("attribution result contains no model outputs")
    firsts: dict[str, int] = {}
    rank_sums: dict[str, float] = {}
    n_models = len(result.per_model)
    for ranks in result.per_model.values():
        firsts[ranks[0][0]] = firsts.get(ranks[0][0], 0) + 1
        for position, (actor, _) in enumerate(ranks):
            rank_sums[actor] = rank_sums.get(actor, 0.0) + position
    tallied = [
        (actor, count, rank_sums[actor] / n_models) for actor, count in firsts.items()
    ]
    tallied.sort(key=lambda t: (-t[1], t[2], t[0]))
    return [(actor, count) for actor, count, _ in tallied]
