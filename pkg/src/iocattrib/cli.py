"""Command-line front end.

Subcommands: ingest, synthesize, stats, evaluate, attribute, report.
Every run is driven by a JSON config (--config); flags override config
fields.  Exit codes: 0 success, 2 input/validation error, 3 config
error, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .attribute import IncidentObservation, attribute_incident
from .config import RunConfig, load_config
from .errors import ConfigError, IocAttribError, ModelError, ParseError, ValidationError
from .evaluate import MetricsReport, compare_levels, cross_validate, per_class_report
from .featurize import Dataset, DatasetLevel, build_feature_space, vectorize_lowlevel, vectorize_matrix
from .ingest import (
    actor_kind_counts,
    file_fingerprint,
    FeatureKind,
    load_lowlevel_csv,
    load_matrix_csv,
    load_stix_bundle,
    matrix_from_stix,
    validate_matrix,
    write_matrix_csv,
)
from .models import fit
from .stats import summarize_distribution, z_test
from .synth import synthesize_dataset, write_dataset_csv
from . import reporting


def _load_high_matrix(cfg: RunConfig):
    if cfg.high_matrix is not None:
        return load_matrix_csv(cfg.high_matrix), None
    view = load_stix_bundle(cfg.stix_bundle)
    return matrix_from_stix(view), view


def _high_datasets(cfg: RunConfig) -> tuple[Dataset, Dataset]:
    """(original dataset, synthesized dataset) for the high-level source."""
    matrix, _ = _load_high_matrix(cfg)
    space = build_feature_space(matrix)
    originals = vectorize_matrix(matrix, space)
    return originals, synthesize_dataset(originals, cfg.noise)


def _low_dataset(cfg: RunConfig) -> Dataset:
    records = load_lowlevel_csv(cfg.low_records)
    space = build_feature_space(records)
    dataset, _ = vectorize_lowlevel(records, space)
    return dataset


def _out_dir(cfg: RunConfig, name: str) -> Path:
    path = cfg.output_dir / name
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_ingest(cfg: RunConfig) -> int:
    out = _out_dir(cfg, "ingest")
    matrix, view = _load_high_matrix(cfg)
    source = cfg.high_matrix if cfg.high_matrix is not None else cfg.stix_bundle
    fingerprint = file_fingerprint(source)
    write_matrix_csv(
        matrix,
        out / "highlevel_matrix.canonical.csv",
        comment=f"config_hash={cfg.config_hash} seed={cfg.seed} source_sha256={fingerprint}",
    )
    report = validate_matrix(matrix, source_fingerprint=fingerprint)
    payload = {
        "source": str(source),
        "source_sha256": fingerprint,
        "actors": len(matrix.actors),
        "features": len(matrix.features),
        "sparse_actors": [[a, n] for a, n in report.sparse_actors],
        "zero_actors": list(report.zero_actors),
        "all_zero_features": list(report.all_zero_features),
        "duplicate_rows": [list(g) for g in report.duplicate_rows],
    }
    if view is not None:
        payload["stix"] = {
            "groups": len(view.groups),
            "features": len(view.features),
            "uses_edges": len(view.uses_edges),
            "excluded_revoked": view.excluded_revoked,
            "warnings": list(view.warnings),
        }
    if cfg.low_records is not None:
        records = load_lowlevel_csv(cfg.low_records)
        low_fp = file_fingerprint(cfg.low_records)
        with open(out / "lowlevel_iocs.canonical.csv", "w", encoding="utf-8") as fh:
            fh.write(f"# config_hash={cfg.config_hash} seed={cfg.seed} source_sha256={low_fp}\n")
            fh.write("actor,report_id,kind,value\n")
            for rec in records:
                fh.write(f"{rec.actor},{rec.report_id},{rec.kind.value},{rec.value}\n")
        payload["lowlevel"] = {
            "source": str(cfg.low_records),
            "source_sha256": low_fp,
            "records": len(records),
            "actors": len({r.actor for r in records}),
        }
    reporting.write_json(out / "validation_report.json", payload, cfg.stamp)
    print(f"ingest: wrote {out}")
    return 0


def cmd_synthesize(cfg: RunConfig) -> int:
    out = _out_dir(cfg, "synthesize")
    _, synthesized = _high_datasets(cfg)
    write_dataset_csv(
        synthesized,
        out / "synthesized_high.csv",
        comment=f"config_hash={cfg.config_hash} seed={cfg.seed} noise_seed={cfg.noise.seed}",
    )
    print(f"synthesize: {len(synthesized)} instances -> {out / 'synthesized_high.csv'}")
    return 0


def cmd_stats(cfg: RunConfig) -> int:
    out = _out_dir(cfg, "stats")
    payload: dict = {}

    if cfg.low_records is not None:
        records = load_lowlevel_csv(cfg.low_records)
        counts = actor_kind_counts(records)
        columns = {
            "file_hashes": [k[FeatureKind.FILE_HASH] for k in counts.values()],
            "ips": [k[FeatureKind.IP] for k in counts.values()],
            "domains": [k[FeatureKind.DOMAIN] for k in counts.values()],
        }
        summaries = {name: summarize_distribution(vals) for name, vals in columns.items()}
        payload["lowlevel"] = {
            "per_actor": {
                actor: {kind.value: n for kind, n in kinds.items()} for actor, kinds in counts.items()
            },
            "summaries": {
                name: {
                    "mean": s.mean, "std": s.std, "median": s.median,
                    "q1": s.q1, "q3": s.q3, "iqr": s.iqr,
                }
                for name, s in summaries.items()
            },
        }
        (out / "lowlevel_stats.md").write_text(
            reporting.lowlevel_stats_markdown(counts, summaries, cfg.stamp), encoding="utf-8"
        )
        reporting.fig_lowlevel_distribution(counts, out / "lowlevel_distribution.png", cfg.stamp)

    originals, synthesized = _high_datasets(cfg)
    orig_counts = [inst.vector.positive_count for inst in originals.instances]
    by_rate: dict[float, list[int]] = {}
    for inst in synthesized.instances:
        if not inst.provenance.is_original:
            by_rate.setdefault(inst.provenance.rate, []).append(inst.vector.positive_count)
    pooled = [v for values in by_rate.values() for v in values]
    ztest = z_test([float(v) for v in orig_counts], [float(v) for v in pooled])
    orig_summary = summarize_distribution([float(v) for v in orig_counts])
    rate_summaries = {
        rate: summarize_distribution([float(v) for v in values]) for rate, values in by_rate.items()
    }
    payload["highlevel"] = {
        "original": {"mean": orig_summary.mean, "std": orig_summary.std},
        "by_rate": {
            repr(rate): {"mean": s.mean, "std": s.std} for rate, s in rate_summaries.items()
        },
        "z_test": {
            "z": ztest.z, "p_value": ztest.p_value,
            "n_original": ztest.n_a, "n_synthesized": ztest.n_b,
            "warnings": list(ztest.warnings),
        },
    }
    (out / "highlevel_noise_stats.md").write_text(
        reporting.noise_stats_markdown(orig_summary, rate_summaries, ztest, cfg.stamp),
        encoding="utf-8",
    )
    reporting.fig_positive_counts(orig_counts, by_rate, out / "highlevel_positive_counts.png", cfg.stamp)
    reporting.write_json(out / "stats.json", payload, cfg.stamp)
    print(f"stats: wrote {out}")
    return 0


def _cv_task(args):
    spec, dataset, cv = args
    return cross_validate(spec, dataset, cv)


def _run_suite(cfg: RunConfig, dataset: Dataset, specs) -> list[MetricsReport]:
    tasks = [(spec, dataset, cfg.cv) for spec in specs]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_cv_task, tasks))
    return [_cv_task(t) for t in tasks]


def cmd_evaluate(cfg: RunConfig) -> int:
    out = _out_dir(cfg, "evaluate")
    high_reports: list[MetricsReport] = []
    low_reports: list[MetricsReport] = []

    if cfg.high_models:
        _, synthesized = _high_datasets(cfg)
        high_reports = _run_suite(cfg, synthesized, cfg.high_models)
        reporting.write_json(
            out / "high_report.json",
            {"level": "high", "cv_k": cfg.cv.k, "reports": [r.to_dict() for r in high_reports]},
            cfg.stamp,
        )
        (out / "high_report.md").write_text(
            reporting.metrics_markdown(
                "Effectiveness and efficiency, high-level IOC dataset", high_reports, cfg.stamp
            ),
            encoding="utf-8",
        )
        reporting.fig_accuracy_bars(
            high_reports, "High-level IOC models", out / "accuracy_high.png", cfg.stamp
        )
        best = max(high_reports, key=lambda r: r.accuracy)
        detail = per_class_report(best, synthesized)
        reporting.write_json(
            out / "per_class_high.json", {"model": best.model, **detail.to_dict()}, cfg.stamp
        )
        (out / "per_class_high.md").write_text(
            reporting.per_class_markdown(detail, best.model, cfg.stamp), encoding="utf-8"
        )

    if cfg.low_records is not None and cfg.low_models:
        low_dataset = _low_dataset(cfg)
        low_reports = _run_suite(cfg, low_dataset, cfg.low_models)
        reporting.write_json(
            out / "low_report.json",
            {"level": "low", "cv_k": cfg.cv.k, "reports": [r.to_dict() for r in low_reports]},
            cfg.stamp,
        )
        (out / "low_report.md").write_text(
            reporting.metrics_markdown(
                "Effectiveness and efficiency, low-level IOC dataset", low_reports, cfg.stamp
            ),
            encoding="utf-8",
        )
        reporting.fig_accuracy_bars(
            low_reports, "Low-level IOC models", out / "accuracy_low.png", cfg.stamp
        )

    if high_reports and low_reports:
        gap = compare_levels(high_reports, low_reports)
        reporting.write_json(out / "gap_report.json", gap.to_dict(), cfg.stamp)
        (out / "gap_report.md").write_text(reporting.gap_markdown(gap, cfg.stamp), encoding="utf-8")

    print(f"evaluate: wrote {out}")
    return 0


def cmd_attribute(cfg: RunConfig) -> int:
    import json

    if cfg.incident is None:
        raise ConfigError("attribute requires an 'incident' path in the config")
    report_path = cfg.output_dir / "evaluate" / "high_report.json"
    if not report_path.exists():
        raise ValidationError(
            f"no evaluation report at {report_path}; run the evaluate command first"
        )
    report_doc = json.loads(report_path.read_text(encoding="utf-8"))
    accuracy_by_label = {r["model"]: r["accuracy"] for r in report_doc["reports"]}

    incident = IncidentObservation.from_json(cfg.incident)
    originals, synthesized = _high_datasets(cfg)
    space = synthesized.space

    models = []
    for spec in cfg.high_models:
        accuracy = accuracy_by_label.get(spec.label)
        if accuracy is None or accuracy < cfg.threshold:
            continue
        trained = fit(spec, synthesized)
        stub = [r for r in report_doc["reports"] if r["model"] == spec.label][0]
        models.append((trained, MetricsReport.from_dict(stub)))
    if not models:
        best = max(accuracy_by_label.values()) if accuracy_by_label else 0.0
        raise ValidationError(
            f"no model reaches accuracy threshold {cfg.threshold:.2f}; best available is {best:.4f}"
        )

    result = attribute_incident(models, incident, space, cfg.threshold)
    out = _out_dir(cfg, "attribute")
    payload = result.to_dict()
    reporting.write_json(out / "attribution.json", payload, cfg.stamp)
    (out / "attribution.md").write_text(
        reporting.attribution_markdown(payload, cfg.stamp), encoding="utf-8"
    )
    print(f"attribute: wrote {out}")
    return 0


def cmd_report(cfg: RunConfig) -> int:
    import json

    if not (cfg.output_dir / "stats" / "stats.json").exists():
        cmd_stats(cfg)
    if not (cfg.output_dir / "evaluate" / "high_report.json").exists():
        cmd_evaluate(cfg)
    if cfg.incident is not None and not (cfg.output_dir / "attribute" / "attribution.json").exists():
        cmd_attribute(cfg)

    out = _out_dir(cfg, "report")
    merged: dict = {}
    sections: list[str] = [reporting._stamp_line(cfg.stamp), "# Consolidated run report", ""]
    for name, rel in [
        ("stats", Path("stats") / "stats.json"),
        ("evaluate_high", Path("evaluate") / "high_report.json"),
        ("evaluate_low", Path("evaluate") / "low_report.json"),
        ("gap", Path("evaluate") / "gap_report.json"),
        ("per_class", Path("evaluate") / "per_class_high.json"),
        ("attribution", Path("attribute") / "attribution.json"),
    ]:
        path = cfg.output_dir / rel
        if path.exists():
            merged[name] = json.loads(path.read_text(encoding="utf-8"))
    for rel in [
        Path("stats") / "lowlevel_stats.md",
        Path("stats") / "highlevel_noise_stats.md",
        Path("evaluate") / "high_report.md",
        Path("evaluate") / "low_report.md",
        Path("evaluate") / "gap_report.md",
        Path("evaluate") / "per_class_high.md",
        Path("attribute") / "attribution.md",
    ]:
        path = cfg.output_dir / rel
        if path.exists():
            body = path.read_text(encoding="utf-8")
            body = "\n".join(l for l in body.splitlines() if not l.startswith("<!--"))
            sections.append(body)
            sections.append("")
    reporting.write_json(out / "report.json", merged, cfg.stamp)
    (out / "REPORT.md").write_text("\n".join(sections), encoding="utf-8")
    print(f"report: wrote {out}")
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "synthesize": cmd_synthesize,
    "stats": cmd_stats,
    "evaluate": cmd_evaluate,
    "attribute": cmd_attribute,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iocattrib",
        description="Cyber threat attribution from high- and low-level IOC datasets.",
    )
    parser.add_argument("--version", action="version", version=f"iocattrib {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("ingest", "load and validate the configured datasets, write canonical CSVs"),
        ("synthesize", "expand the high-level dataset with noisy instances"),
        ("stats", "distribution summaries and the original-vs-synthesized Z test"),
        ("evaluate", "cross-validate the configured model suites on both IOC levels"),
        ("attribute", "attribute the configured incident with models above the threshold"),
        ("report", "consolidate (and if needed produce) all artifacts"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the run config JSON")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="override the output directory")
        p.add_argument("--models", help="comma-separated model labels to keep")
        p.add_argument("--threshold", type=float, help="attribution accuracy threshold")
        p.add_argument("--jobs", type=int, help="parallel workers for model evaluation")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(
            args.config,
            seed=args.seed,
            output_dir=args.out,
            models=args.models.split(",") if args.models else None,
            threshold=args.threshold,
            jobs=args.jobs,
        )
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        _print_error(3, exc)
        return 3
    except (ParseError, ValidationError) as exc:
        _print_error(2, exc)
        return 2
    except ModelError as exc:
        _print_error(4, exc)
        return 4
    except IocAttribError as exc:
        _print_error(4, exc)
        return 4


def _print_error(code: int, exc: Exception) -> None:
    message = " ".join(str(exc).split())
    print(f"error code={code} type={type(exc).__name__} msg={message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
