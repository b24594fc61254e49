"""Report writers: JSON for machines, Markdown tables for humans, and
matplotlib figures rendered next to the delimited output."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .evaluate import LevelGap, MetricsReport, PerClassReport
from .ingest import FeatureKind
from .stats import DistributionSummary, ZTestResult


def write_json(path: Path, payload: dict, stamp: dict) -> None:
    body = dict(payload)
    body.update(stamp)
    path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _stamp_line(stamp: dict) -> str:
    return f"<!-- config_hash={stamp['config_hash']} seed={stamp['seed']} -->"


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}%"


def _hms(seconds: float) -> str:
    total = int(round(seconds))
    h, rest = divmod(total, 3600)
    m, s = divmod(rest, 60)
    return f"{h}:{m:02d}:{s:02d}"


def _annotate(fig, stamp: dict) -> None:
    fig.text(
        0.99, 0.01, f"cfg {stamp['config_hash']} seed {stamp['seed']}",
        ha="right", va="bottom", fontsize=6, color="gray",
    )


def metrics_markdown(title: str, reports: list[MetricsReport], stamp: dict) -> str:
    lines = [
        _stamp_line(stamp),
        f"# {title}",
        "",
        "| Machine Learning Algorithm | Accuracy | Precision | Recall | F-measure | Execution Time |",
        "|---|---|---|---|---|---|",
    ]
    for rep in reports:
        lines.append(
            f"| {rep.model} | {_pct(rep.accuracy)} | {_pct(rep.precision_weighted)} | "
            f"{_pct(rep.recall_weighted)} | {rep.f_measure:.2f} | {_hms(rep.wall_time_s)} |"
        )
    lines.append("")
    return "\n".join(lines)


def gap_markdown(gap: LevelGap, stamp: dict) -> str:
    lines = [
        _stamp_line(stamp),
        "# High-level vs low-level indicators",
        "",
        f"Best high-level model: **{gap.best_high[0]}** at {_pct(gap.best_high[1])}",
        f"Best low-level model: **{gap.best_low[0]}** at {_pct(gap.best_low[1])}",
        f"Accuracy gap: **{_pct(gap.gap)}**",
        "",
        "| Model | High-level accuracy | Low-level accuracy |",
        "|---|---|---|",
    ]
    for name, high, low in gap.rows:
        fmt = lambda v: "-" if v is None else _pct(v)
        lines.append(f"| {name} | {fmt(high)} | {fmt(low)} |")
    lines.append("")
    return "\n".join(lines)


def per_class_markdown(report: PerClassReport, model: str, stamp: dict) -> str:
    lines = [
        _stamp_line(stamp),
        f"# Per-actor recall ({model})",
        "",
        f"Overall mean recall: {_pct(report.overall_mean_recall)}",
    ]
    if report.sparse_mean_recall is not None:
        lines.append(
            f"Mean recall of actors with at most {report.sparse_threshold} profile "
            f"features: {_pct(report.sparse_mean_recall)}"
        )
    if report.failing:
        lines.append(f"Unattributed actors (recall 0): {', '.join(report.failing)}")
    lines += ["", "| Actor | Recall | Profile size |", "|---|---|---|"]
    for cls, recall, n1 in report.rows:
        lines.append(f"| {cls} | {_pct(recall)} | {n1} |")
    lines.append("")
    return "\n".join(lines)


def lowlevel_stats_markdown(
    counts: dict[str, dict[FeatureKind, int]],
    summaries: dict[str, DistributionSummary],
    stamp: dict,
) -> str:
    lines = [
        _stamp_line(stamp),
        "# Low-level IOC statistics",
        "",
        "| Cyber Threat Actor | File Hashes | IP Addresses | Malicious Domains |",
        "|---|---|---|---|",
    ]
    for actor, kinds in counts.items():
        lines.append(
            f"| {actor} | {kinds[FeatureKind.FILE_HASH]} | {kinds[FeatureKind.IP]} | "
            f"{kinds[FeatureKind.DOMAIN]} |"
        )
    lines += ["", "| Statistic | File Hashes | IP Addresses | Malicious Domains |", "|---|---|---|---|"]
    order = ["file_hashes", "ips", "domains"]
    fmt = lambda v: f"{v:g}"
    lines.append("| Mean | " + " | ".join(fmt(summaries[k].mean) for k in order) + " |")
    lines.append("| Median | " + " | ".join(fmt(summaries[k].median) for k in order) + " |")
    lines.append("| Interquartile Range | " + " | ".join(fmt(summaries[k].iqr) for k in order) + " |")
    lines.append("")
    return "\n".join(lines)


def noise_stats_markdown(
    original: DistributionSummary,
    by_rate: dict[float, DistributionSummary],
    ztest: ZTestResult,
    stamp: dict,
) -> str:
    lines = [
        _stamp_line(stamp),
        "# High-level positive-count statistics",
        "",
        "| Dataset | Mean | SD |",
        "|---|---|---|",
        f"| original | {original.mean:.2f} | {original.std:.2f} |",
    ]
    for rate in sorted(by_rate):
        s = by_rate[rate]
        lines.append(f"| {int(round(rate * 100))}% noise | {s.mean:.2f} | {s.std:.2f} |")
    lines += [
        "",
        f"Two-sample Z test, original vs pooled synthesized: Z = {ztest.z:.4f}, "
        f"p = {ztest.p_value:.3g} (n = {ztest.n_a} vs {ztest.n_b}).",
        "",
    ]
    return "\n".join(lines)


def attribution_markdown(result_dict: dict, stamp: dict) -> str:
    lines = [
        _stamp_line(stamp),
        f"# Threat actor prediction: {result_dict['incident']}",
        "",
        f"Models with cross-validation accuracy >= {result_dict['threshold']:.2f} were consulted.",
    ]
    if result_dict["unknown_ids"]:
        lines.append(
            "Observed ids outside the training catalog: "
            + ", ".join(result_dict["unknown_ids"])
        )
    lines += [
        "",
        "| Machine Learning Algorithm | Cyber Threat Actor Prediction |",
        "|---|---|",
    ]
    for model, ranks in result_dict["per_model"].items():
        lines.append(f"| {model} | {ranks[0][0]} |")
    lines += ["", "## Consensus", "", "| Actor | First-place votes |", "|---|---|"]
    for actor, count in result_dict["consensus"]:
        lines.append(f"| {actor} | {count} |")
    lines += ["", "## Top-5 ranked scores", ""]
    for model, ranks in result_dict["per_model"].items():
        top = ", ".join(f"{actor} ({score:.3f})" for actor, score in ranks[:5])
        lines.append(f"- **{model}**: {top}")
    lines.append("")
    return "\n".join(lines)


def fig_lowlevel_distribution(counts: dict[str, dict[FeatureKind, int]], path: Path, stamp: dict) -> None:
    """Box plot of per-actor token counts for the three IOC kinds."""
    data = [
        [kinds[FeatureKind.FILE_HASH] for kinds in counts.values()],
        [kinds[FeatureKind.IP] for kinds in counts.values()],
        [kinds[FeatureKind.DOMAIN] for kinds in counts.values()],
    ]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.boxplot(data, tick_labels=["File hashes", "IP addresses", "Domains"])
    ax.set_ylabel("Distinct tokens per actor")
    ax.set_title("Low-level IOC distribution")
    _annotate(fig, stamp)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fig_positive_counts(original: list[int], by_rate: dict[float, list[int]], path: Path, stamp: dict) -> None:
    """Histograms of per-instance positive counts, original vs noised."""
    fig, ax = plt.subplots(figsize=(7, 4))
    bins = np.histogram_bin_edges(
        original + [v for values in by_rate.values() for v in values], bins=30
    )
    ax.hist(original, bins=bins, alpha=0.55, label="original")
    for rate in sorted(by_rate):
        ax.hist(by_rate[rate], bins=bins, alpha=0.45, label=f"{int(round(rate * 100))}% noise")
    ax.set_xlabel("Positive features per instance")
    ax.set_ylabel("Instances")
    ax.set_title("High-level positive-count distribution")
    ax.legend()
    _annotate(fig, stamp)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fig_accuracy_bars(reports: list[MetricsReport], title: str, path: Path, stamp: dict) -> None:
    fig, ax = plt.subplots(figsize=(7, 0.35 * len(reports) + 1.8))
    names = [r.model for r in reports]
    values = [100.0 * r.accuracy for r in reports]
    y = np.arange(len(reports))
    ax.barh(y, values)
    ax.set_yticks(y, names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("Accuracy (%)")
    ax.set_xlim(0, 100)
    ax.set_title(title)
    _annotate(fig, stamp)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
