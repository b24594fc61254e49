#!/usr/bin/env python3
"""Calibration harness: run key models on the current fixtures and report
CV accuracies against the acceptance bands.  Development tool only."""

from __future__ import annotations

import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

import iocattrib as ia
from iocattrib.evaluate import CvConfig, cross_validate
from iocattrib.models import ModelSpec

HIGH_MODELS = {
    "naive_bayes": ModelSpec("naive_bayes", seed=11),
    "naive_bayes_kernel": ModelSpec("naive_bayes_kernel", seed=12),
    "knn": ModelSpec("knn", seed=13),
    "decision_tree": ModelSpec("decision_tree", seed=14),
    "random_forest": ModelSpec("random_forest", seed=15),
    "glm": ModelSpec("glm", seed=16),
    "ann": ModelSpec("ann", seed=17),
    "bagging_rf": ModelSpec(
        "bagging", bases=(ModelSpec("random_forest", seed=18),), seed=19
    ),
}

BANDS = {
    "ann": (0.88, 1.0),
    "bagging_rf": (0.82, 1.0),
    "random_forest": (0.78, 1.0),
    "naive_bayes": (0.62, 0.78),
}


def main() -> int:
    which = sys.argv[1] if len(sys.argv) > 1 else "high"
    names = sys.argv[2].split(",") if len(sys.argv) > 2 else None

    if which in ("high", "both"):
        m = ia.load_matrix_csv(ROOT / "src/iocattrib/data/highlevel_matrix.csv")
        space = ia.build_feature_space(m)
        ds = ia.vectorize_matrix(m, space)
        synth = ia.synthesize_dataset(ds, ia.NoiseSpec(seed=101))
        print(f"high dataset: {len(synth)} instances, N={space.size}")
        cv = CvConfig(k=10, seed=7)
        for name, spec in HIGH_MODELS.items():
            if names and name not in names:
                continue
            t0 = time.perf_counter()
            rep = cross_validate(spec, synth, cv)
            dt = time.perf_counter() - t0
            band = BANDS.get(name)
            flag = ""
            if band:
                flag = "OK" if band[0] <= rep.accuracy <= band[1] else f"OUT {band}"
            print(f"  {name:20s} acc={rep.accuracy:.4f} P={rep.precision_weighted:.4f} "
                  f"F={rep.f_measure:.4f} [{dt:6.1f}s] {flag}")

    if which in ("low", "both"):
        recs = ia.load_lowlevel_csv(ROOT / "src/iocattrib/data/lowlevel_iocs.csv")
        space = ia.build_feature_space(recs)
        low, _ = ia.vectorize_lowlevel(recs, space)
        print(f"low dataset: {len(low)} instances, N={space.size}")
        cv = CvConfig(k=10, seed=7)
        low_models = {
            "naive_bayes": ModelSpec("naive_bayes", seed=21),
            "naive_bayes_kernel": ModelSpec("naive_bayes_kernel", seed=22),
            "knn": ModelSpec("knn", seed=23),
            "decision_tree": ModelSpec("decision_tree", seed=24),
            "random_forest": ModelSpec("random_forest", seed=25),
            "glm": ModelSpec("glm", seed=26),
            "ann": ModelSpec("ann", seed=27),
            "deep": ModelSpec("deep", seed=28),
            "gbt": ModelSpec("gradient_boosted_trees", seed=29),
            "voting_glm_nb_rf": ModelSpec(
                "voting",
                bases=(ModelSpec("glm", seed=30), ModelSpec("naive_bayes", seed=31), ModelSpec("random_forest", seed=32)),
                seed=33,
            ),
            "bagging_glm": ModelSpec("bagging", bases=(ModelSpec("glm", seed=34),), seed=35),
            "adaboost_glm": ModelSpec("adaboost", bases=(ModelSpec("glm", seed=36),), seed=37),
        }
        for name, spec in low_models.items():
            if names and name not in names:
                continue
            t0 = time.perf_counter()
            rep = cross_validate(spec, low, cv)
            dt = time.perf_counter() - t0
            flag = "OK" if rep.accuracy <= 0.50 else "OUT >0.50"
            print(f"  {name:20s} acc={rep.accuracy:.4f} [{dt:6.1f}s] {flag}")

    return 0


if __name__ == "__main__":
    sys.exit(main())
