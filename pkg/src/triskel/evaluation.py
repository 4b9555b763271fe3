"""Split-and-trial evaluation protocol: stratified seeded splits, repeated
trials, and max/min/mean accuracy summaries with confusion counts.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
import logging

import numpy as np

from .classifier import evaluate as evaluate_kb
from .classifier import train
from .corpus import Corpus
from .errors import DataError, SplitInfeasible, UnusableSample
from .features import FeatureMatrix
from .pipeline import PipelineConfig, run_pipeline
from .validation import check_fraction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialPlan:
    """How many trials to run at which training fraction, from which seed."""

    training_fraction: float = 0.8
    trials: int = 5
    seed: int = 0

    def __post_init__(self):
        check_fraction("training_fraction", self.training_fraction)
        if self.trials < 1:
            raise DataError(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class CorpusFeatures:
    """Per-class usable feature matrices, extracted once per corpus."""

    classes: tuple[tuple[int, str, tuple[tuple[str, FeatureMatrix], ...]], ...]
    unusable: tuple[tuple[str, str], ...]  # (class_name, file_name)
    checksum: str

    @property
    def class_names(self) -> dict[int, str]:
        return {cid: name for cid, name, _ in self.classes}


def extract_corpus_features(
    corpus: Corpus,
    config: PipelineConfig = PipelineConfig(),
) -> CorpusFeatures:
    """Run the pipeline over every corpus file; unusable samples are counted
    and excluded rather than failing the batch."""
    classes = []
    unusable = []
    for cid, (name, paths) in enumerate(corpus.classes, start=1):
        usable = []
        for path in paths:
            try:
                fm = run_pipeline(path, config)
            except UnusableSample as exc:
                logger.warning("unusable sample: %s", exc)
                unusable.append((name, path.name))
                continue
            usable.append((path.name, fm))
        classes.append((cid, name, tuple(usable)))
    return CorpusFeatures(
        classes=tuple(classes),
        unusable=tuple(unusable),
        checksum=corpus.manifest_checksum,
    )


def stratified_split(class_sizes, fraction: float, rng) -> dict:
    """Per-class disjoint train/test index sets covering every sample.

    class_sizes maps class_id -> usable sample count. Every class needs at
    least 2 usable samples so both sides are non-empty.
    """
    split = {}
    for cid, n in sorted(class_sizes.items()):
        if n < 2:
            raise SplitInfeasible(
                f"class {cid} has {n} usable samples; need >= 2 to split"
            )
        n_train = int(round(fraction * n))
        n_train = max(1, min(n - 1, n_train))
        perm = rng.permutation(n)
        split[cid] = (sorted(perm[:n_train].tolist()), sorted(perm[n_train:].tolist()))
    return split


def run_evaluation(
    features: CorpusFeatures | Corpus,
    plan: TrialPlan,
    config: PipelineConfig = PipelineConfig(),
) -> dict:
    """The full protocol: seeded stratified splits, one train/evaluate cycle
    per trial, and a max/min/mean accuracy summary. The report is a plain
    JSON-serializable dict; identical inputs produce identical reports."""
    if isinstance(features, Corpus):
        features = extract_corpus_features(features, config)

    class_sizes = {cid: len(samples) for cid, _, samples in features.classes}
    seeds = np.random.SeedSequence(plan.seed).spawn(plan.trials)
    trials = []
    accuracies = []
    for t in range(plan.trials):
        rng = np.random.default_rng(seeds[t])
        split = stratified_split(class_sizes, plan.training_fraction, rng)
        train_set = []
        test_set = []
        for cid, _, samples in features.classes:
            train_idx, test_idx = split[cid]
            train_set.extend((cid, samples[i][1]) for i in train_idx)
            test_set.extend((cid, samples[i][1]) for i in test_idx)
        kb = train(
            train_set,
            class_names=features.class_names,
            config=config.fingerprint(),
        )
        report = evaluate_kb(kb, test_set, normalize_by_refs=config.normalize_by_refs)
        accuracies.append(report.accuracy)
        trials.append(
            {
                "trial": t,
                "accuracy": report.accuracy,
                "correct": report.correct,
                "total": report.total,
                "ties": report.ties,
                "train_sizes": {str(cid): len(split[cid][0]) for cid in split},
                "test_sizes": {str(cid): len(split[cid][1]) for cid in split},
                "confusion": {
                    str(true): {str(p): n for p, n in sorted(row.items())}
                    for true, row in sorted(report.confusion.items())
                },
            }
        )

    return {
        "protocol": {
            "training_fraction": plan.training_fraction,
            "trials": plan.trials,
            "seed": plan.seed,
        },
        "config": config.fingerprint(),
        "corpus_checksum": features.checksum,
        "classes": {
            str(cid): {"name": name, "usable": len(samples)}
            for cid, name, samples in features.classes
        },
        "unusable": [
            {"class": name, "file": fname} for name, fname in features.unusable
        ],
        "trials": trials,
        "summary": {
            "max_accuracy": max(accuracies),
            "min_accuracy": min(accuracies),
            "mean_accuracy": sum(accuracies) / len(accuracies),
        },
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def summary_csv(reports: list[dict]) -> str:
    """Plot-ready CSV: one row per training fraction."""
    lines = ["training_fraction,max_accuracy,min_accuracy,mean_accuracy"]
    for rep in sorted(reports, key=lambda r: r["protocol"]["training_fraction"]):
        s = rep["summary"]
        lines.append(
            f"{rep['protocol']['training_fraction']},"
            f"{s['max_accuracy']},{s['min_accuracy']},{s['mean_accuracy']}"
        )
    return "\n".join(lines) + "\n"


def trials_csv(reports: list[dict]) -> str:
    """Per-trial accuracy rows across all fractions."""
    lines = ["training_fraction,trial,accuracy,correct,total,ties"]
    for rep in sorted(reports, key=lambda r: r["protocol"]["training_fraction"]):
        frac = rep["protocol"]["training_fraction"]
        for t in rep["trials"]:
            lines.append(
                f"{frac},{t['trial']},{t['accuracy']},{t['correct']},"
                f"{t['total']},{t['ties']}"
            )
    return "\n".join(lines) + "\n"


def confusion_csv(reports: list[dict]) -> str:
    """Long-format confusion counts: fraction, trial, true, predicted, count."""
    lines = ["training_fraction,trial,true_class,predicted_class,count"]
    for rep in sorted(reports, key=lambda r: r["protocol"]["training_fraction"]):
        frac = rep["protocol"]["training_fraction"]
        for t in rep["trials"]:
            for true_id, row in sorted(t["confusion"].items()):
                for pred_id, count in sorted(row.items()):
                    lines.append(f"{frac},{t['trial']},{true_id},{pred_id},{count}")
    return "\n".join(lines) + "\n"
