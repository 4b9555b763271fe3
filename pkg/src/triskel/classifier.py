"""Acceptance-count voting classifier over interval-valued reference vectors.

Training assimilates each sample's feature matrix into a six-interval
reference vector, stored per sample (no cross-sample merging). Classification
counts, for every (test triangle, column, reference) triple, whether the
crisp value falls inside the stored interval, and votes for the class with
the highest count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .errors import (
    DataError,
    EmptyClass,
    EmptyTestSet,
    EmptyTrainingSet,
)
from .features import FeatureMatrix, IntervalVector, assimilate
from .validation import crisp_rows

KNOWLEDGEBASE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ReferenceVector:
    """One training sample's interval vector, tagged with its class."""

    class_id: int
    sample_id: int
    iv: IntervalVector

    def __post_init__(self):
        if self.class_id < 1 or self.sample_id < 1:
            raise DataError(
                f"class_id and sample_id must be positive, got "
                f"({self.class_id}, {self.sample_id})"
            )


def _bounds_matrix(iv: IntervalVector) -> tuple[list[float], list[float]]:
    los = [i.lo for i in iv.lengths] + [i.lo for i in iv.angles]
    his = [i.hi for i in iv.lengths] + [i.hi for i in iv.angles]
    return los, his


@dataclass
class Knowledgebase:
    """Trained state: per-class lists of reference vectors plus the pipeline
    configuration fingerprint they were built with. Treat as immutable."""

    classes: tuple[tuple[int, str, tuple[ReferenceVector, ...]], ...]
    config: dict = field(default_factory=dict)
    _bounds: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ids = [cid for cid, _, _ in self.classes]
        if len(ids) != len(set(ids)):
            raise DataError(f"duplicate class ids in knowledgebase: {ids}")
        for cid, name, refs in self.classes:
            if not refs:
                raise EmptyClass(f"class {cid} ({name}) has no reference vectors")

    @property
    def class_ids(self) -> list[int]:
        return [cid for cid, _, _ in self.classes]

    @property
    def class_names(self) -> dict[int, str]:
        return {cid: name for cid, name, _ in self.classes}

    @property
    def total_references(self) -> int:
        return sum(len(refs) for _, _, refs in self.classes)

    def references(self, class_id: int) -> tuple[ReferenceVector, ...]:
        for cid, _, refs in self.classes:
            if cid == class_id:
                return refs
        raise DataError(f"unknown class id {class_id}")

    def bounds(self, class_id: int) -> tuple[np.ndarray, np.ndarray]:
        """(n, 6) lower and upper interval bounds for one class, cached."""
        if class_id not in self._bounds:
            refs = self.references(class_id)
            lo = np.empty((len(refs), 6))
            hi = np.empty((len(refs), 6))
            for row, ref in enumerate(refs):
                lo[row], hi[row] = _bounds_matrix(ref.iv)
            self._bounds[class_id] = (lo, hi)
        return self._bounds[class_id]

    def to_json_dict(self) -> dict:
        return {
            "format_version": KNOWLEDGEBASE_FORMAT_VERSION,
            "config": self.config,
            "classes": [
                {
                    "id": cid,
                    "name": name,
                    "references": [
                        {"sample_id": r.sample_id, **r.iv.to_json_dict()}
                        for r in refs
                    ],
                }
                for cid, name, refs in self.classes
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Knowledgebase":
        version = data.get("format_version")
        if version != KNOWLEDGEBASE_FORMAT_VERSION:
            raise DataError(f"unsupported knowledgebase format version {version}")
        classes = []
        for entry in data["classes"]:
            refs = tuple(
                ReferenceVector(
                    class_id=int(entry["id"]),
                    sample_id=int(r["sample_id"]),
                    iv=IntervalVector.from_json_dict(r),
                )
                for r in entry["references"]
            )
            classes.append((int(entry["id"]), str(entry["name"]), refs))
        return cls(classes=tuple(classes), config=dict(data.get("config", {})))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Knowledgebase":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class ClassificationResult:
    """Prediction with raw per-class acceptance counts."""

    predicted_class: int
    scores: dict[int, int]
    max_possible: dict[int, int]
    tie: bool
    normalized: dict[int, float] | None = None

    def to_json_dict(self) -> dict:
        out = {
            "predicted_class": self.predicted_class,
            "scores": {str(k): v for k, v in self.scores.items()},
            "max_possible": {str(k): v for k, v in self.max_possible.items()},
            "tie": self.tie,
        }
        if self.normalized is not None:
            out["normalized"] = {str(k): v for k, v in self.normalized.items()}
        return out


def train(
    samples,
    class_names: dict[int, str] | None = None,
    config: dict | None = None,
) -> Knowledgebase:
    """Build a knowledgebase from (class_id, FeatureMatrix) pairs.

    One reference vector per training sample; sample ids are assigned in
    encounter order within each class.
    """
    samples = list(samples)
    if not samples:
        raise EmptyTrainingSet("no training samples")
    per_class: dict[int, list[ReferenceVector]] = {}
    for class_id, fm in samples:
        class_id = int(class_id)
        refs = per_class.setdefault(class_id, [])
        refs.append(
            ReferenceVector(
                class_id=class_id,
                sample_id=len(refs) + 1,
                iv=assimilate(fm),
            )
        )
    names = class_names or {}
    classes = tuple(
        (cid, str(names.get(cid, cid)), tuple(per_class[cid]))
        for cid in sorted(per_class)
    )
    return Knowledgebase(classes=classes, config=dict(config or {}))


def acceptance_count(test, class_refs) -> tuple[int, int, int]:
    """(ACL, ACA, AC) of a crisp test sample against one class's references.

    Counts indicator hits over test rows x columns x references; interval
    endpoints are inclusive on both sides.
    """
    refs = tuple(class_refs)
    if not refs:
        raise EmptyClass("acceptance count needs at least one reference vector")
    rows = crisp_rows(test)
    lo = np.empty((len(refs), 6))
    hi = np.empty((len(refs), 6))
    for row, ref in enumerate(refs):
        lo[row], hi[row] = _bounds_matrix(ref.iv)
    inside = (rows[:, None, :] >= lo[None]) & (rows[:, None, :] <= hi[None])
    acl = int(inside[:, :, :3].sum())
    aca = int(inside[:, :, 3:].sum())
    return acl, aca, acl + aca


def _class_counts(test, kb: Knowledgebase) -> dict[int, int]:
    rows = crisp_rows(test)
    scores = {}
    for cid in kb.class_ids:
        lo, hi = kb.bounds(cid)
        inside = (rows[:, None, :] >= lo[None]) & (rows[:, None, :] <= hi[None])
        scores[cid] = int(inside.sum())
    return scores


def classify(
    test,
    kb: Knowledgebase,
    normalize_by_refs: bool = False,
) -> ClassificationResult:
    """Vote for the class with the maximum acceptance count.

    Ties go to the smallest class id and set the tie flag. When
    normalize_by_refs is on, counts are divided by each class's reference
    count before the argmax (an extension for unbalanced classes; the raw
    counts are still reported).
    """
    if not kb.classes:
        raise EmptyTrainingSet("knowledgebase has no classes")
    rows = crisp_rows(test)
    m = rows.shape[0]
    scores = _class_counts(rows, kb)
    max_possible = {cid: 6 * m * len(kb.references(cid)) for cid in kb.class_ids}
    normalized = None
    if normalize_by_refs:
        normalized = {
            cid: scores[cid] / len(kb.references(cid)) for cid in kb.class_ids
        }
        ranking = normalized
    else:
        ranking = scores
    best = max(ranking.values())
    winners = [cid for cid in kb.class_ids if ranking[cid] == best]
    return ClassificationResult(
        predicted_class=min(winners),
        scores=scores,
        max_possible=max_possible,
        tie=len(winners) > 1,
        normalized=normalized,
    )


@dataclass(frozen=True)
class EvaluationReport:
    """Accuracy and confusion counts over a labelled test set."""

    accuracy: float
    total: int
    correct: int
    ties: int
    confusion: dict[int, dict[int, int]]

    def to_json_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "total": self.total,
            "correct": self.correct,
            "ties": self.ties,
            "confusion": {
                str(true): {str(pred): n for pred, n in sorted(row.items())}
                for true, row in sorted(self.confusion.items())
            },
        }


def evaluate(
    kb: Knowledgebase,
    test_set,
    normalize_by_refs: bool = False,
) -> EvaluationReport:
    """Classify every (class_id, FeatureMatrix) pair and tally results."""
    test_set = list(test_set)
    if not test_set:
        raise EmptyTestSet("no test samples")
    correct = 0
    ties = 0
    confusion: dict[int, dict[int, int]] = {}
    for true_id, fm in test_set:
        true_id = int(true_id)
        result = classify(fm, kb, normalize_by_refs=normalize_by_refs)
        row = confusion.setdefault(true_id, {})
        row[result.predicted_class] = row.get(result.predicted_class, 0) + 1
        if result.predicted_class == true_id:
            correct += 1
        if result.tie:
            ties += 1
    return EvaluationReport(
        accuracy=correct / len(test_set),
        total=len(test_set),
        correct=correct,
        ties=ties,
        confusion=confusion,
    )


class IntervalVotingClassifier(ClassifierMixin, BaseEstimator):
    """Scikit-learn style front end for the voting classifier.

    X is a sequence of per-sample feature matrices: either FeatureMatrix
    instances or (m, 6) arrays with columns a, b, c, A, B, C. Labels may be
    any hashable values; ties resolve to the smallest label in sorted order.

    Parameters
    ----------
    normalize_by_refs : bool, default False
        Divide each class's acceptance count by its reference count before
        taking the argmax. Off by default: raw counts match the voting rule.
    """

    def __init__(self, normalize_by_refs: bool = False):
        self.normalize_by_refs = normalize_by_refs

    def fit(self, X, y):
        X = list(X)
        y = list(y)
        if len(X) != len(y):
            raise DataError(f"length mismatch: {len(X)} samples, {len(y)} labels")
        if not X:
            raise EmptyTrainingSet("no training samples")
        labels = sorted(set(y))
        self.classes_ = np.asarray(labels)
        label_to_id = {label: idx + 1 for idx, label in enumerate(labels)}
        samples = [(label_to_id[label], _as_feature_matrix(fm)) for label, fm in zip(y, X)]
        names = {cid: str(label) for label, cid in label_to_id.items()}
        self.knowledgebase_ = train(samples, class_names=names)
        return self

    def acceptance_counts(self, X) -> np.ndarray:
        """Raw AC scores, shape (n_samples, n_classes) in classes_ order."""
        check_is_fitted(self, "knowledgebase_")
        X = list(X)
        out = np.zeros((len(X), len(self.classes_)), dtype=int)
        for row, fm in enumerate(X):
            scores = _class_counts(_as_feature_matrix(fm), self.knowledgebase_)
            out[row] = [scores[cid] for cid in self.knowledgebase_.class_ids]
        return out

    def predict(self, X):
        check_is_fitted(self, "knowledgebase_")
        X = list(X)
        predictions = []
        for fm in X:
            result = classify(
                _as_feature_matrix(fm),
                self.knowledgebase_,
                normalize_by_refs=self.normalize_by_refs,
            )
            predictions.append(self.classes_[result.predicted_class - 1])
        return np.asarray(predictions)


def _as_feature_matrix(fm) -> FeatureMatrix:
    if isinstance(fm, FeatureMatrix):
        return fm
    from .features import TriangleFeatures

    rows = crisp_rows(fm)
    return FeatureMatrix(
        rows=tuple(
            TriangleFeatures(lengths=tuple(r[:3]), angles=tuple(r[3:])) for r in rows
        )
    )
