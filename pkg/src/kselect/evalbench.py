"""Evaluation metrics, the planted-partition generator and manifest-driven benchmarks.

Manifest (MAN-1) is a CSV with header ``id,gt_k,labels,affinities``; ``labels``
may be empty and ``affinities`` is a ``;``-separated path list.  Paths are
relative to the manifest's directory.
"""

from __future__ import annotations

import csv
import io as _stringio
import logging
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import FileFormatError, InvalidInputError, NumericalError
from .io import atomic_write_text, load_affinity, read_labels
from .matrix import AffinityMatrix, fuse, laplacian, sym_eigensolve
from .selection import KRange, check_strategy, confidence_table, random_k, select_k
from .spectral import ClusterAssignment, spectral_cluster

log = logging.getLogger(__name__)

MANIFEST_HEADER = ["id", "gt_k", "labels", "affinities"]
REPORT_HEADER = ["id", "gt_k", "pred_k", "sq_error", "exact", "error_rate", "baseline_error_rate", "status"]


def _pair(pred, gt):
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.ndim != 1 or pred.shape != gt.shape:
        raise InvalidInputError(f"prediction and ground truth lengths differ: {pred.shape} vs {gt.shape}")
    if pred.size == 0:
        raise InvalidInputError("metrics need at least one prediction")
    return pred, gt


def mse_metric(pred: Sequence[int], gt: Sequence[int]) -> float:
    """Mean squared error of predicted cluster counts."""
    pred, gt = _pair(pred, gt)
    return float(np.mean((pred.astype(float) - gt) ** 2))


def exact_accuracy(pred: Sequence[int], gt: Sequence[int]) -> float:
    """Percentage of exactly predicted cluster counts."""
    pred, gt = _pair(pred, gt)
    return 100.0 * float(np.count_nonzero(pred == gt)) / pred.size


def confusion_matrix(pred, gt) -> np.ndarray:
    """Counts of samples per (predicted cluster, true cluster) pair."""
    p = np.unique(np.asarray(getattr(pred, "labels", pred)), return_inverse=True)[1].reshape(-1)
    g = np.unique(np.asarray(getattr(gt, "labels", gt)), return_inverse=True)[1].reshape(-1)
    out = np.zeros((p.max() + 1, g.max() + 1), dtype=np.int64)
    np.add.at(out, (p, g), 1)
    return out


def error_rate(pred, gt) -> float:
    """Percentage of samples outside the best one-to-one cluster matching.

    The confusion matrix is zero-padded to square, so surplus clusters on
    either side count all their samples as errors.
    """
    p = np.asarray(getattr(pred, "labels", pred))
    g = np.asarray(getattr(gt, "labels", gt))
    if p.shape != g.shape or p.ndim != 1:
        raise InvalidInputError(f"label counts differ: {p.size} predicted vs {g.size} ground truth")
    if p.size == 0:
        raise InvalidInputError("error rate needs at least one sample")
    conf = confusion_matrix(p, g)
    size = max(conf.shape)
    square = np.zeros((size, size), dtype=np.int64)
    square[: conf.shape[0], : conf.shape[1]] = conf
    rows, cols = linear_sum_assignment(square, maximize=True)
    matched = int(square[rows, cols].sum())
    return 100.0 * (p.size - matched) / p.size


@dataclass(frozen=True)
class SynthSpec:
    k: int
    per_cluster: int
    within_low: float = 0.8
    within_high: float = 1.0
    cross_low: float = 0.0
    cross_high: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise InvalidInputError(f"k must be >= 2, got {self.k}")
        if self.per_cluster < 2:
            raise InvalidInputError(f"per_cluster must be >= 2, got {self.per_cluster}")
        if not (0 <= self.cross_low <= self.cross_high <= 1 and 0 <= self.within_low <= self.within_high <= 1):
            raise InvalidInputError("affinity bounds must satisfy 0 <= low <= high <= 1")
        if self.cross_low > self.within_low or self.cross_high > self.within_high:
            raise InvalidInputError("cross-block bounds must not exceed within-block bounds")


def generate_block_affinity(spec: SynthSpec) -> tuple[AffinityMatrix, ClusterAssignment]:
    """Planted-partition affinity matrix with contiguous blocks."""
    n = spec.k * spec.per_cluster
    labels = np.repeat(np.arange(spec.k), spec.per_cluster)
    rng = np.random.default_rng(spec.seed)
    within = rng.uniform(spec.within_low, spec.within_high, size=(n, n))
    cross = rng.uniform(spec.cross_low, spec.cross_high, size=(n, n))
    m = np.where(labels[:, None] == labels[None, :], within, cross)
    m = np.triu(m, 1)
    m = m + m.T
    np.fill_diagonal(m, 1.0)
    return AffinityMatrix(m), ClusterAssignment(labels, spec.k)


@dataclass(frozen=True)
class SequenceRecord:
    id: str
    affinity_paths: tuple
    gt_k: int
    gt_labels_path: Path | None = None

    def __post_init__(self):
        if self.gt_k < 1:
            raise InvalidInputError(f"sequence {self.id}: gt_k must be >= 1, got {self.gt_k}")
        if not self.affinity_paths:
            raise InvalidInputError(f"sequence {self.id}: no affinity files")
        object.__setattr__(self, "affinity_paths", tuple(Path(p) for p in self.affinity_paths))
        if self.gt_labels_path is not None:
            object.__setattr__(self, "gt_labels_path", Path(self.gt_labels_path))


def read_manifest(path) -> list[SequenceRecord]:
    path = Path(path)
    base = path.parent
    try:
        text = path.read_text()
    except OSError as exc:
        raise FileFormatError(path, None, f"cannot read manifest: {exc.strerror or exc}") from exc
    rows = list(csv.reader(_stringio.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != MANIFEST_HEADER:
        raise FileFormatError(path, 1, f"expected header {','.join(MANIFEST_HEADER)}")
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise FileFormatError(path, lineno, f"expected 4 fields, found {len(row)}")
        seq_id, gt_k, labels, affinities = (c.strip() for c in row)
        if not seq_id:
            raise FileFormatError(path, lineno, "empty sequence id")
        try:
            gt_k = int(gt_k)
        except ValueError:
            raise FileFormatError(path, lineno, f"gt_k must be an integer, got {gt_k!r}") from None
        views = [base / p.strip() for p in affinities.split(";") if p.strip()]
        if not views:
            raise FileFormatError(path, lineno, f"sequence {seq_id} lists no affinity files")
        try:
            records.append(SequenceRecord(seq_id, tuple(views), gt_k, base / labels if labels else None))
        except InvalidInputError as exc:
            raise FileFormatError(path, lineno, str(exc)) from None
    return records


def write_manifest(path, records: Sequence[SequenceRecord]) -> None:
    base = Path(path).parent
    buf = _stringio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MANIFEST_HEADER)

    def rel(p):
        p = Path(p)
        try:
            return p.relative_to(base).as_posix()
        except ValueError:
            return p.as_posix()

    for r in records:
        labels = rel(r.gt_labels_path) if r.gt_labels_path is not None else ""
        w.writerow([r.id, r.gt_k, labels, ";".join(rel(p) for p in r.affinity_paths)])
    atomic_write_text(path, buf.getvalue())


@dataclass
class SequenceResult:
    id: str
    gt_k: int
    pred_k: int | None = None
    error_rate: float | None = None
    baseline_error_rate: float | None = None
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def sq_error(self) -> float | None:
        return None if self.pred_k is None else float((self.pred_k - self.gt_k) ** 2)

    @property
    def exact(self) -> bool | None:
        return None if self.pred_k is None else self.pred_k == self.gt_k


def _mean(values) -> float | None:
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def summarize(rows: Sequence[SequenceResult]) -> dict:
    """Unweighted per-sequence means over the rows that completed."""
    ok = [r for r in rows if r.ok]
    preds = [r.pred_k for r in ok]
    gts = [r.gt_k for r in ok]
    return {
        "sequences": len(rows),
        "failed": len(rows) - len(ok),
        "mse": mse_metric(preds, gts) if ok else None,
        "accuracy": exact_accuracy(preds, gts) if ok else None,
        "error_rate": _mean(r.error_rate for r in ok),
        "baseline_error_rate": _mean(r.baseline_error_rate for r in ok),
    }


@dataclass
class EvaluationReport:
    strategy: str
    rows: list = field(default_factory=list)

    @property
    def aggregate(self) -> dict:
        return summarize(self.rows)

    def breakdown(self) -> dict:
        """Aggregates grouped by ground-truth cluster count."""
        return {k: summarize([r for r in self.rows if r.gt_k == k]) for k in sorted({r.gt_k for r in self.rows})}

    @property
    def mse(self):
        return self.aggregate["mse"]

    @property
    def accuracy(self):
        return self.aggregate["accuracy"]

    @property
    def mean_error_rate(self):
        return self.aggregate["error_rate"]


def sequence_seed(seed: int, seq_id: str) -> int:
    return seed + zlib.crc32(seq_id.encode("utf-8"))


def _load_views(record: SequenceRecord) -> list[AffinityMatrix]:
    views = []
    for p in record.affinity_paths:
        try:
            views.append(load_affinity(p))
        except FileFormatError as exc:
            raise FileFormatError(exc.path, exc.line, f"sequence {record.id}: {exc.message}") from None
    n = views[0].n
    for p, v in zip(record.affinity_paths, views):
        if v.n != n:
            raise FileFormatError(p, None, f"sequence {record.id}: n={v.n} differs from n={n} of the first view")
    return views


def _load_gt(record: SequenceRecord, n: int):
    if record.gt_labels_path is None:
        return None
    try:
        labels = read_labels(record.gt_labels_path)
    except FileFormatError as exc:
        raise FileFormatError(exc.path, exc.line, f"sequence {record.id}: {exc.message}") from None
    if labels.size != n:
        raise FileFormatError(record.gt_labels_path, None, f"sequence {record.id}: {labels.size} labels for n={n}")
    return labels


def _cluster_at(fused: AffinityMatrix, k: int, seed: int, spectrum) -> np.ndarray:
    if k == 1:
        return np.zeros(fused.n, dtype=np.int64)
    return spectral_cluster(fused, k, seed + k, spectrum).labels


def evaluate_sequence(record: SequenceRecord, k_range: KRange, strategy: str, seed: int) -> SequenceResult:
    views = _load_views(record)
    gt_labels = _load_gt(record, views[0].n)
    result = SequenceResult(record.id, record.gt_k)
    sub = sequence_seed(seed, record.id)
    try:
        fused = fuse(views, "degree" if len(views) > 1 else "none")
        k_range.check(fused.n)
        if strategy == "random":
            result.pred_k = random_k(k_range, sub)
        else:
            result.pred_k = select_k(confidence_table(fused, k_range, sub), strategy, sub)
        if gt_labels is not None:
            if record.gt_k >= fused.n:
                raise InvalidInputError(f"gt_k={record.gt_k} must be < n={fused.n}")
            spectrum = sym_eigensolve(laplacian(fused))
            result.error_rate = error_rate(_cluster_at(fused, result.pred_k, sub, spectrum), gt_labels)
            result.baseline_error_rate = error_rate(_cluster_at(fused, record.gt_k, sub, spectrum), gt_labels)
    except (NumericalError, InvalidInputError) as exc:
        log.warning("sequence %s failed: %s", record.id, exc)
        return SequenceResult(record.id, record.gt_k, status=f"failed: {exc}")
    return result


def evaluate_manifest(
    records: Sequence[SequenceRecord], k_range: KRange = KRange(), strategy: str = "average", seed: int = 42
) -> EvaluationReport:
    """Select k for every sequence and score it against the ground truth.

    Each sequence uses seed ``seed + crc32(id)``.  When a labels file is given,
    the fused matrix is clustered both at the selected k and at the true k
    (the baseline row).  Sequences that fail numerically are kept in the
    report with a ``failed`` status and left out of the aggregates.
    """
    records = list(records)
    if not records:
        raise InvalidInputError("manifest has no sequences")
    strategy = check_strategy(strategy)
    report = EvaluationReport(strategy)
    for rec in records:
        report.rows.append(evaluate_sequence(rec, k_range, strategy, seed))
    return report


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.6f}"


def _summary_fields(summary: dict) -> list[str]:
    return [f"{key}={_fmt(value)}" for key, value in summary.items()]


def format_report(report: EvaluationReport, breakdown: bool = True) -> str:
    buf = _stringio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for r in report.rows:
        w.writerow([r.id, r.gt_k, _fmt(r.pred_k), _fmt(r.sq_error), _fmt(r.exact),
                    _fmt(r.error_rate), _fmt(r.baseline_error_rate), r.status])
    w.writerow(["# aggregate", f"strategy={report.strategy}"] + _summary_fields(report.aggregate))
    if breakdown:
        for k, summary in report.breakdown().items():
            w.writerow([f"# breakdown k={k}"] + _summary_fields(summary))
    return buf.getvalue()


def write_report(path, report: EvaluationReport, breakdown: bool = True) -> None:
    atomic_write_text(path, format_report(report, breakdown))


def parse_report(text: str) -> tuple[list[dict], dict, dict]:
    """Read a report back into (rows, aggregate, breakdown-by-k)."""
    rows, aggregate, breakdown = [], {}, {}
    reader = csv.reader(_stringio.StringIO(text))
    header = next(reader)
    for row in reader:
        if row and row[0].startswith("# "):
            fields = dict(f.split("=", 1) for f in row[1:])
            if row[0] == "# aggregate":
                aggregate = fields
            else:
                breakdown[int(row[0].split("k=", 1)[1])] = fields
        elif row:
            rows.append(dict(zip(header, row)))
    return rows, aggregate, breakdown
