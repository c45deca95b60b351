"""Score generated answers against reference answers and summarize.

Each (reference, generated) pair is embedded and scored with cosine
similarity; a run aggregates the per-pair scores into max / min / mean /
median / standard deviation. Replay mode scores pre-generated answers
from the dataset, which keeps runs deterministic and offline.
"""

from __future__ import annotations

import json
import logging
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .curation import Question
from .errors import DatasetFormatError, DimensionMismatchError, EmptyInputError
from .providers import LlmProvider

logger = logging.getLogger(__name__)


@dataclass
class EvalRecord:
    """One dataset entry: a question, its reference answer, optionally ours."""

    question: Question
    top_answer: str
    generated_answer: str | None = None
    score: float | None = None

    def __post_init__(self):
        if not self.top_answer.strip():
            raise ValueError("top_answer must be non-empty")
        if self.score is not None:
            if not math.isfinite(self.score) or not -1.0 <= self.score <= 1.0:
                raise ValueError(f"score out of range: {self.score}")


@dataclass(frozen=True)
class SimilarityStats:
    maximum: float
    minimum: float
    average: float
    median: float
    std_dev: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not (self.minimum <= self.median <= self.maximum
                and self.minimum <= self.average <= self.maximum
                and self.std_dev >= 0):
            raise ValueError("inconsistent summary statistics")

    def to_dict(self) -> dict:
        return {
            "maximum": self.maximum,
            "minimum": self.minimum,
            "average": self.average,
            "median": self.median,
            "std_dev": self.std_dev,
            "n": self.n,
        }


def _norm(values: Sequence[float]) -> float:
    return math.sqrt(math.fsum(v * v for v in values))


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity, clamped to [-1, 1]; 0.0 when either norm is zero."""
    if len(u) != len(v):
        raise DimensionMismatchError(f"vector lengths differ: {len(u)} vs {len(v)}")
    norm_u, norm_v = _norm(u), _norm(v)
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    value = math.fsum(x * y for x, y in zip(u, v)) / (norm_u * norm_v)
    return max(-1.0, min(1.0, value))


def sts_score(a: str, b: str, embedder: LlmProvider, model_id: str = "") -> float:
    """Semantic similarity of two texts under the given embedding backend."""
    if not a or not b:
        raise ValueError("both texts must be non-empty")
    u = embedder.embed(a, model_id)
    v = embedder.embed(b, model_id)
    return cosine(u.values, v.values)


def aggregate(scores: Sequence[float], *, sample_std: bool = False) -> SimilarityStats:
    """Five summary statistics over a non-empty list of finite scores.

    Standard deviation uses the population divisor n by default;
    `sample_std=True` switches to n-1 (0.0 for a single score).
    """
    if not scores:
        raise EmptyInputError("cannot aggregate an empty score list")
    if not all(math.isfinite(s) for s in scores):
        raise ValueError("scores must all be finite")
    if sample_std:
        std = statistics.stdev(scores) if len(scores) > 1 else 0.0
    else:
        std = statistics.pstdev(scores)
    return SimilarityStats(
        maximum=max(scores),
        minimum=min(scores),
        # exact rational mean: its rounding cannot drift outside [min, max]
        average=statistics.mean(scores),
        median=statistics.median(scores),
        std_dev=std,
        n=len(scores),
    )


def load_dataset(path: str | Path) -> list[EvalRecord]:
    """Read a JSON-lines dataset of {question, top_answer[, generated_answer]}."""
    records: list[EvalRecord] = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except ValueError as exc:
                raise DatasetFormatError(f"invalid JSON: {exc}", line_number) from exc
            if not isinstance(raw, dict):
                raise DatasetFormatError("entry must be a JSON object", line_number)
            try:
                records.append(EvalRecord(
                    question=Question(text=raw["question"],
                                      source_id=raw.get("source_id")),
                    top_answer=raw["top_answer"],
                    generated_answer=raw.get("generated_answer"),
                ))
            except (KeyError, TypeError, ValueError, AttributeError) as exc:
                raise DatasetFormatError(str(exc), line_number) from exc
    return records


@dataclass
class EvalReport:
    stats: SimilarityStats
    rows: list[dict]
    summary: dict
    records_path: Path | None = None
    summary_path: Path | None = None

    def table(self) -> str:
        return format_stats_table(self.summary["backends"])


def format_stats_table(backends: dict) -> str:
    """Plain-text summary table, one row per embedding backend."""
    header = f"{'Backend':<28}{'Maximum':>9}{'Minimum':>9}{'Average':>9}{'Median':>9}{'Std Dev':>9}"
    lines = [header]
    for name, stats in backends.items():
        lines.append(
            f"{name:<28}"
            f"{stats['maximum']:>9.4f}{stats['minimum']:>9.4f}"
            f"{stats['average']:>9.4f}{stats['median']:>9.4f}{stats['std_dev']:>9.4f}"
        )
    return "\n".join(lines)


def run_eval(dataset_path: str | Path, *,
             embedder: LlmProvider, model_id: str = "",
             pipeline: Callable[[Question], str] | None = None,
             replay: bool = False,
             out_dir: str | Path | None = None,
             sample_std: bool = False) -> EvalReport:
    """Score every dataset record and aggregate the summary statistics.

    Live mode calls `pipeline(question)` for each record; replay mode reads
    the stored generated answers instead. Records that fail (pipeline
    error, missing replay answer, empty text) are excluded from the
    aggregate and listed in the per-record report with a reason.
    """
    if not replay and pipeline is None:
        raise ValueError("a pipeline callable is required unless replay=True")
    records = load_dataset(dataset_path)
    rows: list[dict] = []
    scores: list[float] = []
    backend_name = model_id or getattr(embedder, "embedding_model", "") or "default"

    for index, record in enumerate(records, start=1):
        row: dict = {"id": index, "question": record.question.text}
        if replay:
            generated = record.generated_answer
            if not generated:
                row.update(excluded=True, reason="missing generated_answer")
                rows.append(row)
                continue
        else:
            try:
                generated = pipeline(record.question)
            except Exception as exc:  # partial-failure policy: exclude, keep going
                logger.warning("pipeline failed on record %d: %s", index, exc)
                row.update(excluded=True, reason=f"pipeline error: {exc}")
                rows.append(row)
                continue
            if not generated:
                row.update(excluded=True, reason="pipeline returned empty answer")
                rows.append(row)
                continue
        record.generated_answer = generated

        flags: list[str] = []
        u = embedder.embed(generated, model_id)
        v = embedder.embed(record.top_answer, model_id)
        if _norm(u.values) == 0.0 or _norm(v.values) == 0.0:
            flags.append("zero_norm_embedding")
        score = cosine(u.values, v.values)
        record.score = score
        scores.append(score)
        row.update(score=score, flags=flags)
        rows.append(row)

    if not scores:
        raise EmptyInputError("no record produced a score")
    stats = aggregate(scores, sample_std=sample_std)
    summary = {
        "dataset": str(dataset_path),
        "mode": "replay" if replay else "live",
        "records": len(records),
        "excluded": len(records) - len(scores),
        "backends": {backend_name: stats.to_dict()},
    }

    records_path = summary_path = None
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        records_path = out / "records.jsonl"
        with open(records_path, "w", encoding="utf-8") as handle:
            for row in rows:
                handle.write(json.dumps(row, sort_keys=True) + "\n")
        summary_path = out / "summary.json"
        summary_path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n",
                                encoding="utf-8")
    return EvalReport(stats=stats, rows=rows, summary=summary,
                      records_path=records_path, summary_path=summary_path)
