"""Rule-based reward components and per-record scoring.

Four reward signals are implemented, each mapping into [0, 1]:

* format: three-tier check of the tag structure and causal keywords,
* task (grounding): hybrid linear temporal-IoU against ground-truth
  segments,
* task (multichoice): binary accuracy of the parsed choice letter,
* length: piecewise-linear decay beyond a soft token budget.

``score_record`` assembles the per-record reward vector in the fixed
objective order (format, task, length).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .parsing import (
    CAUSAL_KEYWORDS,
    KeywordReport,
    ParsedResponse,
    TimeSegment,
    check_causal_keywords,
    extract_choice,
    extract_segments,
    parse_response,
)

OBJECTIVE_ORDER = ("format", "task", "length")
CHOICE_LETTERS = ("A", "B", "C", "D")
TASK_KINDS = ("grounding", "multichoice")


class InvalidRecordError(ValueError):
    """A record violates its schema (e.g. missing ground truth)."""

    def __init__(self, message: str, record_id: Optional[str] = None):
        super().__init__(message)
        self.record_id = record_id


@dataclass(frozen=True)
class RewardConfig:
    """Length budget and keyword requirements for scoring.

    ``l_target = l_max - l_buffer`` is where the length decay begins.
    """

    l_max: int = 8192
    l_buffer: int = 1024
    required_keywords: frozenset[str] = CAUSAL_KEYWORDS

    def __post_init__(self) -> None:
        if not 0 < self.l_buffer < self.l_max:
            raise ValueError(
                f"need 0 < l_buffer < l_max, got l_buffer={self.l_buffer}, l_max={self.l_max}"
            )

    @property
    def l_target(self) -> int:
        return self.l_max - self.l_buffer


@dataclass(frozen=True)
class RewardVector:
    """Per-record reward components, ordered (format, task, length).

    ``task_kind`` records which task reward produced the task component
    ("iou" for grounding, "accuracy" for multichoice).
    """

    format: float
    task: float
    length: float
    task_kind: str

    def __post_init__(self) -> None:
        for name, value in self.components.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"reward component {name}={value} outside [0, 1]")
        if self.task_kind not in ("iou", "accuracy"):
            raise ValueError(f"unknown task kind {self.task_kind!r}")

    @property
    def components(self) -> dict[str, float]:
        return {"format": self.format, "task": self.task, "length": self.length}


@dataclass(frozen=True)
class TaskRecord:
    """One response to score, with its task kind and ground truth."""

    record_id: str
    group_id: int
    task: str
    response_text: str
    gt_segments: Optional[tuple[TimeSegment, ...]] = None
    gt_answer: Optional[str] = None


@dataclass(frozen=True)
class ScoredRecord:
    record_id: str
    group_id: int
    reward: RewardVector
    diagnostics: dict[str, str] = field(default_factory=dict)


def format_reward(parsed: ParsedResponse, keywords: KeywordReport) -> float:
    """Three-tier structural reward.

    1.0 requires the full pattern, unique tags, and all keywords present;
    0.5 is the baseline for a matching pattern with duplicate tags or
    missing keywords; 0.0 on pattern mismatch.
    """
    if not parsed.basic_pattern_ok:
        return 0.0
    if parsed.tags_unique and keywords.complete:
        return 1.0
    return 0.5


def segment_iou(a: TimeSegment, b: TimeSegment) -> float:
    """Temporal intersection over union of two intervals.

    Union is the total covered length of the pair. Two identical
    zero-length segments return 1.0 by convention; disjoint degenerate
    pairs return 0.0.
    """
    inter = max(0.0, min(a.end, b.end) - max(a.start, b.start))
    union = a.length + b.length - inter
    if union <= 0.0:
        return 1.0 if a.start == b.start else 0.0
    return inter / union


def _hull(segments: Sequence[TimeSegment]) -> TimeSegment:
    return TimeSegment(min(s.start for s in segments), max(s.end for s in segments))


def _coverage_ratio(pred: TimeSegment, gt: Sequence[TimeSegment]) -> float:
    """Fraction of total ground-truth duration intersected by ``pred``."""
    total = sum(s.length for s in gt)
    if total <= 0.0:
        return 0.0
    covered = sum(
        max(0.0, min(pred.end, s.end) - max(pred.start, s.start)) for s in gt
    )
    return covered / total


def linear_iou_reward(
    pred: Sequence[TimeSegment], gt: Sequence[TimeSegment]
) -> float:
    """Hybrid linear IoU of predicted segments against ground truth.

    An empty prediction scores 0. A single predicted segment facing
    multiple ground-truth segments scores max(coverage ratio, IoU with
    the ground-truth hull), rewarding a prediction that spans several
    disjoint events. Otherwise each ground-truth segment is matched to
    its best-IoU prediction and the matches are averaged.
    """
    if not gt:
        raise InvalidRecordError("ground-truth segment list is empty")
    if not pred:
        return 0.0
    if len(pred) == 1 and len(gt) > 1:
        return max(
            _coverage_ratio(pred[0], gt),
            segment_iou(pred[0], _hull(gt)),
        )
    return sum(max(segment_iou(p, g) for p in pred) for g in gt) / len(gt)


def accuracy_reward(pred: Optional[str], gt: str) -> float:
    """Binary indicator: 1.0 iff the parsed letter equals the answer."""
    if gt not in CHOICE_LETTERS:
        raise InvalidRecordError(f"ground-truth answer must be one of A-D, got {gt!r}")
    return 1.0 if pred == gt else 0.0


def length_reward(l: int, cfg: RewardConfig) -> float:
    """Piecewise-linear decay: 1 up to the target length, linear to 0
    across the buffer, 0 beyond the hard maximum."""
    if l <= cfg.l_target:
        return 1.0
    if l <= cfg.l_max:
        return 1.0 - (l - cfg.l_target) / cfg.l_buffer
    return 0.0


def _length_diag(l: int, cfg: RewardConfig) -> str:
    if l <= cfg.l_target:
        return f"{l} tokens within target {cfg.l_target}"
    if l <= cfg.l_max:
        return f"{l} tokens in decay zone ({cfg.l_target}, {cfg.l_max}]"
    return f"{l} tokens beyond hard maximum {cfg.l_max}"


def score_record(record: TaskRecord, cfg: RewardConfig = RewardConfig()) -> ScoredRecord:
    """Score one record, returning the reward vector plus per-component
    diagnostics naming the branch taken.

    Raises InvalidRecordError (carrying the record id) when the record
    lacks the ground truth its task kind requires.
    """
    if record.group_id < 0:
        raise InvalidRecordError(
            f"group_id must be nonnegative, got {record.group_id}", record.record_id
        )
    if record.task not in TASK_KINDS:
        raise InvalidRecordError(
            f"unknown task kind {record.task!r}", record.record_id
        )

    parsed = parse_response(record.response_text)
    keywords = check_causal_keywords(parsed.thinking_block or "")
    fmt = format_reward(parsed, keywords)
    if fmt == 0.0:
        fmt_diag = "pattern mismatch"
    elif fmt == 1.0:
        fmt_diag = "pattern, unique tags, and all keywords satisfied"
    else:
        defects = []
        if not parsed.tags_unique:
            defects.append("duplicate tags")
        if keywords.missing:
            defects.append("missing keywords: " + ", ".join(sorted(keywords.missing)))
        fmt_diag = "; ".join(defects)

    answer_text = parsed.answering_block or ""
    if record.task == "grounding":
        if not record.gt_segments:
            raise InvalidRecordError(
                "grounding record without ground-truth segments", record.record_id
            )
        pred = extract_segments(answer_text)
        task = linear_iou_reward(pred, record.gt_segments)
        task_kind = "iou"
        if not pred:
            task_diag = "no segments parsed"
        elif len(pred) == 1 and len(record.gt_segments) > 1:
            cov = _coverage_ratio(pred[0], record.gt_segments)
            span = segment_iou(pred[0], _hull(record.gt_segments))
            task_diag = f"hybrid max(coverage={cov:.6g}, span_iou={span:.6g})"
        else:
            task_diag = (
                f"best-match mean over {len(record.gt_segments)} ground-truth segments"
            )
    else:
        if record.gt_answer is None:
            raise InvalidRecordError(
                "multichoice record without ground-truth answer", record.record_id
            )
        pred_letter = extract_choice(answer_text)
        task = accuracy_reward(pred_letter, record.gt_answer)
        task_kind = "accuracy"
        task_diag = f"parsed {pred_letter or 'nothing'} vs ground truth {record.gt_answer}"

    length = length_reward(parsed.token_length, cfg)
    reward = RewardVector(format=fmt, task=task, length=length, task_kind=task_kind)
    return ScoredRecord(
        record_id=record.record_id,
        group_id=record.group_id,
        reward=reward,
        diagnostics={
            "format": fmt_diag,
            "task": task_diag,
            "length": _length_diag(parsed.token_length, cfg),
        },
    )
