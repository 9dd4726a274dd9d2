"""Hand-built response corpus with hand-derived expected rewards.

Every case pins the full (format, task, length) triple. Texts are
assembled so the whitespace token count is exact by construction: blocks
are separated by single spaces, tags glue to the first and last word of
their block, so the token count is simply the sum of the per-block word
counts. Length expectations below use l_max=40, l_buffer=16, hence
l_target=24.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from pfab.parsing import TimeSegment
from pfab.rewards import RewardConfig, TaskRecord

CFG = RewardConfig(l_max=40, l_buffer=16)

# 10 tokens, contains all six keywords
KW = "Global Search Causal Verification Final Alignment Antecedent Visual Verification Consequence"
# 9 tokens, "Consequence" dropped
KW_MISSING = "Global Search Causal Verification Final Alignment Antecedent Visual Verification"


def text(factual: str, thinking: str, answering: str) -> str:
    return (
        f"<factual>{factual}</factual> "
        f"<thinking>{thinking}</thinking> "
        f"<answering>{answering}</answering>"
    )


def pads(n: int) -> str:
    return " ".join(["pad"] * n)


@dataclass(frozen=True)
class Case:
    case_id: str
    task: str
    response: str
    expected: tuple[float, float, float]  # (format, task, length)
    gt_segments: Optional[tuple[TimeSegment, ...]] = None
    gt_answer: Optional[str] = None
    note: str = ""

    def record(self) -> TaskRecord:
        return TaskRecord(
            record_id=self.case_id,
            group_id=0,
            task=self.task,
            response_text=self.response,
            gt_segments=self.gt_segments,
            gt_answer=self.gt_answer,
        )


GT_0_10 = (TimeSegment(0, 10),)

CASES = [
    # ---- format tiers -------------------------------------------------
    Case(
        "full_compliance", "grounding",
        text("fact", KW, "[0.0, 10.0]"),  # 1+10+2 = 13 tokens
        (1.0, 1.0, 1.0), gt_segments=GT_0_10,
        note="all branches top: pattern+tags+keywords, exact segment, under target",
    ),
    Case(
        "missing_keyword", "grounding",
        text("fact", KW_MISSING, "[0.0, 10.0]"),  # 12 tokens
        (0.5, 1.0, 1.0), gt_segments=GT_0_10,
        note="keyword set incomplete drops format to the 0.5 tier",
    ),
    Case(
        "duplicate_tag", "grounding",
        text("fact", KW, "[0.0, 10.0]") + " <answering>",  # 14 tokens
        (0.5, 1.0, 1.0), gt_segments=GT_0_10,
        note="second opening tag breaks uniqueness, pattern still matches",
    ),
    Case(
        "both_defects", "grounding",
        text("fact", KW_MISSING, "[0.0, 10.0]") + " <answering>",  # 13 tokens
        (0.5, 1.0, 1.0), gt_segments=GT_0_10,
        note="duplicate tag and missing keyword together still score 0.5",
    ),
    Case(
        "no_factual_block", "multichoice",
        f"<thinking>{KW}</thinking> <answering>The answer is (B).</answering>",  # 14
        (0.0, 0.0, 1.0), gt_answer="B",
        note="pattern mismatch forces format 0 and hides the answer block",
    ),
    Case(
        "out_of_order", "grounding",
        f"<thinking>{KW}</thinking> <factual>fact</factual> <answering>[0.0, 10.0]</answering>",
        (0.0, 0.0, 1.0), gt_segments=GT_0_10,  # 13 tokens
        note="blocks must appear factual -> thinking -> answering",
    ),
    Case(
        "missing_closing_thinking", "grounding",
        f"<factual>fact</factual> <thinking>{KW} <answering>[0.0, 10.0]</answering>",
        (0.0, 0.0, 1.0), gt_segments=GT_0_10,  # 13 tokens
        note="dropped </thinking> is a pattern mismatch",
    ),
    # ---- temporal IoU -------------------------------------------------
    Case(
        "iou_exact", "grounding",
        text("fact", KW, "[0.0, 10.0]"),
        (1.0, 1.0, 1.0), gt_segments=GT_0_10,
        note="identical nondegenerate segments give IoU 1",
    ),
    Case(
        "iou_partial", "grounding",
        text("fact", KW, "[0.0, 10.0]"),
        (1.0, 5.0 / 15.0, 1.0), gt_segments=(TimeSegment(5, 15),),
        note="overlap 5 over union 15",
    ),
    Case(
        "iou_disjoint", "grounding",
        text("fact", KW, "[0.0, 5.0]"),
        (1.0, 0.0, 1.0), gt_segments=(TimeSegment(10, 12),),
        note="no overlap scores 0",
    ),
    Case(
        "no_segments", "grounding",
        text("fact", KW, "somewhere near the middle"),  # 15 tokens
        (1.0, 0.0, 1.0), gt_segments=GT_0_10,
        note="unparseable answer scores 0, never errors",
    ),
    Case(
        "hybrid_balanced", "grounding",
        text("fact", KW, "[0.0, 10.0]"),
        (1.0, 0.5, 1.0), gt_segments=(TimeSegment(0, 5), TimeSegment(15, 20)),
        note="coverage (5+0)/10 and hull IoU 10/20 both equal 0.5",
    ),
    Case(
        "hybrid_coverage_wins", "grounding",
        text("fact", KW, "[14.0, 20.0]"),
        (1.0, 5.0 / 6.0, 1.0), gt_segments=(TimeSegment(0, 1), TimeSegment(15, 20)),
        note="coverage (0+5)/6 beats hull IoU 6/20",
    ),
    Case(
        "hybrid_span_wins", "grounding",
        text("fact", KW, "[1.0, 19.0]"),
        (1.0, 0.9, 1.0), gt_segments=(TimeSegment(0, 2), TimeSegment(18, 20)),
        note="hull IoU 18/20 beats coverage (1+1)/4",
    ),
    Case(
        "hybrid_full_cover", "grounding",
        text("fact", KW, "[0.0, 20.0]"),
        (1.0, 1.0, 1.0), gt_segments=(TimeSegment(0, 5), TimeSegment(15, 20)),
        note="full coverage (5+5)/10 saturates the hybrid rule",
    ),
    Case(
        "multi_perfect", "grounding",
        text("fact", KW, "[0.0, 10.0] and [20.0, 30.0]"),  # 16 tokens
        (1.0, 1.0, 1.0),
        gt_segments=(TimeSegment(0, 10), TimeSegment(20, 30)),
        note="best-match averaging over two exact segments",
    ),
    Case(
        "multi_partial", "grounding",
        text("fact", KW, "[0.0, 10.0] and [20.0, 30.0]"),
        (1.0, (0.5 + 5.0 / 15.0) / 2.0, 1.0),
        gt_segments=(TimeSegment(0, 5), TimeSegment(25, 35)),
        note="per-gt best IoUs are 5/10 and 5/15, averaged",
    ),
    Case(
        "multi_pred_single_gt", "grounding",
        text("fact", KW, "[0.0, 5.0] then [5.0, 10.0]"),  # 16 tokens
        (1.0, 0.5, 1.0), gt_segments=GT_0_10,
        note="two predictions vs one gt takes the best match, 5/10",
    ),
    Case(
        "zero_len_identical", "grounding",
        text("fact", KW, "[5.0, 5.0]"),
        (1.0, 1.0, 1.0), gt_segments=(TimeSegment(5, 5),),
        note="identical zero-length segments score 1 by convention",
    ),
    Case(
        "zero_len_vs_real", "grounding",
        text("fact", KW, "[5.0, 5.0]"),
        (1.0, 0.0, 1.0), gt_segments=GT_0_10,
        note="zero-length prediction has zero intersection",
    ),
    Case(
        "zero_len_hybrid", "grounding",
        text("fact", KW, "[5.0, 5.0]"),
        (1.0, 0.0, 1.0), gt_segments=(TimeSegment(0, 1), TimeSegment(4, 6)),
        note="hybrid branch with degenerate prediction: both terms 0",
    ),
    # ---- multichoice accuracy -----------------------------------------
    Case(
        "acc_correct", "multichoice",
        text("fact", KW, "The answer is (B)."),  # 15 tokens
        (1.0, 1.0, 1.0), gt_answer="B",
        note="parenthesized letter parsed and matched",
    ),
    Case(
        "acc_wrong", "multichoice",
        text("fact", KW, "A."),  # 12 tokens
        (1.0, 0.0, 1.0), gt_answer="B",
        note="indicator is 0 on mismatch",
    ),
    Case(
        "acc_unparseable", "multichoice",
        text("fact", KW, "ABCD are all words here"),  # 16 tokens
        (1.0, 0.0, 1.0), gt_answer="C",
        note="no standalone letter counts as wrong",
    ),
    Case(
        "acc_trailing_paren", "multichoice",
        text("fact", KW, "B)"),  # 12 tokens
        (1.0, 1.0, 1.0), gt_answer="B",
        note="letter followed by a closing paren still parses",
    ),
    Case(
        "acc_first_match", "multichoice",
        text("fact", KW, "A. because of C"),  # 15 tokens
        (1.0, 0.0, 1.0), gt_answer="C",
        note="first standalone letter wins, so A is compared, not C",
    ),
    # ---- length tiers (l_target=24, l_buffer=16, l_max=40) -------------
    Case(
        "len_at_target", "grounding",
        text(pads(12), KW, "[0.0, 10.0]"),  # 12+10+2 = 24 tokens
        (1.0, 1.0, 1.0), gt_segments=GT_0_10,
        note="boundary of the flat branch: exactly l_target",
    ),
    Case(
        "len_mid_decay", "grounding",
        text(pads(20), KW, "[0.0, 10.0]"),  # 32 tokens
        (1.0, 1.0, 0.5), gt_segments=GT_0_10,
        note="midpoint of the buffer: 1 - 8/16",
    ),
    Case(
        "len_quarter", "grounding",
        text(pads(24), KW, "[0.0, 10.0]"),  # 36 tokens
        (1.0, 1.0, 0.25), gt_segments=GT_0_10,
        note="three quarters into the buffer: 1 - 12/16",
    ),
    Case(
        "len_at_max", "grounding",
        text(pads(28), KW, "[0.0, 10.0]"),  # 40 tokens
        (1.0, 1.0, 0.0), gt_segments=GT_0_10,
        note="decay branch reaches exactly 0 at l_max",
    ),
    Case(
        "len_beyond_max", "grounding",
        text(pads(29), KW, "[0.0, 10.0]"),  # 41 tokens
        (1.0, 1.0, 0.0), gt_segments=GT_0_10,
        note="hard-zero branch beyond l_max",
    ),
    # ---- compositions --------------------------------------------------
    Case(
        "combo_half_wrong_over", "multichoice",
        text(pads(40), KW, "A.") + " <answering>",  # 52 tokens
        (0.5, 0.0, 0.0), gt_answer="B",
        note="format tier 0.5, wrong letter, over the hard length cap",
    ),
    Case(
        "empty_answer_text", "grounding",
        text("fact", KW, "none"),  # 12 tokens
        (1.0, 0.0, 1.0), gt_segments=GT_0_10,
        note="answer text with no numbers parses to zero segments",
    ),
]

assert len(CASES) >= 30
