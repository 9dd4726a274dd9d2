"""Walk through the rule-based reward suite on a few sample responses.

Each response is parsed into its factual/thinking/answering blocks, then
scored on the three objectives (format, task, length).
"""

from pfab import RewardConfig, TaskRecord, TimeSegment, parse_response, score_record

KEYWORDS = (
    "Global Search over the facts, then Causal Verification with the "
    "Antecedent and Consequence of the event, a Visual Verification pass, "
    "and a Final Alignment check"
)

GOOD = (
    f"<factual>person enters kitchen at 12s, opens fridge at 15s</factual> "
    f"<thinking>{KEYWORDS}</thinking> "
    f"<answering>The event spans [12.0, 20.5] seconds.</answering>"
)

SLOPPY = (
    "<factual>someone cooks</factual> "
    "<thinking>it happens early on</thinking> "
    "<answering>from 3 to 8</answering>"
)

BROKEN = "I think the answer is (B) but I forgot the tags entirely."


def show(label, record):
    scored = score_record(record, RewardConfig(l_max=120, l_buffer=40))
    print(f"--- {label} ---")
    parsed = parse_response(record.response_text)
    print(f"  pattern ok: {parsed.basic_pattern_ok}, tags unique: {parsed.tags_unique}, "
          f"tokens: {parsed.token_length}")
    for name, value in scored.reward.components.items():
        print(f"  {name:>7}: {value:.3f}   ({scored.diagnostics[name]})")
    print()


def main():
    show("well-formed grounding answer", TaskRecord(
        "demo-1", 0, "grounding", GOOD, gt_segments=(TimeSegment(12.0, 21.0),)))
    show("sloppy thinking, decent segment", TaskRecord(
        "demo-2", 0, "grounding", SLOPPY, gt_segments=(TimeSegment(2.0, 9.0),)))
    show("missing tag structure, multichoice", TaskRecord(
        "demo-3", 0, "multichoice", BROKEN, gt_answer="B"))


if __name__ == "__main__":
    main()
