"""Writes scripted judge replies whose per-judge means equal the reference rows.

Each judge gets ten replies for the original texts and ten for the
transferred texts, in dataset order. Exact means are checked with Fraction.
"""
import json
from fractions import Fraction
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "judge_replay.json"

ROWS = {
    "gpt-4o-mini": ("-0.48", "0.28"),
    "claude-sonnet": ("-0.66", "0.24"),
    "gemini": ("-0.60", "0.18"),
}

# Spread patterns (tenths) added to the target mean; each sums to zero.
SPREAD = [
    [-2, 1, 0, 3, -1, -2, 2, 0, 1, -2],
    [1, -3, 2, 0, 1, -1, 2, -2, 1, -1],
    [0, 2, -1, -1, 3, -2, 0, 1, -3, 1],
]

# Reply wrappers exercising the judge-reply parser.
FORMATS = ["{}", "Score: {}", "{}", "I would rate this {}.", "{}\n", "{}", "Sentiment score: {}", "{}",
           "**{}**", "{}"]


def replies(mean, spread):
    values = [Fraction(mean) + Fraction(s, 10) for s in spread]
    assert sum(values) / len(values) == Fraction(mean)
    assert all(-1 <= v <= 1 for v in values)
    out = []
    for i, v in enumerate(values):
        literal = f"{float(v):.2f}"
        assert Fraction(literal) == v
        out.append(FORMATS[i].format(literal))
    return out


def main():
    judges = []
    for k, (name, (orig, trans)) in enumerate(ROWS.items()):
        judges.append({
            "name": name,
            "expected_mean_original": orig,
            "expected_mean_transferred": trans,
            "original": replies(orig, SPREAD[k]),
            "transferred": replies(trans, SPREAD[(k + 1) % 3]),
        })
    OUT.write_text(json.dumps({"judges": judges}, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
