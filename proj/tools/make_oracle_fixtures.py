#!/usr/bin/env python3
"""Writes the oracle fixtures.

data/oracle_synthetic.jsonl          200 surface/lemma records
tests/fixtures/oracle_synthetic_actions.tsv   hand labels, one line per character
tests/fixtures/oracle_synthetic_counts.json   counts tallied from the hand labels
tests/fixtures/table7_actions.tsv    the three worked rows, '|' delimited

Every record is a two-syllable noun stem (all KEEP) followed by one of the
templates below. The labels and granularities of each template were worked
out by hand; nothing here calls the library.
"""

import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent

STEMS = ["학생", "사람", "나무", "바다", "친구", "학교", "음식", "시간", "마음", "도시"]

# (surface, lemma units, [(char, actions, granularity)])
# granularity: "sub", "char", or None for KEEP/NOOP/non-Hangul.
TEMPLATES = [
    ("했다", ["하", "았", "다"], [("했", "B-MOD-하;I-MOD-았", "sub"), ("다", "B-KEEP", None)]),
    ("갔다", ["가", "았", "다"], [("갔", "B-MOD-가;I-MOD-았", "sub"), ("다", "B-KEEP", None)]),
    ("봤다", ["보", "았", "다"], [("봤", "B-MOD-보;I-MOD-았", "sub"), ("다", "B-KEEP", None)]),
    ("됐다", ["되", "었", "다"], [("됐", "B-MOD-되;I-MOD-었", "sub"), ("다", "B-KEEP", None)]),
    ("한", ["하", "ㄴ"], [("한", "B-MOD-하;I-MOD-ㄴ", "sub")]),
    ("갈", ["가", "ㄹ"], [("갈", "B-MOD-가;I-MOD-ㄹ", "sub")]),
    ("추웠다", ["춥", "었", "다"],
     [("추", "B-MOD-춥", "sub"), ("웠", "B-MOD-었", "sub"), ("다", "B-KEEP", None)]),
    ("걸었다", ["걷", "었", "다"],
     [("걸", "B-MOD-걷", "sub"), ("었", "B-KEEP", None), ("다", "B-KEEP", None)]),
    ("도와", ["돕", "아"], [("도", "B-MOD-돕", "sub"), ("와", "B-MOD-아", "sub")]),
    ("먹었다", ["먹", "었", "다"],
     [("먹", "B-KEEP", None), ("었", "B-KEEP", None), ("다", "B-KEEP", None)]),
    ("하다요", ["하", "다"], [("하", "B-KEEP", None), ("다", "B-KEEP", None), ("요", "B-NOOP", None)]),
    ("나라", ["나", "이", "다"], [("나", "B-KEEP", None), ("라", "B-MOD-이;I-MOD-다", "char")]),
    ("예뻐", ["예쁘", "어"], [("예", "B-KEEP", None), ("뻐", "I-MOD-쁘;I-MOD-어", "sub")]),
    ("그런", ["그렇", "ㄴ"], [("그", "B-KEEP", None), ("런", "I-MOD-렇;I-MOD-ㄴ", "sub")]),
    ("먹는", ["먹", "는"], [("먹", "B-KEEP", None), ("는", "B-KEEP", None)]),
    ("라", ["이"], [("라", "B-MOD-이", "char")]),
    ("OK했다", ["OK", "하", "았", "다"],
     [("O", "B-KEEP", None), ("K", "I-KEEP", None), ("했", "B-MOD-하;I-MOD-았", "sub"), ("다", "B-KEEP", None)]),
    ("했어", ["하", "였", "어"], [("했", "B-MOD-하;I-MOD-였", "sub"), ("어", "B-KEEP", None)]),
    ("예쁜", ["예쁘", "ㄴ"], [("예", "B-KEEP", None), ("쁜", "I-MOD-쁘;I-MOD-ㄴ", "sub")]),
    ("가요", ["가"], [("가", "B-KEEP", None), ("요", "B-NOOP", None)]),
]


def is_hangul(ch):
    cp = ord(ch)
    return 0xAC00 <= cp <= 0xD7A3 or 0x1100 <= cp <= 0x11FF or 0x3130 <= cp <= 0x318F


def main():
    records = []
    labels = []
    counts = {"hangul_characters": 0, "skipped_non_hangul": 0, "keep": 0, "mod": 0, "noop": 0,
              "mod_subcharacter": 0, "mod_character": 0}
    for stem in STEMS:
        for surface, lemma, rows in TEMPLATES:
            assert "".join(c for c, _, _ in rows) == surface
            records.append({"surface": stem + surface, "lemma_units": [stem] + lemma})
            rows = [(stem[0], "B-KEEP", None), (stem[1], "I-KEEP", None)] + rows
            for ch, actions, level in rows:
                labels.append(f"{ch}\t{actions}")
                if not is_hangul(ch):
                    counts["skipped_non_hangul"] += 1
                    continue
                counts["hangul_characters"] += 1
                if "MOD" in actions:
                    counts["mod"] += 1
                    counts["mod_subcharacter" if level == "sub" else "mod_character"] += 1
                elif "KEEP" in actions:
                    counts["keep"] += 1
                else:
                    counts["noop"] += 1
    assert len(records) == 200

    (ROOT / "data/oracle_synthetic.jsonl").write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records), encoding="utf-8")
    fixtures = ROOT / "tests/fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)
    (fixtures / "oracle_synthetic_actions.tsv").write_text("\n".join(labels) + "\n", encoding="utf-8")
    (fixtures / "oracle_synthetic_counts.json").write_text(json.dumps(counts, indent=2) + "\n", encoding="utf-8")
    (fixtures / "table7_actions.tsv").write_text(
        "런 | B-MOD-럽;I-MOD-ㄴ\n했 | B-MOD-하;I-MOD-았\n다 | B-KEEP\n", encoding="utf-8")


if __name__ == "__main__":
    main()
