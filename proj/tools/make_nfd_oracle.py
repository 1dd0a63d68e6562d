#!/usr/bin/env python3
"""Writes tests/fixtures/nfd_oracle.tsv: 1,000 seeded random precomposed
syllables with their canonical decomposition from unicodedata.

Line format: `<syllable hex> TAB <jamo hex> <jamo hex> [<jamo hex>]`.
"""

import pathlib
import random
import unicodedata

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main():
    rng = random.Random(1172)
    syllables = rng.sample(range(0xAC00, 0xD7A4), 1000)
    lines = [f"# unicodedata {unicodedata.unidata_version}"]
    for cp in syllables:
        nfd = unicodedata.normalize("NFD", chr(cp))
        lines.append(f"{cp:04X}\t" + " ".join(f"{ord(c):04X}" for c in nfd))
    out = ROOT / "tests/fixtures/nfd_oracle.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="ascii")


if __name__ == "__main__":
    main()
