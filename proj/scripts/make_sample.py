#!/usr/bin/env python3
"""Regenerates data/sample.txt, the bundled ~100KB demo corpus.

Deterministic synthetic play-style text: speaker headings, dialogue lines,
punctuation, and blank lines between speeches. Keeps real corpora out of the
repository while giving the tests and the visualize/tree demos text with
word, sentence, and speaker structure.
"""

import os

SPEAKERS = [
    "FIRST CITIZEN", "SECOND CITIZEN", "MESSENGER", "DUKE", "LADY MARGARET",
    "SERVANT", "HERALD", "OLD SHEPHERD", "CAPTAIN", "CHORUS",
]

WORDS = (
    "the and to of you my that in not with for his this be your he what "
    "shall we me thou so him but have as do good no come let it on her they "
    "now more will she which our then are love man from hath sir o know if "
    "day night sword crown heart hand eyes blood king queen lord land sea "
    "storm fire honest brave weary sweet bitter noble false true heavy light "
    "speak stand fall rise bring take give hold keep leave meet part watch "
    "word deed tale song grief joy fear hope wrath mercy fortune fate"
).split()

ENDINGS = [".", ".", ".", "!", "?", ";", ","]


class Lcg:
    def __init__(self, seed):
        self.state = seed & 0xFFFFFFFFFFFFFFFF

    def next(self, n):
        self.state = (self.state * 6364136223846793005 + 1442695040888963407) % (1 << 64)
        return (self.state >> 33) % n


def sentence(rng):
    length = 4 + rng.next(9)
    words = [WORDS[rng.next(len(WORDS))] for _ in range(length)]
    words[0] = words[0].capitalize()
    return " ".join(words) + ENDINGS[rng.next(len(ENDINGS))]


def speech(rng):
    lines = []
    for _ in range(1 + rng.next(4)):
        parts = [sentence(rng) for _ in range(1 + rng.next(2))]
        lines.append(" ".join(parts))
    return "\n".join(lines)


def main():
    rng = Lcg(20160616)
    chunks = []
    size = 0
    while size < 100 * 1024:
        block = SPEAKERS[rng.next(len(SPEAKERS))] + ":\n" + speech(rng) + "\n\n"
        chunks.append(block)
        size += len(block)
    text = "".join(chunks)[: 100 * 1024]
    out = os.path.join(os.path.dirname(__file__), "..", "data", "sample.txt")
    with open(out, "w", newline="") as f:
        f.write(text)
    print(f"wrote {len(text)} bytes, {len(set(text))} distinct chars")


if __name__ == "__main__":
    main()
