"""Words in a free group on letters A, B, C, ... (lowercase = inverse)."""

from __future__ import annotations

import random
import re

_WORD_RE = re.compile(r"^[A-Za-z]*$")


def check_word(word: str, letters: str) -> str:
    if not isinstance(word, str) or not _WORD_RE.match(word):
        raise ValueError(f"word {word!r} must consist of letters only")
    allowed = set(letters) | set(letters.lower())
    bad = sorted(set(word) - allowed)
    if bad:
        raise ValueError(f"word {word!r} uses unknown generators {''.join(bad)}")
    return word


def invert(word: str) -> str:
    return word[::-1].swapcase()


def reduce(word: str) -> str:
    out: list[str] = []
    for ch in word:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def cyclic_reduce(word: str) -> str:
    w = reduce(word)
    while len(w) >= 2 and w[0] == w[-1].swapcase():
        w = w[1:-1]
    return w


def random_word(rng: random.Random, letters: str, length: int) -> str:
    alphabet = letters + letters.lower()
    w = ""
    while len(w) < length:
        ch = rng.choice(alphabet)
        if w and w[-1] == ch.swapcase():
            continue
        w += ch
    return w
