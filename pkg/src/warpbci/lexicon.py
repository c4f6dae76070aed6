"""Frequency-ranked dictionary with T9 digit-string and prefix lookup.

Suggestions list exact matches for the typed sequence first (the classic
T9 textonym list), then longer completions; within each tier words rank
by count descending, ties alphabetical. A compact core-vocabulary fixture
ships with the package; any ``word<TAB>count`` file loads the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import FormatError

T9_KEYS: dict[str, str] = {
    "2": "abc", "3": "def", "4": "ghi", "5": "jkl",
    "6": "mno", "7": "pqrs", "8": "tuv", "9": "wxyz",
}

LETTER_TO_KEY: dict[str, str] = {
    letter: key for key, letters in T9_KEYS.items() for letter in letters
}


def encode_t9(word: str) -> str:
    """Digit string for a word, one keypress per letter ("the" -> "843")."""
    try:
        return "".join(LETTER_TO_KEY[c] for c in word.lower())
    except KeyError as exc:
        raise ValueError(f"word {word!r} contains non-alphabetic characters") from exc


@dataclass(frozen=True)
class Lexicon:
    """Immutable word store; build via load_lexicon or from_pairs."""

    words: tuple[tuple[str, int], ...]
    skipped_tokens: int = 0
    _digits: tuple[str, ...] = field(default=(), repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_digits", tuple(encode_t9(w) for w, _ in self.words))

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def from_pairs(cls, pairs, min_count: int = 1, skipped: int = 0) -> "Lexicon":
        counts: dict[str, int] = {}
        for word, count in pairs:
            counts[word] = counts.get(word, 0) + count
        kept = [(w, c) for w, c in counts.items() if c >= min_count]
        kept.sort(key=lambda wc: (-wc[1], wc[0]))
        return cls(tuple(kept), skipped)

    def _ranked(self, matches, exact_len: int, limit: int) -> list[str]:
        matches.sort(key=lambda wc: (len(wc[0]) != exact_len, -wc[1], wc[0]))
        return [w for w, _ in matches[:limit]]

    def suggest_t9(self, digits: str, limit: int = 5) -> list[str]:
        """Words whose digit encoding starts with ``digits``: textonym
        matches first, then completions, each by count."""
        if any(d not in T9_KEYS for d in digits):
            raise ValueError(f"digits {digits!r} must be in 2..9")
        matches = [
            (w, c) for (w, c), enc in zip(self.words, self._digits)
            if enc.startswith(digits)
        ]
        return self._ranked(matches, len(digits), limit)

    def suggest_prefix(self, prefix: str, limit: int = 5) -> list[str]:
        """Words starting with the letter prefix, ranked as suggest_t9."""
        prefix = prefix.lower()
        matches = [(w, c) for w, c in self.words if w.startswith(prefix)]
        return self._ranked(matches, len(prefix), limit)


def load_lexicon(path: str | Path, min_count: int = 1) -> Lexicon:
    """Read ``word<TAB>count`` lines; duplicate words sum their counts,
    non-alphabetic tokens are skipped and counted in skipped_tokens."""
    path = Path(path)
    pairs = []
    skipped = 0
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError("expected word<TAB>count", lineno)
        word, count_text = parts[0].strip().lower(), parts[1].strip()
        try:
            count = int(count_text)
        except ValueError as exc:
            raise FormatError(f"bad count {count_text!r}", lineno) from exc
        if count < 0:
            raise FormatError(f"negative count {count}", lineno)
        if not word.isalpha() or not all(c in LETTER_TO_KEY for c in word):
            skipped += 1
            continue
        pairs.append((word, count))
    return Lexicon.from_pairs(pairs, min_count, skipped)


def bundled_lexicon(min_count: int = 1) -> Lexicon:
    """The word-frequency fixture shipped with the package."""
    ref = resources.files("warpbci").joinpath("data/word_freq.tsv")
    with resources.as_file(ref) as path:
        return load_lexicon(path, min_count)
