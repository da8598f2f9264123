"""Scored dictionaries, clue databases, fill scoring, and candidate streams.

A fill's cost is the negated log of a mixture probability

    p(f | c) = w_clue * count(c, f) / (count(c, *) + 1)
             + w_merit * merit(f)
             + floor_epsilon

with the weights validated so that p never exceeds 1; arbitrary letter
strings therefore bottom out at exactly -log(floor_epsilon).  Candidate
streams yield every pattern-matching dictionary word in ascending cost
before any multiword, and multiwords (concatenations of two or more
dictionary words of at least two letters) are generated on demand, cheapest
first, with a penalty per word break.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .grid import Clue

LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
FREE = "."  # pattern glyph for an unconstrained position


class LexiconError(ValueError):
    """Malformed dictionary, clue database, or scorer configuration."""


@dataclass(frozen=True)
class ScoredDictionary:
    """Uppercase words, each with a clue-independent merit in [0, 1]."""

    entries: Mapping[str, float]
    _by_length: Mapping[int, tuple[str, ...]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        for word, merit in self.entries.items():
            if not word or any(ch not in LETTERS for ch in word):
                raise LexiconError(f"dictionary word {word!r} is not uppercase A-Z")
            if not (0.0 <= merit <= 1.0) or math.isnan(merit):
                raise LexiconError(f"merit for {word!r} must be in [0, 1]")
        by_length: dict[int, list[str]] = {}
        for word in self.entries:
            by_length.setdefault(len(word), []).append(word)
        object.__setattr__(
            self,
            "_by_length",
            {n: tuple(sorted(ws)) for n, ws in by_length.items()},
        )

    def merit(self, word: str) -> float:
        return self.entries.get(word, 0.0)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def words_of_length(self, n: int) -> tuple[str, ...]:
        return self._by_length.get(n, ())

    def lengths(self) -> tuple[int, ...]:
        return tuple(sorted(self._by_length))


def load_dictionary(text: str) -> ScoredDictionary:
    """Parse "WORD<TAB>merit" lines."""
    entries: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise LexiconError(f"line {lineno}: expected WORD<TAB>merit")
        word = parts[0].strip().upper()
        try:
            merit = float(parts[1])
        except ValueError as exc:
            raise LexiconError(f"line {lineno}: bad merit {parts[1]!r}") from exc
        if word in entries:
            raise LexiconError(f"line {lineno}: duplicate word {word!r}")
        entries[word] = merit
    return ScoredDictionary(entries)


def load_dictionary_file(path: str) -> ScoredDictionary:
    with open(path, "r", encoding="utf-8") as fh:
        return load_dictionary(fh.read())


def normalize_clue(text: str) -> str:
    """Lowercase, punctuation stripped, whitespace collapsed."""
    cleaned = "".join(ch if ch.isalnum() or ch.isspace() else " " for ch in text.lower())
    return " ".join(cleaned.split())


@dataclass(frozen=True)
class ClueDatabase:
    """Occurrence counts for (normalized clue, answer) pairs."""

    records: Mapping[tuple[str, str], int]
    _totals: Mapping[str, int] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        totals: dict[str, int] = {}
        for (clue, answer), count in self.records.items():
            if count < 1:
                raise LexiconError(f"count for ({clue!r}, {answer!r}) must be >= 1")
            totals[clue] = totals.get(clue, 0) + count
        object.__setattr__(self, "_totals", totals)

    def count(self, clue_norm: str, answer: str) -> int:
        return self.records.get((clue_norm, answer), 0)

    def total(self, clue_norm: str) -> int:
        return self._totals.get(clue_norm, 0)


def load_clue_database(text: str) -> ClueDatabase:
    """Parse "normalized clue<TAB>ANSWER<TAB>count" lines."""
    records: dict[tuple[str, str], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconError(f"line {lineno}: expected clue<TAB>ANSWER<TAB>count")
        clue = normalize_clue(parts[0])
        answer = parts[1].strip().upper()
        try:
            count = int(parts[2])
        except ValueError as exc:
            raise LexiconError(f"line {lineno}: bad count {parts[2]!r}") from exc
        key = (clue, answer)
        records[key] = records.get(key, 0) + count
    return ClueDatabase(records)


def load_clue_database_file(path: str) -> ClueDatabase:
    with open(path, "r", encoding="utf-8") as fh:
        return load_clue_database(fh.read())


@dataclass(frozen=True)
class ScorerConfig:
    clue_weight: float = 0.9
    merit_weight: float = 0.09
    floor_epsilon: float = 1e-6
    multiword_penalty: float = 1.0
    candidate_cap: int = 2000

    def validate(self) -> None:
        if self.clue_weight < 0 or self.merit_weight < 0:
            raise LexiconError("scorer weights must be non-negative")
        if not (0.0 < self.floor_epsilon < 1.0):
            raise LexiconError("floor_epsilon must be in (0, 1)")
        if self.clue_weight + self.merit_weight + self.floor_epsilon > 1.0:
            raise LexiconError("clue + merit weights + floor must not exceed 1")
        if not self.multiword_penalty > 0:
            raise LexiconError("multiword_penalty must be positive")
        if self.candidate_cap < 1:
            raise LexiconError("candidate_cap must be >= 1")

    @property
    def floor_cost(self) -> float:
        return -math.log(self.floor_epsilon)

    @staticmethod
    def from_json(text: str) -> "ScorerConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise LexiconError(f"invalid scorer config JSON: {exc}") from exc
        allowed = {"weights", "floor_epsilon", "multiword_penalty", "candidate_cap"}
        extra = set(data) - allowed
        if extra:
            raise LexiconError(f"unknown scorer config keys {sorted(extra)}")
        kwargs: dict = {}
        weights = data.get("weights", {})
        wextra = set(weights) - {"clue", "merit"}
        if wextra:
            raise LexiconError(f"unknown scorer weights {sorted(wextra)}")
        if "clue" in weights:
            kwargs["clue_weight"] = float(weights["clue"])
        if "merit" in weights:
            kwargs["merit_weight"] = float(weights["merit"])
        if "floor_epsilon" in data:
            kwargs["floor_epsilon"] = float(data["floor_epsilon"])
        if "multiword_penalty" in data:
            kwargs["multiword_penalty"] = float(data["multiword_penalty"])
        if "candidate_cap" in data:
            kwargs["candidate_cap"] = int(data["candidate_cap"])
        config = ScorerConfig(**kwargs)
        config.validate()
        return config

    @staticmethod
    def load(path: str) -> "ScorerConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return ScorerConfig.from_json(fh.read())


def score_candidate(
    fill: str,
    clue: Clue,
    dictionary: ScoredDictionary,
    db: ClueDatabase,
    config: ScorerConfig,
) -> float:
    """Cost of a fill for a clue: strictly decreasing in clue count and merit."""
    total = db.total(clue.normalized)
    p_clue = db.count(clue.normalized, fill) / (total + 1) if total else 0.0
    p = (
        config.clue_weight * p_clue
        + config.merit_weight * dictionary.merit(fill)
        + config.floor_epsilon
    )
    return -math.log(p)


def pattern_matches(pattern: str, word: str) -> bool:
    if len(pattern) != len(word):
        return False
    return all(p == FREE or p == ch for p, ch in zip(pattern, word))


class CandidateStream:
    """Cost-ordered fills for one slot: dictionary words first, multiwords after.

    The stream is stable and restartable; each consumer iterates through the
    same cached prefix while new candidates are pulled on demand, up to the
    configured cap.
    """

    def __init__(self, slot: int, dictionary_items: list[tuple[str, float]],
                 multiwords: Iterator[tuple[str, float]], cap: int) -> None:
        self.slot = slot
        self._cached: list[tuple[str, float]] = list(dictionary_items[:cap])
        self._dict_count = len(self._cached)
        self._more = multiwords
        self._cap = cap
        self.exhausted_dictionary = False

    @property
    def scored(self) -> list[tuple[str, float]]:
        """The materialized prefix seen so far."""
        return list(self._cached)

    def _extend(self) -> bool:
        if len(self._cached) >= self._cap:
            return False
        self.exhausted_dictionary = True
        for item in self._more:
            self._cached.append(item)
            return True
        return False

    def fill(self, n: int) -> tuple[str, float] | None:
        """The nth cheapest candidate (0-based), or None past the end."""
        while n >= len(self._cached):
            if n >= self._dict_count:
                self.exhausted_dictionary = True
            if not self._extend():
                return None
        if n + 1 >= self._dict_count:
            self.exhausted_dictionary = True
        return self._cached[n]

    def __iter__(self) -> Iterator[tuple[str, float]]:
        i = 0
        while True:
            item = self.fill(i)
            if item is None:
                return
            yield item
            i += 1

    def matching(self, pattern: str) -> Iterator[tuple[str, float]]:
        return (item for item in self if pattern_matches(pattern, item[0]))


def _multiword_candidates(
    pattern: str,
    clue: Clue,
    dictionary: ScoredDictionary,
    db: ClueDatabase,
    config: ScorerConfig,
    skip: set[str],
) -> Iterator[tuple[str, float]]:
    """Pattern-matching concatenations of 2+ words, cheapest total cost first.

    Uniform-cost search over (prefix, position) states; every step cost is
    positive, so completed strings pop in non-decreasing cost order.
    """
    length = len(pattern)
    score_cache: dict[str, float] = {}

    def word_cost(w: str) -> float:
        got = score_cache.get(w)
        if got is None:
            got = score_candidate(w, clue, dictionary, db, config)
            score_cache[w] = got
        return got

    def extensions(pos: int) -> Iterable[str]:
        remaining = length - pos
        for size in range(2, remaining + 1):
            if remaining - size == 1:
                continue  # would strand a 1-letter tail
            segment = pattern[pos : pos + size]
            for w in dictionary.words_of_length(size):
                if pattern_matches(segment, w):
                    yield w

    heap: list[tuple[float, str, int, int]] = []
    for w in extensions(0):
        if len(w) < length:  # whole-slot words belong to the dictionary phase
            heapq.heappush(heap, (word_cost(w), w, len(w), 1))
    seen = set(skip)
    while heap:
        cost, text, pos, parts = heapq.heappop(heap)
        if pos == length:
            if parts >= 2 and text not in seen:
                seen.add(text)
                yield text, cost
            continue
        for w in extensions(pos):
            heapq.heappush(
                heap,
                (cost + config.multiword_penalty + word_cost(w), text + w, pos + len(w), parts + 1),
            )


def fill_stream(
    slot: int,
    pattern: str,
    dictionary: ScoredDictionary,
    db: ClueDatabase,
    clue: Clue,
    config: ScorerConfig,
) -> CandidateStream:
    """Cost-ordered candidates for a slot under fixed-letter constraints.

    `pattern` is one glyph per cell: a letter, or '.' for free.
    """
    config.validate()
    scored = [
        (score_candidate(w, clue, dictionary, db, config), w)
        for w in dictionary.words_of_length(len(pattern))
        if pattern_matches(pattern, w)
    ]
    scored.sort()
    items = [(w, c) for c, w in scored]
    multi = _multiword_candidates(
        pattern, clue, dictionary, db, config, skip={w for w, _ in items}
    )
    return CandidateStream(slot, items, multi, config.candidate_cap)
