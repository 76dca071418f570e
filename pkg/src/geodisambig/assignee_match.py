"""Same-point assignee name matching.

Two assignee names geolocated to an identical high-resolution point are
compared in three ordered steps: a rare word shared within one edit, an
overlap of at least two common words (one suffices when either name is a
single common word), and finally an acronym check in either direction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lexicon import Lexicon
from .textnorm import NormalizedName, edit_distance_le_1

MATCH_RARE_WORD = "RareWord"
MATCH_COMMON_OVERLAP = "CommonOverlap"
MATCH_ACRONYM = "Acronym"
MATCH_NONE = "None"


@dataclass(frozen=True)
class MatchVerdict:
    matched_by: str

    def __bool__(self) -> bool:
        return self.matched_by != MATCH_NONE


def _is_acronym_of(word: str, words: tuple[str, ...]) -> bool:
    # Greedy subsequence scan over first letters, order preserved.
    it = iter(words)
    for letter in word:
        for candidate in it:
            if candidate[0] == letter:
                break
        else:
            return False
    return True


def acronym_of(a: NormalizedName, b: NormalizedName) -> bool:
    """True iff some word of one name spells the initials of an ordered
    subset of the other name's words (checked in both directions)."""
    for first, second in ((a, b), (b, a)):
        for word in first.words:
            if len(word) >= 2 and _is_acronym_of(word, second.words):
                return True
    return False


def _rare_word_match(a: NormalizedName, b: NormalizedName, lex: Lexicon) -> bool:
    rare_a = lex.rare_words(a)
    rare_b = lex.rare_words(b)
    if not rare_a or not rare_b:
        return False
    for u in rare_a:
        for v in rare_b:
            if edit_distance_le_1(u, v):
                return True
    return False


def _common_overlap_match(a: NormalizedName, b: NormalizedName, lex: Lexicon) -> bool:
    common_a = lex.common_words(a)
    common_b = lex.common_words(b)
    shared = len(common_a & common_b)
    if shared >= 2:
        return True
    single_common = (len(a.words) == 1 and a.words[0] in common_a) or (
        len(b.words) == 1 and b.words[0] in common_b
    )
    return shared >= 1 and single_common


def assignees_match(a: NormalizedName, b: NormalizedName, lex: Lexicon) -> MatchVerdict:
    """Compare two co-located assignee names; step order is strict."""
    if a.degenerate or b.degenerate:
        return MatchVerdict(MATCH_NONE)
    if _rare_word_match(a, b, lex):
        return MatchVerdict(MATCH_RARE_WORD)
    if _common_overlap_match(a, b, lex):
        return MatchVerdict(MATCH_COMMON_OVERLAP)
    if acronym_of(a, b):
        return MatchVerdict(MATCH_ACRONYM)
    return MatchVerdict(MATCH_NONE)
