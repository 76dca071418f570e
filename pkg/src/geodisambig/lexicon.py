"""Common/rare word classification for assignee matching.

A token is "common" when it appears on one of three lists (a hand-curated
organisation vocabulary, a gazetteer of place names, or the first/last
names seen among the corpus inventors), or when it is within one error of
the hand-curated list.  One-error checking uses a deletion dictionary:
every single-character deletion and adjacent transposition of each curated
word goes into the dictionary, and a token is matched by looking up the
token itself and each of its own single-deletion variants.  The deletion
and transposition variants are generated only for the curated list, never
for the place or person lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .textnorm import NormalizedName, _load_packaged_list

# Tokens this short produce too many accidental one-error hits.
MIN_FUZZY_LEN = 3


def deletions(word: str) -> set[str]:
    return {word[:i] + word[i + 1 :] for i in range(len(word))}


def transpositions(word: str) -> set[str]:
    return {word[:i] + word[i + 1] + word[i] + word[i + 2 :] for i in range(len(word) - 1)}


def build_misspellings(manual_common: Iterable[str]) -> frozenset[str]:
    """All single deletions and adjacent transpositions of the curated words."""
    out: set[str] = set()
    for word in manual_common:
        out |= deletions(word)
        out |= transpositions(word)
    return frozenset(out)


def extract_person_tokens(names: Iterable[NormalizedName]) -> frozenset[str]:
    """First and last name tokens: the first two words of each inventor name."""
    tokens: set[str] = set()
    for name in names:
        tokens.update(name.words[:2])
    return frozenset(tokens)


@dataclass(frozen=True)
class Lexicon:
    manual_common: frozenset[str]
    place_names: frozenset[str] = frozenset()
    person_names: frozenset[str] = frozenset()
    misspellings: frozenset[str] = field(default=frozenset())

    @classmethod
    def build(
        cls,
        manual_common: Iterable[str],
        place_names: Iterable[str] = (),
        person_names: Iterable[str] = (),
    ) -> "Lexicon":
        manual = frozenset(manual_common)
        return cls(
            manual_common=manual,
            place_names=frozenset(place_names),
            person_names=frozenset(person_names),
            misspellings=build_misspellings(manual),
        )

    def is_common(self, token: str) -> bool:
        """Classify one normalized token; anything not common is "rare".

        Exact membership in any list counts at any length.  The one-error
        route (misspelling dictionary, or a single-deletion variant of the
        token found in the dictionary or the curated list) only applies to
        tokens of length >= MIN_FUZZY_LEN.
        """
        if token in self.manual_common or token in self.place_names or token in self.person_names:
            return True
        if len(token) < MIN_FUZZY_LEN:
            return False
        if token in self.misspellings:
            return True
        for variant in deletions(token):
            if variant in self.misspellings or variant in self.manual_common:
                return True
        return False

    def common_words(self, name: NormalizedName) -> set[str]:
        return {w for w in name.words if self.is_common(w)}

    def rare_words(self, name: NormalizedName) -> set[str]:
        return {w for w in name.words if not self.is_common(w)}


def default_manual_common() -> frozenset[str]:
    return _load_packaged_list("common_words.txt")


def default_place_names() -> frozenset[str]:
    return _load_packaged_list("place_names.txt")
