"""Same-point inventor name matching with over-link pruning.

The first two words of a name are assumed to be the last and first names;
both are searched for anywhere in the other name.  The last name may differ
by one edit when longer than three characters, and the first name may
differ by one edit only when the last name agreed exactly.  A per-location
pruning pass removes links whose triggering last name matched non-leading
words more than twice as often as leading ones, which is the failure mode
of crowded addresses full of a shared middle name.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .textnorm import NormalizedName, edit_distance_le_1

log = logging.getLogger(__name__)

POSITION_FIRST_WORD = "FirstWord"
POSITION_OTHER_WORD = "OtherWord"

# Last names this short must match exactly; longer ones may differ by one edit.
EXACT_LAST_NAME_MAX_LEN = 3


@dataclass(frozen=True)
class LinkEvidence:
    last_token: str
    matched_position: str  # POSITION_FIRST_WORD or POSITION_OTHER_WORD
    perfect_last: bool


def _find_token(target: str, words: tuple[str, ...], allow_one_edit: bool) -> tuple[int, bool] | None:
    """Index and exactness of the first acceptable occurrence of target."""
    for idx, word in enumerate(words):
        if word == target:
            return idx, True
    if allow_one_edit:
        for idx, word in enumerate(words):
            if edit_distance_le_1(target, word):
                return idx, False
    return None


def _match_directed(a: NormalizedName, b: NormalizedName) -> LinkEvidence | None:
    if len(a.words) < 2:
        return None
    last, first = a.words[0], a.words[1]
    fuzzy_last = len(last) > EXACT_LAST_NAME_MAX_LEN
    found = _find_token(last, b.words, allow_one_edit=fuzzy_last)
    if found is None:
        return None
    idx, perfect_last = found
    if _find_token(first, b.words, allow_one_edit=perfect_last) is None:
        return None
    return LinkEvidence(
        last_token=last,
        matched_position=POSITION_FIRST_WORD if idx == 0 else POSITION_OTHER_WORD,
        perfect_last=perfect_last,
    )


def inventors_match(a: NormalizedName, b: NormalizedName) -> LinkEvidence | None:
    """Try both orientations; evidence comes from the first that succeeds.

    Orientations are tried in a canonical order (lexicographic by key) so
    the recorded evidence does not depend on argument order.
    """
    if len(a.words) < 2 and len(b.words) < 2:
        log.debug("skipping pair with no 2-word name: %r / %r", a.key, b.key)
        return None
    if b.key < a.key:
        a, b = b, a
    return _match_directed(a, b) or _match_directed(b, a)


def collect_links(
    members: Sequence[tuple[str, NormalizedName]],
) -> list[tuple[tuple[str, str], LinkEvidence]]:
    """All accepted pairwise links within one location block.

    Members are (key, name) with unique keys; pairs are enumerated over the
    key-sorted member list so results are independent of input order.
    """
    ordered = sorted(members, key=lambda kv: kv[0])
    links: list[tuple[tuple[str, str], LinkEvidence]] = []
    for i in range(len(ordered)):
        key_i, name_i = ordered[i]
        for j in range(i + 1, len(ordered)):
            key_j, name_j = ordered[j]
            evidence = inventors_match(name_i, name_j)
            if evidence is not None:
                links.append(((key_i, key_j), evidence))
    return links


def prune_links(
    links: Iterable[tuple[tuple[str, str], LinkEvidence]],
) -> list[tuple[str, str]]:
    """Drop every link whose trigger token matched non-leading words more
    than twice as often as leading ones, over all links of one block."""
    first_counts: dict[str, int] = {}
    other_counts: dict[str, int] = {}
    materialized = list(links)
    for _, evidence in materialized:
        counts = (
            first_counts if evidence.matched_position == POSITION_FIRST_WORD else other_counts
        )
        counts[evidence.last_token] = counts.get(evidence.last_token, 0) + 1
    kept = []
    for pair, evidence in materialized:
        token = evidence.last_token
        if other_counts.get(token, 0) > 2 * first_counts.get(token, 0):
            continue
        kept.append(pair)
    return kept
