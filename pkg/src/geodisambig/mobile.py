"""Stage 4: merge distant inventor entities that share an exact name.

Any two local inventor entities left apart by the distance stages but
carrying an identical normalized name become a merge candidate; they merge
when their patent sets are connected by at least one corroborating signal:
a shared disambiguated co-inventor, a shared disambiguated co-assignee,
membership in the same patent family, or a citation in either direction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

from .corpus import PatentContext
from .unionfind import UnionFind

log = logging.getLogger(__name__)

SIGNAL_COINVENTOR = "SharedCoinventor"
SIGNAL_COASSIGNEE = "SharedCoassignee"
SIGNAL_FAMILY = "SameTriadicFamily"
SIGNAL_CITATION = "Citation"


@dataclass(frozen=True)
class MobileCandidate:
    id_a: str
    id_b: str
    name_key: str
    signals: frozenset[str]


@dataclass(frozen=True)
class EntitySketch:
    """What stage 4 needs to know about one local inventor entity."""

    entity_id: str
    name_keys: frozenset[str]
    patent_ids: frozenset[str]


def _signals_for(
    a: EntitySketch,
    b: EntitySketch,
    contexts: dict[str, PatentContext],
) -> frozenset[str]:
    signals: set[str] = set()
    pair_ids = {a.entity_id, b.entity_id}

    def gather(sketch: EntitySketch):
        coinv: set[str] = set()
        coass: set[str] = set()
        families: set[str] = set()
        cited: set[str] = set()
        for pid in sketch.patent_ids:
            ctx = contexts.get(pid)
            if ctx is None:
                continue
            coinv |= ctx.coinventor_entity_ids - pair_ids
            coass |= ctx.assignee_entity_ids
            if ctx.family_id:
                families.add(ctx.family_id)
            cited |= ctx.cited_patents
        return coinv, coass, families, cited

    coinv_a, coass_a, fam_a, cited_a = gather(a)
    coinv_b, coass_b, fam_b, cited_b = gather(b)
    if coinv_a & coinv_b:
        signals.add(SIGNAL_COINVENTOR)
    if coass_a & coass_b:
        signals.add(SIGNAL_COASSIGNEE)
    if fam_a & fam_b:
        signals.add(SIGNAL_FAMILY)
    if (cited_a & b.patent_ids) or (cited_b & a.patent_ids):
        signals.add(SIGNAL_CITATION)
    return frozenset(signals)


def find_candidates(
    sketches: list[EntitySketch],
    contexts: dict[str, PatentContext],
) -> list[MobileCandidate]:
    """One candidate per unordered pair of entities sharing an exact name."""
    by_name: dict[str, list[EntitySketch]] = {}
    for sketch in sketches:
        for name_key in sketch.name_keys:
            by_name.setdefault(name_key, []).append(sketch)

    candidates: dict[tuple[str, str], MobileCandidate] = {}
    for name_key in sorted(by_name):
        group = sorted(by_name[name_key], key=lambda s: s.entity_id)
        for a, b in combinations(group, 2):
            pair = (a.entity_id, b.entity_id)
            if pair in candidates:
                continue
            candidates[pair] = MobileCandidate(
                id_a=a.entity_id,
                id_b=b.entity_id,
                name_key=name_key,
                signals=_signals_for(a, b, contexts),
            )
    return [candidates[pair] for pair in sorted(candidates)]


def merge_mobile(candidates: list[MobileCandidate], state: UnionFind) -> int:
    """Union every candidate carrying at least one signal; returns count."""
    merged = 0
    for candidate in candidates:
        state.add(candidate.id_a)
        state.add(candidate.id_b)
        if candidate.signals:
            state.union(candidate.id_a, candidate.id_b)
            merged += 1
    return merged
