"""End-to-end orchestration of the four disambiguation stages.

Stage order: geocode addresses, match similar names at identical
high-resolution points, link exact names across nearby points, and merge
distant same-name inventors on corroborating signals.  Every stage is a
deterministic function of its inputs; with more than one worker, per-block
match results are computed in parallel and merged in a fixed order so the
output is byte-identical to a sequential run.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import blocking
from .corpus import (
    EntityId,
    Mention,
    PatentContext,
    RESOLUTION_HIGH,
    RESOLUTION_LOW,
    entity_id_value,
)
from .errors import InputError, InvariantError
from .geo import HIGH_RES_THRESHOLD
from .geocode import (
    DEFAULT_QUALITY_MAP,
    GeocodeRecord,
    Geocoder,
    address_key,
    best_points,
)
from .lexicon import Lexicon, default_manual_common, default_place_names, extract_person_tokens
from .mobile import EntitySketch, MobileCandidate, find_candidates, merge_mobile
from .nearby import LINK_RADIUS_KM, NameSite, link_same_name
from .textnorm import (
    ROLE_ASSIGNEE,
    ROLE_INVENTOR,
    NormalizedName,
    default_assignee_stopwords,
    default_inventor_stopwords,
    load_wordlist,
    normalize,
)
from .unionfind import UnionFind

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    high_res_threshold: int = HIGH_RES_THRESHOLD
    link_radius_km: float = LINK_RADIUS_KM
    jobs: int = 1
    block_size_cap: int | None = None
    cache_path: str | None = None
    assignee_stopwords: str | None = None
    inventor_stopwords: str | None = None
    common_words: str | None = None
    place_names: str | None = None
    quality_map: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_QUALITY_MAP))
    debug_dumps: bool = False

    def validate(self) -> None:
        if self.high_res_threshold <= 0:
            raise InputError("high_res_threshold must be positive")
        if self.link_radius_km <= 0:
            raise InputError("link_radius_km must be positive")
        if self.jobs < 1:
            raise InputError("jobs must be >= 1")
        if self.block_size_cap is not None and self.block_size_cap < 2:
            raise InputError("block_size_cap must be >= 2")

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        """Flat `key=value` config; '#' starts a comment.

        `quality.<tier>=<int>` entries override single quality-map tiers.
        """
        config = cls()
        try:
            fh = open(path, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        with fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InputError(f"config line {lineno}: expected key=value, got {line!r}")
                key, value = (part.strip() for part in line.split("=", 1))
                if key.startswith("quality."):
                    config.quality_map[key[len("quality.") :]] = int(value)
                elif key == "high_res_threshold":
                    config.high_res_threshold = int(value)
                elif key == "link_radius_km":
                    config.link_radius_km = float(value)
                elif key == "jobs":
                    config.jobs = int(value)
                elif key == "block_size_cap":
                    config.block_size_cap = int(value) if value.lower() != "none" else None
                elif key == "debug_dumps":
                    config.debug_dumps = value.lower() in ("1", "true", "yes")
                elif key in (
                    "cache_path",
                    "assignee_stopwords",
                    "inventor_stopwords",
                    "common_words",
                    "place_names",
                ):
                    setattr(config, key, value or None)
                else:
                    raise InputError(f"config line {lineno}: unknown key {key!r}")
        config.validate()
        return config


@dataclass
class PipelineResult:
    assignments: dict[str, EntityId]
    names: dict[str, NormalizedName]
    stage3_ids: dict[str, str]
    summary: dict[str, int]
    coverage: list[tuple[str, str, int, int, int, int]]
    blocks: list[blocking.Block] = field(default_factory=list)
    candidates: list[MobileCandidate] = field(default_factory=list)
    merged_pairs: set[tuple[str, str]] = field(default_factory=set)
    resolutions: dict[str, str] = field(default_factory=dict)


def build_lexicon(config: PipelineConfig, inventor_names) -> Lexicon:
    manual = (
        load_wordlist(config.common_words)
        if config.common_words
        else default_manual_common()
    )
    places = (
        load_wordlist(config.place_names) if config.place_names else default_place_names()
    )
    return Lexicon.build(manual, places, extract_person_tokens(inventor_names))


def normalize_mentions(mentions: list[Mention], config: PipelineConfig) -> dict[str, NormalizedName]:
    assignee_stop = (
        load_wordlist(config.assignee_stopwords)
        if config.assignee_stopwords
        else default_assignee_stopwords()
    )
    inventor_stop = (
        load_wordlist(config.inventor_stopwords)
        if config.inventor_stopwords
        else default_inventor_stopwords()
    )
    return {
        m.mention_id: normalize(
            m.raw_name,
            m.role,
            assignee_stopwords=assignee_stop,
            inventor_stopwords=inventor_stop,
        )
        for m in mentions
    }


def _mention_max_quality(record: GeocodeRecord | None) -> int:
    if record is None or not record.points:
        return -1
    return max(p.quality for p in record.points)


def disambiguate(
    mentions: list[Mention],
    geocodes: dict[str, GeocodeRecord] | Geocoder,
    config: PipelineConfig | None = None,
    contexts: dict[str, PatentContext] | None = None,
    lexicon: Lexicon | None = None,
) -> PipelineResult:
    """Run stages 2-4 over already-geocoded mentions.

    ``geocodes`` is either a Geocoder (queried and cached on the fly) or a
    plain mapping of normalized address keys to records.
    """
    config = config or PipelineConfig()
    config.validate()
    contexts = dict(contexts) if contexts else {}

    if isinstance(geocodes, Geocoder):
        geocodes = geocodes.geocode_all(m.raw_address for m in mentions)

    names = normalize_mentions(mentions, config)
    if lexicon is None:
        lexicon = build_lexicon(
            config, (names[m.mention_id] for m in mentions if m.role == ROLE_INVENTOR)
        )

    state = UnionFind()
    summary: dict[str, int] = {}
    summary["mentions"] = len(mentions)
    summary["mentions_assignee"] = sum(1 for m in mentions if m.role == ROLE_ASSIGNEE)
    summary["mentions_inventor"] = sum(1 for m in mentions if m.role == ROLE_INVENTOR)
    unique_addresses = {address_key(m.raw_address) for m in mentions}
    summary["unique_addresses"] = len(unique_addresses)
    summary["resolved_addresses"] = sum(
        1 for a in unique_addresses if (r := geocodes.get(a)) is not None and r.resolved
    )

    # Stage 2: same-point flexible matching.
    blocks = blocking.build_blocks(mentions, geocodes, names, config.high_res_threshold)
    for block in blocks:
        for key in block.members:
            state.add(key)
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            per_block = list(
                pool.map(
                    lambda b: blocking.block_link_pairs(b, lexicon, config.block_size_cap),
                    blocks,
                )
            )
    else:
        per_block = [
            blocking.block_link_pairs(b, lexicon, config.block_size_cap) for b in blocks
        ]
    for pairs in per_block:
        for a, b in pairs:
            state.union(a, b)
    blocked_nodes = [key for block in blocks for key in block.members]
    summary["high_res_blocks"] = len(blocks)
    summary["high_res_name_points"] = len(blocked_nodes)
    summary["stage2_clusters"] = len({state.find(k) for k in blocked_nodes})

    # Stage 3: exact names across nearby points (any quality).
    sites: dict[tuple[str, str], NameSite] = {}
    mention_nodes: dict[str, list] = {}
    mention_quality: dict[str, int] = {}
    singletons = 0
    for mention in mentions:
        name = names[mention.mention_id]
        record = geocodes.get(address_key(mention.raw_address))
        mention_quality[mention.mention_id] = _mention_max_quality(record)
        points = best_points(record) if record is not None else []
        if name.degenerate or not points:
            key = blocking.singleton_node_key(mention)
            state.add(key)
            mention_nodes[mention.mention_id] = [key]
            singletons += 1
            continue
        site = sites.setdefault(
            (mention.role, name.key), NameSite(role=mention.role, name_key=name.key)
        )
        rounded = sorted({p.rounded for p in points})
        site.points.extend(rounded)
        if len(rounded) > 1:
            site.mention_point_groups.append(rounded)
        mention_nodes[mention.mention_id] = [site.node(p) for p in rounded]
    summary["name_point_nodes"] = sum(len(set(s.points)) for s in sites.values())
    summary["singleton_mentions"] = singletons
    link_same_name(list(sites.values()), state, config.link_radius_km)

    # Stage 3 output: local entity ids.
    clusters: dict[object, list[Mention]] = {}
    for mention in mentions:
        nodes = mention_nodes[mention.mention_id]
        roots = {state.find(node) for node in nodes}
        if len(roots) != 1:
            raise InvariantError(
                f"mention {mention.mention_id} spans {len(roots)} clusters after linking"
            )
        clusters.setdefault(roots.pop(), []).append(mention)
    stage3: dict[str, list[Mention]] = {}
    for members in clusters.values():
        value = entity_id_value([m.mention_id for m in members])
        stage3[value] = members
    stage3_ids = {m.mention_id: value for value, members in stage3.items() for m in members}
    summary["stage3_assignee_ids"] = sum(
        1 for members in stage3.values() if members[0].role == ROLE_ASSIGNEE
    )
    summary["stage3_inventor_ids"] = sum(
        1 for members in stage3.values() if members[0].role == ROLE_INVENTOR
    )

    # Stage 4: merge distant same-name inventors on corroborating signals.
    for patent_id in {m.patent_id for m in mentions}:
        contexts.setdefault(patent_id, PatentContext(patent_id=patent_id))
    for value, members in stage3.items():
        for mention in members:
            ctx = contexts[mention.patent_id]
            if mention.role == ROLE_ASSIGNEE:
                ctx.assignee_entity_ids.add(value)
            else:
                ctx.coinventor_entity_ids.add(value)
    sketches = []
    for value, members in sorted(stage3.items()):
        if members[0].role != ROLE_INVENTOR:
            continue
        name_keys = frozenset(
            names[m.mention_id].key for m in members if not names[m.mention_id].degenerate
        )
        sketches.append(
            EntitySketch(
                entity_id=value,
                name_keys=name_keys,
                patent_ids=frozenset(m.patent_id for m in members),
            )
        )
    candidates = find_candidates(sketches, contexts)
    merge_state = UnionFind(stage3.keys())
    merged_count = merge_mobile(candidates, merge_state)
    merged_pairs = {
        (c.id_a, c.id_b) for c in candidates if merge_state.connected(c.id_a, c.id_b)
    }
    summary["mobile_candidates"] = len(candidates)
    summary["mobile_merges"] = merged_count

    # Final ids: content-addressed over the merged member sets.
    final_groups: dict[str, list[Mention]] = {}
    for value, members in stage3.items():
        final_groups.setdefault(merge_state.find(value), []).extend(members)
    assignments: dict[str, EntityId] = {}
    resolutions: dict[str, str] = {}
    final_roles: dict[str, str] = {}
    for members in final_groups.values():
        member_ids = [m.mention_id for m in members]
        value = entity_id_value(member_ids)
        high = any(
            mention_quality[mid] >= config.high_res_threshold for mid in member_ids
        )
        entity = EntityId(
            value=value, resolution=RESOLUTION_HIGH if high else RESOLUTION_LOW
        )
        resolutions[value] = entity.resolution
        final_roles[value] = members[0].role
        for mid in member_ids:
            if mid in assignments:
                raise InvariantError(f"mention {mid} assigned twice")
            assignments[mid] = entity
    if len(assignments) != len(mentions):
        raise InvariantError(
            f"{len(mentions)} mentions but {len(assignments)} assignments"
        )
    summary["final_assignee_ids"] = sum(
        1 for v, r in final_roles.items() if r == ROLE_ASSIGNEE
    )
    summary["final_inventor_ids"] = sum(
        1 for v, r in final_roles.items() if r == ROLE_INVENTOR
    )
    summary["final_assignee_ids_high_res"] = sum(
        1
        for v, r in final_roles.items()
        if r == ROLE_ASSIGNEE and resolutions[v] == RESOLUTION_HIGH
    )
    summary["final_inventor_ids_high_res"] = sum(
        1
        for v, r in final_roles.items()
        if r == ROLE_INVENTOR and resolutions[v] == RESOLUTION_HIGH
    )
    total_nodes = summary["name_point_nodes"] + summary["singleton_mentions"]
    if summary["stage3_assignee_ids"] + summary["stage3_inventor_ids"] > total_nodes:
        raise InvariantError("cluster count exceeded node count")
    if (
        summary["final_inventor_ids"] > summary["stage3_inventor_ids"]
        or summary["final_assignee_ids"] != summary["stage3_assignee_ids"]
    ):
        raise InvariantError("mobile merging changed id counts the wrong way")

    coverage = _coverage_table(mentions, assignments)
    summary["patents"] = len({m.patent_id for m in mentions})
    return PipelineResult(
        assignments=assignments,
        names=names,
        stage3_ids=stage3_ids,
        summary=summary,
        coverage=coverage,
        blocks=blocks,
        candidates=candidates,
        merged_pairs=merged_pairs,
        resolutions=resolutions,
    )


def _coverage_table(
    mentions: list[Mention], assignments: dict[str, EntityId]
) -> list[tuple[str, str, int, int, int, int]]:
    """Per (office, role): patents with mentions, with addresses, with at
    least one high-res entity, and with every mention high-res."""
    per: dict[tuple[str, str], dict[str, list[Mention]]] = {}
    for m in mentions:
        per.setdefault((m.office, m.role), {}).setdefault(m.patent_id, []).append(m)
    rows = []
    for (office, role), patents in sorted(per.items()):
        with_role = len(patents)
        with_addr = sum(
            1 for ms in patents.values() if any(m.raw_address for m in ms)
        )
        any_high = sum(
            1
            for ms in patents.values()
            if any(assignments[m.mention_id].resolution == RESOLUTION_HIGH for m in ms)
        )
        all_high = sum(
            1
            for ms in patents.values()
            if all(assignments[m.mention_id].resolution == RESOLUTION_HIGH for m in ms)
        )
        rows.append((office, role, with_role, with_addr, any_high, all_high))
    return rows


def render_summary(result: PipelineResult) -> str:
    lines = ["disambiguation summary", "----------------------"]
    for key, value in result.summary.items():
        lines.append(f"{key:32s} {value}")
    lines.append("")
    lines.append("coverage (office, role): patents / with addresses / >=1 high-res / all high-res")
    for office, role, with_role, with_addr, any_high, all_high in result.coverage:
        pct = (100.0 * all_high / with_role) if with_role else 0.0
        lines.append(
            f"{office:6s} {role:9s} {with_role:8d} {with_addr:8d} {any_high:8d} {all_high:8d}"
            f"  ({pct:.0f}%)"
        )
    return "\n".join(lines) + "\n"
