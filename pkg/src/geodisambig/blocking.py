"""Stage 2: group mentions by identical high-resolution point and match.

Cluster nodes are (role, name key, rounded point) triples, so this stage
can never fuse occurrences at two different points; cross-point linking
belongs to later stages.  Mentions sharing a normalized name at a point
collapse onto one node before any pairwise comparison.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .assignee_match import assignees_match
from .corpus import Mention
from .geo import GeoPoint, HIGH_RES_THRESHOLD
from .geocode import GeocodeRecord, address_key, best_points
from .inventor_match import inventors_match, prune_links
from .lexicon import Lexicon
from .textnorm import ROLE_ASSIGNEE, ROLE_INVENTOR, NormalizedName

log = logging.getLogger(__name__)

# Node key for a name occurrence at a point: (role, name key, (lat, lon)).
NodeKey = tuple[str, str, tuple[float, float]]

# Fallback comparison window once a block exceeds the configured size cap.
NEIGHBORHOOD_WINDOW = 10


def mention_node_key(role: str, name: NormalizedName, point: GeoPoint) -> NodeKey:
    return (role, name.key, point.rounded)


def singleton_node_key(mention: Mention) -> tuple[str, str]:
    return ("mention", mention.mention_id)


@dataclass
class Block:
    role: str
    point: tuple[float, float]
    quality: int
    # Unique names at this point, keyed by node key.
    members: dict[NodeKey, NormalizedName] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.members)


def build_blocks(
    mentions: list[Mention],
    geocodes: dict[str, GeocodeRecord],
    names: dict[str, NormalizedName],
    threshold: int = HIGH_RES_THRESHOLD,
) -> list[Block]:
    """One block per (role, high-res point); sorted for determinism.

    A mention joins the block of each of its maximum-quality points when
    that quality clears the threshold; mentions whose best points fall
    below it appear in no block.
    """
    blocks: dict[tuple[str, tuple[float, float]], Block] = {}
    for mention in mentions:
        name = names[mention.mention_id]
        if name.degenerate:
            continue
        record = geocodes.get(address_key(mention.raw_address))
        if record is None:
            continue
        for point in best_points(record):
            if point.quality < threshold:
                continue
            key = (mention.role, point.rounded)
            block = blocks.get(key)
            if block is None:
                block = Block(role=mention.role, point=point.rounded, quality=point.quality)
                blocks[key] = block
            block.members.setdefault(mention_node_key(mention.role, name, point), name)
    return [blocks[k] for k in sorted(blocks)]


def block_link_pairs(
    block: Block,
    lexicon: Lexicon,
    size_cap: int | None = None,
    window: int = NEIGHBORHOOD_WINDOW,
) -> list[tuple[NodeKey, NodeKey]]:
    """Pairs of node keys to union for one block.

    All pairs are compared by default; blocks larger than size_cap fall
    back to a sorted-neighborhood scan over a fixed window.
    """
    members = sorted(block.members.items())
    if size_cap is not None and len(members) > size_cap:
        log.warning(
            "block %s/%s has %d names, using sorted-neighborhood window %d",
            block.role, block.point, len(members), window,
        )
        pairs = [
            (i, j)
            for i in range(len(members))
            for j in range(i + 1, min(i + 1 + window, len(members)))
        ]
    else:
        pairs = [(i, j) for i in range(len(members)) for j in range(i + 1, len(members))]

    if block.role == ROLE_ASSIGNEE:
        out = []
        for i, j in pairs:
            key_i, name_i = members[i]
            key_j, name_j = members[j]
            if assignees_match(name_i, name_j, lexicon):
                out.append((key_i, key_j))
        return out

    if block.role == ROLE_INVENTOR:
        # Match words exclude any care-of suffix at this location; pruning
        # statistics aggregate over exactly the pairs enumerated here.
        links = []
        for i, j in pairs:
            key_i, name_i = members[i]
            key_j, name_j = members[j]
            evidence = inventors_match(name_i, name_j)
            if evidence is not None:
                links.append(((key_i, key_j), evidence))
        return prune_links(links)

    raise ValueError(f"unknown block role: {block.role}")


def cluster_block(block: Block, lexicon: Lexicon, state, size_cap: int | None = None) -> None:
    """Union all matched pairs of one block into the shared cluster state."""
    for key in block.members:
        state.add(key)
    for a, b in block_link_pairs(block, lexicon, size_cap=size_cap):
        state.union(a, b)
