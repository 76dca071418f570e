"""Stage 3: link exact name matches across points within the link radius.

Works on the same cluster state as blocking, so pulling a point into a
name's neighborhood automatically drags along every alternate spelling
clustered at that point during stage 2.  Linking is transitive: a chain of
sub-radius hops merges endpoints that are themselves farther apart.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .blocking import NodeKey
from .geo import EARTH_RADIUS_KM, haversine_km
from .unionfind import UnionFind

log = logging.getLogger(__name__)

LINK_RADIUS_KM = 20.0

# Above this many points per name, pairs are pre-filtered by a latitude
# band; the meridional distance lower-bounds the great-circle distance, so
# the filter is result-identical to the full quadratic scan.
BAND_SORT_MIN_POINTS = 10_000

_KM_PER_DEG_LAT = 2.0 * 3.141592653589793 * EARTH_RADIUS_KM / 360.0


@dataclass
class NameSite:
    """All points (any quality) where one exact name occurs."""

    role: str
    name_key: str
    points: list[tuple[float, float]] = field(default_factory=list)
    # Node groups that must merge regardless of distance: the same-quality
    # multi-point responses of a single mention's address.
    mention_point_groups: list[list[tuple[float, float]]] = field(default_factory=list)

    def node(self, point: tuple[float, float]) -> NodeKey:
        return (self.role, self.name_key, point)


def _close_pairs(points: list[tuple[float, float]], radius_km: float) -> list[tuple[int, int]]:
    n = len(points)
    if n < 2:
        return []
    if n <= BAND_SORT_MIN_POINTS:
        return [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if haversine_km(points[i], points[j]) < radius_km
        ]
    band = radius_km / _KM_PER_DEG_LAT
    order = sorted(range(n), key=lambda idx: points[idx][0])
    out = []
    for a in range(n):
        i = order[a]
        for b in range(a + 1, n):
            j = order[b]
            if points[j][0] - points[i][0] > band:
                break
            if haversine_km(points[i], points[j]) < radius_km:
                out.append((min(i, j), max(i, j)))
    out.sort()
    return out


def link_same_name(sites: list[NameSite], state: UnionFind, radius_km: float = LINK_RADIUS_KM) -> None:
    """Union same-name points: per-mention multi-point ties first, then
    every pair separated by less than the link radius (strict)."""
    for site in sorted(sites, key=lambda s: (s.role, s.name_key)):
        points = sorted(set(site.points))
        for point in points:
            state.add(site.node(point))
        for group in site.mention_point_groups:
            ordered = sorted(set(group))
            for point in ordered[1:]:
                state.union(site.node(ordered[0]), site.node(point))
        for i, j in _close_pairs(points, radius_km):
            state.union(site.node(points[i]), site.node(points[j]))
