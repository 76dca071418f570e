"""Geographic primitives: quality-tiered points and great-circle distance."""

from __future__ import annotations

from dataclasses import dataclass
from math import asin, cos, radians, sin, sqrt

EARTH_RADIUS_KM = 6371.0

# Quality at or above this tier means street-line resolution or better.
HIGH_RES_THRESHOLD = 70

# Coordinates are compared after rounding to 6 decimal places (~0.1 m);
# blocking requires one fixed equality convention.
COORD_DECIMALS = 6


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float
    quality: int

    def __post_init__(self) -> None:
        if not (-90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0):
            raise ValueError(f"coordinates out of range: ({self.lat}, {self.lon})")
        if not (0 <= self.quality <= 100):
            raise ValueError(f"quality out of range: {self.quality}")

    @property
    def rounded(self) -> tuple[float, float]:
        return (round(self.lat, COORD_DECIMALS), round(self.lon, COORD_DECIMALS))

    def is_high_res(self, threshold: int = HIGH_RES_THRESHOLD) -> bool:
        return self.quality >= threshold


def haversine_km(
    p1: GeoPoint | tuple[float, float], p2: GeoPoint | tuple[float, float]
) -> float:
    """Great-circle distance in km on a sphere of radius 6371 km."""
    lat1, lon1 = (p1.lat, p1.lon) if isinstance(p1, GeoPoint) else p1
    lat2, lon2 = (p2.lat, p2.lon) if isinstance(p2, GeoPoint) else p2
    phi1, phi2 = radians(lat1), radians(lat2)
    dphi = radians(lat2 - lat1)
    dlam = radians(lon2 - lon1)
    a = sin(dphi / 2.0) ** 2 + cos(phi1) * cos(phi2) * sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * asin(sqrt(a))
