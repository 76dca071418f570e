"""Pluggable geocoding with a persistent, append-only cache.

Providers answer one address string with a list of (lat, lon, quality)
candidates; quality codes are mapped onto a 0-100 tier scale.  Every
response (including resolved-but-empty ones) is persisted, so a rerun
never re-queries an address; provider failures are returned with an error
status and are NOT cached, keeping them retryable.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol

from .errors import InputError
from .geo import GeoPoint

log = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_EMPTY = "empty"
STATUS_ERROR = "error"

# Tier scale for providers that report named precision levels.
DEFAULT_QUALITY_MAP: dict[str, int] = {
    "point": 87,
    "rooftop": 87,
    "street": 72,
    "line": 72,
    "zip": 60,
    "city": 40,
    "state": 30,
    "country": 10,
}

_MISS = "-"


class ProviderError(Exception):
    """Transient provider failure (timeout, HTTP error)."""


class QuotaExceeded(ProviderError):
    """Provider asked us to slow down."""


class GeocodeProvider(Protocol):
    name: str

    def lookup(self, address: str) -> list[tuple[float, float, int | str]]: ...


def address_key(address: str) -> str:
    """Cache key: case- and whitespace-normalized address string."""
    return " ".join(address.split()).lower()


def resolve_quality(code: int | str, quality_map: dict[str, int] | None = None) -> int:
    if isinstance(code, int):
        return code
    text = str(code).strip().lower()
    if text.lstrip("-").isdigit():
        return int(text)
    mapping = quality_map if quality_map is not None else DEFAULT_QUALITY_MAP
    if text in mapping:
        return mapping[text]
    raise InputError(f"unknown geocoder quality code: {code!r}")


@dataclass(frozen=True)
class GeocodeRecord:
    address_key: str
    points: tuple[GeoPoint, ...]
    provider: str
    status: str = STATUS_OK
    fetched_at: float | None = field(default=None, compare=False)

    @property
    def resolved(self) -> bool:
        return bool(self.points)


def best_points(record: GeocodeRecord) -> list[GeoPoint]:
    """Keep only the points sharing the record's maximum quality."""
    if not record.points:
        return []
    top = max(p.quality for p in record.points)
    return [p for p in record.points if p.quality == top]


class FixtureProvider:
    """Deterministic provider backed by a TSV of canned responses.

    Rows: address <tab> lat <tab> lon <tab> quality (several rows per
    address yield several points).  Used for tests and synthetic runs.
    """

    name = "fixture"

    def __init__(self, source) -> None:
        self.calls = 0
        self._table: dict[str, list[tuple[float, float, int]]] = {}
        if isinstance(source, dict):
            for addr, points in source.items():
                self._table[address_key(addr)] = [
                    (float(lat), float(lon), resolve_quality(q)) for lat, lon, q in points
                ]
        else:
            with open(source, encoding="utf-8", newline="") as fh:
                for row in csv.reader(fh, delimiter="\t"):
                    if not row or row[0].lstrip().startswith("#"):
                        continue
                    if len(row) != 4:
                        raise InputError(f"bad fixture row: {row}")
                    key = address_key(row[0])
                    self._table.setdefault(key, []).append(
                        (float(row[1]), float(row[2]), resolve_quality(row[3]))
                    )

    def lookup(self, address: str) -> list[tuple[float, float, int]]:
        self.calls += 1
        return list(self._table.get(address_key(address), []))


class GeocodeCache:
    """Append-only line cache: `address | provider | quality | lat | lon`.

    One line per point, written contiguously per record; an empty result is
    a single sentinel line.  Appending (never rewriting) makes a crashed
    multi-day run resumable from exactly where it stopped.
    """

    def __init__(self, path=None) -> None:
        self.path = path
        self._records: dict[str, GeocodeRecord] = {}
        self._fh = None
        if path is not None:
            self._load()
            self._fh = open(path, "a", encoding="utf-8")

    def _load(self) -> None:
        try:
            fh = open(self.path, encoding="utf-8")
        except FileNotFoundError:
            return
        except OSError as exc:
            raise InputError(f"cannot read geocode cache {self.path}: {exc}") from exc
        pending_key = None
        pending_provider = ""
        pending_points: list[GeoPoint] = []

        def commit():
            if pending_key is None:
                return
            status = STATUS_OK if pending_points else STATUS_EMPTY
            self._records[pending_key] = GeocodeRecord(
                address_key=pending_key,
                points=tuple(pending_points),
                provider=pending_provider,
                status=status,
            )

        with fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    key, provider, quality, lat, lon = line.rsplit(" | ", 4)
                except ValueError:
                    log.warning("skipping malformed cache line: %r", line)
                    continue
                if key != pending_key:
                    commit()
                    pending_key, pending_provider, pending_points = key, provider, []
                if quality != _MISS:
                    pending_points.append(
                        GeoPoint(lat=float(lat), lon=float(lon), quality=int(quality))
                    )
            commit()

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, key: str) -> bool:
        return key in self._records

    def get(self, key: str) -> GeocodeRecord | None:
        return self._records.get(key)

    def put(self, record: GeocodeRecord) -> None:
        self._records[record.address_key] = record
        if self._fh is None:
            return
        lines = []
        if record.points:
            for p in record.points:
                lines.append(
                    f"{record.address_key} | {record.provider} | {p.quality}"
                    f" | {p.lat:.6f} | {p.lon:.6f}\n"
                )
        else:
            lines.append(f"{record.address_key} | {record.provider} | {_MISS} | {_MISS} | {_MISS}\n")
        self._fh.write("".join(lines))
        self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "GeocodeCache":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class Geocoder:
    """Cache-first geocoding front end with optional rate limiting."""

    def __init__(
        self,
        provider: GeocodeProvider | None = None,
        cache: GeocodeCache | None = None,
        quality_map: dict[str, int] | None = None,
        min_interval: float = 0.0,
        max_retries: int = 3,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.provider = provider
        self.cache = cache if cache is not None else GeocodeCache()
        self.quality_map = dict(quality_map) if quality_map else dict(DEFAULT_QUALITY_MAP)
        self.min_interval = min_interval
        self.max_retries = max_retries
        self._sleep = sleep
        self._last_call = 0.0

    def _throttle(self) -> None:
        if self.min_interval <= 0:
            return
        wait = self._last_call + self.min_interval - time.monotonic()
        if wait > 0:
            self._sleep(wait)
        self._last_call = time.monotonic()

    def geocode(self, address: str) -> GeocodeRecord:
        key = address_key(address)
        cached = self.cache.get(key)
        if cached is not None:
            return cached
        if not key or self.provider is None:
            record = GeocodeRecord(address_key=key, points=(), provider="none", status=STATUS_EMPTY)
            self.cache.put(record)
            return record
        attempt = 0
        while True:
            try:
                self._throttle()
                raw = self.provider.lookup(address)
                break
            except QuotaExceeded:
                attempt += 1
                if attempt > self.max_retries:
                    return GeocodeRecord(
                        address_key=key, points=(), provider=self.provider.name,
                        status=STATUS_ERROR, fetched_at=time.time(),
                    )
                # Exponential pause, then retry; quota errors are never cached.
                self._sleep(min(60.0, 2.0 ** attempt))
            except ProviderError as exc:
                log.warning("geocode failure for %r: %s", address, exc)
                return GeocodeRecord(
                    address_key=key, points=(), provider=self.provider.name,
                    status=STATUS_ERROR, fetched_at=time.time(),
                )
        points = []
        for lat, lon, code in raw:
            try:
                # Round at ingestion so the canonical 6-decimal convention
                # holds everywhere, including across a cache round-trip.
                points.append(
                    GeoPoint(
                        lat=round(float(lat), 6),
                        lon=round(float(lon), 6),
                        quality=resolve_quality(code, self.quality_map),
                    )
                )
            except (ValueError, InputError) as exc:
                log.warning("dropping bad geocode point for %r: %s", address, exc)
        record = GeocodeRecord(
            address_key=key,
            points=tuple(points),
            provider=self.provider.name,
            status=STATUS_OK if points else STATUS_EMPTY,
            fetched_at=time.time(),
        )
        self.cache.put(record)
        return record

    def geocode_all(self, addresses: Iterable[str]) -> dict[str, GeocodeRecord]:
        """Geocode unique addresses in sorted order (deterministic cache)."""
        out: dict[str, GeocodeRecord] = {}
        for address in sorted({address_key(a) for a in addresses}):
            out[address] = self.geocode(address)
        return out
