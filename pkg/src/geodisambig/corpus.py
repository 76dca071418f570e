"""Domain records and flat-file I/O.

A mention is one (patent, role, name, address) occurrence; the pipeline
partitions mentions into entities.  Mention keys are derived from content
(patent id, role, position) so reruns produce identical identifiers, and
entity ids are content-addressed hashes of their sorted member keys.
"""

from __future__ import annotations

import csv
import hashlib
import logging
from dataclasses import dataclass, field

from .errors import InputError
from .textnorm import ROLE_ASSIGNEE, ROLE_INVENTOR

log = logging.getLogger(__name__)

OFFICES = ("EPO", "PCT", "USPTO", "OTHER")

RESOLUTION_HIGH = "high"
RESOLUTION_LOW = "low"

MENTION_COLUMNS = ("patent_id", "office", "role", "position", "name", "address")
ENTITY_MAP_COLUMNS = ("patent_id", "role", "position", "mention_id", "entity_id", "resolution")


def mention_key(patent_id: str, role: str, position: int) -> str:
    return f"{patent_id}:{role}:{position}"


@dataclass(frozen=True)
class Mention:
    mention_id: str
    patent_id: str
    office: str
    role: str
    raw_name: str
    raw_address: str
    position: int


@dataclass
class PatentContext:
    patent_id: str
    family_id: str | None = None
    cited_patents: frozenset[str] = frozenset()
    # Filled by the pipeline after the assignee and local inventor passes.
    assignee_entity_ids: set[str] = field(default_factory=set)
    coinventor_entity_ids: set[str] = field(default_factory=set)


@dataclass(frozen=True)
class EntityId:
    value: str
    resolution: str  # RESOLUTION_HIGH or RESOLUTION_LOW


def entity_id_value(member_mention_ids) -> str:
    digest = hashlib.sha1("\x1f".join(sorted(member_mention_ids)).encode("utf-8"))
    return digest.hexdigest()[:16]


@dataclass
class LoadReport:
    rows: int = 0
    skipped_empty_name: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)

    @property
    def skipped(self) -> int:
        return self.skipped_empty_name + len(self.errors)


def _parse_role(raw: str) -> str | None:
    lowered = raw.strip().lower()
    if lowered in (ROLE_INVENTOR, ROLE_ASSIGNEE):
        return lowered
    return None


def _parse_office(raw: str) -> str:
    upper = raw.strip().upper()
    return upper if upper in OFFICES else "OTHER"


def load_mentions(path, format: str = "tsv") -> tuple[list[Mention], LoadReport]:
    """Read a mentions file; malformed rows are reported and skipped.

    Columns: patent_id, office, role, position, name, address.  Rows with
    an empty name are counted separately from malformed ones; file order
    is preserved in the returned list.
    """
    if format not in ("tsv", "csv"):
        raise InputError(f"unknown mentions format: {format!r}")
    delimiter = "\t" if format == "tsv" else ","
    mentions: list[Mention] = []
    report = LoadReport()
    seen: set[str] = set()
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot read mentions file {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh, delimiter=delimiter)
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if row[0].lstrip().startswith("#"):
                continue
            report.rows += 1
            if len(row) < 6:
                report.errors.append((lineno, f"expected 6 columns, got {len(row)}"))
                continue
            patent_id = row[0].strip()
            role = _parse_role(row[2])
            if not patent_id or role is None:
                report.errors.append((lineno, f"bad patent_id or role: {row[:3]}"))
                continue
            try:
                position = int(row[3])
            except ValueError:
                report.errors.append((lineno, f"position not an integer: {row[3]!r}"))
                continue
            name = row[4].strip()
            if not name:
                report.skipped_empty_name += 1
                continue
            key = mention_key(patent_id, role, position)
            if key in seen:
                report.errors.append((lineno, f"duplicate mention key {key}"))
                continue
            seen.add(key)
            mentions.append(
                Mention(
                    mention_id=key,
                    patent_id=patent_id,
                    office=_parse_office(row[1]),
                    role=role,
                    raw_name=name,
                    raw_address=row[5].strip(),
                    position=position,
                )
            )
    if report.skipped_empty_name:
        log.warning("skipped %d rows with empty names", report.skipped_empty_name)
    for lineno, message in report.errors:
        log.warning("line %d: %s", lineno, message)
    return mentions, report


def load_contexts(path) -> dict[str, PatentContext]:
    """Read the per-patent context file: patent_id, family_id, citations.

    Citations are ';'-separated; self-citations are dropped.  A repeated
    patent_id keeps the last row and logs a warning.
    """
    contexts: dict[str, PatentContext] = {}
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot read context file {path}: {exc}") from exc
    with fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not row or row[0].lstrip().startswith("#") or not row[0].strip():
                continue
            patent_id = row[0].strip()
            family = row[1].strip() if len(row) > 1 else ""
            cites_raw = row[2].strip() if len(row) > 2 else ""
            cites = frozenset(
                c.strip() for c in cites_raw.split(";") if c.strip() and c.strip() != patent_id
            )
            if patent_id in contexts:
                log.warning("line %d: duplicate context for %s, keeping last", lineno, patent_id)
            contexts[patent_id] = PatentContext(
                patent_id=patent_id,
                family_id=family or None,
                cited_patents=cites,
            )
    return contexts


def parse_mention_key(key: str) -> tuple[str, str, int]:
    patent_id, role, position = key.rsplit(":", 2)
    return patent_id, role, int(position)


def write_entity_map(assignments: dict[str, EntityId], path) -> None:
    """Write the final mention -> entity assignment, sorted and stable.

    Rows are ordered by (patent_id, role, position) so identical inputs
    always produce byte-identical files.
    """
    rows = []
    for key, entity in assignments.items():
        patent_id, role, position = parse_mention_key(key)
        rows.append((patent_id, role, position, key, entity.value, entity.resolution))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\t".join(ENTITY_MAP_COLUMNS) + "\n")
            for row in rows:
                fh.write("\t".join(str(v) for v in row) + "\n")
    except OSError as exc:
        raise InputError(f"cannot write entity map {path}: {exc}") from exc


def read_entity_map(path) -> dict[str, EntityId]:
    """Inverse of write_entity_map (used by the evaluation CLI)."""
    assignments: dict[str, EntityId] = {}
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot read entity map {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if header is not None and tuple(header) != ENTITY_MAP_COLUMNS:
            raise InputError(f"unexpected entity map header in {path}: {header}")
        for row in reader:
            if len(row) != len(ENTITY_MAP_COLUMNS):
                raise InputError(f"bad entity map row: {row}")
            assignments[row[3]] = EntityId(value=row[4], resolution=row[5])
    return assignments


def validate_mentions(mentions) -> None:
    """Cheap sanity checks used by the estimator before fitting."""
    seen: set[str] = set()
    for m in mentions:
        if not isinstance(m, Mention):
            raise ValueError(f"expected Mention, got {type(m).__name__}")
        if m.role not in (ROLE_INVENTOR, ROLE_ASSIGNEE):
            raise ValueError(f"unknown role {m.role!r} on {m.mention_id}")
        if m.mention_id in seen:
            raise ValueError(f"duplicate mention_id {m.mention_id}")
        seen.add(m.mention_id)
