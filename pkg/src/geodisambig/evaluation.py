"""Clustering agreement metrics between a trial and a benchmark.

Pairwise precision/recall compares, for every unordered pair of patents,
how many entity ids the pair shares under each disambiguation (multiset
intersection): the pair contributes min(I_b, I_t) true positives,
max(0, I_b - I_t) false negatives, and max(0, I_t - I_b) false positives.
Splitting/lumping matches each benchmark entity to its best-overlapping
trial entity and counts benchmark patents missing from, or foreign patents
added to, that trial cluster, normalized by total benchmark patents.
"""

from __future__ import annotations

import csv
import logging
import string
from collections import Counter
from dataclasses import dataclass, field

from .errors import InputError
from .textnorm import ROLE_ASSIGNEE, ROLE_INVENTOR

log = logging.getLogger(__name__)


@dataclass
class DisambiguationMap:
    """Per-patent entity id multisets for one role, with optional names.

    ``names_by_patent`` (parallel to ``ids_by_patent``) carries the
    normalized mention names and is only needed for benchmark alignment.
    """

    role: str
    ids_by_patent: dict[str, list[str]]
    names_by_patent: dict[str, list[str]] | None = None

    def patents(self) -> set[str]:
        return set(self.ids_by_patent)


@dataclass(frozen=True)
class PairwiseCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0


@dataclass
class EvalReport:
    precision: float = 1.0
    recall: float = 1.0
    precision_defined: bool = True
    recall_defined: bool = True
    counts: PairwiseCounts = field(default_factory=PairwiseCounts)
    splitting: float | None = None
    lumping: float | None = None
    split_lump_details: dict[str, tuple[str | None, int, int]] = field(default_factory=dict)
    n_patents: int = 0
    notes: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [
            f"patents evaluated ....... {self.n_patents}",
            f"pair true positives ..... {self.counts.tp}",
            f"pair false positives .... {self.counts.fp}",
            f"pair false negatives .... {self.counts.fn}",
            f"precision ............... {self.precision:.6f}"
            + ("" if self.precision_defined else "  (undefined: no positive pairs)"),
            f"recall .................. {self.recall:.6f}"
            + ("" if self.recall_defined else "  (undefined: no matchable pairs)"),
        ]
        if self.splitting is not None:
            out.append(f"splitting ............... {self.splitting:.6f}")
        if self.lumping is not None:
            out.append(f"lumping ................. {self.lumping:.6f}")
        for note in self.notes:
            out.append(f"note: {note}")
        return out

    def machine_block(self) -> list[str]:
        out = [
            f"n_patents={self.n_patents}",
            f"tp={self.counts.tp}",
            f"fp={self.counts.fp}",
            f"fn={self.counts.fn}",
            f"precision={self.precision:.6f}",
            f"recall={self.recall:.6f}",
            f"precision_defined={int(self.precision_defined)}",
            f"recall_defined={int(self.recall_defined)}",
        ]
        if self.splitting is not None:
            out.append(f"splitting={self.splitting:.6f}")
        if self.lumping is not None:
            out.append(f"lumping={self.lumping:.6f}")
        return out


def _pair_counts(ids_a_bench: Counter, ids_b_bench: Counter, ids_a_trial: Counter, ids_b_trial: Counter) -> tuple[int, int, int]:
    i_b = sum((ids_a_bench & ids_b_bench).values())
    i_t = sum((ids_a_trial & ids_b_trial).values())
    return min(i_b, i_t), max(0, i_t - i_b), max(0, i_b - i_t)


def pairwise_pr(
    bench: DisambiguationMap, trial: DisambiguationMap
) -> tuple[float, float, PairwiseCounts]:
    """Pairwise precision and recall of ``trial`` against ``bench``.

    Each unordered patent pair is counted once; only pairs sharing an id in
    at least one of the two maps can contribute, so the sum is restricted
    to those without changing any total.  A 0/0 ratio is reported as 1.0;
    callers needing the flag use :func:`evaluate_maps`.
    """
    if bench.patents() != trial.patents():
        only_b = sorted(bench.patents() - trial.patents())[:5]
        only_t = sorted(trial.patents() - bench.patents())[:5]
        raise InputError(
            f"benchmark/trial patent sets differ (bench-only {only_b}, trial-only {only_t})"
        )
    bench_counters = {p: Counter(ids) for p, ids in bench.ids_by_patent.items()}
    trial_counters = {p: Counter(ids) for p, ids in trial.ids_by_patent.items()}

    candidate_pairs: set[tuple[str, str]] = set()
    for counters in (bench_counters, trial_counters):
        co_occurring: dict[str, list[str]] = {}
        for patent, counter in counters.items():
            for entity in counter:
                co_occurring.setdefault(entity, []).append(patent)
        for patents in co_occurring.values():
            patents.sort()
            for i in range(len(patents)):
                for j in range(i + 1, len(patents)):
                    candidate_pairs.add((patents[i], patents[j]))

    tp = fp = fn = 0
    for p1, p2 in candidate_pairs:
        d_tp, d_fp, d_fn = _pair_counts(
            bench_counters[p1], bench_counters[p2], trial_counters[p1], trial_counters[p2]
        )
        tp += d_tp
        fp += d_fp
        fn += d_fn
    counts = PairwiseCounts(tp=tp, fp=fp, fn=fn)
    precision = tp / (tp + fp) if (tp + fp) else 1.0
    recall = tp / (tp + fn) if (tp + fn) else 1.0
    return precision, recall, counts


def split_lump(
    bench_entities: dict[str, set[str]],
    trial_entities: dict[str, set[str]],
) -> tuple[float, float, dict[str, tuple[str | None, int, int]]]:
    """Splitting and lumping of trial clusters against benchmark entities.

    For each benchmark entity the best trial match maximizes shared
    patents; ties prefer fewer foreign patents, then the smaller id.  An
    entity no trial cluster overlaps keeps all its patents as splits.
    Returns (splitting, lumping, {bench_id: (match_id, s_i, l_i)}).
    """
    details: dict[str, tuple[str | None, int, int]] = {}
    total_patents = 0
    total_split = 0
    total_lump = 0
    patent_to_trial: dict[str, set[str]] = {}
    for trial_id, patents in trial_entities.items():
        for patent in patents:
            patent_to_trial.setdefault(patent, set()).add(trial_id)

    for bench_id in sorted(bench_entities):
        bench_patents = bench_entities[bench_id]
        if not bench_patents:
            log.warning("benchmark entity %s has no patents, excluded", bench_id)
            continue
        touching = sorted({t for p in bench_patents for t in patent_to_trial.get(p, ())})
        best: str | None = None
        best_rank: tuple[int, int, str] | None = None
        for trial_id in touching:
            trial_patents = trial_entities[trial_id]
            overlap = len(bench_patents & trial_patents)
            extras = len(trial_patents - bench_patents)
            rank = (-overlap, extras, trial_id)
            if best_rank is None or rank < best_rank:
                best_rank = rank
                best = trial_id
        if best is None:
            s_i, l_i = len(bench_patents), 0
        else:
            matched = trial_entities[best]
            s_i = len(bench_patents - matched)
            l_i = len(matched - bench_patents)
        details[bench_id] = (best, s_i, l_i)
        total_patents += len(bench_patents)
        total_split += s_i
        total_lump += l_i

    if total_patents == 0:
        raise InputError("benchmark has no entities with patents")
    return total_split / total_patents, total_lump / total_patents, details


@dataclass
class AlignResult:
    trial: DisambiguationMap
    bench: DisambiguationMap
    excluded_patents: set[str] = field(default_factory=set)
    dropped_collaborator_ids: int = 0


def align_benchmark(
    trial: DisambiguationMap,
    bench: DisambiguationMap,
    high_res_only: bool = False,
    resolutions: dict[str, str] | None = None,
) -> AlignResult:
    """Restrict both maps to patents where names link exactly.

    Trial entries whose normalized name matches no benchmark name on that
    patent are dropped as non-benchmarked collaborators.  A patent where
    some benchmark name has no exact trial counterpart is excluded from
    both maps entirely.  With ``high_res_only``, patents keeping any trial
    entity not flagged high resolution are excluded too.
    """
    if trial.names_by_patent is None or bench.names_by_patent is None:
        raise InputError("alignment requires names on both maps")
    out_trial: dict[str, list[str]] = {}
    out_trial_names: dict[str, list[str]] = {}
    out_bench: dict[str, list[str]] = {}
    out_bench_names: dict[str, list[str]] = {}
    excluded: set[str] = set()
    dropped = 0

    for patent in sorted(bench.ids_by_patent):
        bench_ids = bench.ids_by_patent[patent]
        bench_names = bench.names_by_patent[patent]
        trial_ids = trial.ids_by_patent.get(patent, [])
        trial_names = trial.names_by_patent.get(patent, [])

        budget = Counter(bench_names)
        kept_ids: list[str] = []
        kept_names: list[str] = []
        for entity, name in zip(trial_ids, trial_names):
            if budget[name] > 0:
                budget[name] -= 1
                kept_ids.append(entity)
                kept_names.append(name)
            else:
                dropped += 1
        if sum(budget.values()) > 0:
            # Some benchmark name never linked exactly; the pair counts for
            # this patent would be meaningless, so it leaves the statistics.
            excluded.add(patent)
            continue
        if high_res_only and resolutions is not None:
            if any(resolutions.get(e, "low") != "high" for e in kept_ids):
                excluded.add(patent)
                continue
        out_trial[patent] = kept_ids
        out_trial_names[patent] = kept_names
        out_bench[patent] = list(bench_ids)
        out_bench_names[patent] = list(bench_names)

    return AlignResult(
        trial=DisambiguationMap(trial.role, out_trial, out_trial_names),
        bench=DisambiguationMap(bench.role, out_bench, out_bench_names),
        excluded_patents=excluded,
        dropped_collaborator_ids=dropped,
    )


def entities_from_map(dmap: DisambiguationMap) -> dict[str, set[str]]:
    out: dict[str, set[str]] = {}
    for patent, ids in dmap.ids_by_patent.items():
        for entity in ids:
            out.setdefault(entity, set()).add(patent)
    return out


def evaluate_maps(
    bench: DisambiguationMap,
    trial: DisambiguationMap,
    with_split_lump: bool = True,
) -> EvalReport:
    """Full report: pairwise metrics plus splitting/lumping."""
    precision, recall, counts = pairwise_pr(bench, trial)
    report = EvalReport(
        precision=precision,
        recall=recall,
        precision_defined=(counts.tp + counts.fp) > 0,
        recall_defined=(counts.tp + counts.fn) > 0,
        counts=counts,
        n_patents=len(bench.ids_by_patent),
    )
    if with_split_lump:
        splitting, lumping, details = split_lump(
            entities_from_map(bench), entities_from_map(trial)
        )
        report.splitting = splitting
        report.lumping = lumping
        report.split_lump_details = details
    return report


def load_benchmark(path, role: str) -> DisambiguationMap:
    """Read `patent_id  role  name  benchmark_entity_id` rows for one role.

    Names are stored normalized (same canonicalisation as the pipeline)
    so alignment compares like with like.
    """
    from .textnorm import normalize

    if role not in (ROLE_INVENTOR, ROLE_ASSIGNEE):
        raise InputError(f"unknown role {role!r}")
    ids: dict[str, list[str]] = {}
    names: dict[str, list[str]] = {}
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot read benchmark {path}: {exc}") from exc
    with fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not row or row[0].lstrip().startswith("#") or not row[0].strip():
                continue
            if len(row) < 4:
                raise InputError(f"benchmark line {lineno}: expected 4 columns, got {len(row)}")
            if row[1].strip().lower() != role:
                continue
            patent = row[0].strip()
            ids.setdefault(patent, []).append(row[3].strip())
            names.setdefault(patent, []).append(normalize(row[2], role).key)
    return DisambiguationMap(role=role, ids_by_patent=ids, names_by_patent=names)


_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def raw_name_baseline_id(raw_name: str) -> str:
    """The no-disambiguation baseline id: lowercased, punctuation dropped."""
    return " ".join(raw_name.lower().translate(_PUNCT_TABLE).split())
