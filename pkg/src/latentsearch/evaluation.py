"""Retrieval evaluation: P/R points, 11-level interpolation, AP/MAP, and a
paired Fisher randomization test with an exact exhaustive mode.

Queries with no relevant documents are excluded from every average; the
randomization test records its seed so significance reports reproduce.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Collection, Iterable, Sequence

import numpy as np

RECALL_LEVELS = tuple(i / 10 for i in range(11))
SIGNIFICANCE_THRESHOLD = 0.05


@dataclass(frozen=True)
class Qrels:
    """Binary relevance judgments keyed by (query_id, doc_id)."""

    judgments: dict[tuple[str, str], int]

    def query_ids(self) -> list[str]:
        return sorted({q for q, _ in self.judgments})

    def relevant_docs(self, query_id: str) -> frozenset[str]:
        return frozenset(d for (q, d), rel in self.judgments.items()
                         if q == query_id and rel == 1)

    def relevant_count(self, query_id: str) -> int:
        return len(self.relevant_docs(query_id))


def load_qrels(path: str | Path) -> Qrels:
    """Parse `query_id 0 doc_id relevance` lines; positive grades count
    as relevant."""
    judgments: dict[tuple[str, str], int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            query_id, _, doc_id, rel_raw = parts
            try:
                rel = int(rel_raw)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad relevance {rel_raw!r}") from None
            judgments[(query_id, doc_id)] = 1 if rel > 0 else 0
    return Qrels(judgments=judgments)


@dataclass(frozen=True)
class RunData:
    """A parsed run file: ranked doc ids per query, plus the run tag."""

    tag: str
    rankings: dict[str, list[str]]


def load_run(path: str | Path) -> RunData:
    rows: dict[str, list[tuple[int, str]]] = {}
    tag = "run"
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 6:
                raise ValueError(f"{path}:{lineno}: expected 6 fields, got {len(parts)}")
            query_id, _, doc_id, rank_raw, _, tag = parts
            try:
                rank = int(rank_raw)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad rank {rank_raw!r}") from None
            rows.setdefault(query_id, []).append((rank, doc_id))
    rankings = {q: [d for _, d in sorted(pairs)] for q, pairs in rows.items()}
    return RunData(tag=tag, rankings=rankings)


def pr_points(ranked_doc_ids: Sequence[str],
              relevant: Collection[str]) -> list[tuple[float, float]]:
    """(recall, precision) after each rank of the result list."""
    total_relevant = len(relevant)
    if total_relevant == 0:
        raise ValueError("query has no relevant documents; skip it")
    points = []
    hits = 0
    for k, doc_id in enumerate(ranked_doc_ids, start=1):
        if doc_id in relevant:
            hits += 1
        points.append((hits / total_relevant, hits / k))
    return points


@dataclass(frozen=True)
class InterpolatedCurve:
    """Precision and F values at the eleven standard recall levels."""

    precision: tuple[float, ...]
    f_measure: tuple[float, ...]

    def precision_at(self, level_index: int) -> float:
        return self.precision[level_index]

    def f_at(self, level_index: int) -> float:
        return self.f_measure[level_index]


def interpolate_11pt(points: Sequence[tuple[float, float]]) -> InterpolatedCurve:
    """Max-interpolate precision to the 11 standard recall levels.

    F at each level combines the interpolated precision with the level
    itself, so F at recall 0 is always 0.
    """
    precision = []
    f_measure = []
    for level in RECALL_LEVELS:
        p = max((prec for rec, prec in points if rec >= level), default=0.0)
        f = (2 * p * level / (p + level)) if (p + level) > 0 else 0.0
        precision.append(p)
        f_measure.append(f)
    return InterpolatedCurve(precision=tuple(precision), f_measure=tuple(f_measure))


def average_precision(ranked_doc_ids: Sequence[str],
                      relevant: Collection[str]) -> float:
    """Mean of precision at each relevant document's rank; unretrieved
    relevant documents contribute 0."""
    total_relevant = len(relevant)
    if total_relevant == 0:
        raise ValueError("query has no relevant documents; skip it")
    hits = 0
    precision_sum = 0.0
    for k, doc_id in enumerate(ranked_doc_ids, start=1):
        if doc_id in relevant:
            hits += 1
            precision_sum += hits / k
    return precision_sum / total_relevant


def mean_average_precision(per_query_ap: Iterable[float]) -> float:
    values = list(per_query_ap)
    if not values:
        raise ValueError("no evaluated queries")
    return sum(values) / len(values)


def mean_curve(curves: Sequence[InterpolatedCurve]) -> InterpolatedCurve:
    if not curves:
        raise ValueError("no curves to average")
    n = len(curves)
    precision = tuple(sum(c.precision[i] for c in curves) / n for i in range(11))
    f_measure = tuple(sum(c.f_measure[i] for c in curves) / n for i in range(11))
    return InterpolatedCurve(precision=precision, f_measure=f_measure)


def relative_improvement(map_a: float, map_b: float) -> float:
    """Percent improvement of model A's MAP over model B's."""
    return (map_a - map_b) / map_b * 100.0


@dataclass(frozen=True)
class EvalReport:
    per_query_ap: dict[str, float]
    map: float
    mean_curve: InterpolatedCurve
    skipped_no_judgments: tuple[str, ...]
    skipped_no_relevant: tuple[str, ...]


def evaluate_run(run: RunData, qrels: Qrels) -> EvalReport:
    """Score every query in the run that has relevant judgments."""
    judged = set(qrels.query_ids())
    skipped_no_judgments = tuple(sorted(set(run.rankings) - judged))
    skipped_no_relevant = []
    per_query_ap: dict[str, float] = {}
    curves = []
    for query_id in sorted(set(run.rankings) & judged):
        relevant = qrels.relevant_docs(query_id)
        if not relevant:
            skipped_no_relevant.append(query_id)
            continue
        ranked = run.rankings[query_id]
        per_query_ap[query_id] = average_precision(ranked, relevant)
        curves.append(interpolate_11pt(pr_points(ranked, relevant)))
    if not per_query_ap:
        raise ValueError("no overlapping query ids with relevant judgments")
    return EvalReport(
        per_query_ap=per_query_ap,
        map=mean_average_precision(per_query_ap.values()),
        mean_curve=mean_curve(curves),
        skipped_no_judgments=skipped_no_judgments,
        skipped_no_relevant=tuple(skipped_no_relevant))


@dataclass(frozen=True)
class SigTestResult:
    observed_diff: float
    n_minus: int
    n_plus: int
    trials: int
    p_two_sided: float
    seed: int
    exhaustive: bool

    @classmethod
    def from_counts(cls, n_minus: int, n_plus: int, trials: int,
                    observed_diff: float = 0.0, seed: int = 0,
                    exhaustive: bool = False) -> "SigTestResult":
        if trials <= 0:
            raise ValueError("trials must be positive")
        if n_minus < 0 or n_plus < 0 or n_minus + n_plus > trials:
            raise ValueError("tail counts must satisfy 0 <= n_minus + n_plus <= trials")
        return cls(observed_diff=observed_diff, n_minus=n_minus, n_plus=n_plus,
                   trials=trials, p_two_sided=(n_minus + n_plus) / trials,
                   seed=seed, exhaustive=exhaustive)

    @property
    def significant(self) -> bool:
        return self.p_two_sided < SIGNIFICANCE_THRESHOLD

    def format_line(self) -> str:
        return (f"{self.observed_diff:.6f} {self.n_minus} {self.n_plus} "
                f"{self.trials} {self.p_two_sided:.5f} {self.seed}")


def _tail_counts(d_values: np.ndarray, bound: float) -> tuple[int, int]:
    # ties land in the tail; a trial counts on one side only (matters when
    # the observed difference is exactly 0)
    plus_mask = d_values >= bound
    minus_mask = (d_values <= -bound) & ~plus_mask
    return int(minus_mask.sum()), int(plus_mask.sum())


def _exhaustive_diffs(diffs: np.ndarray) -> np.ndarray:
    n = len(diffs)
    total = 1 << n
    out = np.empty(total, dtype=np.float64)
    chunk = 1 << 14
    patterns = np.arange(total, dtype=np.uint64)
    bit_positions = np.arange(n, dtype=np.uint64)
    for start in range(0, total, chunk):
        block = patterns[start:start + chunk]
        bits = (block[:, None] >> bit_positions[None, :]) & 1
        signs = bits.astype(np.float64) * 2.0 - 1.0
        out[start:start + chunk] = signs @ diffs / n
    return out


def randomization_test(ap_a: Sequence[float], ap_b: Sequence[float],
                       trials: int = 100_000, seed: int = 42,
                       exhaustive: bool | None = None) -> SigTestResult:
    """Paired two-sided randomization test on per-query score lists.

    Each trial flips each query's (a, b) pair with probability 1/2 and
    recomputes the mean difference; the two-sided p-value is the fraction
    of trial differences at or beyond the observed one on either side.
    Trial i draws from a generator derived from (seed, i), so results do
    not depend on how trials are partitioned. When 2^n <= trials the test
    enumerates all sign assignments instead of sampling (pass
    ``exhaustive=False`` to force sampling).
    """
    if len(ap_a) != len(ap_b):
        raise ValueError(f"score lists differ in length: {len(ap_a)} vs {len(ap_b)}")
    if not ap_a:
        raise ValueError("score lists are empty")
    if trials <= 0:
        raise ValueError("trials must be positive")
    n = len(ap_a)
    diffs = np.asarray(ap_a, dtype=np.float64) - np.asarray(ap_b, dtype=np.float64)
    ones = np.ones(n, dtype=np.float64)
    observed = float(ones @ diffs) / n
    bound = abs(observed)

    if exhaustive is None:
        exhaustive = n < 63 and (1 << n) <= trials

    if exhaustive:
        if n > 24:
            raise ValueError(f"exhaustive enumeration infeasible for n={n}")
        d_values = _exhaustive_diffs(diffs)
        total = len(d_values)
    else:
        total = trials
        d_values = np.empty(trials, dtype=np.float64)
        for i in range(trials):
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=seed, spawn_key=(i,)))
            signs = rng.integers(0, 2, size=n).astype(np.float64) * 2.0 - 1.0
            d_values[i] = float(signs @ diffs) / n

    n_minus, n_plus = _tail_counts(d_values, bound)
    return SigTestResult(
        observed_diff=observed, n_minus=n_minus, n_plus=n_plus, trials=total,
        p_two_sided=(n_minus + n_plus) / total, seed=seed, exhaustive=exhaustive)


def paired_ap_lists(run_a: RunData, run_b: RunData,
                    qrels: Qrels) -> tuple[list[str], list[float], list[float]]:
    """Per-query APs for two runs aligned by query id.

    Raises when the evaluable query sets differ, naming the missing ids.
    """
    def evaluable(run: RunData) -> set[str]:
        return {q for q in run.rankings
                if qrels.relevant_count(q) > 0}

    set_a, set_b = evaluable(run_a), evaluable(run_b)
    if set_a != set_b:
        only_a = sorted(set_a - set_b)
        only_b = sorted(set_b - set_a)
        raise ValueError(
            f"query sets differ: only in A {only_a}, only in B {only_b}")
    if not set_a:
        raise ValueError("no evaluable queries shared by the two runs")
    query_ids = sorted(set_a)
    ap_a = [average_precision(run_a.rankings[q], qrels.relevant_docs(q))
            for q in query_ids]
    ap_b = [average_precision(run_b.rankings[q], qrels.relevant_docs(q))
            for q in query_ids]
    return query_ids, ap_a, ap_b


def write_ap_csv(path: str | Path, per_query_ap: dict[str, float]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("query_id,ap\n")
        for query_id in sorted(per_query_ap):
            fh.write(f"{query_id},{per_query_ap[query_id]:.6f}\n")


def write_curve_csv(path: str | Path, curve: InterpolatedCurve) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("level,mean_precision,mean_f\n")
        for i, level in enumerate(RECALL_LEVELS):
            fh.write(f"{level:.1f},{curve.precision[i]:.6f},{curve.f_measure[i]:.6f}\n")


def write_plot_csv(path: str | Path,
                   curves: dict[str, InterpolatedCurve]) -> None:
    """Long-format CSV with one averaged curve per run tag, for plotting."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("run_tag,level,mean_precision,mean_f\n")
        for tag in curves:
            curve = curves[tag]
            for i, level in enumerate(RECALL_LEVELS):
                fh.write(f"{tag},{level:.1f},{curve.precision[i]:.6f},"
                         f"{curve.f_measure[i]:.6f}\n")
