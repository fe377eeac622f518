"""Cohort statistics and the JSON / Markdown reports.

``report.json`` keeps every pairwise finding, noise included, so that all
statistics can be recomputed from the emitted file alone. ``report.md`` is the
review-ordering view: it lists only medium-and-above pairs.
"""

from __future__ import annotations

import dataclasses
import json
import math
import statistics
import types
import typing
from dataclasses import dataclass, field

from .evidence import TranscriptEvidence
from .rubric import RubricScore
from .similarity import (
    SimilarityFinding,
    ThresholdConfig,
    classify_level,
    headline_similarity,
    level_rank,
)


@dataclass(frozen=True)
class ReportConfig:
    std: str = "population"  # or "sample"
    invalid_totals: str = "nominal"  # or "zero"
    scale: int = 100  # 10 renders totals on the 0-10 scale
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)

    def __post_init__(self):
        if self.std not in ("population", "sample"):
            raise ValueError(f"report.std must be population or sample, got {self.std!r}")
        if self.invalid_totals not in ("nominal", "zero"):
            raise ValueError(f"report.invalid_totals must be nominal or zero, got {self.invalid_totals!r}")
        if self.scale not in (10, 100):
            raise ValueError(f"report.scale must be 10 or 100, got {self.scale!r}")


@dataclass
class CohortStats:
    n: int
    mean: float
    std: float
    median: float
    count_ge_90: int
    count_ge_60: int
    count_invalid: int
    count_pass: int
    count_transcript_present: int
    share_sim_ge_medium: float
    component_means: list[float]


@dataclass
class Row:
    student_id: str
    score: RubricScore
    evidence: TranscriptEvidence
    headline_similarity: float
    headline_level: str
    personal_zone_similarity: float = 0.0
    flags: list[str] = field(default_factory=list)


@dataclass
class CohortReport:
    rows: list[Row]
    stats: CohortStats
    pairwise: list[SimilarityFinding]
    config_echo: dict[str, str] = field(default_factory=dict)

    def copy_pairs(self) -> set[tuple[str, str]]:
        return {(f.id_a, f.id_b) for f in self.pairwise if f.level == "copy"}

    @property
    def exit_code(self) -> int:
        """2 when any copy-level pair or invalidated submission exists, else 0."""
        if self.copy_pairs() or any(not r.score.valid for r in self.rows):
            return 2
        return 0


def _stats_totals(scores, config: ReportConfig) -> list[float]:
    if config.invalid_totals == "nominal":
        return [s.nominal_total for s in scores]
    return [s.total for s in scores]


def _compute(scores, headlines: list[float], present: int, config: ReportConfig) -> CohortStats:
    if not scores:
        raise ValueError("cohort statistics need at least one score")
    totals = _stats_totals(scores, config)
    n = len(totals)
    mean = math.fsum(totals) / n
    if config.std == "sample" and n > 1:
        std = statistics.stdev(totals)
    elif config.std == "sample":
        std = 0.0
    else:
        std = statistics.pstdev(totals)
    components = [
        math.fsum(getattr(s, c) for s in scores) / n for c in ("r1", "r2", "r3", "r4")
    ]
    medium = config.thresholds.medium
    return CohortStats(
        n=n,
        mean=mean,
        std=std,
        median=float(statistics.median(totals)),
        count_ge_90=sum(t >= 90 for t in totals),
        count_ge_60=sum(t >= 60 for t in totals),
        count_invalid=sum(not s.valid for s in scores),
        count_pass=sum(s.passed for s in scores),
        count_transcript_present=present,
        share_sim_ge_medium=sum(h >= medium for h in headlines) / n,
        component_means=components,
    )


def cohort_stats(
    scores: list[RubricScore],
    findings: list[SimilarityFinding] = (),
    config: ReportConfig | None = None,
    evidence: list[TranscriptEvidence] | None = None,
) -> CohortStats:
    """Aggregate statistics over a cohort's scores.

    Invalid submissions enter mean, std, median and threshold counts with
    their component sum under ``invalid_totals="nominal"`` (the default), or
    as 0 under ``"zero"``. Component means always use recorded components.
    """
    config = config or ReportConfig()
    heads = headline_similarity(list(findings), [s.student_id for s in scores])
    present = sum(e.present for e in evidence) if evidence else 0
    return _compute(scores, [heads[s.student_id] for s in scores], present, config)


def stats_from_rows(rows: list[Row], config: ReportConfig | None = None) -> CohortStats:
    config = config or ReportConfig()
    return _compute(
        [r.score for r in rows],
        [r.headline_similarity for r in rows],
        sum(r.evidence.present for r in rows),
        config,
    )


def row_flags(score: RubricScore, ev: TranscriptEvidence, unreadable: bool, pairs_at_copy: bool) -> list[str]:
    flags = []
    if unreadable:
        flags.append("unreadable")
    if pairs_at_copy:
        flags.append("copy_pair")
    flags.extend(f"foreign_identity:{h.student_id}" for h in ev.foreign_identities)
    if ev.certain_placeholders:
        flags.append(f"placeholders:{ev.certain_placeholders}")
    if ev.numeric_check is None:
        flags.append("numeric_not_checkable")
    elif not ev.numeric_check.passed:
        flags.append("numeric_check_failed")
    if score.pending_manual_review:
        flags.append("pending_manual_review")
    return flags


# --- JSON -------------------------------------------------------------------


def to_dict(report: CohortReport) -> dict:
    return dataclasses.asdict(report)


def emit_json(report: CohortReport) -> bytes:
    text = json.dumps(to_dict(report), ensure_ascii=False, indent=2, allow_nan=False)
    return (text + "\n").encode("utf-8")


def _build(tp, data):
    if data is None:
        return None
    origin = typing.get_origin(tp)
    if origin in (typing.Union, types.UnionType):
        inner = [a for a in typing.get_args(tp) if a is not type(None)]
        return _build(inner[0], data)
    if origin is list:
        (item,) = typing.get_args(tp)
        return [_build(item, x) for x in data]
    if origin is dict:
        _, val = typing.get_args(tp)
        return {k: _build(val, v) for k, v in data.items()}
    if dataclasses.is_dataclass(tp):
        hints = typing.get_type_hints(tp)
        kwargs = {f.name: _build(hints[f.name], data[f.name]) for f in dataclasses.fields(tp) if f.init}
        return tp(**kwargs)
    if tp is float:
        return float(data)
    return data


def from_json(blob: bytes | str) -> CohortReport:
    """Inverse of :func:`emit_json`."""
    if isinstance(blob, bytes):
        blob = blob.decode("utf-8")
    return _build(CohortReport, json.loads(blob))


# --- Markdown -----------------------------------------------------------------


def _fmt(x: float, digits: int = 1) -> str:
    return f"{x:.{digits}f}"


def _scaled(x: float, scale: int) -> str:
    return _fmt(x / 10, 2) if scale == 10 else _fmt(x, 1)


FOOTNOTES = (
    "Similarity bands: noise < {noise:.2f} <= low < {medium:.2f} <= medium < {high:.2f} <= high < {copy:.2f} <= copy. "
    "Bands order human review; they never sanction by themselves.",
    "Headline similarity is a student's maximum full-document TF-IDF cosine against any classmate.",
    "Personal zones (numeric exercise, review answers) are compared with MinHash Jaccard estimates "
    "over LSH candidate pairs; only there does similarity >= {high:.2f} remove R4 originality points.",
    "R1 is eliminatory: no transcript, or gap-capped chat time below the minimum, invalidates the "
    "submission (total reported as 0, components kept for audit).",
    "Chat time counts each gap between consecutive messages up to the configured cap.",
    "Cohort mean, deviation, median and threshold counts use {invalid_rule}; "
    "standard deviation uses the {std} formula.",
    "The numeric exercise is recomputed with the SCS-CN method only; other hydrology results are instructor-judged.",
)


def emit_markdown(report: CohortReport) -> str:
    echo = report.config_echo
    scale = int(echo.get("report.scale", "100"))
    th = ThresholdConfig(
        float(echo.get("sim.noise", 0.30)),
        float(echo.get("sim.medium", 0.45)),
        float(echo.get("sim.high", 0.75)),
        float(echo.get("sim.copy", 0.80)),
    )
    s = report.stats
    unit = "/10" if scale == 10 else "/100"
    out = ["# Cohort audit report", "", "## Cohort statistics", "", "| statistic | value |", "|---|---|"]
    out += [
        f"| students | {s.n} |",
        f"| mean | {_scaled(s.mean, scale)} {unit} |",
        f"| standard deviation | {_scaled(s.std, scale)} |",
        f"| median | {_scaled(s.median, scale)} {unit} |",
        f"| totals >= 90 | {s.count_ge_90} of {s.n} |",
        f"| totals >= 60 | {s.count_ge_60} of {s.n} |",
        f"| passed | {s.count_pass} of {s.n} |",
        f"| invalidated | {s.count_invalid} of {s.n} |",
        f"| transcript attached | {s.count_transcript_present} of {s.n} |",
        f"| headline similarity >= medium | {100 * s.share_sim_ge_medium:.1f}% |",
        "| component means R1/R2/R3/R4 | " + " / ".join(_fmt(c, 2) for c in s.component_means) + " |",
        "",
        "## Students",
        "",
        "| student | total | pass | R1 | R2 | R3 | R4 | transcript | similarity | notes |",
        "|---|---|---|---|---|---|---|---|---|---|",
    ]
    for r in report.rows:
        sc, ev = r.score, r.evidence
        if ev.present:
            chat = f"{ev.capped_duration_min}/{ev.raw_duration_min} min, {','.join(ev.modules_covered) or 'no modules'}"
        else:
            chat = "absent"
        notes = "; ".join(sc.invalidation_reasons + r.flags)
        out.append(
            f"| {r.student_id} | {_scaled(sc.total, scale)} | {'yes' if sc.passed else 'no'} "
            f"| {_fmt(sc.r1)} | {_fmt(sc.r2)} | {_fmt(sc.r3)} | {_fmt(sc.r4)} | {chat} "
            f"| {r.headline_similarity:.2f} ({r.headline_level}) | {notes} |"
        )
    if report.pairwise:
        out += ["", "## Pairwise flags (medium and above)", ""]
        out += pairwise_table(report.pairwise, "medium")
    invalid_rule = (
        "component sums for invalidated submissions"
        if echo.get("report.invalid_totals", "nominal") == "nominal"
        else "0 for invalidated submissions"
    )
    out += ["", "## Notes", ""]
    for i, note in enumerate(FOOTNOTES, 1):
        text = note.format(
            noise=th.noise, medium=th.medium, high=th.high, copy=th.copy,
            invalid_rule=invalid_rule, std=echo.get("report.std", "population"),
        )
        out.append(f"{i}. {text}")
    return "\n".join(out) + "\n"


def pairwise_table(findings: list[SimilarityFinding], min_level: str = "low") -> list[str]:
    shown = [f for f in findings if level_rank(f.level) >= level_rank(min_level)]
    if not shown:
        return [f"No pair at {min_level} level or above."]
    lines = ["| pair | scope | cosine | jaccard | level |", "|---|---|---|---|---|"]
    for f in shown:
        cos = "" if f.cosine is None else f"{f.cosine:.3f}"
        lines.append(f"| {f.id_a} / {f.id_b} | {f.scope} | {cos} | {f.jaccard_est:.3f} | {f.level} |")
    return lines


def headline_level(value: float, thresholds: ThresholdConfig) -> str:
    return classify_level(value, thresholds)
