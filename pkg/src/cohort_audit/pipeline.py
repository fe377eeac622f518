"""End-to-end audit: ingest, evidence, similarity, rubric, report."""

from __future__ import annotations

import logging
from pathlib import Path

from .config import Config
from .evidence import build_evidence
from .ingest import ROSTER_NAME, Roster, load_cohort, load_roster
from .report import CohortReport, Row, cohort_stats, emit_json, emit_markdown, row_flags
from .rubric import MarksError, grade, load_marks
from .similarity import classify_level, headline_similarity, pairwise_audit, personal_zone_max

log = logging.getLogger(__name__)


def resolve_roster(root: Path, config: Config) -> Roster:
    path = config.values["roster"]
    if path:
        return load_roster(path)
    if (root / ROSTER_NAME).is_file():
        return load_roster(root / ROSTER_NAME)
    log.info("no roster found; identity checks disabled")
    return Roster()


def run_audit(root_dir, config: Config | None = None) -> CohortReport:
    config = config or Config.from_mapping()
    root = Path(root_dir)
    roster = resolve_roster(root, config)
    subs = load_cohort(root, roster, config.ingest)
    if not subs:
        raise ValueError(f"no submissions found under {root}")

    ev_cfg, rub_cfg, th = config.evidence, config.rubric, config.thresholds
    ids = [s.student_id for s in subs]
    evidence = {s.student_id: build_evidence(s, roster, ev_cfg) for s in subs}
    findings = pairwise_audit(subs, config.similarity, config.textprep)
    heads = headline_similarity(findings, ids)
    zone_max = personal_zone_max(findings, ids)
    copy_ids = {sid for f in findings if f.level == "copy" for sid in (f.id_a, f.id_b)}

    rows, scores = [], []
    for s in subs:
        try:
            marks = load_marks(s.source_dir) if s.source_dir else None
        except MarksError as exc:
            raise MarksError(exc.field, f"student {s.student_id}: {exc}") from None
        ev = evidence[s.student_id]
        score = grade(s.student_id, ev, marks, zone_max[s.student_id], rub_cfg)
        scores.append(score)
        rows.append(
            Row(
                student_id=s.student_id,
                score=score,
                evidence=ev,
                headline_similarity=heads[s.student_id],
                headline_level=classify_level(heads[s.student_id], th),
                personal_zone_similarity=zone_max[s.student_id],
                flags=row_flags(score, ev, s.unreadable, s.student_id in copy_ids),
            )
        )
    stats = cohort_stats(scores, findings, config.report, [evidence[i] for i in ids])
    return CohortReport(rows, stats, findings, config.echo())


def write_report(report: CohortReport, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path, md_path = out / "report.json", out / "report.md"
    json_path.write_bytes(emit_json(report))
    md_path.write_text(emit_markdown(report), encoding="utf-8")
    return json_path, md_path
