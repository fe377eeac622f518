"""
Scoring one submission
======================

Grade a submission with full manual marks, then see how a missing transcript
invalidates it regardless of those marks.
"""

from datetime import datetime

from cohort_audit import synthetic
from cohort_audit.evidence import build_evidence
from cohort_audit.ingest import Document, Submission
from cohort_audit.rubric import ManualMarks, grade

marks = ManualMarks(r2_structure=18, r3_technical=30, r4_review_answers_quality=13)
chat = synthetic.transcript(datetime(2024, 5, 10, 9, 0), minutes=150, step=12)
report = Document("Informe final\n" + synthetic.numeric_section(100, 75))

# with a complete 150-minute chat all five modules are covered
ev = build_evidence(Submission("ana", report, chat))
print(grade("ana", ev, marks, personal_zone_max_sim=0.2))

# a personal zone shared with a classmate costs originality points
print(grade("ana", ev, marks, personal_zone_max_sim=0.6))

# no transcript: total 0, components kept for the audit trail
ev_missing = build_evidence(Submission("ana", report, None))
score = grade("ana", ev_missing, marks, personal_zone_max_sim=0.2)
print(score.total, score.valid, score.invalidation_reasons, score.nominal_total)
