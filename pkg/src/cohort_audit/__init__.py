"""Batch audit of AI-tutor coursework: chat evidence, cohort similarity and rubric scoring."""

from .config import Config, ConfigError
from .evidence import (
    TranscriptEvidence,
    build_evidence,
    detect_foreign_identity,
    detect_placeholders,
    module_coverage,
    parse_transcript,
    scs_cn_runoff,
    session_duration,
    verify_numeric_exercise,
)
from .ingest import Document, Roster, RosterEntry, Submission, Zone, load_cohort, segment_zones
from .pipeline import run_audit, write_report
from .report import CohortReport, CohortStats, cohort_stats, emit_json, emit_markdown, from_json
from .rubric import ManualMarks, RubricScore, combine, grade, score_r1, score_r4
from .similarity import (
    SimilarityFinding,
    build_lsh,
    candidate_pairs,
    classify_level,
    cosine,
    fit_tfidf,
    jaccard_estimate,
    minhash,
    pairwise_audit,
    vectorize,
)
from .textprep import TokenStream, normalize, shingles

__version__ = "0.1.0"
