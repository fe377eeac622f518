"""Four-component rubric: R1 interaction (20), R2 structure (20),
R3 technical work (35), R4 originality (25).

R1 is eliminatory. A missing transcript or too little verified chat time
zeroes R1 and invalidates the whole submission, whatever the other marks.
R2, R3 and the review-answer part of R4 are instructor judgments read from
``marks.txt``; the engine validates and combines them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .evidence import TranscriptEvidence

MAX_POINTS = {"r1": 20.0, "r2": 20.0, "r3": 35.0, "r4": 25.0}
REASON_NO_ANNEX = "No adjuntó el Anexo A"
MARKS_NAME = "marks.txt"


class MarksError(ValueError):
    """A manual mark is missing, malformed or out of range."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class RubricConfig:
    min_minutes: int = 120
    pass_mark: float = 60.0
    r1_floor: float = 10.0
    r1_module_step: float = 2.0
    r3_numeric_penalty: float = 5.0
    r4_originality: float = 10.0
    r4_placeholder_penalty: float = 5.0
    r4_identity_penalty: float = 10.0
    sim_medium: float = 0.45
    sim_high: float = 0.75


@dataclass
class ManualMarks:
    r2_structure: float
    r3_technical: float
    r4_review_answers_quality: float
    notes: str = ""

    RANGES = {
        "r2_structure": 20.0,
        "r3_technical": 35.0,
        "r4_review_answers_quality": 15.0,
    }

    def validate(self) -> ManualMarks:
        for name, top in self.RANGES.items():
            value = getattr(self, name)
            if not 0.0 <= value <= top:
                raise MarksError(name, f"{value} outside [0, {top:g}]")
        return self


_MARK_KEYS = {"r2": "r2_structure", "r3": "r3_technical", "r4_review": "r4_review_answers_quality"}


def parse_marks(text: str) -> ManualMarks:
    """Parse ``r2=``, ``r3=``, ``r4_review=`` and optional ``notes=`` lines."""
    values: dict[str, float] = {}
    notes = ""
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise MarksError(key or "marks", "expected key=value")
        if key == "notes":
            notes = value.strip()
        elif key in _MARK_KEYS:
            try:
                values[_MARK_KEYS[key]] = float(value.replace(",", "."))
            except ValueError:
                raise MarksError(_MARK_KEYS[key], f"not a number: {value.strip()!r}") from None
        else:
            raise MarksError(key, "unknown key")
    for name in ManualMarks.RANGES:
        if name not in values:
            raise MarksError(name, "missing")
    return ManualMarks(notes=notes, **values).validate()


def load_marks(student_dir: str | Path) -> ManualMarks | None:
    path = Path(student_dir) / MARKS_NAME
    if not path.is_file():
        return None
    return parse_marks(path.read_text("utf-8-sig"))


@dataclass
class RubricScore:
    student_id: str
    r1: float
    r2: float
    r3: float
    r4: float
    total: float
    valid: bool
    passed: bool
    invalidation_reasons: list[str] = field(default_factory=list)
    pending_manual_review: bool = False

    @property
    def nominal_total(self) -> float:
        """Component sum, kept even when the submission was invalidated."""
        return self.r1 + self.r2 + self.r3 + self.r4


def score_r1(ev: TranscriptEvidence, config: RubricConfig | None = None) -> tuple[float, str | None]:
    """Points for traceable interaction and, if it failed, the invalidation reason."""
    config = config or RubricConfig()
    if not ev.present:
        return 0.0, REASON_NO_ANNEX
    if ev.capped_duration_min < config.min_minutes:
        return 0.0, f"Tiempo de interacción < {config.min_minutes} min"
    missing = 5 - len(ev.modules_covered)
    return max(config.r1_floor, MAX_POINTS["r1"] - config.r1_module_step * missing), None


def originality_factor(similarity: float, config: RubricConfig | None = None) -> float:
    config = config or RubricConfig()
    lo, hi = config.sim_medium, config.sim_high
    if similarity < lo:
        return 1.0
    if similarity >= hi:
        return 0.0
    return (hi - similarity) / (hi - lo)


def score_r4(
    personal_zone_max_sim: float,
    review_answers_mark: float,
    foreign_identity: bool,
    placeholders_certain: int,
    config: RubricConfig | None = None,
) -> float:
    config = config or RubricConfig()
    points = config.r4_originality * originality_factor(personal_zone_max_sim, config)
    points += review_answers_mark
    points -= config.r4_placeholder_penalty * placeholders_certain
    if foreign_identity:
        points -= config.r4_identity_penalty
    return min(MAX_POINTS["r4"], max(0.0, points))


def combine(
    r1: tuple[float, str | None],
    manual: ManualMarks | None,
    r4: float,
    ev: TranscriptEvidence,
    config: RubricConfig | None = None,
    student_id: str = "",
) -> RubricScore:
    """Assemble the final score. ``manual=None`` means marks are still pending."""
    config = config or RubricConfig()
    r1_points, reason = r1
    if manual is None:
        r2 = r3 = 0.0
    else:
        manual.validate()
        r2, r3 = manual.r2_structure, manual.r3_technical
        if ev.numeric_check is not None and not ev.numeric_check.passed:
            r3 = max(0.0, r3 - config.r3_numeric_penalty)
    reasons = [reason] if reason else []
    valid = not reasons
    total = r1_points + r2 + r3 + r4 if valid else 0.0
    return RubricScore(
        student_id=student_id,
        r1=r1_points,
        r2=r2,
        r3=r3,
        r4=r4,
        total=total,
        valid=valid,
        passed=valid and total >= config.pass_mark,
        invalidation_reasons=reasons,
        pending_manual_review=manual is None,
    )


def grade(
    student_id: str,
    ev: TranscriptEvidence,
    manual: ManualMarks | None,
    personal_zone_max_sim: float,
    config: RubricConfig | None = None,
) -> RubricScore:
    """Run R1, R4 and the combination for one submission."""
    config = config or RubricConfig()
    review = manual.validate().r4_review_answers_quality if manual else 0.0
    r4 = score_r4(
        personal_zone_max_sim,
        review,
        bool(ev.foreign_identities),
        ev.certain_placeholders,
        config,
    )
    return combine(score_r1(ev, config), manual, r4, ev, config, student_id)
