"""Process evidence from the exported tutor chat (Anexo A) and the report.

Canonical transcript grammar, one message per stamped line::

    [2024-05-10 14:02] USER: texto
    [14:05] TUTOR: texto
        continuation lines are appended to the previous message

A bare ``HH:MM`` stamp takes its date from the previous stamped message; if
it is earlier than that stamp the date rolls forward one day.

Parsing never raises. Garbled input produces a (possibly empty) transcript
plus a list of anomalies, since a broken export is itself evidence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta

from .ingest import Document, Roster, Submission
from .textprep import fold_offsets

ROLE_ALIASES = {
    "user": "user",
    "usuario": "user",
    "estudiante": "user",
    "alumno": "user",
    "tutor": "tutor",
    "assistant": "tutor",
    "asistente": "tutor",
    "chatgpt": "tutor",
}
MODULES = ("M1", "M2", "M3", "M4", "M5")
NOMINAL_DATE = date(1970, 1, 1)

_STAMP = re.compile(
    r"^\s*\[\s*(?:(\d{4})-(\d{1,2})-(\d{1,2})[ T]+)?(\d{1,2}):(\d{2})\s*\]\s*"
    r"([^\W\d_]+)\s*:[ \t]?(.*)$"
)


@dataclass
class Message:
    timestamp: datetime | None
    role: str
    text: str
    line: int = 0


@dataclass
class Transcript:
    messages: list[Message] = field(default_factory=list)
    source: str = ""
    anomalies: list[str] = field(default_factory=list)

    def stamped(self) -> list[datetime]:
        return [m.timestamp for m in self.messages if m.timestamp is not None]


@dataclass
class PlaceholderHit:
    start: int
    end: int
    text: str
    kind: str  # "certain" or "suspect"


@dataclass
class IdentityHit:
    student_id: str
    matched: str
    message_index: int


@dataclass
class ScsCnCheck:
    precipitation_mm: float
    curve_number: float
    claimed_runoff_mm: float
    computed_runoff_mm: float
    passed: bool


@dataclass
class TranscriptEvidence:
    present: bool = False
    raw_duration_min: int = 0
    capped_duration_min: int = 0
    message_count: int = 0
    modules_covered: list[str] = field(default_factory=list)
    placeholder_hits: list[PlaceholderHit] = field(default_factory=list)
    foreign_identities: list[IdentityHit] = field(default_factory=list)
    anomalies: list[str] = field(default_factory=list)
    numeric_check: ScsCnCheck | None = None

    @property
    def certain_placeholders(self) -> int:
        return sum(h.kind == "certain" for h in self.placeholder_hits)


@dataclass(frozen=True)
class EvidenceConfig:
    min_minutes: int = 120
    gap_cap: int = 15
    numeric_tol: float = 0.05
    module_markers: tuple[tuple[str, str], ...] = (
        ("M1", r"intensidad.durac|\bidr\b"),
        ("M2", r"distribucion temporal"),
        ("M3", r"distribucion areal"),
        ("M4", r"scs.?cn|abstraccion"),
        ("M5", r"integracion|hietograma"),
    )


# --- transcript parsing -------------------------------------------------------


def _stamp(m: re.Match, prev: datetime | None, anomalies: list[str], lineno: int) -> datetime | None:
    year, month, day, hh, mm = m.group(1, 2, 3, 4, 5)
    try:
        hour, minute = int(hh), int(mm)
        if year:
            return datetime(int(year), int(month), int(day), hour, minute)
        base = prev.date() if prev else NOMINAL_DATE
        ts = datetime.combine(base, datetime.min.time()).replace(hour=hour, minute=minute)
    except ValueError:
        anomalies.append(f"line {lineno}: invalid timestamp {m.group(0).strip()[:40]!r}")
        return None
    if prev is not None and ts < prev:
        try:
            ts += timedelta(days=1)
        except OverflowError:
            anomalies.append(f"line {lineno}: timestamp out of range")
            return None
        anomalies.append(f"line {lineno}: time earlier than previous stamp, assumed midnight rollover")
    return ts


def parse_transcript(text: str, source: str = "") -> Transcript:
    t = Transcript(source=source)
    prev: datetime | None = None
    current: list[str] | None = None
    pending: list[tuple[datetime | None, str, int]] = []
    bodies: list[list[str]] = []

    for lineno, line in enumerate(text.splitlines(), 1):
        m = _STAMP.match(line)
        ts = _stamp(m, prev, t.anomalies, lineno) if m else None
        if m and ts is not None:
            if prev is not None and ts < prev:
                t.anomalies.append(f"line {lineno}: timestamp goes backwards")
            prev = ts
            role = ROLE_ALIASES.get(m.group(6).lower(), "unknown")
            pending.append((ts, role, lineno))
            current = [m.group(7)]
            bodies.append(current)
        elif current is None:
            if not line.strip():
                continue
            pending.append((None, "unknown", lineno))
            current = [line]
            bodies.append(current)
        else:
            current.append(line.strip())

    for (ts, role, lineno), body in zip(pending, bodies):
        body_text = "\n".join(body).strip()
        if not body_text:
            t.anomalies.append(f"line {lineno}: message without text dropped")
            continue
        t.messages.append(Message(ts, role, body_text, lineno))
    return t


def session_duration(t: Transcript, gap_cap_min: int = 15) -> tuple[int, int]:
    """Raw span and gap-capped active time of a transcript, in minutes.

    ``gap_cap_min = 0`` disables capping. Backwards steps count as zero and
    capped time never exceeds the raw span.
    """
    stamps = t.stamped()
    if len(stamps) < 2:
        return 0, 0
    raw = max(0, int((stamps[-1] - stamps[0]).total_seconds() // 60))
    if gap_cap_min <= 0:
        return raw, raw
    capped = 0
    for a, b in zip(stamps, stamps[1:]):
        gap = max(0, int((b - a).total_seconds() // 60))
        capped += min(gap, gap_cap_min)
    return raw, min(capped, raw)


def module_coverage(t: Transcript, markers=None) -> list[str]:
    markers = markers or EvidenceConfig.module_markers
    rx = {
        mod: re.compile(rf"modulo\s*{mod[1:]}(?!\d)|{topic}", re.IGNORECASE)
        for mod, topic in markers
    }
    covered = set()
    for msg in t.messages:
        folded = fold_offsets(msg.text)
        covered.update(mod for mod, r in rx.items() if r.search(folded))
    return sorted(covered)


# --- report detectors ---------------------------------------------------------

_CERTAIN = re.compile(r"\[(aquí|aqui|completar|insertar|todo|tbd|xxx)\b[^\]]*\]", re.IGNORECASE)
_BRACKET = re.compile(r"\[([^\[\]\n]{3,80})\](?!\()")
_FILLER = re.compile(
    r"\b(iria|ira|va|van|poner|agregar|anadir|colocar|incluir|escribir|rellenar|"
    r"completar|insertar|pendiente|falta|reemplazar|"
    r"deberia|podria|seria|tendria|habria|pondria|quedaria)\b"
)


def detect_placeholders(doc: Document | str) -> list[PlaceholderHit]:
    """Unfilled template brackets such as ``[aquí iría el tiempo]``.

    Brackets opening with a template keyword are ``certain``; other short
    bracketed spans containing a filler verb are ``suspect``. Markdown links
    and purely numeric spans like ``[0, 1]`` are ignored.
    """
    text = doc.raw_text if isinstance(doc, Document) else doc
    hits = []
    taken = set()
    for m in _CERTAIN.finditer(text):
        hits.append(PlaceholderHit(m.start(), m.end(), m.group(0), "certain"))
        taken.add(m.start())
    for m in _BRACKET.finditer(text):
        if m.start() in taken:
            continue
        if _FILLER.search(fold_offsets(m.group(1))):
            hits.append(PlaceholderHit(m.start(), m.end(), m.group(0), "suspect"))
    hits.sort(key=lambda h: h.start)
    return hits


def _name_pattern(name: str) -> re.Pattern | None:
    words = fold_offsets(name).split()
    if not words:
        return None
    return re.compile(r"(?<!\w)" + r"\s+".join(map(re.escape, words)) + r"(?!\w)")


def detect_foreign_identity(t: Transcript, self_id: str, roster: Roster) -> list[IdentityHit]:
    """Names or aliases of other roster students found in the chat.

    The student's own name and aliases are blanked out first, so a shared
    given name never triggers on the student's own signature.
    """
    own = [_name_pattern(n) for e in roster.entries if e.student_id == self_id
           for n in (e.full_name, *e.name_aliases)]
    own = [p for p in own if p]
    others = []
    for e in roster.entries:
        if e.student_id == self_id:
            continue
        for name in (e.full_name, *e.name_aliases):
            p = _name_pattern(name)
            if p:
                others.append((e.student_id, name, p))
    hits = []
    seen = set()
    for idx, msg in enumerate(t.messages):
        folded = fold_offsets(msg.text)
        for p in own:
            folded = p.sub(lambda m: " " * len(m.group(0)), folded)
        for sid, name, p in others:
            if (sid, idx) not in seen and p.search(folded):
                seen.add((sid, idx))
                hits.append(IdentityHit(sid, name, idx))
    return hits


# --- SCS-CN check -------------------------------------------------------------


def scs_cn_runoff(precipitation_mm: float, curve_number: float) -> float:
    """Direct runoff (mm) by the SCS curve-number method with Ia = 0.2 S."""
    if not 0 < curve_number <= 100:
        raise ValueError(f"curve number must lie in (0, 100], got {curve_number}")
    if not precipitation_mm >= 0:
        raise ValueError(f"precipitation must be >= 0, got {precipitation_mm}")
    s = 25400.0 / curve_number - 254.0
    excess = precipitation_mm - 0.2 * s
    if excess <= 0:
        return 0.0
    # written as excess * ratio so that Q(P, 100) == P and Q <= P exactly
    return excess * (excess / (excess + s))


_NUM = r"(\d+(?:[.,]\d+)?)"
_P_RX = re.compile(rf"\bP\s*=\s*{_NUM}\s*mm")
_CN_RX = re.compile(rf"\bCN\s*=\s*{_NUM}")
_Q_RX = re.compile(rf"\b(?:Q|Pe)\s*=\s*{_NUM}\s*mm")


def _num(m: re.Match) -> float:
    return float(m.group(1).replace(",", "."))


def verify_numeric_exercise(doc: Document, tolerance_rel: float = 0.05) -> ScsCnCheck | None:
    """Recompute the SCS-CN runoff claimed in the numeric-exercise zone.

    Returns None when the zone does not state P, CN and Q/Pe explicitly.
    """
    text = doc.zone_text("personal_numeric")
    found = [rx.search(text) for rx in (_P_RX, _CN_RX, _Q_RX)]
    if not all(found):
        return None
    p, cn, claimed = (_num(m) for m in found)
    try:
        computed = scs_cn_runoff(p, cn)
    except ValueError:
        return None
    ok = abs(claimed - computed) <= tolerance_rel * max(1.0, computed)
    return ScsCnCheck(p, cn, claimed, computed, ok)


def build_evidence(sub: Submission, roster: Roster | None = None, config: EvidenceConfig | None = None) -> TranscriptEvidence:
    config = config or EvidenceConfig()
    roster = roster or Roster()
    ev = TranscriptEvidence(
        placeholder_hits=detect_placeholders(sub.report),
        numeric_check=verify_numeric_exercise(sub.report, config.numeric_tol),
    )
    if sub.transcript_text is None:
        return ev
    t = parse_transcript(sub.transcript_text, source=sub.student_id)
    ev.anomalies = list(t.anomalies)
    if not t.messages:
        ev.anomalies.append("transcript file present but contains no messages")
        return ev
    ev.present = True
    ev.raw_duration_min, ev.capped_duration_min = session_duration(t, config.gap_cap)
    ev.message_count = len(t.messages)
    ev.modules_covered = module_coverage(t, config.module_markers)
    ev.foreign_identities = detect_foreign_identity(t, sub.student_id, roster)
    if not t.stamped():
        ev.anomalies.append("transcript has no timestamps")
    return ev
