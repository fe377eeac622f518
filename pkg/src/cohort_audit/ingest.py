"""Cohort loading and zone segmentation of report text.

Layout on disk::

    <root>/<student_id>/report.txt   (or report.md)
    <root>/<student_id>/anexo_a.txt  optional chat transcript
    <root>/<student_id>/meta.txt     optional, ``extraction_method=<...>``
    <root>/<student_id>/marks.txt    optional manual marks (see rubric)

Text must already be extracted from the PDFs; the extractor is recorded via
``meta.txt`` only.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .textprep import fold_offsets

log = logging.getLogger(__name__)

EXTRACTION_METHODS = ("plain", "native_pdf_text", "ocr", "unknown")
ZONE_LABELS = ("tutor_text", "personal_numeric", "personal_review_answers", "other")

REPORT_NAMES = ("report.txt", "report.md")
TRANSCRIPT_NAME = "anexo_a.txt"
META_NAME = "meta.txt"
ROSTER_NAME = "roster.tsv"

# leading decoration allowed before a heading: markdown hashes, list bullets,
# numbering such as "3." or "b)"
_DECORATION = re.compile(r"[ \t#>*\-–—]*(?:(?:\d+|[a-z])[.)]\s*)?[ \t:]*")


@dataclass(frozen=True)
class Zone:
    label: str
    start: int
    end: int

    def __post_init__(self):
        if self.label not in ZONE_LABELS:
            raise ValueError(f"unknown zone label {self.label!r}")
        if not 0 <= self.start < self.end:
            raise ValueError(f"empty or negative zone [{self.start}, {self.end})")


@dataclass
class Document:
    raw_text: str
    extraction_method: str = "unknown"
    zones: list[Zone] = field(default_factory=list)

    def zone_text(self, label: str) -> str:
        """Concatenated text of every zone carrying ``label``."""
        return "\n".join(self.raw_text[z.start : z.end] for z in self.zones if z.label == label)

    def label_at(self, offset: int) -> str:
        for z in self.zones:
            if z.start <= offset < z.end:
                return z.label
        return "other"


@dataclass
class Submission:
    student_id: str
    report: Document
    transcript_text: str | None = None
    source_dir: str = ""
    unreadable: bool = False


@dataclass(frozen=True)
class RosterEntry:
    student_id: str
    full_name: str
    name_aliases: tuple[str, ...] = ()


@dataclass
class Roster:
    entries: list[RosterEntry] = field(default_factory=list)

    def ids(self) -> set[str]:
        return {e.student_id for e in self.entries}


def parse_roster(text: str) -> Roster:
    """Parse ``<student_id>\\t<full_name>\\t<alias1,alias2,...>`` lines."""
    entries = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.rstrip("\r\n").split("\t")
        if len(parts) < 2 or not parts[0].strip() or not parts[1].strip():
            raise ValueError(f"roster line {lineno}: expected id<TAB>full name[<TAB>aliases]")
        sid = parts[0].strip()
        if sid in seen:
            raise ValueError(f"roster line {lineno}: duplicate student id {sid!r}")
        seen.add(sid)
        aliases = ()
        if len(parts) > 2:
            aliases = tuple(a.strip().lower() for a in parts[2].split(",") if a.strip())
        entries.append(RosterEntry(sid, parts[1].strip(), aliases))
    return Roster(entries)


def load_roster(path: str | Path) -> Roster:
    return parse_roster(Path(path).read_text("utf-8-sig"))


@dataclass(frozen=True)
class ZoneMarkerConfig:
    """Heading regexes per zone label, tried in order; first match wins."""

    markers: tuple[tuple[str, str], ...] = (
        ("personal_numeric", r"ejercicio num[eé]rico|c[aá]lculo propio"),
        (
            "personal_review_answers",
            r"respuestas? (a las|de) (5 )?preguntas de repaso|preguntas de repaso|respuestas? de repaso",
        ),
        ("tutor_text", r"informe (acad[eé]mico )?final|resumen de temas"),
    )

    def compiled(self) -> list[tuple[str, re.Pattern]]:
        # patterns run against folded text, so fold the pattern literals too
        return [(label, re.compile(fold_offsets(rx), re.IGNORECASE)) for label, rx in self.markers]


@dataclass(frozen=True)
class IngestConfig:
    markers: ZoneMarkerConfig = field(default_factory=ZoneMarkerConfig)


def _heading_label(line: str, patterns) -> str | None:
    lead = _DECORATION.match(line).end()
    for label, rx in patterns:
        if rx.match(line, lead):
            return label
    return None


def segment_zones(doc: Document, markers: ZoneMarkerConfig | None = None) -> Document:
    """Return a copy of ``doc`` with zones derived from heading lines.

    A heading is a line whose text, after list or markdown decoration,
    starts with one of the marker patterns. Each zone runs from its heading
    to the next heading of any label, or to the end of the text. Matching is
    case- and accent-insensitive.
    """
    patterns = (markers or ZoneMarkerConfig()).compiled()
    folded = fold_offsets(doc.raw_text)
    starts = []
    pos = 0
    for line in folded.splitlines(keepends=True):
        label = _heading_label(line, patterns)
        if label is not None:
            starts.append((pos, label))
        pos += len(line)
    zones = []
    for i, (start, label) in enumerate(starts):
        end = starts[i + 1][0] if i + 1 < len(starts) else len(doc.raw_text)
        if start < end:
            zones.append(Zone(label, start, end))
    return Document(doc.raw_text, doc.extraction_method, zones)


def _read_text(path: Path) -> str:
    return path.read_bytes().decode("utf-8-sig", errors="replace")


def _extraction_method(student_dir: Path) -> str:
    meta = student_dir / META_NAME
    if not meta.is_file():
        return "unknown"
    for line in _read_text(meta).splitlines():
        key, sep, value = line.partition("=")
        if sep and key.strip() == "extraction_method":
            value = value.strip()
            if value in EXTRACTION_METHODS:
                return value
            log.warning("%s: unknown extraction_method %r", meta, value)
    return "unknown"


def load_submission(student_dir: Path, config: IngestConfig | None = None) -> Submission:
    config = config or IngestConfig()
    report_path = next(
        (student_dir / n for n in REPORT_NAMES if (student_dir / n).is_file()), None
    )
    raw = _read_text(report_path) if report_path else ""
    transcript = None
    if (student_dir / TRANSCRIPT_NAME).is_file():
        transcript = _read_text(student_dir / TRANSCRIPT_NAME)
    doc = Document(raw, _extraction_method(student_dir))
    unreadable = not raw.strip()
    if unreadable:
        log.warning("%s: no readable report", student_dir)
    else:
        doc = segment_zones(doc, config.markers)
    return Submission(student_dir.name, doc, transcript, str(student_dir), unreadable)


def load_cohort(root_dir, roster: Roster | None = None, config: IngestConfig | None = None) -> list[Submission]:
    """One submission per student subdirectory, sorted by student id.

    Raises ``OSError`` if ``root_dir`` cannot be listed.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise NotADirectoryError(f"cohort root is not a directory: {root}")
    dirs = sorted((p for p in root.iterdir() if p.is_dir() and not p.name.startswith(".")), key=lambda p: p.name)
    if not dirs:
        log.warning("cohort root %s contains no student folders", root)
    subs = [load_submission(d, config) for d in dirs]
    if roster and roster.entries:
        known = roster.ids()
        for s in subs:
            if s.student_id not in known:
                log.warning("student %s is not in the roster", s.student_id)
    return subs
