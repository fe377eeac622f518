"""Deterministic synthetic cohorts for demos and tests.

Each cohort is built to a known profile (transcripts attached, copied pairs,
reports sharing a template) so the audit's findings can be checked against
it. Word content is pseudo-Spanish filler drawn from a seeded generator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

from .evidence import scs_cn_runoff

_ONSETS = ("b", "c", "d", "f", "g", "l", "m", "n", "p", "r", "s", "t", "v", "ch", "tr", "pl")
_VOWELS = ("a", "e", "i", "o", "u")
_CODAS = ("", "", "", "n", "r", "l")

TUTOR_TEXT = (
    "El método del número de curva estima la escorrentía directa a partir de la "
    "precipitación total y de la retención potencial máxima del suelo. La abstracción "
    "inicial se adopta como una fracción de la retención potencial. Las curvas "
    "intensidad duración recurrencia resumen el régimen local de lluvias intensas y "
    "permiten definir la lluvia de diseño. La distribución temporal reparte el volumen "
    "de la tormenta dentro de su duración; la distribución areal corrige la lluvia "
    "puntual según la superficie de la cuenca. Finalmente el hietograma de diseño "
    "integra los módulos anteriores y alimenta el cálculo de precipitación efectiva."
)

MODULE_TOPICS = (
    "Módulo 1: curvas intensidad-duración-recurrencia locales",
    "Módulo 2: distribución temporal de la lluvia de diseño",
    "Módulo 3: distribución areal sobre la cuenca de 10 km2",
    "Módulo 4: abstracciones por el método SCS-CN",
    "Módulo 5: integración final y hietograma de diseño",
)


def vocabulary(size: int, seed: int = 0) -> list[str]:
    """``size`` distinct pseudo-words, none of them a stop-word."""
    rng = random.Random(seed)
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < size:
        w = "".join(
            rng.choice(_ONSETS) + rng.choice(_VOWELS) for _ in range(rng.randint(2, 4))
        ) + rng.choice(_CODAS)
        # a final consonant other than s keeps the light stemmer from merging words
        if w[-1] in "aeiou":
            w += rng.choice("nrl")
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def sentences(words: list[str], rng: random.Random, n_tokens: int) -> str:
    out, line = [], []
    for _ in range(n_tokens):
        line.append(rng.choice(words))
        if len(line) >= rng.randint(8, 16):
            out.append(" ".join(line).capitalize() + ".")
            line = []
    if line:
        out.append(" ".join(line).capitalize() + ".")
    return " ".join(out)


def mutate(text: str, fraction: float, words: list[str], rng: random.Random) -> str:
    """Replace roughly ``fraction`` of the whitespace-separated words."""
    toks = text.split()
    for i in range(len(toks)):
        if rng.random() < fraction:
            toks[i] = rng.choice(words) + ("." if toks[i].endswith(".") else "")
    return " ".join(toks)


def random_corpus(n_docs: int = 50, n_tokens: int = 500, seed: int = 0) -> list[list[str]]:
    """Token lists in families of near-duplicates with graded mutation rates.

    Pairs inside a family span Jaccard values from near 1 down to near 0;
    pairs across families are almost disjoint.
    """
    rng = random.Random(seed)
    words = vocabulary(3000, seed)
    docs = []
    family_size = 5
    for f in range(0, n_docs, family_size):
        base = [rng.choice(words) for _ in range(n_tokens)]
        for m in range(min(family_size, n_docs - f)):
            rate = (0.0, 0.03, 0.08, 0.15, 0.3)[m] * rng.uniform(0.8, 1.2)
            docs.append([rng.choice(words) if rng.random() < rate else t for t in base])
    return docs


# --- transcripts ---------------------------------------------------------------


def transcript(
    start: datetime,
    minutes: int,
    step: int = 12,
    modules: tuple[int, ...] = (1, 2, 3, 4, 5),
    extra: dict[int, str] | None = None,
    full_dates: bool = True,
) -> str:
    """A canonical chat export spanning ``minutes`` with a message every ``step``.

    ``extra`` maps a message index to text appended to that message.
    """
    stamps = [start + timedelta(minutes=m) for m in range(0, minutes, step)]
    stamps.append(start + timedelta(minutes=minutes))
    lines = []
    topics = [MODULE_TOPICS[k - 1] for k in modules] or ["Consulta general"]
    for i, ts in enumerate(stamps):
        stamp = ts.strftime("%Y-%m-%d %H:%M") if full_dates or i == 0 else ts.strftime("%H:%M")
        role = "USER" if i % 2 == 0 else "TUTOR"
        topic = topics[min(i * len(topics) // len(stamps), len(topics) - 1)]
        text = f"{topic}. Paso {i + 1} del ejercicio guiado."
        if extra and i in extra:
            text += " " + extra[i]
        lines.append(f"[{stamp}] {role}: {text}")
        if role == "TUTOR":
            lines.append("  Revisemos las unidades antes de continuar.")
    return "\n".join(lines) + "\n"


def numeric_section(p: float, cn: float, claimed: float | None = None) -> str:
    q = scs_cn_runoff(p, cn) if claimed is None else claimed
    s = 25400 / cn - 254
    return (
        "Ejercicio numérico\n"
        f"Cuenca de 10 km2 con CN = {cn:g}, P = {p:g} mm.\n"
        f"Retención potencial S = {s:.2f} mm, abstracción inicial Ia = {0.2 * s:.2f} mm.\n"
        f"Precipitación efectiva Pe = {q:.1f} mm.\n"
    )


def review_section(text: str) -> str:
    return "Respuestas a las preguntas de repaso\n" + text + "\n"


@dataclass
class Student:
    student_id: str
    full_name: str
    report: str | None
    transcript: str | None = None
    marks: dict[str, float] | None = None
    aliases: tuple[str, ...] = ()
    meta: str | None = "plain"


def write_cohort(root: str | Path, students: list[Student]) -> Path:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    roster = []
    for s in students:
        d = root / s.student_id
        d.mkdir(exist_ok=True)
        if s.report is not None:
            (d / "report.txt").write_text(s.report, encoding="utf-8")
        if s.transcript is not None:
            (d / "anexo_a.txt").write_text(s.transcript, encoding="utf-8")
        if s.marks is not None:
            lines = [f"{k}={v:g}" for k, v in s.marks.items()]
            (d / "marks.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        if s.meta:
            (d / "meta.txt").write_text(f"extraction_method={s.meta}\n", encoding="utf-8")
        roster.append(f"{s.student_id}\t{s.full_name}\t{','.join(s.aliases)}")
    (root / "roster.tsv").write_text("\n".join(roster) + "\n", encoding="utf-8")
    return root


# --- cohorts -------------------------------------------------------------------


def demo_students(seed: int = 3) -> list[Student]:
    """Three complete, valid submissions with distinct personal zones."""
    rng = random.Random(seed)
    words = vocabulary(1500, seed)
    start = datetime(2024, 5, 10, 9, 0)
    specs = [
        ("a01", "Ana Belén Quiroga", (90.0, 80.0), 150, (1, 2, 3, 4, 5), {"r2": 18, "r3": 31, "r4_review": 14}),
        ("a02", "Bruno Ledesma", (100.0, 75.0), 180, (1, 2, 3, 4, 5), {"r2": 16, "r3": 29, "r4_review": 12}),
        ("a03", "Carla Ibáñez", (120.0, 70.0), 130, (1, 2, 3, 4), {"r2": 14, "r3": 25, "r4_review": 11}),
    ]
    out = []
    for i, (sid, name, (p, cn), minutes, mods, marks) in enumerate(specs):
        report = (
            "Informe académico final\n"
            + TUTOR_TEXT
            + "\n\n"
            + numeric_section(p, cn)
            + "\n"
            + review_section(sentences(words, rng, 120))
        )
        chat = transcript(start + timedelta(days=i), minutes, 12, mods)
        out.append(Student(sid, name, report, chat, marks, (name.split()[0].lower(),)))
    return out


def phase1_students(seed: int = 11) -> list[Student]:
    """23 submissions with the first-round failure profile.

    One transcript (17 minutes), two copied pairs, nine reports built on the
    same template, three numeric exercises and placeholders in six reports.
    """
    rng = random.Random(seed)
    words = vocabulary(6000, seed)
    template = sentences(words, rng, 600)
    placeholders = ("[aquí iría el tiempo]", "[completar conclusiones]")
    ids = [f"s{i:02d}" for i in range(1, 24)]
    reports = {}
    for i, sid in enumerate(ids):
        body = sentences(words, rng, 400)
        reports[sid] = "Informe final\n" + body + "\n"
    for sid in ids[11:20]:  # shared AI template
        reports[sid] = "Informe final\n" + template + "\n" + sentences(words, rng, 100) + "\n"
    for sid, (p, cn) in zip(("s01", "s04", "s06"), ((80.0, 78.0), (95.0, 72.0), (60.0, 85.0))):
        reports[sid] += numeric_section(p, cn)
    for sid in ("s05", "s07", "s08", "s09", "s21", "s22"):
        reports[sid] = reports[sid].replace("\n", f" Tiempo dedicado {rng.choice(placeholders)}.\n", 1)
    for a, b in (("s02", "s03"), ("s10", "s11")):
        reports[b] = mutate(reports[a], 0.03, words, rng)
    chat = transcript(datetime(2024, 4, 2, 10, 0), 17, 17, modules=(4,))
    students = []
    for sid in ids:
        marks = {"r2": 10, "r3": 15, "r4_review": 5} if sid in ("s01", "s04", "s06") else None
        students.append(
            Student(sid, f"Estudiante {sid.upper()}", reports[sid], chat if sid == "s01" else None, marks)
        )
    return students
