from datetime import datetime

import pytest
from hypothesis import given, settings, strategies as st

from cohort_audit.evidence import (
    EvidenceConfig,
    Transcript,
    build_evidence,
    detect_foreign_identity,
    detect_placeholders,
    module_coverage,
    parse_transcript,
    scs_cn_runoff,
    session_duration,
    verify_numeric_exercise,
)
from cohort_audit.ingest import Document, Roster, RosterEntry, Submission, Zone
from cohort_audit import synthetic

from oracles import scs_cn_exact


# --- transcript parsing -------------------------------------------------------


def test_seventeen_minute_chat(chat_17min):
    t = parse_transcript(chat_17min)
    assert len(t.messages) == 2
    assert [m.role for m in t.messages] == ["user", "tutor"]
    assert session_duration(t, 15) == (17, 15)
    assert session_duration(t, 30) == (17, 17)


def test_empty_transcript():
    t = parse_transcript("")
    assert t.messages == [] and session_duration(t) == (0, 0)


def test_midnight_rollover_bare_times():
    t = parse_transcript("[23:50] USER: tarde\n[00:10] TUTOR: ya es otro día\n")
    assert session_duration(t, 0) == (20, 20)
    assert t.messages[1].timestamp - t.messages[0].timestamp == datetime(2, 1, 2, 0, 10) - datetime(2, 1, 1, 23, 50)
    assert any("rollover" in a for a in t.anomalies)


def test_bare_time_inherits_date():
    t = parse_transcript("[2024-05-10 09:00] USER: a\n[09:30] TUTOR: b\n")
    assert t.messages[1].timestamp == datetime(2024, 5, 10, 9, 30)


def test_capped_gap_sum():
    t = parse_transcript("[10:00] USER: a\n[10:05] TUTOR: b\n[12:05] USER: c\n")
    assert session_duration(t, 15) == (125, 20)


def test_continuations_and_leading_content():
    text = "Exportado desde el navegador\n\n[10:00] USER: primera\n  sigue\nsin sangría\n[10:02] TUTOR: ok\n"
    t = parse_transcript(text)
    assert [m.role for m in t.messages] == ["unknown", "user", "tutor"]
    assert t.messages[0].timestamp is None
    assert t.messages[1].text == "primera\nsigue\nsin sangría"


def test_invalid_stamp_is_anomaly_not_message():
    t = parse_transcript("[25:99] USER: imposible\n")
    assert t.messages[0].timestamp is None
    assert any("invalid timestamp" in a for a in t.anomalies)


def test_backwards_full_dates_recorded():
    t = parse_transcript("[2024-05-10 10:00] USER: a\n[2024-05-09 10:00] USER: b\n")
    assert len(t.messages) == 2
    assert any("backwards" in a for a in t.anomalies)
    raw, capped = session_duration(t)
    assert 0 <= capped <= raw


def test_empty_stamped_message_dropped():
    t = parse_transcript("[10:00] USER:\n[10:05] TUTOR: hola\n")
    assert len(t.messages) == 1 and any("without text" in a for a in t.anomalies)


@given(st.text(max_size=300))
@settings(max_examples=300)
def test_parse_never_raises_and_is_well_formed(text):
    t = parse_transcript(text)
    assert isinstance(t, Transcript)
    assert all(m.text for m in t.messages)
    raw, capped = session_duration(t)
    assert 0 <= capped <= raw


stamp = st.builds(
    lambda h, m: f"[{h:02d}:{m:02d}] USER: x", st.integers(0, 23), st.integers(0, 59)
)


@given(st.lists(stamp, max_size=12), st.lists(st.text(max_size=20).filter(lambda s: "[" not in s), max_size=5))
def test_duration_invariant_under_unstamped_appends(lines, extra):
    base = "\n".join(lines)
    t1 = parse_transcript(base)
    t2 = parse_transcript(base + "\n" + "\n".join(extra))
    assert session_duration(t1) == session_duration(t2)
    raw, capped = session_duration(t1)
    assert capped <= raw


# --- module coverage ----------------------------------------------------------


def test_all_modules_named():
    text = "\n".join(f"[10:0{k}] USER: Módulo {k}" for k in range(1, 6))
    assert module_coverage(parse_transcript(text)) == ["M1", "M2", "M3", "M4", "M5"]


def test_only_scs_cn():
    t = parse_transcript("[10:00] USER: ¿Cómo aplico el SCS-CN?\n")
    assert module_coverage(t) == ["M4"]


def test_module_10_is_not_module_1():
    assert module_coverage(parse_transcript("[10:00] USER: modulo 10\n")) == []


def test_empty_coverage():
    assert module_coverage(parse_transcript("")) == []


# --- placeholders -------------------------------------------------------------


@pytest.mark.parametrize(
    "text", ["el tiempo fue [aquí iría el tiempo]", "[completar conclusiones]", "[TBD] y [xxx datos]"]
)
def test_certain_placeholders(text):
    hits = detect_placeholders(text)
    assert hits and all(h.kind == "certain" for h in hits)
    assert text[hits[0].start : hits[0].end] == hits[0].text


def test_numeric_bracket_not_placeholder():
    assert detect_placeholders("el intervalo [0, 1] y la cita [3]") == []


def test_suspect_placeholder_and_markdown_link():
    hits = detect_placeholders("Tiempo: [poner minutos reales]. Ver [fuente](http://x).")
    assert [h.kind for h in hits] == ["suspect"]


# --- identity -----------------------------------------------------------------

ROSTER = Roster(
    [
        RosterEntry("lucena", "Ignacio Lucena", ("nacho",)),
        RosterEntry("riva", "Marcelo Exequiel Rivadeneira", ("rivadeneira",)),
        RosterEntry("otro", "Ignacio Pérez", ("ignacio",)),
    ]
)


def _t(text):
    return parse_transcript(f"[10:00] USER: {text}\n")


def test_foreign_full_name_found():
    hits = detect_foreign_identity(_t("Ejercicio de MARCELO EXEQUIEL RIVADENEIRA"), "lucena", ROSTER)
    assert {h.student_id for h in hits} == {"riva"}


def test_own_name_not_flagged_even_with_shared_given_name():
    assert detect_foreign_identity(_t("Soy Ignacio Lucena"), "lucena", ROSTER) == []


def test_alias_inside_longer_word_not_flagged():
    assert detect_foreign_identity(_t("rivadeneiras y norivadeneira"), "lucena", ROSTER) == []


def test_accent_folding_in_names():
    hits = detect_foreign_identity(_t("habló con ignacio perez"), "lucena", ROSTER)
    assert [h.student_id for h in hits] == ["otro"]


# --- SCS-CN -------------------------------------------------------------------


def test_scs_cn_reference_values():
    assert scs_cn_runoff(50, 100) == 50
    assert scs_cn_runoff(10, 60) == 0.0  # Ia = 33.9 mm
    assert abs(scs_cn_runoff(100, 75) - scs_cn_exact(100, 75)) <= 1e-9
    assert scs_cn_runoff(100, 75) == pytest.approx(41.137148913619, abs=1e-9)


@pytest.mark.parametrize("cn", [0, -5, 100.01, float("nan")])
def test_scs_cn_rejects_bad_cn(cn):
    with pytest.raises(ValueError):
        scs_cn_runoff(50, cn)


def test_scs_cn_rejects_negative_precipitation():
    with pytest.raises(ValueError):
        scs_cn_runoff(-1, 80)


def _numeric_doc(body):
    text = "Ejercicio numérico\n" + body
    return Document(text, "plain", [Zone("personal_numeric", 0, len(text))])


def test_verify_numeric_pass_and_fail():
    ok = verify_numeric_exercise(_numeric_doc("CN = 75, P = 100 mm, Pe = 41.1 mm"), 0.05)
    assert ok.passed and ok.computed_runoff_mm == pytest.approx(scs_cn_exact(100, 75))
    bad = verify_numeric_exercise(_numeric_doc("CN = 75, P = 100 mm, Pe = 90 mm"), 0.05)
    assert not bad.passed


def test_verify_numeric_decimal_comma():
    check = verify_numeric_exercise(_numeric_doc("P = 100 mm; CN = 75; Q = 41,1 mm"), 0.05)
    assert check.claimed_runoff_mm == 41.1 and check.passed


def test_verify_numeric_prose_only():
    assert verify_numeric_exercise(_numeric_doc("Solo expliqué el método."), 0.05) is None


def test_verify_numeric_ignores_text_outside_zone():
    doc = Document("CN = 75, P = 100 mm, Pe = 41.1 mm", "plain", [])
    assert verify_numeric_exercise(doc) is None


# --- build_evidence -----------------------------------------------------------


def _submission(transcript, sid="lucena", report="Informe final\n"):
    return Submission(sid, Document(report), transcript)


def test_evidence_absent_transcript():
    ev = build_evidence(_submission(None))
    assert not ev.present and ev.message_count == 0 and ev.capped_duration_min == 0


def test_evidence_full_session(chat_150min):
    ev = build_evidence(_submission(chat_150min))
    assert ev.present
    assert ev.raw_duration_min == 150 and ev.capped_duration_min >= 120
    assert ev.modules_covered == ["M1", "M2", "M3", "M4", "M5"]


def test_evidence_foreign_identity_in_module_5():
    chat = synthetic.transcript(
        datetime(2024, 5, 10, 9, 0), 150, 12, extra={12: "Ejemplo de Marcelo Exequiel Rivadeneira"}
    )
    ev = build_evidence(_submission(chat), ROSTER)
    assert [h.student_id for h in ev.foreign_identities] == ["riva"]


def test_evidence_empty_transcript_file():
    ev = build_evidence(_submission(""))
    assert not ev.present and ev.anomalies


def test_evidence_gap_cap_disabled(chat_17min):
    ev = build_evidence(_submission(chat_17min), config=EvidenceConfig(gap_cap=0))
    assert ev.capped_duration_min == ev.raw_duration_min == 17
