"""
Reading a tutor-chat transcript
===============================

Parse an exported chat, measure its gap-capped duration and list the course
modules it touched.
"""

from cohort_audit.evidence import module_coverage, parse_transcript, session_duration

chat = """\
[2024-05-10 09:00] USER: Empecemos por el Módulo 1, curvas IDR.
[09:12] TUTOR: Bien. Revisemos la tabla de intensidades.
[09:40] USER: Paso a la distribución temporal (Módulo 2).
[11:30] TUTOR: Volviste después de una pausa larga.
[11:42] USER: Ahora el SCS-CN con CN = 75.
  Sigo con el cálculo de Ia.
"""

t = parse_transcript(chat)
for m in t.messages:
    print(m.timestamp, m.role, "|", m.text.replace("\n", " / "))

# the 110-minute pause only counts up to the 15-minute gap cap
raw, capped = session_duration(t, gap_cap_min=15)
print("raw minutes:", raw, " capped minutes:", capped)
print("modules:", module_coverage(t))
print("anomalies:", t.anomalies)
