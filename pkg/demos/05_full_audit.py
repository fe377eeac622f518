"""
Auditing a whole cohort
=======================

Write a synthetic 23-submission cohort to disk, run the full audit and print
the Markdown report. The cohort carries one short transcript, two copied
pairs and nine reports built on a shared template.
"""

import tempfile
from pathlib import Path

from cohort_audit import synthetic
from cohort_audit.config import Config
from cohort_audit.pipeline import run_audit, write_report
from cohort_audit.report import emit_markdown

work = Path(tempfile.mkdtemp())
root = synthetic.write_cohort(work / "cohort", synthetic.phase1_students())

report = run_audit(root, Config.from_mapping())
json_path, md_path = write_report(report, work / "out")

print(emit_markdown(report))
print("copy pairs:", sorted(report.copy_pairs()))
print("exit code a script would see:", report.exit_code)
print("written:", json_path, md_path)
