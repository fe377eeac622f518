"""Command-line entry point.

    cohort-audit audit <root> [--config PATH] [--out DIR] [--scale-10]
    cohort-audit evidence <transcript>
    cohort-audit similarity <root> [--config PATH]

Exit status: 0 success, 1 bad configuration or I/O failure, 2 when the run
found a copy-level pair or an invalidated submission.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .config import Config, ConfigError
from .evidence import build_evidence
from .ingest import Document, Submission, load_cohort
from .pipeline import resolve_roster, run_audit, write_report
from .report import pairwise_table
from .rubric import MarksError
from .similarity import pairwise_audit

DEFAULT_OUT = "audit_report"


def cmd_audit(root_dir, config_path=None, out_dir=None, scale_10=False) -> int:
    config = Config.load(config_path)
    if scale_10:
        config = Config.from_mapping({**config.values, "report.scale": "10"}, env={})
    report = run_audit(root_dir, config)
    out = out_dir or config.values["out"] or DEFAULT_OUT
    write_report(report, out)
    s = report.stats
    mean = s.mean / 10 if scale_10 else s.mean
    print(
        f"n={s.n} mean={mean:.1f} passed={s.count_pass} invalid={s.count_invalid} "
        f"copy_pairs={len(report.copy_pairs())} -> {out}"
    )
    return report.exit_code


def cmd_evidence(transcript_path, config_path=None) -> int:
    config = Config.load(config_path)
    path = Path(transcript_path)
    text = path.read_bytes().decode("utf-8-sig", errors="replace")
    sub = Submission(path.stem, Document(""), text, str(path.parent))
    ev = build_evidence(sub, None, config.evidence)
    if not text.strip():
        ev.anomalies.insert(0, "transcript file is empty")
    print(json.dumps(dataclasses.asdict(ev), ensure_ascii=False, indent=2))
    return 0


def cmd_similarity(root_dir, config_path=None) -> int:
    config = Config.load(config_path)
    root = Path(root_dir)
    subs = load_cohort(root, resolve_roster(root, config), config.ingest)
    findings = pairwise_audit(subs, config.similarity, config.textprep)
    print("\n".join(pairwise_table(findings, "low")))
    return 2 if any(f.level == "copy" for f in findings) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohort-audit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit", help="run the full audit and write report.json / report.md")
    p.add_argument("root")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--scale-10", action="store_true", help="report totals on the 0-10 scale")

    p = sub.add_parser("evidence", help="print the evidence extracted from one transcript")
    p.add_argument("transcript")
    p.add_argument("--config")

    p = sub.add_parser("similarity", help="print pairwise similarity findings only")
    p.add_argument("root")
    p.add_argument("--config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "audit":
            return cmd_audit(args.root, args.config, args.out, args.scale_10)
        if args.command == "evidence":
            return cmd_evidence(args.transcript, args.config)
        return cmd_similarity(args.root, args.config)
    except (ConfigError, MarksError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
