import json
import subprocess
import sys
from pathlib import Path

import pytest

from cohort_audit import synthetic
from cohort_audit.cli import main
from cohort_audit.config import DEFAULTS, Config, ConfigError, parse_config_text

FIXTURES = Path(__file__).parent / "fixtures"


def test_audit_demo_cohort(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["audit", str(FIXTURES / "demo_cohort"), "--out", str(out)]) == 0
    assert (out / "report.json").is_file() and (out / "report.md").is_file()
    line = capsys.readouterr().out.strip()
    assert line.startswith("n=3 mean=86.0 passed=3 invalid=0 copy_pairs=0")


def test_audit_scale_10(tmp_path, capsys):
    assert main(["audit", str(FIXTURES / "demo_cohort"), "--out", str(tmp_path), "--scale-10"]) == 0
    assert "mean=8.6 " in capsys.readouterr().out
    assert "| mean | 8.60 /10 |" in (tmp_path / "report.md").read_text("utf-8")


def test_audit_copy_pair_exits_2(tmp_path):
    students = synthetic.demo_students()
    students[1].report = students[0].report
    root = synthetic.write_cohort(tmp_path / "c", students)
    assert main(["audit", str(root), "--out", str(tmp_path / "o")]) == 2


def test_audit_bad_key_exits_1(tmp_path, capsys):
    cfg = tmp_path / "audit.cfg"
    cfg.write_text("# thresholds\nsim.nois=0.3\n", encoding="utf-8")
    assert main(["audit", str(FIXTURES / "demo_cohort"), "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "sim.nois" in capsys.readouterr().err


def test_audit_missing_root_exits_1(tmp_path):
    assert main(["audit", str(tmp_path / "nope"), "--out", str(tmp_path)]) == 1


def test_audit_bad_marks_exits_1(tmp_path, capsys):
    root = synthetic.write_cohort(tmp_path / "c", synthetic.demo_students())
    (root / "a02" / "marks.txt").write_text("r2=25\nr3=1\nr4_review=1\n", encoding="utf-8")
    assert main(["audit", str(root), "--out", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err
    assert "a02" in err and "r2_structure" in err


def test_evidence_17_minutes(tmp_path, capsys, chat_17min):
    path = tmp_path / "anexo_a.txt"
    path.write_text(chat_17min, encoding="utf-8")
    assert main(["evidence", str(path)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["raw_duration_min"] == 17 and data["present"]


def test_evidence_empty_file(tmp_path, capsys):
    path = tmp_path / "anexo_a.txt"
    path.write_text("", encoding="utf-8")
    assert main(["evidence", str(path)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert "transcript file is empty" in data["anomalies"]


def test_evidence_full_coverage(tmp_path, capsys, chat_150min):
    path = tmp_path / "anexo_a.txt"
    path.write_text(chat_150min, encoding="utf-8")
    main(["evidence", str(path)])
    assert json.loads(capsys.readouterr().out)["modules_covered"] == ["M1", "M2", "M3", "M4", "M5"]


def test_evidence_missing_file(tmp_path):
    assert main(["evidence", str(tmp_path / "missing.txt")]) == 1


def test_similarity_single_doc(tmp_path, capsys):
    root = synthetic.write_cohort(tmp_path / "c", synthetic.demo_students()[:1])
    assert main(["similarity", str(root)]) == 0
    assert capsys.readouterr().out.strip() == "No pair at low level or above."


def test_similarity_identical_docs(tmp_path, capsys):
    students = synthetic.demo_students()[:2]
    students[1].report = students[0].report
    root = synthetic.write_cohort(tmp_path / "c", students)
    assert main(["similarity", str(root)]) == 2
    out = capsys.readouterr().out
    assert "| a01 / a02 | full_document | 1.000 | 1.000 | copy |" in out


def test_similarity_planted_pair(tmp_path, capsys, rng):
    words = synthetic.vocabulary(3000, 5)
    base = synthetic.sentences(words, rng, 500)
    students = [
        synthetic.Student("p1", "Uno", base),
        synthetic.Student("p2", "Dos", synthetic.mutate(base, 0.10, words, rng)),
        synthetic.Student("p3", "Tres", synthetic.sentences(words, rng, 500)),
    ]
    root = synthetic.write_cohort(tmp_path / "c", students)
    assert main(["similarity", str(root)]) == 2
    rows = [l for l in capsys.readouterr().out.splitlines() if l.endswith("| copy |")]
    assert len(rows) == 1 and rows[0].startswith("| p1 / p2 | full_document |")


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "cohort_audit", "audit", str(FIXTURES / "demo_cohort"), "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr


# --- config -------------------------------------------------------------------


def test_defaults_build_every_section():
    cfg = Config.from_mapping(env={})
    assert cfg.similarity.hash_count == 128 and cfg.similarity.bands * cfg.similarity.rows == 128
    assert cfg.thresholds.copy == 0.80 and cfg.evidence.gap_cap == 15
    assert cfg.echo() == dict(sorted(DEFAULTS.items()))


def test_parse_config_text_comments_and_values():
    assert parse_config_text("# c\n\nsim.copy = 0.85\nseed=7\n") == {"sim.copy": "0.85", "seed": "7"}


@pytest.mark.parametrize(
    "overrides, key",
    [({"lsh.bands": "16"}, "lsh.bands"), ({"sim.medium": "0.9"}, "sim.*"), ({"seed": "-1"}, "seed"),
     ({"textprep.fold": "maybe"}, "textprep.fold"), ({"zones.tutor_text": "("}, "zones.tutor_text"),
     ({"report.std": "bessel"}, "report.*"), ({"evidence.gap_cap": "x"}, "evidence.gap_cap")],
)
def test_config_errors_name_the_key(overrides, key):
    with pytest.raises(ConfigError) as exc:
        Config.from_mapping(overrides, env={})
    assert exc.value.key == key


def test_missing_key_value_separator():
    with pytest.raises(ConfigError):
        parse_config_text("seed\n")


def test_seed_env_override():
    cfg = Config.from_mapping({"seed": "3"}, env={"COHORT_AUDIT_SEED": "99"})
    assert cfg.seed == 99 and cfg.similarity.seed == 99


def test_seed_changes_minhash_not_cosine(tmp_path):
    from cohort_audit.pipeline import run_audit

    a = run_audit(FIXTURES / "demo_cohort", Config.from_mapping(env={"COHORT_AUDIT_SEED": "1"}))
    b = run_audit(FIXTURES / "demo_cohort", Config.from_mapping(env={"COHORT_AUDIT_SEED": "2"}))
    full_a = [f.cosine for f in a.pairwise if f.scope == "full_document"]
    full_b = [f.cosine for f in b.pairwise if f.scope == "full_document"]
    assert full_a == full_b
    assert a.config_echo["seed"] == "1" and b.config_echo["seed"] == "2"
