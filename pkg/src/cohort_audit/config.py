"""Flat ``key=value`` configuration.

One setting per line, lines starting with ``#`` are comments, UTF-8. Every key has a default
and unknown keys are rejected, so a typo such as ``sim.nois`` fails loudly.
The environment variable ``COHORT_AUDIT_SEED`` overrides ``seed``.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from .evidence import EvidenceConfig
from .ingest import IngestConfig, ZoneMarkerConfig
from .report import ReportConfig
from .rubric import RubricConfig
from .similarity import SimilarityConfig, ThresholdConfig
from .textprep import TextPrepConfig, load_stopwords

SEED_ENV = "COHORT_AUDIT_SEED"

_ZONES = dict(ZoneMarkerConfig().markers)

DEFAULTS: dict[str, str] = {
    "seed": "1",
    "sim.noise": "0.30",
    "sim.medium": "0.45",
    "sim.high": "0.75",
    "sim.copy": "0.80",
    "sim.max_docs": "500",
    "minhash.H": "128",
    "lsh.bands": "32",
    "lsh.rows": "4",
    "textprep.k": "3",
    "textprep.fold": "true",
    "textprep.stem": "true",
    "textprep.stopwords": "",
    "zones.personal_numeric": _ZONES["personal_numeric"],
    "zones.personal_review_answers": _ZONES["personal_review_answers"],
    "zones.tutor_text": _ZONES["tutor_text"],
    "evidence.min_minutes": "120",
    "evidence.gap_cap": "15",
    "evidence.numeric_tol": "0.05",
    "rubric.pass": "60",
    "rubric.r1_floor": "10",
    "rubric.r1_module_step": "2",
    "rubric.r3_numeric_penalty": "5",
    "rubric.r4_originality": "10",
    "rubric.r4_placeholder_penalty": "5",
    "rubric.r4_identity_penalty": "10",
    "report.std": "population",
    "report.invalid_totals": "nominal",
    "report.scale": "100",
    "roster": "",
    "out": "",
}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


def _bool(key: str, value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {value!r}")


def _num(key: str, value: str, kind=float):
    try:
        return kind(value, 0) if kind is int else kind(value)
    except ValueError:
        raise ConfigError(key, f"expected {kind.__name__}, got {value!r}") from None


def parse_config_text(text: str) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(key, f"line {lineno}: expected key=value")
        if key not in DEFAULTS:
            raise ConfigError(key, f"line {lineno}: unknown key")
        values[key] = value.strip()
    return values


@dataclass
class Config:
    values: dict[str, str] = field(default_factory=lambda: dict(DEFAULTS))

    @classmethod
    def from_mapping(cls, overrides: dict[str, str] | None = None, env: dict | None = None) -> Config:
        values = dict(DEFAULTS)
        for key, value in (overrides or {}).items():
            if key not in DEFAULTS:
                raise ConfigError(key, "unknown key")
            values[key] = str(value)
        env = os.environ if env is None else env
        if env.get(SEED_ENV):
            values["seed"] = env[SEED_ENV]
        cfg = cls(values)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path | None = None, env: dict | None = None) -> Config:
        overrides = parse_config_text(Path(path).read_text("utf-8")) if path else {}
        return cls.from_mapping(overrides, env)

    def validate(self) -> None:
        # building every section surfaces the first bad value with its key
        for section in ("similarity", "textprep", "ingest", "evidence", "rubric", "report"):
            getattr(self, section)

    def echo(self) -> dict[str, str]:
        return {k: self.values[k] for k in sorted(self.values)}

    def get_int(self, key: str) -> int:
        return _num(key, self.values[key], int)

    def get_float(self, key: str) -> float:
        return _num(key, self.values[key], float)

    @property
    def seed(self) -> int:
        seed = self.get_int("seed")
        if not 0 <= seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        return seed

    @property
    def thresholds(self) -> ThresholdConfig:
        try:
            return ThresholdConfig(*(self.get_float(f"sim.{k}") for k in ("noise", "medium", "high", "copy")))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError("sim.*", str(exc)) from None

    @property
    def similarity(self) -> SimilarityConfig:
        h, b, r = self.get_int("minhash.H"), self.get_int("lsh.bands"), self.get_int("lsh.rows")
        if h < 1:
            raise ConfigError("minhash.H", "must be >= 1")
        if b * r != h:
            raise ConfigError("lsh.bands", f"bands x rows = {b * r} must equal minhash.H = {h}")
        k = self.get_int("textprep.k")
        if k < 1:
            raise ConfigError("textprep.k", "must be >= 1")
        return SimilarityConfig(
            thresholds=self.thresholds,
            hash_count=h,
            bands=b,
            rows=r,
            seed=self.seed,
            shingle_k=k,
            max_docs=self.get_int("sim.max_docs"),
        )

    @property
    def textprep(self) -> TextPrepConfig:
        path = self.values["textprep.stopwords"] or None
        try:
            stop = load_stopwords(path)
        except OSError as exc:
            raise ConfigError("textprep.stopwords", str(exc)) from None
        return TextPrepConfig(
            fold=_bool("textprep.fold", self.values["textprep.fold"]),
            stem=_bool("textprep.stem", self.values["textprep.stem"]),
            stopwords=stop,
        )

    @property
    def ingest(self) -> IngestConfig:
        markers = []
        for label in ("personal_numeric", "personal_review_answers", "tutor_text"):
            key = f"zones.{label}"
            try:
                re.compile(self.values[key])
            except re.error as exc:
                raise ConfigError(key, f"bad regex: {exc}") from None
            markers.append((label, self.values[key]))
        return IngestConfig(ZoneMarkerConfig(tuple(markers)))

    @property
    def evidence(self) -> EvidenceConfig:
        cap = self.get_int("evidence.gap_cap")
        if cap < 0:
            raise ConfigError("evidence.gap_cap", "must be >= 0")
        return EvidenceConfig(
            min_minutes=self.get_int("evidence.min_minutes"),
            gap_cap=cap,
            numeric_tol=self.get_float("evidence.numeric_tol"),
        )

    @property
    def rubric(self) -> RubricConfig:
        t = self.thresholds
        return RubricConfig(
            min_minutes=self.get_int("evidence.min_minutes"),
            pass_mark=self.get_float("rubric.pass"),
            r1_floor=self.get_float("rubric.r1_floor"),
            r1_module_step=self.get_float("rubric.r1_module_step"),
            r3_numeric_penalty=self.get_float("rubric.r3_numeric_penalty"),
            r4_originality=self.get_float("rubric.r4_originality"),
            r4_placeholder_penalty=self.get_float("rubric.r4_placeholder_penalty"),
            r4_identity_penalty=self.get_float("rubric.r4_identity_penalty"),
            sim_medium=t.medium,
            sim_high=t.high,
        )

    @property
    def report(self) -> ReportConfig:
        try:
            return ReportConfig(
                std=self.values["report.std"],
                invalid_totals=self.values["report.invalid_totals"],
                scale=self.get_int("report.scale"),
                thresholds=self.thresholds,
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError("report.*", str(exc)) from None
