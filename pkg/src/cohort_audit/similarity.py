"""TF-IDF cosine, MinHash/LSH and the operational similarity bands.

Full documents are compared with TF-IDF cosine over all pairs. Personal zones
(numeric exercise, review answers) are compared with MinHash Jaccard
estimates over LSH candidate pairs, which is robust to light rewording.
Findings are advisory: they rank pairs for human review.

MinHash row ``i`` hashes a shingle fingerprint ``s`` as ``mix(s ^ key_i)``
where ``mix`` is the SplitMix64 finalizer and
``key_i = mix(seed + (i + 1) * 0x9E3779B97F4A7C15 mod 2**64)``.
An empty shingle set gets the all-ones sentinel in every row; sentinel rows
never count as matches, so an empty set estimates 0 against anything.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .textprep import (
    MASK64,
    ShingleSet,
    TextPrepConfig,
    TokenStream,
    fnv1a64,
    normalize,
    shingles,
)

log = logging.getLogger(__name__)

SENTINEL = MASK64
GOLDEN = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

LEVELS = ("noise", "low", "medium", "high", "copy")
SCOPES = ("full_document", "personal_numeric", "personal_review_answers")
PERSONAL_SCOPES = SCOPES[1:]


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer applied elementwise to a uint64 array."""
    z = z ^ (z >> np.uint64(30))
    z = z * _M1
    z = z ^ (z >> np.uint64(27))
    z = z * _M2
    return z ^ (z >> np.uint64(31))


def row_keys(hash_count: int, seed: int) -> np.ndarray:
    base = np.array(
        [(seed + (i + 1) * GOLDEN) & MASK64 for i in range(hash_count)],
        dtype=np.uint64,
    )
    return mix64(base)


@dataclass(frozen=True)
class ThresholdConfig:
    noise: float = 0.30
    medium: float = 0.45
    high: float = 0.75
    copy: float = 0.80

    def __post_init__(self):
        if not 0 <= self.noise <= self.medium <= self.high <= self.copy <= 1:
            raise ValueError(
                "thresholds must satisfy 0 <= noise <= medium <= high <= copy <= 1"
            )


@dataclass(frozen=True)
class SimilarityConfig:
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    hash_count: int = 128
    bands: int = 32
    rows: int = 4
    seed: int = 1
    shingle_k: int = 3
    max_docs: int = 500


# --- TF-IDF -----------------------------------------------------------------


@dataclass
class TfIdfModel:
    vocabulary: dict[str, int]
    idf: list[float]
    doc_count: int


@dataclass
class TfIdfVector:
    weights: dict[int, float]
    l2_norm: float


def fit_tfidf(corpus: list[TokenStream]) -> TfIdfModel:
    """Smoothed idf: ``ln((1 + N) / (1 + df)) + 1``."""
    if not corpus:
        raise ValueError("cannot fit TF-IDF on an empty corpus")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(doc.tokens))
    terms = sorted(df)
    n = len(corpus)
    vocabulary = {t: i for i, t in enumerate(terms)}
    idf = [math.log((1 + n) / (1 + df[t])) + 1.0 for t in terms]
    return TfIdfModel(vocabulary, idf, n)


def vectorize(model: TfIdfModel, doc: TokenStream) -> TfIdfVector:
    counts = Counter(t for t in doc.tokens if t in model.vocabulary)
    weights = {}
    for term in sorted(counts):
        idx = model.vocabulary[term]
        weights[idx] = counts[term] * model.idf[idx]
    norm = math.sqrt(math.fsum(w * w for w in weights.values()))
    return TfIdfVector(weights, norm)


def cosine(a: TfIdfVector, b: TfIdfVector) -> float:
    """Cosine of two TF-IDF vectors; 0 when either is the zero vector."""
    if a.l2_norm == 0 or b.l2_norm == 0:
        return 0.0
    if len(b.weights) < len(a.weights):
        a, b = b, a
    dot = math.fsum(w * b.weights[i] for i, w in a.weights.items() if i in b.weights)
    return min(1.0, max(0.0, dot / (a.l2_norm * b.l2_norm)))


# --- MinHash / LSH ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MinHashSignature:
    values: np.ndarray
    hash_count: int
    seed: int

    @property
    def empty(self) -> bool:
        return bool(np.all(self.values == np.uint64(SENTINEL)))


def minhash(shingle_set: ShingleSet, hash_count: int = 128, seed: int = 1) -> MinHashSignature:
    if hash_count < 1:
        raise ValueError(f"hash_count must be >= 1, got {hash_count}")
    if not shingle_set.hashes:
        values = np.full(hash_count, SENTINEL, dtype=np.uint64)
        return MinHashSignature(values, hash_count, seed)
    fps = np.fromiter(sorted(shingle_set.hashes), dtype=np.uint64)
    keys = row_keys(hash_count, seed)
    values = mix64(fps[None, :] ^ keys[:, None]).min(axis=1)
    return MinHashSignature(values, hash_count, seed)


def jaccard_estimate(a: MinHashSignature, b: MinHashSignature) -> float:
    if a.hash_count != b.hash_count or a.seed != b.seed:
        raise ValueError(
            f"incomparable signatures: H={a.hash_count}/{b.hash_count}, "
            f"seed={a.seed}/{b.seed}"
        )
    match = (a.values == b.values) & (a.values != np.uint64(SENTINEL))
    return int(match.sum()) / a.hash_count


@dataclass
class LshIndex:
    bands: int
    rows: int
    buckets: list[dict[int, set[str]]]
    skipped: list[str] = field(default_factory=list)


def band_key(values: np.ndarray) -> int:
    return fnv1a64(values.astype(">u8").tobytes())


def build_lsh(signatures: dict[str, MinHashSignature], bands: int = 32, rows: int = 4) -> LshIndex:
    """Band every signature into ``bands`` buckets of ``rows`` rows each.

    Signatures of empty sets are left out (they would all collide) and listed
    in ``skipped``.
    """
    index = LshIndex(bands, rows, [defaultdict(set) for _ in range(bands)])
    for doc_id in sorted(signatures):
        sig = signatures[doc_id]
        if bands * rows != sig.hash_count:
            raise ValueError(
                f"bands x rows = {bands * rows} does not match H = {sig.hash_count}"
            )
        if sig.empty:
            index.skipped.append(doc_id)
            continue
        for band in range(bands):
            chunk = sig.values[band * rows : (band + 1) * rows]
            index.buckets[band][band_key(chunk)].add(doc_id)
    return index


def candidate_pairs(index: LshIndex) -> set[tuple[str, str]]:
    pairs = set()
    for table in index.buckets:
        for ids in table.values():
            if len(ids) > 1:
                pairs.update(combinations(sorted(ids), 2))
    return pairs


# --- classification and cohort audit -----------------------------------------


def classify_level(score: float, thresholds: ThresholdConfig | None = None) -> str:
    """Map a similarity in [0, 1] to its band; lower edges are inclusive."""
    t = thresholds or ThresholdConfig()
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"similarity score out of [0, 1]: {score}")
    if score >= t.copy:
        return "copy"
    if score >= t.high:
        return "high"
    if score >= t.medium:
        return "medium"
    if score >= t.noise:
        return "low"
    return "noise"


def level_rank(level: str) -> int:
    return LEVELS.index(level)


@dataclass
class SimilarityFinding:
    id_a: str
    id_b: str
    scope: str
    cosine: float | None
    jaccard_est: float
    level: str

    @property
    def score(self) -> float:
        return self.cosine if self.scope == "full_document" else self.jaccard_est

    def sort_key(self):
        return (SCOPES.index(self.scope), self.id_a, self.id_b)


def _full_document(ids, texts, prep, config):
    t = config.thresholds
    streams = {i: normalize(texts[i], prep, source=i) for i in ids}
    sigs = {
        i: minhash(shingles(streams[i], config.shingle_k), config.hash_count, config.seed)
        for i in ids
    }
    model = fit_tfidf([streams[i] for i in ids])
    vecs = {i: vectorize(model, streams[i]) for i in ids}
    if len(ids) <= config.max_docs:
        pairs = combinations(ids, 2)
    else:
        log.warning(
            "%d documents exceed the brute-force cap of %d; scoring LSH candidates only",
            len(ids), config.max_docs,
        )
        pairs = sorted(candidate_pairs(build_lsh(sigs, config.bands, config.rows)))
    out = []
    for a, b in pairs:
        cos = cosine(vecs[a], vecs[b])
        jac = jaccard_estimate(sigs[a], sigs[b])
        out.append(SimilarityFinding(a, b, "full_document", cos, jac, classify_level(cos, t)))
    return out


def _zone_scope(scope, zone_texts, prep, config):
    sigs = {}
    for doc_id, text in zone_texts.items():
        s = shingles(normalize(text, prep, source=doc_id, zone_label=scope), config.shingle_k)
        if s.hashes:
            sigs[doc_id] = minhash(s, config.hash_count, config.seed)
    index = build_lsh(sigs, config.bands, config.rows)
    out = []
    for a, b in sorted(candidate_pairs(index)):
        jac = jaccard_estimate(sigs[a], sigs[b])
        out.append(
            SimilarityFinding(a, b, scope, None, jac, classify_level(jac, config.thresholds))
        )
    return out


def pairwise_audit(cohort, config: SimilarityConfig | None = None, prep: TextPrepConfig | None = None) -> list[SimilarityFinding]:
    """Score every pair of submissions in a cohort.

    Full documents get TF-IDF cosine for all pairs (up to ``max_docs``
    documents); each personal zone gets MinHash estimates for its LSH
    candidate pairs. Noise-level findings are kept; reporting filters them.
    """
    config = config or SimilarityConfig()
    subs = sorted(cohort, key=lambda s: s.student_id)
    if len(subs) < 2:
        return []
    ids = [s.student_id for s in subs]
    texts = {s.student_id: s.report.raw_text for s in subs}
    findings = _full_document(ids, texts, prep, config)
    for scope in PERSONAL_SCOPES:
        zone_texts = {}
        for s in subs:
            text = s.report.zone_text(scope)
            if text:
                zone_texts[s.student_id] = text
        findings.extend(_zone_scope(scope, zone_texts, prep, config))
    findings.sort(key=SimilarityFinding.sort_key)
    return findings


def headline_similarity(findings: list[SimilarityFinding], student_ids) -> dict[str, float]:
    """Per student, the max full-document cosine over all of its pairs."""
    best = {sid: 0.0 for sid in student_ids}
    for f in findings:
        if f.scope != "full_document":
            continue
        for sid in (f.id_a, f.id_b):
            if sid in best and f.cosine > best[sid]:
                best[sid] = f.cosine
    return best


def personal_zone_max(findings: list[SimilarityFinding], student_ids) -> dict[str, float]:
    best = {sid: 0.0 for sid in student_ids}
    for f in findings:
        if f.scope not in PERSONAL_SCOPES:
            continue
        for sid in (f.id_a, f.id_b):
            if sid in best and f.jaccard_est > best[sid]:
                best[sid] = f.jaccard_est
    return best
