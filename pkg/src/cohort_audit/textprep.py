"""Text normalization, token streams and k-token shingles.

Everything here is a pure function of its inputs. Shingle fingerprints use a
seeded 64-bit FNV-1a fold so that signatures can be reproduced by any other
implementation:

    h = 0xCBF29CE484222325 XOR seed
    for each byte b of the UTF-8 encoding:
        h = ((h XOR b) * 0x100000001B3) mod 2**64

The shingle string is the k tokens joined with U+0001, and the default seed
is 0 (plain FNV-1a).
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = 0xFFFFFFFFFFFFFFFF
SHINGLE_SEP = "\u0001"
FINGERPRINT_SEED = 0

_SPLIT = re.compile(r"[\W_]+")


def fnv1a64(data: bytes, seed: int = FINGERPRINT_SEED) -> int:
    """64-bit FNV-1a over ``data`` with the offset basis XORed by ``seed``."""
    h = (FNV_OFFSET ^ seed) & MASK64
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & MASK64
    return h


def fold_diacritics(text: str) -> str:
    """Strip combining marks after compatibility decomposition (á -> a, ñ -> n)."""
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def fold_char(ch: str) -> str:
    """Length-preserving case and accent fold of a single character.

    Falls back to the lowercased (or original) character whenever folding
    would change the length, so offsets into the folded string stay valid.
    """
    base = unicodedata.normalize("NFD", ch)
    base = "".join(c for c in base if not unicodedata.combining(c)) or ch
    low = base.lower()
    if len(low) == 1:
        return low
    if len(base) == 1:
        return base
    low = ch.lower()
    return low if len(low) == 1 else ch


def fold_offsets(text: str) -> str:
    """Fold ``text`` character by character; the result has the same length."""
    return "".join(fold_char(ch) for ch in text)


@lru_cache(maxsize=None)
def _bundled(name: str) -> tuple[str, ...]:
    raw = resources.files("cohort_audit.data").joinpath(name).read_text("utf-8")
    return tuple(w.strip() for w in raw.splitlines() if w.strip())


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Bundled Spanish + English stop-words, or the words in ``path`` (one per line)."""
    if path:
        words = Path(path).read_text("utf-8").split()
    else:
        words = _bundled("stopwords_es.txt") + _bundled("stopwords_en.txt")
    return frozenset(words)


@dataclass(frozen=True)
class TextPrepConfig:
    fold: bool = True
    stem: bool = True
    min_len: int = 2
    stopwords: frozenset[str] = field(default_factory=load_stopwords)

    def __post_init__(self):
        # stop-words must live in the same space as the tokens they filter
        object.__setattr__(
            self, "stopwords", frozenset(self._canon(w) for w in self.stopwords)
        )

    def _canon(self, word: str) -> str:
        word = unicodedata.normalize("NFC", word).lower()
        if self.fold:
            word = fold_diacritics(word).lower()
            word = fold_diacritics(word)
        return word


@dataclass
class TokenStream:
    tokens: list[str]
    source: str | None = None
    zone_label: str | None = None

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class ShingleSet:
    k: int
    hashes: frozenset[int]

    def __len__(self):
        return len(self.hashes)

    def jaccard(self, other: ShingleSet) -> float:
        """Exact Jaccard similarity; two empty sets compare as 0."""
        union = len(self.hashes | other.hashes)
        if union == 0:
            return 0.0
        return len(self.hashes & other.hashes) / union


def stem(token: str) -> str:
    """Light Spanish suffix stripping, iterated to a fixed point.

    Removes -es, then -s, then a final -a/-o, while the token is longer than
    four characters. Iterating makes the stemmer idempotent.
    """
    while len(token) > 4:
        if token.endswith("es"):
            token = token[:-2]
        elif token[-1] in "sao":
            token = token[:-1]
        else:
            break
    return token


def _prepare(text: str, fold: bool) -> str:
    text = unicodedata.normalize("NFC", text).lower()
    if fold:
        # lowercasing can reintroduce combining marks (U+0130), so fold twice
        text = fold_diacritics(text).lower()
        text = fold_diacritics(text)
    return text


def normalize(
    text: str,
    config: TextPrepConfig | None = None,
    *,
    source: str | None = None,
    zone_label: str | None = None,
) -> TokenStream:
    """Tokenize ``text`` into lowercase, folded, stop-word-free tokens."""
    config = config or default_config()
    stop = config.stopwords
    out = []
    for tok in _SPLIT.split(_prepare(text, config.fold)):
        if len(tok) < config.min_len or tok in stop:
            continue
        if config.stem:
            tok = stem(tok)
            if tok in stop:
                continue
        out.append(tok)
    return TokenStream(out, source=source, zone_label=zone_label)


def shingle_fingerprint(tokens: list[str] | tuple[str, ...]) -> int:
    return fnv1a64(SHINGLE_SEP.join(tokens).encode("utf-8"))


def shingles(stream: TokenStream | list[str], k: int = 3) -> ShingleSet:
    """Set of fingerprints of every run of ``k`` consecutive tokens."""
    if k < 1:
        raise ValueError(f"shingle width must be >= 1, got {k}")
    tokens = stream.tokens if isinstance(stream, TokenStream) else list(stream)
    hashes = {
        shingle_fingerprint(tokens[i : i + k]) for i in range(len(tokens) - k + 1)
    }
    return ShingleSet(k, frozenset(hashes))


@lru_cache(maxsize=1)
def default_config() -> TextPrepConfig:
    return TextPrepConfig()
