"""Pretrained word-vector tables."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from ..errors import ValidationError
from ..numerics.matrix import DTYPE

logger = logging.getLogger(__name__)

_WORD_SPLIT = re.compile(r"[\s_]+")


@dataclass(frozen=True)
class EmbeddingTable:
    """Token -> read-only vector of length ``dim``."""

    dim: int
    vectors: Mapping[str, np.ndarray]

    @classmethod
    def from_dict(cls, vectors: Mapping[str, Sequence[float]]) -> "EmbeddingTable":
        store: dict[str, np.ndarray] = {}
        dim = None
        for token, values in vectors.items():
            arr = np.array(values, dtype=DTYPE)
            if arr.ndim != 1:
                raise ValidationError(f"vector for '{token}' must be one-dimensional")
            if dim is None:
                dim = arr.shape[0]
            elif arr.shape[0] != dim:
                raise ValidationError(f"vector for '{token}' has {arr.shape[0]} components, expected {dim}")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"vector for '{token}' has non-finite components")
            arr.setflags(write=False)
            store[token] = arr
        if dim is None or dim < 1:
            raise ValidationError("embedding table is empty")
        return cls(dim=dim, vectors=MappingProxyType(store))

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self) -> Iterator[str]:
        return iter(self.vectors)

    def lookup(self, word: str) -> np.ndarray | None:
        """Exact match first, then the lower-cased word."""
        vec = self.vectors.get(word)
        if vec is None:
            vec = self.vectors.get(word.lower())
        return vec


def load_embeddings(path: str) -> EmbeddingTable:
    """Read the plain-text ``token c1 ... cd`` layout.

    A leading ``<count> <dim>`` header line is skipped. Duplicate tokens keep
    the last occurrence.

    Raises:
        ValidationError: a line's component count differs from the first
            vector line, or a component does not parse; the message carries
            the line number.
    """
    store: dict[str, np.ndarray] = {}
    dim: int | None = None
    duplicates = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            token, raw = parts[0], parts[1:]
            if dim is None:
                dim = len(raw)
                if dim < 1:
                    raise ValidationError(f"{path}:{lineno}: token '{token}' has no components")
            elif len(raw) != dim:
                raise ValidationError(f"{path}:{lineno}: expected {dim} components, got {len(raw)}")
            try:
                vec = np.array(raw, dtype=DTYPE)
            except ValueError as e:
                raise ValidationError(f"{path}:{lineno}: {e}") from e
            if not np.all(np.isfinite(vec)):
                raise ValidationError(f"{path}:{lineno}: non-finite component")
            if token in store:
                duplicates += 1
                logger.warning("%s:%d: duplicate token '%s', keeping this occurrence", path, lineno, token)
            vec.setflags(write=False)
            store[token] = vec
    if dim is None:
        raise ValidationError(f"{path}: no vectors found")
    if duplicates:
        logger.warning("%s: %d duplicate tokens", path, duplicates)
    logger.info("loaded %d vectors of dimension %d from %s", len(store), dim, path)
    return EmbeddingTable(dim=dim, vectors=MappingProxyType(store))


class PhraseVector(NamedTuple):
    values: np.ndarray
    n_words: int
    n_oov: int

    @property
    def all_oov(self) -> bool:
        return self.n_oov == self.n_words


def split_words(phrase: str | Sequence[str]) -> list[str]:
    if isinstance(phrase, str):
        return [w for w in _WORD_SPLIT.split(phrase.strip()) if w]
    words: list[str] = []
    for part in phrase:
        words.extend(split_words(part))
    return words


def embed_phrase(table: EmbeddingTable, phrase: str | Sequence[str]) -> PhraseVector:
    """Mean of the word vectors; out-of-vocabulary words count as zero vectors."""
    words = split_words(phrase)
    if not words:
        raise ValidationError(f"cannot embed an empty phrase: {phrase!r}")
    total = np.zeros(table.dim, dtype=DTYPE)
    n_oov = 0
    for word in words:
        vec = table.lookup(word)
        if vec is None:
            n_oov += 1
        else:
            total += vec
    if n_oov == len(words):
        logger.warning("phrase %r is entirely out of vocabulary", " ".join(words))
    return PhraseVector(total / len(words), len(words), n_oov)
