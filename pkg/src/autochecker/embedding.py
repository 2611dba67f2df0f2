"""Text embedders and cosine similarity.

Two embedders satisfy the same contract (``embedder_id`` plus ``embed(text)``
returning an L2-normalised vector):

* :class:`LexicalEmbedder` is deterministic and offline.  It lowercases the
  text, splits on non-alphanumerics and builds a term-frequency vector over
  the tokens.  Vectors are sparse (:class:`SparseVector`), keyed by token.
* :class:`HttpEmbedder` posts to an embedding endpoint and returns a dense
  ``numpy`` vector.
"""

from __future__ import annotations

import json
import math
import os
import re
import urllib.error
import urllib.request
from collections import Counter
from typing import Protocol, Union

import numpy as np

from .errors import DimensionError, EmbeddingError, EmptyText

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


class SparseVector(dict):
    """Token -> weight mapping; tokens absent from the mapping weigh zero."""

    def norm(self) -> float:
        return math.sqrt(math.fsum(v * v for v in self.values()))


Vector = Union[SparseVector, np.ndarray]


class Embedder(Protocol):
    embedder_id: str

    def embed(self, text: str) -> Vector: ...


def tokenize(text: str) -> list[str]:
    return [tok for tok in _TOKEN_SPLIT.split(text.lower()) if tok]


class LexicalEmbedder:
    embedder_id = "lexical-tf-v1"

    def embed(self, text: str) -> SparseVector:
        counts = Counter(tokenize(text))
        if not counts:
            raise EmptyText(f"nothing to embed in {text!r}")
        norm = math.sqrt(sum(c * c for c in counts.values()))
        return SparseVector((tok, counts[tok] / norm) for tok in sorted(counts))


class HttpEmbedder:
    """Client for an OpenAI-style ``/embeddings`` endpoint.

    The API key is read from ``AUTOCHECKER_API_KEY`` if set.
    """

    def __init__(self, endpoint: str, model: str = "", timeout: float = 30.0):
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout
        self.embedder_id = f"http:{model or endpoint}"

    def embed(self, text: str) -> np.ndarray:
        if not tokenize(text):
            raise EmptyText(f"nothing to embed in {text!r}")
        body = json.dumps({"model": self.model, "input": text}).encode()
        headers = {"Content-Type": "application/json"}
        key = os.environ.get("AUTOCHECKER_API_KEY")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        request = urllib.request.Request(self.endpoint, data=body, headers=headers)
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                payload = json.load(resp)
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise EmbeddingError(f"embedding request failed: {exc}") from exc
        try:
            raw = payload["data"][0]["embedding"] if "data" in payload else payload["embedding"]
            vec = np.asarray(raw, dtype=float)
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise EmbeddingError(f"malformed embedding response: {exc}") from exc
        norm = float(np.linalg.norm(vec))
        if vec.ndim != 1 or norm == 0.0 or not math.isfinite(norm):
            raise EmbeddingError("embedding is not a usable vector")
        return vec / norm


def similarity(a: Vector, b: Vector) -> float:
    """Cosine similarity of two unit vectors (their dot product)."""
    if isinstance(a, SparseVector) and isinstance(b, SparseVector):
        if len(a) > len(b):
            a, b = b, a
        return math.fsum(a[t] * b[t] for t in sorted(a) if t in b)
    if isinstance(a, SparseVector) or isinstance(b, SparseVector):
        raise DimensionError("cannot compare a sparse lexical vector with a dense one")
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a, b))


def vector_to_json(vec: Vector):
    if isinstance(vec, SparseVector):
        return {"sparse": [[tok, vec[tok]] for tok in sorted(vec)]}
    return [float(x) for x in vec]


def vector_from_json(data) -> Vector:
    if isinstance(data, dict):
        return SparseVector((tok, float(val)) for tok, val in data["sparse"])
    return np.asarray(data, dtype=float)


def make_embedder(mode: str = "lexical", endpoint: str = "", model: str = "") -> Embedder:
    if mode == "lexical":
        return LexicalEmbedder()
    if mode == "http":
        if not endpoint:
            raise ValueError("http embedder needs an endpoint")
        return HttpEmbedder(endpoint, model)
    raise ValueError(f"unknown embedder mode {mode!r}")
