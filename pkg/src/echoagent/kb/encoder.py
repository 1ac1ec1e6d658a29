"""Text embedding backends.

The shipped encoder is a deterministic hashed bag-of-words: tokens are
lowercased alphanumeric runs, each token is hashed into one of ``dim``
buckets with a stable (non-salted) hash, bucket counts are L2-normalized.
It exists so that retrieval behaviour is exactly reproducible without any
model weights. A remote encoder can be plugged in over HTTP with the same
batch interface.
"""
from __future__ import annotations

import hashlib
import re
import time

import numpy as np
import requests

from ..errors import ContractError, EncoderError, TransportError

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _bucket(token: str, dim: int) -> int:
    # python's hash() is salted per process; sha1 keeps buckets stable across runs
    digest = hashlib.sha1(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % dim


def token_counts(text: str, dim: int) -> np.ndarray:
    counts = np.zeros(dim, dtype=np.float64)
    for token in tokenize(text):
        counts[_bucket(token, dim)] += 1.0
    return counts


def normalize(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise EncoderError("text produced a zero embedding vector (no tokens)")
    return vec / norm


class HashedBowEncoder:
    def __init__(self, dim: int = 256):
        if dim < 1:
            raise EncoderError("embedding dimension must be >= 1")
        self.dim = dim

    @property
    def encoder_id(self) -> str:
        return f"hashed-bow-{self.dim}"

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise EncoderError("cannot embed empty text")
        return normalize(token_counts(text, self.dim))

    def embed_batch(self, texts: list[str]) -> np.ndarray:
        return np.vstack([self.embed(t) for t in texts])


class HttpEncoder:
    """Remote encoder speaking POST {url}/embed with {"texts": [...]}.

    Responses are re-normalized defensively; a zero vector from the backend
    is still an encoder error, not a silent bad embedding.
    """

    def __init__(self, url: str, dim: int, timeout_s: float = 5.0,
                 retries: int = 2, backoff_s: float = 0.1,
                 session: requests.Session | None = None):
        self.url = url.rstrip("/")
        self.dim = dim
        self.timeout_s = timeout_s
        self.retries = retries
        self.backoff_s = backoff_s
        self._session = session or requests.Session()

    @property
    def encoder_id(self) -> str:
        return f"http:{self.url}"

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: list[str]) -> np.ndarray:
        for t in texts:
            if not t:
                raise EncoderError("cannot embed empty text")
        payload = self._post({"texts": list(texts)})
        vectors = payload.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ContractError(
                f"encoder backend {self.url} returned a malformed vectors field"
            )
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for i, vec in enumerate(vectors):
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (self.dim,):
                raise ContractError(
                    f"encoder backend returned shape {arr.shape}, expected ({self.dim},)"
                )
            out[i] = normalize(arr)
        return out

    def _post(self, body: dict) -> dict:
        last_error: Exception | None = None
        attempts = self.retries + 1
        for attempt in range(attempts):
            try:
                resp = self._session.post(
                    f"{self.url}/embed", json=body, timeout=self.timeout_s
                )
                if resp.status_code == 200:
                    return resp.json()
                last_error = TransportError(
                    f"encoder backend returned HTTP {resp.status_code}",
                    backend=self.url, attempts=attempt + 1,
                )
            except requests.RequestException as exc:
                last_error = exc
            if attempt < attempts - 1:
                time.sleep(self.backoff_s * (2 ** attempt))
        raise TransportError(
            f"encoder backend {self.url} unreachable after {attempts} attempts: {last_error}",
            backend=self.url, attempts=attempts,
        )
