"""Sentence embedding providers and fusion with topic distributions.

Two providers share one interface: a deterministic signed-hash bag-of-tokens
encoder that needs no model or network, and a client for a remote embedding
service speaking a small JSON protocol. Both are deterministic for a fixed
configuration, so every pipeline stage downstream is reproducible.
"""

from __future__ import annotations

import hashlib
import os
import re
import threading

import numpy as np
import requests

from .errors import TransportError

ENDPOINT_ENV = "FACTGRAPH_EMBED_ENDPOINT"
TIMEOUT_ENV = "FACTGRAPH_EMBED_TIMEOUT"
DEFAULT_TIMEOUT = 10.0
DEFAULT_DIMENSION = 256
MAX_BATCH = 64

_TOKEN_RE = re.compile(r"[0-9a-z]+")


def _tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class EmbeddingProvider:
    """Interface: a fixed output dimension and a deterministic embed()."""

    dimension: int

    def embed(self, text: str) -> np.ndarray:
        raise NotImplementedError

    def embed_batch(self, texts) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]


class HashEmbeddingProvider(EmbeddingProvider):
    """Signed feature hashing of the token bag, L2-normalized.

    Buckets and signs come from a keyed blake2b digest of each token, so the
    mapping is stable across processes and platforms. Sentences sharing many
    tokens land near each other, which is all the pipeline tests require.
    """

    kind = "deterministic-hash"

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        tokens = _tokens(text)
        if not tokens:
            raise ValueError("cannot embed empty text")
        vec = np.zeros(self.dimension)
        for tok in tokens:
            digest = hashlib.blake2b(tok.encode("utf-8"), digest_size=9).digest()
            bucket = int.from_bytes(digest[:8], "big") % self.dimension
            sign = 1.0 if digest[8] & 1 else -1.0
            vec[bucket] += sign
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("token hashes cancelled to the zero vector")
        return vec / norm


class RemoteEmbeddingProvider(EmbeddingProvider):
    """Client for an HTTP embedding service.

    Wire contract: POST {"texts": [...]} -> {"vectors": [[...], ...]}, at most
    ``MAX_BATCH`` texts per request. In-flight requests are bounded by a
    semaphore; responses are memoized per provider instance.
    """

    kind = "remote-service"

    def __init__(self, endpoint: str | None = None, dimension: int = DEFAULT_DIMENSION,
                 timeout: float | None = None, max_in_flight: int = 4, session=None):
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV, "")
        if not self.endpoint:
            raise ValueError(f"no endpoint configured (set {ENDPOINT_ENV})")
        if timeout is None:
            timeout = float(os.environ.get(TIMEOUT_ENV, DEFAULT_TIMEOUT))
        if timeout <= 0:
            raise ValueError("timeout must be positive")
        self.dimension = dimension
        self.timeout = timeout
        self._session = session or requests.Session()
        self._gate = threading.Semaphore(max_in_flight)
        self._memo: dict[str, np.ndarray] = {}
        self._memo_lock = threading.Lock()

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts) -> list[np.ndarray]:
        texts = list(texts)
        for t in texts:
            if not t.strip():
                raise ValueError("cannot embed empty text")
        with self._memo_lock:
            missing = [t for t in texts if t not in self._memo]
        for start in range(0, len(missing), MAX_BATCH):
            chunk = missing[start:start + MAX_BATCH]
            vectors = self._request(chunk)
            with self._memo_lock:
                for t, v in zip(chunk, vectors):
                    self._memo[t] = v
        with self._memo_lock:
            return [self._memo[t] for t in texts]

    def _request(self, texts: list[str]) -> list[np.ndarray]:
        try:
            with self._gate:
                resp = self._session.post(self.endpoint, json={"texts": texts},
                                          timeout=self.timeout)
        except (requests.Timeout, requests.ConnectionError) as exc:
            raise TransportError(f"embedding service unreachable: {exc}", retriable=True) from exc
        if resp.status_code >= 500:
            raise TransportError(f"embedding service error {resp.status_code}: {resp.text[:200]}",
                                 retriable=True)
        if resp.status_code >= 300:
            raise TransportError(f"embedding request rejected {resp.status_code}: {resp.text[:200]}",
                                 retriable=False)
        try:
            vectors = resp.json()["vectors"]
        except (ValueError, KeyError) as exc:
            raise TransportError(f"malformed embedding response: {exc}", retriable=False) from exc
        if len(vectors) != len(texts):
            raise TransportError(
                f"embedding count mismatch: sent {len(texts)}, got {len(vectors)}",
                retriable=False)
        out = []
        for v in vectors:
            arr = np.asarray(v, dtype=float)
            if arr.shape != (self.dimension,) or not np.all(np.isfinite(arr)):
                raise TransportError("embedding vector has wrong shape or non-finite entries",
                                     retriable=False)
            out.append(arr)
        return out


def combine(embedding, topic_dist, eta: float = 0.7) -> np.ndarray:
    """Concatenate the normalized embedding and topic blocks, weighted by eta.

    The first block gets Euclidean norm ``eta`` and the second ``1 - eta``
    whenever its input is nonzero; a zero-norm input contributes a zero block.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    e = np.asarray(embedding, dtype=float)
    t = np.asarray(topic_dist, dtype=float)
    ne = np.linalg.norm(e)
    nt = np.linalg.norm(t)
    if ne == 0 and nt == 0:
        raise ValueError("both inputs are zero vectors")
    left = eta * e / ne if ne > 0 else np.zeros_like(e)
    right = (1.0 - eta) * t / nt if nt > 0 else np.zeros_like(t)
    return np.concatenate([left, right])


def cosine(a, b) -> float:
    """Cosine similarity, clamped into [-1, 1] against rounding overshoot."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine undefined for zero vectors")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))
