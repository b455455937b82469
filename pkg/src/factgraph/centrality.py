"""Sentence-similarity graph construction and centrality-based selection.

Vertices are sentences, edge weights are cosine similarities of their
combined vectors clamped at zero (the stochastic-matrix construction needs
non-negative weights), and ranking is plain PageRank with uniform
teleportation on the column-normalized weight matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import topicrank


@dataclass
class SentenceGraph:
    """Symmetric non-negative weight matrix with a zero diagonal."""

    weights: np.ndarray
    sentence_refs: list | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weight matrix must be square")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if np.any(np.diagonal(w) != 0):
            raise ValueError("diagonal must be zero")
        if not np.allclose(w, w.T):
            raise ValueError("weight matrix must be symmetric")
        self.weights = w

    @property
    def n(self) -> int:
        return self.weights.shape[0]


def build_sentence_graph(vectors, sentence_refs=None) -> SentenceGraph:
    """Pairwise clamped cosine similarities of the given combined vectors."""
    matrix = np.asarray([np.asarray(v, dtype=float) for v in vectors])
    if matrix.ndim != 2 or matrix.shape[0] < 1:
        raise ValueError("need at least one vector")
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero vector cannot appear in the sentence graph")
    unit = matrix / norms[:, None]
    sims = unit @ unit.T
    sims = (sims + sims.T) / 2.0  # force exact symmetry against fp drift
    weights = np.maximum(sims, 0.0)
    np.fill_diagonal(weights, 0.0)
    return SentenceGraph(weights=weights, sentence_refs=sentence_refs)


def rank_sentences(graph: SentenceGraph, d: float = topicrank.DEFAULT_DAMPING,
                   tol: float = topicrank.DEFAULT_TOL,
                   max_iter: int = topicrank.DEFAULT_MAX_ITER) -> np.ndarray:
    """Stationary scores of the teleported walk on the sentence graph.

    Uniform teleportation; dangling vertices get a uniform outgoing
    distribution. Non-convergence raises with the residual trail attached.
    """
    n = graph.n
    if n == 1:
        return np.array([1.0])
    if not np.any(graph.weights > 0):
        raise ValueError("graph has no positive weight; ranking is undefined")
    uniform = np.full(n, 1.0 / n)
    p = topicrank.build_transition(graph.weights, uniform)
    scores, _ = topicrank.power_iterate(p, uniform, d=d, tol=tol, max_iter=max_iter)
    return scores


def top_sentences(scores, m: int) -> list[int]:
    """Indices of the m best scores, ties broken toward the lower index."""
    scores = np.asarray(scores, dtype=float)
    n = scores.shape[0]
    if not 1 <= m <= n:
        raise ValueError(f"m={m} outside 1..{n}")
    order = sorted(range(n), key=lambda i: (-scores[i], i))
    return order[:m]


def default_selection_count(n: int) -> int:
    """How many sentences to keep when the caller does not say: max(3, 20%)."""
    return min(n, max(3, math.ceil(0.2 * n)))


def scores_to_csv(scores, sentence_refs, path) -> None:
    scores = np.asarray(scores, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index,score,sentence\n")
        for i, s in enumerate(scores):
            ref = "" if sentence_refs is None else str(sentence_refs[i]).replace('"', "'")
            fh.write(f'{i},{s:.6f},"{ref}"\n')
