"""Sentence-level topic model and the topic relevance vector.

Each sentence is treated as its own tiny document, so the trained model can
assign a topic distribution to any sentence. Training runs collapsed Gibbs
sampling with symmetric Dirichlet priors; inference uses a deterministic
fixed-point update so the same sentence always gets the same distribution.

The relevance vector boosts sentences whose topic mass sits on health-related
topics and normalizes the result into a probability vector; Dirichlet
smoothing keeps every entry strictly positive, which the ranking chain needs.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from . import kgstore

STOPWORDS = frozenset(
    """a an and are as at be but by for from has have in is it its of on or
    that the this to was were will with not no they he she we you i""".split()
)

_SPLIT_RE = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop short tokens and stopwords."""
    return [t for t in _SPLIT_RE.split(text.lower()) if len(t) >= 2 and t not in STOPWORDS]


@dataclass
class TopicModel:
    """Count tables of a trained model.

    ``word_topic_counts`` is (num_topics, vocab_size); ``topic_totals`` holds
    its row sums. All counts are non-negative, and the model is immutable
    once trained, so concurrent inference is safe.
    """

    num_topics: int
    word_topic_counts: np.ndarray
    topic_totals: np.ndarray
    vocab: dict
    alpha: float
    beta: float
    seed: int

    def __post_init__(self):
        if np.any(self.word_topic_counts < 0):
            raise ValueError("negative word-topic count")
        if not np.array_equal(self.word_topic_counts.sum(axis=1), self.topic_totals):
            raise ValueError("topic_totals inconsistent with word_topic_counts")

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def word_given_topic(self) -> np.ndarray:
        """Smoothed p(word | topic); strictly positive."""
        v = self.vocab_size
        return (self.word_topic_counts + self.beta) / (
            self.topic_totals[:, None] + v * self.beta
        )

    def top_words(self, topic: int, n: int = 20) -> list[str]:
        """Up to n highest-count words of a topic; zero-count words excluded."""
        counts = self.word_topic_counts[topic]
        order = sorted((w for w in range(self.vocab_size) if counts[w] > 0),
                       key=lambda w: (-counts[w], w))
        inverse = {idx: word for word, idx in self.vocab.items()}
        return [inverse[w] for w in order[:n]]


def train_lda(corpus, num_topics: int, alpha: float = 0.1, beta: float = 0.01,
              iterations: int = 1000, seed: int = 0) -> TopicModel:
    """Train by collapsed Gibbs sampling; deterministic for a fixed seed.

    ``corpus`` is a list of token lists (one per sentence). The doc-topic
    prior defaults to 0.1: sentence-sized documents carry only a handful of
    tokens, and a heavy prior flattens their topic signal. Raises ValueError
    when the corpus produces an empty vocabulary.
    """
    if not corpus:
        raise ValueError("corpus is empty")
    if num_topics < 2:
        raise ValueError("need at least 2 topics")
    if iterations < 1:
        raise ValueError("need at least 1 iteration")

    vocab: dict[str, int] = {}
    docs: list[np.ndarray] = []
    for tokens in corpus:
        ids = []
        for tok in tokens:
            idx = vocab.setdefault(tok, len(vocab))
            ids.append(idx)
        docs.append(np.asarray(ids, dtype=np.int64))
    if not vocab:
        raise ValueError("corpus has an empty vocabulary")

    v = len(vocab)
    k = num_topics
    rng = np.random.default_rng(seed)

    word_topic = np.zeros((k, v), dtype=np.int64)
    topic_totals = np.zeros(k, dtype=np.int64)
    doc_topic = np.zeros((len(docs), k), dtype=np.int64)
    assignments = []
    for d, ids in enumerate(docs):
        z = rng.integers(0, k, size=len(ids))
        assignments.append(z)
        for w, t in zip(ids, z):
            word_topic[t, w] += 1
            topic_totals[t] += 1
            doc_topic[d, t] += 1

    beta_v = v * beta
    for _ in range(iterations):
        for d, ids in enumerate(docs):
            z = assignments[d]
            for pos, w in enumerate(ids):
                t = z[pos]
                word_topic[t, w] -= 1
                topic_totals[t] -= 1
                doc_topic[d, t] -= 1
                # full conditional: p(t) ∝ (n_tw + β)/(n_t + Vβ) · (n_dt + α)
                weights = (word_topic[:, w] + beta) / (topic_totals + beta_v)
                weights *= doc_topic[d] + alpha
                cumulative = np.cumsum(weights)
                t = int(np.searchsorted(cumulative, rng.random() * cumulative[-1]))
                z[pos] = t
                word_topic[t, w] += 1
                topic_totals[t] += 1
                doc_topic[d, t] += 1

    return TopicModel(
        num_topics=k,
        word_topic_counts=word_topic,
        topic_totals=topic_totals,
        vocab=vocab,
        alpha=alpha,
        beta=beta,
        seed=seed,
    )


def infer_topics(model: TopicModel, tokens) -> np.ndarray:
    """Topic distribution of a sentence under a trained model.

    Deterministic fixed-point estimate: responsibilities of each token are
    folded into the sentence's topic proportions until they stop moving.
    Sentences with no in-vocabulary tokens fall back to the uniform
    distribution.
    """
    known = [model.vocab[t] for t in tokens if t in model.vocab]
    k = model.num_topics
    if not known:
        return np.full(k, 1.0 / k)

    phi = model.word_given_topic()[:, known]  # (k, m)
    m = len(known)
    theta = np.full(k, 1.0 / k)
    for _ in range(100):
        resp = phi * theta[:, None]
        resp /= resp.sum(axis=0, keepdims=True)
        new_theta = (model.alpha + resp.sum(axis=1)) / (m + k * model.alpha)
        if np.abs(new_theta - theta).sum() < 1e-12:
            theta = new_theta
            break
        theta = new_theta
    return theta / theta.sum()


@dataclass(frozen=True)
class HealthTopicSet:
    """Topic indices treated as health-related, plus their boost weight."""

    topic_ids: frozenset
    alpha_boost: float = 1.5

    def __post_init__(self):
        if self.alpha_boost < 1.0:
            raise ValueError("alpha_boost must be >= 1")


def identify_health_topics(model: TopicModel, keywords=kgstore.DEFAULT_HEALTH_KEYWORDS,
                           top_n: int = 20, alpha_boost: float = 1.5) -> HealthTopicSet:
    """Mark a topic as health-related when any of its top words matches a keyword."""
    ids = {
        k
        for k in range(model.num_topics)
        if any(kgstore.health_filter(word, keywords) for word in model.top_words(k, top_n))
    }
    return HealthTopicSet(frozenset(ids), alpha_boost)


def relevance_from_betas(distributions, betas) -> np.ndarray:
    """Normalize per-sentence weighted topic mass into a probability vector."""
    matrix = np.asarray(distributions, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise ValueError("need a non-empty list of topic distributions")
    betas = np.asarray(betas, dtype=float)
    if betas.shape != (matrix.shape[1],):
        raise ValueError("beta weights do not match the topic count")
    raw = matrix @ betas
    total = raw.sum()
    if total <= 0:
        raise ValueError("relevance mass is zero; distributions must carry positive mass")
    return raw / total


def topic_relevance(distributions, health: HealthTopicSet) -> np.ndarray:
    """Relevance score per sentence: boosted topic mass, normalized to sum 1."""
    matrix = np.asarray(distributions, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise ValueError("need a non-empty list of topic distributions")
    k = matrix.shape[1]
    for topic_id in health.topic_ids:
        if not 0 <= topic_id < k:
            raise ValueError(f"health topic id {topic_id} outside 0..{k - 1}")
    betas = np.ones(k)
    if health.topic_ids:
        betas[list(health.topic_ids)] = health.alpha_boost
    return relevance_from_betas(matrix, betas)


def uniform_relevance(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one sentence")
    return np.full(n, 1.0 / n)


def model_to_json_dict(model: TopicModel) -> dict:
    return {
        "num_topics": model.num_topics,
        "alpha": model.alpha,
        "beta": model.beta,
        "seed": model.seed,
        "vocab": model.vocab,
        "word_topic_counts": model.word_topic_counts.tolist(),
    }


def model_from_json_dict(data: dict) -> TopicModel:
    counts = np.asarray(data["word_topic_counts"], dtype=np.int64)
    return TopicModel(
        num_topics=int(data["num_topics"]),
        word_topic_counts=counts,
        topic_totals=counts.sum(axis=1),
        vocab={str(w): int(i) for w, i in data["vocab"].items()},
        alpha=float(data["alpha"]),
        beta=float(data["beta"]),
        seed=int(data["seed"]),
    )


def save_model(path, model: TopicModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json_dict(model), fh, sort_keys=True)
        fh.write("\n")


def load_model(path) -> TopicModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json_dict(json.load(fh))
