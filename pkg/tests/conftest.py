import numpy as np
import pytest

from factgraph import Triple, topics


def planted_corpus(corpus_seed=0, sentences=200, vocab_size=50, length=8):
    """Two disjoint vocabularies, alternating sentences; used by LDA tests."""
    rng = np.random.default_rng(corpus_seed)
    vocab_a = [f"alpha{i}" for i in range(vocab_size)]
    vocab_b = [f"beta{i}" for i in range(vocab_size)]
    corpus = []
    for s in range(sentences):
        words = vocab_a if s % 2 == 0 else vocab_b
        corpus.append([str(w) for w in rng.choice(words, size=length)])
    return corpus, vocab_a, vocab_b


@pytest.fixture(scope="session")
def planted_model():
    corpus, vocab_a, vocab_b = planted_corpus()
    model = topics.train_lda(corpus, num_topics=2, iterations=150, seed=3)
    return model, corpus, vocab_a, vocab_b


def random_triple(rng, heads=6, relations=4, tails=6) -> Triple:
    return Triple.from_labels(
        f"h{rng.integers(heads)}", f"r{rng.integers(relations)}", f"t{rng.integers(tails)}")


def random_triple_set(rng, max_size=8) -> frozenset:
    size = int(rng.integers(1, max_size + 1))
    return frozenset(random_triple(rng) for _ in range(size))
