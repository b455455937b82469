"""Turn claims or articles into query knowledge graphs.

The rule-based extractor is a deliberately shallow subject/verb/object
grammar: leftmost noun chunk, main verb with negation folded into the
relation, rightmost noun chunk. It exists so the whole pipeline runs and
tests offline; the LLM-backed path parses "head | relation | tail" lines
from a few-shot completion and can fall back to the rules.

Long articles are first reduced: sentences are ranked by centrality over
their combined vectors, the top slice is kept, and the topic-biased rank of
each surviving sentence becomes the weight of the triples extracted from it.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

import numpy as np

from . import centrality, topicrank, topics
from .embed import combine
from .errors import ExtractionEmptyError, TripleParseError
from .kgstore import KnowledgeGraph, Triple
from .llmclient import LLMClient, PromptTemplate, load_template, render

SENTENCE_END_RE = re.compile(r"([.!?])\s+(?=[A-Z0-9\"'])")
ABBREVIATIONS = frozenset({
    "dr", "mr", "mrs", "ms", "prof", "st", "vs", "etc", "approx", "dept",
    "e.g", "i.e", "u.s", "u.k", "no", "fig",
})

TOKEN_RE = re.compile(r"[A-Za-z0-9](?:[A-Za-z0-9\-']*[A-Za-z0-9])?")

AUX_VERBS = frozenset({
    "is", "are", "was", "were", "be", "been", "being", "do", "does", "did",
    "has", "have", "had", "can", "could", "will", "would", "may", "might",
    "must", "should", "shall",
})
NEGATIONS = frozenset({"not", "never", "no"})
DETERMINERS = frozenset({
    "the", "a", "an", "this", "that", "these", "those", "its", "their",
    "his", "her", "our", "your", "my", "some", "any", "each", "every",
})
CHUNK_BREAKS = frozenset({
    "against", "in", "of", "for", "to", "from", "with", "by", "on", "at",
    "during", "into", "over", "about", "across", "and", "or", "but", "than",
    "as", "because", "while", "when", "where", "after", "before",
})
VERB_LEXICON = frozenset({
    "cause", "causes", "caused", "prevent", "prevents", "prevented",
    "treat", "treats", "treated", "cure", "cures", "cured",
    "mandate", "mandates", "mandated", "block", "blocks", "blocked",
    "ban", "bans", "banned", "approve", "approves", "approved",
    "require", "requires", "required", "spread", "spreads",
    "reduce", "reduces", "reduced", "increase", "increases", "increased",
    "kill", "kills", "killed", "protect", "protects", "protected",
    "contain", "contains", "contained", "help", "helps", "helped",
    "lead", "leads", "led", "support", "supports", "supported",
    "sign", "signs", "signed", "oppose", "opposes", "opposed",
    "develop", "develops", "developed", "make", "makes", "made",
    "show", "shows", "showed", "prove", "proves", "proved",
    "confirm", "confirms", "confirmed", "report", "reports", "reported",
    "surpass", "surpasses", "surpassed", "exceed", "exceeds", "exceeded",
}) | AUX_VERBS

DEFAULT_FEWSHOT_EXAMPLES = (
    "Claim: SARS-CoV-2 causes COVID-19.\n"
    "sars-cov-2 | causes | covid-19\n"
    "Claim: Moderna does not prevent COVID.\n"
    "moderna | not_prevent | covid"
)


@dataclass
class QueryGraph:
    """A claim rendered as a knowledge graph, plus how it was produced."""

    graph: KnowledgeGraph
    source_claim: str
    extraction_method: str  # "rules" or "llm"
    triple_weights: dict = field(default_factory=dict)


def split_sentences(text: str) -> list[str]:
    """Split on sentence enders followed by whitespace and an uppercase start.

    A period right after a known abbreviation does not end the sentence.
    """
    pieces = []
    start = 0
    for match in SENTENCE_END_RE.finditer(text):
        end = match.end(1)
        before = text[start:match.start(1)].rstrip()
        last_word = before.rsplit(None, 1)[-1].lower().lstrip("(\"'") if before else ""
        if match.group(1) == "." and (last_word in ABBREVIATIONS or
                                      last_word.rstrip(".") in ABBREVIATIONS):
            continue
        pieces.append(text[start:end].strip())
        start = match.end()
    tail = text[start:].strip()
    if tail:
        pieces.append(tail)
    return [p for p in pieces if p]


def _looks_like_verb(token: str) -> bool:
    if token in VERB_LEXICON:
        return True
    return len(token) > 3 and (token.endswith("ed") or token.endswith("ing")
                               or (token.endswith("s") and not token.endswith("ss")))


def _strip_chunk(tokens: list[str]) -> list[str]:
    return [t for t in tokens if t not in DETERMINERS]


def _rightmost_chunk(tokens: list[str]) -> list[str]:
    chunks: list[list[str]] = [[]]
    for tok in tokens:
        if tok in CHUNK_BREAKS:
            chunks.append([])
        else:
            chunks[-1].append(tok)
    for chunk in reversed(chunks):
        stripped = _strip_chunk(chunk)
        if stripped:
            return stripped
    return []


def _triple_at(tokens: list[str], verb_at: int) -> tuple[str, str, str] | None:
    span_end = verb_at
    while span_end + 1 < len(tokens) - 1 and (
        tokens[span_end + 1] in NEGATIONS or tokens[span_end + 1] in VERB_LEXICON
    ):
        span_end += 1
    span = tokens[verb_at:span_end + 1]
    negated = any(t in NEGATIONS for t in span)
    content = [t for t in span if t not in AUX_VERBS and t not in NEGATIONS]
    relation = "_".join(content) if content else span[-1]
    if negated:
        relation = "not_" + relation

    subject = _strip_chunk(tokens[:verb_at])
    obj = _rightmost_chunk(tokens[span_end + 1:])
    if not subject or not obj:
        return None
    return (" ".join(subject), relation, " ".join(obj))


def extract_svo(sentence: str) -> tuple[str, str, str] | None:
    """Shallow (subject, relation, object) pattern; None when the pattern fails.

    Verb candidates are tried left to right, lexicon hits before morphological
    guesses; a candidate that leaves the subject or object chunk empty is
    skipped in favor of the next one.
    """
    tokens = [t.lower() for t in TOKEN_RE.findall(sentence)]
    if len(tokens) < 3:
        return None
    lexicon_hits = [i for i in range(1, len(tokens) - 1) if tokens[i] in VERB_LEXICON]
    guessed_hits = [i for i in range(1, len(tokens) - 1)
                    if i not in lexicon_hits and _looks_like_verb(tokens[i])]
    for verb_at in lexicon_hits + guessed_hits:
        svo = _triple_at(tokens, verb_at)
        if svo is not None:
            return svo
    return None


def _claim_graph_id(text: str) -> str:
    return "query:" + hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


def _graph_from_triples(labels, claim: str, method: str, weights=None) -> QueryGraph:
    graph = KnowledgeGraph(id=_claim_graph_id(claim), source_meta={"origin": "claim"})
    triple_weights = {}
    for entry in labels:
        triple = Triple.from_labels(*entry[:3])
        graph.add_triple(triple)
        if weights is not None:
            w = weights[entry]
            triple_weights[triple] = max(triple_weights.get(triple, 0.0), w)
    if not graph.facts:
        raise ExtractionEmptyError("no triple could be extracted")
    return QueryGraph(graph=graph, source_claim=claim, extraction_method=method,
                      triple_weights=triple_weights)


def extract_rules(text: str) -> QueryGraph:
    """Apply the pattern grammar to every sentence of the text."""
    if not text or not text.strip():
        raise ExtractionEmptyError("input text is empty")
    found = []
    for sentence in split_sentences(text):
        svo = extract_svo(sentence)
        if svo is not None:
            found.append(svo)
    if not found:
        raise ExtractionEmptyError("no sentence matched the extraction grammar")
    return _graph_from_triples(found, text, "rules")


def extract_article(text: str, model: topics.TopicModel, provider, config,
                    diagnostics: dict | None = None) -> QueryGraph:
    """Reduce an article to its central sentences, then extract triples.

    Pipeline: combined vectors -> centrality selection -> topic-biased rank
    over the selected subgraph -> rule extraction on the survivors. Each
    triple carries the rank score of its source sentence so retrieval can
    weight important facts more heavily. Pass a dict as ``diagnostics`` to
    receive the per-sentence centrality scores and the selected indices.
    """
    sentences = split_sentences(text)
    if len(sentences) < 2:
        raise ValueError("article mode needs at least 2 sentences")
    usable = [s for s in sentences if topics.tokenize(s)]
    if not usable:
        raise ExtractionEmptyError("article has no usable sentences")

    vectors = []
    for sentence in usable:
        e = provider.embed(sentence)
        t = topics.infer_topics(model, topics.tokenize(sentence))
        vectors.append(combine(e, t, config.eta))
    graph = centrality.build_sentence_graph(vectors, sentence_refs=usable)
    if graph.n == 1:
        selected = [0]
        scores = np.array([1.0])
        rank_scores = np.array([1.0])
    else:
        scores = centrality.rank_sentences(graph, d=config.d, tol=config.tol,
                                           max_iter=config.max_iter)
        m = config.top_sentences or centrality.default_selection_count(graph.n)
        selected = sorted(centrality.top_sentences(scores, min(m, graph.n)))
        rank_scores = _rank_selected(graph, selected, model, usable, config)
    if diagnostics is not None:
        diagnostics.update(sentences=usable, centrality_scores=scores, selected=selected)

    found = []
    weights = {}
    for local, idx in enumerate(selected):
        svo = extract_svo(usable[idx])
        if svo is None:
            continue
        found.append(svo)
        weights[svo] = max(weights.get(svo, 0.0), float(rank_scores[local]))
    if not found:
        raise ExtractionEmptyError("no selected sentence matched the extraction grammar")
    return _graph_from_triples(found, text, "rules", weights)


def _rank_selected(graph, selected, model, sentences, config) -> np.ndarray:
    """Topic-biased rank scores over the selected sentence subgraph."""
    sub = graph.weights[np.ix_(selected, selected)]
    dists = [topics.infer_topics(model, topics.tokenize(sentences[i])) for i in selected]
    health = topics.identify_health_topics(model, config.health_keywords,
                                           alpha_boost=config.alpha)
    u = topics.topic_relevance(dists, health)
    if len(selected) == 1:
        return np.array([1.0])
    adjusted = topicrank.adjust_weights(sub, u)
    p = topicrank.build_transition(adjusted, u)
    ranked, _ = topicrank.power_iterate(p, u, d=config.d, tol=config.tol,
                                        max_iter=config.max_iter)
    return ranked


TRIPLE_LINE_RE = re.compile(r"^\s*([^|]+)\|([^|]+)\|([^|]+)\s*$")


def parse_triple_lines(text: str) -> tuple[list[tuple[str, str, str]], list[str]]:
    """Parse `head | relation | tail` lines; returns (triples, offending lines)."""
    triples = []
    bad = []
    for line in text.splitlines():
        if not line.strip():
            continue
        match = TRIPLE_LINE_RE.match(line)
        if match is None:
            bad.append(line)
            continue
        parts = tuple(p.strip() for p in match.groups())
        if all(parts):
            triples.append(parts)
        else:
            bad.append(line)
    return triples, bad


def extract_llm(client: LLMClient, text: str, template: PromptTemplate | None = None,
                examples: str = DEFAULT_FEWSHOT_EXAMPLES, fallback: bool = True) -> QueryGraph:
    """Ask the completion service for triples; optionally fall back to rules.

    The response must contain strict "head | relation | tail" lines. When no
    line parses and ``fallback`` is set, the rule extractor takes over;
    otherwise the offending lines are reported in a parse error.
    """
    if not text or not text.strip():
        raise ExtractionEmptyError("input text is empty")
    if template is None:
        template = load_template("triple_extraction_v1.txt")
    prompt = render(template, {"examples": examples, "input": text})
    response = client.complete(prompt)
    triples, bad = parse_triple_lines(response)
    if not triples:
        if fallback:
            return extract_rules(text)
        raise TripleParseError("completion contained no parseable triple line", bad_lines=bad)
    return _graph_from_triples(triples, text, "llm")
