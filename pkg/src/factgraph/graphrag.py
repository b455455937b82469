"""Triple-set similarity scoring, knowledge-base retrieval, and verdicts.

A claim graph is compared against each candidate knowledge graph by weighted
Jaccard overlap of their triple sets: the weight mass of the shared triples
divided by the mass of their union. With a constant weight function this is
plain |intersection| / |union|. The verdict is three-way: an explicit
counter-fact forces False, a strong enough best match yields True, anything
else is Undetermined with the closest partial evidence attached.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .kgstore import KnowledgeBase, Triple, TripleSet, triple_sort_key

DEFAULT_THETA_TRUE = 0.6
DEFAULT_NEGATION_MARKERS = ("not_", "no_")
WEIGHT_FLOOR = 1e-6

LABEL_TRUE = "True"
LABEL_FALSE = "False"
LABEL_UNDETERMINED = "Undetermined"


def constant_weight(triple: Triple) -> float:
    return 1.0


def weight_from_scores(scores: dict, default: float = 1.0, floor: float = WEIGHT_FLOOR):
    """Weight function backed by per-triple rank scores.

    Triples without a score fall back to ``default``; scored triples are
    floored so the weight stays strictly positive.
    """

    def weight(triple: Triple) -> float:
        value = scores.get(triple, default)
        return max(float(value), floor)

    return weight


@dataclass
class SimilarityScore:
    value: float
    graph_id: str
    shared: TripleSet


def score(tx: TripleSet, ti: TripleSet, f=constant_weight, graph_id: str = "") -> SimilarityScore:
    """Weighted Jaccard similarity of two triple sets.

    Sums run in sorted triple order so the floating-point result is identical
    across processes regardless of set iteration order.
    """
    tx = frozenset(tx)
    ti = frozenset(ti)
    if not tx:
        raise ValueError("query triple set is empty")
    shared = tx & ti
    union = tx | ti
    numerator = sum(f(t) for t in sorted(shared, key=triple_sort_key))
    denominator = sum(f(t) for t in sorted(union, key=triple_sort_key))
    if denominator <= 0:
        raise ValueError("triple weights must be strictly positive")
    return SimilarityScore(value=numerator / denominator, graph_id=graph_id,
                           shared=frozenset(shared))


def retrieve(kb, query_graph, f=constant_weight, top_n: int | None = None) -> list[SimilarityScore]:
    """Score candidates sharing at least one entity with the query graph.

    Results are sorted by descending score, ties broken by graph id. The
    list may be empty when nothing in the base touches the query's entities.
    """
    graph = getattr(query_graph, "graph", query_graph)
    if isinstance(kb, KnowledgeBase):
        if len(kb) == 0:
            raise ValueError("knowledge base is empty")
        candidates = kb.candidates_for(graph.entities)
    else:
        candidates = list(kb)
        if not candidates:
            raise ValueError("knowledge base is empty")
        query_entities = set(graph.entities)
        candidates = [g for g in candidates if query_entities & g.entities]
    tx = graph.triple_set()
    scored = [score(tx, g.triple_set(), f, graph_id=g.id) for g in candidates]
    scored.sort(key=lambda s: (-s.value, s.graph_id))
    return scored if top_n is None else scored[:top_n]


def _marker_form(label: str) -> str:
    # canonical labels may carry spaces where markers use underscores
    return label.replace(" ", "_")


@dataclass(frozen=True)
class ContradictionRules:
    """What counts as an explicit counter-fact.

    ``antonym_pairs`` holds canonical relation-label pairs (stored in both
    orientations); a relation also contradicts another that equals it with a
    negation marker prefixed. Comparisons treat spaces and underscores as the
    same character so markers match labels from both ingestion and extraction.
    """

    antonym_pairs: frozenset = frozenset()
    negation_markers: tuple = DEFAULT_NEGATION_MARKERS

    @classmethod
    def from_pairs(cls, pairs, negation_markers=DEFAULT_NEGATION_MARKERS) -> "ContradictionRules":
        symmetric = set()
        for a, b in pairs:
            a, b = _marker_form(a), _marker_form(b)
            symmetric.add((a, b))
            symmetric.add((b, a))
        return cls(frozenset(symmetric), tuple(negation_markers))

    def are_antonyms(self, r1: str, r2: str) -> bool:
        return (r1, r2) in self.antonym_pairs

    def is_negation_pair(self, r1: str, r2: str) -> bool:
        for marker in self.negation_markers:
            if r1 == marker + r2 or r2 == marker + r1:
                return True
        return False

    def conflict(self, r1: str, r2: str) -> bool:
        r1, r2 = _marker_form(r1), _marker_form(r2)
        return r1 != r2 and (self.are_antonyms(r1, r2) or self.is_negation_pair(r1, r2))


def contradicts(tx: TripleSet, ti: TripleSet, rules: ContradictionRules) -> list[tuple]:
    """Pairs (query triple, kb triple) with matching endpoints but conflicting relations."""
    by_endpoints: dict[tuple, list[Triple]] = {}
    for t in sorted(ti, key=triple_sort_key):
        by_endpoints.setdefault((t.head, t.tail), []).append(t)
    hits = []
    for qt in sorted(tx, key=triple_sort_key):
        for kt in by_endpoints.get((qt.head, qt.tail), ()):
            if rules.conflict(qt.relation.canonical_label, kt.relation.canonical_label):
                hits.append((qt, kt))
    return hits


def find_contradictions(query_graph, candidates, rules: ContradictionRules) -> list[tuple]:
    """Run :func:`contradicts` against each candidate knowledge graph.

    Returns (query triple, kb triple, graph id) tuples in candidate order.
    """
    graph = getattr(query_graph, "graph", query_graph)
    tx = graph.triple_set()
    hits = []
    for candidate in candidates:
        for qt, kt in contradicts(tx, candidate.triple_set(), rules):
            hits.append((qt, kt, candidate.id))
    return hits


@dataclass
class Evidence:
    triple: Triple
    graph_id: str
    role: str  # "supporting" or "contradicting"


@dataclass
class Verdict:
    label: str
    best_score: float
    evidence: list = field(default_factory=list)
    reasoning_text: str | None = None


def _render_reasoning(label: str, best: SimilarityScore | None, n_contradictions: int) -> str:
    if label == LABEL_FALSE:
        return (f"{n_contradictions} stored fact(s) directly conflict with the claim; "
                "an explicit counter-fact outweighs any partial overlap.")
    if label == LABEL_TRUE:
        return (f"The claim's facts overlap knowledge graph '{best.graph_id}' with "
                f"similarity {best.value:.2f}, at or above the acceptance threshold.")
    if best is None or best.value == 0.0:
        return "No stored knowledge graph shares enough facts with the claim to decide."
    return (f"Closest knowledge graph '{best.graph_id}' overlaps with similarity "
            f"{best.value:.2f}, below the acceptance threshold; partial evidence attached.")


def verdict(scores, contradictions, theta_true: float = DEFAULT_THETA_TRUE) -> Verdict:
    """Fold ranked similarities and counter-facts into a three-way verdict.

    Contradictions take precedence: one explicit counter-fact defeats any
    overlap score. Otherwise the best candidate at or above ``theta_true``
    yields True with the shared triples as evidence, and anything weaker is
    Undetermined with the top candidate's partial evidence attached.
    """
    if not 0.0 < theta_true <= 1.0:
        raise ValueError("theta_true must lie in (0, 1]")
    scores = list(scores)
    best = scores[0] if scores else None
    best_value = best.value if best is not None else 0.0

    if contradictions:
        evidence = [Evidence(kt, gid, "contradicting")
                    for _, kt, gid in sorted(contradictions,
                                             key=lambda c: (c[2], triple_sort_key(c[1])))]
        return Verdict(LABEL_FALSE, best_value, evidence,
                       _render_reasoning(LABEL_FALSE, best, len(evidence)))

    if best is not None and best_value >= theta_true:
        evidence = [Evidence(t, best.graph_id, "supporting")
                    for t in sorted(best.shared, key=triple_sort_key)]
        return Verdict(LABEL_TRUE, best_value, evidence,
                       _render_reasoning(LABEL_TRUE, best, 0))

    evidence = []
    if best is not None:
        evidence = [Evidence(t, best.graph_id, "supporting")
                    for t in sorted(best.shared, key=triple_sort_key)]
    return Verdict(LABEL_UNDETERMINED, best_value, evidence,
                   _render_reasoning(LABEL_UNDETERMINED, best, 0))


EXIT_CODES = {LABEL_TRUE: 0, LABEL_FALSE: 1, LABEL_UNDETERMINED: 3}


def verdict_to_json_dict(v: Verdict, claim: str, config_hash: str) -> dict:
    return {
        "schema_version": 1,
        "claim": claim,
        "label": v.label,
        "best_score": v.best_score,
        "evidence": [
            {
                "head": e.triple.head.canonical_label,
                "relation": e.triple.relation.canonical_label,
                "tail": e.triple.tail.canonical_label,
                "graph_id": e.graph_id,
                "role": e.role,
            }
            for e in v.evidence
        ],
        "reasoning_text": v.reasoning_text,
        "config_hash": config_hash,
    }
