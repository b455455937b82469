"""Store, index, and ingest health knowledge graphs as entity-relation-entity triples.

A knowledge graph is a directed labeled graph: a set of entities, a set of
relation labels, and a duplicate-free set of (head, relation, tail) facts.
Ingestion reads line-oriented triple records (N-triples style), keeps only
records touching health-related labels, and groups the survivors into one
graph per subject entity so retrieval candidates stay small.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field

from .errors import IngestError

DEFAULT_HEALTH_KEYWORDS = (
    "health",
    "medical",
    "medicine",
    "disease",
    "pandemic",
    "epidemic",
)

_WS_RE = re.compile(r"\s+")
# subject/predicate/object tokens: IRI, quoted literal (optional tag suffix), or bare word
_TOKEN_RE = re.compile(r'<[^>]*>|"[^"]*"\S*|\S+')


def normalize_label(text: str) -> str:
    """Canonicalize a label: lowercase, trim, collapse whitespace, strip quotes.

    Idempotent: applying it twice gives the same result. Surrounding quote
    pairs are stripped repeatedly so nested quoting cannot survive one call.
    """
    s = text.strip()
    while len(s) >= 2 and s[0] == s[-1] and s[0] in ('"', "'"):
        s = s[1:-1].strip()
    return _WS_RE.sub(" ", s.lower()).strip()


@dataclass(frozen=True)
class EntityId:
    """A normalized entity label plus the surface strings that produced it.

    Equality and hashing use only the canonical label, so triples match on
    meaning rather than on cosmetic variation.
    """

    canonical_label: str
    surface_forms: frozenset[str] = field(default_factory=frozenset, compare=False)

    def __post_init__(self):
        if not self.canonical_label:
            raise ValueError("entity label is empty after normalization")
        if normalize_label(self.canonical_label) != self.canonical_label:
            raise ValueError(f"entity label not normalized: {self.canonical_label!r}")

    @classmethod
    def from_text(cls, text: str) -> "EntityId":
        return cls(normalize_label(text), frozenset({text}))


@dataclass(frozen=True)
class RelationId:
    """A normalized relation label."""

    canonical_label: str

    def __post_init__(self):
        if not self.canonical_label:
            raise ValueError("relation label is empty after normalization")
        if normalize_label(self.canonical_label) != self.canonical_label:
            raise ValueError(f"relation label not normalized: {self.canonical_label!r}")

    @classmethod
    def from_text(cls, text: str) -> "RelationId":
        return cls(normalize_label(text))


@dataclass(frozen=True)
class Triple:
    """One relational fact: head entity, relation, tail entity."""

    head: EntityId
    relation: RelationId
    tail: EntityId

    @classmethod
    def from_labels(cls, head: str, relation: str, tail: str) -> "Triple":
        return cls(EntityId.from_text(head), RelationId.from_text(relation), EntityId.from_text(tail))

    def labels(self) -> tuple[str, str, str]:
        return (self.head.canonical_label, self.relation.canonical_label, self.tail.canonical_label)


TripleSet = frozenset  # frozenset[Triple]


def triple_sort_key(triple: Triple) -> tuple[str, str, str]:
    """Stable ordering key; used wherever deterministic output matters."""
    return triple.labels()


@dataclass
class KnowledgeGraph:
    """A directed labeled graph of facts with its entity and relation sets.

    Invariant: every entity/relation referenced by a fact is present in the
    ``entities`` / ``relations`` sets (maintained by ``add_triple``).
    """

    id: str
    entities: set = field(default_factory=set)
    relations: set = field(default_factory=set)
    facts: set = field(default_factory=set)
    source_meta: dict = field(default_factory=dict)

    def add_triple(self, triple: Triple) -> "KnowledgeGraph":
        """Add a fact; idempotent on duplicates, keeps the component sets closed."""
        self.facts.add(triple)
        self.entities.add(triple.head)
        self.entities.add(triple.tail)
        self.relations.add(triple.relation)
        return self

    def triple_set(self) -> TripleSet:
        return frozenset(self.facts)

    def entity_labels(self) -> set:
        return {e.canonical_label for e in self.entities}


def add_triple(graph: KnowledgeGraph, triple: Triple) -> KnowledgeGraph:
    return graph.add_triple(triple)


def triple_set(graph: KnowledgeGraph) -> TripleSet:
    return graph.triple_set()


def health_filter(label: str, keywords=DEFAULT_HEALTH_KEYWORDS) -> bool:
    """True iff any keyword occurs in the label, case-insensitively."""
    keywords = list(keywords)
    if not keywords:
        raise ValueError("keyword list must be non-empty")
    lowered = label.lower()
    return any(k.lower() in lowered for k in keywords)


def _reduce_token(token: str) -> str:
    """Reduce an IRI to its final path segment or a quoted literal to its body.

    DBpedia-style resource names encode spaces as underscores; those are
    mapped back so ingested entities match labels extracted from plain text.
    """
    if token.startswith("<") and token.endswith(">"):
        body = token[1:-1]
        segment = body.rsplit("/", 1)[-1].rsplit("#", 1)[-1]
        return segment.replace("_", " ")
    if token.startswith('"'):
        end = token.find('"', 1)
        if end > 0:
            return token[1:end]
        return token.strip('"')
    return token


def parse_triple_line(line: str) -> Triple | None:
    """Parse one `<subject> <predicate> <object> .` record; None if malformed."""
    tokens = _TOKEN_RE.findall(line)
    if len(tokens) != 4 or tokens[3] != ".":
        return None
    try:
        head, rel, tail = (_reduce_token(t) for t in tokens[:3])
        return Triple.from_labels(head, rel, tail)
    except ValueError:
        return None


@dataclass
class IngestReport:
    """Counts from one ingestion pass; skipped covers blank and comment lines."""

    kept: int = 0
    dropped: int = 0
    malformed: int = 0
    skipped: int = 0

    @property
    def total(self) -> int:
        return self.kept + self.dropped + self.malformed + self.skipped


def ingest_triples(stream, keywords=DEFAULT_HEALTH_KEYWORDS, origin: str = "<stream>",
                   timestamp: str | None = None) -> tuple[list[KnowledgeGraph], IngestReport]:
    """Read triple records, keep health-related ones, group them by subject.

    ``stream`` is any iterable of text lines. A record is retained when any
    of its three component labels passes :func:`health_filter`. Malformed
    lines are counted, not fatal; an unreadable stream raises
    :class:`IngestError` with the failing position.

    Returns the per-subject graphs in first-seen order plus the count report.
    """
    report = IngestReport()
    by_subject: dict[str, KnowledgeGraph] = {}
    lines = iter(stream)
    line_no = 0
    while True:
        try:
            line = next(lines)
        except StopIteration:
            break
        except (OSError, UnicodeDecodeError, ValueError) as exc:
            raise IngestError(f"stream unreadable at line {line_no + 1}: {exc}",
                              line_no=line_no + 1) from exc
        line_no += 1
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            report.skipped += 1
            continue
        triple = parse_triple_line(stripped)
        if triple is None:
            report.malformed += 1
            continue
        if not any(health_filter(label, keywords) for label in triple.labels()):
            report.dropped += 1
            continue
        report.kept += 1
        subject = triple.head.canonical_label
        graph = by_subject.get(subject)
        if graph is None:
            meta = {"origin": origin}
            if timestamp is not None:
                meta["timestamp"] = timestamp
            graph = KnowledgeGraph(id=subject, source_meta=meta)
            by_subject[subject] = graph
        graph.add_triple(triple)
    return list(by_subject.values()), report


class KnowledgeBase:
    """A set of knowledge graphs with an entity index.

    Reads are served from plain lookups and are safe to run concurrently;
    mutation takes the internal lock so writers get exclusive access.
    """

    def __init__(self, graphs=()):
        self._lock = threading.RLock()
        self._graphs: dict[str, KnowledgeGraph] = {}
        self._entity_index: dict[str, set] = {}
        for g in graphs:
            self.add_graph(g)

    def add_graph(self, graph: KnowledgeGraph) -> None:
        with self._lock:
            self._graphs[graph.id] = graph
            for entity in graph.entities:
                self._entity_index.setdefault(entity.canonical_label, set()).add(graph.id)

    def graphs(self) -> list[KnowledgeGraph]:
        return list(self._graphs.values())

    def get(self, graph_id: str) -> KnowledgeGraph | None:
        return self._graphs.get(graph_id)

    def __len__(self) -> int:
        return len(self._graphs)

    def candidates_for(self, entities) -> list[KnowledgeGraph]:
        """Graphs sharing at least one entity with the given collection."""
        ids: set[str] = set()
        for entity in entities:
            label = entity.canonical_label if isinstance(entity, EntityId) else str(entity)
            ids.update(self._entity_index.get(label, ()))
        return [self._graphs[i] for i in sorted(ids)]


def graph_to_json_dict(graph: KnowledgeGraph) -> dict:
    """Deterministic JSON form: sorted nodes and labeled edges."""
    return {
        "id": graph.id,
        "entities": sorted(e.canonical_label for e in graph.entities),
        "relations": sorted(r.canonical_label for r in graph.relations),
        "facts": [list(t.labels()) for t in sorted(graph.facts, key=triple_sort_key)],
        "source_meta": dict(sorted(graph.source_meta.items())),
    }


def graph_from_json_dict(data: dict) -> KnowledgeGraph:
    graph = KnowledgeGraph(id=data["id"], source_meta=dict(data.get("source_meta", {})))
    for head, rel, tail in data.get("facts", []):
        graph.add_triple(Triple.from_labels(head, rel, tail))
    return graph


def graph_to_dot(graph: KnowledgeGraph) -> str:
    """Render the graph in DOT format with relation labels on the edges."""
    lines = [f'digraph "{graph.id}" {{']
    for entity in sorted(graph.entities, key=lambda e: e.canonical_label):
        lines.append(f'  "{entity.canonical_label}";')
    for t in sorted(graph.facts, key=triple_sort_key):
        h, r, o = t.labels()
        lines.append(f'  "{h}" -> "{o}" [label="{r}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_kb(path, graphs, report: IngestReport | None = None) -> None:
    payload = {
        "schema_version": 1,
        "graphs": [graph_to_json_dict(g) for g in graphs],
    }
    if report is not None:
        payload["ingest_report"] = {
            "kept": report.kept,
            "dropped": report.dropped,
            "malformed": report.malformed,
            "skipped": report.skipped,
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_kb(path) -> KnowledgeBase:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return KnowledgeBase(graph_from_json_dict(d) for d in payload.get("graphs", []))
