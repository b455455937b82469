"""Graph-based fact checking for health claims.

Builds knowledge graphs from triple dumps, trains a sentence-level topic
model, ranks sentences with a topic-biased TextRank chain, and verifies
claims by weighted triple-set overlap with True/False/Undetermined verdicts.
"""

from .bench import SweepResult, SweepRow, WSConfig, emit_csv, run_sweep, watts_strogatz
from .centrality import (SentenceGraph, build_sentence_graph, default_selection_count,
                         rank_sentences, top_sentences)
from .config import Config, build_config, config_hash
from .embed import HashEmbeddingProvider, RemoteEmbeddingProvider, combine, cosine
from .errors import (ConfigError, ConvergenceError, ExtractionEmptyError, FactGraphError,
                     IngestError, MockExhaustedError, TemplateError, TransportError,
                     TripleParseError)
from .extract import QueryGraph, extract_article, extract_llm, extract_rules, split_sentences
from .graphrag import (ContradictionRules, Evidence, SimilarityScore, Verdict, constant_weight,
                       contradicts, find_contradictions, retrieve, score, verdict,
                       verdict_to_json_dict, weight_from_scores)
from .kgstore import (EntityId, IngestReport, KnowledgeBase, KnowledgeGraph, RelationId,
                      Triple, TripleSet, add_triple, graph_to_dot, graph_to_json_dict,
                      health_filter, ingest_triples, load_kb, normalize_label, save_kb,
                      triple_set)
from .llmclient import LLMClient, PromptTemplate, load_template, render
from .topicrank import (ConvergenceReport, adjust_weights, build_transition, lambda2,
                        power_iterate, verify_envelope)
from .topics import (HealthTopicSet, TopicModel, identify_health_topics, infer_topics,
                     load_model, save_model, tokenize, topic_relevance, train_lda,
                     uniform_relevance)

__version__ = "0.1.0"
