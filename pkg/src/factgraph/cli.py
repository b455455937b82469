"""Command-line surface: ingest, train-topics, check, bench-convergence, export-graph.

Exit codes of `check` are a stable contract: 0 = True, 1 = False,
3 = Undetermined; operational failures (bad paths, bad config) exit 2.
All randomness funnels through the single --seed flag so every run is
reproducible.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import bench, centrality, extract, graphrag, kgstore, topics
from .config import Config, build_config, config_hash
from .embed import HashEmbeddingProvider, RemoteEmbeddingProvider
from .errors import FactGraphError
from .graphrag import EXIT_CODES, ContradictionRules
from .llmclient import LLMClient

OP_FAILURE = 2


def _provider(config: Config):
    if config.embed_provider == "remote":
        return RemoteEmbeddingProvider(endpoint=config.embed_endpoint or None,
                                       dimension=config.embed_dimension,
                                       timeout=config.embed_timeout)
    return HashEmbeddingProvider(dimension=config.embed_dimension)


def _config_from_args(args) -> Config:
    flag_overrides = {
        key: getattr(args, key, None)
        for key in ("eta", "alpha", "d", "tol", "max_iter", "num_topics",
                    "theta_true", "seed", "top_sentences", "retrieve_top_n",
                    "embed_dimension")
    }
    if getattr(args, "keywords", None):
        flag_overrides["health_keywords"] = tuple(args.keywords.split(","))
    return build_config(getattr(args, "config", None), flag_overrides)


def cmd_ingest(args) -> int:
    config = _config_from_args(args)
    path = Path(args.triples)
    if not path.is_file():
        print(f"error: triples file not found: {path}", file=sys.stderr)
        return OP_FAILURE
    timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    with open(path, "r", encoding="utf-8") as fh:
        graphs, report = kgstore.ingest_triples(
            fh, keywords=config.health_keywords, origin=str(path), timestamp=timestamp)
    kgstore.save_kb(args.out, graphs, report)
    print(f"kept={report.kept} dropped={report.dropped} "
          f"malformed={report.malformed} skipped={report.skipped} graphs={len(graphs)}")
    return 0


def cmd_train_topics(args) -> int:
    config = _config_from_args(args)
    path = Path(args.corpus)
    if not path.is_file():
        print(f"error: corpus file not found: {path}", file=sys.stderr)
        return OP_FAILURE
    with open(path, "r", encoding="utf-8") as fh:
        corpus = [topics.tokenize(line) for line in fh if line.strip()]
    corpus = [doc for doc in corpus if doc]
    model = topics.train_lda(corpus, num_topics=config.num_topics,
                             iterations=args.iters, seed=config.seed)
    topics.save_model(args.out, model)
    health = topics.identify_health_topics(model, config.health_keywords,
                                           alpha_boost=config.alpha)
    print(f"trained num_topics={model.num_topics} vocab={model.vocab_size} "
          f"sentences={len(corpus)} health_topics={sorted(health.topic_ids)}")
    return 0


def _extract_query(args, config: Config, text: str):
    if getattr(args, "llm_transcript", None):
        with open(args.llm_transcript, "r", encoding="utf-8") as fh:
            transcript = json.load(fh)
        client = LLMClient(transcript=transcript, model=config.llm_model)
        return extract.extract_llm(client, text)
    if getattr(args, "topics", None) and len(extract.split_sentences(text)) >= 2:
        model = topics.load_model(args.topics)
        diagnostics: dict = {}
        query = extract.extract_article(text, model, _provider(config), config,
                                        diagnostics=diagnostics)
        if getattr(args, "scores_csv", None):
            centrality.scores_to_csv(diagnostics["centrality_scores"],
                                     diagnostics["sentences"], args.scores_csv)
        return query
    return extract.extract_rules(text)


def cmd_check(args) -> int:
    config = _config_from_args(args)
    kb_path = Path(args.kb)
    if not kb_path.is_file():
        print(f"error: knowledge base not found: {kb_path}", file=sys.stderr)
        return OP_FAILURE
    kb = kgstore.load_kb(kb_path)

    if args.file:
        with open(args.claim, "r", encoding="utf-8") as fh:
            text = fh.read().strip()
    else:
        text = args.claim.strip()

    query = _extract_query(args, config, text)
    weight_fn = (graphrag.weight_from_scores(query.triple_weights)
                 if query.triple_weights else graphrag.constant_weight)
    ranked = graphrag.retrieve(kb, query, weight_fn, top_n=config.retrieve_top_n)
    rules = ContradictionRules.from_pairs(config.antonym_pairs, config.negation_markers)
    candidates = [kb.get(s.graph_id) for s in ranked]
    contradictions = graphrag.find_contradictions(query, candidates, rules)
    result = graphrag.verdict(ranked, contradictions, theta_true=config.theta_true)

    payload = graphrag.verdict_to_json_dict(result, text, config_hash(config))
    print(json.dumps(payload, indent=2))
    return EXIT_CODES[result.label]


def cmd_bench(args) -> int:
    config = _config_from_args(args)
    ds = tuple(float(x) for x in args.ds.split(","))
    cfg = bench.WSConfig(n=args.n, k=args.k, p_rewire=args.p, seed=config.seed)
    graph = bench.watts_strogatz(cfg)
    result = bench.run_sweep(graph, ds=ds, tol=config.tol, max_iter=config.max_iter,
                             dense_bound=config.dense_eigen_bound)
    written = bench.emit_csv(result, args.out)
    for path in written:
        print(path)
    return 0


def cmd_export_graph(args) -> int:
    kb_path = Path(args.kb)
    if not kb_path.is_file():
        print(f"error: knowledge base not found: {kb_path}", file=sys.stderr)
        return OP_FAILURE
    kb = kgstore.load_kb(kb_path)
    graph = kb.get(args.graph_id)
    if graph is None:
        print(f"error: no graph with id '{args.graph_id}'", file=sys.stderr)
        return OP_FAILURE
    if args.format == "dot":
        output = kgstore.graph_to_dot(graph)
    else:
        output = json.dumps(kgstore.graph_to_json_dict(graph), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    return 0


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--seed", type=int, default=None, help="seed for all randomness")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factgraph",
        description="Graph-based health fact checking: build knowledge graphs, "
                    "rank content, verify claims.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="filter and group a triple dump into a KB snapshot")
    p.add_argument("triples", help="line-oriented triple file")
    p.add_argument("--out", required=True, help="KB snapshot JSON path")
    p.add_argument("--keywords", help="comma-separated health keywords")
    _add_config_flags(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train-topics", help="train the sentence topic model")
    p.add_argument("--corpus", required=True, help="one sentence per line")
    p.add_argument("--k", dest="num_topics", type=int, default=None, help="topic count")
    p.add_argument("--iters", type=int, default=1000, help="Gibbs sweeps")
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--keywords", help="comma-separated health keywords")
    _add_config_flags(p)
    p.set_defaults(func=cmd_train_topics)

    p = sub.add_parser("check", help="verify a claim against a KB snapshot")
    p.add_argument("claim", help="claim text, or a file path with --file")
    p.add_argument("--kb", required=True, help="KB snapshot JSON path")
    p.add_argument("--file", action="store_true", help="treat the claim argument as a file path")
    p.add_argument("--topics", help="topic model JSON; enables article mode for multi-sentence input")
    p.add_argument("--llm-transcript", help="JSON list of canned completions (mock extraction)")
    p.add_argument("--theta-true", dest="theta_true", type=float, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--top-sentences", dest="top_sentences", type=int, default=None)
    p.add_argument("--retrieve-top-n", dest="retrieve_top_n", type=int, default=None)
    p.add_argument("--keywords", help="comma-separated health keywords")
    p.add_argument("--scores-csv", help="write per-sentence centrality scores here (article mode)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench-convergence", help="damping sweep on a Watts-Strogatz graph")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--ds", default=",".join(str(d) for d in bench.DEFAULT_DS))
    p.add_argument("--out", required=True, help="output directory for CSV files")
    _add_config_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-graph", help="export one KB graph as JSON or DOT")
    p.add_argument("--kb", required=True)
    p.add_argument("--graph-id", required=True)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_export_graph)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FactGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return OP_FAILURE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return OP_FAILURE


if __name__ == "__main__":
    sys.exit(main())
