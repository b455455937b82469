import pytest

from factgraph import (Config, ExtractionEmptyError, HashEmbeddingProvider, LLMClient,
                       Triple, TripleParseError, extract_article, extract_llm,
                       extract_rules, normalize_label, split_sentences, topics)
from factgraph.extract import extract_svo, parse_triple_lines


class TestSentenceSplit:
    def test_splits_on_period_and_uppercase(self):
        parts = split_sentences("One thing happened. Another followed! Was it true? Yes.")
        assert parts == ["One thing happened.", "Another followed!", "Was it true?", "Yes."]

    def test_abbreviation_guard(self):
        parts = split_sentences("Dr. Smith approved the study. Patients recovered.")
        assert parts == ["Dr. Smith approved the study.", "Patients recovered."]

    def test_no_split_without_uppercase_follow(self):
        assert split_sentences("pH 7.4 is normal. nothing else") == [
            "pH 7.4 is normal. nothing else"]


class TestSvoGrammar:
    def test_basic_pattern(self):
        assert extract_svo("SARS-CoV-2 causes COVID-19.") == ("sars-cov-2", "causes", "covid-19")

    def test_negation_folded_into_relation(self):
        assert extract_svo("Moderna does not prevent COVID.") == ("moderna", "not_prevent", "covid")

    def test_determiners_stripped_from_chunks(self):
        assert extract_svo("The vaccine prevents the pandemic flu.") == (
            "vaccine", "prevents", "pandemic flu")

    def test_rightmost_chunk_after_preposition(self):
        assert extract_svo("The mandate protects elderly people in nursing homes.") == (
            "mandate", "protects", "nursing homes")

    def test_no_verb_means_no_triple(self):
        assert extract_svo("Blue quiet sky color") is None


class TestExtractRules:
    def test_worked_example(self):
        q = extract_rules("SARS-CoV-2 causes COVID-19.")
        assert q.graph.triple_set() == frozenset(
            {Triple.from_labels("sars-cov-2", "causes", "covid-19")})
        assert q.extraction_method == "rules"

    def test_empty_text_rejected(self):
        with pytest.raises(ExtractionEmptyError):
            extract_rules("")

    def test_negation_example(self):
        q = extract_rules("Moderna does not prevent COVID.")
        assert q.graph.triple_set() == frozenset(
            {Triple.from_labels("moderna", "not_prevent", "covid")})

    def test_no_pattern_match_raises(self):
        with pytest.raises(ExtractionEmptyError):
            extract_rules("Gloomy weather again.")

    def test_deterministic(self):
        text = "Vaccines prevent disease. Masks reduce spread."
        a = extract_rules(text)
        b = extract_rules(text)
        assert a.graph.triple_set() == b.graph.triple_set()
        assert a.graph.id == b.graph.id

    def test_normalization_commutes(self):
        raw = "SARS-CoV-2   CAUSES Covid-19."
        normalized = normalize_label(raw).capitalize()
        assert extract_rules(raw).graph.triple_set() == \
            extract_rules(normalized).graph.triple_set()


ARTICLE = (
    "The vaccine prevents pandemic flu. "
    "Many doctors say the vaccine reduces pandemic flu infections. "
    "Health agencies report the vaccine protects against pandemic flu. "
    "Hospitals confirm the vaccine limits pandemic flu outbreaks. "
    "Stadium seating was rearranged before the match. "
    "Quarterly budgets moved through committee yesterday. "
    "A new bridge opened across the river. "
    "Painters restored the old mural downtown. "
    "Farmers expect a strong cherry harvest. "
    "Tourists photographed the lighthouse at dawn."
)

CORPUS_SENTENCES = [
    "vaccine prevents pandemic flu infections",
    "vaccine protects health against pandemic flu",
    "doctors report pandemic flu outbreaks",
    "hospitals treat pandemic flu patients",
    "stadium seating match tickets",
    "budgets committee spending votes",
    "bridge river construction opening",
    "painters mural downtown art",
    "farmers cherry harvest crops",
    "tourists lighthouse dawn photos",
] * 6


@pytest.fixture(scope="module")
def article_model():
    corpus = [topics.tokenize(s) for s in CORPUS_SENTENCES]
    return topics.train_lda(corpus, num_topics=4, iterations=120, seed=9)


class TestExtractArticle:
    def test_two_sentence_article_single_svo(self, article_model):
        text = "Gloomy weather again. Vaccines prevent disease."
        q = extract_article(text, article_model, HashEmbeddingProvider(128), Config())
        assert q.graph.triple_set() == frozenset(
            {Triple.from_labels("vaccines", "prevent", "disease")})

    def test_duplicate_sentences_dedup(self, article_model):
        text = "Vaccines prevent disease. Vaccines prevent disease. Vaccines prevent disease."
        q = extract_article(text, article_model, HashEmbeddingProvider(128), Config())
        assert len(q.graph.facts) == 1

    def test_health_dense_sentence_survives_selection(self, article_model):
        q = extract_article(ARTICLE, article_model, HashEmbeddingProvider(128), Config())
        wanted = Triple.from_labels("vaccine", "prevents", "pandemic flu")
        assert wanted in q.graph.triple_set()
        assert q.triple_weights[wanted] > 0

    def test_output_is_subset_of_rules_on_all_sentences(self, article_model):
        q = extract_article(ARTICLE, article_model, HashEmbeddingProvider(128), Config())
        full = extract_rules(ARTICLE)
        assert q.graph.triple_set() <= full.graph.triple_set()

    def test_single_sentence_rejected(self, article_model):
        with pytest.raises(ValueError):
            extract_article("Only one sentence here.", article_model,
                            HashEmbeddingProvider(128), Config())

    def test_diagnostics_hook(self, article_model):
        diag = {}
        extract_article(ARTICLE, article_model, HashEmbeddingProvider(128), Config(),
                        diagnostics=diag)
        assert len(diag["sentences"]) == 10
        assert len(diag["centrality_scores"]) == 10
        assert len(diag["selected"]) == 3


class TestTripleLineParsing:
    def test_strict_lines(self):
        triples, bad = parse_triple_lines("moderna | prevents | covid\njunk line\n")
        assert triples == [("moderna", "prevents", "covid")]
        assert bad == ["junk line"]

    def test_empty_fields_are_bad(self):
        triples, bad = parse_triple_lines("a |  | c")
        assert triples == []
        assert len(bad) == 1


class TestExtractLlm:
    def test_single_canned_triple(self):
        client = LLMClient(transcript=["moderna | prevents | covid"])
        q = extract_llm(client, "Does Moderna prevent COVID?")
        assert q.extraction_method == "llm"
        assert q.graph.triple_set() == frozenset(
            {Triple.from_labels("moderna", "prevents", "covid")})

    def test_malformed_with_fallback_uses_rules(self):
        client = LLMClient(transcript=["no triples here, sorry"])
        q = extract_llm(client, "Moderna prevents COVID.")
        assert q.extraction_method == "rules"
        assert q.graph.triple_set() == frozenset(
            {Triple.from_labels("moderna", "prevents", "covid")})

    def test_malformed_without_fallback_raises_with_lines(self):
        client = LLMClient(transcript=["total junk"])
        with pytest.raises(TripleParseError) as err:
            extract_llm(client, "Moderna prevents COVID.", fallback=False)
        assert err.value.bad_lines == ["total junk"]

    def test_three_lines_order_independent(self):
        response = ("a | r1 | b\n"
                    "c | r2 | d\n"
                    "e | r3 | f")
        client = LLMClient(transcript=[response])
        q = extract_llm(client, "Some claim.")
        assert q.graph.triple_set() == frozenset({
            Triple.from_labels("a", "r1", "b"),
            Triple.from_labels("c", "r2", "d"),
            Triple.from_labels("e", "r3", "f"),
        })
