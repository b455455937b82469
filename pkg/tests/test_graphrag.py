from fractions import Fraction

import numpy as np
import pytest

from factgraph import (ContradictionRules, KnowledgeBase, KnowledgeGraph, Triple,
                       contradicts, find_contradictions, retrieve, score, verdict,
                       verdict_to_json_dict, weight_from_scores)

from conftest import random_triple_set


def brute_force_weighted_jaccard(tx, ti, f):
    """Independent oracle: explicit enumeration of intersection and union."""
    inter = [t for t in tx if t in ti]
    union = list(tx) + [t for t in ti if t not in tx]
    return sum(map(f, inter)) / sum(map(f, union))


def make_graph(graph_id, labels):
    g = KnowledgeGraph(id=graph_id)
    for h, r, t in labels:
        g.add_triple(Triple.from_labels(h, r, t))
    return g


MODERNA = Triple.from_labels("Moderna", "prevents", "COVID")
PFIZER = Triple.from_labels("Pfizer", "treats", "cancer")
AZ = Triple.from_labels("A.Z.", "prevents", "flu")


class TestScore:
    def test_worked_vaccine_example(self):
        s = score(frozenset({MODERNA, PFIZER}), frozenset({MODERNA, AZ}))
        assert abs(s.value - 1.0 / 3.0) < 1e-12
        assert s.shared == frozenset({MODERNA})

    def test_identical_sets(self):
        ts = frozenset({MODERNA, PFIZER})
        assert score(ts, ts).value == 1.0

    def test_disjoint_sets(self):
        assert score(frozenset({MODERNA}), frozenset({AZ})).value == 0.0

    def test_empty_query_rejected(self):
        with pytest.raises(ValueError):
            score(frozenset(), frozenset({AZ}))

    def test_weighted_matches_brute_force_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            tx = random_triple_set(rng)
            ti = random_triple_set(rng)
            weights = {}

            def f(t):
                if t not in weights:
                    weights[t] = 0.1 + float(rng.random())
                return weights[t]

            for t in sorted(tx | ti, key=lambda t: t.labels()):
                f(t)  # freeze weights in deterministic order
            expected = brute_force_weighted_jaccard(tx, ti, f)
            assert score(tx, ti, f).value == pytest.approx(expected, abs=1e-12)

    def test_constant_f_equals_set_ratio_exactly_1000_pairs(self):
        rng = np.random.default_rng(23)
        for _ in range(1000):
            tx = random_triple_set(rng)
            ti = random_triple_set(rng)
            expected = float(Fraction(len(tx & ti), len(tx | ti)))
            assert score(tx, ti).value == expected

    def test_symmetry(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            a = random_triple_set(rng)
            b = random_triple_set(rng)
            assert score(a, b).value == score(b, a).value

    def test_adding_shared_triple_never_decreases(self):
        rng = np.random.default_rng(31)
        extra = Triple.from_labels("zz-new", "zz-rel", "zz-tail")
        for _ in range(100):
            a = random_triple_set(rng)
            b = random_triple_set(rng)
            before = score(a, b).value
            after = score(a | {extra}, b | {extra}).value
            assert after >= before

    def test_floor_keeps_weights_positive(self):
        f = weight_from_scores({MODERNA: 0.0}, floor=1e-6)
        assert f(MODERNA) == 1e-6
        assert f(AZ) == 1.0


class TestRetrieve:
    def make_kb(self):
        return KnowledgeBase([
            make_graph("moderna", [("Moderna", "prevents", "COVID"),
                                   ("A.Z.", "prevents", "flu")]),
            make_graph("pfizer", [("Pfizer", "treats", "cancer")]),
            make_graph("tax", [("Budget", "funds", "roads")]),
        ])

    def test_exact_match_ranks_first_with_one(self):
        kb = self.make_kb()
        query = make_graph("q", [("Pfizer", "treats", "cancer")])
        ranked = retrieve(kb, query)
        assert ranked[0].graph_id == "pfizer"
        assert ranked[0].value == 1.0

    def test_no_shared_entities_gives_empty_list(self):
        kb = self.make_kb()
        query = make_graph("q", [("Venus", "orbits", "Sun")])
        assert retrieve(kb, query) == []

    def test_three_graph_ordering_matches_hand_computation(self):
        kb = self.make_kb()
        query = make_graph("q", [("Moderna", "prevents", "COVID"),
                                 ("Pfizer", "treats", "cancer")])
        ranked = retrieve(kb, query)
        # moderna graph: |∩|=1, |∪|=3 -> 1/3 ; pfizer graph: 1/2
        assert [s.graph_id for s in ranked] == ["pfizer", "moderna"]
        assert ranked[0].value == pytest.approx(0.5)
        assert ranked[1].value == pytest.approx(1.0 / 3.0)

    def test_tie_broken_by_graph_id(self):
        kb = KnowledgeBase([
            make_graph("b", [("x", "r", "y")]),
            make_graph("a", [("x", "r", "z")]),
        ])
        query = make_graph("q", [("x", "r", "y"), ("x", "r", "z")])
        ranked = retrieve(kb, query)
        assert [s.graph_id for s in ranked] == ["a", "b"]

    def test_plain_list_kb_accepted(self):
        graphs = self.make_kb().graphs()
        query = make_graph("q", [("Pfizer", "treats", "cancer")])
        ranked = retrieve(graphs, query)
        assert ranked[0].graph_id == "pfizer"

    def test_empty_kb_rejected(self):
        with pytest.raises(ValueError):
            retrieve([], make_graph("q", [("a", "r", "b")]))

    def test_top_n_truncates(self):
        kb = self.make_kb()
        query = make_graph("q", [("Moderna", "prevents", "COVID"),
                                 ("Pfizer", "treats", "cancer")])
        assert len(retrieve(kb, query, top_n=1)) == 1


DESANTIS_RULES = ContradictionRules.from_pairs([("mandated", "blocked mandate of")])


class TestContradicts:
    def test_antonym_pair_detected(self):
        tx = frozenset({Triple.from_labels("Florida", "mandated", "vaccine")})
        ti = frozenset({Triple.from_labels("Florida", "blocked mandate of", "vaccine")})
        hits = contradicts(tx, ti, DESANTIS_RULES)
        assert len(hits) == 1
        qt, kt = hits[0]
        assert qt.relation.canonical_label == "mandated"
        assert kt.relation.canonical_label == "blocked mandate of"

    def test_antonyms_symmetric(self):
        tx = frozenset({Triple.from_labels("Florida", "blocked mandate of", "vaccine")})
        ti = frozenset({Triple.from_labels("Florida", "mandated", "vaccine")})
        assert len(contradicts(tx, ti, DESANTIS_RULES)) == 1

    def test_negation_marker_detected(self):
        rules = ContradictionRules()
        tx = frozenset({Triple.from_labels("Moderna", "prevents", "COVID")})
        ti = frozenset({Triple.from_labels("Moderna", "not_prevents", "COVID")})
        assert len(contradicts(tx, ti, rules)) == 1

    def test_identical_sets_no_contradiction(self):
        ts = frozenset({MODERNA, PFIZER})
        assert contradicts(ts, ts, DESANTIS_RULES) == []

    def test_disjoint_entities_no_contradiction(self):
        tx = frozenset({Triple.from_labels("Texas", "mandated", "masks")})
        ti = frozenset({Triple.from_labels("Florida", "blocked mandate of", "vaccine")})
        assert contradicts(tx, ti, DESANTIS_RULES) == []


class TestVerdict:
    def perfect(self):
        return [score(frozenset({MODERNA}), frozenset({MODERNA}), graph_id="moderna")]

    def test_true_on_high_score(self):
        v = verdict(self.perfect(), [], theta_true=0.5)
        assert v.label == "True"
        assert v.best_score == 1.0
        assert len(v.evidence) == 1
        assert v.evidence[0].role == "supporting"

    def test_undetermined_without_candidates(self):
        v = verdict([], [], theta_true=0.5)
        assert v.label == "Undetermined"
        assert v.best_score == 0.0
        assert v.evidence == []

    def test_contradiction_takes_precedence(self):
        kb_triple = Triple.from_labels("Florida", "blocked mandate of", "vaccine")
        query_triple = Triple.from_labels("Florida", "mandated", "vaccine")
        v = verdict(self.perfect(), [(query_triple, kb_triple, "florida")], theta_true=0.5)
        assert v.label == "False"
        assert v.evidence[0].role == "contradicting"
        assert v.evidence[0].triple == kb_triple

    def test_below_threshold_is_undetermined_with_partial_evidence(self):
        partial = [score(frozenset({MODERNA, PFIZER}), frozenset({MODERNA, AZ}),
                         graph_id="moderna")]
        v = verdict(partial, [], theta_true=0.6)
        assert v.label == "Undetermined"
        assert v.best_score == pytest.approx(1.0 / 3.0)
        assert [e.triple for e in v.evidence] == [MODERNA]

    def test_theta_validated(self):
        with pytest.raises(ValueError):
            verdict([], [], theta_true=0.0)

    def test_deterministic_output(self):
        ranked = [score(frozenset({MODERNA, PFIZER}), frozenset({MODERNA, PFIZER}),
                        graph_id="g")]
        a = verdict(ranked, [], 0.5)
        b = verdict(ranked, [], 0.5)
        assert a == b
        assert [e.triple.labels() for e in a.evidence] == sorted(
            e.triple.labels() for e in a.evidence)


class TestFindContradictions:
    def test_pairs_carry_graph_ids(self):
        g = make_graph("florida", [("Florida", "blocked mandate of", "vaccine")])
        query = make_graph("q", [("Florida", "mandated", "vaccine")])
        hits = find_contradictions(query, [g], DESANTIS_RULES)
        assert len(hits) == 1
        assert hits[0][2] == "florida"


class TestVerdictJson:
    def test_schema_fields(self):
        v = verdict([score(frozenset({MODERNA}), frozenset({MODERNA}), graph_id="m")], [], 0.5)
        data = verdict_to_json_dict(v, claim="Moderna prevents COVID.", config_hash="abc123")
        assert data["schema_version"] == 1
        assert data["label"] == "True"
        assert data["claim"] == "Moderna prevents COVID."
        assert data["config_hash"] == "abc123"
        assert data["evidence"][0] == {
            "head": "moderna", "relation": "prevents", "tail": "covid",
            "graph_id": "m", "role": "supporting",
        }
        assert isinstance(data["reasoning_text"], str)
