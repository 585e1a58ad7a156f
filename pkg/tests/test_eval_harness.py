"""Triplet sampling, forced-choice scoring, and agreement statistics."""

from __future__ import annotations

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpusgen import _doc
from vizrec.errors import (
    DegenerateInput,
    InsufficientCorpus,
    IoError,
    ScoringFailure,
)
from vizrec.eval_harness import (
    JudgementSet,
    Triplet,
    agreement_report,
    cohen_kappa,
    fleiss_kappa,
    format_report_table,
    load_gold_csv,
    load_judgements_csv,
    load_triplets_csv,
    model_2afc,
    sample_triplets,
    synthetic_judgements,
    tfidf_scorer,
    lda_scorer,
    write_judgements_csv,
    write_report,
    write_triplets_csv,
)
from vizrec.models import fit_tfidf, tfidf_vector
from vizrec.similarity import cosine_similarity


def judgement_set(vote_rows):
    """rows of (n_a, n_b) -> JudgementSet with synthetic rater ids."""
    choices = {}
    for i, (n_a, n_b) in enumerate(vote_rows):
        votes = ["A"] * n_a + ["B"] * n_b
        choices[f"t{i:03d}"] = {f"r{j}": v for j, v in enumerate(votes)}
    return JudgementSet(choices)


class TestFleissKappa:
    def test_hand_computed_oracle(self):
        # items (3A,0B) (2,1) (1,2) (0,3): observed 2/3, expected 1/2
        result = fleiss_kappa(judgement_set([(3, 0), (2, 1), (1, 2), (0, 3)]))
        assert result.kappa == pytest.approx(1 / 3, abs=1e-12)
        assert result.observed_agreement == pytest.approx(2 / 3, abs=1e-12)
        assert result.expected_agreement == pytest.approx(0.5, abs=1e-12)
        assert (result.n_items, result.n_raters) == (4, 3)
        assert not result.undefined

    def test_unanimous_with_both_categories(self):
        result = fleiss_kappa(judgement_set([(4, 0), (0, 4), (4, 0)]))
        assert result.kappa == pytest.approx(1.0, abs=1e-12)

    def test_single_category_undefined(self):
        result = fleiss_kappa(judgement_set([(3, 0), (3, 0)]))
        assert result.undefined and result.kappa is None
        assert result.expected_agreement == pytest.approx(1.0)

    def test_random_votes_near_zero(self):
        rng = __import__("numpy").random.default_rng(99)
        choices = {
            f"t{i:04d}": {f"r{j}": "AB"[rng.integers(2)] for j in range(10)}
            for i in range(2000)
        }
        result = fleiss_kappa(JudgementSet(choices))
        assert abs(result.kappa) < 0.05

    def test_single_rater_rejected(self):
        with pytest.raises(DegenerateInput):
            fleiss_kappa(JudgementSet({"t0": {"r0": "A"}, "t1": {"r0": "B"}}))


class TestCohenKappa:
    def test_hand_computed_oracle(self):
        # observed 0.8; pooled marginals (0.5, 0.5) -> expected 0.5
        result = cohen_kappa(list("AABBA"), list("ABBBA"))
        assert result.kappa == pytest.approx(0.6, abs=1e-12)

    def test_identical_vectors(self):
        assert cohen_kappa(list("ABAB"), list("ABAB")).kappa == pytest.approx(1.0)

    def test_opposite_balanced_vectors(self):
        assert cohen_kappa(list("ABAB"), list("BABA")).kappa == pytest.approx(-1.0)

    def test_label_swap_invariance(self):
        swap = {"A": "B", "B": "A"}
        r1, r2 = list("AABBABBA"), list("ABBBAABA")
        original = cohen_kappa(r1, r2)
        swapped = cohen_kappa([swap[c] for c in r1], [swap[c] for c in r2])
        assert swapped.kappa == pytest.approx(original.kappa, abs=1e-12)

    def test_all_one_category_undefined(self):
        result = cohen_kappa(list("AAA"), list("AAA"))
        assert result.undefined and result.kappa is None

    def test_input_validation(self):
        with pytest.raises(DegenerateInput):
            cohen_kappa(["A"], ["A", "B"])
        with pytest.raises(DegenerateInput):
            cohen_kappa([], [])
        with pytest.raises(DegenerateInput):
            cohen_kappa(["A", "X"], ["A", "B"])

    @given(
        votes=st.lists(
            st.tuples(st.sampled_from("AB"), st.sampled_from("AB")),
            min_size=1,
            max_size=60,
        )
    )
    @settings(max_examples=300)
    def test_two_rater_panel_reduces_to_pair_statistic(self, votes):
        r1 = [a for a, _ in votes]
        r2 = [b for _, b in votes]
        pair = cohen_kappa(r1, r2)
        panel = fleiss_kappa(
            JudgementSet(
                {f"t{i:03d}": {"r1": a, "r2": b} for i, (a, b) in enumerate(votes)}
            )
        )
        assert pair.undefined == panel.undefined
        if not pair.undefined:
            assert pair.kappa == pytest.approx(panel.kappa, abs=1e-12)
        assert pair.observed_agreement == pytest.approx(
            panel.observed_agreement, abs=1e-12
        )


class TestJudgementSet:
    def test_majority_and_tie(self):
        votes = judgement_set([(2, 2), (1, 3)])
        assert votes.majority("t000") == ("A", 0.5)  # exact tie resolves to A
        assert votes.majority("t001") == ("B", 0.75)
        assert votes.vote_counts("t001") == (1, 3)

    def test_unequal_rater_counts_rejected(self):
        with pytest.raises(DegenerateInput):
            JudgementSet({"t0": {"r0": "A"}, "t1": {"r0": "A", "r1": "B"}})

    def test_invalid_choice_rejected(self):
        with pytest.raises(DegenerateInput):
            JudgementSet({"t0": {"r0": "X"}})

    def test_empty_rejected(self):
        with pytest.raises(DegenerateInput):
            JudgementSet({})

    def test_csv_roundtrip(self, tmp_path):
        votes = judgement_set([(2, 1), (0, 3)])
        path = tmp_path / "votes.csv"
        write_judgements_csv(votes, path)
        assert load_judgements_csv(path).choices == votes.choices

    def test_duplicate_vote_rejected(self, tmp_path):
        path = tmp_path / "votes.csv"
        path.write_text(
            "triplet_id,rater_id,choice\nt0,r0,A\nt0,r0,B\n", encoding="utf-8"
        )
        with pytest.raises(DegenerateInput):
            load_judgements_csv(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "votes.csv"
        path.write_text("id,rater,vote\nt0,r0,A\n", encoding="utf-8")
        with pytest.raises(IoError):
            load_judgements_csv(path)

    def test_gold_csv(self, tmp_path):
        path = tmp_path / "gold.csv"
        path.write_text("triplet_id,choice\nt0,A\nt1,B\n", encoding="utf-8")
        assert load_gold_csv(path) == {"t0": "A", "t1": "B"}
        bad = tmp_path / "bad.csv"
        bad.write_text("triplet,choice\nt0,A\n", encoding="utf-8")
        with pytest.raises(IoError):
            load_gold_csv(bad)
        invalid = tmp_path / "invalid.csv"
        invalid.write_text("triplet_id,choice\nt0,Q\n", encoding="utf-8")
        with pytest.raises(DegenerateInput):
            load_gold_csv(invalid)


class TestSampleTriplets:
    def test_constraints_hold(self, graded_docs):
        by_id = {d.workbook_id: d for d in graded_docs}
        triplets = sample_triplets(graded_docs, n=40, seed=11)
        assert len(triplets) == 40
        usage: dict = {}
        for t in triplets:
            assert len({t.reference, t.alt_a, t.alt_b}) == 3
            for member in (t.reference, t.alt_a, t.alt_b):
                usage[member] = usage.get(member, 0) + 1
                assert 10 <= by_id[member].total_tokens <= 200
            for score in (t.score_a, t.score_b):
                assert 0.15 <= score <= 0.9
            assert abs(t.score_a - t.score_b) >= 0.45
        assert max(usage.values()) <= 2

    def test_deterministic_per_seed(self, graded_docs):
        first = sample_triplets(graded_docs, n=15, seed=4)
        second = sample_triplets(graded_docs, n=15, seed=4)
        assert first == second
        other = sample_triplets(graded_docs, n=15, seed=5)
        assert first != other

    def test_csv_roundtrip_exact(self, tmp_path, graded_docs):
        triplets = sample_triplets(graded_docs, n=10, seed=2)
        path = tmp_path / "triplets.csv"
        write_triplets_csv(triplets, path)
        assert load_triplets_csv(path) == triplets

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,b,c\n1,2,3\n", encoding="utf-8")
        with pytest.raises(IoError):
            load_triplets_csv(path)

    def test_too_few_eligible_documents(self):
        tiny = [_doc(f"d{i}", {"one": 1, "two": 1}) for i in range(10)]
        with pytest.raises(InsufficientCorpus):
            sample_triplets(tiny, n=1, seed=0)

    def test_uniform_corpus_rejected(self):
        # identical docs: every cosine is 1.0, outside the score band
        docs = [
            _doc(f"d{i}", {f"tok{j:02d}": 1 for j in range(12)}) for i in range(30)
        ]
        with pytest.raises(InsufficientCorpus):
            sample_triplets(docs, n=5, seed=0, topics={d.workbook_id: 0 for d in docs})

    def test_constructor_guards(self):
        with pytest.raises(InsufficientCorpus):
            Triplet("tx", "a", "a", "b", 0.2, 0.7)  # duplicate id
        with pytest.raises(InsufficientCorpus):
            Triplet("tx", "a", "b", "c", 0.95, 0.2)  # score above band
        with pytest.raises(InsufficientCorpus):
            Triplet("tx", "a", "b", "c", 0.5, 0.6)  # gap below minimum


TRIPLET = Triplet("t0", "ref", "x", "y", 0.2, 0.7)


class TestModel2Afc:
    def test_picks_higher_alternative(self):
        choice = model_2afc(lambda a, b: {"x": 0.1, "y": 0.8}[b], TRIPLET)
        assert (choice.choice, choice.tie) == ("B", False)
        assert (choice.score_a, choice.score_b) == (0.1, 0.8)

    def test_tie_goes_to_a_with_flag(self):
        choice = model_2afc(lambda a, b: 0.5, TRIPLET)
        assert (choice.choice, choice.tie) == ("A", True)

    def test_scoring_failure_names_triplet(self):
        def broken(a, b):
            raise ScoringFailure("no vector")

        with pytest.raises(ScoringFailure) as excinfo:
            model_2afc(broken, TRIPLET)
        assert "t0" in str(excinfo.value)

    def test_tfidf_scorer_matches_direct_composition(self):
        docs = [
            _doc("a", {"medal": 2, "country": 1}),
            _doc("b", {"medal": 1, "sport": 2}),
            _doc("c", {"country": 2, "sport": 1}),
        ]
        model = fit_tfidf(docs)
        by_id = {d.workbook_id: d for d in docs}
        scorer = tfidf_scorer(model, by_id)
        expected = cosine_similarity(
            tfidf_vector(model, by_id["a"]), tfidf_vector(model, by_id["b"])
        )
        assert scorer("a", "b") == pytest.approx(expected, abs=1e-12)
        assert scorer("a", "b") == pytest.approx(scorer("b", "a"), abs=1e-12)

    def test_unknown_document_id(self):
        model = fit_tfidf([_doc("a", {"medal": 2}), _doc("b", {"sport": 1})])
        scorer = tfidf_scorer(model, {})
        with pytest.raises(ScoringFailure):
            scorer("a", "b")

    def test_lda_scorer_is_call_order_independent(self, planted_lda):
        docs = planted_lda["docs"][:4]
        by_id = {d.workbook_id: d for d in docs}
        ids = sorted(by_id)
        forward = lda_scorer(planted_lda["model"], by_id, seed=21)
        backward = lda_scorer(planted_lda["model"], by_id, seed=21)
        pair_fwd = forward(ids[0], ids[1])
        _ = backward(ids[2], ids[3])  # warm the cache in a different order
        assert backward(ids[0], ids[1]) == pytest.approx(pair_fwd, abs=1e-15)


@pytest.fixture(scope="module")
def panel(graded_docs):
    """40-triplet panel with a 0.75-accuracy rater simulation."""
    triplets = sample_triplets(graded_docs, n=40, seed=11)
    judgements, gold = synthetic_judgements(
        triplets, n_raters=5, accuracy=0.75, seed=3
    )
    table = {}
    for t in triplets:
        table[(t.reference, t.alt_a)] = t.score_a
        table[(t.reference, t.alt_b)] = t.score_b
    scorers = {
        "baseline": lambda a, b: table[(a, b)],
        "warped": lambda a, b: math.exp(3.0 * table[(a, b)]),
        "contrarian": lambda a, b: 1.0 - table[(a, b)],
    }
    report = agreement_report(triplets, judgements, scorers, gold=gold)
    return {
        "triplets": triplets,
        "judgements": judgements,
        "gold": gold,
        "report": report,
    }


class TestAgreementReport:
    def test_regression_pinned_summary(self, panel):
        report = panel["report"]
        assert report["report_version"] == 1
        assert (report["n_triplets"], report["n_raters"]) == (40, 5)
        assert report["split_sizes"] == {"overall": 40, "high": 28, "low": 12}
        assert report["inter_rater"]["kappa"] == pytest.approx(0.37, abs=1e-9)
        assert report["inter_rater"]["observed_agreement"] == pytest.approx(
            0.685, abs=1e-9
        )
        assert report["inter_rater"]["expected_agreement"] == pytest.approx(
            0.5, abs=1e-9
        )

    def test_regression_pinned_model_kappas(self, panel):
        models = panel["report"]["models"]
        for tag in ("baseline", "warped"):
            cells = models[tag]["kappa_vs_majority"]
            assert cells["overall"]["kappa"] == pytest.approx(0.8, abs=1e-9)
            assert cells["high"]["kappa"] == pytest.approx(1.0, abs=1e-9)
            assert cells["low"]["kappa"] == pytest.approx(1 / 3, abs=1e-9)
        contrarian = models["contrarian"]["kappa_vs_majority"]
        assert contrarian["overall"]["kappa"] == pytest.approx(
            -0.8045112781954886, abs=1e-9
        )
        assert contrarian["high"]["kappa"] == pytest.approx(-1.0, abs=1e-9)

    def test_monotone_scorers_agree_perfectly(self, panel):
        matrix = panel["report"]["model_matrix"]
        assert matrix["baseline"]["warped"] == pytest.approx(1.0, abs=1e-12)
        assert matrix["warped"]["baseline"] == pytest.approx(1.0, abs=1e-12)
        assert matrix["baseline"]["contrarian"] == pytest.approx(-1.0, abs=1e-12)
        for tag in ("baseline", "warped", "contrarian"):
            assert matrix[tag][tag] == pytest.approx(1.0, abs=1e-12)

    def test_gold_disagreement_demotes_consensus(self, panel):
        demoted = [
            row
            for row in panel["report"]["consensus"]
            if row["vote_fraction"] >= 0.8 and row["class"] == "low"
        ]
        assert [row["triplet_id"] for row in demoted] == ["t0024"]
        assert panel["gold"]["t0024"] != demoted[0]["majority_choice"]

    def test_consensus_boundary_at_eighty_percent(self):
        triplets = [
            Triplet("t000", "r1", "a1", "b1", 0.2, 0.8),
            Triplet("t001", "r2", "a2", "b2", 0.2, 0.8),
        ]
        judgements = judgement_set([(4, 1), (3, 2)])  # 0.8 high, 0.6 low
        report = agreement_report(
            triplets, judgements, {"m": lambda a, b: 0.5 if b.startswith("a") else 0.6}
        )
        classes = {row["triplet_id"]: row["class"] for row in report["consensus"]}
        assert classes == {"t000": "high", "t001": "low"}

    def test_missing_judgements_rejected(self, panel):
        votes = judgement_set([(3, 0)])  # ids don't match the panel triplets
        with pytest.raises(DegenerateInput):
            agreement_report(panel["triplets"], votes, {"m": lambda a, b: 0.5})

    def test_written_report_roundtrips(self, tmp_path, panel):
        path = tmp_path / "report.json"
        write_report(panel["report"], path)
        text = path.read_text(encoding="utf-8")
        assert text.endswith("\n")
        assert json.loads(text) == json.loads(json.dumps(panel["report"]))

    def test_console_table_lists_models(self, panel):
        table = format_report_table(panel["report"])
        assert "inter-rater kappa: 0.370" in table
        assert "high=28" in table and "low=12" in table
        for tag in ("baseline", "warped", "contrarian"):
            assert tag in table


class TestSyntheticJudgements:
    def test_perfect_accuracy_reproduces_gold(self, panel):
        triplets = panel["triplets"]
        judgements, gold = synthetic_judgements(
            triplets, n_raters=3, accuracy=1.0, seed=0
        )
        for t in triplets:
            majority, fraction = judgements.majority(t.triplet_id)
            assert majority == gold[t.triplet_id]
            assert fraction == 1.0
            better = "A" if t.score_a >= t.score_b else "B"
            assert gold[t.triplet_id] == better

    def test_deterministic(self, panel):
        first, _ = synthetic_judgements(panel["triplets"], 5, 0.7, seed=12)
        second, _ = synthetic_judgements(panel["triplets"], 5, 0.7, seed=12)
        assert first.choices == second.choices
