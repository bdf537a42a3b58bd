import math
import warnings

import pytest
from scipy.stats import kendalltau
from sklearn.metrics import cohen_kappa_score, f1_score

from oracles import bf_kappa, bf_micro_f1, bf_rouge, bf_tau
from rwkit.metrics import (
    cohens_kappa,
    kendalls_tau,
    mean,
    micro_f1,
    rouge_scores,
    rouge_tokens,
)

TAG_ALPHABET = ("B-Dominant", "I-Dominant", "B-Reference", "I-Reference", "O")


class TestMicroF1:
    def test_worked_example_with_ignore(self):
        got = micro_f1(["B", "I", "O", "O"], ["B", "O", "O", "O"], frozenset({"O"}))
        assert got == pytest.approx(2 / 3)

    def test_worked_example_without_ignore(self):
        got = micro_f1(["B", "I", "O", "O"], ["B", "O", "O", "O"])
        assert got == pytest.approx(6 / 8)

    def test_predicting_over_ignored_gold_costs_precision(self):
        assert micro_f1(["O"], ["B"], frozenset({"O"})) == 0.0

    def test_perfect_and_empty(self):
        assert micro_f1(["B", "I"], ["B", "I"]) == 1.0
        assert micro_f1(["O"], ["O"], frozenset({"O"})) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            micro_f1(["B"], ["B", "I"])

    def test_matches_bruteforce_on_random_instances(self, rng):
        for _ in range(200):
            n = rng.randint(1, 15)
            gold = [rng.choice(TAG_ALPHABET) for _ in range(n)]
            pred = [rng.choice(TAG_ALPHABET) for _ in range(n)]
            ignore = frozenset({"O"}) if rng.random() < 0.7 else frozenset()
            assert micro_f1(gold, pred, ignore) == pytest.approx(
                bf_micro_f1(gold, pred, ignore), abs=1e-12
            )

    def test_matches_sklearn_micro_average(self, rng):
        real = [t for t in TAG_ALPHABET if t != "O"]
        for _ in range(100):
            n = rng.randint(1, 15)
            gold = [rng.choice(TAG_ALPHABET) for _ in range(n)]
            pred = [rng.choice(TAG_ALPHABET) for _ in range(n)]
            ours = micro_f1(gold, pred, frozenset({"O"}))
            theirs = f1_score(
                gold, pred, labels=real, average="micro", zero_division=0.0
            )
            assert ours == pytest.approx(theirs, abs=1e-9)


class TestCohensKappa:
    def test_worked_example(self):
        a = list("xxxxxyyyyy")
        b = list("xxxxyyyyyx")
        assert cohens_kappa(a, b) == pytest.approx(0.6)

    def test_perfect_agreement_constant(self):
        assert cohens_kappa(["x", "x"], ["x", "x"]) == 1.0

    def test_no_better_than_chance(self):
        assert cohens_kappa(["x", "y"], ["y", "x"]) == pytest.approx(-1.0)

    def test_errors(self):
        with pytest.raises(ValueError):
            cohens_kappa([], [])
        with pytest.raises(ValueError):
            cohens_kappa(["x"], ["x", "y"])

    def test_matches_bruteforce_on_random_instances(self, rng):
        for _ in range(200):
            n = rng.randint(1, 15)
            a = [rng.choice("xyz") for _ in range(n)]
            b = [rng.choice("xyz") for _ in range(n)]
            assert cohens_kappa(a, b) == pytest.approx(bf_kappa(a, b), abs=1e-12)

    def test_matches_sklearn(self, rng):
        for _ in range(100):
            n = rng.randint(2, 15)
            a = [rng.choice("xyz") for _ in range(n)]
            b = [rng.choice("xyz") for _ in range(n)]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                theirs = cohen_kappa_score(a, b)
            if math.isnan(theirs):
                continue  # sklearn leaves degenerate marginals undefined
            assert cohens_kappa(a, b) == pytest.approx(theirs, abs=1e-9)


class TestKendallsTau:
    def test_worked_example(self):
        assert kendalls_tau([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(4 / 6)

    def test_reversal(self):
        assert kendalls_tau([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_ties(self):
        assert kendalls_tau([1, 1, 2], [1, 2, 3]) == pytest.approx(2 / math.sqrt(6))

    def test_degenerate_inputs(self):
        assert kendalls_tau([], []) == 0.0
        assert kendalls_tau([1], [1]) == 0.0
        assert kendalls_tau([1, 1, 1], [1, 2, 3]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            kendalls_tau([1], [1, 2])

    def test_matches_bruteforce_on_random_instances(self, rng):
        for _ in range(200):
            n = rng.randint(0, 12)
            a = [rng.randint(0, 5) for _ in range(n)]
            b = [rng.randint(0, 5) for _ in range(n)]
            assert kendalls_tau(a, b) == pytest.approx(bf_tau(a, b), abs=1e-12)

    def test_matches_scipy_tau_b(self, rng):
        for _ in range(100):
            n = rng.randint(2, 12)
            a = [rng.randint(0, 5) for _ in range(n)]
            b = [rng.randint(0, 5) for _ in range(n)]
            theirs = kendalltau(a, b).statistic
            if math.isnan(theirs):
                continue
            assert kendalls_tau(a, b) == pytest.approx(theirs, abs=1e-9)


class TestRouge:
    def test_worked_example(self):
        score = rouge_scores("a b x", "a b c d")
        assert score.r1 == pytest.approx(2 / 4)
        assert score.r2 == pytest.approx(1 / 3)
        assert score.rl == pytest.approx(2 / 4)

    def test_identical_text(self):
        score = rouge_scores("a b c", "a b c")
        assert (score.r1, score.r2, score.rl) == (1.0, 1.0, 1.0)
        assert score.r12_avg == 1.0

    def test_case_and_punctuation_insensitive(self):
        assert rouge_tokens("A, b!") == ["a", "b"]
        assert rouge_scores("A, b!", "a b").r1 == 1.0

    def test_empty_reference_scores_zero(self):
        score = rouge_scores("a b", "")
        assert (score.r1, score.r2, score.rl) == (0.0, 0.0, 0.0)

    def test_empty_candidate_scores_zero(self):
        score = rouge_scores("", "a b")
        assert (score.r1, score.r2, score.rl) == (0.0, 0.0, 0.0)

    def test_clipped_counts(self):
        # Candidate repeats a word; recall must clip at the reference count.
        assert rouge_scores("a a a", "a b").r1 == pytest.approx(1 / 2)

    def test_to_dict(self):
        assert rouge_scores("a", "a").to_dict() == {"r1": 1.0, "r2": 0.0, "rl": 1.0}

    def test_matches_bruteforce_on_random_instances(self, rng):
        vocab = ["alpha", "beta", "gamma", "delta", "eps"]
        for _ in range(200):
            cand = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 10)))
            ref = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 10)))
            ours = rouge_scores(cand, ref)
            want = bf_rouge(cand, ref)
            assert ours.r1 == pytest.approx(want["r1"], abs=1e-12)
            assert ours.r2 == pytest.approx(want["r2"], abs=1e-12)
            assert ours.rl == pytest.approx(want["rl"], abs=1e-12)


class TestMean:
    def test_mean(self):
        assert mean([1.0, 2.0, 3.0]) == 2.0

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            mean([])
