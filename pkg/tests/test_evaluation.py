import json
import math
import random

import pytest
from conftest import FIXTURES
from oracles import brute_force_stats

from scholarqa.curation import Question
from scholarqa.errors import DatasetFormatError, DimensionMismatchError, EmptyInputError
from scholarqa.evaluation import (
    aggregate,
    cosine,
    format_stats_table,
    load_dataset,
    run_eval,
    sts_score,
)
from scholarqa.providers import MockProvider

SAMPLE_DATASET = FIXTURES / "sample_eval.jsonl"


class TestCosine:
    def test_identity_is_one(self):
        embedder = MockProvider()
        assert sts_score("same words", "same words", embedder) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_is_zero(self):
        embedder = MockProvider()
        assert sts_score("a", "b", embedder) == pytest.approx(0.0, abs=1e-9)

    def test_hand_case_unit_vs_diagonal(self):
        # (1,0) . (1,1) / (1 * sqrt(2)) = 0.70711
        assert cosine((1.0, 0.0), (1.0, 1.0)) == pytest.approx(0.70711, abs=1e-5)

    def test_zero_norm_scores_zero(self):
        assert cosine((0.0, 0.0), (1.0, 2.0)) == 0.0

    def test_length_mismatch_raises(self):
        with pytest.raises(DimensionMismatchError):
            cosine((1.0,), (1.0, 2.0))

    def test_symmetry_and_scale_invariance(self):
        rng = random.Random(5)
        for _ in range(200):
            u = [rng.uniform(-1, 1) for _ in range(8)]
            v = [rng.uniform(-1, 1) for _ in range(8)]
            c = rng.uniform(0.1, 50.0)
            assert cosine(u, v) == pytest.approx(cosine(v, u), abs=1e-9)
            assert cosine([c * x for x in u], v) == pytest.approx(cosine(u, v), abs=1e-9)


class TestAggregate:
    def test_hand_case_three_scores(self):
        stats = aggregate([0.2, 0.4, 0.9])
        assert stats.maximum == pytest.approx(0.9, abs=1e-9)
        assert stats.minimum == pytest.approx(0.2, abs=1e-9)
        assert stats.average == pytest.approx(0.5, abs=1e-9)
        assert stats.median == pytest.approx(0.4, abs=1e-9)
        assert stats.std_dev == pytest.approx(0.29439, abs=1e-5)

    def test_singleton(self):
        stats = aggregate([0.7])
        assert (stats.maximum, stats.minimum, stats.average, stats.median) == \
            (0.7, 0.7, 0.7, 0.7)
        assert stats.std_dev == 0.0
        assert stats.n == 1

    def test_hand_case_two_scores(self):
        stats = aggregate([0.9147, 0.0341])
        assert stats.maximum == 0.9147
        assert stats.minimum == 0.0341
        assert stats.average == pytest.approx(0.4744, abs=1e-4)
        assert stats.median == pytest.approx(0.4744, abs=1e-4)
        assert stats.std_dev == pytest.approx(0.4403, abs=1e-4)

    def test_sample_divisor_flag(self):
        scores = [0.2, 0.4, 0.9]
        population = aggregate(scores).std_dev
        sample = aggregate(scores, sample_std=True).std_dev
        assert sample > population
        assert sample == pytest.approx(population * math.sqrt(3 / 2), abs=1e-12)

    def test_empty_raises(self):
        with pytest.raises(EmptyInputError):
            aggregate([])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            aggregate([0.1, float("inf")])

    def test_matches_brute_force_oracle_on_random_lists(self):
        rng = random.Random(11)
        for _ in range(300):
            scores = [rng.uniform(-1, 1) for _ in range(rng.randint(1, 40))]
            stats = aggregate(scores)
            oracle = brute_force_stats(scores)
            for name in ("maximum", "minimum", "average", "median", "std_dev"):
                assert getattr(stats, name) == pytest.approx(oracle[name], abs=1e-9)
            assert stats.minimum <= stats.median <= stats.maximum
            assert stats.minimum <= stats.average <= stats.maximum
            assert stats.std_dev >= 0


class TestDataset:
    def test_sample_fixture_loads(self):
        records = load_dataset(SAMPLE_DATASET)
        assert len(records) == 10
        assert all(r.generated_answer for r in records)

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"question": "q", "top_answer": "a"}\nnot json\n')
        with pytest.raises(DatasetFormatError) as excinfo:
            load_dataset(path)
        assert excinfo.value.line_number == 2
        assert "line 2" in str(excinfo.value)

    def test_missing_field_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"question": "only a question"}\n')
        with pytest.raises(DatasetFormatError) as excinfo:
            load_dataset(path)
        assert excinfo.value.line_number == 1

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "ok.jsonl"
        path.write_text('\n{"question": "q", "top_answer": "a"}\n\n')
        assert len(load_dataset(path)) == 1


class TestRunEval:
    def test_echo_pipeline_scores_one(self, tmp_path):
        dataset = tmp_path / "echo.jsonl"
        rows = [{"question": f"q{i} alpha", "top_answer": f"answer body {i}"}
                for i in range(3)]
        dataset.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        answers = {f"q{i} alpha": f"answer body {i}" for i in range(3)}
        report = run_eval(dataset, embedder=MockProvider(),
                          pipeline=lambda q: answers[q.text])
        assert report.stats.n == 3
        assert report.stats.average == pytest.approx(1.0, abs=1e-9)

    def test_replay_is_deterministic(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            run_eval(SAMPLE_DATASET, embedder=MockProvider(), replay=True,
                     out_dir=out)
        assert (out_a / "summary.json").read_bytes() == \
            (out_b / "summary.json").read_bytes()
        assert (out_a / "records.jsonl").read_bytes() == \
            (out_b / "records.jsonl").read_bytes()

    def test_pipeline_failures_excluded_and_listed(self, tmp_path):
        dataset = tmp_path / "mix.jsonl"
        dataset.write_text("\n".join([
            json.dumps({"question": "works fine", "top_answer": "works fine"}),
            json.dumps({"question": "explodes", "top_answer": "whatever"}),
        ]) + "\n")

        def pipeline(question: Question) -> str:
            if question.text == "explodes":
                raise RuntimeError("stage blew up")
            return question.text

        report = run_eval(dataset, embedder=MockProvider(), pipeline=pipeline)
        assert report.stats.n == 1
        excluded = [r for r in report.rows if r.get("excluded")]
        assert len(excluded) == 1
        assert "stage blew up" in excluded[0]["reason"]

    def test_zero_norm_embedding_flagged(self, tmp_path):
        dataset = tmp_path / "zero.jsonl"
        dataset.write_text(json.dumps({
            "question": "only digits",
            "top_answer": "123 456",  # no letters: zero histogram
            "generated_answer": "real words",
        }) + "\n")
        report = run_eval(dataset, embedder=MockProvider(), replay=True)
        assert report.rows[0]["score"] == 0.0
        assert "zero_norm_embedding" in report.rows[0]["flags"]

    def test_replay_missing_generated_answer_excluded(self, tmp_path):
        dataset = tmp_path / "missing.jsonl"
        dataset.write_text("\n".join([
            json.dumps({"question": "q1", "top_answer": "a1",
                        "generated_answer": "a1"}),
            json.dumps({"question": "q2", "top_answer": "a2"}),
        ]) + "\n")
        report = run_eval(dataset, embedder=MockProvider(), replay=True)
        assert report.stats.n == 1
        assert any(r.get("reason") == "missing generated_answer" for r in report.rows)

    def test_summary_table_column_order(self, tmp_path):
        report = run_eval(SAMPLE_DATASET, embedder=MockProvider(), replay=True)
        table = report.table()
        header = table.splitlines()[0]
        assert header.index("Maximum") < header.index("Minimum") \
            < header.index("Average") < header.index("Median") \
            < header.index("Std Dev")
        assert format_stats_table(report.summary["backends"]) == table

    def test_live_mode_requires_pipeline(self):
        with pytest.raises(ValueError):
            run_eval(SAMPLE_DATASET, embedder=MockProvider())
