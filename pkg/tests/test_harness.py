import csv

import pytest

from aterm import EvalBudget
from aterm.harness import BENCH_COLUMNS, run_bench, run_verify, write_bench_csv


def _consistent(report):
    assert report.passed + len(report.mismatches) == report.cases
    assert report.ok is (not report.mismatches)


def test_gcd_suite_counts_pairs():
    report = run_verify("gcd", 1, 10)
    _consistent(report)
    assert report.cases == 100 and report.ok
    assert report.params["methods"] == ["poly_base", "modmod"]


def test_gcd_suite_with_all_methods():
    report = run_verify("gcd", 1, 5, methods=["mazzanti", "poly-base", "modmod", "euclid"])
    assert report.cases == 25 and report.ok


def test_isqrt_suite_excludes_n_two():
    report = run_verify("isqrt", 1, 50)
    _consistent(report)
    assert [o.inputs["n"] for o in report.excluded] == [2]
    assert report.excluded[0].actual == {"term": 0} and report.excluded[0].expected == 1
    assert report.ok and report.cases == 50 - 7 - 1  # squares 1..49 and n=2 removed


def test_base2_suite_reports_mismatches():
    report = run_verify("base2-evenness", 1, 3)
    _consistent(report)
    assert not report.ok
    first = report.mismatches[0]
    assert first.inputs == {"a": 2, "b": 1}
    assert first.as_dict()["method"] == ["base2-parity"]


def test_budget_cases_are_reported_not_counted():
    report = run_verify("factorial", 2, 7)
    _consistent(report)
    assert report.cases == 5 and report.ok
    assert [o.inputs["w"] for o in report.budget_exceeded] == [7]


def test_strict_raises_on_budget():
    from aterm import BudgetExceeded
    with pytest.raises(BudgetExceeded):
        run_verify("factorial", 7, 7, strict=True)


def test_factor_suite_small():
    seen = []
    report = run_verify("factor", 6, 40, on_outcome=seen.append)
    _consistent(report)
    assert report.ok and report.cases == len(seen) == 12
    assert seen[0].expected == [2, 3, 2]
    assert [o.inputs["n"] for o in seen] == sorted(o.inputs["n"] for o in seen)


def test_matiyasevich_suite():
    assert run_verify("matiyasevich").cases == 19


def test_summary_shape():
    s = run_verify("gcd", 1, 2).summary()
    assert s["type"] == "report" and s["cases"] == 4 and s["mismatches"] == []


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_verify("nope")
    with pytest.raises(ValueError):
        run_bench("gcd")


def test_bench_gcd_methods(tmp_path):
    skipped = []
    records = run_bench("gcd-methods", 1, 4, on_skip=skipped.append)
    assert len(records) == 3 * 16 and not skipped
    assert all(r.ok for r in records)
    path = tmp_path / "bench.csv"
    write_bench_csv(records, path)
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == BENCH_COLUMNS
    assert rows[1][-1] == "true" and rows[1][4] == ""


def test_bench_skips_over_budget():
    skipped = []
    records = run_bench("gcd-methods", 12, 12, methods=["mazzanti"], budget=EvalBudget(1 << 12), on_skip=skipped.append)
    assert records == [] and len(skipped) == 1


def test_bench_factor_modes():
    records = run_bench("factor-modes", 6, 30, methods=["hybrid", "oracle", "pure"])
    assert {r.method for r in records} == {"hybrid", "oracle", "pure"}
    assert all(r.ok for r in records)
