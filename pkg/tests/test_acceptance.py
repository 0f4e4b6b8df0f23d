"""One test per acceptance criterion; each prints a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines inline; they
are also collected in the terminal summary.
"""

import json

import pytest

from amverify import acceptance

RESULTS = {}


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda c: c.key)
def test_criterion(criterion, record_property):
    [result] = [r for r in acceptance.run_all(full=True, only=[criterion.key])]
    RESULTS[criterion.key] = result
    line = f"{'PASS' if result.passed else 'FAIL'}  {criterion.key}  ({result.seconds:.2f}s)  {criterion.claim}"
    print(line)
    record_property("acceptance", line)
    assert result.passed, json.dumps(result.detail, indent=2, default=str)


def test_sign_lemma_with_eight_shards(record_property):
    ok, detail = acceptance.check_sign_lemma(full=True, shards=8)
    naive = detail["naive"]
    line = f"{'PASS' if ok else 'FAIL'}  sign-lemma, 8 shards  ({naive['seconds']:.2f}s, budget {naive['budget_s']}s)"
    print(line)
    record_property("acceptance", line)
    assert ok, json.dumps(detail, indent=2)
