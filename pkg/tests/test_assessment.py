from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cloudcost.assessment import (
    Answer,
    AssessmentError,
    NetBenefit,
    QUESTION_IDS,
    StakeholderEntry,
    SuitabilityChecklist,
    Verdict,
    aggregate_stakeholders,
    evaluate_suitability,
    load_assessment,
)


def checklist(**overrides) -> SuitabilityChecklist:
    answers = {q: Answer.YES for q in QUESTION_IDS}
    answers.update({k.replace("__", "."): v for k, v in overrides.items()})
    return SuitabilityChecklist(answers=answers)


def test_all_yes_proceeds():
    result = evaluate_suitability(checklist())
    assert result.verdict == Verdict.PROCEED
    assert result.blocking_items == ()


def test_single_no_blocks():
    result = evaluate_suitability(checklist(**{"elasticity__scale-out": Answer.NO}))
    assert result.verdict == Verdict.DO_NOT_PROCEED
    assert result.blocking_items == ("elasticity.scale-out",)


def test_unknown_downgrades_to_caution():
    result = evaluate_suitability(checklist(security__requirements=Answer.UNKNOWN))
    assert result.verdict == Verdict.PROCEED_WITH_CAUTION
    assert result.blocking_items == ("security.requirements",)


def test_not_applicable_counts_as_pass():
    result = evaluate_suitability(checklist(hardware__access=Answer.NOT_APPLICABLE))
    assert result.verdict == Verdict.PROCEED


def test_no_dominates_unknown():
    result = evaluate_suitability(checklist(
        security__requirements=Answer.UNKNOWN, processing__cpu=Answer.NO))
    assert result.verdict == Verdict.DO_NOT_PROCEED
    assert result.blocking_items == ("processing.cpu",)


def test_missing_answer_names_question():
    answers = {q: Answer.YES for q in QUESTION_IDS}
    del answers["regulatory.compliance"]
    with pytest.raises(AssessmentError, match="regulatory.compliance"):
        evaluate_suitability(SuitabilityChecklist(answers=answers))


def test_unknown_question_rejected():
    answers = {q: Answer.YES for q in QUESTION_IDS}
    answers["made.up"] = Answer.YES
    with pytest.raises(AssessmentError, match="made.up"):
        evaluate_suitability(SuitabilityChecklist(answers=answers))


_ORDER = {Verdict.DO_NOT_PROCEED: 0, Verdict.PROCEED_WITH_CAUTION: 1, Verdict.PROCEED: 2}
_IMPROVE = {Answer.NO: Answer.YES, Answer.UNKNOWN: Answer.YES}


@given(answers=st.fixed_dictionaries(
    {q: st.sampled_from(list(Answer)) for q in QUESTION_IDS}),
    flip=st.sampled_from(QUESTION_IDS))
def test_monotonicity(answers, flip):
    before = evaluate_suitability(SuitabilityChecklist(answers=answers))
    if answers[flip] not in _IMPROVE:
        return
    improved = dict(answers)
    improved[flip] = _IMPROVE[answers[flip]]
    after = evaluate_suitability(SuitabilityChecklist(answers=improved))
    assert _ORDER[after.verdict] >= _ORDER[before.verdict]


# --- stakeholders ------------------------------------------------------------

def entry(name: str, p: int, s: int, pol: int) -> StakeholderEntry:
    return StakeholderEntry(stakeholder=name, practicalities=p, social=s, political=pol)


def test_three_bucket_case_study_shape():
    entries = [
        entry("business development", 1, 1, 1),
        entry("project management", 0, 0, 0),
        entry("technical manager", -1, -1, -1),
    ]
    summary = aggregate_stakeholders(entries)
    assert summary.by_benefit[NetBenefit.POSITIVE] == ["business development"]
    assert summary.by_benefit[NetBenefit.ZERO] == ["project management"]
    assert summary.by_benefit[NetBenefit.NEGATIVE] == ["technical manager"]
    assert summary.counts == {NetBenefit.POSITIVE: 1, NetBenefit.ZERO: 1,
                              NetBenefit.NEGATIVE: 1}


def test_all_zero_entry_lands_in_zero_bucket():
    summary = aggregate_stakeholders([entry("ops", 0, 0, 0)])
    assert summary.by_benefit[NetBenefit.ZERO] == ["ops"]


def test_two_strongly_positive():
    summary = aggregate_stakeholders([entry("a", 2, 2, 2), entry("b", 2, 2, 2)])
    assert summary.counts[NetBenefit.POSITIVE] == 2


def test_mixed_signs_sum_to_sign():
    assert entry("x", 2, -1, 0).net_benefit == NetBenefit.POSITIVE
    assert entry("x", 1, -1, 0).net_benefit == NetBenefit.ZERO
    assert entry("x", -2, 1, 0).net_benefit == NetBenefit.NEGATIVE


def test_rating_bounds_enforced():
    with pytest.raises(AssessmentError):
        StakeholderEntry(stakeholder="x", practicalities=3)


def test_empty_ledger_rejected():
    with pytest.raises(AssessmentError):
        aggregate_stakeholders([])


@given(entries=st.lists(
    st.builds(entry, st.text(min_size=1, max_size=8),
              st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2)),
    min_size=1, max_size=10))
def test_buckets_partition_entries(entries):
    summary = aggregate_stakeholders(entries)
    total = sum(summary.counts.values())
    assert total == len(entries)
    names = [n for bucket in summary.by_benefit.values() for n in bucket]
    assert sorted(names) == sorted(e.stakeholder for e in entries)


def test_load_school_assessment(fixtures_dir):
    checklist_, stakeholders = load_assessment(str(fixtures_dir / "school.assessment.json"))
    result = evaluate_suitability(checklist_)
    assert result.verdict == Verdict.PROCEED
    summary = aggregate_stakeholders(stakeholders)
    assert summary.counts[NetBenefit.POSITIVE] == 2
    assert summary.counts[NetBenefit.ZERO] == 2
    assert summary.counts[NetBenefit.NEGATIVE] == 2
