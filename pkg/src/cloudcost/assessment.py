"""Technology suitability checklist and stakeholder impact ledger.

The checklist covers eight infrastructure characteristics, each broken into
answerable sub-questions. Any "no" blocks (the questions are necessary
conditions); any "unknown" downgrades the verdict to proceed-with-caution.
Stakeholder entries rate practical, social and political impact on a
-2..+2 scale and bucket by the sign of the sum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

__all__ = [
    "Answer",
    "Verdict",
    "NetBenefit",
    "QUESTIONS",
    "SuitabilityChecklist",
    "StakeholderEntry",
    "StakeholderSummary",
    "Recommendation",
    "AssessmentError",
    "evaluate_suitability",
    "aggregate_stakeholders",
    "load_assessment",
    "assessment_from_obj",
]


class AssessmentError(ValueError):
    pass


class Answer(str, Enum):
    YES = "yes"
    NO = "no"
    NOT_APPLICABLE = "not-applicable"
    UNKNOWN = "unknown"


class Verdict(str, Enum):
    PROCEED = "proceed"
    PROCEED_WITH_CAUTION = "proceed-with-caution"
    DO_NOT_PROCEED = "do-not-proceed"


class NetBenefit(str, Enum):
    NEGATIVE = "negative"
    ZERO = "zero"
    POSITIVE = "positive"


# Fixed question set: eight characteristics, each with its sub-questions.
QUESTIONS: tuple[tuple[str, str], ...] = (
    ("elasticity.scale-out",
     "Does the software architecture support scaling out?"),
    ("elasticity.scale-up",
     "If not, will scaling up to a bigger server suffice?"),
    ("communications.bandwidth",
     "Is the bandwidth within the cloud and to other systems sufficient?"),
    ("communications.latency",
     "Is the latency of data transfer to the cloud acceptable?"),
    ("processing.cpu",
     "Is the CPU power of instances appropriate at the expected load?"),
    ("processing.memory",
     "Do instances have enough memory for the application?"),
    ("hardware.access",
     "Does the provider give the required access to hardware or bespoke hardware?"),
    ("availability.sla",
     "Does the provider offer an appropriate SLA?"),
    ("availability.geographic-mix",
     "Can appropriate availability be created by mixing locations or providers?"),
    ("security.requirements",
     "Does the provider meet the security requirements?"),
    ("confidentiality.guarantees",
     "Does the provider give sufficient data confidentiality and privacy guarantees?"),
    ("regulatory.compliance",
     "Does the provider comply with the organisation's regulatory requirements?"),
)

QUESTION_IDS: tuple[str, ...] = tuple(q for q, _ in QUESTIONS)


@dataclass(frozen=True)
class SuitabilityChecklist:
    answers: Mapping[str, Answer]


@dataclass(frozen=True)
class StakeholderEntry:
    stakeholder: str
    changes: str = ""
    practicalities: int = 0  # time / resources / capabilities
    social: int = 0          # interests / values / status / satisfaction
    political: int = 0       # perceived fairness

    def __post_init__(self) -> None:
        for name in ("practicalities", "social", "political"):
            rating = getattr(self, name)
            if not -2 <= rating <= 2:
                raise AssessmentError(
                    f"{self.stakeholder}: {name} rating {rating} outside -2..+2")

    @property
    def net_benefit(self) -> NetBenefit:
        total = self.practicalities + self.social + self.political
        if total > 0:
            return NetBenefit.POSITIVE
        if total < 0:
            return NetBenefit.NEGATIVE
        return NetBenefit.ZERO


@dataclass(frozen=True)
class StakeholderSummary:
    by_benefit: dict  # NetBenefit -> list of stakeholder labels
    counts: dict      # NetBenefit -> int


@dataclass(frozen=True)
class Recommendation:
    verdict: Verdict
    blocking_items: tuple[str, ...]
    narrative: str

    def __post_init__(self) -> None:
        if self.verdict == Verdict.DO_NOT_PROCEED and not self.blocking_items:
            raise AssessmentError("do-not-proceed requires blocking items")


def evaluate_suitability(checklist: SuitabilityChecklist) -> Recommendation:
    """Reduce the checklist to a go / caution / no-go recommendation."""
    answers = checklist.answers
    unknown_ids = set(answers) - set(QUESTION_IDS)
    if unknown_ids:
        raise AssessmentError(f"unknown question id {sorted(unknown_ids)[0]!r}")
    for qid in QUESTION_IDS:
        if qid not in answers:
            raise AssessmentError(f"missing answer for question {qid!r}")

    nos = tuple(q for q in QUESTION_IDS if answers[q] == Answer.NO)
    unknowns = tuple(q for q in QUESTION_IDS if answers[q] == Answer.UNKNOWN)
    if nos:
        return Recommendation(
            verdict=Verdict.DO_NOT_PROCEED,
            blocking_items=nos,
            narrative="blocked by: " + ", ".join(nos))
    if unknowns:
        return Recommendation(
            verdict=Verdict.PROCEED_WITH_CAUTION,
            blocking_items=unknowns,
            narrative="resolve before committing: " + ", ".join(unknowns))
    return Recommendation(verdict=Verdict.PROCEED, blocking_items=(),
                          narrative="all characteristics satisfied")


def aggregate_stakeholders(entries: Sequence[StakeholderEntry]) -> StakeholderSummary:
    """Partition the ledger by perceived net benefit."""
    if not entries:
        raise AssessmentError("stakeholder ledger is empty")
    by_benefit: dict[NetBenefit, list[str]] = {b: [] for b in NetBenefit}
    for entry in entries:
        by_benefit[entry.net_benefit].append(entry.stakeholder)
    counts = {b: len(names) for b, names in by_benefit.items()}
    return StakeholderSummary(by_benefit=by_benefit, counts=counts)


def load_assessment(path: str) -> tuple[SuitabilityChecklist, list[StakeholderEntry]]:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    return assessment_from_obj(doc)


def assessment_from_obj(doc) -> tuple[SuitabilityChecklist, list[StakeholderEntry]]:
    if not isinstance(doc, dict):
        raise AssessmentError("assessment document must be a JSON object")
    if doc.get("schema") != 1:
        raise AssessmentError('assessment must declare "schema": 1')
    raw = doc.get("checklist", {})
    if not isinstance(raw, dict):
        raise AssessmentError("checklist must map question ids to answers")
    answers = {}
    for qid, text in raw.items():
        try:
            answers[qid] = Answer(text)
        except ValueError:
            raise AssessmentError(f"bad answer {text!r} for question {qid!r}") from None
    entries = []
    for obj in doc.get("stakeholders", []):
        entries.append(StakeholderEntry(
            stakeholder=str(obj.get("stakeholder", "")),
            changes=str(obj.get("changes", "")),
            practicalities=int(obj.get("practicalities", 0)),
            social=int(obj.get("social", 0)),
            political=int(obj.get("political", 0)),
        ))
    return SuitabilityChecklist(answers=answers), entries
