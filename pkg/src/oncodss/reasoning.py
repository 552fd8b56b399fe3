"""Medical reasoning: sign-driven diagnosis rules, therapy rule tables,
prognosis aggregation over retrieved precedents, and the consult-workflow
supervisor automaton with capability-based model bidding.

Rule tables live in data files (fixtures/gastric-rules.json and
fixtures/breast-stages.json) so rule edits need no code change; golden
tests pin their content.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from statistics import median_low
from typing import Iterable, Mapping, Optional, Sequence

from .casebase import CaseBase, Outcome
from .similarity import RankedCase


class ReasoningError(Exception):
    pass


class EmptyRuleSet(ReasoningError):
    pass


class UnknownDiagnosisCode(ReasoningError):
    pass


class UnknownStage(ReasoningError):
    pass


class InvalidRule(ReasoningError):
    pass


POSITIVE_CODE = "D0"
ETIOLOGY_CODES = ("D1", "D2", "D3", "D4", "D5", "D6")
BREAST_STAGES = ("0", "I", "earlyII", "II", "III", "IV")

MODALITIES = ("surgery", "radiotherapy", "chemotherapy", "endocrine")


@dataclass(frozen=True)
class DiagnosisRule:
    code: str
    label: str
    required_signs: frozenset[str]
    excluded_signs: frozenset[str] = frozenset()

    def matches(self, signs: frozenset[str]) -> bool:
        return self.required_signs <= signs and not (self.excluded_signs & signs)


@dataclass(frozen=True)
class TherapyRule:
    """One therapy row: a diagnosis code (or stage label) mapped to ordered
    therapy codes and the narrative clinicians see.

    Breast-stage rows additionally carry modality flags; there the therapy
    codes are the mandatory modalities in narrative order.
    """

    diagnosis_code: str
    therapy_codes: tuple[str, ...]
    narrative: str
    modalities: Mapping[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "diagnosis_code": self.diagnosis_code,
            "therapy_codes": list(self.therapy_codes),
            "narrative": self.narrative,
            "modalities": dict(self.modalities),
        }


def validate_rules(rules: Sequence[DiagnosisRule]) -> None:
    seen: set[str] = set()
    for rule in rules:
        if rule.code in seen:
            raise InvalidRule(f"duplicate diagnosis code {rule.code}")
        seen.add(rule.code)
        if rule.required_signs & rule.excluded_signs:
            raise InvalidRule(f"{rule.code}: required and excluded signs overlap")


def diagnose(signs: Iterable[str], rules: Sequence[DiagnosisRule]) -> list[tuple[str, str]]:
    """Codes whose required signs are all present and excluded signs absent,
    ordered D1..D6, with D0 prepended whenever any etiological code fires."""
    if not rules:
        raise EmptyRuleSet("no diagnosis rules loaded")
    validate_rules(rules)
    sign_set = frozenset(signs)
    by_code = {r.code: r for r in rules}
    hits = [
        (r.code, r.label)
        for r in sorted(rules, key=lambda r: r.code)
        if r.code != POSITIVE_CODE and r.matches(sign_set)
    ]
    if hits and POSITIVE_CODE in by_code:
        hits.insert(0, (POSITIVE_CODE, by_code[POSITIVE_CODE].label))
    return hits


def plan_treatment(code: str, table: Mapping[str, TherapyRule]) -> TherapyRule:
    """Therapy row for an etiological diagnosis code (D1..D6)."""
    rule = table.get(code)
    if rule is None:
        raise UnknownDiagnosisCode(code)
    return rule


def plan_breast_stage(stage: str, table: Mapping[str, TherapyRule]) -> TherapyRule:
    rule = table.get(stage)
    if rule is None:
        raise UnknownStage(stage)
    return rule


@dataclass(frozen=True)
class GastricRuleBook:
    """Parsed gastric rule file: the sign alphabet, the diagnosis rules and
    the diagnosis-code -> therapy table."""

    signs: tuple[str, ...]
    diagnosis_rules: tuple[DiagnosisRule, ...]
    therapy_table: Mapping[str, TherapyRule]


def load_gastric_rules(path) -> GastricRuleBook:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    rules = tuple(
        DiagnosisRule(
            code=d["code"],
            label=d["label"],
            required_signs=frozenset(d.get("required_signs", ())),
            excluded_signs=frozenset(d.get("excluded_signs", ())),
        )
        for d in data["diagnoses"]
    )
    validate_rules(rules)
    table: dict[str, TherapyRule] = {}
    for row in data["therapies"]:
        codes = tuple(row["therapy_codes"])
        if not codes:
            raise InvalidRule(f"{row['diagnosis_code']}: therapy_codes must be non-empty")
        table[row["diagnosis_code"]] = TherapyRule(
            diagnosis_code=row["diagnosis_code"],
            therapy_codes=codes,
            narrative=row["narrative"],
        )
    return GastricRuleBook(
        signs=tuple(data.get("signs", ())),
        diagnosis_rules=rules,
        therapy_table=table,
    )


def derive_signs(keywords: Iterable[str], alphabet: Iterable[str]) -> frozenset[str]:
    """Map normalized keywords onto the sign alphabet (spaces -> underscores)."""
    allowed = frozenset(alphabet)
    return frozenset(kw.replace(" ", "_") for kw in keywords) & allowed


def load_breast_stages(path) -> dict[str, TherapyRule]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    table: dict[str, TherapyRule] = {}
    for row in data["stages"]:
        modalities = dict(row["modalities"])
        for modality, flag in modalities.items():
            if modality not in MODALITIES or flag not in ("mandatory", "conditional"):
                raise InvalidRule(f"stage {row['stage']}: bad modality entry {modality}={flag}")
        mandatory = tuple(m for m, flag in modalities.items() if flag == "mandatory")
        if not mandatory:
            raise InvalidRule(f"stage {row['stage']}: at least one mandatory modality required")
        table[row["stage"]] = TherapyRule(
            diagnosis_code=row["stage"],
            therapy_codes=mandatory,
            narrative=row["narrative"],
            modalities=modalities,
        )
    return table


@dataclass(frozen=True)
class Prognosis:
    """Outcome aggregation over retrieved precedent cases."""

    n_cases: int
    outcome_counts: Mapping[str, int]
    median_survival_months: Optional[int] = None
    survival_range_months: Optional[tuple[int, int]] = None

    def to_dict(self) -> dict:
        return {
            "n_cases": self.n_cases,
            "outcome_counts": dict(self.outcome_counts),
            "median_survival_months": self.median_survival_months,
            "survival_range_months": (
                list(self.survival_range_months) if self.survival_range_months else None
            ),
        }


def prognose(similar: Sequence[RankedCase], casebase: CaseBase) -> Prognosis:
    """Histogram of outcomes plus median (lower on even counts) and range of
    survival months over the cases that report one."""
    counts: dict[str, int] = {o.value: 0 for o in Outcome}
    survivals: list[int] = []
    for ranked in similar:
        case = casebase.get(ranked.case_id)
        counts[case.result.outcome.value] += 1
        if case.result.survival_months is not None:
            survivals.append(case.result.survival_months)
    counts = {k: v for k, v in counts.items() if v}
    return Prognosis(
        n_cases=len(similar),
        outcome_counts=counts,
        median_survival_months=median_low(survivals) if survivals else None,
        survival_range_months=(min(survivals), max(survivals)) if survivals else None,
    )


# -- supervisor automaton -------------------------------------------------


class State(str, Enum):
    IDLE = "Idle"
    INTERPRETING = "Interpreting"
    DIAGNOSING = "Diagnosing"
    PROGNOSING = "Prognosing"
    PLANNING = "Planning"
    RETRIEVING = "Retrieving"
    ANSWERING = "Answering"
    FAILED = "Failed"


class Event(str, Enum):
    QUERY_RECEIVED = "QueryReceived"
    INTERPRETED = "Interpreted"
    DIAGNOSED = "Diagnosed"
    PROGNOSED = "Prognosed"
    PLANNED = "Planned"
    RETRIEVED = "Retrieved"
    ERROR = "Error"
    RESET = "Reset"


TRANSITIONS: dict[tuple[State, Event], State] = {
    (State.IDLE, Event.QUERY_RECEIVED): State.INTERPRETING,
    (State.INTERPRETING, Event.INTERPRETED): State.DIAGNOSING,
    (State.DIAGNOSING, Event.DIAGNOSED): State.PROGNOSING,
    (State.PROGNOSING, Event.PROGNOSED): State.PLANNING,
    (State.PLANNING, Event.PLANNED): State.RETRIEVING,
    (State.RETRIEVING, Event.RETRIEVED): State.ANSWERING,
    (State.ANSWERING, Event.RESET): State.IDLE,
}


class InvalidTransition(ReasoningError):
    def __init__(self, state: State, event: Event):
        self.state = state
        self.event = event
        super().__init__(f"no transition from {state.value} on {event.value}")


@dataclass(frozen=True)
class SupervisorState:
    """Immutable workflow state: stepping yields a new value.

    The trace records (state, event-that-entered-it) pairs starting from
    (Idle, None).  Failed is absorbing: Error keeps it Failed and every
    other event is rejected without a state change.
    """

    state: State = State.IDLE
    active_models: frozenset[str] = frozenset()
    trace: tuple[tuple[State, Optional[Event]], ...] = ((State.IDLE, None),)

    def trace_as_dicts(self) -> list[dict]:
        return [
            {"state": s.value, "event": e.value if e else None} for s, e in self.trace
        ]


def initial_supervisor() -> SupervisorState:
    return SupervisorState()


def supervisor_step(s: SupervisorState, event: Event) -> SupervisorState:
    if event is Event.ERROR:
        nxt = State.FAILED
    else:
        nxt = TRANSITIONS.get((s.state, event))
        if nxt is None:
            raise InvalidTransition(s.state, event)
    # Reset amends the situation: running models give up their tasks.
    models = frozenset() if event is Event.RESET else s.active_models
    return SupervisorState(state=nxt, active_models=models, trace=s.trace + ((nxt, event),))


def activate_models(s: SupervisorState, models: frozenset[str]) -> SupervisorState:
    return SupervisorState(state=s.state, active_models=s.active_models | models, trace=s.trace)


def model_bid(model_capabilities: Mapping[str, Iterable[str]], task: Iterable[str]) -> frozenset[str]:
    """Models whose declared capabilities intersect the task's tags."""
    task_tags = frozenset(task)
    return frozenset(
        name for name, tags in model_capabilities.items() if frozenset(tags) & task_tags
    )
