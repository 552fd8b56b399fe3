"""Clinical case records and the indexed, file-backed case store.

A case keeps the problem description (keywords + summary), the patient
record, the diagnosis, ordered treatment and support-treatment rounds and
the final result.  The store maintains an inverted keyword index over
problem keywords and patient findings and persists to JSONL (one case per
line); the index is rebuilt on load, never persisted.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Iterable, Mapping, Optional

from .ontology import Ontology

MAX_AGE = 150


class CaseBaseError(Exception):
    """Base class for case validation and store failures."""


class DuplicateId(CaseBaseError):
    pass


class InvalidCase(CaseBaseError):
    """Names the violated invariant in its message."""


class UnknownDiagnosisTerm(CaseBaseError):
    pass


class UnknownCaseId(CaseBaseError):
    pass


class IoFailure(CaseBaseError):
    pass


class MalformedRecord(CaseBaseError):
    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


class Sex(str, Enum):
    MALE = "male"
    FEMALE = "female"
    UNKNOWN = "unknown"


class Outcome(str, Enum):
    RECOVERED = "recovered"
    STABLE = "stable"
    DEATH = "death"
    UNKNOWN = "unknown"


class TreatmentKind(str, Enum):
    SURGERY = "surgery"
    CHEMOTHERAPY = "chemotherapy"
    RADIOTHERAPY = "radiotherapy"
    ENDOSCOPIC = "endoscopic"
    INTERVENTIONAL = "interventional"
    OTHER = "other"


_WS_RE = re.compile(r"\s+")


def normalize_keyword(keyword: str) -> str:
    """Lowercase, trim and collapse internal whitespace; phrases stay intact."""
    return _WS_RE.sub(" ", keyword.strip()).lower()


def normalize_keywords(keywords: Iterable[str]) -> frozenset[str]:
    return frozenset(k for k in (normalize_keyword(kw) for kw in keywords) if k)


@dataclass(frozen=True)
class PatientRecord:
    """The case environment: demographics, findings and numeric markers.

    Marker units are part of the marker name (e.g. ``cea_ng_ml``); see
    docs/case-schema.md.
    """

    age: int
    sex: Sex = Sex.UNKNOWN
    findings: frozenset[str] = frozenset()
    numeric_markers: Mapping[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "age": self.age,
            "sex": self.sex.value,
            "findings": sorted(self.findings),
            "numeric_markers": dict(sorted(self.numeric_markers.items())),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "PatientRecord":
        return cls(
            age=int(d["age"]),
            sex=Sex(d.get("sex", "unknown")),
            findings=normalize_keywords(d.get("findings", ())),
            numeric_markers={str(k): float(v) for k, v in d.get("numeric_markers", {}).items()},
        )


@dataclass(frozen=True)
class TreatmentRound:
    round: int
    kind: TreatmentKind
    description: str = ""

    def to_dict(self) -> dict:
        return {"round": self.round, "kind": self.kind.value, "description": self.description}

    @classmethod
    def from_dict(cls, d: Mapping) -> "TreatmentRound":
        return cls(round=int(d["round"]), kind=TreatmentKind(d["kind"]), description=str(d.get("description", "")))


@dataclass(frozen=True)
class Problem:
    keywords: frozenset[str] = frozenset()
    summary: str = ""

    def to_dict(self) -> dict:
        return {"keywords": sorted(self.keywords), "summary": self.summary}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Problem":
        return cls(keywords=normalize_keywords(d.get("keywords", ())), summary=str(d.get("summary", "")))


@dataclass(frozen=True)
class Diagnosis:
    term_id: Optional[str] = None
    code: Optional[str] = None
    stage: Optional[str] = None

    def to_dict(self) -> dict:
        return {"term_id": self.term_id, "code": self.code, "stage": self.stage}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Diagnosis":
        return cls(term_id=d.get("term_id"), code=d.get("code"), stage=d.get("stage"))


@dataclass(frozen=True)
class CaseResult:
    outcome: Outcome = Outcome.UNKNOWN
    survival_months: Optional[int] = None

    def to_dict(self) -> dict:
        return {"outcome": self.outcome.value, "survival_months": self.survival_months}

    @classmethod
    def from_dict(cls, d: Mapping) -> "CaseResult":
        months = d.get("survival_months")
        return cls(
            outcome=Outcome(d.get("outcome", "unknown")),
            survival_months=None if months is None else int(months),
        )


@dataclass(frozen=True)
class ClinicalCase:
    case_id: str
    environment: PatientRecord
    problem: Problem = Problem()
    diagnosis: Diagnosis = Diagnosis()
    prognosis: Optional[str] = None
    treatment_rounds: tuple[TreatmentRound, ...] = ()
    support_rounds: tuple[TreatmentRound, ...] = ()
    result: CaseResult = CaseResult()
    onset_date: Optional[str] = None
    closure_date: Optional[str] = None

    def keywords(self) -> frozenset[str]:
        """Everything the keyword index sees: problem keywords plus findings."""
        return self.problem.keywords | self.environment.findings

    def to_dict(self) -> dict:
        d = {
            "case_id": self.case_id,
            "environment": self.environment.to_dict(),
            "problem": self.problem.to_dict(),
            "diagnosis": self.diagnosis.to_dict(),
            "prognosis": self.prognosis,
            "treatment_rounds": [r.to_dict() for r in self.treatment_rounds],
            "support_rounds": [r.to_dict() for r in self.support_rounds],
            "result": self.result.to_dict(),
        }
        if self.onset_date or self.closure_date:
            d["dates"] = {"onset": self.onset_date, "closure": self.closure_date}
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "ClinicalCase":
        dates = d.get("dates") or {}
        case = cls(
            case_id=str(d["case_id"]),
            environment=PatientRecord.from_dict(d["environment"]),
            problem=Problem.from_dict(d.get("problem", {})),
            diagnosis=Diagnosis.from_dict(d.get("diagnosis", {})),
            prognosis=d.get("prognosis"),
            treatment_rounds=tuple(TreatmentRound.from_dict(r) for r in d.get("treatment_rounds", ())),
            support_rounds=tuple(TreatmentRound.from_dict(r) for r in d.get("support_rounds", ())),
            result=CaseResult.from_dict(d.get("result", {})),
            onset_date=dates.get("onset"),
            closure_date=dates.get("closure"),
        )
        validate_case(case)
        return case


def _check_rounds(rounds: tuple[TreatmentRound, ...], label: str) -> None:
    for r in rounds:
        if r.round < 1:
            raise InvalidCase(f"{label} round numbers must be >= 1, got {r.round}")
    numbers = [r.round for r in rounds]
    if any(b <= a for a, b in zip(numbers, numbers[1:])):
        raise InvalidCase(f"{label} round numbers must be strictly increasing, got {numbers}")


def validate_case(case: ClinicalCase, ontology: Ontology | None = None) -> None:
    """Raise InvalidCase / UnknownDiagnosisTerm if any invariant fails."""
    if not case.case_id:
        raise InvalidCase("case_id must be non-empty")
    env = case.environment
    if not 0 <= env.age <= MAX_AGE:
        raise InvalidCase(f"age must be within [0, {MAX_AGE}], got {env.age}")
    for kw in env.findings | case.problem.keywords:
        if kw != normalize_keyword(kw):
            raise InvalidCase(f"keyword not normalized: {kw!r}")
    _check_rounds(case.treatment_rounds, "treatment")
    _check_rounds(case.support_rounds, "support treatment")
    res = case.result
    if res.survival_months is not None:
        if res.survival_months < 0:
            raise InvalidCase("survival_months must be non-negative")
        if res.outcome not in (Outcome.DEATH, Outcome.STABLE, Outcome.RECOVERED):
            raise InvalidCase("survival_months requires outcome death, stable or recovered")
    for label, value in (("onset", case.onset_date), ("closure", case.closure_date)):
        if value is not None:
            try:
                date.fromisoformat(value)
            except ValueError:
                raise InvalidCase(f"{label} date is not ISO-8601: {value!r}") from None
    if ontology is not None and case.diagnosis.term_id is not None:
        if case.diagnosis.term_id not in ontology:
            raise UnknownDiagnosisTerm(case.diagnosis.term_id)


class CaseBase:
    """Single-writer, multi-reader case store with an inverted keyword index.

    Mutations are serialized under a lock and bump ``revision`` by one.
    Reads work on immutable snapshots, so retrieval never blocks ingestion.
    """

    def __init__(self, ontology: Ontology | None = None):
        self._ontology = ontology
        self._cases: dict[str, ClinicalCase] = {}
        self._index: dict[str, set[str]] = {}
        self._revision = 0
        self._lock = threading.RLock()

    @property
    def revision(self) -> int:
        return self._revision

    def __len__(self) -> int:
        return len(self._cases)

    def __contains__(self, case_id: str) -> bool:
        return case_id in self._cases

    def get(self, case_id: str) -> ClinicalCase:
        try:
            return self._cases[case_id]
        except KeyError:
            raise UnknownCaseId(case_id) from None

    def add_case(self, case: ClinicalCase) -> int:
        """Store a validated case, index its keywords, return the new revision."""
        validate_case(case, self._ontology)
        with self._lock:
            if case.case_id in self._cases:
                raise DuplicateId(case.case_id)
            self._cases[case.case_id] = case
            for kw in case.keywords():
                self._index.setdefault(kw, set()).add(case.case_id)
            self._revision += 1
            return self._revision

    def remove_case(self, case_id: str) -> int:
        with self._lock:
            case = self.get(case_id)
            del self._cases[case_id]
            for kw in case.keywords():
                ids = self._index.get(kw)
                if ids:
                    ids.discard(case_id)
                    if not ids:
                        del self._index[kw]
            self._revision += 1
            return self._revision

    def lookup_by_keyword(self, keyword: str) -> frozenset[str]:
        """Exact post-normalization hit set; empty when the keyword is absent."""
        return frozenset(self._index.get(normalize_keyword(keyword), ()))

    def snapshot(self) -> tuple[ClinicalCase, ...]:
        with self._lock:
            return tuple(self._cases[cid] for cid in sorted(self._cases))

    def case_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._cases))

    # -- persistence ----------------------------------------------------------

    def save(self, path) -> None:
        """Full rewrite: one canonical JSON object per line, UTF-8."""
        snapshot = self.snapshot()
        try:
            with open(path, "w", encoding="utf-8") as fh:
                for case in snapshot:
                    fh.write(json.dumps(case.to_dict(), ensure_ascii=False, sort_keys=True))
                    fh.write("\n")
        except OSError as exc:
            raise IoFailure(f"cannot write {path}: {exc}") from exc

    @classmethod
    def load(cls, path, ontology: Ontology | None = None) -> "CaseBase":
        cb = cls(ontology=ontology)
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise IoFailure(f"cannot read {path}: {exc}") from exc
        for number, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                case = ClinicalCase.from_dict(record)
            except (ValueError, KeyError, TypeError) as exc:
                raise MalformedRecord(number, str(exc)) from exc
            cb.add_case(case)
        return cb
