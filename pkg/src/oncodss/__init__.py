"""oncodss: ontology-backed cancer treatment decision support with
case-based retrieval and a reproducible evaluation harness."""

from .casebase import (
    CaseBase,
    ClinicalCase,
    Diagnosis,
    PatientRecord,
    Problem,
    CaseResult,
    TreatmentRound,
    Outcome,
    Sex,
    TreatmentKind,
)
from .evaluation import ConfusionCounts, Label, LabeledCase, RocCurve, metrics, roc, run_cv
from .ontology import Ontology, Term, Triple, load_obo, parse_obo
from .reasoning import (
    DiagnosisRule,
    Prognosis,
    SupervisorState,
    TherapyRule,
    diagnose,
    plan_breast_stage,
    plan_treatment,
    prognose,
)
from .similarity import DEFAULT_WEIGHTS, RankedCase, SimilarityWeights, retrieve_top_k
from .service import ConsultRequest, DecisionSupportService, ServiceConfig, create_app

__version__ = "0.1.0"

__all__ = [
    "CaseBase",
    "ClinicalCase",
    "ConfusionCounts",
    "ConsultRequest",
    "DEFAULT_WEIGHTS",
    "DecisionSupportService",
    "Diagnosis",
    "DiagnosisRule",
    "Label",
    "LabeledCase",
    "Ontology",
    "Outcome",
    "PatientRecord",
    "Problem",
    "Prognosis",
    "RankedCase",
    "CaseResult",
    "RocCurve",
    "ServiceConfig",
    "Sex",
    "SimilarityWeights",
    "SupervisorState",
    "Term",
    "TherapyRule",
    "TreatmentKind",
    "TreatmentRound",
    "Triple",
    "create_app",
    "diagnose",
    "load_obo",
    "metrics",
    "parse_obo",
    "plan_breast_stage",
    "plan_treatment",
    "prognose",
    "retrieve_top_k",
    "roc",
    "run_cv",
]
