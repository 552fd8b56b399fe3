"""The decision-support shell: configuration, the consult pipeline that
wires interpreter -> supervisor -> rules -> retrieval -> prognosis, and the
HTTP JSON API.

Every consult owns its own supervisor automaton; case-store writes are
serialized inside CaseBase while reads work on snapshots, so concurrent
consults never observe a half-applied ingestion.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import casebase as cb
from . import evaluation as ev
from . import interpreter as interp
from . import reasoning as rs
from .ontology import Ontology, load_obo
from .similarity import DEFAULT_WEIGHTS, SimilarityWeights, retrieve_top_k

logger = logging.getLogger(__name__)

DEFAULT_K = 5

# Reflexive capability declarations for supervisor bidding.
MODEL_CAPABILITIES: Mapping[str, frozenset[str]] = {
    "diagnosis_automaton": frozenset({"diagnosis"}),
    "therapy_automaton": frozenset({"treatment"}),
    "prognosis_aggregator": frozenset({"prognosis"}),
    "case_retrieval": frozenset({"retrieval"}),
}

CONSULT_TASK_TAGS = frozenset({"diagnosis", "treatment", "prognosis", "retrieval"})


class ServiceError(Exception):
    pass


class BadRequest(ServiceError):
    pass


class ConsultError(ServiceError):
    """A pipeline stage failed; carries the supervisor state and trace."""

    def __init__(self, code: str, message: str, supervisor: rs.SupervisorState):
        self.code = code
        self.message = message
        self.fsa_state = supervisor.state
        self.trace = supervisor.trace_as_dicts()
        super().__init__(f"{code}: {message}")

    def to_dict(self) -> dict:
        return {
            "error": {"code": self.code, "message": self.message, "fsa_state": self.fsa_state.value},
            "supervisor_trace": self.trace,
        }


@dataclass
class ServiceConfig:
    ontology_path: str = "fixtures/mini-do.obo"
    case_store_path: str = "fixtures/gastric-cases.jsonl"
    rules_dir: str = "fixtures"
    weights: tuple[float, float, float, float] = (0.4, 0.4, 0.1, 0.1)
    k_default: int = DEFAULT_K
    port: int = 8800
    static_assets_dir: Optional[str] = None


def load_config(path) -> ServiceConfig:
    """Key/value file: ``key = value`` lines, '#' comments; weights is four
    comma-separated reals (diagnosis, keywords, age, stage)."""
    cfg = ServiceConfig()
    with open(path, encoding="utf-8") as fh:
        for number, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ServiceError(f"{path}:{number}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key == "ontology_path":
                cfg.ontology_path = value
            elif key == "case_store_path":
                cfg.case_store_path = value
            elif key == "rules_dir":
                cfg.rules_dir = value
            elif key == "weights":
                parts = [float(p) for p in value.split(",")]
                if len(parts) != 4:
                    raise ServiceError(f"{path}:{number}: weights needs 4 values")
                cfg.weights = tuple(parts)  # type: ignore[assignment]
            elif key == "k_default":
                cfg.k_default = int(value)
            elif key == "port":
                cfg.port = int(value)
            elif key == "static_assets_dir":
                cfg.static_assets_dir = value or None
            else:
                raise ServiceError(f"{path}:{number}: unknown key {key!r}")
    return cfg


@dataclass(frozen=True)
class ConsultRequest:
    text: str
    patient: cb.PatientRecord
    stage: Optional[str] = None
    k: Optional[int] = None

    @classmethod
    def from_dict(cls, d: Mapping) -> "ConsultRequest":
        if "patient" not in d:
            raise BadRequest("consult request needs a patient record")
        try:
            patient = cb.PatientRecord.from_dict(d["patient"])
        except (KeyError, ValueError, TypeError) as exc:
            raise BadRequest(f"bad patient record: {exc}") from exc
        if not 0 <= patient.age <= cb.MAX_AGE:
            raise BadRequest(f"age must be within [0, {cb.MAX_AGE}]")
        k = d.get("k")
        if k is not None:
            k = int(k)
            if k < 1:
                raise BadRequest("k must be >= 1")
        return cls(text=str(d.get("text", "")), patient=patient, stage=d.get("stage"), k=k)


@dataclass
class ConsultAnswer:
    diagnoses: list[tuple[str, str]]
    therapy: list[rs.TherapyRule]
    prognosis: rs.Prognosis
    similar_cases: list[dict]  # RankedCase dict + full case body
    supervisor_trace: list[dict]
    ontology_matches: list[dict]
    query_keywords: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "diagnoses": [{"code": c, "label": l} for c, l in self.diagnoses],
            "therapy": [t.to_dict() for t in self.therapy],
            "prognosis": self.prognosis.to_dict(),
            "similar_cases": self.similar_cases,
            "supervisor_trace": self.supervisor_trace,
            "ontology_matches": self.ontology_matches,
            "query_keywords": self.query_keywords,
        }


class DecisionSupportService:
    """Owns the loaded ontology, case base, rule tables and weights."""

    def __init__(
        self,
        ontology: Optional[Ontology],
        casebase: cb.CaseBase,
        rulebook: Optional[rs.GastricRuleBook],
        breast_table: Optional[Mapping[str, rs.TherapyRule]] = None,
        weights: SimilarityWeights = DEFAULT_WEIGHTS,
        k_default: int = DEFAULT_K,
        case_store_path: Optional[str] = None,
    ):
        self.ontology = ontology
        self.casebase = casebase
        self.rulebook = rulebook
        self.breast_table = breast_table or {}
        self.weights = weights
        self.k_default = k_default
        self.case_store_path = case_store_path
        self.stopwords = interp.default_stopwords()
        self.lexicon = interp.default_lexicon()

    @classmethod
    def from_config(cls, cfg: ServiceConfig) -> "DecisionSupportService":
        ontology = load_obo(cfg.ontology_path)
        store = cb.CaseBase(ontology=ontology)
        if os.path.exists(cfg.case_store_path):
            store = cb.CaseBase.load(cfg.case_store_path, ontology=ontology)
        rulebook = rs.load_gastric_rules(os.path.join(cfg.rules_dir, "gastric-rules.json"))
        breast = rs.load_breast_stages(os.path.join(cfg.rules_dir, "breast-stages.json"))
        logger.info(
            "loaded %d terms, %d cases, %d diagnosis rules",
            len(ontology), len(store), len(rulebook.diagnosis_rules),
        )
        return cls(
            ontology=ontology,
            casebase=store,
            rulebook=rulebook,
            breast_table=breast,
            weights=SimilarityWeights.of(*cfg.weights),
            k_default=cfg.k_default,
            case_store_path=cfg.case_store_path,
        )

    # -- store operations ---------------------------------------------------

    def add_case(self, case: cb.ClinicalCase) -> int:
        revision = self.casebase.add_case(case)
        if self.case_store_path:
            self.casebase.save(self.case_store_path)
        return revision

    # -- the consult pipeline -------------------------------------------------

    def consult(self, req: ConsultRequest) -> ConsultAnswer:
        sup = rs.initial_supervisor()

        def fail(code: str, message: str) -> ConsultError:
            return ConsultError(code, message, rs.supervisor_step(sup, rs.Event.ERROR))

        if self.ontology is None or self.rulebook is None:
            raise fail("NotReady", "ontology and rule tables must be loaded before consulting")

        sup = rs.supervisor_step(sup, rs.Event.QUERY_RECEIVED)
        sup = rs.activate_models(sup, rs.model_bid(MODEL_CAPABILITIES, CONSULT_TASK_TAGS))
        try:
            bundle = interp.extract(req.text, self.ontology, self.lexicon, self.stopwords)
            query = interp.build_query_case(bundle, req.patient, req.stage, self.ontology)
        except Exception as exc:  # pragma: no cover - defensive
            raise fail("InterpreterFailure", str(exc)) from exc

        sup = rs.supervisor_step(sup, rs.Event.INTERPRETED)
        try:
            signs = rs.derive_signs(bundle.keywords, self.rulebook.signs)
            diagnoses = rs.diagnose(signs, self.rulebook.diagnosis_rules)
        except rs.ReasoningError as exc:
            raise fail(type(exc).__name__, str(exc)) from exc

        sup = rs.supervisor_step(sup, rs.Event.DIAGNOSED)
        sup = rs.supervisor_step(sup, rs.Event.PROGNOSED)
        try:
            therapy = [
                rs.plan_treatment(code, self.rulebook.therapy_table)
                for code, _ in diagnoses
                if code != rs.POSITIVE_CODE
            ]
        except rs.ReasoningError as exc:
            raise fail(type(exc).__name__, str(exc)) from exc

        sup = rs.supervisor_step(sup, rs.Event.PLANNED)
        try:
            # Nothing to search on means nothing retrieved, not a weak match-all.
            if not query.keywords() and query.diagnosis.term_id is None:
                ranked = []
            else:
                k = req.k or self.k_default
                ranked = retrieve_top_k(self.casebase, query, k, self.weights, self.ontology)
            prognosis = rs.prognose(ranked, self.casebase)
        except (cb.CaseBaseError, ValueError) as exc:
            raise fail(type(exc).__name__, str(exc)) from exc

        sup = rs.supervisor_step(sup, rs.Event.RETRIEVED)
        similar = [
            {**r.to_dict(), "case": self.casebase.get(r.case_id).to_dict()} for r in ranked
        ]
        return ConsultAnswer(
            diagnoses=diagnoses,
            therapy=therapy,
            prognosis=prognosis,
            similar_cases=similar,
            supervisor_trace=sup.trace_as_dicts(),
            ontology_matches=[{"surface": s, "term_id": t} for s, t in bundle.matched_terms],
            query_keywords=sorted(bundle.keywords),
        )

    # -- evaluation -----------------------------------------------------------

    def evaluate(
        self,
        data: Sequence[ev.LabeledCase],
        k_neighbors: int = DEFAULT_K,
        use_ontology: bool = True,
        seed: int = 0,
        n_folds: int = 5,
    ) -> dict:
        if self.ontology is None:
            raise ServiceError("ontology must be loaded before evaluating")
        result = ev.run_cv(
            data, k_neighbors, self.weights, self.ontology,
            use_ontology=use_ontology, seed=seed, n_folds=n_folds,
        )
        curve = ev.roc(result.scored)
        folds = []
        for counts in result.fold_counts:
            m = ev.metrics(counts)
            folds.append({"n": counts.total, **counts.to_dict(), **m.to_dict()})
        return {
            "use_ontology": use_ontology,
            "seed": seed,
            "k_neighbors": k_neighbors,
            "folds": folds,
            "mean_accuracy": result.mean_accuracy,
            "report": ev.render_report(result.fold_counts),
            "roc": curve.to_dict(),
        }


def create_app(service: DecisionSupportService, static_dir: Optional[str] = None) -> FastAPI:
    """Build the FastAPI application over a loaded service."""
    app = FastAPI(title="oncodss", version="0.1.0")
    app.state.service = service

    def error(status: int, code: str, message: str, extra: Optional[dict] = None):
        body = {"error": {"code": code, "message": message}}
        if extra:
            body.update(extra)
        return JSONResponse(status_code=status, content=body)

    @app.get("/api/health")
    def health():
        return {
            "status": "ok",
            "ontology_terms": len(service.ontology) if service.ontology else 0,
            "case_count": len(service.casebase),
            "revision": service.casebase.revision,
        }

    @app.get("/api/ontology/terms/{term_id}")
    def get_term(term_id: str):
        term = service.ontology.terms.get(term_id) if service.ontology else None
        if term is None:
            return error(404, "UnknownTerm", f"unknown term: {term_id}")
        payload = term.to_dict()
        if not term.obsolete:
            payload["depth"] = service.ontology.depth[term_id]
        return payload

    @app.get("/api/ontology/similarity")
    def term_similarity(a: str, b: str):
        try:
            return {"score": service.ontology.term_similarity(a, b)}
        except Exception as exc:
            return error(400, type(exc).__name__, str(exc))

    @app.post("/api/cases", status_code=201)
    async def post_case(request: Request):
        body = await request.json()
        try:
            case = cb.ClinicalCase.from_dict(body)
            revision = service.add_case(case)
        except cb.DuplicateId as exc:
            return error(409, "DuplicateId", str(exc))
        except (cb.CaseBaseError, KeyError, ValueError, TypeError) as exc:
            return error(400, type(exc).__name__, str(exc))
        return {"case_id": case.case_id, "revision": revision}

    @app.get("/api/cases/{case_id}")
    def get_case(case_id: str):
        try:
            return service.casebase.get(case_id).to_dict()
        except cb.UnknownCaseId:
            return error(404, "UnknownCaseId", f"no case {case_id}")

    @app.post("/api/retrieve")
    async def retrieve(request: Request):
        body = await request.json()
        try:
            query = cb.ClinicalCase.from_dict(body["query"])
            k = int(body.get("k", service.k_default))
            use_ontology = bool(body.get("use_ontology", True))
            ranked = retrieve_top_k(
                service.casebase, query, k, service.weights, service.ontology, use_ontology
            )
        except (cb.CaseBaseError, KeyError, ValueError, TypeError) as exc:
            return error(400, type(exc).__name__, str(exc))
        return [r.to_dict() for r in ranked]

    @app.post("/api/consult")
    async def consult(request: Request):
        body = await request.json()
        try:
            req = ConsultRequest.from_dict(body)
        except BadRequest as exc:
            return error(400, "BadRequest", str(exc))
        try:
            return service.consult(req).to_dict()
        except ConsultError as exc:
            return JSONResponse(status_code=400, content=exc.to_dict())

    @app.post("/api/evaluate")
    async def evaluate(request: Request):
        body = await request.json()
        try:
            if "dataset" in body:
                data = ev.load_labeled_cases(body["dataset"])
            elif "cases" in body:
                data = [ev.LabeledCase.from_dict(d) for d in body["cases"]]
            else:
                return error(400, "BadRequest", "provide 'dataset' path or inline 'cases'")
            return service.evaluate(
                data,
                k_neighbors=int(body.get("k_neighbors", service.k_default)),
                use_ontology=bool(body.get("use_ontology", True)),
                seed=int(body.get("seed", 0)),
                n_folds=int(body.get("folds", 5)),
            )
        except (ev.EvaluationError, cb.CaseBaseError, OSError, KeyError, ValueError) as exc:
            return error(400, type(exc).__name__, str(exc))

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
