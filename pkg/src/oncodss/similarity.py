"""Case-to-case similarity scoring and top-k retrieval.

Four facets are scored in [0, 1] and combined as a weighted sum: diagnosis
(taxonomy similarity of the two diagnosis terms), keywords (Jaccard overlap
of ontology-expanded keyword sets), age, and stage.  Missing material on
either side scores 0 for its facet rather than renormalizing, which keeps
scores comparable across candidates.

With ``use_ontology=False`` the keyword sets are compared verbatim and the
diagnosis facet degrades to exact term-id equality: the retrieval arm
without semantic bridging.
"""

from __future__ import annotations

import re
import weakref
from dataclasses import dataclass

from .casebase import CaseBase, ClinicalCase
from .ontology import NoCommonAncestor, Ontology, UnknownTerm

FACETS = ("diagnosis", "keywords", "age", "stage")

AGE_SCALE = 100.0
EXPANSION_LEVELS = 2

_STAGE_RE = re.compile(r"^(0|[ivx]+)\s*([a-z]?)$")


class SimilarityError(Exception):
    pass


class InvalidWeights(SimilarityError):
    pass


@dataclass(frozen=True)
class SimilarityWeights:
    """Non-negative facet weights, normalized so they sum to 1."""

    diagnosis: float
    keywords: float
    age: float
    stage: float

    @classmethod
    def of(cls, diagnosis: float, keywords: float, age: float, stage: float) -> "SimilarityWeights":
        raw = (diagnosis, keywords, age, stage)
        if any(w < 0 for w in raw):
            raise InvalidWeights(f"weights must be non-negative, got {raw}")
        total = sum(raw)
        if total <= 0:
            raise InvalidWeights("at least one weight must be positive")
        return cls(*(w / total for w in raw))

    def as_dict(self) -> dict[str, float]:
        return {"diagnosis": self.diagnosis, "keywords": self.keywords, "age": self.age, "stage": self.stage}


DEFAULT_WEIGHTS = SimilarityWeights.of(0.4, 0.4, 0.1, 0.1)


@dataclass(frozen=True)
class RankedCase:
    case_id: str
    score: float
    component_scores: dict[str, float]
    missing_facets: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "score": self.score,
            "component_scores": dict(self.component_scores),
            "missing_facets": list(self.missing_facets),
        }


# Per-ontology memo of keyword -> expansion; ontologies are immutable.
_expansion_cache: "weakref.WeakKeyDictionary[Ontology, dict[str, frozenset[str]]]" = (
    weakref.WeakKeyDictionary()
)


def _expand_one(keyword: str, ontology: Ontology) -> frozenset[str]:
    cache = _expansion_cache.setdefault(ontology, {})
    hit = cache.get(keyword)
    if hit is not None:
        return hit
    names = {keyword}
    info = ontology.resolve_info(keyword)
    if info:
        term_depth = ontology.depth[info.term_id]
        for anc in ontology.ancestors(info.term_id):
            if term_depth - ontology.depth[anc] <= EXPANSION_LEVELS:
                names.add(ontology.terms[anc].name.lower())
    result = frozenset(names)
    cache[keyword] = result
    return result


def expand_keywords(keywords: frozenset[str], ontology: Ontology) -> frozenset[str]:
    """Each resolvable keyword contributes its term's canonical name plus
    ancestor names up to two levels above; unresolvable keywords pass through."""
    expanded: set[str] = set()
    for kw in keywords:
        expanded |= _expand_one(kw, ontology)
    return frozenset(expanded)


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def _parse_stage(label: str) -> tuple[str, str] | None:
    m = _STAGE_RE.match(label.strip().lower())
    return (m.group(1), m.group(2)) if m else None


def _stage_similarity(a: str, b: str) -> float:
    an, bn = a.strip().lower(), b.strip().lower()
    if an == bn:
        return 1.0
    pa, pb = _parse_stage(an), _parse_stage(bn)
    if pa and pb and pa[0] == pb[0]:
        return 0.5
    return 0.0


@dataclass(frozen=True)
class FacetScores:
    scores: dict[str, float]
    missing: tuple[str, ...]


def facet_similarities(
    query: ClinicalCase,
    candidate: ClinicalCase,
    ontology: Ontology,
    use_ontology: bool = True,
) -> FacetScores:
    """Per-facet similarity in [0, 1]; facets without material score 0 and
    are listed as missing."""
    scores: dict[str, float] = {}
    missing: list[str] = []

    qt, ct = query.diagnosis.term_id, candidate.diagnosis.term_id
    if qt is None or ct is None:
        scores["diagnosis"] = 0.0
        missing.append("diagnosis")
    elif not use_ontology:
        scores["diagnosis"] = 1.0 if qt == ct else 0.0
    else:
        try:
            scores["diagnosis"] = ontology.term_similarity(qt, ct)
        except (UnknownTerm, NoCommonAncestor):
            scores["diagnosis"] = 0.0

    qk, ck = query.keywords(), candidate.keywords()
    if not qk and not ck:
        scores["keywords"] = 0.0
        missing.append("keywords")
    elif use_ontology:
        scores["keywords"] = _jaccard(expand_keywords(qk, ontology), expand_keywords(ck, ontology))
    else:
        scores["keywords"] = _jaccard(qk, ck)

    gap = abs(query.environment.age - candidate.environment.age) / AGE_SCALE
    scores["age"] = min(1.0, max(0.0, 1.0 - gap))

    qs, cs = query.diagnosis.stage, candidate.diagnosis.stage
    if qs is None or cs is None:
        scores["stage"] = 0.0
        missing.append("stage")
    else:
        scores["stage"] = _stage_similarity(qs, cs)

    return FacetScores(scores=scores, missing=tuple(missing))


def score(
    query: ClinicalCase,
    candidate: ClinicalCase,
    weights: SimilarityWeights,
    ontology: Ontology,
    use_ontology: bool = True,
) -> float:
    facets = facet_similarities(query, candidate, ontology, use_ontology)
    w = weights.as_dict()
    return sum(w[f] * facets.scores[f] for f in FACETS)


def retrieve_top_k(
    casebase: CaseBase,
    query: ClinicalCase,
    k: int,
    weights: SimilarityWeights,
    ontology: Ontology,
    use_ontology: bool = True,
) -> list[RankedCase]:
    """The k best-scoring stored cases, sorted by (score desc, case_id asc)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    w = weights.as_dict()
    ranked = []
    for candidate in casebase.snapshot():
        facets = facet_similarities(query, candidate, ontology, use_ontology)
        total = sum(w[f] * facets.scores[f] for f in FACETS)
        ranked.append(
            RankedCase(
                case_id=candidate.case_id,
                score=total,
                component_scores=facets.scores,
                missing_facets=facets.missing,
            )
        )
    ranked.sort(key=lambda r: (-r.score, r.case_id))
    return ranked[:k]
