"""Free-text consult interpretation: phrase matching against the ontology
vocabulary and a clinical lexicon, stopword filtering, and query-case
construction.

Matching is greedy longest-match, left to right, case-insensitive.  A
matched phrase contributes its normalized form to the keywords and, when
it resolves in the ontology, the term's canonical name too, so synonyms
converge on one spelling downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .casebase import ClinicalCase, Diagnosis, PatientRecord, Problem, normalize_keyword
from .ontology import Ontology

_TOKEN_RE = re.compile(r"[^\W_]+(?:['\-][^\W_]+)*", re.UNICODE)


@dataclass(frozen=True)
class QueryBundle:
    raw_text: str
    matched_terms: tuple[tuple[str, str], ...]  # (surface string, term id)
    keywords: frozenset[str]
    unmatched_tokens: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "raw_text": self.raw_text,
            "matched_terms": [{"surface": s, "term_id": t} for s, t in self.matched_terms],
            "keywords": sorted(self.keywords),
            "unmatched_tokens": list(self.unmatched_tokens),
        }


def load_wordlist(path) -> frozenset[str]:
    """One entry per line, UTF-8, '#' starts a comment."""
    entries: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            entry = line.split("#", 1)[0].strip()
            if entry:
                entries.add(normalize_keyword(entry))
    return frozenset(entries)


def _packaged_wordlist(filename: str) -> frozenset[str]:
    text = resources.files("oncodss.data").joinpath(filename).read_text(encoding="utf-8")
    return frozenset(
        normalize_keyword(line.split("#", 1)[0])
        for line in text.splitlines()
        if line.split("#", 1)[0].strip()
    )


def default_stopwords() -> frozenset[str]:
    return _packaged_wordlist("stopwords.txt")


def default_lexicon() -> frozenset[str]:
    return _packaged_wordlist("lexicon.txt")


def _phrase_table(ontology: Ontology, vocab: frozenset[str]) -> dict[str, int]:
    phrases: dict[str, int] = {}
    for phrase in vocab:
        phrases[phrase] = len(phrase.split())
    for tid in ontology.terms:
        if tid not in ontology:  # obsolete terms stay out of matching
            continue
        term = ontology.terms[tid]
        for label in (term.name, *term.synonyms):
            norm = normalize_keyword(label)
            if norm:
                phrases[norm] = len(norm.split())
    return phrases


def extract(
    text: str,
    ontology: Ontology,
    vocab: frozenset[str] = frozenset(),
    stopwords: frozenset[str] = frozenset(),
) -> QueryBundle:
    """Scan text for the longest known phrases; leftover non-stopword tokens
    become keywords too and are reported as unmatched."""
    phrases = _phrase_table(ontology, vocab)
    max_len = max(phrases.values(), default=1)
    tokens = [(m.group(0), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]
    norm = [normalize_keyword(t) for t, _, _ in tokens]

    matched_terms: list[tuple[str, str]] = []
    keywords: set[str] = set()
    unmatched: list[str] = []
    i = 0
    while i < len(tokens):
        hit_len = 0
        hit_phrase = ""
        for length in range(min(max_len, len(tokens) - i), 0, -1):
            candidate = " ".join(norm[i : i + length])
            if candidate in phrases:
                hit_len, hit_phrase = length, candidate
                break
        if hit_len:
            surface = text[tokens[i][1] : tokens[i + hit_len - 1][2]]
            keywords.add(hit_phrase)
            info = ontology.resolve_info(hit_phrase)
            if info:
                matched_terms.append((surface, info.term_id))
                keywords.add(normalize_keyword(ontology.terms[info.term_id].name))
            i += hit_len
        else:
            token = norm[i]
            if token and token not in stopwords:
                keywords.add(token)
                unmatched.append(token)
            i += 1
    return QueryBundle(
        raw_text=text,
        matched_terms=tuple(matched_terms),
        keywords=frozenset(keywords),
        unmatched_tokens=tuple(unmatched),
    )


QUERY_CASE_ID = "query"


def build_query_case(
    bundle: QueryBundle,
    record: PatientRecord,
    stage: Optional[str] = None,
    ontology: Optional[Ontology] = None,
) -> ClinicalCase:
    """Synthesize the unsaved query case retrieval scores against.

    The diagnosis term is the deepest matched term (ties to the smallest
    id); depth needs the ontology, so pass the one used for extraction.
    """
    term_id: Optional[str] = None
    if bundle.matched_terms and ontology is not None:
        candidates = {tid for _, tid in bundle.matched_terms if tid in ontology}
        if candidates:
            term_id = min(candidates, key=lambda t: (-ontology.depth[t], t))
    return ClinicalCase(
        case_id=QUERY_CASE_ID,
        environment=record,
        problem=Problem(keywords=bundle.keywords, summary=bundle.raw_text),
        diagnosis=Diagnosis(term_id=term_id, code=None, stage=stage),
    )
