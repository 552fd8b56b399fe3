import pytest

from oncodss.casebase import PatientRecord, Sex
from oncodss.interpreter import (
    QUERY_CASE_ID,
    build_query_case,
    default_lexicon,
    default_stopwords,
    extract,
    load_wordlist,
)


@pytest.fixture(scope="module")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="module")
def stopwords():
    return default_stopwords()


def test_syndrome_phrases_kept_intact(ontology, lexicon, stopwords):
    bundle = extract("acid reflux, belching, vomiting", ontology, lexicon, stopwords)
    assert bundle.keywords == frozenset({"acid reflux", "belching", "vomiting"})


def test_synonym_resolves_to_term(ontology, lexicon, stopwords):
    bundle = extract("stomach cancer with pyloric obstruction", ontology, lexicon, stopwords)
    assert ("stomach cancer", "DOID:10534") in bundle.matched_terms
    # canonical name joins the keywords so synonyms converge
    assert {"stomach cancer", "gastric cancer", "pyloric obstruction"} <= bundle.keywords
    assert "with" not in bundle.keywords


def test_empty_text(ontology, lexicon, stopwords):
    bundle = extract("", ontology, lexicon, stopwords)
    assert bundle.keywords == frozenset()
    assert bundle.matched_terms == ()
    assert bundle.unmatched_tokens == ()


def test_longest_match_wins(ontology, lexicon, stopwords):
    bundle = extract("gastric adenocarcinoma confirmed", ontology, lexicon, stopwords)
    assert ("gastric adenocarcinoma", "DOID:3717") in bundle.matched_terms
    assert "gastric adenocarcinoma" in bundle.keywords
    # the two words were consumed by the phrase, not re-emitted alone
    assert "gastric" not in bundle.keywords
    assert "confirmed" in bundle.unmatched_tokens


def test_determinism(ontology, lexicon, stopwords):
    text = "Gastric Cancer with vomiting and weight loss"
    assert extract(text, ontology, lexicon, stopwords) == extract(text, ontology, lexicon, stopwords)


def test_idempotent_normalization(ontology, lexicon, stopwords):
    text = "stomach cancer, pyloric obstruction and persistent vomiting"
    first = extract(text, ontology, lexicon, stopwords)
    again = extract(" ".join(sorted(first.keywords)), ontology, lexicon, stopwords)
    assert again.keywords == first.keywords


def test_surface_strings_occur_verbatim(ontology, lexicon, stopwords):
    text = "Known STOMACH cancer; recurrent Pyloric Obstruction noted."
    bundle = extract(text, ontology, lexicon, stopwords)
    assert bundle.matched_terms
    for surface, _ in bundle.matched_terms:
        assert surface.lower() in text.lower()
        assert surface in text  # spans are cut from the raw text


def test_stopwords_and_comments_loader(tmp_path):
    path = tmp_path / "words.txt"
    path.write_text("# comment\nalpha\nBeta Gamma  # trailing\n\n", encoding="utf-8")
    assert load_wordlist(path) == frozenset({"alpha", "beta gamma"})


# -- query-case construction -----------------------------------------------------


def test_build_query_case_precedent(ontology, lexicon, stopwords):
    text = "40-year-old man with gastric cancer at the postoperative stage IIIa and pyloric obstruction"
    bundle = extract(text, ontology, lexicon, stopwords)
    record = PatientRecord(age=40, sex=Sex.MALE)
    case = build_query_case(bundle, record, stage="IIIa", ontology=ontology)
    assert case.case_id == QUERY_CASE_ID
    assert case.diagnosis.term_id == "DOID:10534"
    assert case.diagnosis.stage == "IIIa"
    assert case.problem.keywords == bundle.keywords
    assert case.treatment_rounds == () and case.support_rounds == ()


def test_build_query_case_without_disease_term(ontology, lexicon, stopwords):
    bundle = extract("vomiting and fatigue", ontology, lexicon, stopwords)
    case = build_query_case(bundle, PatientRecord(age=50), ontology=ontology)
    assert case.diagnosis.term_id is None


def test_build_query_case_prefers_deeper_term(ontology, lexicon, stopwords):
    bundle = extract("cancer, later refined to gastric adenocarcinoma", ontology, lexicon, stopwords)
    matched_ids = {tid for _, tid in bundle.matched_terms}
    assert {"DOID:162", "DOID:3717"} <= matched_ids
    case = build_query_case(bundle, PatientRecord(age=50), ontology=ontology)
    assert case.diagnosis.term_id == "DOID:3717"
