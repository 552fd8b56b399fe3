import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oncodss.casebase import CaseBase
from oncodss.ontology import load_obo
from oncodss.reasoning import load_breast_stages, load_gastric_rules

FIXTURES = ROOT / "fixtures"
GOLDEN = ROOT / "tests" / "golden"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def ontology():
    return load_obo(FIXTURES / "mini-do.obo")


@pytest.fixture(scope="session")
def corpus(ontology):
    return CaseBase.load(FIXTURES / "gastric-cases.jsonl", ontology=ontology)


@pytest.fixture(scope="session")
def rulebook():
    return load_gastric_rules(FIXTURES / "gastric-rules.json")


@pytest.fixture(scope="session")
def breast_table():
    return load_breast_stages(FIXTURES / "breast-stages.json")


@pytest.fixture()
def fresh_corpus(ontology):
    cb = CaseBase(ontology=ontology)
    for case in CaseBase.load(FIXTURES / "gastric-cases.jsonl", ontology=ontology).snapshot():
        cb.add_case(case)
    return cb
