"""Acceptance suite: one test per primary criterion, each printing a
pass/fail line and enforcing its runtime budget.

The published evaluation tables are reproduced from their printed counts.
Where a printed ratio cannot be derived from the printed counts (the
source tables truncate to two decimals, and one row's counts do not sum to
its sample size), the discrepancy is pinned here explicitly instead of
being papered over; see the assertions marked "recorded discrepancy".
"""

import itertools
import json
import math
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from oncodss.casebase import CaseBase, ClinicalCase, Diagnosis, PatientRecord, Problem
from oncodss.cli import main as cli_main
from oncodss.evaluation import ConfusionCounts, Label, load_labeled_cases, metrics, roc, run_cv
from oncodss.ontology import CycleDetected, NoCommonAncestor, parse_obo
from oncodss.reasoning import (
    BREAST_STAGES,
    ETIOLOGY_CODES,
    Event,
    InvalidTransition,
    State,
    TRANSITIONS,
    initial_supervisor,
    plan_breast_stage,
    plan_treatment,
    supervisor_step,
)
from oncodss.similarity import DEFAULT_WEIGHTS, retrieve_top_k

from oracles import mann_whitney_auc, oracle_lca, oracle_ranking
from strategies import random_case

GOLDEN = Path(__file__).parent / "golden"

PRECEDENT_TEXT = (
    "40-year-old man with gastric cancer at the postoperative stage IIIa and pyloric "
    "obstruction; high-differentiated adenocarcinoma, palpable mass, abnormal thickening "
    "of antral wall and mucosa; syndrome: acid reflux, belching, vomiting"
)


def _report(name, t0, budget):
    elapsed = time.monotonic() - t0
    assert elapsed < budget, f"{name} exceeded its {budget}s budget ({elapsed:.2f}s)"
    print(f"[acceptance] {name}: PASS ({elapsed:.2f}s)")


def _trunc2(value):
    return math.floor(value * 100) / 100


# -- criterion 1: published-tables oracle ------------------------------------------

# (n, tp, fp, tn, fn, fpr, tpr, accuracy%) as printed in the source tables
TABLE_WITHOUT_ONTOLOGY = [
    (78, 39, 17, 20, 2, 0.46, 0.95, 75.64),
    (77, 38, 17, 18, 3, 0.48, 0.93, 72.72),
    (77, 37, 15, 19, 6, 0.44, 0.86, 72.72),
    (76, 37, 16, 18, 5, 0.47, 0.88, 72.36),
    (76, 37, 15, 20, 4, 0.43, 0.90, 75.00),
]
TABLE_WITH_ONTOLOGY = [
    (78, 43, 10, 23, 2, 0.30, 0.95, 84.61),
    (77, 43, 7, 24, 3, 0.22, 0.94, 87.01),
    (77, 42, 11, 22, 2, 0.33, 0.95, 83.11),
    (76, 44, 8, 21, 3, 0.27, 0.94, 85.52),
    (76, 41, 12, 22, 1, 0.35, 0.97, 82.89),
]
PUBLISHED_AVERAGES = {1: 73.68, 2: 84.63}

# Cells whose printed ratio differs from the printed counts by more than
# 0.005; the printed tables truncate to 2 decimals, which these assertions pin.
FLAGGED_RATE_CELLS = {
    (1, 1, "fpr"),  # 17/35 = 0.4857, printed 0.48
    (2, 0, "tpr"),  # 43/45 = 0.9556, printed 0.95
    (2, 1, "fpr"),  # 7/31  = 0.2258, printed 0.22
    (2, 1, "tpr"),  # 43/46 = 0.9348, printed 0.94 (inconsistent either way)
    (2, 3, "fpr"),  # 8/29  = 0.2759, printed 0.27
    (2, 4, "tpr"),  # 41/42 = 0.9762, printed 0.97
}


def test_criterion_tables_oracle():
    t0 = time.monotonic()
    for table_no, table in ((1, TABLE_WITHOUT_ONTOLOGY), (2, TABLE_WITH_ONTOLOGY)):
        for row, (n, tp, fp, tn, fn, fpr_pub, tpr_pub, acc_pub) in enumerate(table):
            counts = ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)
            m = metrics(counts)
            exact_acc = Fraction(tp + tn, counts.total)
            assert abs(m.accuracy - exact_acc) <= 5e-5

            if counts.total == n:
                # printed accuracy is our value truncated to 2 decimals
                assert abs(_trunc2(m.accuracy * 100) - acc_pub) <= 5e-5
            else:
                # recorded discrepancy: this row prints 77 samples but counts
                # summing to 76; its published accuracy uses the printed n
                assert (table_no, row) == (1, 1)
                assert counts.total == 76
                assert abs(_trunc2(100 * (tp + tn) / n) - acc_pub) <= 5e-5

            for name, ours, published in (("fpr", m.fpr, fpr_pub), ("tpr", m.tpr, tpr_pub)):
                if (table_no, row, name) in FLAGGED_RATE_CELLS:
                    # recorded discrepancy: > 0.005 off the printed counts
                    assert abs(ours - published) > 5e-3
                    if (table_no, row, name) != (2, 1, "tpr"):
                        assert _trunc2(ours) == published  # truncation explains it
                else:
                    assert abs(ours - published) <= 5e-3

        published_mean = sum(r[7] for r in table) / len(table)
        assert published_mean == pytest.approx(PUBLISHED_AVERAGES[table_no], abs=0.01)
    _report("tables 1-2 metric oracle (averages 73.68 / 84.63)", t0, 1.0)


# -- criterion 2: AUC correctness --------------------------------------------------


def test_criterion_auc_correctness():
    t0 = time.monotonic()
    rng = random.Random(123)
    for _ in range(500):
        n_pos = rng.randint(1, 25)
        n_neg = rng.randint(1, 50 - n_pos) if n_pos < 50 else 1
        raw = rng.sample(range(1_000_000), n_pos + n_neg)  # tie-free
        scored = [(s / 1_000_000, Label.POSITIVE) for s in raw[:n_pos]] + [
            (s / 1_000_000, Label.NEGATIVE) for s in raw[n_pos:]
        ]
        expected = float(mann_whitney_auc([(s, l.value) for s, l in scored]))
        assert roc(scored).auc == pytest.approx(expected, abs=1e-12)

    separated = [(0.6 + i / 100, Label.POSITIVE) for i in range(10)] + [
        (0.1 + i / 100, Label.NEGATIVE) for i in range(10)
    ]
    assert roc(separated).auc == 1.0

    noise = [(rng.random(), rng.choice(list(Label))) for _ in range(1000)]
    assert roc(noise).auc == pytest.approx(0.5, abs=0.05)
    _report("trapezoidal AUC = Mann-Whitney pair count (500 sets)", t0, 10.0)


# -- criterion 3: ontology contribution direction ------------------------------------


def test_criterion_ontology_direction(ontology, fixtures_dir):
    t0 = time.monotonic()
    data = load_labeled_cases(fixtures_dir / "synthetic-eval.jsonl")
    for seed in range(5):
        with_ontology = run_cv(data, 5, DEFAULT_WEIGHTS, ontology, use_ontology=True, seed=seed)
        without = run_cv(data, 5, DEFAULT_WEIGHTS, ontology, use_ontology=False, seed=seed)
        assert with_ontology.mean_accuracy > without.mean_accuracy, (
            f"seed {seed}: {with_ontology.mean_accuracy} !> {without.mean_accuracy}"
        )
    _report("ontology bridging strictly improves CV accuracy (5 seeds)", t0, 30.0)


# -- criterion 4: rule-table fidelity ---------------------------------------------------


def test_criterion_rule_table_fidelity(rulebook, breast_table):
    t0 = time.monotonic()
    lines = []
    for code in ETIOLOGY_CODES:
        rule = plan_treatment(code, rulebook.therapy_table)
        lines.append(f"{code}|{'+'.join(rule.therapy_codes)}|{rule.narrative}")
    rendered = ("\n".join(lines) + "\n").encode("utf-8")
    assert rendered == (GOLDEN / "gastric_therapy.txt").read_bytes()

    lines = []
    for stage in BREAST_STAGES:
        rule = plan_breast_stage(stage, breast_table)
        mods = ",".join(f"{m}={f}" for m, f in rule.modalities.items())
        lines.append(f"{stage}|{mods}|{rule.narrative}")
    rendered = ("\n".join(lines) + "\n").encode("utf-8")
    assert rendered == (GOLDEN / "breast_stages.txt").read_bytes()
    _report("therapy tables byte-exact against golden files", t0, 1.0)


# -- criterion 5: retrieval oracle ---------------------------------------------------


def test_criterion_retrieval_oracle(corpus, ontology):
    t0 = time.monotonic()
    rng = random.Random(2024)
    pool = sorted({kw for case in corpus.snapshot() for kw in case.keywords()})
    terms = [None, "DOID:10534", "DOID:3717", "DOID:1612", "DOID:9256", "THER:0001"]
    stages = [None, "0", "I", "II", "IIIa", "IIIb", "IV"]
    for i in range(100):
        query = ClinicalCase(
            case_id=f"rq{i}",
            environment=PatientRecord(age=rng.randint(0, 120)),
            problem=Problem(keywords=frozenset(rng.sample(pool, rng.randint(0, 5)))),
            diagnosis=Diagnosis(term_id=rng.choice(terms), stage=rng.choice(stages)),
        )
        ranked = retrieve_top_k(corpus, query, len(corpus), DEFAULT_WEIGHTS, ontology)
        expected = oracle_ranking(corpus.snapshot(), query, (0.4, 0.4, 0.1, 0.1), ontology)
        assert [r.case_id for r in ranked] == [cid for cid, _ in expected]
        for r, (_, s) in zip(ranked, expected):
            assert r.score == pytest.approx(s, abs=1e-9)

    for case in corpus.snapshot():
        top = retrieve_top_k(corpus, case, 1, DEFAULT_WEIGHTS, ontology)
        assert top[0].case_id == case.case_id
        assert top[0].score == pytest.approx(1.0, abs=1e-12)
    _report("retrieval equals brute-force oracle (100 queries + self-rank)", t0, 5.0)


# -- criterion 6: ontology suite ------------------------------------------------------


def test_criterion_ontology_suite(ontology):
    t0 = time.monotonic()
    with pytest.raises(CycleDetected):
        parse_obo("[Term]\nid: A:1\nname: a\nis_a: A:2\n\n[Term]\nid: A:2\nname: b\nis_a: A:1\n")

    active = sorted(tid for tid in ontology.terms if tid in ontology)
    for a, b in itertools.combinations_with_replacement(active, 2):
        expected = oracle_lca(ontology, a, b)
        if expected is None:
            with pytest.raises(NoCommonAncestor):
                ontology.lowest_common_ancestor(a, b)
        else:
            assert ontology.lowest_common_ancestor(a, b) == expected

    for tid in active:
        assert ontology.term_similarity(tid, tid) == 1.0
    for a, b in itertools.combinations(active, 2):
        try:
            ab = ontology.term_similarity(a, b)
        except NoCommonAncestor:
            continue
        assert ab == ontology.term_similarity(b, a)
        assert 0.0 < ab <= 1.0

    assert ontology.term_similarity("DOID:10534", "DOID:1612") == pytest.approx(4 / 7, abs=1e-12)
    _report("ontology: acyclicity, LCA oracle, similarity laws, 4/7 pair", t0, 5.0)


# -- criterion 7: supervisor automaton safety --------------------------------------------


def test_criterion_fsa_suite():
    t0 = time.monotonic()
    rng = random.Random(99)
    events = list(Event)
    for _ in range(10_000):
        s = initial_supervisor()
        for _ in range(rng.randint(0, 12)):
            event = rng.choice(events)
            before = s.state
            try:
                s = supervisor_step(s, event)
            except InvalidTransition:
                assert (before, event) not in TRANSITIONS and event is not Event.ERROR
                assert s.state is before
                continue
            if event is Event.ERROR:
                assert s.state is State.FAILED
            else:
                assert TRANSITIONS[(before, event)] is s.state
            if before is State.FAILED:
                assert s.state is State.FAILED  # absorbing

    s = initial_supervisor()
    for event in (Event.QUERY_RECEIVED, Event.INTERPRETED, Event.DIAGNOSED,
                  Event.PROGNOSED, Event.PLANNED, Event.RETRIEVED):
        s = supervisor_step(s, event)
    assert s.state is State.ANSWERING
    assert len(s.trace) == 7
    _report("supervisor automaton safe over 10,000 random sequences", t0, 5.0)


# -- criterion 8: end to end ----------------------------------------------------------


def test_criterion_end_to_end(corpus, fixtures_dir, tmp_path):
    t0 = time.monotonic()
    store = tmp_path / "store.jsonl"
    corpus.save(store)
    config = tmp_path / "oncodss.conf"
    config.write_text(
        f"ontology_path = {fixtures_dir / 'mini-do.obo'}\n"
        f"case_store_path = {store}\n"
        f"rules_dir = {fixtures_dir}\n",
        encoding="utf-8",
    )

    # via the CLI
    result = CliRunner().invoke(
        cli_main,
        ["query", "--config", str(config), "--text", PRECEDENT_TEXT,
         "--age", "40", "--sex", "m", "--stage", "IIIa", "--json"],
    )
    assert result.exit_code == 0, result.output
    body = json.loads(result.output)
    assert body["similar_cases"][0]["case_id"] == "GC-0001"
    assert body["prognosis"]["median_survival_months"] == 59

    # via the HTTP API
    from oncodss.service import DecisionSupportService, ServiceConfig, create_app

    service = DecisionSupportService.from_config(
        ServiceConfig(
            ontology_path=str(fixtures_dir / "mini-do.obo"),
            case_store_path=str(store),
            rules_dir=str(fixtures_dir),
        )
    )
    client = TestClient(create_app(service))
    response = client.post(
        "/api/consult",
        json={"text": PRECEDENT_TEXT, "patient": {"age": 40, "sex": "male"}, "stage": "IIIa"},
    )
    assert response.status_code == 200
    answer = response.json()
    assert answer["similar_cases"][0]["case_id"] == "GC-0001"
    assert answer["prognosis"]["median_survival_months"] == 59
    assert answer["supervisor_trace"][-1]["state"] == "Answering"

    # 200-case persistence round-trip
    rng = random.Random(1234)
    bulk = CaseBase()
    for i in range(200):
        bulk.add_case(random_case(rng, f"E2E-{i:04d}"))
    path = tmp_path / "bulk.jsonl"
    bulk.save(path)
    loaded = CaseBase.load(path)
    assert len(loaded) == 200
    for cid in bulk.case_ids():
        assert loaded.get(cid) == bulk.get(cid)
    _report("end-to-end consult (CLI + API) and 200-case round-trip", t0, 10.0)
