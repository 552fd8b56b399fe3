#!/usr/bin/env python3
"""Build fixtures/gastric-cases.jsonl: the 12-case demo corpus.

The corpus holds five gastric cases (including the stage-IIIa precedent
with four treatment rounds and three support rounds), four breast cases
and three other GI/thoracic cases, all resolvable against
fixtures/mini-do.obo.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from oncodss.casebase import (
    CaseBase,
    CaseResult,
    ClinicalCase,
    Diagnosis,
    Outcome,
    PatientRecord,
    Problem,
    Sex,
    TreatmentKind,
    TreatmentRound,
    normalize_keywords,
)
from oncodss.ontology import load_obo

ROOT = Path(__file__).resolve().parents[1]


def case(case_id, age, sex, keywords, findings, term_id, code, stage, outcome,
         survival, rounds=(), support=(), summary="", prognosis=None, dates=(None, None)):
    return ClinicalCase(
        case_id=case_id,
        environment=PatientRecord(age=age, sex=Sex(sex), findings=normalize_keywords(findings)),
        problem=Problem(keywords=normalize_keywords(keywords), summary=summary),
        diagnosis=Diagnosis(term_id=term_id, code=code, stage=stage),
        prognosis=prognosis,
        treatment_rounds=tuple(
            TreatmentRound(round=n, kind=TreatmentKind(k), description=d) for n, k, d in rounds
        ),
        support_rounds=tuple(
            TreatmentRound(round=n, kind=TreatmentKind(k), description=d) for n, k, d in support
        ),
        result=CaseResult(outcome=Outcome(outcome), survival_months=survival),
        onset_date=dates[0],
        closure_date=dates[1],
    )


CASES = [
    # The stage-IIIa gastric precedent: 4 treatment rounds, 3 support rounds,
    # death at 4 years 11 months = 59 months.
    case(
        "GC-0001", 40, "male",
        keywords=["gastric cancer", "high-differentiated adenocarcinoma", "pyloric obstruction",
                  "palpable mass", "antral wall thickening", "mucosal thickening"],
        findings=["pyloric obstruction", "palpable mass", "acid reflux", "belching", "vomiting"],
        term_id="DOID:10534", code="D3", stage="IIIa",
        outcome="death", survival=59,
        rounds=[
            (1, "surgery", "underwent radical gastrectomy"),
            (2, "surgery", "laparotomy + retroperitoneal partial resection + abdominal tumor reduction surgery"),
            (3, "chemotherapy", "chemotherapy: CPT-11 (120mg) + 5-FU (300mg)"),
            (4, "surgery", "nodular partial excision + side-by-side ascending-ileum colon anastomosis"),
        ],
        support=[
            (1, "chemotherapy", "postoperatively adjuvant chemotherapy"),
            (2, "chemotherapy", "intraperitoneal chemotherapy with DDP 2"),
            (4, "chemotherapy", "chemotherapy with DDP + 5-FU"),
        ],
        summary="Postoperative stage IIIa gastric cancer with pyloric obstruction and a palpable epigastric mass.",
        prognosis="Locally advanced disease; guarded after repeat debulking.",
        dates=("2008-03-15", "2013-02-20"),
    ),
    case(
        "GC-0002", 55, "female",
        keywords=["stomach adenocarcinoma", "lymph node metastasis", "epigastric pain"],
        findings=["epigastric pain", "nausea"],
        term_id="DOID:3717", code="D2", stage="II",
        outcome="recovered", survival=90,
        rounds=[(1, "surgery", "radical gastrectomy with D2 lymphadenectomy")],
        support=[(1, "chemotherapy", "adjuvant chemotherapy, six cycles")],
        summary="Stage II gastric adenocarcinoma with nodal involvement.",
        dates=("2010-06-01", "2018-01-10"),
    ),
    case(
        "GC-0003", 62, "male",
        keywords=["stomach cancer", "early stage", "no lymph node metastasis"],
        findings=["weight loss"],
        term_id="DOID:10534", code="D1", stage="I",
        outcome="recovered", survival=66,
        rounds=[(1, "endoscopic", "endoscopic submucosal dissection")],
        summary="Early gastric cancer found on screening endoscopy.",
    ),
    case(
        "GC-0004", 47, "male",
        keywords=["stomach lymphoma", "recurrence", "ascites"],
        findings=["ascites", "fatigue"],
        term_id="DOID:10540", code="D6", stage="IV",
        outcome="death", survival=24,
        rounds=[
            (1, "chemotherapy", "systemic chemotherapy, CHOP regimen"),
            (2, "radiotherapy", "palliative radiotherapy"),
        ],
        support=[(2, "other", "nutritional support")],
        summary="Relapsed gastric lymphoma with malignant ascites.",
    ),
    case(
        "GC-0005", 38, "female",
        keywords=["signet ring cell carcinoma of stomach", "unresectable", "pyloric obstruction"],
        findings=["vomiting", "weight loss"],
        term_id="DOID:5516", code="D4", stage="IIIb",
        outcome="stable", survival=48,
        rounds=[(1, "chemotherapy", "palliative chemotherapy based on 5-FU")],
        support=[(1, "interventional", "duodenal stent for obstruction")],
        summary="Unresectable signet ring cell carcinoma with outlet obstruction.",
    ),
    case(
        "BC-0001", 52, "female",
        keywords=["breast carcinoma", "breast lump"],
        findings=["breast lump"],
        term_id="DOID:1612", code=None, stage="II",
        outcome="recovered", survival=84,
        rounds=[(1, "surgery", "modified radical mastectomy")],
        support=[(1, "radiotherapy", "postoperative radiotherapy")],
        summary="Stage II breast carcinoma, palpable lump.",
    ),
    case(
        "BC-0002", 61, "female",
        keywords=["mammary adenocarcinoma", "skin dimpling"],
        findings=["skin dimpling"],
        term_id="DOID:3458", code=None, stage="III",
        outcome="stable", survival=40,
        rounds=[
            (1, "chemotherapy", "neoadjuvant chemotherapy"),
            (2, "surgery", "modified radical mastectomy"),
        ],
        summary="Locally advanced mammary adenocarcinoma.",
    ),
    case(
        "BC-0003", 45, "female",
        keywords=["ductal breast carcinoma", "nipple discharge"],
        findings=["nipple discharge"],
        term_id="DOID:3007", code=None, stage="I",
        outcome="recovered", survival=72,
        rounds=[(1, "surgery", "breast-conserving surgery")],
        support=[(1, "radiotherapy", "postoperative radical radiotherapy")],
        summary="Early ductal carcinoma presenting with discharge.",
    ),
    case(
        "BC-0004", 70, "female",
        keywords=["lobular breast cancer", "metastasis"],
        findings=["fatigue"],
        term_id="DOID:3456", code=None, stage="IV",
        outcome="death", survival=18,
        rounds=[(1, "chemotherapy", "first-line chemotherapy")],
        support=[(1, "other", "endocrine therapy")],
        summary="Metastatic lobular carcinoma.",
    ),
    case(
        "CRC-0001", 58, "male",
        keywords=["bowel cancer", "melena"],
        findings=["melena", "anemia"],
        term_id="DOID:9256", code=None, stage="II",
        outcome="recovered", survival=70,
        rounds=[(1, "surgery", "right hemicolectomy")],
        summary="Stage II colorectal cancer with occult bleeding.",
    ),
    case(
        "LC-0001", 66, "male",
        keywords=["pulmonary cancer", "cough"],
        findings=["fatigue", "cough"],
        term_id="DOID:1324", code=None, stage="III",
        outcome="death", survival=14,
        rounds=[(1, "radiotherapy", "thoracic radiotherapy"), (2, "chemotherapy", "platinum doublet")],
        summary="Stage III lung cancer.",
    ),
    case(
        "EC-0001", 59, "male",
        keywords=["oesophageal cancer", "dysphagia"],
        findings=["dysphagia", "weight loss"],
        term_id="DOID:5041", code=None, stage="II",
        outcome="stable", survival=30,
        rounds=[(1, "surgery", "esophagectomy")],
        support=[(1, "chemotherapy", "adjuvant chemotherapy")],
        summary="Esophageal cancer with progressive dysphagia.",
    ),
]


def main():
    ontology = load_obo(ROOT / "fixtures" / "mini-do.obo")
    store = CaseBase(ontology=ontology)
    for c in CASES:
        store.add_case(c)
    out = ROOT / "fixtures" / "gastric-cases.jsonl"
    store.save(out)
    print(f"wrote {len(store)} cases to {out}")


if __name__ == "__main__":
    main()
