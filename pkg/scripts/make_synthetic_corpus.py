#!/usr/bin/env python3
"""Build fixtures/synthetic-eval.jsonl: a labeled corpus whose classes are
separable only through synonym/ancestor bridging.

Every case carries exactly one disease spelling, and no spelling is reused
anywhere in the corpus, so verbatim keyword overlap between any two cases
comes only from noise symptoms.  Ages and sexes are assigned pairwise to
one positive and one negative case (class-independent by construction) and
noise symptoms are drawn from one shared pool.  Positives spell
gastric-family terms, negatives breast-family terms; only ontology
expansion can see that.
"""

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from oncodss.casebase import ClinicalCase, Diagnosis, PatientRecord, Problem, Sex, normalize_keyword
from oncodss.ontology import load_obo

ROOT = Path(__file__).resolve().parents[1]
SEED = 20240811
PAIRS = 20

GASTRIC_TERMS = ("DOID:10534", "DOID:3717", "DOID:10540", "DOID:5516", "DOID:4944")
BREAST_TERMS = ("DOID:1612", "DOID:3458", "DOID:3007", "DOID:3456")

NOISE_SYMPTOMS = (
    "nausea", "fatigue", "weight loss", "anemia",
    "fever", "insomnia", "dizziness", "loss of appetite",
)


def spellings(ontology, term_ids):
    seen = set()
    out = []
    for tid in term_ids:
        term = ontology.terms[tid]
        for label in (term.name, *sorted(term.synonyms)):
            norm = normalize_keyword(label)
            if norm not in seen:
                seen.add(norm)
                out.append(norm)
    return out


def make_case(case_id, spelling, noise, junk, age, sex):
    return ClinicalCase(
        case_id=case_id,
        environment=PatientRecord(age=age, sex=sex),
        problem=Problem(
            keywords=frozenset({spelling, *noise, junk}),
            summary=f"synthetic case mentioning {spelling}",
        ),
        diagnosis=Diagnosis(),
    )


def main():
    ontology = load_obo(ROOT / "fixtures" / "mini-do.obo")
    rng = random.Random(SEED)
    gastric = spellings(ontology, GASTRIC_TERMS)
    breast = spellings(ontology, BREAST_TERMS)
    assert len(gastric) >= PAIRS and len(breast) >= PAIRS, (len(gastric), len(breast))
    rng.shuffle(gastric)
    rng.shuffle(breast)

    records = []
    for i in range(PAIRS):
        age = rng.randint(30, 80)
        sex = rng.choice((Sex.MALE, Sex.FEMALE))
        pos = make_case(
            f"SYN-{2 * i:03d}", gastric[i], rng.sample(NOISE_SYMPTOMS, 2),
            f"marker-{2 * i:03d}", age, sex,
        )
        neg = make_case(
            f"SYN-{2 * i + 1:03d}", breast[i], rng.sample(NOISE_SYMPTOMS, 2),
            f"marker-{2 * i + 1:03d}", age, sex,
        )
        records.append({"case": pos.to_dict(), "label": "positive"})
        records.append({"case": neg.to_dict(), "label": "negative"})

    out = ROOT / "fixtures" / "synthetic-eval.jsonl"
    with open(out, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            fh.write("\n")
    print(f"wrote {len(records)} labeled cases to {out}")


if __name__ == "__main__":
    main()
