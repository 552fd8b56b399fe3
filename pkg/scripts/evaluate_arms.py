#!/usr/bin/env python3
"""Run the with/without-ontology comparison on a labeled corpus and write
per-arm reports plus ROC point CSVs for plotting.

Usage:
    python scripts/evaluate_arms.py [dataset.jsonl] [--seed N] [--out DIR]
"""

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from oncodss.evaluation import load_labeled_cases, render_report, roc, roc_csv, run_cv
from oncodss.ontology import load_obo
from oncodss.similarity import DEFAULT_WEIGHTS


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("dataset", nargs="?", default=ROOT / "fixtures" / "synthetic-eval.jsonl")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--k", type=int, default=5)
    parser.add_argument("--out", type=Path, default=ROOT / "results")
    args = parser.parse_args()

    ontology = load_obo(ROOT / "fixtures" / "mini-do.obo")
    data = load_labeled_cases(args.dataset)
    args.out.mkdir(parents=True, exist_ok=True)

    for arm, use_ontology in (("with_ontology", True), ("without_ontology", False)):
        result = run_cv(data, args.k, DEFAULT_WEIGHTS, ontology,
                        use_ontology=use_ontology, seed=args.seed)
        curve = roc(result.scored)
        report = render_report(result.fold_counts)
        print(f"\n== {arm} (seed {args.seed}, k={args.k}) ==")
        print(report)
        print(f"AUC  {curve.auc:.4f}")
        (args.out / f"{arm}-report.txt").write_text(report + f"\nAUC  {curve.auc:.4f}\n")
        (args.out / f"{arm}-roc.csv").write_text(roc_csv(curve))
    print(f"\nwrote reports and ROC CSVs to {args.out}/")


if __name__ == "__main__":
    main()
