"""Independent straight-line reimplementations used as test oracles.

Everything here recomputes from raw data (term parent maps, case fields)
without calling the code paths under test, so an agreement check means two
separate derivations matched.
"""

from __future__ import annotations

import re
from fractions import Fraction


# -- taxonomy ---------------------------------------------------------------


def oracle_depth(ontology, term_id, _memo=None):
    memo = _memo if _memo is not None else {}
    if term_id in memo:
        return memo[term_id]
    parents = ontology.terms[term_id].parents
    value = 1 if not parents else 1 + min(oracle_depth(ontology, p, memo) for p in parents)
    memo[term_id] = value
    return value


def oracle_ancestors(ontology, term_id):
    out = {term_id}
    stack = [term_id]
    while stack:
        for parent in ontology.terms[stack.pop()].parents:
            if parent not in out:
                out.add(parent)
                stack.append(parent)
    return out


def oracle_lca(ontology, a, b):
    common = oracle_ancestors(ontology, a) & oracle_ancestors(ontology, b)
    if not common:
        return None
    memo = {}
    return min(common, key=lambda t: (-oracle_depth(ontology, t, memo), t))


def oracle_wu_palmer(ontology, a, b):
    lca = oracle_lca(ontology, a, b)
    if lca is None:
        return None
    memo = {}
    return (
        2.0
        * oracle_depth(ontology, lca, memo)
        / (oracle_depth(ontology, a, memo) + oracle_depth(ontology, b, memo))
    )


def oracle_resolve(ontology, label):
    key = label.strip().lower()
    name_hits = sorted(
        tid
        for tid, t in ontology.terms.items()
        if not t.obsolete and t.name.lower() == key
    )
    if name_hits:
        return name_hits[0]
    syn_hits = sorted(
        tid
        for tid, t in ontology.terms.items()
        if not t.obsolete and any(s.lower() == key for s in t.synonyms)
    )
    return syn_hits[0] if syn_hits else None


# -- case similarity ---------------------------------------------------------

_STAGE = re.compile(r"^(0|[ivx]+)\s*([a-z]?)$")


def _oracle_expand(keywords, ontology, levels=2):
    memo = {}
    out = set()
    for kw in keywords:
        out.add(kw)
        tid = oracle_resolve(ontology, kw)
        if tid is not None:
            d = oracle_depth(ontology, tid, memo)
            for anc in oracle_ancestors(ontology, tid):
                if d - oracle_depth(ontology, anc, memo) <= levels:
                    out.add(ontology.terms[anc].name.lower())
    return out


def oracle_facets(query, candidate, ontology, use_ontology=True):
    facets = {}
    qt, ct = query.diagnosis.term_id, candidate.diagnosis.term_id
    if qt is None or ct is None:
        facets["diagnosis"] = 0.0
    elif not use_ontology:
        facets["diagnosis"] = 1.0 if qt == ct else 0.0
    else:
        sim = oracle_wu_palmer(ontology, qt, ct)
        facets["diagnosis"] = 0.0 if sim is None else sim

    qk = set(query.problem.keywords) | set(query.environment.findings)
    ck = set(candidate.problem.keywords) | set(candidate.environment.findings)
    if use_ontology:
        qk, ck = _oracle_expand(qk, ontology), _oracle_expand(ck, ontology)
    union = qk | ck
    facets["keywords"] = len(qk & ck) / len(union) if union else 0.0

    facets["age"] = max(0.0, min(1.0, 1.0 - abs(query.environment.age - candidate.environment.age) / 100.0))

    qs, cs = query.diagnosis.stage, candidate.diagnosis.stage
    if qs is None or cs is None:
        facets["stage"] = 0.0
    else:
        a, b = qs.strip().lower(), cs.strip().lower()
        if a == b:
            facets["stage"] = 1.0
        else:
            ma, mb = _STAGE.match(a), _STAGE.match(b)
            facets["stage"] = 0.5 if ma and mb and ma.group(1) == mb.group(1) else 0.0
    return facets


def oracle_score(query, candidate, raw_weights, ontology, use_ontology=True):
    total = sum(raw_weights)
    w = [x / total for x in raw_weights]
    f = oracle_facets(query, candidate, ontology, use_ontology)
    return (
        w[0] * f["diagnosis"] + w[1] * f["keywords"] + w[2] * f["age"] + w[3] * f["stage"]
    )


def oracle_ranking(cases, query, raw_weights, ontology, use_ontology=True):
    scored = [
        (c.case_id, oracle_score(query, c, raw_weights, ontology, use_ontology)) for c in cases
    ]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


def oracle_classify(cases, labels, query, raw_weights, ontology, k, use_ontology=True):
    top = oracle_ranking(cases, query, raw_weights, ontology, use_ontology)[:k]
    denom = sum(s for _, s in top)
    num = sum(s for cid, s in top if labels[cid] == "positive")
    return num / denom if denom > 0 else 0.0


# -- evaluation ---------------------------------------------------------------


def mann_whitney_auc(scored):
    """Fraction of correctly ordered (positive, negative) pairs; ties count half."""
    positives = [s for s, label in scored if label == "positive"]
    negatives = [s for s, label in scored if label == "negative"]
    wins = Fraction(0)
    for p in positives:
        for n in negatives:
            if p > n:
                wins += 1
            elif p == n:
                wins += Fraction(1, 2)
    return wins / (len(positives) * len(negatives))


def oracle_median_low(values):
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]
