"""Disease ontology: OBO parsing, taxonomy traversal and term similarity.

The taxonomy is a DAG over ``is_a`` edges only.  Every other relationship
line becomes a knowledge triple.  Depth is defined from the roots: a root
has depth 1 and every other term has depth ``1 + min(depth of parents)``,
so similarity scores are well defined and never divide by zero.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple


class OntologyError(Exception):
    """Base class for ontology load and query failures."""


class MissingId(OntologyError):
    """A [Term] stanza had no id line."""


class CycleDetected(OntologyError):
    """The is_a graph contains a cycle."""

    def __init__(self, term_ids: Iterable[str]):
        self.term_ids = sorted(term_ids)
        super().__init__(f"is_a cycle involving: {', '.join(self.term_ids)}")


class DanglingParent(OntologyError):
    """An is_a target is absent after the full parse."""

    def __init__(self, child: str, parent: str):
        self.child = child
        self.parent = parent
        super().__init__(f"term {child} names unknown parent {parent}")


class UnknownTerm(OntologyError):
    def __init__(self, term_id: str):
        self.term_id = term_id
        super().__init__(f"unknown term: {term_id}")


class NoCommonAncestor(OntologyError):
    def __init__(self, a: str, b: str):
        self.a, self.b = a, b
        super().__init__(f"{a} and {b} share no root")


@dataclass(frozen=True)
class Term:
    """One ontology node.  ``parents`` holds is_a targets only."""

    id: str
    name: str
    synonyms: frozenset[str] = frozenset()
    parents: frozenset[str] = frozenset()
    obsolete: bool = False

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "synonyms": sorted(self.synonyms),
            "parents": sorted(self.parents),
            "obsolete": self.obsolete,
        }


@dataclass(frozen=True)
class Triple:
    """(subject, relation, object) knowledge statement.

    Subject and object are term ids when the triple came from a
    ``relationship:`` line, but either side may be a plain literal.
    """

    subject: str
    relation: str
    object: str

    def to_dict(self) -> dict:
        return {"subject": self.subject, "relation": self.relation, "object": self.object}


class Resolution(NamedTuple):
    term_id: str
    ambiguous: bool
    matched_via: str  # "name" or "synonym"


_SYNONYM_RE = re.compile(r'"((?:[^"\\]|\\.)*)"')
_STANZA_RE = re.compile(r"^\[(\w+)\]\s*$")


class Ontology:
    """Immutable, indexed view of a parsed OBO document.

    Construction happens once in :func:`parse_obo`; afterwards the object
    is safe for unsynchronized concurrent reads.  Obsolete terms are kept
    (so they can be displayed) but take no part in the taxonomy: they have
    no depth and are invisible to :meth:`resolve`, :meth:`ancestors` and
    the similarity queries.
    """

    def __init__(self, terms: dict[str, Term], triples: list[Triple]):
        self.terms: dict[str, Term] = dict(terms)
        self.triples: tuple[Triple, ...] = tuple(triples)
        self._active = {tid for tid, t in self.terms.items() if not t.obsolete}
        self._check_edges()
        self.depth: dict[str, int] = self._compute_depths()
        self.roots: frozenset[str] = frozenset(
            tid for tid in self._active if not self.terms[tid].parents
        )
        self._name_index: dict[str, list[str]] = {}
        self._synonym_index: dict[str, list[str]] = {}
        for tid in sorted(self._active):
            term = self.terms[tid]
            self._name_index.setdefault(term.name.casefold(), []).append(tid)
            for syn in term.synonyms:
                self._synonym_index.setdefault(syn.casefold(), []).append(tid)

    # -- construction checks -------------------------------------------------

    def _check_edges(self) -> None:
        for tid in self._active:
            for parent in self.terms[tid].parents:
                if parent not in self._active:
                    raise DanglingParent(tid, parent)

    def _compute_depths(self) -> dict[str, int]:
        # Kahn order over child->parent edges; parents settle before children.
        remaining = {tid: len(self.terms[tid].parents) for tid in self._active}
        children: dict[str, list[str]] = {tid: [] for tid in self._active}
        for tid in self._active:
            for parent in self.terms[tid].parents:
                children[parent].append(tid)
        queue = deque(sorted(tid for tid, n in remaining.items() if n == 0))
        depth: dict[str, int] = {}
        while queue:
            tid = queue.popleft()
            parents = self.terms[tid].parents
            depth[tid] = 1 + min((depth[p] for p in parents), default=0)
            for child in children[tid]:
                remaining[child] -= 1
                if remaining[child] == 0:
                    queue.append(child)
        if len(depth) != len(self._active):
            raise CycleDetected(self._active - depth.keys())
        return depth

    # -- queries ---------------------------------------------------------------

    def _require(self, term_id: str) -> Term:
        if term_id not in self._active:
            raise UnknownTerm(term_id)
        return self.terms[term_id]

    def ancestors(self, term_id: str) -> tuple[str, ...]:
        """Reflexive is_a closure, ordered by (depth ascending, id)."""
        self._require(term_id)
        seen = {term_id}
        queue = deque([term_id])
        while queue:
            for parent in self.terms[queue.popleft()].parents:
                if parent not in seen:
                    seen.add(parent)
                    queue.append(parent)
        return tuple(sorted(seen, key=lambda t: (self.depth[t], t)))

    def lowest_common_ancestor(self, a: str, b: str) -> str:
        """Deepest shared ancestor; depth ties break to the smallest id."""
        self._require(a)
        self._require(b)
        common = set(self.ancestors(a)) & set(self.ancestors(b))
        if not common:
            raise NoCommonAncestor(a, b)
        return min(common, key=lambda t: (-self.depth[t], t))

    def term_similarity(self, a: str, b: str) -> float:
        """Structural similarity 2*depth(lca) / (depth(a) + depth(b)), in (0, 1]."""
        lca = self.lowest_common_ancestor(a, b)
        return 2.0 * self.depth[lca] / (self.depth[a] + self.depth[b])

    def resolve(self, label: str) -> str | None:
        """Case-insensitive exact lookup: names first, then synonyms."""
        info = self.resolve_info(label)
        return info.term_id if info else None

    def resolve_info(self, label: str) -> Resolution | None:
        """Like :meth:`resolve` but also reports ambiguity.

        Ambiguity means several terms carry the matched label within the
        tier that was consulted; the smallest id wins deterministically.
        """
        key = label.strip().casefold()
        hits = self._name_index.get(key)
        if hits:
            return Resolution(min(hits), len(hits) > 1, "name")
        hits = self._synonym_index.get(key)
        if hits:
            return Resolution(min(hits), len(hits) > 1, "synonym")
        return None

    def triples_about(self, subject_or_object: str) -> tuple[Triple, ...]:
        """All triples mentioning the argument, in load order.

        The argument may be a term id, a term label (resolved through
        :meth:`resolve`) or a plain literal; literals compare
        case-insensitively.
        """
        keys = {subject_or_object, subject_or_object.strip().casefold()}
        resolved = self.resolve_info(subject_or_object)
        if resolved:
            keys.add(resolved.term_id)
        return tuple(
            t
            for t in self.triples
            if t.subject in keys
            or t.object in keys
            or t.subject.casefold() in keys
            or t.object.casefold() in keys
        )

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term_id: str) -> bool:
        return term_id in self._active


@dataclass
class _Stanza:
    lines: list[tuple[str, str]] = field(default_factory=list)


def _split_stanzas(text: str) -> list[_Stanza]:
    stanzas: list[_Stanza] = []
    current: _Stanza | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        m = _STANZA_RE.match(line)
        if m:
            current = _Stanza() if m.group(1) == "Term" else None
            if current is not None:
                stanzas.append(current)
            continue
        if current is None or ":" not in line:
            continue
        tag, value = line.split(":", 1)
        current.lines.append((tag.strip(), value.strip()))
    return stanzas


def _strip_comment(value: str) -> str:
    return value.split("!", 1)[0].strip()


def parse_obo(text: str) -> Ontology:
    """Parse OBO 1.2-style flat text into an :class:`Ontology`.

    Only ``[Term]`` stanzas are read.  ``is_a`` targets keep just the id,
    synonyms keep just the quoted string, and ``relationship: <rel> <id>``
    lines become triples with the stanza's term as subject.  Raises
    :class:`MissingId`, :class:`DanglingParent` or :class:`CycleDetected`
    on ill-formed input.
    """
    terms: dict[str, Term] = {}
    triples: list[Triple] = []
    for stanza in _split_stanzas(text):
        tags = stanza.lines
        ids = [v for k, v in tags if k == "id"]
        if not ids or not _strip_comment(ids[0]):
            raise MissingId(f"[Term] stanza without id (tags: {[k for k, _ in tags]})")
        tid = _strip_comment(ids[0])
        name = tid
        synonyms: set[str] = set()
        parents: set[str] = set()
        obsolete = False
        pending: list[tuple[str, str]] = []
        for tag, value in tags:
            if tag == "name":
                name = _strip_comment(value)
            elif tag == "is_a":
                target = _strip_comment(value)
                if target:
                    parents.add(target)
            elif tag == "synonym":
                m = _SYNONYM_RE.search(value)
                if m:
                    synonyms.add(m.group(1))
            elif tag == "is_obsolete":
                obsolete = _strip_comment(value).lower() == "true"
            elif tag == "relationship":
                parts = _strip_comment(value).split(None, 1)
                if len(parts) == 2:
                    pending.append((parts[0], parts[1]))
        synonyms.discard(name)
        terms[tid] = Term(
            id=tid,
            name=name,
            synonyms=frozenset(synonyms),
            parents=frozenset(parents),
            obsolete=obsolete,
        )
        triples.extend(Triple(tid, rel, target) for rel, target in pending)
    return Ontology(terms, triples)


def load_obo(path) -> Ontology:
    with open(path, encoding="utf-8") as fh:
        return parse_obo(fh.read())
