"""Embedded triple store: set semantics, conjunctive pattern queries, file persistence.

Queries are evaluated by a plain nested-loop join with variable substitution
(correctness first, no optimizer) and return bindings in a deterministic
order. Persistence uses a line-delimited N-Triples subset:

    <subject-iri> <predicate-iri> <object-iri> .
    <subject-iri> <predicate-iri> "object literal" .

with ``#`` comment lines ignored. IRI texts are treated as opaque strings;
characters that would break the line format are percent-encoded on write
and decoded on read, so persist/restore is the identity on triple sets.
"""

from __future__ import annotations

import re
import threading
import urllib.parse
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import EmptyQuery, IoFailure, MalformedTerm, ParseError

IRI = "iri"
LITERAL = "literal"
VARIABLE = "variable"

_KINDS = (IRI, LITERAL, VARIABLE)


@dataclass(frozen=True, order=True)
class Term:
    """An RDF-style atom: an IRI, a literal, or (in query patterns) a variable."""

    kind: str
    text: str

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise MalformedTerm(f"unknown term kind {self.kind!r}")
        if not self.text.strip():
            raise MalformedTerm("term text is empty")

    @property
    def is_variable(self) -> bool:
        return self.kind == VARIABLE


def iri(text: str) -> Term:
    return Term(IRI, text)


def literal(text: str) -> Term:
    return Term(LITERAL, text)


def var(name: str) -> Term:
    return Term(VARIABLE, name)


@dataclass(frozen=True, order=True)
class Triple:
    """Subject/predicate/object fact. Variables are only legal in query patterns."""

    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if self.subject.kind == LITERAL:
            raise MalformedTerm("triple subject must be an IRI")
        if self.predicate.kind == LITERAL:
            raise MalformedTerm("triple predicate must be an IRI")

    @property
    def has_variables(self) -> bool:
        return any(t.is_variable for t in (self.subject, self.predicate, self.object))

    def terms(self) -> tuple[Term, Term, Term]:
        return (self.subject, self.predicate, self.object)


def spo(subject: str, predicate: str, obj: Term | str) -> Triple:
    """Shorthand constructor: strings become IRIs, pass a literal() for literals."""
    o = obj if isinstance(obj, Term) else iri(obj)
    return Triple(iri(subject), iri(predicate), o)


class BindingSet:
    """Deterministically ordered, duplicate-free solutions of a pattern query.

    Each solution maps every variable name occurring in the query to a bound
    Term. Order is lexicographic on the bound term texts (variable names
    sorted), so downstream consumers are reproducible.
    """

    def __init__(self, variables: Iterable[str], solutions: Iterable[dict[str, Term]]):
        self.variables = tuple(sorted(set(variables)))
        seen = set()
        unique: list[dict[str, Term]] = []
        for sol in solutions:
            if set(sol) != set(self.variables):
                raise ValueError("solution does not bind exactly the query variables")
            key = tuple(sol[v] for v in self.variables)
            if key not in seen:
                seen.add(key)
                unique.append(dict(sol))
        unique.sort(key=lambda s: tuple((s[v].text, s[v].kind) for v in self.variables))
        self._solutions = unique

    def __iter__(self) -> Iterator[dict[str, Term]]:
        return iter(self._solutions)

    def __len__(self) -> int:
        return len(self._solutions)

    def __getitem__(self, i: int) -> dict[str, Term]:
        return self._solutions[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BindingSet):
            return NotImplemented
        return self.variables == other.variables and self._solutions == other._solutions

    def __repr__(self) -> str:
        return f"BindingSet(vars={self.variables}, n={len(self)})"


def _pattern_variables(patterns: Iterable[Triple]) -> set[str]:
    names = set()
    for p in patterns:
        for t in p.terms():
            if t.is_variable:
                names.add(t.text)
    return names


def _match(pattern: Triple, fact: Triple, bound: dict[str, Term]) -> dict[str, Term] | None:
    """Try to extend ``bound`` so that pattern matches fact; None on failure."""
    out = dict(bound)
    for pt, ft in zip(pattern.terms(), fact.terms()):
        if pt.is_variable:
            existing = out.get(pt.text)
            if existing is None:
                out[pt.text] = ft
            elif existing != ft:
                return None
        elif pt != ft:
            return None
    return out


class TripleStore:
    """A mutable set of triples with a monotonically increasing revision.

    Mutations are serialized through an internal lock (single-writer
    contract); reads take a snapshot and may run concurrently.
    """

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples: set[Triple] = set()
        self._revision = 0
        self._lock = threading.Lock()
        for t in triples:
            self.insert(t)

    @property
    def revision(self) -> int:
        return self._revision

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, t: Triple) -> bool:
        return t in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.snapshot())

    def snapshot(self) -> tuple[Triple, ...]:
        """Sorted, immutable view of the current triple set."""
        return tuple(sorted(self._triples))

    def insert(self, t: Triple) -> bool:
        """Insert a triple; returns True iff the store changed (revision bumped)."""
        if t.has_variables:
            raise MalformedTerm("stored triples must not contain variables")
        with self._lock:
            if t in self._triples:
                return False
            self._triples.add(t)
            self._revision += 1
            return True

    def insert_all(self, triples: Iterable[Triple]) -> int:
        return sum(1 for t in triples if self.insert(t))

    def remove(self, t: Triple) -> bool:
        with self._lock:
            if t not in self._triples:
                return False
            self._triples.discard(t)
            self._revision += 1
            return True

    def query(self, patterns: list[Triple]) -> BindingSet:
        """Conjunctive basic-graph-pattern matching; shared variables join."""
        if not patterns:
            raise EmptyQuery("query requires at least one pattern")
        facts = self.snapshot()
        solutions: list[dict[str, Term]] = [{}]
        for pattern in patterns:
            next_solutions: list[dict[str, Term]] = []
            for bound in solutions:
                for fact in facts:
                    extended = _match(pattern, fact, bound)
                    if extended is not None:
                        next_solutions.append(extended)
            solutions = next_solutions
            if not solutions:
                break
        return BindingSet(_pattern_variables(patterns), solutions)


# --- persistence -----------------------------------------------------------

# Characters that would break the one-triple-per-line format inside an IRI.
_IRI_UNSAFE = re.compile(r'[\x00-\x20<>"%\\]|\s')  # \s also covers Unicode spaces

_LITERAL_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_LITERAL_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}

_LINE_RE = re.compile(
    r'^<(?P<s>[^<>\s]*)>\s+<(?P<p>[^<>\s]*)>\s+'
    r'(?:<(?P<o_iri>[^<>\s]*)>|"(?P<o_lit>(?:[^"\\]|\\.)*)")\s*\.\s*$'
)


def _encode_iri(text: str) -> str:
    return _IRI_UNSAFE.sub(lambda m: urllib.parse.quote(m.group(0), safe=""), text)


def _decode_iri(text: str) -> str:
    return urllib.parse.unquote(text)


def _encode_literal(text: str) -> str:
    return "".join(_LITERAL_ESCAPES.get(ch, ch) for ch in text)


def _decode_literal(text: str, lineno: int) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            if i + 1 >= len(text):
                raise ParseError("dangling escape in literal", lineno)
            nxt = text[i + 1]
            if nxt not in _LITERAL_UNESCAPES:
                raise ParseError(f"unknown escape \\{nxt} in literal", lineno)
            out.append(_LITERAL_UNESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def format_triple(t: Triple) -> str:
    s = f"<{_encode_iri(t.subject.text)}>"
    p = f"<{_encode_iri(t.predicate.text)}>"
    if t.object.kind == IRI:
        o = f"<{_encode_iri(t.object.text)}>"
    else:
        o = f'"{_encode_literal(t.object.text)}"'
    return f"{s} {p} {o} ."


def parse_line(line: str, lineno: int) -> Triple | None:
    """Parse one persistence line; returns None for blanks and comments."""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _LINE_RE.match(stripped)
    if m is None:
        raise ParseError(f"malformed triple line: {stripped[:60]!r}", lineno)
    subject = iri(_decode_iri(m.group("s")))
    predicate = iri(_decode_iri(m.group("p")))
    if m.group("o_iri") is not None:
        obj = iri(_decode_iri(m.group("o_iri")))
    else:
        obj = literal(_decode_literal(m.group("o_lit"), lineno))
    return Triple(subject, predicate, obj)


def persist(store: TripleStore, path: str | Path) -> None:
    """Write the store to ``path`` in the N-Triples subset, sorted for determinism."""
    lines = [format_triple(t) for t in store.snapshot()]
    try:
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def restore(path: str | Path) -> TripleStore:
    """Load a store previously written by :func:`persist`."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return parse_ntriples(text)


def parse_ntriples(text: str) -> TripleStore:
    store = TripleStore()
    for lineno, line in enumerate(text.splitlines(), start=1):
        try:
            t = parse_line(line, lineno)
        except MalformedTerm as exc:
            raise ParseError(str(exc), lineno) from exc
        if t is not None:
            store.insert(t)
    return store
