"""Tags, facets, portlets, and the faceted taxonomy (tag, interface) pair set.

A faceted taxonomy is a set of (tag, faceted-interface) pairs; tags come
from folksonomy-style free tagging and are normalized so that matching is
deterministic. Portlets are self-contained content components (text,
picture, video, audio, code) carrying their own folksonomy and facet pairs;
composing portlets unions their facets into one interface.

Everything here is an immutable value; operations are pure functions.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import CyclicPortlet, DuplicatePortlet, EmptyLabel
from . import store as st

PORTLET_KINDS = ("text", "picture", "video", "audio", "code")

# Reserved predicates for serializing portlets/taxonomies into the store.
PRED_HAS_TAG = "hasTag"
PRED_HAS_FACET = "hasFacet"
PRED_HAS_CHILD = "hasChild"
PRED_CHILD_ORDER = "childOrder"
PRED_OWNED_BY = "ownedBy"
PRED_KIND = "kind"
PRED_PAYLOAD = "payloadRef"


def normalize_label(raw: str) -> str:
    """Trim, case-fold, NFC-normalize. Idempotent; raises EmptyLabel on blank input."""
    label = unicodedata.normalize("NFC", raw.strip().casefold())
    if not label:
        raise EmptyLabel(f"label is empty after normalization: {raw!r}")
    return label


@dataclass(frozen=True, order=True)
class Tag:
    label: str
    owner: str

    def __post_init__(self):
        if self.label != unicodedata.normalize("NFC", self.label.strip().casefold()):
            raise ValueError(f"tag label not normalized: {self.label!r}")


def create_tag(raw_label: str, owner: str) -> Tag:
    """Normalize a raw label into a Tag; equal raw labels yield equal Tags."""
    return Tag(normalize_label(raw_label), owner)


@dataclass(frozen=True)
class FacetedInterface:
    """A faceted rendering target: selected facet values plus an ordered layout."""

    id: str
    facet_selections: frozenset[tuple[str, str]] = frozenset()
    layout_slots: tuple[str, ...] = ()


@dataclass(frozen=True)
class FacetPair:
    tag: Tag
    interface: FacetedInterface


@dataclass(frozen=True)
class FacetedTaxonomy:
    """The pair set; n tags may map to m interfaces with n != m."""

    pairs: frozenset[FacetPair] = frozenset()

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def tags(self) -> frozenset[Tag]:
        return frozenset(p.tag for p in self.pairs)


def attach_pair(taxonomy: FacetedTaxonomy, tag: Tag, interface: FacetedInterface) -> FacetedTaxonomy:
    """Add (tag, interface); idempotent set insertion."""
    return FacetedTaxonomy(taxonomy.pairs | {FacetPair(tag, interface)})


@dataclass(frozen=True)
class Portlet:
    """A content contribution with its own folksonomy and facet pairs.

    ``children`` reference other portlets by id (composition, ordered);
    acyclicity is enforced across a collection via :func:`ensure_acyclic`.
    """

    id: str
    kind: str
    payload_ref: str = ""
    folksonomy: frozenset[Tag] = frozenset()
    facets: frozenset[tuple[str, str]] = frozenset()
    children: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in PORTLET_KINDS:
            raise ValueError(f"unknown portlet kind {self.kind!r}")
        if self.id in self.children:
            raise CyclicPortlet(f"portlet {self.id!r} contains itself")


def ensure_acyclic(portlets: Iterable[Portlet]) -> None:
    """Reject any transitive self-containment among the given portlets."""
    by_id = {p.id: p for p in portlets}
    WHITE, GREY, BLACK = 0, 1, 2
    state = {pid: WHITE for pid in by_id}

    def visit(pid: str, trail: tuple[str, ...]) -> None:
        state[pid] = GREY
        for child in by_id[pid].children:
            if child not in by_id:
                continue  # dangling reference: tolerated, content may arrive later
            if state[child] == GREY:
                raise CyclicPortlet(" -> ".join(trail + (child,)))
            if state[child] == WHITE:
                visit(child, trail + (child,))
        state[pid] = BLACK

    for pid in by_id:
        if state[pid] == WHITE:
            visit(pid, (pid,))


def compose_interface(portlets: Sequence[Portlet], interface_id: str | None = None) -> FacetedInterface:
    """Aggregate portlets into one interface: facet union, slots in argument order."""
    if not portlets:
        raise ValueError("compose_interface requires at least one portlet")
    ids = [p.id for p in portlets]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise DuplicatePortlet(f"duplicate portlet ids: {', '.join(dupes)}")
    selections: frozenset[tuple[str, str]] = frozenset()
    for p in portlets:
        selections |= p.facets
    return FacetedInterface(
        id=interface_id if interface_id is not None else "+".join(ids),
        facet_selections=selections,
        layout_slots=tuple(ids),
    )


def facet_histogram(portlets: Iterable[Portlet], facet_name: str) -> dict[str, int]:
    """value -> number of portlets carrying (facet_name, value)."""
    counts: dict[str, int] = {}
    for p in portlets:
        for name, value in p.facets:
            if name == facet_name:
                counts[value] = counts.get(value, 0) + 1
    return counts


# --- store serialization -----------------------------------------------------

def portlet_to_triples(p: Portlet) -> list[st.Triple]:
    triples = [st.spo(p.id, PRED_KIND, st.literal(p.kind))]
    if p.payload_ref:
        triples.append(st.spo(p.id, PRED_PAYLOAD, st.literal(p.payload_ref)))
    for tag in sorted(p.folksonomy):
        triples.append(st.spo(p.id, PRED_HAS_TAG, st.literal(tag.label)))
        triples.append(st.spo(f"tag:{tag.label}", PRED_OWNED_BY, tag.owner))
    for name, value in sorted(p.facets):
        triples.append(st.spo(p.id, PRED_HAS_FACET, st.literal(f"{name}={value}")))
    for child in p.children:
        triples.append(st.spo(p.id, PRED_HAS_CHILD, child))
    if p.children:
        # hasChild triples lose order (the store is a set); keep it in one literal
        triples.append(st.spo(p.id, PRED_CHILD_ORDER, st.literal(",".join(p.children))))
    return triples


def portlets_from_store(s: st.TripleStore) -> dict[str, Portlet]:
    """Rebuild all portlets serialized by :func:`portlet_to_triples`."""
    kinds: dict[str, str] = {}
    payloads: dict[str, str] = {}
    tags: dict[str, set[str]] = {}
    owners: dict[str, str] = {}
    facets: dict[str, set[tuple[str, str]]] = {}
    child_order: dict[str, tuple[str, ...]] = {}

    for t in s.snapshot():
        subj, pred, obj = t.subject.text, t.predicate.text, t.object.text
        if pred == PRED_KIND and obj in PORTLET_KINDS:
            kinds[subj] = obj
        elif pred == PRED_PAYLOAD:
            payloads[subj] = obj
        elif pred == PRED_HAS_TAG:
            tags.setdefault(subj, set()).add(obj)
        elif pred == PRED_OWNED_BY and subj.startswith("tag:"):
            owners[subj[len("tag:"):]] = obj
        elif pred == PRED_HAS_FACET and "=" in obj:
            name, _, value = obj.partition("=")
            facets.setdefault(subj, set()).add((name, value))
        elif pred == PRED_CHILD_ORDER:
            child_order[subj] = tuple(c for c in obj.split(",") if c)

    portlets = {}
    for pid, kind in kinds.items():
        folk = frozenset(
            Tag(label, owners.get(label, "unknown")) for label in tags.get(pid, ())
        )
        portlets[pid] = Portlet(
            id=pid,
            kind=kind,
            payload_ref=payloads.get(pid, ""),
            folksonomy=folk,
            facets=frozenset(facets.get(pid, ())),
            children=child_order.get(pid, ()),
        )
    ensure_acyclic(portlets.values())
    return portlets


def taxonomy_from_portlets(portlets: Iterable[Portlet]) -> FacetedTaxonomy:
    """Each portlet's tags pair with the portlet's own single-slot interface."""
    taxonomy = FacetedTaxonomy()
    for p in sorted(portlets, key=lambda p: p.id):
        iface = FacetedInterface(id=p.id, facet_selections=p.facets, layout_slots=(p.id,))
        for tag in sorted(p.folksonomy):
            taxonomy = attach_pair(taxonomy, tag, iface)
    return taxonomy
