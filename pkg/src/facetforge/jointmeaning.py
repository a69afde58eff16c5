"""Speaker/audience label resolution over superconcepts.

A portlet's tags land in superconcepts (classes of interchangeable
concept labels). The speaker keeps the labels they authored; every
audience member sees, per superconcept, the member label that overlaps
their own interests the most. Construal rounds repeat until no choice
changes. Each viewer's best choice depends only on their own profile and
the speaker's anchor, so the process always stabilizes within two rounds,
but the round loop stays explicit because stability, not the round count,
is the contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnmatchedTag
from .matcher import Superconcept
from .taxonomy import FacetedInterface, Portlet, normalize_label
from . import store as st

PRED_INTEREST = "interest"
PRED_KNOWS = "knows"


@dataclass(frozen=True)
class FoafProfile:
    """Interest labels (normalized like tags) and a directed friend list."""

    interests: frozenset[str] = frozenset()
    friends: frozenset[str] = frozenset()

    def __post_init__(self):
        for label in self.interests:
            if label != normalize_label(label):
                raise ValueError(f"interest {label!r} is not normalized")


@dataclass(frozen=True, order=True)
class User:
    id: str
    profile: FoafProfile = field(default=FoafProfile(), compare=False)

    def __post_init__(self):
        if not self.id.strip():
            raise ValueError("user id must be non-empty")


@dataclass(frozen=True)
class Community:
    users: frozenset[User]

    def __post_init__(self):
        if not self.users:
            raise ValueError("a community needs at least one user")
        ids = [u.id for u in self.users]
        if len(set(ids)) != len(ids):
            raise ValueError("user ids must be unique within a community")

    @property
    def size(self) -> int:
        return len(self.users)

    def member(self, user_id: str) -> User:
        for u in self.users:
            if u.id == user_id:
                return u
        raise KeyError(user_id)


def _superconcept_key(s: Superconcept) -> tuple[str, ...]:
    return tuple(sorted(m.concept_id for m in s.members))


@dataclass(frozen=True)
class ConstruedView:
    """One viewer's rendering of a portlet: a label per superconcept plus
    the faceted interface carrying those labels as tag facets."""

    viewer: str
    portlet: str
    label_assignment: dict[Superconcept, str]
    interface: FacetedInterface

    def __post_init__(self):
        for sc, label in self.label_assignment.items():
            if label not in sc.member_labels:
                raise ValueError(f"label {label!r} is not a member label of its superconcept")

    def labels(self) -> tuple[str, ...]:
        ordered = sorted(self.label_assignment, key=_superconcept_key)
        return tuple(self.label_assignment[sc] for sc in ordered)


def audience_label(s: Superconcept, p: FoafProfile, speaker_label: str) -> str:
    """Member label with maximal interest overlap; the speaker's label when
    nothing overlaps; ties break toward the lexicographically smaller label."""
    if speaker_label not in s.member_labels:
        raise ValueError(f"{speaker_label!r} is not a member label of the superconcept")
    best_overlap, best_label = -1, speaker_label
    for m in sorted(s.members):
        overlap = len(m.tag_context & p.interests)
        if overlap > best_overlap or (overlap == best_overlap and m.label < best_label):
            best_overlap, best_label = overlap, m.label
    if best_overlap <= 0:
        return speaker_label
    return best_label


def superconcept_for_tag(tag, superconcepts) -> Superconcept:
    """The class a tag resolved into: matched_tags membership first, then a
    plain member-label hit; deterministic pick among several candidates."""
    candidates = [s for s in superconcepts if tag in s.matched_tags]
    if not candidates:
        candidates = [s for s in superconcepts if tag.label in s.member_labels]
    if not candidates:
        raise UnmatchedTag(f"tag {tag.label!r} matches no superconcept")
    return min(candidates, key=_superconcept_key)


def _construed_interface(
    viewer_id: str, portlet: Portlet, assignment: dict[Superconcept, str]
) -> FacetedInterface:
    selections = set(portlet.facets)
    for sc in sorted(assignment, key=_superconcept_key):
        selections.add(("tag", assignment[sc]))
    return FacetedInterface(
        id=f"{portlet.id}/{viewer_id}",
        facet_selections=frozenset(selections),
        layout_slots=(portlet.id, *portlet.children),
    )


def _speaker_anchors(portlet: Portlet, superconcepts) -> dict[Superconcept, str]:
    """Per superconcept, the label the speaker wrote; when a learned match
    pulled in a tag whose label is not itself a member, the smallest member
    label stands in so every assigned label stays inside its class."""
    anchors: dict[Superconcept, str] = {}
    for tag in sorted(portlet.folksonomy):
        sc = superconcept_for_tag(tag, superconcepts)
        if sc not in anchors:
            anchors[sc] = tag.label if tag.label in sc.member_labels else min(sc.member_labels)
    return anchors


def construal_rounds(
    speaker: User,
    audience: frozenset[User] | set[User],
    portlet: Portlet,
    superconcepts,
) -> tuple[dict[str, dict[Superconcept, str]], int]:
    """Iterate label choices to stability; returns (assignments, rounds run).

    Everyone starts on the speaker's labels. Each round recomputes every
    audience member's per-superconcept choice; the speaker's never moves.
    """
    if any(u.id == speaker.id for u in audience):
        raise ValueError("the speaker cannot be in the audience")
    anchors = _speaker_anchors(portlet, superconcepts)
    viewers = sorted(audience)
    state: dict[str, dict[Superconcept, str]] = {
        u.id: dict(anchors) for u in (speaker, *viewers)
    }
    rounds = 0
    while True:
        rounds += 1
        nxt = {speaker.id: dict(anchors)}
        for u in viewers:
            nxt[u.id] = {
                sc: audience_label(sc, u.profile, anchor) for sc, anchor in anchors.items()
            }
        if nxt == state:
            return state, rounds
        state = nxt


def resolve_joint_interface(
    speaker: User,
    audience: frozenset[User] | set[User],
    portlet: Portlet,
    superconcepts,
) -> dict[str, ConstruedView]:
    """One ConstruedView per user (speaker included), at the fixpoint."""
    assignments, _ = construal_rounds(speaker, audience, portlet, superconcepts)
    views = {}
    for user_id, assignment in assignments.items():
        views[user_id] = ConstruedView(
            viewer=user_id,
            portlet=portlet.id,
            label_assignment=assignment,
            interface=_construed_interface(user_id, portlet, assignment),
        )
    return views


# --- store serialization -----------------------------------------------------

def profile_to_triples(user_id: str, profile: FoafProfile) -> list[st.Triple]:
    triples = []
    for interest in sorted(profile.interests):
        triples.append(st.spo(user_id, PRED_INTEREST, st.literal(interest)))
    for friend in sorted(profile.friends):
        triples.append(st.spo(user_id, PRED_KNOWS, friend))
    return triples


def users_from_store(s: st.TripleStore) -> dict[str, User]:
    """Users = subjects marked kind "user" plus any subject with FOAF triples."""
    from .taxonomy import PRED_KIND

    ids: set[str] = set()
    interests: dict[str, set[str]] = {}
    friends: dict[str, set[str]] = {}
    for t in s.snapshot():
        subj, pred, obj = t.subject.text, t.predicate.text, t.object.text
        if pred == PRED_KIND and obj == "user":
            ids.add(subj)
        elif pred == PRED_INTEREST:
            ids.add(subj)
            interests.setdefault(subj, set()).add(normalize_label(obj))
        elif pred == PRED_KNOWS:
            ids.add(subj)
            friends.setdefault(subj, set()).add(obj)
    return {
        uid: User(
            id=uid,
            profile=FoafProfile(
                interests=frozenset(interests.get(uid, ())),
                friends=frozenset(friends.get(uid, ())),
            ),
        )
        for uid in sorted(ids)
    }
