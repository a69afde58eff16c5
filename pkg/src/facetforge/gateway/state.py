"""Shared application state behind both the HTTP service and the CLI.

Everything lives in one triple-store file (env FACETFORGE_DATA). Users,
concepts, portlets and navigation nodes share the file, told apart by
their predicates and `kind` markers. Learned matcher weights persist in
the same file under the reserved subject `sys:matcher`, so a `learn` run
survives restarts. Both entry points call the same methods here, which is
what keeps HTTP and CLI behavior identical.
"""

from __future__ import annotations

import threading
from pathlib import Path

from .. import evaluation as ev
from .. import jointmeaning as jm
from .. import matcher as mt
from .. import navigation as nav
from .. import store as st
from .. import taxonomy as tx
from ..errors import NotFound

DEFAULT_DATA = "facetforge.nt"
DEFAULT_PORT = 8080

WEIGHTS_SUBJECT = "sys:matcher"
PRED_WEIGHT = "weight_"
PRED_THRESHOLD = "threshold"


def superconcept_to_dict(s: mt.Superconcept) -> dict:
    return {
        "members": [
            {
                "concept": m.concept_id,
                "label": m.label,
                "tag_context": sorted(m.tag_context),
            }
            for m in sorted(s.members)
        ],
        "labels": sorted(s.member_labels),
        "matched_tags": sorted(t.label for t in s.matched_tags),
    }


class AppState:
    """One store file plus per-user in-memory browse sessions."""

    def __init__(self, data_path: str | Path = DEFAULT_DATA):
        self.path = Path(data_path)
        self.store = st.restore(self.path) if self.path.exists() else st.TripleStore()
        self._sessions: dict[str, tuple[int, nav.View]] = {}
        self._lock = threading.Lock()

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        st.persist(self.store, self.path)

    # --- ingestion -------------------------------------------------------

    def ingest_text(self, text: str) -> int:
        added = sum(self.store.insert(t) for t in st.parse_ntriples(text).snapshot())
        self.save()
        return added

    def add_user(self, user_id: str, interests=(), friends=()) -> jm.User:
        profile = jm.FoafProfile(
            interests=frozenset(tx.normalize_label(i) for i in interests),
            friends=frozenset(friends),
        )
        user = jm.User(id=user_id, profile=profile)
        self.store.insert(st.spo(user_id, tx.PRED_KIND, st.literal("user")))
        self.store.insert_all(jm.profile_to_triples(user_id, profile))
        self.save()
        return user

    def add_portlet(
        self,
        portlet_id: str,
        kind: str,
        owner: str,
        payload_ref: str = "",
        tags=(),
        facets=(),
        children=(),
    ) -> tx.Portlet:
        facet_pairs = facets.items() if hasattr(facets, "items") else facets
        portlet = tx.Portlet(
            id=portlet_id,
            kind=kind,
            payload_ref=payload_ref,
            folksonomy=frozenset(tx.create_tag(t, owner) for t in tags),
            facets=frozenset((str(n), str(v)) for n, v in facet_pairs),
            children=tuple(children),
        )
        current = tx.portlets_from_store(self.store)
        current[portlet.id] = portlet
        tx.ensure_acyclic(current.values())
        self.store.insert_all(tx.portlet_to_triples(portlet))
        self.store.insert(st.spo(portlet_id, tx.PRED_OWNED_BY, owner))
        self.save()
        return portlet

    def add_tag(self, portlet_id: str, raw_label: str, owner: str) -> tx.Tag:
        if portlet_id not in tx.portlets_from_store(self.store):
            raise NotFound(f"unknown portlet {portlet_id!r}")
        tag = tx.create_tag(raw_label, owner)
        self.store.insert(st.spo(portlet_id, tx.PRED_HAS_TAG, st.literal(tag.label)))
        self.store.insert(st.spo(f"tag:{tag.label}", tx.PRED_OWNED_BY, tag.owner))
        self.save()
        return tag

    def users(self) -> dict[str, jm.User]:
        return jm.users_from_store(self.store)

    # --- matching --------------------------------------------------------

    def ontology(self) -> mt.Ontology:
        return mt.ontology_from_store(self.store)

    def stored_weights(self) -> tuple[mt.DissimilarityWeights | None, float]:
        """(weights, threshold) as persisted by learn(); defaults otherwise."""
        raw: dict[int, float] = {}
        threshold = mt.LearningConfig().theta
        for t in self.store.snapshot():
            if t.subject.text != WEIGHTS_SUBJECT:
                continue
            if t.predicate.text.startswith(PRED_WEIGHT):
                raw[int(t.predicate.text[len(PRED_WEIGHT):])] = float(t.object.text)
            elif t.predicate.text == PRED_THRESHOLD:
                threshold = float(t.object.text)
        if not raw:
            return None, threshold
        values = tuple(raw[i] for i in range(len(raw)))
        return mt.DissimilarityWeights(values), threshold

    def learn(self, training_text: str, config_text: str = "") -> mt.TrainingResult:
        ontology = self.ontology()
        pairs = mt.load_training_pairs(training_text, ontology)
        config = mt.load_learning_config(config_text)
        result = mt.learn_weights(pairs, config)
        with self._lock:
            for t in [t for t in self.store.snapshot() if t.subject.text == WEIGHTS_SUBJECT]:
                self.store.remove(t)
            for i, value in enumerate(result.weights.values):
                self.store.insert(
                    st.spo(WEIGHTS_SUBJECT, f"{PRED_WEIGHT}{i}", st.literal(repr(value)))
                )
            self.store.insert(
                st.spo(WEIGHTS_SUBJECT, PRED_THRESHOLD, st.literal(repr(result.threshold)))
            )
            self.save()
        return result

    def superconcepts(self) -> list[mt.Superconcept]:
        weights, threshold = self.stored_weights()
        portlets = tx.portlets_from_store(self.store)
        taxonomy = tx.taxonomy_from_portlets(portlets.values())
        found = mt.form_superconcepts(
            taxonomy, self.ontology(), weights=weights, theta=threshold
        )
        return sorted(found, key=lambda s: tuple(sorted(m.concept_id for m in s.members)))

    def match_tag(self, raw_label: str) -> list[tuple[str, float]]:
        tag = tx.create_tag(raw_label, owner="query")
        return mt.apply_rules(tag, self.ontology())

    # --- joint meaning -----------------------------------------------------

    def portlet_owner(self, portlet_id: str) -> str | None:
        results = self.store.query(
            [st.Triple(st.iri(portlet_id), st.iri(tx.PRED_OWNED_BY), st.var("o"))]
        )
        owners = sorted(row["o"].text for row in results)
        return owners[0] if owners else None

    def resolve(self, viewer_id: str, portlet_id: str, speaker_id: str | None = None) -> dict:
        portlets = tx.portlets_from_store(self.store)
        if portlet_id not in portlets:
            raise NotFound(f"unknown portlet {portlet_id!r}")
        portlet = portlets[portlet_id]
        users = jm.users_from_store(self.store)
        if viewer_id not in users:
            raise NotFound(f"unknown user {viewer_id!r}")
        speaker_id = speaker_id or self.portlet_owner(portlet_id)
        if speaker_id is None or speaker_id not in users:
            raise NotFound(f"portlet {portlet_id!r} has no known owner")
        speaker = users[speaker_id]
        audience = frozenset(u for uid, u in users.items() if uid != speaker_id)
        views = jm.resolve_joint_interface(speaker, audience, portlet, self.superconcepts())
        if viewer_id not in views:
            raise NotFound(f"no view for user {viewer_id!r}")
        view = views[viewer_id]
        labels = list(view.labels())
        ordered = sorted(view.label_assignment, key=lambda s: sorted(m.concept_id for m in s.members))
        return {
            "viewer": viewer_id,
            "speaker": speaker_id,
            "portlet": portlet_id,
            "label": labels[0] if labels else "",
            "labels": labels,
            "assignment": [
                {
                    "superconcept": superconcept_to_dict(sc),
                    "label": view.label_assignment[sc],
                }
                for sc in ordered
            ],
            "interface": {
                "id": view.interface.id,
                "facets": sorted([n, v] for n, v in view.interface.facet_selections),
                "slots": list(view.interface.layout_slots),
            },
        }

    # --- browsing sessions ---------------------------------------------------

    def _fresh_view(self) -> nav.View:
        return nav.view_from_portlets(tx.portlets_from_store(self.store).values())

    def session_view(self, user_id: str) -> nav.View:
        """The user's current browse view; content changes refresh the
        catalog but keep the user's constraints and zoom stack."""
        with self._lock:
            revision = self.store.revision
            held = self._sessions.get(user_id)
            if held and held[0] == revision:
                return held[1]
            fresh = self._fresh_view()
            if held:
                fresh = nav.View(
                    universe=fresh.universe,
                    catalog=fresh.catalog,
                    constraints=held[1].constraints,
                    zoom_stack=held[1].zoom_stack,
                )
            self._sessions[user_id] = (revision, fresh)
            return fresh

    def _put_session(self, user_id: str, view: nav.View) -> nav.View:
        with self._lock:
            self._sessions[user_id] = (self.store.revision, view)
        return view

    def filter_view(self, user_id: str, facet: str, value: str) -> nav.View:
        return self._put_session(user_id, nav.filter(self.session_view(user_id), facet, value))

    def zoom_view(self, user_id: str, facet: str) -> nav.View:
        return self._put_session(user_id, nav.zoom(self.session_view(user_id), facet))

    def unzoom_view(self, user_id: str) -> nav.View:
        return self._put_session(user_id, nav.unzoom(self.session_view(user_id)))

    def reset_view(self, user_id: str) -> nav.View:
        return self._put_session(user_id, self._fresh_view())

    def view_payload(self, view: nav.View) -> dict:
        """JSON shape for a browse view: members, sidebar histograms, groups."""
        portlets = tx.portlets_from_store(self.store)
        members = sorted(view.members())
        member_portlets = [portlets[pid] for pid in members if pid in portlets]
        facet_names = sorted({n for p in member_portlets for n, _ in p.facets})
        histograms = {
            name: tx.facet_histogram(member_portlets, name) for name in facet_names
        }
        return {
            "members": members,
            "constraints": sorted([n, v] for n, v in view.constraints),
            "zoom_stack": list(view.zoom_stack),
            "histograms": histograms,
            "groups": {
                value: sorted(ids) for value, ids in sorted(nav.zoom_groups(view).items())
            },
            "portlets": [
                {
                    "id": p.id,
                    "kind": p.kind,
                    "payload_ref": p.payload_ref,
                    "tags": sorted(t.label for t in p.folksonomy),
                    "facets": sorted([n, v] for n, v in p.facets),
                    "children": list(p.children),
                }
                for p in member_portlets
            ],
        }

    # --- navigation and scoring -------------------------------------------------

    def navigate(self, start: str, goals) -> list[str]:
        return nav.plan_won(nav.navgraph_from_store(self.store), start, goals)

    def evaluate_matrix(self, matrix: ev.EvaluationMatrix) -> dict:
        average, weighted = ev.score_task(matrix)
        return {
            "task": matrix.task,
            "average": average,
            "weighted": weighted,
            "per_attribute": {
                attr.name: value
                for attr, value in zip(matrix.attributes, ev.per_attribute_weighted(matrix))
            },
        }

    def evaluate_csv(self, text: str) -> dict:
        return self.evaluate_matrix(ev.matrix_from_csv(text))
