"""Built-in demonstration fixture: one speaker sharing a tagged car photo
with two audiences whose interests pull the label in different directions,
plus enough portlets, facets and navigation links to browse around.

`seed(state)` fills the store and drops three companion files next to it:
table2.csv (a scoring matrix), training.csv and learn.cfg (matcher
training inputs).
"""

from __future__ import annotations

from .state import AppState
from .. import matcher as mt
from .. import navigation as nav
from .. import store as st

TABLE_CSV = """\
task,Share a photo of a car between friends with same interest in cars
predictability,8,0.1
understandability,8,0.1
richness,5,0.5
comprehensibility,6,0.3
"""

TRAINING_CSV = """\
# near pairs are matches, cross-topic pairs are not
c:ferrari,c:ferrari358,1
c:sportcar,c:sportscar,1
c:ferrari,c:road,0
c:sportcar,c:lancia,0
c:expensivecar,c:road,0
c:ferrari358,c:lancia,0
"""

LEARN_CFG = """\
seed=7
learning_rate=0.1
epochs=1500
theta=0.35
beta=10
"""


def _concepts() -> mt.Ontology:
    def c(cid, label, *ctx):
        return mt.Concept(id=cid, label=label, tag_context=frozenset(ctx))

    concepts = {
        x.id: x
        for x in (
            c("c:ferrari", "ferrari", "ferrari", "car"),
            c("c:ferrari358", "ferrari 358", "ferrari", "car"),
            c("c:sportcar", "sport car", "sports", "car"),
            c("c:sportscar", "sports car", "sports", "car"),
            c("c:expensivecar", "expensive car", "luxury", "expensive", "car"),
            c("c:lancia", "lancia", "lancia", "car"),
            c("c:road", "road", "travel", "road"),
            c("c:car", "car", "car"),
        )
    }
    return mt.Ontology(
        concepts=concepts,
        equivalence_edges=frozenset(
            {("c:ferrari", "c:sportcar"), ("c:sportcar", "c:expensivecar")}
        ),
        broader_edges=frozenset(
            {("c:ferrari", "c:car"), ("c:sportcar", "c:car"), ("c:lancia", "c:car")}
        ),
    )


def seed(state: AppState) -> dict:
    """Idempotent: re-seeding an already seeded store changes nothing."""
    state.add_user("u0", interests=["cars"], friends=["a1", "a2"])
    state.add_user("a1", interests=["sports"])
    state.add_user("audienceA", interests=["sports"])
    state.add_user("a2", interests=["luxury"])
    state.add_user("audienceB", interests=["luxury"])

    state.store.insert_all(mt.ontology_to_triples(_concepts()))

    state.add_portlet(
        "p1a", kind="text", owner="u0", payload_ref="text:p1a-caption",
        facets=[("type", "caption")],
    )
    state.add_portlet(
        "p1b", kind="picture", owner="u0", payload_ref="img:ferrari-thumb.jpg",
        facets=[("type", "thumbnail")],
    )
    state.add_portlet(
        "p1", kind="picture", owner="u0", payload_ref="img:ferrari.jpg",
        tags=["ferrari"],
        facets=[("brand", "ferrari"), ("color", "red"), ("type", "photo")],
        children=["p1a", "p1b"],
    )
    state.add_portlet(
        "p2", kind="picture", owner="u0", payload_ref="img:road.jpg",
        tags=["road"],
        facets=[("brand", "lancia"), ("color", "blue"), ("type", "photo")],
    )
    state.add_portlet(
        "p3", kind="video", owner="a1", payload_ref="vid:lap.mp4",
        facets=[("brand", "ferrari"), ("color", "red"), ("type", "clip")],
    )

    # two distinct ways lead from home to p1 and to p2 on purpose
    graph = nav.NavGraph(
        nodes=frozenset(
            {"home", "cars", "sports", "luxury", "p1", "p2", "p3"}
        ),
        links=frozenset(
            {
                ("home", "cars"),
                ("home", "sports"),
                ("home", "luxury"),
                ("cars", "p1"),
                ("sports", "p1"),
                ("cars", "p2"),
                ("luxury", "p2"),
                ("cars", "p3"),
            }
        ),
    )
    state.store.insert_all(nav.navgraph_to_triples(graph))
    state.save()

    base = state.path.parent
    (base / "table2.csv").write_text(TABLE_CSV, encoding="utf-8")
    (base / "training.csv").write_text(TRAINING_CSV, encoding="utf-8")
    (base / "learn.cfg").write_text(LEARN_CFG, encoding="utf-8")

    return {
        "store": str(state.path),
        "triples": len(state.store.snapshot()),
        "users": 5,
        "portlets": 5,
        "files": ["table2.csv", "training.csv", "learn.cfg"],
    }
