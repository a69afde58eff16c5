"""Faceted navigation: conjunctive filtering, zoom grouping, and path planning.

A View is a universe of portlets narrowed by facet constraints (all must
hold) and optionally grouped by a stack of zoomed facets. Zoom only groups,
it never drops members, so popping the stack restores the previous view
exactly. Path planning over the navigation graph returns the shortest way
to the nearest goal; the node already stood on is not part of the answer.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import AlreadyZoomed, EmptyZoomStack, Unreachable, UnknownNode
from . import store as st

PRED_LINKS_TO = "linksTo"
NAVNODE_KIND = "navnode"


@dataclass(frozen=True)
class NavGraph:
    """Directed graph of content nodes; parallel edges collapse by set semantics."""

    nodes: frozenset[str]
    links: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        for a, b in self.links:
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"link ({a!r}, {b!r}) references a missing node")

    def successors(self, node: str) -> list[str]:
        return sorted(b for a, b in self.links if a == node)

    def predecessors(self, node: str) -> list[str]:
        return sorted(a for a, b in self.links if b == node)


@dataclass(frozen=True)
class View:
    """Universe of portlet ids + conjunctive facet constraints + zoom stack.

    The catalog maps each portlet to its facet pairs so membership is
    computable without reaching back to a store.
    """

    universe: frozenset[str]
    catalog: dict[str, frozenset[tuple[str, str]]]
    constraints: frozenset[tuple[str, str]] = frozenset()
    zoom_stack: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.zoom_stack)) != len(self.zoom_stack):
            raise ValueError("zoom stack entries must be distinct")

    def members(self) -> frozenset[str]:
        """Portlets satisfying every constraint."""
        out = []
        for pid in self.universe:
            facets = self.catalog.get(pid, frozenset())
            if all(c in facets for c in self.constraints):
                out.append(pid)
        return frozenset(out)


def view_from_portlets(portlets) -> View:
    """Fresh unconstrained view over a portlet collection (iterable or mapping)."""
    items = portlets.values() if hasattr(portlets, "values") else portlets
    catalog = {p.id: frozenset(p.facets) for p in items}
    return View(universe=frozenset(catalog), catalog=catalog)


def filter(v: View, facet_name: str, value: str) -> View:  # noqa: A001 - domain term
    """Add one constraint; never enlarges membership."""
    return View(
        universe=v.universe,
        catalog=v.catalog,
        constraints=v.constraints | {(facet_name, value)},
        zoom_stack=v.zoom_stack,
    )


def zoom(v: View, facet_name: str) -> View:
    if facet_name in v.zoom_stack:
        raise AlreadyZoomed(f"already zoomed on {facet_name!r}")
    return View(
        universe=v.universe,
        catalog=v.catalog,
        constraints=v.constraints,
        zoom_stack=v.zoom_stack + (facet_name,),
    )


def unzoom(v: View) -> View:
    if not v.zoom_stack:
        raise EmptyZoomStack("nothing to unzoom")
    return View(
        universe=v.universe,
        catalog=v.catalog,
        constraints=v.constraints,
        zoom_stack=v.zoom_stack[:-1],
    )


def zoom_groups(v: View) -> dict[str, frozenset[str]]:
    """Members grouped by their value of the innermost zoomed facet.

    Members lacking that facet are not grouped (they remain reachable
    through members()). Without a zoom, everything lands in one group.
    """
    if not v.zoom_stack:
        return {"": v.members()}
    facet = v.zoom_stack[-1]
    groups: dict[str, set[str]] = {}
    for pid in v.members():
        for name, value in v.catalog.get(pid, frozenset()):
            if name == facet:
                groups.setdefault(value, set()).add(pid)
    return {value: frozenset(members) for value, members in groups.items()}


def plan_won(g: NavGraph, start: str, goals) -> list[str]:
    """Shortest forward path to the nearest goal, excluding the start node.

    Among equal-length paths the lexicographically smallest node sequence
    wins. Distances come from a reverse breadth-first sweep out of the
    goal set; the forward walk then always steps to the smallest successor
    that is one step closer.
    """
    goals = frozenset(goals)
    if start not in g.nodes:
        raise UnknownNode(f"unknown start node {start!r}")
    if not goals:
        raise ValueError("goals must be non-empty")
    for goal in goals:
        if goal not in g.nodes:
            raise UnknownNode(f"unknown goal node {goal!r}")
    if start in goals:
        return []

    dist = {goal: 0 for goal in goals}
    queue = deque(sorted(goals))
    while queue:
        node = queue.popleft()
        for prev in g.predecessors(node):
            if prev not in dist:
                dist[prev] = dist[node] + 1
                queue.append(prev)
    if start not in dist:
        raise Unreachable(f"no goal reachable from {start!r}")

    path, node = [], start
    while node not in goals:
        node = min(m for m in g.successors(node) if dist.get(m) == dist[node] - 1)
        path.append(node)
    return path


def profile_prefilter(
    g: NavGraph,
    node_interests: dict[str, frozenset[str]],
    interests: frozenset[str],
    keep: frozenset[str] = frozenset(),
) -> NavGraph:
    """Optional planning pre-pass: drop nodes sharing no interest with the
    profile, except those explicitly kept (start and goal nodes usually).
    Nodes absent from node_interests are neutral and survive."""
    kept = set()
    for node in g.nodes:
        tags = node_interests.get(node)
        if node in keep or tags is None or tags & interests:
            kept.add(node)
    return NavGraph(
        nodes=frozenset(kept),
        links=frozenset((a, b) for a, b in g.links if a in kept and b in kept),
    )


# --- hierarchical baseline ----------------------------------------------------

@dataclass(frozen=True)
class Breadcrumb:
    trail: tuple[str, ...]

    def __post_init__(self):
        if not self.trail:
            raise ValueError("a breadcrumb trail must be non-empty")


@dataclass(frozen=True)
class Hierarchy:
    """Tree as child-to-parent pointers beneath a single root."""

    root: str
    parent: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.root in self.parent:
            raise ValueError("the root cannot have a parent")
        for child, par in self.parent.items():
            seen = {child}
            node = par
            while node != self.root:
                if node in seen:
                    raise ValueError(f"cycle in hierarchy at {node!r}")
                if node not in self.parent:
                    raise ValueError(f"parent {node!r} is not connected to the root")
                seen.add(node)
                node = self.parent[node]

    @property
    def nodes(self) -> frozenset[str]:
        return frozenset(self.parent) | {self.root}


def breadcrumb_path(hierarchy: Hierarchy, node: str) -> Breadcrumb:
    """The unique root-to-node trail of the tree."""
    if node not in hierarchy.nodes:
        raise UnknownNode(f"{node!r} is not in the hierarchy")
    trail = [node]
    while node != hierarchy.root:
        node = hierarchy.parent[node]
        trail.append(node)
    return Breadcrumb(trail=tuple(reversed(trail)))


# --- store serialization --------------------------------------------------------

def navgraph_to_triples(g: NavGraph) -> list[st.Triple]:
    from .taxonomy import PRED_KIND

    triples = [st.spo(node, PRED_KIND, st.literal(NAVNODE_KIND)) for node in sorted(g.nodes)]
    triples += [st.spo(a, PRED_LINKS_TO, b) for a, b in sorted(g.links)]
    return triples


def navgraph_from_store(s: st.TripleStore) -> NavGraph:
    from .taxonomy import PRED_KIND

    nodes: set[str] = set()
    links: set[tuple[str, str]] = set()
    for t in s.snapshot():
        subj, pred, obj = t.subject.text, t.predicate.text, t.object.text
        if pred == PRED_KIND and obj == NAVNODE_KIND:
            nodes.add(subj)
        elif pred == PRED_LINKS_TO:
            nodes.add(subj)
            nodes.add(obj)
            links.add((subj, obj))
    return NavGraph(nodes=frozenset(nodes), links=frozenset(links))
