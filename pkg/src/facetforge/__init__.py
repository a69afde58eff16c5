"""facetforge: a collaborative faceted content engine.

Content lives in an embedded triple store. Users tag portlets freely;
tags match into a domain ontology through rules and a learned weighted
dissimilarity, forming superconcepts (classes of interchangeable labels).
Viewers then see the label closest to their own interests, and navigate
the collection by conjunctive facet filtering, zoom grouping, and
shortest-path planning. An HTTP JSON service and a CLI expose the engine.
"""

from .errors import (
    AlreadyZoomed,
    BadWeights,
    CyclicPortlet,
    DegenerateTraining,
    DimensionMismatch,
    DuplicatePortlet,
    EmptyLabel,
    EmptyMatrix,
    EmptyQuery,
    EmptyZoomStack,
    FacetForgeError,
    IoFailure,
    MalformedTerm,
    NotFound,
    ParseError,
    PortInUse,
    StorageUnavailable,
    UnknownNode,
    UnmatchedTag,
    Unreachable,
)
from .store import BindingSet, Term, Triple, TripleStore, iri, literal, spo, var
from .taxonomy import (
    FacetPair,
    FacetedInterface,
    FacetedTaxonomy,
    Portlet,
    Tag,
    attach_pair,
    compose_interface,
    create_tag,
    facet_histogram,
    normalize_label,
)
from .matcher import (
    Concept,
    ConceptVector,
    DissimilarityWeights,
    LearningConfig,
    Ontology,
    Superconcept,
    TrainingResult,
    apply_rules,
    dissimilarity,
    form_superconcepts,
    learn_weights,
    vectorize,
)
from .jointmeaning import (
    Community,
    ConstruedView,
    FoafProfile,
    User,
    audience_label,
    resolve_joint_interface,
)
from .navigation import (
    Breadcrumb,
    Hierarchy,
    NavGraph,
    View,
    breadcrumb_path,
    filter,
    plan_won,
    unzoom,
    view_from_portlets,
    zoom,
)
from .evaluation import Attribute, EvaluationMatrix, matrix_from_csv, score_task

__version__ = "0.1.0"

__all__ = [
    "AlreadyZoomed", "BadWeights", "CyclicPortlet", "DegenerateTraining",
    "DimensionMismatch", "DuplicatePortlet", "EmptyLabel", "EmptyMatrix",
    "EmptyQuery", "EmptyZoomStack", "FacetForgeError", "IoFailure",
    "MalformedTerm", "NotFound", "ParseError", "PortInUse",
    "StorageUnavailable", "UnknownNode", "UnmatchedTag", "Unreachable",
    "BindingSet", "Term", "Triple", "TripleStore", "iri", "literal", "spo", "var",
    "FacetPair", "FacetedInterface", "FacetedTaxonomy", "Portlet", "Tag",
    "attach_pair", "compose_interface", "create_tag", "facet_histogram",
    "normalize_label",
    "Concept", "ConceptVector", "DissimilarityWeights", "LearningConfig",
    "Ontology", "Superconcept", "TrainingResult", "apply_rules",
    "dissimilarity", "form_superconcepts", "learn_weights", "vectorize",
    "Community", "ConstruedView", "FoafProfile", "User", "audience_label",
    "resolve_joint_interface",
    "Breadcrumb", "Hierarchy", "NavGraph", "View", "breadcrumb_path",
    "filter", "plan_won", "unzoom", "view_from_portlets", "zoom",
    "Attribute", "EvaluationMatrix", "matrix_from_csv", "score_task",
    "__version__",
]
