"""Superconcept Formation System: learnable weighted-dissimilarity tag/concept matching.

Concepts are projected onto one representation per semantic dimension
(label text, tag-set context, numeric features by default). The distance
between two concepts is the weighted sum of per-dimension dissimilarities,
each bounded in [0, 1]. Weights live on the probability simplex and are
learned from labeled concept pairs by gradient descent on cross-entropy,
with the match probability

    p = sigmoid(beta * (threshold - sum_i w_i * delta_i))

and the simplex maintained through a softmax parameterization. Rule-based
pre-matching (exact label, one equivalence hop) complements the learned
distance, and superconcepts are the equivalence classes generated by
equivalence edges, shared rule matches, and below-threshold dissimilarity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateTraining, DimensionMismatch, ParseError
from .taxonomy import FacetedTaxonomy, Tag, normalize_label
from . import store as st

# Reserved predicates for ontology serialization.
PRED_LABEL = "label"
PRED_EQUIVALENT = "equivalentTo"
PRED_BROADER = "broader"
PRED_FEATURE = "feature_"  # feature_<i> with a float literal
PRED_CONTEXT = "hasTag"    # concept tag context reuses the taxonomy predicate

WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True, order=True)
class Concept:
    id: str
    label: str
    tag_context: frozenset[str] = frozenset()
    numeric_features: tuple[float, ...] = ()


@dataclass(frozen=True)
class ConceptVector:
    """Per-dimension representations of one concept."""

    label_repr: str
    tagset_repr: frozenset[str]
    numeric_repr: tuple[float, ...]


def vectorize(c: Concept) -> ConceptVector:
    """Deterministic projection; equal concepts yield equal vectors."""
    return ConceptVector(
        label_repr=c.label,
        tagset_repr=frozenset(c.tag_context),
        numeric_repr=tuple(float(x) for x in c.numeric_features),
    )


# --- per-dimension dissimilarities (each bounded in [0, 1]) -----------------

def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def label_dissimilarity(a: ConceptVector, b: ConceptVector) -> float:
    """Edit distance normalized by the longer label length."""
    if not a.label_repr and not b.label_repr:
        return 0.0
    return levenshtein(a.label_repr, b.label_repr) / max(len(a.label_repr), len(b.label_repr))


def tagset_dissimilarity(a: ConceptVector, b: ConceptVector) -> float:
    """Jaccard complement of the tag contexts."""
    if not a.tagset_repr and not b.tagset_repr:
        return 0.0
    union = a.tagset_repr | b.tagset_repr
    inter = a.tagset_repr & b.tagset_repr
    return 1.0 - len(inter) / len(union)


def numeric_dissimilarity(a: ConceptVector, b: ConceptVector) -> float:
    """Euclidean distance normalized by the sum of norms (bounded by the
    triangle inequality). A side with no features contributes nothing."""
    x, y = a.numeric_repr, b.numeric_repr
    if not x or not y:
        return 0.0
    if len(x) != len(y):
        raise DimensionMismatch(f"feature lengths differ: {len(x)} vs {len(y)}")
    nx = math.sqrt(sum(v * v for v in x))
    ny = math.sqrt(sum(v * v for v in y))
    if nx + ny == 0.0:
        return 0.0
    d = math.sqrt(sum((u - v) ** 2 for u, v in zip(x, y)))
    return min(1.0, d / (nx + ny))


Dimension = Callable[[ConceptVector, ConceptVector], float]

DEFAULT_DIMENSIONS: tuple[Dimension, ...] = (
    label_dissimilarity,
    tagset_dissimilarity,
    numeric_dissimilarity,
)


@dataclass(frozen=True)
class DissimilarityWeights:
    """Non-negative per-dimension weights summing to 1 (within 1e-9)."""

    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise DimensionMismatch("weights must have at least one entry")
        if any(v < 0 for v in self.values):
            raise ValueError(f"negative weight in {self.values}")
        if abs(sum(self.values) - 1.0) > WEIGHT_TOLERANCE:
            raise ValueError(f"weights must sum to 1, got {sum(self.values)!r}")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @classmethod
    def from_raw(cls, raw: Sequence[float]) -> "DissimilarityWeights":
        """Normalize non-negative raw parameters; invariant under uniform scaling."""
        if any(v < 0 for v in raw):
            raise ValueError("raw weight parameters must be non-negative")
        total = float(sum(raw))
        if total <= 0:
            raise ValueError("raw weight parameters must not all be zero")
        return cls(tuple(float(v) / total for v in raw))

    @classmethod
    def uniform(cls, n: int = len(DEFAULT_DIMENSIONS)) -> "DissimilarityWeights":
        return cls(tuple(1.0 / n for _ in range(n)))


def dimension_deltas(
    a: ConceptVector, b: ConceptVector,
    dimensions: Sequence[Dimension] = DEFAULT_DIMENSIONS,
) -> tuple[float, ...]:
    return tuple(dim(a, b) for dim in dimensions)


def dissimilarity(
    a: ConceptVector,
    b: ConceptVector,
    w: DissimilarityWeights,
    dimensions: Sequence[Dimension] = DEFAULT_DIMENSIONS,
) -> float:
    """Weighted sum of per-dimension dissimilarities; symmetric, 0 on equal inputs."""
    if len(w) != len(dimensions):
        raise DimensionMismatch(f"{len(w)} weights for {len(dimensions)} dimensions")
    return float(sum(wi * di for wi, di in zip(w, dimension_deltas(a, b, dimensions))))


# --- ontology ----------------------------------------------------------------

@dataclass(frozen=True)
class Ontology:
    """Domain concepts with symmetric equivalence edges and acyclic broader edges."""

    concepts: dict[str, Concept]
    equivalence_edges: frozenset[tuple[str, str]] = frozenset()
    broader_edges: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        for a, b in self.equivalence_edges | self.broader_edges:
            for cid in (a, b):
                if cid not in self.concepts:
                    raise ValueError(f"edge references unknown concept {cid!r}")
        # symmetric closure of equivalence
        closed = set(self.equivalence_edges)
        closed |= {(b, a) for a, b in self.equivalence_edges}
        object.__setattr__(self, "equivalence_edges", frozenset(closed))
        self._check_broader_acyclic()

    def _check_broader_acyclic(self) -> None:
        succ: dict[str, list[str]] = {}
        for a, b in self.broader_edges:
            succ.setdefault(a, []).append(b)
        WHITE, GREY, BLACK = 0, 1, 2
        state = {cid: WHITE for cid in self.concepts}

        def visit(cid: str) -> None:
            state[cid] = GREY
            for nxt in succ.get(cid, ()):
                if state[nxt] == GREY:
                    raise ValueError(f"broader edges contain a cycle through {nxt!r}")
                if state[nxt] == WHITE:
                    visit(nxt)
            state[cid] = BLACK

        for cid in self.concepts:
            if state[cid] == WHITE:
                visit(cid)

    def equivalents(self, cid: str) -> frozenset[str]:
        return frozenset(b for a, b in self.equivalence_edges if a == cid)


def ontology_from_store(s: st.TripleStore) -> Ontology:
    """Build the ontology from `label`/`equivalentTo`/`broader`/`feature_<i>`
    triples (subjects carrying a `label` are concepts; `hasTag` adds context)."""
    labels: dict[str, str] = {}
    contexts: dict[str, set[str]] = {}
    features: dict[str, dict[int, float]] = {}
    equiv: set[tuple[str, str]] = set()
    broader: set[tuple[str, str]] = set()

    for t in s.snapshot():
        subj, pred, obj = t.subject.text, t.predicate.text, t.object.text
        if pred == PRED_LABEL:
            labels[subj] = normalize_label(obj)
        elif pred == PRED_EQUIVALENT:
            equiv.add((subj, obj))
        elif pred == PRED_BROADER:
            broader.add((subj, obj))
        elif pred.startswith(PRED_FEATURE):
            try:
                index = int(pred[len(PRED_FEATURE):])
                features.setdefault(subj, {})[index] = float(obj)
            except ValueError:
                continue
        elif pred == PRED_CONTEXT:
            contexts.setdefault(subj, set()).add(normalize_label(obj))

    dim = 0
    for per_concept in features.values():
        dim = max(dim, max(per_concept) + 1)

    concepts = {}
    for cid, label in labels.items():
        vec = tuple(features.get(cid, {}).get(i, 0.0) for i in range(dim))
        concepts[cid] = Concept(
            id=cid,
            label=label,
            tag_context=frozenset(contexts.get(cid, ()) ),
            numeric_features=vec,
        )
    equiv = {(a, b) for a, b in equiv if a in concepts and b in concepts}
    broader = {(a, b) for a, b in broader if a in concepts and b in concepts}
    return Ontology(concepts, frozenset(equiv), frozenset(broader))


def ontology_to_triples(o: Ontology) -> list[st.Triple]:
    triples = []
    for c in sorted(o.concepts.values()):
        triples.append(st.spo(c.id, PRED_LABEL, st.literal(c.label)))
        for tag in sorted(c.tag_context):
            triples.append(st.spo(c.id, PRED_CONTEXT, st.literal(tag)))
        for i, value in enumerate(c.numeric_features):
            triples.append(st.spo(c.id, f"{PRED_FEATURE}{i}", st.literal(repr(value))))
    for a, b in sorted(o.equivalence_edges):
        if a < b:  # one direction suffices, closure restores symmetry
            triples.append(st.spo(a, PRED_EQUIVALENT, b))
    for a, b in sorted(o.broader_edges):
        triples.append(st.spo(a, PRED_BROADER, b))
    return triples


# --- rule-based pre-matching ---------------------------------------------------

EXACT_CONFIDENCE = 1.0
EQUIVALENT_CONFIDENCE = 0.9


def apply_rules(tag: Tag, ontology: Ontology) -> list[tuple[str, float]]:
    """Exact label matches at 1.0, one-hop equivalents of those at 0.9,
    sorted by confidence then concept id."""
    confidence: dict[str, float] = {}
    exact = [c.id for c in ontology.concepts.values() if c.label == tag.label]
    for cid in exact:
        confidence[cid] = EXACT_CONFIDENCE
    for cid in exact:
        for neighbor in ontology.equivalents(cid):
            if confidence.get(neighbor, 0.0) < EQUIVALENT_CONFIDENCE:
                confidence[neighbor] = EQUIVALENT_CONFIDENCE
    return sorted(confidence.items(), key=lambda kv: (-kv[1], kv[0]))


# --- weight learning -----------------------------------------------------------

@dataclass(frozen=True)
class LearningConfig:
    seed: int = 7
    learning_rate: float = 0.1
    epochs: int = 3000
    theta: float = 0.35
    beta: float = 10.0
    holdout_fraction: float = 0.25


@dataclass(frozen=True)
class TrainingResult:
    weights: DissimilarityWeights
    threshold: float
    train_accuracy: float
    heldout_accuracy: float
    final_loss: float


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def _sigmoid(u: np.ndarray) -> np.ndarray:
    return np.where(u >= 0, 1.0 / (1.0 + np.exp(-u)), np.exp(u) / (1.0 + np.exp(u)))


def loss_and_gradient(
    params: np.ndarray, deltas: np.ndarray, labels: np.ndarray, beta: float
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy of p = sigmoid(beta*(theta0 - w.delta)), w = softmax(z).

    ``params`` packs [z_0..z_{d-1}, theta0]; returns (loss, d loss/d params).
    """
    z, theta0 = params[:-1], params[-1]
    w = _softmax(z)
    n = deltas.shape[0]
    u = beta * (theta0 - deltas @ w)
    p = _sigmoid(u)
    # cross-entropy in logits form: -log sigmoid(u) = softplus(-u), stable
    # for large |u| and exactly differentiable (d/du = p - y)
    loss = float(
        np.mean(labels * np.logaddexp(0.0, -u) + (1 - labels) * np.logaddexp(0.0, u))
    )
    du = (p - labels) / n                      # d loss / d u, per sample
    g_theta0 = beta * du.sum()
    g_w = -beta * (deltas.T @ du)              # d loss / d w
    g_z = w * (g_w - float(g_w @ w))           # softmax Jacobian applied to g_w
    return loss, np.concatenate([g_z, [g_theta0]])


def pair_deltas(
    pairs: Sequence[tuple[Concept, Concept]],
    dimensions: Sequence[Dimension] = DEFAULT_DIMENSIONS,
) -> np.ndarray:
    return np.array(
        [dimension_deltas(vectorize(a), vectorize(b), dimensions) for a, b in pairs],
        dtype=np.float64,
    )


def fit_weights(
    deltas: np.ndarray, labels: np.ndarray, config: LearningConfig
) -> tuple[DissimilarityWeights, float, float]:
    """Full-batch gradient descent; returns (weights, threshold, final loss).

    Steps that would increase the loss are halved until they do not
    (backtracking), so any positive learning rate converges; beta scales
    the curvature, which is what makes a fixed rate unsafe on its own.
    """
    rng = np.random.default_rng(config.seed)
    d = deltas.shape[1]
    params = np.concatenate([rng.normal(0.0, 0.01, size=d), [config.theta]])
    loss, grad = loss_and_gradient(params, deltas, labels, config.beta)
    for _ in range(config.epochs):
        step = config.learning_rate
        while True:
            candidate = params - step * grad
            new_loss, new_grad = loss_and_gradient(candidate, deltas, labels, config.beta)
            if new_loss <= loss or step < 1e-12:
                break
            step *= 0.5
        params, loss, grad = candidate, new_loss, new_grad
    w = _softmax(params[:-1])
    weights = DissimilarityWeights(tuple(float(v) for v in w))
    return weights, float(params[-1]), loss


def classify(
    deltas: np.ndarray, weights: DissimilarityWeights, threshold: float
) -> np.ndarray:
    return (deltas @ np.array(weights.values) < threshold).astype(np.float64)


def learn_weights(
    training: Sequence[tuple[Concept, Concept, bool]],
    config: LearningConfig = LearningConfig(),
    dimensions: Sequence[Dimension] = DEFAULT_DIMENSIONS,
) -> TrainingResult:
    """Learn simplex weights from labeled concept pairs; deterministic per seed."""
    labels = np.array([1.0 if is_match else 0.0 for _, _, is_match in training])
    if len(training) < 2 or labels.min() == labels.max():
        raise DegenerateTraining("training data needs at least one match and one non-match")
    deltas = pair_deltas([(a, b) for a, b, _ in training], dimensions)

    rng = np.random.default_rng(config.seed)
    order = rng.permutation(len(training))
    n_hold = int(len(training) * config.holdout_fraction)
    hold_idx, train_idx = order[:n_hold], order[n_hold:]
    if labels[train_idx].min() == labels[train_idx].max():  # degenerate split
        hold_idx, train_idx = order[:0], order

    weights, threshold, final_loss = fit_weights(deltas[train_idx], labels[train_idx], config)

    train_pred = classify(deltas[train_idx], weights, threshold)
    train_acc = float((train_pred == labels[train_idx]).mean())
    if len(hold_idx) > 0:
        hold_pred = classify(deltas[hold_idx], weights, threshold)
        heldout_acc = float((hold_pred == labels[hold_idx]).mean())
    else:
        heldout_acc = train_acc
    return TrainingResult(weights, threshold, train_acc, heldout_acc, final_loss)


# --- superconcept formation -----------------------------------------------------

@dataclass(frozen=True, order=True)
class SuperconceptMember:
    # ids are unique within a class, so order=True never reaches the frozenset
    concept_id: str
    label: str
    tag_context: frozenset[str] = field(default=frozenset(), compare=False)


@dataclass(frozen=True)
class Superconcept:
    """One equivalence class of concepts plus the tags matched into it."""

    members: frozenset[SuperconceptMember]
    matched_tags: frozenset[Tag] = frozenset()

    def __post_init__(self):
        if not self.members:
            raise ValueError("a superconcept needs at least one member")

    @property
    def member_ids(self) -> frozenset[str]:
        return frozenset(m.concept_id for m in self.members)

    @property
    def member_labels(self) -> frozenset[str]:
        return frozenset(m.label for m in self.members)

    def member_for_label(self, label: str) -> SuperconceptMember | None:
        candidates = sorted(m for m in self.members if m.label == label)
        return candidates[0] if candidates else None


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:  # path compression
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def tag_probe(tag: Tag) -> Concept:
    """Lift a tag to a probe concept for learned tag-to-concept matching."""
    return Concept(id=f"tag:{tag.label}", label=tag.label, tag_context=frozenset({tag.label}))


def tag_matches(
    tag: Tag,
    ontology: Ontology,
    weights: DissimilarityWeights,
    theta: float,
    dimensions: Sequence[Dimension] = DEFAULT_DIMENSIONS,
) -> frozenset[str]:
    """Concepts this tag lands on: rule matches plus learned sub-threshold matches."""
    matched = {cid for cid, _ in apply_rules(tag, ontology)}
    probe = vectorize(tag_probe(tag))
    for cid, concept in ontology.concepts.items():
        if cid not in matched and dissimilarity(probe, vectorize(concept), weights, dimensions) < theta:
            matched.add(cid)
    return frozenset(matched)


def form_superconcepts(
    taxonomy: FacetedTaxonomy,
    ontology: Ontology,
    weights: DissimilarityWeights | None = None,
    theta: float = 0.35,
    dimensions: Sequence[Dimension] = DEFAULT_DIMENSIONS,
) -> frozenset[Superconcept]:
    """Partition linked concepts into superconcepts and attach matched tags.

    Two concepts link when they share an equivalence edge, are rule-matched
    by one common tag, or lie within dissimilarity ``theta``; classes are the
    transitive closure of those links. Output classes cover every linked or
    tag-matched concept, and each class collects every taxonomy tag whose
    rule/learned match lands inside it.
    """
    if weights is None:
        weights = DissimilarityWeights.uniform(len(dimensions))
    if not ontology.concepts:
        return frozenset()

    tags = sorted(taxonomy.tags)
    rule_hits = {tag: frozenset(cid for cid, _ in apply_rules(tag, ontology)) for tag in tags}
    all_hits = {
        tag: tag_matches(tag, ontology, weights, theta, dimensions) for tag in tags
    }

    links: set[tuple[str, str]] = set(ontology.equivalence_edges)
    for tag in tags:
        hits = sorted(rule_hits[tag])
        for i in range(len(hits)):
            for j in range(i + 1, len(hits)):
                links.add((hits[i], hits[j]))
    ids = sorted(ontology.concepts)
    vectors = {cid: vectorize(ontology.concepts[cid]) for cid in ids}
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            if dissimilarity(vectors[ids[i]], vectors[ids[j]], weights, dimensions) < theta:
                links.add((ids[i], ids[j]))

    nodes = {cid for edge in links for cid in edge}
    for tag in tags:
        nodes |= all_hits[tag]

    uf = _UnionFind(nodes)
    for a, b in links:
        uf.union(a, b)

    classes: dict[str, set[str]] = {}
    for cid in nodes:
        classes.setdefault(uf.find(cid), set()).add(cid)

    result = []
    for members in classes.values():
        matched = frozenset(
            tag for tag in tags if all_hits[tag] & members
        )
        result.append(
            Superconcept(
                members=frozenset(
                    SuperconceptMember(
                        concept_id=cid,
                        label=ontology.concepts[cid].label,
                        tag_context=ontology.concepts[cid].tag_context,
                    )
                    for cid in members
                ),
                matched_tags=matched,
            )
        )
    return frozenset(result)


# --- file formats ---------------------------------------------------------------

def load_training_pairs(
    text: str, ontology: Ontology
) -> list[tuple[Concept, Concept, bool]]:
    """Parse `conceptA,conceptB,{0|1}` lines against an ontology."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = [p.strip() for p in stripped.split(",")]
        if len(parts) != 3 or parts[2] not in ("0", "1"):
            raise ParseError(f"expected 'conceptA,conceptB,0|1', got {stripped!r}", lineno)
        a, b = parts[0], parts[1]
        for cid in (a, b):
            if cid not in ontology.concepts:
                raise ParseError(f"unknown concept {cid!r}", lineno)
        pairs.append((ontology.concepts[a], ontology.concepts[b], parts[2] == "1"))
    return pairs


_CONFIG_FIELDS = {
    "seed": int,
    "learning_rate": float,
    "epochs": int,
    "theta": float,
    "beta": float,
    "holdout_fraction": float,
}


def load_learning_config(text: str) -> LearningConfig:
    """Parse key=value lines (seed, learning_rate, epochs, theta, beta)."""
    kwargs = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in _CONFIG_FIELDS:
            raise ParseError(f"expected 'key=value' with known key, got {stripped!r}", lineno)
        try:
            kwargs[key] = _CONFIG_FIELDS[key](value)
        except ValueError as exc:
            raise ParseError(f"bad value for {key}: {value!r}", lineno) from exc
    return LearningConfig(**kwargs)
