"""Task scoring matrices: per-attribute scores combined by weights.

A matrix holds one usability task and an ordered list of scored
attributes. Two global numbers come out: the plain average of the scores
and the weighted sum. Neither is privileged; both are reported.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadWeights, EmptyMatrix, ParseError

WEIGHT_TOLERANCE = 1e-9
DEFAULT_SCORE_BOUNDS = (0.0, 10.0)


@dataclass(frozen=True)
class Attribute:
    name: str
    score: float
    weight: float


@dataclass(frozen=True)
class EvaluationMatrix:
    task: str
    attributes: tuple[Attribute, ...]
    score_bounds: tuple[float, float] = DEFAULT_SCORE_BOUNDS

    def __post_init__(self):
        if not self.attributes:
            raise EmptyMatrix("a matrix needs at least one attribute")
        low, high = self.score_bounds
        for attr in self.attributes:
            if not low <= attr.score <= high:
                raise ValueError(f"score {attr.score!r} outside [{low}, {high}]")
            if attr.weight < 0:
                raise BadWeights(f"negative weight for {attr.name!r}")
        total = sum(attr.weight for attr in self.attributes)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise BadWeights(f"weights must sum to 1, got {total!r}")


def per_attribute_weighted(m: EvaluationMatrix) -> tuple[float, ...]:
    return tuple(attr.score * attr.weight for attr in m.attributes)


def score_task(m: EvaluationMatrix) -> tuple[float, float]:
    """(plain average, weighted sum) of the attribute scores."""
    scores = [attr.score for attr in m.attributes]
    average = sum(scores) / len(scores)
    weighted = sum(per_attribute_weighted(m))
    return average, weighted


# --- file format ---------------------------------------------------------------

def matrix_from_csv(text: str) -> EvaluationMatrix:
    """Parse a matrix file: a `task[,label]` header line, then one
    `name,score,weight` line per attribute. `#` lines are comments."""
    task = None
    attributes = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = [p.strip() for p in stripped.split(",")]
        if task is None:
            if parts[0] != "task" or len(parts) > 2:
                raise ParseError(f"expected 'task[,label]' header, got {stripped!r}", lineno)
            task = parts[1] if len(parts) == 2 else ""
            continue
        if len(parts) != 3:
            raise ParseError(f"expected 'name,score,weight', got {stripped!r}", lineno)
        try:
            attributes.append(Attribute(parts[0], float(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise ParseError(f"bad number in {stripped!r}", lineno) from exc
    if task is None:
        raise ParseError("missing 'task' header line", 1)
    if not attributes:
        raise EmptyMatrix("matrix file lists no attributes")
    return EvaluationMatrix(task=task, attributes=tuple(attributes))


def matrix_to_csv(m: EvaluationMatrix) -> str:
    lines = [f"task,{m.task}" if m.task else "task"]
    for attr in m.attributes:
        lines.append(f"{attr.name},{attr.score:g},{attr.weight:g}")
    return "\n".join(lines) + "\n"
