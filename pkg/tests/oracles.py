"""Independent reference implementations the tests compare against.

Everything here is written the dumb, obviously-correct way, on purpose,
and shares no code with the package internals it checks.
"""

from __future__ import annotations

import itertools

import numpy as np

from facetforge.store import VARIABLE


def query_oracle(triples, patterns) -> set[frozenset]:
    """Every consistent variable assignment, by exhaustive backtracking."""
    triples = list(triples)
    solutions: set[frozenset] = set()

    def extend(index: int, binding: dict) -> None:
        if index == len(patterns):
            solutions.add(frozenset(binding.items()))
            return
        pattern = patterns[index]
        for fact in triples:
            attempt = dict(binding)
            consistent = True
            for p_term, f_term in zip(pattern.terms(), fact.terms()):
                if p_term.kind == VARIABLE:
                    if p_term.text in attempt and attempt[p_term.text] != f_term:
                        consistent = False
                        break
                    attempt[p_term.text] = f_term
                elif p_term != f_term:
                    consistent = False
                    break
            if consistent:
                extend(index + 1, attempt)

    extend(0, {})
    return solutions


def bindingset_as_set(result) -> set[frozenset]:
    return {frozenset(solution.items()) for solution in result}


def shortest_path_oracle(nodes, links, start, goals) -> list[str] | None:
    """Layered forward sweep keeping, per node, the lexicographically
    smallest path (excluding start) of minimal length. None if no goal is
    reachable. Paths to the nearest goal only."""
    goals = set(goals)
    if start in goals:
        return []
    succ: dict[str, set[str]] = {n: set() for n in nodes}
    for a, b in links:
        succ[a].add(b)

    best: dict[str, list[str]] = {start: []}
    frontier = {start}
    while frontier:
        reached = {n: best[n] for n in frontier if n in goals}
        if reached:
            return min(reached.values())
        nxt: dict[str, list[str]] = {}
        for node in frontier:
            for m in succ[node]:
                if m in best:
                    continue
                candidate = best[node] + [m]
                if m not in nxt or candidate < nxt[m]:
                    nxt[m] = candidate
        best.update(nxt)
        frontier = set(nxt)
    return None


def partition_oracle(nodes, links) -> set[frozenset]:
    """Connected components by repeated pairwise merging until fixpoint."""
    classes = [{n} for n in nodes]
    changed = True
    while changed:
        changed = False
        for a, b in links:
            ca = next(c for c in classes if a in c)
            cb = next(c for c in classes if b in c)
            if ca is not cb:
                ca |= cb
                classes.remove(cb)
                changed = True
    return {frozenset(c) for c in classes}


def central_differences(f, x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    grad = np.zeros_like(x)
    for i in range(len(x)):
        up, down = x.copy(), x.copy()
        up[i] += eps
        down[i] -= eps
        grad[i] = (f(up) - f(down)) / (2 * eps)
    return grad


def simplex_grid(dims: int, step: float = 0.05):
    """All weight vectors on the simplex with entries in multiples of step."""
    ticks = round(1 / step)
    for combo in itertools.product(range(ticks + 1), repeat=dims - 1):
        if sum(combo) <= ticks:
            rest = ticks - sum(combo)
            yield tuple(c / ticks for c in combo) + (rest / ticks,)


def grid_search_accuracy(deltas: np.ndarray, labels: np.ndarray, step: float = 0.05) -> float:
    """Best split accuracy over simplex-grid weights and scanned thresholds."""
    best = 0.0
    for weights in simplex_grid(deltas.shape[1], step):
        scores = deltas @ np.array(weights)
        candidates = np.unique(scores)
        midpoints = (candidates[:-1] + candidates[1:]) / 2 if len(candidates) > 1 else candidates
        for threshold in list(midpoints) + [candidates.min() - 1, candidates.max() + 1]:
            accuracy = float(((scores < threshold) == (labels == 1.0)).mean())
            best = max(best, accuracy)
    return best
