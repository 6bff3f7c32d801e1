"""Signed multigraph of spiralling leaves and its decomposition into circuits.

Vertices are boundary components.  Every spiralling leaf is an edge whose two
ends carry the leaf's spiral sense at that boundary (+1 or -1).  A circuit is
a closed walk that flips the sign every time it passes from one edge to the
next; weights along the way are exact fractions.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction

from .lamination import LaminationTuple, SpiralLeaf, is_sharp


class NotSharpError(ValueError):
    """Signed masses of the tuple do not cancel at some boundary."""


@dataclass(frozen=True)
class Edge:
    lamination_index: int
    leaf_index: int
    leaf_id: str
    tail: int  # start boundary
    tail_mark: int
    head: int  # end boundary
    head_mark: int
    weight: Fraction

    @property
    def key(self):
        return (self.lamination_index, self.leaf_index)


@dataclass(frozen=True)
class SpiralMultigraph:
    n_vertices: int
    edges: tuple

    def balance(self, weights=None) -> list[Fraction]:
        """Per vertex sum of weight over + marks minus - marks."""
        weights = weights or [e.weight for e in self.edges]
        out = [Fraction(0)] * self.n_vertices
        for e, w in zip(self.edges, weights):
            out[e.tail] += e.tail_mark * w
            out[e.head] += e.head_mark * w
        return out


@dataclass(frozen=True)
class Circuit:
    """Cyclic edge list; direction +1 walks an edge tail to head."""

    steps: tuple  # ((edge index, direction), ...)
    weight: Fraction

    def multiplicity(self, edge_index: int) -> int:
        return sum(1 for e, _ in self.steps if e == edge_index)

    def vertices(self, graph: SpiralMultigraph) -> list[int]:
        """D_1, ..., D_I: the vertex where each step starts."""
        return [graph.edges[e].tail if d > 0 else graph.edges[e].head for e, d in self.steps]


@dataclass(frozen=True)
class Decomposition:
    compact: LaminationTuple
    graph: SpiralMultigraph
    circuits: tuple

    def to_json(self) -> dict:
        return {
            "compact": [
                [{"leaf_id": leaf.leaf_id, "word": leaf.word, "weight": str(leaf.weight)} for leaf in lam.leaves]
                for lam in self.compact.laminations
            ],
            "circuits": [
                {
                    "weight": str(c.weight),
                    "edges": [
                        {
                            "leaf_id": self.graph.edges[e].leaf_id,
                            "lamination": self.graph.edges[e].lamination_index,
                            "leaf": self.graph.edges[e].leaf_index,
                            "direction": d,
                        }
                        for e, d in c.steps
                    ],
                }
                for c in self.circuits
            ],
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def build_multigraph(t: LaminationTuple, n_boundary: int, check_sharp: bool = True) -> SpiralMultigraph:
    if check_sharp and not is_sharp(t, n_boundary):
        raise NotSharpError("tuple is not sharp: signed masses do not cancel at every boundary")
    edges = []
    for n, k, leaf in t.all_leaves():
        if not isinstance(leaf, SpiralLeaf):
            continue
        edges.append(
            Edge(n, k, leaf.leaf_id or f"{n}.{k}", leaf.start[0], leaf.start[1], leaf.end[0], leaf.end[1], leaf.weight)
        )
    edges.sort(key=lambda e: e.key)
    return SpiralMultigraph(n_boundary, tuple(edges))


def is_switching_cycle(graph: SpiralMultigraph, steps) -> bool:
    """Closed walk that flips the mark at every junction (including the closing one)."""
    if not steps:
        return False
    for idx in range(len(steps)):
        e, d = steps[idx]
        f, g = steps[(idx + 1) % len(steps)]
        a, b = graph.edges[e], graph.edges[f]
        arrive_v, arrive_m = (a.head, a.head_mark) if d > 0 else (a.tail, a.tail_mark)
        leave_v, leave_m = (b.tail, b.tail_mark) if g > 0 else (b.head, b.head_mark)
        if arrive_v != leave_v or arrive_m != -leave_m:
            return False
    return True


def find_switching_cycle(graph: SpiralMultigraph, residual=None) -> tuple:
    """Deterministic walk that stops at the first repeated (vertex, mark) state.

    The walk starts on the lowest edge with a - end, leaving through that end.
    At each vertex it takes the lowest edge with positive residual weight and
    the required leaving mark, preferring to traverse an edge forwards.  There
    are only 2 * (number of vertices) states, so a state repeats within that
    many steps and the steps since its first visit form a switching cycle.
    """
    edges = graph.edges
    residual = list(residual if residual is not None else [e.weight for e in edges])
    live = [i for i, w in enumerate(residual) if w > 0]
    if not live:
        raise ValueError("graph has no edge with positive weight")

    start = None
    for i in live:
        e = edges[i]
        if e.tail_mark < 0:
            start = (i, 1)
            break
        if e.head_mark < 0:
            start = (i, -1)
            break
    if start is None:
        raise NotSharpError("no edge carries a negative end; the graph is unbalanced")

    def leave_state(step):
        i, d = step
        e = edges[i]
        return (e.tail, e.tail_mark) if d > 0 else (e.head, e.head_mark)

    def arrive(step):
        i, d = step
        e = edges[i]
        return (e.head, -e.head_mark) if d > 0 else (e.tail, -e.tail_mark)

    def choose(state):
        v, m = state
        for i in live:
            e = edges[i]
            if e.tail == v and e.tail_mark == m:
                return (i, 1)
            if e.head == v and e.head_mark == m:
                return (i, -1)
        raise NotSharpError(f"walk is stuck at boundary {v}; the graph is unbalanced")

    seen: dict = {}
    path: list = []
    state = leave_state(start)
    step = start
    while state not in seen:
        seen[state] = len(path)
        path.append(step)
        state = arrive(step)
        if state in seen:
            break
        step = choose(state)
    return tuple(path[seen[state]:])


def circuit_weight(steps, residual) -> Fraction:
    counts: dict = {}
    for e, _ in steps:
        counts[e] = counts.get(e, 0) + 1
    return min(Fraction(residual[e]) / c for e, c in counts.items())


def decompose(t: LaminationTuple, n_boundary: int) -> Decomposition:
    graph = build_multigraph(t, n_boundary)
    residual = [e.weight for e in graph.edges]
    circuits = []
    while any(w > 0 for w in residual):
        steps = find_switching_cycle(graph, residual)
        w = circuit_weight(steps, residual)
        for e, _ in steps:
            residual[e] -= w
        circuits.append(Circuit(steps, w))
    compact = LaminationTuple(tuple(lam.compact_part() for lam in t.laminations))
    return Decomposition(compact, graph, tuple(circuits))


def circuit_signed_mass(graph: SpiralMultigraph, circuit: Circuit) -> list[Fraction]:
    """Signed mass of the circuit at every vertex (zero for a genuine circuit)."""
    out = [Fraction(0)] * graph.n_vertices
    for e, _ in circuit.steps:
        edge = graph.edges[e]
        out[edge.tail] += edge.tail_mark * circuit.weight
        out[edge.head] += edge.head_mark * circuit.weight
    return out


def conservation_defect(decomp: Decomposition) -> list[Fraction]:
    """Input weight minus the weight carried by the circuits, per edge."""
    used = [Fraction(0)] * len(decomp.graph.edges)
    for c in decomp.circuits:
        for e, _ in c.steps:
            used[e] += c.weight
    return [e.weight - u for e, u in zip(decomp.graph.edges, used)]


def oriented_leaf(graph: SpiralMultigraph, t: LaminationTuple, step) -> SpiralLeaf:
    """The spiralling leaf of a circuit step, reversed when walked backwards."""
    e, d = step
    edge = graph.edges[e]
    leaf = t.laminations[edge.lamination_index].leaves[edge.leaf_index]
    return leaf if d > 0 else leaf.reversed()
