"""Flux influence graphs: mutual-influence classes, their DAG, and metabolite annotations."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .influence import InfluenceMatrix


class InconsistentAnnotation(ValueError):
    """The influence matrix is not transitively closed; most likely a false zero.

    Re-running with more repeats (or another seed) is the usual remedy.
    """


@dataclass(frozen=True)
class FluxClass:
    members: tuple[int, ...]
    self_influential: bool

    def __post_init__(self):
        if not self.members:
            raise ValueError("empty flux class")
        if len(self.members) > 1 and not self.self_influential:
            raise ValueError("classes with two or more reactions always influence themselves")

    def label(self, names: list[str] | None = None) -> str:
        """``<a,b>`` for self-influential classes, bare ``j`` otherwise."""
        text = ",".join(names[j] if names else str(j) for j in self.members)
        return f"⟨{text}⟩" if self.self_influential else text


def _tarjan(n: int, succ: list[list[int]]) -> list[list[int]]:
    """Strongly connected components, iteratively; components come out in reverse topological order."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(sorted(comp))
    return comps


def flux_classes(infl: InfluenceMatrix) -> list[FluxClass]:
    """Mutual flux influence classes, ordered by smallest member."""
    F = infl.flux_block()
    E = F.shape[0]
    succ = [[int(jp) for jp in np.flatnonzero(F[:, js]) if jp != js] for js in range(E)]
    comps = _tarjan(E, succ)
    classes = [
        FluxClass(tuple(c), len(c) > 1 or bool(F[c[0], c[0]]))
        for c in comps
    ]
    return sorted(classes, key=lambda c: c.members[0])


@dataclass(frozen=True)
class PureInfluenceGraph:
    classes: tuple[FluxClass, ...]  # topological order, ties by smallest member
    edges: tuple[tuple[int, int], ...]  # transitively reduced, indices into classes
    class_of: tuple[int, ...]  # reaction -> class index
    reaction_names: tuple[str, ...] = ()

    def successors(self, c: int) -> list[int]:
        return [b for a, b in self.edges if a == c]

    def predecessors(self, c: int) -> list[int]:
        return [a for a, b in self.edges if b == c]

    def reachable(self, c: int) -> set[int]:
        """Classes strictly downstream of ``c``."""
        seen: set[int] = set()
        todo = self.successors(c)
        while todo:
            d = todo.pop()
            if d not in seen:
                seen.add(d)
                todo.extend(self.successors(d))
        return seen

    def is_sink(self, c: int) -> bool:
        return not self.successors(c)

    def class_label(self, c: int) -> str:
        return self.classes[c].label(list(self.reaction_names) or None)


def _topological(n: int, succ: list[set[int]], key: list[int]) -> list[int]:
    indeg = [0] * n
    for a in range(n):
        for b in succ[a]:
            indeg[b] += 1
    heap = [(key[a], a) for a in range(n) if indeg[a] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, a = heapq.heappop(heap)
        order.append(a)
        for b in succ[a]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, (key[b], b))
    if len(order) != n:
        raise ValueError("class relation contains a cycle")
    return order


def condense_and_reduce(infl: InfluenceMatrix, classes: list[FluxClass] | None = None) -> PureInfluenceGraph:
    """Condensation DAG of flux classes with a transitively reduced edge set."""
    if classes is None:
        classes = flux_classes(infl)
    F = infl.flux_block()
    E = F.shape[0]
    cls_of = [0] * E
    for k, c in enumerate(classes):
        for j in c.members:
            cls_of[j] = k
    n = len(classes)
    succ: list[set[int]] = [set() for _ in range(n)]
    for js in range(E):
        for jp in np.flatnonzero(F[:, js]):
            a, b = cls_of[js], cls_of[int(jp)]
            if a != b:
                succ[a].add(b)
    order = _topological(n, succ, [c.members[0] for c in classes])
    pos = {old: new for new, old in enumerate(order)}
    new_classes = [classes[old] for old in order]
    new_succ = [sorted(pos[b] for b in succ[old]) for old in order]
    # closure as bitsets, filled in reverse topological order
    closure = [0] * n
    for a in range(n - 1, -1, -1):
        bits = 0
        for b in new_succ[a]:
            bits |= (1 << b) | closure[b]
        closure[a] = bits
    edges = []
    for a in range(n):
        indirect = 0
        for b in new_succ[a]:
            indirect |= closure[b]
        for b in new_succ[a]:
            if not (indirect >> b) & 1:
                edges.append((a, b))
    return PureInfluenceGraph(
        tuple(new_classes),
        tuple(sorted(edges)),
        tuple(pos[cls_of[j]] for j in range(E)),
        tuple(infl.reaction_names),
    )


@dataclass(frozen=True)
class FullInfluenceGraph:
    graph: PureInfluenceGraph
    influenced: tuple[frozenset[int], ...]  # I_M per class
    direct: tuple[frozenset[int], ...]  # M^d per class
    indirect: tuple[frozenset[int], ...]  # M^{not d} per class
    metabolite_names: tuple[str, ...] = ()

    @property
    def classes(self) -> tuple[FluxClass, ...]:
        return self.graph.classes

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self.graph.edges

    def class_of(self, j: int) -> int:
        return self.graph.class_of[j]

    def direct_names(self, c: int) -> list[str]:
        return [self.metabolite_names[m] for m in sorted(self.direct[c])]

    def vertex_label(self, c: int) -> str:
        return f"{self.graph.class_label(c)}|{{{','.join(self.direct_names(c))}}}"


def metabolite_annotations(infl: InfluenceMatrix, graph: PureInfluenceGraph | None = None) -> FullInfluenceGraph:
    """Split each class's metabolite influence set into direct and indirect parts."""
    if graph is None:
        graph = condense_and_reduce(infl)
    Mblk = infl.metabolite_block()
    n = len(graph.classes)
    influenced = []
    for c, cls in enumerate(graph.classes):
        sets = {frozenset(np.flatnonzero(Mblk[:, j]).tolist()) for j in cls.members}
        if len(sets) != 1:
            raise InconsistentAnnotation(
                f"reactions of class {graph.class_label(c)} influence different metabolite sets"
            )
        influenced.append(sets.pop())
    downstream = [graph.reachable(c) for c in range(n)]
    indirect = []
    for c in range(n):
        acc: set[int] = set()
        for d in downstream[c]:
            acc |= influenced[d]
        indirect.append(frozenset(acc))
    direct = [influenced[c] - indirect[c] for c in range(n)]
    for c in range(n):
        if not indirect[c] <= influenced[c]:
            raise InconsistentAnnotation(
                f"class {graph.class_label(c)} misses metabolites influenced downstream"
            )
        union_direct: set[int] = set()
        for d in downstream[c]:
            union_direct |= direct[d]
        if union_direct != indirect[c]:
            raise InconsistentAnnotation(
                f"indirect set of class {graph.class_label(c)} is not the union of downstream direct sets"
            )
    return FullInfluenceGraph(
        graph, tuple(influenced), tuple(direct), tuple(indirect), tuple(infl.metabolite_names)
    )


def influence_sets(full: FullInfluenceGraph, j: int) -> tuple[set[int], set[int]]:
    """``(I_E(j), I_M(j))`` read off the graph: own class plus everything downstream."""
    g = full.graph
    c = g.class_of[j]
    down = g.reachable(c)
    flux: set[int] = set()
    cls = g.classes[c]
    if cls.self_influential:
        flux.update(cls.members)
    mets = set(full.direct[c])
    for d in down:
        flux.update(g.classes[d].members)
        mets |= full.direct[d]
    return flux, mets
