"""Closed-set optimization on digraphs.

A subset S is closed (w.r.t. successors) when every arc (i, j) with i in S
also has j in S.  Closed sets are exactly the feasible sets of the system
x_i <= x_j, and they form a ring family, so a submodular objective can be
minimized exactly (`solve_sm_closure`).  For linear objectives the classical
source/sink cut construction gives an independent second algorithm
(`solve_linear_closure_mincut`), which the test suite cross-validates against
both exhaustive enumeration and the ring-family route.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import ValidationError
from .sfm import RingFamily, SetFunctionOracle, _ring_detailed, set_of


@dataclass(frozen=True)
class ClosureInstance:
    """Binary nodes, precedence arcs (i, j) meaning x_i <= x_j, and a
    set-function objective to minimize over closed sets."""

    node_count: int
    arcs: tuple[tuple[int, int], ...]
    objective: SetFunctionOracle

    def __post_init__(self):
        if self.objective.m != self.node_count:
            raise ValidationError("objective ground size must equal the node count")
        for (i, j) in self.arcs:
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise ValidationError(f"arc ({i}, {j}) out of range")

    def is_closed(self, subset: Iterable[int]) -> bool:
        s = set(subset)
        return all(j in s for (i, j) in self.arcs if i in s)


def solve_sm_closure(
    inst: ClosureInstance, *, cfg: SolverConfig = DEFAULT_CONFIG
) -> tuple[frozenset[int], float]:
    """Exact minimum of a submodular objective over closed sets."""
    mask, val, _ = _ring_detailed(inst.objective, RingFamily.of(inst.arcs), cfg)
    out = set_of(mask)
    if not inst.is_closed(out):
        raise ValidationError("internal: returned set is not closed")  # pragma: no cover
    return out, val


# ---------------------------------------------------------------------------
# linear closure via max-flow / min-cut
# ---------------------------------------------------------------------------


class _Dinic:
    def __init__(self, n: int):
        self.n = n
        self.head: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[float] = []

    def add_edge(self, u: int, v: int, c: float):
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(float(c))
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0.0)

    def _bfs(self, s: int, t: int) -> bool:
        self.level = [-1] * self.n
        self.level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for eid in self.head[u]:
                v = self.to[eid]
                if self.cap[eid] > 1e-12 and self.level[v] < 0:
                    self.level[v] = self.level[u] + 1
                    q.append(v)
        return self.level[t] >= 0

    def _dfs(self, u: int, t: int, pushed: float) -> float:
        if u == t:
            return pushed
        while self.it[u] < len(self.head[u]):
            eid = self.head[u][self.it[u]]
            v = self.to[eid]
            if self.cap[eid] > 1e-12 and self.level[v] == self.level[u] + 1:
                got = self._dfs(v, t, min(pushed, self.cap[eid]))
                if got > 0:
                    self.cap[eid] -= got
                    self.cap[eid ^ 1] += got
                    return got
            self.it[u] += 1
        return 0.0

    def max_flow(self, s: int, t: int) -> float:
        flow = 0.0
        while self._bfs(s, t):
            self.it = [0] * self.n
            while True:
                got = self._dfs(s, t, float("inf"))
                if got <= 0:
                    break
                flow += got
        return flow

    def reachable_from(self, s: int) -> set[int]:
        seen = {s}
        q = deque([s])
        while q:
            u = q.popleft()
            for eid in self.head[u]:
                v = self.to[eid]
                if self.cap[eid] > 1e-12 and v not in seen:
                    seen.add(v)
                    q.append(v)
        return seen


def solve_linear_closure_mincut(
    weights: Sequence[float],
    arcs: Iterable[tuple[int, int]],
    sense: str = "max",
) -> tuple[frozenset[int], float]:
    """Best-weight closed set of a node-weighted digraph via a minimum cut.

    ``sense="max"`` builds the source/sink graph (positive-weight nodes hang
    off the source, nonpositive ones feed the sink, internal arcs effectively
    uncuttable) and reads the source side of a minimum cut.  ``sense="min"``
    negates the weights and reuses the same construction, so both senses range
    over successor-closed sets and stay comparable with `solve_sm_closure`.
    """
    w = [float(v) for v in weights]
    n = len(w)
    arcs = RingFamily.of(arcs).arcs
    for (i, j) in arcs:
        if not (0 <= i < n and 0 <= j < n):
            raise ValidationError(f"arc ({i}, {j}) out of range")
    if sense == "min":
        s, _ = solve_linear_closure_mincut([-v for v in w], arcs, "max")
        return s, sum(w[i] for i in s)
    if sense != "max":
        raise ValidationError("sense must be 'max' or 'min'")

    if all(v > 0 for v in w):
        return frozenset(range(n)), sum(w)  # nothing to cut: take everything
    if all(v <= 0 for v in w):
        return frozenset(), 0.0

    s, t = n, n + 1
    net = _Dinic(n + 2)
    infinite = 1.0 + sum(v for v in w if v > 0)
    for (i, j) in arcs:
        net.add_edge(i, j, infinite)
    for v in range(n):
        if w[v] > 0:
            net.add_edge(s, v, w[v])
        else:
            net.add_edge(v, t, -w[v])
    net.max_flow(s, t)
    source_side = net.reachable_from(s) - {s}
    closure = frozenset(source_side)
    closed = all(j in closure for (i, j) in arcs if i in closure)
    if not closed:
        raise ValidationError("internal: min-cut source side is not closed")  # pragma: no cover
    return closure, sum(w[i] for i in closure)


# ---------------------------------------------------------------------------
# cut problems on source/sink closure graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StClosureGraph:
    """Source/sink graph whose only finite-cost arcs touch the source or the
    sink; internal arcs are uncuttable precedence arcs.

    The cut cost is a set function over the finite arcs, indexed source arcs
    first (position k is the arc s->source_arcs[k]) then sink arcs (position
    len(source_arcs)+k is the arc sink_arcs[k]->t).
    """

    node_count: int
    internal_arcs: tuple[tuple[int, int], ...]
    source_arcs: tuple[int, ...]
    sink_arcs: tuple[int, ...]
    cut_cost: SetFunctionOracle
    finite_internal_arcs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for v in self.source_arcs + self.sink_arcs:
            if not 0 <= v < self.node_count:
                raise ValidationError(f"terminal arc endpoint {v} out of range")
        for (i, j) in self.internal_arcs + self.finite_internal_arcs:
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise ValidationError(f"internal arc ({i}, {j}) out of range")
        if self.cut_cost.m != len(self.source_arcs) + len(self.sink_arcs):
            raise ValidationError("cut cost must be defined over the source and sink arcs")


def sm_cut_to_closure(graph: StClosureGraph) -> ClosureInstance:
    """Equivalent closed-set instance of a cut problem on a closure graph.

    For a source set S, the cut consists of the source arcs into the
    complement of S and the sink arcs out of S; the returned objective
    evaluates the cut cost of that arc set.  The objective is submodular
    whenever the cut cost is modular, or splits into independent submodular
    costs on the source-arc block and the sink-arc block.
    """
    if graph.finite_internal_arcs:
        raise ValidationError(
            "finite-cost internal arcs violate the closure-graph requirement: "
            f"{graph.finite_internal_arcs}"
        )
    src = list(graph.source_arcs)
    snk = list(graph.sink_arcs)
    k = len(src)

    def cost(node_mask: int) -> float:
        cut = 0
        for pos, v in enumerate(src):
            if not (node_mask >> v) & 1:
                cut |= 1 << pos
        for pos, v in enumerate(snk):
            if (node_mask >> v) & 1:
                cut |= 1 << (k + pos)
        return graph.cut_cost(cut)

    objective = SetFunctionOracle(
        graph.node_count,
        cost,
        integer_valued=graph.cut_cost.integer_valued,
        label="closure_cut_cost",
    )
    return ClosureInstance(graph.node_count, RingFamily.of(graph.internal_arcs).arcs, objective)


# ---------------------------------------------------------------------------
# bipartite vertex cover with per-side submodular costs
# ---------------------------------------------------------------------------


def bisubmodular_vc_bipartite(
    v1_count: int,
    v2_count: int,
    edges: Iterable[tuple[int, int]],
    f1: SetFunctionOracle,
    f2: SetFunctionOracle,
    *,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> tuple[frozenset[int], float]:
    """Exact minimum of f1(D ∩ V1) + f2(D ∩ V2) over vertex covers D of a
    bipartite graph (V1 = 0..v1_count-1, V2 indexed 0..v2_count-1 locally,
    v1_count..v1_count+v2_count-1 globally).

    Directing every edge from V1 to V2 makes the complement-on-V1 image of a
    cover a closed set, so replacing f1 by its reflection turns the cover
    problem into a closed-set minimization, solved exactly.
    """
    if f1.m != v1_count or f2.m != v2_count:
        raise ValidationError("side objectives must match the side sizes")
    edge_list = []
    for (i, j) in edges:
        if not (0 <= i < v1_count and 0 <= j < v2_count):
            raise ValidationError(f"edge ({i}, {j}) is not a V1 x V2 pair")
        edge_list.append((int(i), v1_count + int(j)))
    m = v1_count + v2_count
    full1 = (1 << v1_count) - 1

    def objective(mask: int) -> float:
        inside1 = mask & full1
        inside2 = mask >> v1_count
        return f1(full1 ^ inside1) + f2(inside2)

    inst = ClosureInstance(
        m,
        RingFamily.of(edge_list).arcs,
        SetFunctionOracle(m, objective, integer_valued=f1.integer_valued and f2.integer_valued),
    )
    closed, value = solve_sm_closure(inst, cfg=cfg)
    cover = frozenset(i for i in range(v1_count) if i not in closed) | frozenset(
        v for v in closed if v >= v1_count
    )
    for (i, j) in edge_list:
        if i not in cover and j not in cover:
            raise ValidationError("internal: decoded set is not a vertex cover")  # pragma: no cover
    return cover, value
