"""Builders for the classic problem families expressible with two variables
per inequality.

Each builder produces an :class:`Instance` with the correct round-up
declaration for its constraint matrix.  Auxiliary variables that carry no
objective weight (clause-satisfaction indicators, clique membership) extend
the user's oracle with zero marginal contribution, which preserves both
submodularity and monotonicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from .core import GroundSet, SubmodularOracle, embed_oracle
from .errors import ValidationError
from .reductions import Constraint, Instance


@dataclass(frozen=True)
class GraphSpec:
    """Undirected graph; ``parts`` marks a bipartition (sizes of the two
    sides, nodes 0..n1-1 on the first side) where a builder needs one."""

    node_count: int
    edges: tuple[tuple[int, int], ...]
    parts: tuple[int, int] | None = None

    def __post_init__(self):
        seen = set()
        for (i, j) in self.edges:
            if i == j:
                raise ValidationError(f"self-loop ({i}, {j}) not allowed")
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise ValidationError(f"edge ({i}, {j}) out of range")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValidationError(f"duplicate edge ({i}, {j})")
            seen.add(key)
        if self.parts is not None and sum(self.parts) != self.node_count:
            raise ValidationError("bipartition sizes must sum to the node count")

    def non_edges(self) -> list[tuple[int, int]]:
        present = {(min(i, j), max(i, j)) for (i, j) in self.edges}
        return [p for p in combinations(range(self.node_count), 2) if p not in present]


@dataclass(frozen=True)
class CnfSpec:
    """CNF formula with DIMACS-style literals: +v means variable v-1 unnegated,
    -v negated."""

    var_count: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for k, clause in enumerate(self.clauses):
            if not clause:
                raise ValidationError(f"clause {k} is empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.var_count:
                    raise ValidationError(f"clause {k}: literal {lit} out of range")


def _require_binary_oracle(f: SubmodularOracle, n: int, what: str):
    if f.ground.bounds != (1,) * n:
        raise ValidationError(f"{what}: objective must live on a binary ground of size {n}")


def build_vertex_cover(g: GraphSpec, f: SubmodularOracle) -> Instance:
    """Pick nodes covering every edge: x_i + x_j >= 1 per edge.  Covering
    constraints round up, so any submodular objective is admissible."""
    _require_binary_oracle(f, g.node_count, "vertex cover")
    constraints = tuple(Constraint.pair(i, 1, j, 1, 1) for (i, j) in g.edges)
    return Instance(GroundSet.binary(g.node_count), constraints, f, roundup_declared=True,
                    name="vertex_cover")


def build_min2sat(cnf: CnfSpec, f: SubmodularOracle) -> Instance:
    """Satisfy every clause of a width-<=2 CNF while minimizing the cost of
    the true variables.

    Clause translation: (x or y) -> x + y >= 1; (x or not-y) -> x - y >= 0;
    (not-x or not-y) -> x + y <= 1; units tighten a single variable.  The
    matrix does not round up (the all-negative clauses cap variables from
    above), so the objective must claim monotonicity.
    """
    _require_binary_oracle(f, cnf.var_count, "min-2sat")
    if not f.claims_monotone:
        raise ValidationError(
            "min-2sat admits no guarantee for non-monotone objectives; supply an oracle "
            "with claims_monotone=True (covering formulations can use any objective)"
        )
    constraints = []
    for clause in cnf.clauses:
        if len(clause) > 2:
            raise ValidationError(f"clause {clause} wider than 2")
        if len(clause) == 1:
            lit = clause[0]
            v = abs(lit) - 1
            constraints.append(Constraint.single(v, 1, 1) if lit > 0 else Constraint.single(v, -1, 0))
            continue
        l1, l2 = clause
        v1, v2 = abs(l1) - 1, abs(l2) - 1
        if v1 == v2:
            if (l1 > 0) == (l2 > 0):  # duplicated literal, acts as a unit
                constraints.append(
                    Constraint.single(v1, 1, 1) if l1 > 0 else Constraint.single(v1, -1, 0)
                )
            continue  # tautological clause
        if l1 > 0 and l2 > 0:
            constraints.append(Constraint.pair(v1, 1, v2, 1, 1))
        elif l1 > 0 and l2 < 0:
            constraints.append(Constraint.pair(v1, 1, v2, -1, 0))
        elif l1 < 0 and l2 > 0:
            constraints.append(Constraint.pair(v2, 1, v1, -1, 0))
        else:
            constraints.append(Constraint.pair(v1, -1, v2, -1, -1))
    return Instance(GroundSet.binary(cnf.var_count), tuple(constraints), f,
                    roundup_declared=False, name="min_2sat")


def build_minsat(cnf: CnfSpec, f: SubmodularOracle) -> Instance:
    """Choose an assignment satisfying as little clause weight as possible.

    Ground set: one indicator per clause (positions 0..m-1, carrying the
    objective) followed by one per variable.  Each positive literal incidence
    forces y_clause >= x_var; each negative one forces y_clause >= 1 - x_var.
    The matrix rounds up even though it is not of covering type.
    """
    m = len(cnf.clauses)
    if f.ground.bounds != (1,) * m:
        raise ValidationError(f"min-sat: objective must live on the {m} clause indicators")
    ground = GroundSet.binary(m + cnf.var_count)
    constraints = []
    for k, clause in enumerate(cnf.clauses):
        for lit in clause:
            x = m + abs(lit) - 1
            if lit > 0:
                constraints.append(Constraint.pair(k, 1, x, -1, 0))  # y_k >= x
            else:
                constraints.append(Constraint.pair(k, 1, x, 1, 1))  # y_k >= 1 - x
    objective = embed_oracle(f, ground, tuple(range(m)))
    return Instance(ground, tuple(constraints), objective, roundup_declared=True, name="min_sat")


def build_clique_edge_delete(g: GraphSpec, f: SubmodularOracle) -> Instance:
    """Delete the cheapest edge set so the non-isolated remainder is a clique.

    Ground set: one exclusion indicator d_i per node (1 = node kept out of
    the clique) followed by one deletion indicator z_e per edge, which carry
    the objective.  Links z_e >= d_i, z_e >= d_j say an edge leaving the
    clique is deleted; covers d_i + d_j >= 1 over non-adjacent pairs forbid
    keeping both.  In these variables the matrix is covering plus monotone,
    so it rounds up and any submodular objective is admissible.
    """
    n, m = g.node_count, len(g.edges)
    if f.ground.bounds != (1,) * m:
        raise ValidationError(f"clique edge deletion: objective must live on the {m} edge indicators")
    ground = GroundSet.binary(n + m)
    constraints = []
    for e, (i, j) in enumerate(g.edges):
        z = n + e
        constraints.append(Constraint.pair(z, 1, i, -1, 0))
        constraints.append(Constraint.pair(z, 1, j, -1, 0))
    for (i, j) in g.non_edges():
        constraints.append(Constraint.pair(i, 1, j, 1, 1))
    objective = embed_oracle(f, ground, tuple(range(n, n + m)))
    return Instance(ground, tuple(constraints), objective, roundup_declared=True,
                    name="clique_edge_delete")


def build_biclique_node_delete(g: GraphSpec, f: SubmodularOracle) -> Instance:
    """Delete the cheapest node set of a bipartite graph so the remainder is a
    complete bipartite graph: every missing cross pair loses an endpoint."""
    if g.parts is None:
        raise ValidationError("biclique node deletion needs a bipartition")
    _require_binary_oracle(f, g.node_count, "biclique node deletion")
    n1, n2 = g.parts
    present = {(min(i, j), max(i, j)) for (i, j) in g.edges}
    for (i, j) in present:
        if (i < n1) == (j < n1):
            raise ValidationError(f"edge ({i}, {j}) does not cross the bipartition")
    constraints = []
    for i in range(n1):
        for j in range(n1, n1 + n2):
            if (i, j) not in present:
                constraints.append(Constraint.pair(i, 1, j, 1, 1))
    return Instance(GroundSet.binary(g.node_count), tuple(constraints), f,
                    roundup_declared=True, name="biclique_node_delete")
