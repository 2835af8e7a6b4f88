"""Orchestration of the solving pipelines.

Three routes:

* `solve_exact_monotone` - systems whose constraints all classify monotone or
  singleton binarize into precedence arcs over level indicators; minimizing
  the lifted objective over the closed sets of that arc graph is exact.
* `solve_approx` - general systems are duplicated into a purely monotone
  relaxation over plus/minus copies (`solve_relaxation`); half of the relaxed
  optimum is a certified lower bound, and a feasible integer point within a
  factor 2 is recovered either by the componentwise max of the two copies
  (instances declared round-up) or by clamping a 2-SAT witness between the
  copies (monotone objectives).
* `brute_force_solve` - exhaustive reference used by the test suite as the
  independent oracle for both values and feasibility.

The lifted objective evaluates per-element counts of level indicators, which
extends the multiset function to arbitrary (not only chain-respecting)
indicator sets; every built-in family has diminishing marginals across
levels, which keeps that extension submodular.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .core import enumerate_box
from .errors import (
    EnumerationCapExceeded,
    GuaranteeUnavailable,
    InfeasibleSystem,
    RoundUpViolation,
    SolverError,
    ValidationError,
)
from .reductions import (
    ConstraintKind,
    Instance,
    LevelSystem,
    build_level_system,
    classify,
    cleared_coefficients,
    decode_levels,
    monotonize,
)
from .sfm import MinNormStats, RingFamily, SetFunctionOracle, _ring_detailed
from .twosat import implications_of_clause, solve_2sat

MODE_EXACT = "ExactMonotone"
MODE_APPROX = "Approx2"
MODE_BRUTE = "BruteForce"


@dataclass
class SolveResult:
    x: tuple[int, ...] | None
    value: float
    lower_bound: float
    mode: str
    ratio_bound: float
    feasible: bool
    warnings: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict)


@dataclass
class RelaxationOutcome:
    """Optimal plus/minus copy counts of the monotonized relaxation.

    ``m_minus`` is stored nonpositive; -m_minus[i] is the minus-copy count.
    ``g_value`` is re-evaluated from the oracle, never trusted from the inner
    solve.  ``certified_lower`` is a sound lower bound on the constrained
    optimum: half the relaxed value, less any residual duality gap the inner
    solve left (zero for integer objectives, which are certified exact).
    ``m_star`` is the half-integral midpoint, kept for diagnostics only.
    """

    m_plus: tuple[int, ...]
    m_minus: tuple[int, ...]
    g_value: float
    certified_lower: float
    m_star: tuple[float, ...]
    diagnostics: dict = field(default_factory=dict)

    @property
    def minus_counts(self) -> tuple[int, ...]:
        return tuple(-v for v in self.m_minus)


# ---------------------------------------------------------------------------
# level-graph solving shared by the exact and relaxation routes
# ---------------------------------------------------------------------------


def _propagate_fixes(system: LevelSystem) -> tuple[int, int] | None:
    """(must_in mask, must_out mask) closed under the arcs, or None on
    conflict.  Membership propagates forward along arcs, exclusion backward."""
    arcs = system.all_arcs()
    fwd: dict[int, list[int]] = {}
    bwd: dict[int, list[int]] = {}
    for (i, j) in arcs:
        fwd.setdefault(i, []).append(j)
        bwd.setdefault(j, []).append(i)
    must_in, must_out = 0, 0
    stack_in = [v for v, val in system.fixed.items() if val == 1]
    stack_out = [v for v, val in system.fixed.items() if val == 0]
    while stack_in:
        v = stack_in.pop()
        if (must_in >> v) & 1:
            continue
        must_in |= 1 << v
        stack_in.extend(fwd.get(v, ()))
    while stack_out:
        v = stack_out.pop()
        if (must_out >> v) & 1:
            continue
        must_out |= 1 << v
        stack_out.extend(bwd.get(v, ()))
    if must_in & must_out:
        return None
    return must_in, must_out


@dataclass
class _LevelSolve:
    counts: tuple[int, ...] | None
    stats: MinNormStats
    infeasible_detail: str = ""


def _solve_levels(
    system: LevelSystem,
    objective_on_counts,
    integer_valued: bool,
    cfg: SolverConfig,
) -> _LevelSolve:
    """Minimize objective(counts) over closed level sets of the system.

    Fixed variables and their implications are contracted away first; the
    remaining free variables go through the ring-constrained min-norm solve.
    """
    if system.infeasible:
        return _LevelSolve(None, MinNormStats(), "; ".join(system.infeasible))
    if system.cover_clauses or system.exclusion_clauses:
        raise ValidationError("level system is not purely monotone")
    prop = _propagate_fixes(system)
    if prop is None:
        return _LevelSolve(None, MinNormStats(), "contradictory fixings")
    must_in, must_out = prop
    free = [v for v in range(system.level_count) if not ((must_in | must_out) >> v) & 1]
    pos = {v: k for k, v in enumerate(free)}

    def expand(mask_free: int) -> int:
        full = must_in
        rem = mask_free
        k = 0
        while rem:
            if rem & 1:
                full |= 1 << free[k]
            rem >>= 1
            k += 1
        return full

    oracle = SetFunctionOracle(
        len(free),
        lambda mask: objective_on_counts(system.counts_of(expand(mask))),
        integer_valued=integer_valued,
        label="level_lift",
    )
    ring = RingFamily.of(
        (pos[i], pos[j]) for (i, j) in system.all_arcs() if i in pos and j in pos
    )
    mask, _, stats = _ring_detailed(oracle, ring, cfg)
    counts = decode_levels(system, expand(mask))
    return _LevelSolve(counts, stats)


def _stats_dict(system: LevelSystem, stats: MinNormStats) -> dict:
    return {
        "level_count": system.level_count,
        "chain_arcs": len(system.chain_arcs),
        "closure_arcs": len(system.closure_arcs),
        "cover_clauses": len(system.cover_clauses),
        "exclusion_clauses": len(system.exclusion_clauses),
        "fixed": len(system.fixed),
        "dropped_vacuous": system.dropped_vacuous,
        "sfm_iterations": stats.major_iterations,
        "penalty_retries": stats.penalty_retries,
        "duality_gap": stats.duality_gap,
    }


def _constraint_counts(inst: Instance) -> dict:
    counts = {k.value: 0 for k in ConstraintKind}
    for c in inst.constraints:
        counts[classify(c).value] += 1
    return counts


# ---------------------------------------------------------------------------
# exact route
# ---------------------------------------------------------------------------


def _require_submodular_claim(inst: Instance):
    if not inst.objective.claims_submodular:
        raise ValidationError(
            "objective does not claim submodularity; the certified pipelines require it "
            "(construct the oracle with claims_submodular=True after verifying, or use "
            "brute_force_solve)"
        )


def solve_exact_monotone(inst: Instance, *, cfg: SolverConfig = DEFAULT_CONFIG) -> SolveResult:
    """Exact minimum for instances whose constraints are all monotone or
    singleton; raises on any other constraint."""
    _require_submodular_claim(inst)
    system = build_level_system(inst.ground, inst.constraints, require_monotone=True, cfg=cfg)
    solved = _solve_levels(system, inst.objective, inst.objective.integer_valued, cfg)
    diagnostics = {"constraints": _constraint_counts(inst), **_stats_dict(system, solved.stats)}
    if solved.counts is None:
        diagnostics["infeasible_detail"] = solved.infeasible_detail
        return SolveResult(None, float("nan"), float("nan"), MODE_EXACT, float("nan"), False,
                           diagnostics=diagnostics)
    x = solved.counts
    violated = inst.violated_by(x)
    if violated:
        raise SolverError(f"internal: exact solution violates constraints {violated}")
    value = inst.objective(x)
    return SolveResult(x, value, value, MODE_EXACT, 1.0, True, diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# relaxation and roundings
# ---------------------------------------------------------------------------


def solve_relaxation(inst: Instance, *, cfg: SolverConfig = DEFAULT_CONFIG) -> RelaxationOutcome:
    """Solve the monotonized duplication exactly.

    The objective over the duplicated point is f(plus counts) + f(minus
    counts); since minus copies are stored in reversed orientation, the minus
    block evaluates f on bounds-minus-counts, i.e. through the reflected
    oracle.  When an agreeing pair (both copies equal) attains the same
    optimum, it is preferred, which makes purely monotone instances round to
    their exact optimum.
    """
    _require_submodular_claim(inst)
    mono = monotonize(inst)
    system = build_level_system(mono.ground, mono.constraints, require_monotone=True, cfg=cfg)
    f = inst.objective
    n = inst.ground.n
    u = inst.ground.bounds

    def g(counts2n: tuple[int, ...]) -> float:
        plus = counts2n[:n]
        minus = tuple(ub - v for ub, v in zip(u, counts2n[n:]))
        return f(plus) + f(minus)

    solved = _solve_levels(system, g, f.integer_valued, cfg)
    if solved.counts is None:
        raise InfeasibleSystem(
            f"monotonized system infeasible ({solved.infeasible_detail}); "
            "the original instance has no feasible point"
        )
    plus, minus = mono.split(solved.counts)
    g_value = f(plus) + f(minus)

    # The base-polytope bound of the (penalized) inner solve lower-bounds the
    # relaxed optimum whatever the penalty weight and however far the engine
    # got, so the certificate survives an inexact float solve.  Integer
    # objectives are certified exact (the gap check below 1 already passed).
    residual = max(solved.stats.duality_gap, 0.0)
    if f.integer_valued:
        certified_lower = g_value / 2.0
    else:
        certified_lower = (g_value - residual) / 2.0

    # prefer an agreeing optimum when one exists at the same value
    for cand in (plus, minus):
        agreed = tuple(cand) + tuple(ub - v for ub, v in zip(u, cand))
        if not mono.violated_by(agreed):
            cand_value = 2 * f(cand)
            if cand_value <= g_value + 1e-12:
                plus = minus = tuple(cand)
                g_value = cand_value
                break

    diagnostics = {"constraints": _constraint_counts(inst), **_stats_dict(system, solved.stats)}
    return RelaxationOutcome(
        m_plus=tuple(plus),
        m_minus=tuple(-v for v in minus),
        g_value=g_value,
        certified_lower=certified_lower,
        m_star=tuple((p + m) / 2 for p, m in zip(plus, minus)),
        diagnostics=diagnostics,
    )


def round_up(out: RelaxationOutcome, inst: Instance) -> tuple[int, ...]:
    """Componentwise max of the two copy counts (the multiset union of the
    relaxed solution pair).  Verified by substitution; a violation means the
    round-up declaration was wrong for this instance."""
    if not inst.roundup_declared:
        raise ValidationError("round_up requires the instance to declare the round-up property")
    x = tuple(max(p, m) for p, m in zip(out.m_plus, out.minus_counts))
    violated = inst.violated_by(x)
    if violated:
        raise RoundUpViolation(
            f"rounded point {x} violates constraints {violated}; "
            "the round-up declaration is inconsistent with the instance"
        )
    return x


def round_ell(out: RelaxationOutcome, z: Sequence[int], inst: Instance) -> tuple[int, ...]:
    """Clamp a feasible integer witness componentwise between the two copy
    counts.  The clamped point is always feasible; a violation here signals an
    implementation bug, not a bad instance."""
    zt = tuple(int(v) for v in z)
    if inst.violated_by(zt):
        raise ValidationError("witness point is not feasible")
    lo = tuple(min(p, m) for p, m in zip(out.m_plus, out.minus_counts))
    hi = tuple(max(p, m) for p, m in zip(out.m_plus, out.minus_counts))
    ell = tuple(min(max(v, a), b) for v, a, b in zip(zt, lo, hi))
    violated = inst.violated_by(ell)
    if violated:
        raise SolverError(
            f"internal: clamped witness {ell} violates constraints {violated}; "
            "clamping between the copy counts must preserve feasibility"
        )
    return ell


# ---------------------------------------------------------------------------
# 2-SAT feasibility
# ---------------------------------------------------------------------------


def check_feasibility_2sat(
    inst: Instance, *, cfg: SolverConfig = DEFAULT_CONFIG
) -> tuple[bool, tuple[int, ...] | None]:
    """Decide feasibility of the full system and produce an integer witness.

    All constraints binarize into implications, covers, exclusions and unit
    fixings over level indicators, which is a 2-SAT formula; the chain
    structure rides along as ordinary implications, so any satisfying
    assignment decodes to a box point.
    """
    system = build_level_system(inst.ground, inst.constraints, cfg=cfg)
    if system.infeasible:
        return False, None
    true_lit = lambda v: 2 * v
    false_lit = lambda v: 2 * v + 1
    implications: list[tuple[int, int]] = []
    for (lo, hi) in system.all_arcs():
        implications += implications_of_clause(false_lit(lo), true_lit(hi))  # lo -> hi
    for (p, q) in system.cover_clauses:
        implications += implications_of_clause(true_lit(p), true_lit(q))
    for (p, q) in system.exclusion_clauses:
        implications += implications_of_clause(false_lit(p), false_lit(q))
    for v, val in system.fixed.items():
        lit = true_lit(v) if val == 1 else false_lit(v)
        implications += [(lit ^ 1, lit)]
    assignment = solve_2sat(system.level_count, implications)
    if assignment is None:
        return False, None
    members = 0
    for v, val in enumerate(assignment):
        if val:
            members |= 1 << v
    z = decode_levels(system, members)
    violated = inst.violated_by(z)
    if violated:
        raise SolverError(f"internal: 2-SAT witness {z} violates constraints {violated}")
    return True, z


# ---------------------------------------------------------------------------
# certified 2-approximation
# ---------------------------------------------------------------------------


def _infeasible_result(inst: Instance, mode: str, diagnostics: dict | None = None) -> SolveResult:
    d = {"constraints": _constraint_counts(inst)}
    if diagnostics:
        d.update(diagnostics)
    return SolveResult(None, float("nan"), float("nan"), mode, float("nan"), False, diagnostics=d)


def _sample_nonnegativity(inst: Instance, out: RelaxationOutcome, x: tuple[int, ...], tol: float) -> bool:
    f = inst.objective
    n = inst.ground.n
    points = {
        (0,) * n,
        tuple(inst.ground.bounds),
        out.m_plus,
        out.minus_counts,
        tuple(min(p, m) for p, m in zip(out.m_plus, out.minus_counts)),
        x,
    }
    return all(f(p) >= -tol for p in points)


def solve_approx(inst: Instance, *, cfg: SolverConfig = DEFAULT_CONFIG) -> SolveResult:
    """Certified factor-2 solve for general two-variable systems.

    Requires either a declared round-up constraint matrix or a monotone
    objective; otherwise no guarantee exists and the solver refuses.  The
    reported lower bound (half the relaxed optimum) is valid for any
    objective; the factor-2 certificate additionally needs the objective to
    be nonnegative, which is sampled opportunistically and voided with a
    warning when a negative value shows up.
    """
    if not (inst.roundup_declared or inst.objective.claims_monotone):
        raise GuaranteeUnavailable(
            "no approximation guarantee available: the instance declares no round-up "
            "property and the objective does not claim monotonicity; use brute_force_solve "
            "or restate the problem"
        )
    try:
        relax = solve_relaxation(inst, cfg=cfg)
    except InfeasibleSystem:
        return _infeasible_result(inst, MODE_APPROX)

    warnings: list[str] = []
    if inst.roundup_declared:
        try:
            x = round_up(relax, inst)
        except RoundUpViolation:
            feasible, _ = check_feasibility_2sat(inst, cfg=cfg)
            if not feasible:
                return _infeasible_result(inst, MODE_APPROX, relax.diagnostics)
            raise
    else:
        feasible, z = check_feasibility_2sat(inst, cfg=cfg)
        if not feasible:
            return _infeasible_result(inst, MODE_APPROX, relax.diagnostics)
        x = round_ell(relax, z, inst)

    value = inst.objective(x)
    lower = relax.certified_lower
    tol = cfg.certificate_tol
    if not _sample_nonnegativity(inst, relax, x, tol):
        warnings.append(
            "objective sampled negative: the factor-2 certificate assumes a nonnegative "
            "objective and is void; the lower bound remains valid"
        )
    if value > 2.0 * lower + tol and not warnings:
        warnings.append("certificate exceeded: value is more than twice the lower bound")
    if lower > tol:
        ratio = value / lower
    else:
        ratio = 1.0 if value <= 2.0 * lower + tol else float("inf")
    diagnostics = dict(relax.diagnostics)
    diagnostics["g_value"] = relax.g_value
    diagnostics["m_plus"] = relax.m_plus
    diagnostics["m_minus_counts"] = relax.minus_counts
    return SolveResult(x, value, lower, MODE_APPROX, ratio, True, tuple(warnings), diagnostics)


# ---------------------------------------------------------------------------
# exhaustive reference
# ---------------------------------------------------------------------------


def brute_force_solve(inst: Instance, *, cfg: SolverConfig = DEFAULT_CONFIG) -> SolveResult:
    """Enumerate the whole box, filter by substitution, minimize; ties go to
    the lexicographically smallest point."""
    size = inst.ground.box_size()
    if size > cfg.enumeration_cap:
        raise EnumerationCapExceeded(f"box has {size} points, cap is {cfg.enumeration_cap}")
    X = enumerate_box(inst.ground)
    feasible = np.ones(len(X), dtype=bool)
    for c in inst.constraints:
        a, b, cc = cleared_coefficients(c)
        lhs = a * X[:, c.i]
        if c.j is not None:
            lhs = lhs + b * X[:, c.j]
        feasible &= lhs >= cc
    if not feasible.any():
        return _infeasible_result(inst, MODE_BRUTE)
    Xf = X[feasible]
    vals = inst.objective.eval_many(Xf)
    best = vals.min()
    ties = Xf[vals <= best + (0 if inst.objective.integer_valued else 1e-12)]
    order = np.lexsort(tuple(ties[:, k] for k in range(ties.shape[1] - 1, -1, -1)))
    x = tuple(int(v) for v in ties[order[0]])
    value = inst.objective(x)
    return SolveResult(
        x, value, value, MODE_BRUTE, 1.0, True,
        diagnostics={"constraints": _constraint_counts(inst), "points": int(size),
                     "feasible_points": int(feasible.sum())},
    )


def solve_auto(inst: Instance, *, cfg: SolverConfig = DEFAULT_CONFIG) -> SolveResult:
    """Dispatch on constraint classification: all monotone/singleton goes to
    the exact solver, anything else to the certified approximation."""
    if inst.kinds() <= {ConstraintKind.MONOTONE, ConstraintKind.SINGLETON}:
        return solve_exact_monotone(inst, cfg=cfg)
    return solve_approx(inst, cfg=cfg)
