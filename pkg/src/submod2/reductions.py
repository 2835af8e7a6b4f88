"""Two-variable inequality systems over bounded integer variables and their
reductions to binary form.

Constraints are stored uniformly as a*x_i + b*x_j >= c with exact rational
coefficients.  A constraint is *monotone* when a and b have strictly opposite
signs; systems of monotone (and singleton) constraints binarize into pure
precedence arcs between level indicator variables and are solvable exactly as
closed-set problems.  General constraints additionally produce cover clauses
(at-least-one) for positive-positive sign patterns and mutual-exclusion
clauses for negative-negative ones, which together feed the 2-SAT feasibility
engine.

Level indicators follow the usual threshold convention: the p-th indicator of
element i is 1 exactly when x_i >= p, so per element the indicators form a
chain and any chain-respecting assignment is a prefix of ones.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .config import DEFAULT_CONFIG, SolverConfig
from .core import GroundSet, SubmodularOracle
from .errors import ChainViolation, ValidationError


def _rat(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise ValidationError("coefficients must be numbers")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        # exact value of the printed decimal, not of the binary float
        return Fraction(repr(v))
    raise ValidationError(f"cannot interpret coefficient {v!r}")


class ConstraintKind(enum.Enum):
    MONOTONE = "monotone"
    NON_MONOTONE = "non_monotone"
    SINGLETON = "singleton"


@dataclass(frozen=True)
class Constraint:
    """a*x_i + b*x_j >= c; ``j`` may be None for singleton constraints."""

    i: int
    a: Fraction
    j: int | None
    b: Fraction
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", _rat(self.a))
        object.__setattr__(self, "b", _rat(self.b))
        object.__setattr__(self, "c", _rat(self.c))
        if self.j is None and self.b != 0:
            raise ValidationError("singleton constraint must have b = 0")
        if self.a == 0 and self.b == 0:
            raise ValidationError("constraint needs a nonzero coefficient")
        if self.j is not None and self.i == self.j:
            raise ValidationError("the two variables of a constraint must differ")

    @staticmethod
    def single(i: int, a, c) -> "Constraint":
        return Constraint(i, _rat(a), None, Fraction(0), _rat(c))

    @staticmethod
    def pair(i: int, a, j: int, b, c) -> "Constraint":
        return Constraint(i, _rat(a), j, _rat(b), _rat(c))

    def as_tuple(self):
        return (self.i, self.a, self.j, self.b, self.c)

    def holds(self, x: Sequence[int]) -> bool:
        lhs = self.a * x[self.i]
        if self.j is not None:
            lhs += self.b * x[self.j]
        return lhs >= self.c

    def __str__(self):
        if self.j is None or self.b == 0:
            return f"{self.a}*x{self.i} >= {self.c}"
        return f"{self.a}*x{self.i} + {self.b}*x{self.j} >= {self.c}"


def classify(c: Constraint) -> ConstraintKind:
    if c.j is None or c.a == 0 or c.b == 0:
        return ConstraintKind.SINGLETON
    if (c.a > 0) != (c.b > 0):
        return ConstraintKind.MONOTONE
    return ConstraintKind.NON_MONOTONE


def cleared_coefficients(c: Constraint) -> tuple[int, int, int]:
    """Integer (a, b, c) with the same feasible set, denominators cleared."""
    mult = lcm(c.a.denominator, c.b.denominator, c.c.denominator)
    return (int(c.a * mult), int(c.b * mult), int(c.c * mult))


@dataclass(frozen=True)
class Instance:
    """A constrained multiset minimization instance: box, two-variable
    inequalities, objective oracle, and whether the constraint matrix was
    declared to allow rounding every feasible half-integral point upward."""

    ground: GroundSet
    constraints: tuple[Constraint, ...]
    objective: SubmodularOracle
    roundup_declared: bool = False
    name: str = ""

    def __post_init__(self):
        if self.objective.ground.bounds != self.ground.bounds:
            raise ValidationError("objective ground does not match the instance ground")
        for k, c in enumerate(self.constraints):
            if not 0 <= c.i < self.ground.n or (c.j is not None and not 0 <= c.j < self.ground.n):
                raise ValidationError(f"constraint {k} references an element out of range")

    def violated_by(self, x: Sequence[int]) -> list[int]:
        return [k for k, c in enumerate(self.constraints) if not c.holds(x)]

    def kinds(self) -> set[ConstraintKind]:
        return {classify(c) for c in self.constraints}


# ---------------------------------------------------------------------------
# per-constraint binarization fragments
# ---------------------------------------------------------------------------

Level = tuple[int, int]  # (element, level p >= 1)


@dataclass
class Fragment:
    """Binary-level constraints produced from one inequality.  Closure arcs
    are (lo, hi) pairs meaning lo <= hi; cover clauses demand lo + hi >= 1;
    exclusion clauses demand at most one of the pair."""

    closure_arcs: list[tuple[Level, Level]] = field(default_factory=list)
    cover_clauses: list[tuple[Level, Level]] = field(default_factory=list)
    exclusion_clauses: list[tuple[Level, Level]] = field(default_factory=list)
    fix_one: list[Level] = field(default_factory=list)
    fix_zero: list[Level] = field(default_factory=list)
    infeasible_reason: str | None = None

    @property
    def vacuous(self) -> bool:
        return (
            self.infeasible_reason is None
            and not self.closure_arcs
            and not self.cover_clauses
            and not self.exclusion_clauses
            and not self.fix_one
            and not self.fix_zero
        )

    def _infeasible(self, reason: str) -> "Fragment":
        self.infeasible_reason = reason
        return self


def _ceil_div(p: int, q: int) -> int:
    # q > 0
    return -((-p) // q)


def _floor_div(p: int, q: int) -> int:
    # q > 0
    return p // q


def _binarize_singleton(idx: int, a: int, c: int, ground: GroundSet) -> Fragment:
    frag = Fragment()
    u = ground.bounds[idx]
    if a > 0:
        lower = _ceil_div(c, a)
        if lower > u:
            return frag._infeasible(f"x{idx} >= {lower} but its bound is {u}")
        if lower >= 1:
            frag.fix_one.append((idx, lower))
    else:
        upper = _floor_div(-c, -a)
        if upper < 0:
            return frag._infeasible(f"x{idx} <= {upper} is impossible")
        if upper < u:
            frag.fix_zero.append((idx, upper + 1))
    return frag


def binarize_monotone(c: Constraint, ground: GroundSet) -> Fragment:
    """Translate one monotone inequality into precedence arcs and fixings on
    level indicators.

    Writing the constraint as A*head - B*tail >= C with A, B > 0, the level
    threshold q(p) = ceil((C + B*p) / A) gives tail_p <= head_{q(p)} for each
    tail level p; q(p) above the head bound forbids the tail level, below 1 it
    imposes nothing.  The p = 0 term carries the unconditional part: even a
    zero tail forces head >= q(0).
    """
    kind = classify(c)
    if kind == ConstraintKind.SINGLETON:
        a, b, cc = cleared_coefficients(c)
        if a != 0:
            return _binarize_singleton(c.i, a, cc, ground)
        return _binarize_singleton(c.j, b, cc, ground)
    if kind != ConstraintKind.MONOTONE:
        raise ValidationError(f"constraint {c} is not monotone")
    a, b, cc = cleared_coefficients(c)
    if a > 0:
        head, tail, A, B = c.i, c.j, a, -b
    else:
        head, tail, A, B = c.j, c.i, b, -a
    frag = Fragment()
    u_head, u_tail = ground.bounds[head], ground.bounds[tail]
    for p in range(0, u_tail + 1):
        q = _ceil_div(cc + B * p, A)
        if p == 0:
            if q > u_head:
                return frag._infeasible(f"{c} forces x{head} >= {q} > bound {u_head}")
            if q >= 1:
                frag.fix_one.append((head, q))
        else:
            if q > u_head:
                frag.fix_zero.append((tail, p))
            elif q >= 1:
                frag.closure_arcs.append(((tail, p), (head, q)))
            # q < 1: satisfied at this level regardless
    return frag


def binarize_general(c: Constraint, ground: GroundSet) -> Fragment:
    """Translate any two-variable inequality into level-indicator constraints.

    Positive-positive constraints become cover clauses: for each level l of
    x_i, either x_i exceeds l or x_j reaches ceil((c - l*a) / b); a demand
    beyond x_j's bound pins the x_i indicator to 1, and the l = u_i term
    becomes an unconditional demand on x_j.  Negative-negative constraints
    mirror into mutual exclusions between the levels whose combined weight
    overshoots the slack.  Monotone and singleton constraints route through
    their own translations.
    """
    kind = classify(c)
    if kind in (ConstraintKind.SINGLETON, ConstraintKind.MONOTONE):
        return binarize_monotone(c, ground)

    a, b, cc = cleared_coefficients(c)
    i, j = c.i, c.j
    u_i, u_j = ground.bounds[i], ground.bounds[j]
    frag = Fragment()

    if a > 0 and b > 0:
        if cc <= 0:
            return frag
        if cc > a * u_i + b * u_j:
            return frag._infeasible(f"{c} exceeds the box maximum {a * u_i + b * u_j}")
        for level in range(0, u_i + 1):
            need_j = _ceil_div(cc - level * a, b)
            if need_j <= 0:
                continue
            if level < u_i:
                if need_j > u_j:
                    frag.fix_one.append((i, level + 1))
                else:
                    frag.cover_clauses.append(((i, level + 1), (j, need_j)))
            else:
                frag.fix_one.append((j, need_j))  # need_j <= u_j by the box check
        return frag

    # both coefficients negative: A*x_i + B*x_j <= C with A, B > 0
    A, B, C = -a, -b, -cc
    if C < 0:
        return frag._infeasible(f"{c} is violated by every box point")
    if C >= A * u_i + B * u_j:
        return frag
    for level in range(0, u_i + 1):
        max_j = _floor_div(C - A * level, B)
        if max_j >= u_j:
            continue
        if level == 0:
            frag.fix_zero.append((j, max_j + 1))
        elif max_j < 0:
            frag.fix_zero.append((i, level))
        else:
            frag.exclusion_clauses.append(((i, level), (j, max_j + 1)))
    return frag


# ---------------------------------------------------------------------------
# assembled level systems
# ---------------------------------------------------------------------------


@dataclass
class LevelSystem:
    """All level variables of a ground set plus the binarized constraints.

    Level variables are numbered element-major: element i owns the ids
    offsets[i] .. offsets[i] + u_i - 1, id offsets[i] + (p - 1) standing for
    the indicator of x_i >= p.  Chain arcs encode the threshold structure and
    are present for every element regardless of the constraints.
    """

    ground: GroundSet
    offsets: tuple[int, ...]
    chain_arcs: list[tuple[int, int]]
    closure_arcs: list[tuple[int, int]]
    cover_clauses: list[tuple[int, int]]
    exclusion_clauses: list[tuple[int, int]]
    fixed: dict[int, int]
    infeasible: list[str]
    dropped_vacuous: int

    @property
    def level_count(self) -> int:
        return self.ground.total_levels()

    def var(self, element: int, level: int) -> int:
        if not 1 <= level <= self.ground.bounds[element]:
            raise ValidationError(f"level {level} out of range for element {element}")
        return self.offsets[element] + level - 1

    def elem_level(self, var: int) -> tuple[int, int]:
        for i in range(self.ground.n - 1, -1, -1):
            if var >= self.offsets[i]:
                return i, var - self.offsets[i] + 1
        raise ValidationError(f"variable id {var} out of range")

    def all_arcs(self) -> list[tuple[int, int]]:
        return self.chain_arcs + self.closure_arcs

    def counts_of(self, members: int) -> tuple[int, ...]:
        """Per-element number of set level indicators of a bitmask over the
        level ids; ignores chain structure (used as the objective lift)."""
        out = []
        for i, u in enumerate(self.ground.bounds):
            block = ((1 << u) - 1) << self.offsets[i]
            out.append((members & block).bit_count())
        return tuple(out)

    def to_json_dict(self) -> dict:
        return {
            "element_count": self.ground.n,
            "bounds": list(self.ground.bounds),
            "level_count": self.level_count,
            "levels": [
                {"var": self.var(i, p), "element": i, "level": p}
                for i in range(self.ground.n)
                for p in range(1, self.ground.bounds[i] + 1)
            ],
            "chain_arcs": [list(a) for a in self.chain_arcs],
            "closure_arcs": [list(a) for a in self.closure_arcs],
            "cover_clauses": [list(a) for a in self.cover_clauses],
            "exclusion_clauses": [list(a) for a in self.exclusion_clauses],
            "fixed": {str(k): v for k, v in sorted(self.fixed.items())},
            "infeasible": list(self.infeasible),
            "dropped_vacuous": self.dropped_vacuous,
        }


def build_level_system(
    ground: GroundSet,
    constraints: Iterable[Constraint],
    *,
    require_monotone: bool = False,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> LevelSystem:
    """Binarize a whole constraint system over one ground set.

    Vacuous constraints are dropped (counted), box-infeasible ones are
    recorded in ``infeasible`` rather than raised, and conflicting fixings are
    detected here so downstream solvers can trust the fixed map.
    """
    total = ground.total_levels()
    if total > cfg.level_budget:
        raise ValidationError(f"{total} level variables exceed the budget {cfg.level_budget}")
    offsets = []
    acc = 0
    for u in ground.bounds:
        offsets.append(acc)
        acc += u
    system = LevelSystem(
        ground=ground,
        offsets=tuple(offsets),
        chain_arcs=[],
        closure_arcs=[],
        cover_clauses=[],
        exclusion_clauses=[],
        fixed={},
        infeasible=[],
        dropped_vacuous=0,
    )
    for i, u in enumerate(ground.bounds):
        for p in range(2, u + 1):
            system.chain_arcs.append((system.var(i, p), system.var(i, p - 1)))

    seen_arcs: set[tuple[int, int]] = set()
    seen_covers: set[tuple[int, int]] = set()
    seen_excl: set[tuple[int, int]] = set()
    for k, c in enumerate(constraints):
        kind = classify(c)
        if require_monotone and kind == ConstraintKind.NON_MONOTONE:
            raise ValidationError(f"constraint {k} ({c}) is not monotone")
        frag = binarize_general(c, ground)
        if frag.infeasible_reason is not None:
            system.infeasible.append(f"constraint {k}: {frag.infeasible_reason}")
            continue
        if frag.vacuous:
            system.dropped_vacuous += 1
            continue
        for (lo, hi) in frag.closure_arcs:
            arc = (system.var(*lo), system.var(*hi))
            if arc not in seen_arcs:
                seen_arcs.add(arc)
                system.closure_arcs.append(arc)
        for (p, q) in frag.cover_clauses:
            clause = tuple(sorted((system.var(*p), system.var(*q))))
            if clause not in seen_covers:
                seen_covers.add(clause)
                system.cover_clauses.append(clause)
        for (p, q) in frag.exclusion_clauses:
            clause = tuple(sorted((system.var(*p), system.var(*q))))
            if clause not in seen_excl:
                seen_excl.add(clause)
                system.exclusion_clauses.append(clause)
        for lv in frag.fix_one:
            _merge_fix(system, system.var(*lv), 1, k)
        for lv in frag.fix_zero:
            _merge_fix(system, system.var(*lv), 0, k)
    return system


def _merge_fix(system: LevelSystem, var: int, value: int, origin: int):
    old = system.fixed.get(var)
    if old is not None and old != value:
        elem, level = system.elem_level(var)
        system.infeasible.append(
            f"constraint {origin}: level {level} of x{elem} is forced both ways"
        )
        return
    system.fixed[var] = value


def decode_levels(system: LevelSystem, members: Iterable[int] | int) -> tuple[int, ...]:
    """Integer point from a set of level-variable ids; the assignment must be
    a prefix of ones per element (anything else means the producing solver is
    broken, not the instance)."""
    mask = members if isinstance(members, int) else 0
    if not isinstance(members, int):
        for v in members:
            mask |= 1 << int(v)
    counts = system.counts_of(mask)
    for i, u in enumerate(system.ground.bounds):
        for p in range(1, counts[i] + 1):
            if not (mask >> system.var(i, p)) & 1:
                raise ChainViolation(
                    f"element {i}: {counts[i]} levels set but level {p} missing"
                )
    return counts


# ---------------------------------------------------------------------------
# monotonizing duplication
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Monotonized:
    """Duplicated, purely monotone system over 2n variables.

    Variable k < n is the plus copy of element k and carries its value
    directly.  Variable n + k is the minus copy *in reversed orientation*:
    the stored value t corresponds to a minus-copy count of u_k - t, so that
    every duplicated constraint is monotone in the plain sign convention and
    level indicators keep their natural threshold meaning.
    """

    ground: GroundSet
    constraints: tuple[Constraint, ...]
    base: Instance

    @property
    def n(self) -> int:
        return self.base.ground.n

    def embed(self, x: Sequence[int]) -> tuple[int, ...]:
        """The duplicated image of an original point (both copies agree)."""
        u = self.base.ground.bounds
        return tuple(x) + tuple(ub - v for ub, v in zip(u, x))

    def split(self, x2n: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(plus-copy counts, minus-copy counts) of a duplicated point."""
        n = self.n
        u = self.base.ground.bounds
        plus = tuple(int(v) for v in x2n[:n])
        minus = tuple(int(ub - v) for ub, v in zip(u, x2n[n:]))
        return plus, minus

    def violated_by(self, x2n: Sequence[int]) -> list[int]:
        return [k for k, c in enumerate(self.constraints) if not c.holds(x2n)]


def monotonize(inst: Instance) -> Monotonized:
    """Duplicate each element into a plus and a (reversed) minus copy and
    split every inequality into two monotone ones.

    A same-sign constraint a*x_i + b*x_j >= c splits across the copies, one
    inequality pairing the plus copy of i with the minus copy of j and one the
    reverse; a monotone constraint duplicates onto the plus pair and the minus
    pair.  With the minus copies stored in reversed orientation (t stands for
    a count of u - t), every produced inequality is again of the plain
    two-variable form and classifies monotone, and any original-feasible x
    embeds as the agreeing duplicated point.
    """
    n = inst.ground.n
    u = inst.ground.bounds
    ground2 = GroundSet(tuple(u) + tuple(u))
    out: list[Constraint] = []
    for c in inst.constraints:
        kind = classify(c)
        if kind == ConstraintKind.SINGLETON:
            if c.a != 0:
                k, coef = c.i, c.a
            else:
                k, coef = c.j, c.b
            out.append(Constraint.single(k, coef, c.c))
            out.append(Constraint.single(n + k, -coef, c.c - coef * u[k]))
        elif kind == ConstraintKind.MONOTONE:
            out.append(Constraint.pair(c.i, c.a, c.j, c.b, c.c))
            out.append(
                Constraint.pair(n + c.i, -c.a, n + c.j, -c.b, c.c - c.a * u[c.i] - c.b * u[c.j])
            )
        else:
            out.append(Constraint.pair(c.i, c.a, n + c.j, -c.b, c.c - c.b * u[c.j]))
            out.append(Constraint.pair(n + c.i, -c.a, c.j, c.b, c.c - c.a * u[c.i]))
    return Monotonized(ground2, tuple(out), inst)
