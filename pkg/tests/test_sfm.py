import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import submod2 as s
from submod2 import (
    RingFamily,
    SetFunctionOracle,
    greedy_base_vertex,
    sfm_bruteforce,
    sfm_minnorm,
    sfm_over_ring,
)
from submod2.errors import EnumerationCapExceeded, ValidationError

import gen


def modular_oracle(w):
    return SetFunctionOracle(
        len(w),
        lambda mask: sum(w[i] for i in range(len(w)) if (mask >> i) & 1),
        integer_valued=all(v == int(v) for v in w),
        label="modular",
    )


def triangle_cut():
    edges = [(0, 1), (1, 2), (0, 2)]
    return SetFunctionOracle(
        3,
        lambda mask: sum(1 for (i, j) in edges if ((mask >> i) & 1) != ((mask >> j) & 1)),
        integer_valued=True,
        label="triangle_cut",
    )


def test_bruteforce_picks_negative_weights():
    sub, val = sfm_bruteforce(modular_oracle([-1, 2, -3]))
    assert sub == {0, 2}
    assert val == -4


def test_bruteforce_triangle_cut_empty():
    sub, val = sfm_bruteforce(triangle_cut())
    assert sub == frozenset()
    assert val == 0


def test_bruteforce_tie_breaks_to_lexicographically_smallest():
    sub, val = sfm_bruteforce(modular_oracle([0, 0]))
    assert sub == frozenset()
    assert val == 0


def test_bruteforce_cap():
    with pytest.raises(EnumerationCapExceeded):
        sfm_bruteforce(modular_oracle([0] * 23))


def test_greedy_vertex_of_modular_is_the_weights():
    w = [3, -1, 2, 0]
    f = modular_oracle(w)
    for order in ([0, 1, 2, 3], [3, 2, 1, 0], [1, 3, 0, 2]):
        assert np.allclose(greedy_base_vertex(f, order), w)


def test_greedy_vertex_triangle_cut_frozen_values():
    y = greedy_base_vertex(triangle_cut(), [0, 1, 2])
    assert np.allclose(y, [2, 0, -2])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_greedy_vertex_telescopes_and_stays_in_base_polytope(seed):
    rng = random.Random(seed)
    m = rng.randint(1, 6)
    f = gen.random_set_oracle(rng, m)
    order = list(range(m))
    rng.shuffle(order)
    y = greedy_base_vertex(f, order)
    full = (1 << m) - 1
    assert y.sum() == pytest.approx(f(full) - f(0))
    for mask in range(1 << m):
        total = sum(y[i] for i in range(m) if (mask >> i) & 1)
        assert total <= f(mask) - f(0) + 1e-9


def test_greedy_vertex_requires_permutation():
    with pytest.raises(ValidationError):
        greedy_base_vertex(modular_oracle([1, 2]), [0, 0])


def test_minnorm_matches_modular_optimum():
    sub, val = sfm_minnorm(modular_oracle([-1, 2, -3]))
    assert val == -4
    assert sub == {0, 2}


def test_minnorm_reports_empty_set_for_nonnegative_functions():
    f = SetFunctionOracle(4, lambda mask: mask.bit_count() ** 0.5)
    sub, val = sfm_minnorm(f)
    assert sub == frozenset()
    assert val == 0


def test_minnorm_equals_bruteforce_on_random_mixes():
    rng = random.Random(42)
    for _ in range(40):
        m = rng.randint(1, 9)
        f = gen.random_set_oracle(rng, m)
        _, expected = sfm_bruteforce(f)
        _, got = sfm_minnorm(f)
        assert got == expected


def test_ring_minimization_respects_arcs():
    f = modular_oracle([-5, 3])
    sub, val = sfm_over_ring(f, RingFamily.of([(0, 1)]))
    assert sub == {0, 1}
    assert val == -2


def test_ring_empty_equals_unconstrained():
    rng = random.Random(9)
    for _ in range(10):
        f = gen.random_set_oracle(rng, rng.randint(1, 6))
        assert sfm_over_ring(f, RingFamily.of([]))[1] == sfm_minnorm(f)[1]


def test_ring_cycle_forces_all_or_nothing():
    rng = random.Random(21)
    for _ in range(10):
        m = rng.randint(2, 6)
        f = gen.random_set_oracle(rng, m)
        cycle = [(i, (i + 1) % m) for i in range(m)]
        sub, val = sfm_over_ring(f, RingFamily.of(cycle))
        full = (1 << m) - 1
        assert sub in (frozenset(), frozenset(range(m)))
        assert val == min(f(0), f(full))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_ring_output_satisfies_every_arc_and_is_optimal(seed):
    rng = random.Random(seed)
    m = rng.randint(2, 7)
    f = gen.random_set_oracle(rng, m)
    arcs = gen.random_dag(rng, m, p=0.4)
    sub, val = sfm_over_ring(f, RingFamily.of(arcs))
    assert all(j in sub for (i, j) in arcs if i in sub)
    # independent check: enumerate closed sets
    best = min(
        f.eval_set(set(c))
        for r in range(m + 1)
        for c in itertools.combinations(range(m), r)
        if all(j in c for (i, j) in arcs if i in c)
    )
    assert val == best


def test_arc_violation_penalty_is_a_submodular_cut_function():
    arcs = [(0, 1), (2, 0), (1, 3)]
    bits = [(1 << i, 1 << j) for i, j in arcs]
    pen = s.SubmodularOracle(
        s.GroundSet.binary(4),
        lambda x: sum(1 for bi, bj in bits
                      if x[bi.bit_length() - 1] and not x[bj.bit_length() - 1]),
    )
    assert s.verify_submodular(pen)


def test_ring_rejects_out_of_range_arcs():
    with pytest.raises(ValidationError):
        sfm_over_ring(modular_oracle([1, 2]), RingFamily.of([(0, 5)]))


def test_set_oracle_adapter_requires_binary_ground():
    multi = s.make_family(s.Modular((1, 1)), s.GroundSet((2, 2)))
    with pytest.raises(ValidationError):
        SetFunctionOracle.from_multiset(multi)
    binary = s.make_family(s.Modular((2, -1)), s.GroundSet.binary(2))
    adapted = SetFunctionOracle.from_multiset(binary)
    assert adapted(0b01) == 2
    assert adapted(0b10) == -1
