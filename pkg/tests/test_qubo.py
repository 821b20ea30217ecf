import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import edgeless, gnp, path
from rsiplan.graph import Coloring, ConflictGraph, colors_used, is_legal
from rsiplan.qubo import (
    InfeasibleStartError,
    Qubo,
    build_qubo,
    decode,
    encode,
    energies,
    energy,
    min_colors_search,
    read_qubo,
    write_qubo,
)
from rsiplan.solvers import SampleSet, brute_force


def direct_h(g, C, x, a=1.0, b=1.0):
    """Unexpanded penalty sum, evaluated with plain loops."""
    n = g.num_vertices
    row = lambda v: [x[v * C + c] for c in range(C)]
    h = sum(a * (1 - sum(row(v))) ** 2 for v in range(n))
    for u, v in g.edges():
        h += b * sum(x[u * C + c] * x[v * C + c] for c in range(C))
    return h


class TestBuild:
    def test_k3_coefficients(self, k3):
        q = build_qubo(k3, 3)
        assert q.num_vars == 9 and q.offset == 3.0
        assert list(q.linear) == [-1.0] * 9
        quad = q.quadratic
        same = {k: v for k, v in quad.items() if k[0] // 3 == k[1] // 3}
        cross = {k: v for k, v in quad.items() if k[0] // 3 != k[1] // 3}
        assert len(same) == 9 and set(same.values()) == {2.0}
        assert len(cross) == 9 and set(cross.values()) == {1.0}
        assert all(i % 3 == j % 3 for i, j in cross)

    def test_edgeless_single_color(self):
        q = build_qubo(edgeless(4), 1)
        assert energy(q, np.ones(4, dtype=int)) == 0.0

    @pytest.mark.parametrize("args", [(0, 1, 1), (2, 0, 1), (2, 1, -1)])
    def test_errors(self, k3, args):
        with pytest.raises(ValueError):
            build_qubo(k3, *args)

    def test_var_map(self, k3):
        q = build_qubo(k3, 3)
        assert [q.var_index(*q.var_pair(i)) for i in range(9)] == list(range(9))
        assert q.var_index(2, 1) == 7
        with pytest.raises(IndexError):
            q.var_index(3, 0)

    def test_keys_sorted_unique(self):
        q = build_qubo(gnp(30, 0.3, 4), 4)
        keys = q.rows * q.num_vars + q.cols
        assert np.all(q.rows < q.cols) and np.all(np.diff(keys) > 0)

    def test_dense_matches_sparse(self):
        q = build_qubo(gnp(8, 0.4, 1), 3)
        x = np.random.default_rng(0).integers(0, 2, q.num_vars)
        assert x @ q.dense() @ x + q.offset == pytest.approx(energy(q, x))


def test_expansion_matches_direct_penalty_on_1000_pairs():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for trial in range(1000):
        n = int(rng.integers(1, 12))
        C = int(rng.integers(1, 5))
        a, b = float(rng.uniform(0.1, 3)), float(rng.uniform(0.1, 3))
        g = gnp(n, float(rng.choice([0.1, 0.4, 0.8])), trial)
        q = build_qubo(g, C, a, b)
        x = rng.integers(0, 2, q.num_vars)
        worst = max(worst, abs(energy(q, x) - direct_h(g, C, x, a, b)))
    assert worst <= 1e-9


class TestEnergy:
    def test_all_zeros_is_offset(self):
        for a in (1.0, 2.5):
            q = build_qubo(gnp(7, 0.5, 0), 3, penalty_a=a)
            assert energy(q, np.zeros(q.num_vars)) == a * 7

    def test_legal_is_zero(self, k3):
        q = build_qubo(k3, 3)
        assert energy(q, encode(Coloring((0, 1, 2), 3), q)) == 0.0

    def test_one_shared_edge_costs_b(self, k3):
        q = build_qubo(k3, 3, penalty_b=1.5)
        assert energy(q, encode(Coloring((0, 0, 2), 3), q)) == 1.5

    def test_length_mismatch(self, k3):
        q = build_qubo(k3, 3)
        with pytest.raises(ValueError):
            energy(q, np.zeros(8))
        with pytest.raises(ValueError):
            energy(q, np.full(9, 2))

    def test_batch_agrees(self):
        q = build_qubo(gnp(10, 0.3, 5), 3)
        xs = np.random.default_rng(1).integers(0, 2, (50, q.num_vars))
        assert np.allclose(energies(q, xs), [energy(q, x) for x in xs], atol=1e-12)


class TestEncodeDecode:
    def test_k3_indices(self, k3):
        q = build_qubo(k3, 3)
        assert list(np.flatnonzero(encode(Coloring((0, 1, 2), 3), q))) == [0, 4, 8]

    def test_single_vertex(self):
        q = build_qubo(edgeless(1), 1)
        assert list(encode(Coloring((0,), 1), q)) == [1]

    def test_round_trip(self):
        q = build_qubo(path(6), 4)
        rng = np.random.default_rng(3)
        for _ in range(50):
            c = Coloring(tuple(int(v) for v in rng.integers(0, 4, 6)), 4)
            x = encode(c, q)
            assert x.sum() == 6
            assert decode(x, q) == c

    def test_violations_decode_unassigned(self):
        q = build_qubo(path(3), 2)
        assert decode([1, 0, 0, 0, 1, 1], q).assignment == (0, None, None)

    def test_encode_errors(self, k3):
        q = build_qubo(k3, 2)
        with pytest.raises(ValueError):
            encode(Coloring((0, None, 1), 2), q)
        with pytest.raises(ValueError):
            encode(Coloring((0, 2, 1), 3), q)
        with pytest.raises(ValueError):
            encode(Coloring((0, 1), 2), q)

    def test_decode_length(self, k3):
        with pytest.raises(ValueError):
            decode(np.zeros(5), build_qubo(k3, 2))


def all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield ConflictGraph.from_edges(n, [p for i, p in enumerate(pairs) if mask >> i & 1])


@pytest.mark.parametrize("n, C", [(1, 1), (2, 2), (3, 2), (3, 3), (4, 2)])
def test_zero_energy_iff_legal_exhaustive(n, C):
    # every binary vector, decoded: energy 0 exactly when it is a legal coloring
    m = n * C
    xs = ((np.arange(1 << m)[:, None] >> np.arange(m)) & 1).astype(np.int8)
    for g in all_graphs(n):
        q = build_qubo(g, C)
        e = energies(q, xs)
        legal = np.array([is_legal(g, decode(x, q)) for x in xs])
        assert np.array_equal(np.abs(e) <= 1e-9, legal)
        assert np.all(e >= -1e-9)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 8), C=st.integers(1, 4), seed=st.integers(0, 2**31), a=st.floats(0.1, 5), b=st.floats(0.1, 5))
def test_one_hot_violation_costs_at_least_min_penalty(n, C, seed, a, b):
    rng = np.random.default_rng(seed)
    g = gnp(n, 0.4, seed)
    colors = [int(c) for c in rng.integers(0, C, n)]
    # edge terms are non-negative, so breaking one row alone must cost at least A
    q = build_qubo(g, C, a, b)
    x = encode(Coloring(tuple(colors), C), q)
    v = int(rng.integers(n))
    row = slice(v * C, (v + 1) * C)
    if rng.random() < 0.5 or C == 1:
        x[row] = 0
    else:
        x[row] = 1
    assert energy(q, x) >= min(a, b) - 1e-12


def test_text_round_trip():
    q = build_qubo(gnp(12, 0.3, 8), 3, 1.25, 0.75)
    back = read_qubo(write_qubo(q))
    assert back.num_vars == q.num_vars and back.offset == q.offset
    assert np.array_equal(back.linear, q.linear)
    assert back.quadratic == q.quadratic
    x = np.random.default_rng(0).integers(0, 2, q.num_vars)
    assert energy(back, x) == energy(q, x)


def test_text_format_k1():
    q = build_qubo(edgeless(1), 2)
    assert write_qubo(q) == "2 1.0\n0 0 -1.0\n1 1 -1.0\n0 1 2.0\n"


@pytest.mark.parametrize("text", ["", "3\n", "2 0\n1 0 1.0\n", "2 0\n0 5 1\n", "2 0\n0 1\n"])
def test_read_errors(text):
    with pytest.raises(ValueError):
        read_qubo(text)


def test_from_terms_merges():
    q = Qubo.from_terms([0.0, 0.0, 0.0], {(1, 0): 1.0, (0, 1): 2.0, (2, 2): -4.0})
    assert q.quadratic == {(0, 1): 3.0} and q.linear[2] == -4.0


def test_qubo_validation():
    with pytest.raises(ValueError):
        Qubo(np.zeros(3), np.array([1]), np.array([0]), np.array([1.0]))
    with pytest.raises(ValueError):
        Qubo(np.zeros(3), np.array([0, 0]), np.array([1, 1]), np.array([1.0, 1.0]))


def exact(q):
    return brute_force(q)


class TestMinColorsSearch:
    def test_k3(self, k3):
        k, c = min_colors_search(k3, exact, c_start=3)
        assert k == 3 and is_legal(k3, c)

    def test_p3(self):
        g = path(3)
        k, c = min_colors_search(g, exact, c_start=3)
        assert k == 2 and is_legal(g, c) and c.palette_size == 2

    def test_edgeless(self):
        k, c = min_colors_search(edgeless(4), exact)
        assert k == 1 and c.assignment == (0, 0, 0, 0)

    def test_empty_graph(self):
        assert min_colors_search(ConflictGraph.from_edges(0, []), exact) == (0, Coloring((), 0))

    def test_infeasible_start(self, k3):
        with pytest.raises(InfeasibleStartError):
            min_colors_search(k3, exact, c_start=2)

    def test_default_start_matches_chromatic(self):
        g = gnp(6, 0.5, 11)
        calls = []

        def solver(q):
            calls.append(q.num_colors)
            return brute_force(q)

        k, c = min_colors_search(g, solver)
        assert is_legal(g, c) and colors_used(c) == k
        assert calls == sorted(calls, reverse=True)
        # the exhaustive solver stops one below the true chromatic number
        assert calls[-1] == k - 1 or k == 1

    def test_solver_returning_nothing_feasible(self, k3):
        def bad(q):
            return SampleSet.from_states(q, np.zeros((1, q.num_vars)))

        with pytest.raises(InfeasibleStartError):
            min_colors_search(k3, bad)
