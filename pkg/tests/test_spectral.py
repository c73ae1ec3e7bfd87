import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ergolab.eqrel import Automorphism
from ergolab.instances import random_graphing
from ergolab.spectral import (ClassGraph, Graphing, average_norm, class_graphs, iso_bound_check,
                              isoperimetric, operator_norm, tree_ball_norm_oracle, tree_norm,
                              window_norm, word_products)
from ergolab.windows import path_window, tree_ball


def test_swap_gives_two_parallel_edges():
    g = Graphing.from_perms([(1, 0)])
    (cg,) = class_graphs(g)
    assert len(cg.edges) == 2
    assert cg.degrees() == {0: 2, 1: 2}
    assert cg.adjacency().tolist() == [[0, 2], [2, 0]]


def test_identity_on_singleton_is_a_loop_of_degree_two():
    (cg,) = class_graphs(Graphing.from_perms([(0,)]))
    assert cg.adjacency().tolist() == [[2]]
    assert operator_norm(Graphing.from_perms([(0,)])).value == 2


@given(st.integers(0, 200))
def test_edge_count_and_regular_norm(seed):
    g = random_graphing(seed, max_points=7, max_gens=3)
    graphs = class_graphs(g)
    assert sum(len(cg.edges) for cg in graphs) == g.n * g.rel.n
    for cg in graphs:
        assert set(cg.degrees().values()) == {2 * g.n}
    # every class graph is connected and 2n-regular, so the norm is exactly 2n
    assert operator_norm(g).value == pytest.approx(2 * g.n, abs=1e-12)


def test_four_cycle_norm():
    assert operator_norm(Graphing.from_perms([(1, 2, 3, 0)])).value == pytest.approx(2.0)


def test_three_cycle_plus_identity():
    g = Graphing.from_perms([(1, 2, 0), (0, 1, 2)])
    (cg,) = class_graphs(g)
    C3 = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    assert np.array_equal(cg.adjacency(), C3 + 2 * np.eye(3))
    assert operator_norm(g).value == pytest.approx(4.0)


def test_three_regular_tree_ball_depth_12():
    w = tree_ball(3, 12)
    est = window_norm(w)
    assert est.value == pytest.approx(tree_ball_norm_oracle(3, 12), abs=1e-6)
    assert abs(est.value - 2 * math.sqrt(2)) / (2 * math.sqrt(2)) < 0.02


def test_sixteen_regular_ball_approaches_from_below():
    vals = [window_norm(tree_ball(16, R)).value for R in (1, 2, 3, 4)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < tree_norm(16)
    assert vals[-1] == pytest.approx(tree_ball_norm_oracle(16, 4), abs=1e-6)


@pytest.mark.parametrize("L", [2, 3, 10, 33, 50])
def test_path_spectrum(L):
    assert window_norm(path_window(L), tol=1e-13).value == pytest.approx(
        2 * math.cos(math.pi / (L + 1)), abs=1e-8)


def test_window_norm_monotone_in_radius():
    vals = [window_norm(tree_ball(4, R)).value for R in range(1, 7)]
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))


def test_average_of_identity_is_one():
    g = Graphing.from_perms([(1, 2, 3, 0)])
    assert average_norm(g, [Automorphism.identity(4)], "full") == pytest.approx(1.0)
    assert average_norm(g, [Automorphism.identity(4)]) == pytest.approx(1.0)


def test_commuting_involutions_against_dense_norm():
    a, b = (1, 0, 2, 3), (0, 1, 3, 2)
    g = Graphing.from_perms([a, b, (2, 3, 0, 1)])
    words = [Automorphism(a), Automorphism(b)]
    M = np.zeros((4, 4))
    for w in words:
        for x, y in enumerate(w.perm):
            M[y, x] += 0.5
    assert average_norm(g, words, "full") == pytest.approx(np.linalg.norm(M, 2))
    P = np.eye(4) - np.full((4, 4), 0.25)
    assert average_norm(g, words) == pytest.approx(np.linalg.norm(P @ M @ P, 2))


@given(st.integers(0, 400), st.integers(2, 3))
def test_power_trick(seed, m):
    g = random_graphing(seed, max_points=6, max_gens=2)
    base = average_norm(g, g.psi())
    powered = average_norm(g, word_products(g.psi(), m))
    assert powered <= base ** m + 1e-9


def test_complete_graph_k4_exact():
    edges = tuple((u, v, 0) for u in range(4) for v in range(u + 1, 4))
    res = isoperimetric(ClassGraph((0, 1, 2, 3), edges), "exact")
    assert res.exact and res.lower == pytest.approx(2.0)
    assert len(res.certificate) == 2


def test_cycle_class_iso_consistent_with_zero_bound():
    g = Graphing.from_perms([(1, 2, 3, 4, 5, 0)])
    (cg,) = class_graphs(g)
    res = isoperimetric(cg, "exact")
    # half of the 6-cycle: two cut edges over three vertices
    assert res.lower == pytest.approx(2 / 3)
    assert operator_norm(g).value == pytest.approx(2 * g.n)


def test_tree_balls_isoperimetric_ratio_tends_to_d_minus_2():
    d, w = 6, tree_ball(6, 6)
    ratios = []
    for k in range(1, 5):
        F = np.flatnonzero(w.depth <= k)
        mask = np.zeros(w.n_vertices, dtype=bool)
        mask[F] = True
        ratios.append(np.count_nonzero(mask[w.edges[:, 0]] != mask[w.edges[:, 1]]) / F.size)
        size = 1 + d * ((d - 1) ** k - 1) // (d - 2)
        assert ratios[-1] == pytest.approx(d * (d - 1) ** k / size)
    assert abs(ratios[-1] - (d - 2)) < 0.01


def test_sampled_iso_is_an_upper_bound():
    w = tree_ball(4, 4)
    res = isoperimetric(w, "annealed-sample", samples=300, seed=1)
    assert res.upper >= 2 - 1e-12 and res.lower is None


def test_iso_bound_sixteen_regular():
    w = tree_ball(16, 3)
    rep = iso_bound_check(w, tree_norm(16), samples=200, seed=0)
    assert rep.passed
    assert rep.bound == pytest.approx(16 - 2 * math.sqrt(15))
    assert rep.min_ratio >= 8.254
    # interior balls come first: radius 2 has 1 + 16 + 240 vertices and 16 * 15^2 boundary edges
    assert rep.ratios[2] == pytest.approx(16 * 15 ** 2 / 257)


def test_iso_bound_path_and_six_regular():
    assert iso_bound_check(path_window(40), 2.0, samples=50).bound == 0.0
    rep = iso_bound_check(tree_ball(6, 5), tree_norm(6), samples=100)
    assert rep.passed and rep.bound == pytest.approx(1.5279, abs=1e-4)


@pytest.mark.parametrize("d", range(3, 18))
def test_benjamini_schramm_identity_on_trees(d):
    iota = Fraction(d - 2)
    assert 1 / (iota + 1) == Fraction(1, d - 1)
