import numpy as np
import pytest

from ergolab.windows import build_window, grid_box, path_window, schreier_window, tree_ball


@pytest.mark.parametrize("d,R", [(3, 5), (6, 4), (4, 1)])
def test_tree_ball_sizes(d, R):
    w = tree_ball(d, R)
    n = 1 + d * ((d - 1) ** R - 1) // (d - 2) if d > 2 else 2 * R + 1
    assert w.n_vertices == n and w.n_edges == n - 1
    deg = w.vertex_degrees()
    assert np.all(deg[w.interior] == d)
    assert np.all(w.depth[w.boundary] == R)


def test_free_window_labels_generators():
    w = build_window({"type": "free", "rank": 2, "radius": 3})
    assert w.degree == 4
    assert w.n_vertices == 1 + 4 * (27 - 1) // 2
    assert set(np.unique(w.labels).tolist()) == {0, 1}


def test_edge_keys_survive_growing_the_window():
    small, big = tree_ball(4, 2, free_rank=2), tree_ball(4, 4, free_rank=2)
    assert set(small.keys.tolist()) <= set(big.keys.tolist())


def test_grid_box():
    w = grid_box([5, 4])
    assert w.n_vertices == 20 and w.n_edges == 4 * 4 + 5 * 3
    assert w.degree == 4
    assert w.boundary.sum() == 20 - 3 * 2
    assert w.side_a.size == 4 and w.side_b.size == 4


def test_path_window_root_and_boundary():
    w = path_window(9)
    assert w.root == 4 and w.radius == 4
    assert np.flatnonzero(w.boundary).tolist() == [0, 8]


def test_schreier_window_of_a_cycle():
    w = schreier_window([[1, 2, 3, 4, 0]])
    assert w.n_vertices == 5 and w.n_edges == 5
    assert not w.boundary.any()
    assert np.all(w.vertex_degrees() == 2)


def test_unknown_window_type():
    with pytest.raises(ValueError, match="unknown window type"):
        build_window({"type": "torus"})
