import numpy as np
import pytest
from hypothesis import given, strategies as st

from ergolab.groups import FiniteGroup, GroupAction, compose, inverse, identity
from ergolab.unionfind import UnionFind, components


def test_union_find_labels_are_minimum_members():
    uf = UnionFind(6)
    uf.union(4, 2)
    uf.union(2, 5)
    uf.union(1, 0)
    assert uf.labels().tolist() == [0, 0, 2, 3, 2, 2]


@given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=20))
def test_union_find_matches_components(edges):
    uf = UnionFind(10)
    for u, v in edges:
        uf.union(u, v)
    assert uf.labels().tolist() == np.asarray(components(10, edges)).tolist()


@given(st.permutations(range(6)), st.permutations(range(6)))
def test_compose_and_inverse(a, b):
    a, b = tuple(a), tuple(b)
    ab = compose(a, b)
    assert all(ab[i] == a[b[i]] for i in range(6))
    assert compose(a, inverse(a)) == identity(6)


def test_klein_four_is_free_on_itself():
    G = FiniteGroup([(1, 0, 3, 2), (2, 3, 0, 1)])
    assert len(G) == 4
    act = GroupAction.regular(G)
    assert act.is_free()
    assert act.orbits() == [[0, 1, 2, 3]]


def test_non_homomorphism_rejected():
    G = FiniteGroup.cyclic(2)
    with pytest.raises(ValueError, match="homomorphism"):
        GroupAction(G, [(1, 2, 0)])  # an element of order 3 cannot image one of order 2


def test_fixed_point_breaks_freeness():
    G = FiniteGroup.cyclic(2)
    assert not GroupAction(G, [(1, 0, 2)]).is_free()
