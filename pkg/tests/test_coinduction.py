import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ergolab.bernoulli import BudgetError
from ergolab.coinduction import (ChoiceError, build_choice_system, coinduce, injectivity_failure_oracle,
                                 lifted_generator, orbit_relation, swap_choice_test,
                                 verify_cind_props, verify_cocycles, verify_equivalence)
from ergolab.eqrel import Automorphism, EqRel, weights_equal
from ergolab.groups import FiniteGroup, GroupAction
from ergolab.instances import free_action, random_coinduction_instance

F = Fraction
Z2 = FiniteGroup.cyclic(2)


def _swap_instance():
    beta = free_action(Z2, 2)  # orbits {0,1}, {2,3}
    return EqRel.full(4), beta


def test_index_one_is_trivial():
    beta = free_action(FiniteGroup.cyclic(3), 2)
    rel = orbit_relation(beta, [F(1, 6)] * 6)
    cs = build_choice_system(rel, beta)
    assert cs.N == 1
    for (x, x2), p in cs.perm.items():
        assert p == (0,)
        (g,) = cs.delta[(x, x2)]
        assert beta.act(g, x) == x2


def test_swap_instance_cocycles():
    rel, beta = _swap_instance()
    cs = build_choice_system(rel, beta)
    assert cs.N == 2 and len(cs.perm) == 16
    rep = verify_cocycles(cs)
    assert bool(rep) and rep.triples == 64


@pytest.mark.parametrize("order", ["equivariant", "sorted", "reverse"])
def test_reflexive_pairs_are_trivial(order):
    rel, beta = _swap_instance()
    cs = build_choice_system(rel, beta, order)
    for x in range(rel.n):
        assert cs.perm[(x, x)] == tuple(range(cs.N))
        assert all(g == Z2.identity for g in cs.delta[(x, x)])


def test_non_free_action_rejected():
    beta = GroupAction(Z2, [(1, 0, 2, 3)])
    with pytest.raises(ChoiceError, match="free"):
        build_choice_system(EqRel.full(4), beta)


def test_non_constant_index_rejected():
    beta = free_action(Z2, 3)
    rel = EqRel.from_classes([F(1, 6)] * 6, [[0, 1, 2, 3], [4, 5]])
    with pytest.raises(ChoiceError, match="non-constant"):
        build_choice_system(rel, beta)


def test_singleton_y_recovers_the_relation():
    rel, beta = _swap_instance()
    cs = build_choice_system(rel, beta)
    cr = coinduce(cs, GroupAction(Z2, [(0,)]), [F(1)])
    assert cr.rel.n == 4
    assert [x for x, _ in cr.points] == [0, 1, 2, 3]
    assert cr.rel.classes == rel.classes


def test_index_one_is_the_product_action():
    G = Z2
    beta = free_action(G, 2)
    rel = orbit_relation(beta, [F(1, 4)] * 4)
    alpha = GroupAction(G, [(1, 0)])
    cs = build_choice_system(rel, beta)
    cr = coinduce(cs, alpha, [F(1, 2)] * 2)
    orbit = [frozenset(cr.index[(beta.act(g, x), (alpha.act(g, ys[0]),))] for g in G.elements)
             for x, ys in cr.points]
    product = EqRel.from_labels(cr.rel.weights, [min(o) for o in orbit])
    assert cr.rel.class_of == product.class_of


def test_trivial_alpha_only_permutes_coordinates():
    rel, beta = _swap_instance()
    cs = build_choice_system(rel, beta)
    cr = coinduce(cs, GroupAction(Z2, [(0, 1)]), [F(1, 2)] * 2)
    for c in cr.rel.classes:
        multisets = {tuple(sorted(cr.points[i][1])) for i in c}
        assert len(multisets) == 1
        assert sorted(cr.points[i][0] for i in c) == list(rel.members(cr.points[c[0]][0]))


@pytest.mark.parametrize("q,expected", [(2, F(1)), (4, F(1, 2))])
def test_injectivity_failure_matches_double_count(q, expected):
    rel, beta = _swap_instance()
    cs = build_choice_system(rel, beta)
    shift = tuple((y + 1) % q if q == 2 else y ^ 1 for y in range(q))
    alpha = GroupAction(Z2, [shift])
    assert alpha.is_free()
    cr = coinduce(cs, alpha, [F(1, q)] * q)
    rep = verify_cind_props(cr)
    assert rep.extension_ok and rep.expansion_containment_ok
    assert rep.injectivity_failure == injectivity_failure_oracle(cr) == expected


def test_lifted_generators_preserve_measure():
    rel, beta = _swap_instance()
    cs = build_choice_system(rel, beta)
    cr = coinduce(cs, GroupAction(Z2, [(1, 0, 3, 2)]), [F(1, 4)] * 4)
    for theta in (Automorphism((1, 2, 3, 0)), Automorphism((2, 3, 0, 1)), Automorphism((0, 1, 3, 2))):
        lift = lifted_generator(cr, theta)
        assert lift.violations(cr.rel) == []
        assert all(weights_equal(cr.rel.weights[i], cr.rel.weights[j]) for i, j in enumerate(lift.perm))


def test_budget():
    rel, beta = _swap_instance()
    cs = build_choice_system(rel, beta)
    with pytest.raises(BudgetError):
        coinduce(cs, GroupAction(Z2, [(1, 0, 3, 2)]), [F(1, 4)] * 4, budget=10)


def test_alpha_must_preserve_y_weights():
    rel, beta = _swap_instance()
    cs = build_choice_system(rel, beta)
    with pytest.raises(ValueError, match="preserve"):
        coinduce(cs, GroupAction(Z2, [(1, 0)]), [F(1, 3), F(2, 3)])


@pytest.mark.parametrize("orders", [("equivariant", "reverse"), ("equivariant", "sorted")])
def test_swap_choice_functions(orders):
    rel, beta = _swap_instance()
    rep = swap_choice_test(rel, beta, GroupAction(Z2, [(1, 0, 3, 2)]), [F(1, 4)] * 4, orders)
    assert rep.same_class_sizes and rep.isomorphic


def test_json_dumps_are_stable():
    rel, beta = _swap_instance()
    cs = build_choice_system(rel, beta)
    doc = json.loads(cs.to_json())
    assert doc["choices"][0] == [0, 1, 2, 3] and len(doc["perm"]) == 16
    cr = coinduce(cs, GroupAction(Z2, [(1, 0)]), [F(1, 2)] * 2)
    assert cr.to_json() == coinduce(cs, GroupAction(Z2, [(1, 0)]), [F(1, 2)] * 2).to_json()


@settings(max_examples=40)
@given(st.integers(0, 10_000), st.sampled_from(["equivariant", "sorted", "reverse"]))
def test_random_systems(seed, order):
    I = random_coinduction_instance(seed, max_x=12, max_budget=3000)
    cs = build_choice_system(I.rel, I.beta, order)
    assert bool(verify_cocycles(cs))
    cr = coinduce(cs, I.alpha, I.y_weights)
    assert verify_equivalence(cr) == []
    rep = verify_cind_props(cr)
    assert rep.extension_ok and rep.expansion_containment_ok
    assert rep.injectivity_failure == injectivity_failure_oracle(cr)
