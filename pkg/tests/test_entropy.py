import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from ergolab.bernoulli import BaseSpace, product_base
from ergolab.entropy import (AlphaEstimate, BetaLedger, C_LEM2, LedgerEntry, NotFound,
                             alpha_search, direct_witness, entropy_of_product,
                             infinite_fundamental_group, lem2_bound, lem2_terms, lem3_bound,
                             lem4_bound, norm_comparison_check, shannon_entropy, thm5_schedule)
from ergolab.eqrel import Automorphism
from ergolab.groups import FiniteGroup, GroupAction
from ergolab.instances import free_action
from ergolab.spectral import Graphing, average_norm, word_products

F = Fraction


def _mp_binary_block(n):
    mpmath.mp.dps = 40
    p = mpmath.mpf(1) / (n + 2)
    return -(n + 1) * (p * mpmath.log(p) + (1 - p) * mpmath.log(1 - p))


def test_fair_coin():
    assert shannon_entropy(BaseSpace.uniform(2)).nats == pytest.approx(0.693147, abs=1e-6)


def test_atomless_is_infinite():
    assert shannon_entropy(BaseSpace.atomless_marker()).nats == math.inf
    assert entropy_of_product([BaseSpace.uniform(2), BaseSpace.atomless_marker()]).nats == math.inf


def test_biased_four_bit_block():
    b = BaseSpace.bernoulli(F(1, 5)).power(4)
    h = shannon_entropy(b).nats
    mpmath.mp.dps = 40
    oracle = 4 * -(mpmath.mpf("0.2") * mpmath.log(mpmath.mpf("0.2"))
                   + mpmath.mpf("0.8") * mpmath.log(mpmath.mpf("0.8")))
    assert h == pytest.approx(float(oracle), abs=1e-12)
    assert h == pytest.approx(2.001609, abs=1e-6)


def test_products():
    two, three = BaseSpace.uniform(2), BaseSpace.uniform(3)
    assert entropy_of_product([two, three]).nats == pytest.approx(math.log(6), abs=1e-12)
    assert shannon_entropy(product_base([three, three])).nats == pytest.approx(
        2 * shannon_entropy(three).nats, abs=1e-12)


@given(st.lists(st.integers(1, 9), min_size=1, max_size=4),
       st.lists(st.integers(1, 9), min_size=1, max_size=4))
def test_entropy_nonnegative_and_additive(a, b):
    A = BaseSpace(tuple(range(len(a))), tuple(F(x, sum(a)) for x in a))
    B = BaseSpace(tuple(range(len(b))), tuple(F(x, sum(b)) for x in b))
    ha, hb = shannon_entropy(A).nats, shannon_entropy(B).nats
    assert ha >= 0 and hb >= 0
    assert shannon_entropy(product_base([A, B])).nats == pytest.approx(ha + hb, abs=1e-12)


def _quadratic_residue_graphing():
    # Z/7 acting on itself; the words {0, 1, 2, 4} average to norm |1 + g|/4 = sqrt(2)/4
    # on mean-zero functions, g the quadratic Gauss sum (-1 + i sqrt 7)/2
    shifts = [tuple((x + s) % 7 for x in range(7)) for s in (0, 1, 2, 4)]
    return Graphing.from_perms(shifts)


def test_power_trick_witness():
    g = _quadratic_residue_graphing()
    delta = average_norm(g, g.gens)
    assert delta == pytest.approx(math.sqrt(2) / 4, abs=1e-12)
    squared = average_norm(g, word_products(list(g.gens), 2))
    assert squared <= delta ** 2 + 1e-9 and squared < 0.25
    est = alpha_search(g, word_length_cap=2)
    assert isinstance(est, AlphaEstimate) and est.valid
    assert est.n <= len(g.gens) ** 2
    assert est.achieved_norm == pytest.approx(average_norm(g, est.words), abs=1e-12)
    assert est.alpha == pytest.approx(math.log(est.n))


def test_single_generator_not_found():
    g = Graphing.from_perms([(1, 2, 3, 4, 0)])
    res = alpha_search(g, word_length_cap=3)
    assert isinstance(res, NotFound)


def test_search_is_deterministic_and_relabelling_invariant():
    g = _quadratic_residue_graphing()
    a, b = alpha_search(g, 2, seed=4), alpha_search(g, 2, seed=4)
    assert a.n == b.n and [w.perm for w in a.words] == [w.perm for w in b.words]
    sigma = (3, 6, 0, 5, 1, 4, 2)
    inv = Automorphism(sigma).inverse().perm
    moved = Graphing.from_perms([tuple(sigma[p[inv[x]]] for x in range(7)) for p in
                                 (w.perm for w in g.gens)])
    assert alpha_search(moved, 2, seed=4).n == a.n


def test_lem2_small_n():
    e = lem2_bound(3)
    inter, mid, final = lem2_terms(3)
    assert inter == pytest.approx(float(_mp_binary_block(3)), abs=1e-12)
    assert inter == pytest.approx(2.001609, abs=1e-6)
    assert mid == pytest.approx(math.log(5) + 1, abs=1e-12)
    assert e.value == pytest.approx(2.609438, abs=1e-6)
    # log 5 + 1 = log 3 + 1 + log(5/3) at n = 3
    assert abs(mid - final) < 1e-12
    assert lem2_bound(8).value == pytest.approx(math.log(8) + 1.510826, abs=1e-6)
    assert lem2_bound(8).value == pytest.approx(3.590268, abs=1e-6)


def test_lem2_chain_sweep():
    n = np.arange(3, 10 ** 6 + 1, dtype=np.float64)
    inter, mid, final = lem2_terms(n)
    assert np.all(mid - inter >= -1e-12)
    assert np.all(final - mid >= -1e-12)
    assert np.all(np.diff(final) > 0)


def test_lem2_needs_three():
    with pytest.raises(ValueError):
        lem2_bound(2)


def test_lem3_and_lem4():
    assert lem3_bound(3.0, 2).value == 1.5
    assert lem3_bound(3.0, math.inf).value == 0.0
    assert lem3_bound(3.0, 1).value == 3.0
    assert lem4_bound(2.5, 1).value == 2.5
    assert lem4_bound(2.0, F(1, 4)).value == 0.5
    with pytest.raises(ValueError):
        lem4_bound(2.0, 0)
    with pytest.raises(ValueError):
        lem4_bound(2.0, F(3, 2))


def test_thm5_schedule_and_markers():
    v = thm5_schedule(3, 100).value
    assert v == pytest.approx((math.log(3) + C_LEM2) / 100, abs=1e-15)
    assert v == pytest.approx(0.026094, abs=1e-6)
    assert infinite_fundamental_group().value == 0.0


@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=8))
def test_ledger_monotone(values):
    led = BetaLedger()
    prev = math.inf
    for v in values:
        led.add(direct_witness(v, "x"))
        assert led.bound <= prev
        prev = led.bound
    assert led.best().value == min(values)


def test_ledger_rejects_unknown_rules_and_prints():
    with pytest.raises(ValueError):
        LedgerEntry(1.0, "guess", [])
    led = BetaLedger()
    led.add(lem2_bound(3))
    assert "2.609438" in led.table()
    assert '"rule":"lem2"' in led.to_json()


def test_norm_comparison_trivial_quotient():
    G = FiniteGroup.cyclic(4)
    act = free_action(G, 2)
    res = norm_comparison_check(act, [F(1, 8)] * 8, FiniteGroup.trivial(), [(0,)], G.elements[:2])
    assert all(r == 1 for r in res.rhs) and bool(res)


def test_norm_comparison_free_action_matches_regular():
    G = FiniteGroup.cyclic(4)
    act = free_action(G, 2)
    res = norm_comparison_check(act, [F(1, 8)] * 8, G, G.generators, [G.elements[1], G.elements[2]])
    assert res.lhs == res.rhs and bool(res)


def test_norm_comparison_z4_to_z2():
    G = FiniteGroup.cyclic(4)
    act = GroupAction.regular(G)
    Q = FiniteGroup.cyclic(2)
    res = norm_comparison_check(act, [F(1, 4)] * 4, Q, [(1, 0)], [G.elements[0], G.elements[1]])
    assert res.termwise_ok and res.norm_ok
    assert len(res.lhs) == 6 and all(isinstance(v, Fraction) for v in res.lhs)


def test_norm_comparison_rejects_bad_quotient_data():
    G = FiniteGroup.cyclic(4)
    with pytest.raises(ValueError):
        norm_comparison_check(GroupAction.regular(G), [F(1, 4)] * 4, FiniteGroup.cyclic(3),
                              [(1, 2, 0)], G.elements[:2])
