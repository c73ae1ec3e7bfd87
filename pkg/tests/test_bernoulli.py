import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ergolab.bernoulli import (BaseSpace, BudgetError, TransversalError, build_extension,
                               check_bernoulli, compression_iso, extension_size,
                               lift_subrelation_iso, orbit_extension_iso, perc_label_iso,
                               percolation_extension, product_base, shift_conjugacy,
                               transversal_maps)
from ergolab.eqrel import Automorphism, EqRel, PartialIso
from ergolab.groups import FiniteGroup
from ergolab.instances import free_action, random_extension_instance, random_graphing
from ergolab.spectral import Graphing

from strategies import relations

F = Fraction


def test_identity_relation_gives_product_space():
    rel = EqRel.identity([F(1, 3), F(2, 3)])
    base = BaseSpace((0, 1, 2), (F(1, 2), F(1, 4), F(1, 4)))
    ext = build_extension(rel, base)
    assert ext.rel.n == 6 and all(len(c) == 1 for c in ext.rel.classes)
    for i, (x, (s,)) in enumerate(ext.points):
        assert ext.rel.weights[i] == rel.weights[x] * base.weights[s]


def test_full_two_point_relation_with_fair_coin():
    ext = build_extension(EqRel.full(2), BaseSpace.uniform(2))
    assert ext.rel.n == 8
    assert set(ext.rel.weights) == {F(1, 8)}
    assert sorted(len(c) for c in ext.rel.classes) == [2, 2, 2, 2]
    assert check_bernoulli(ext).is_extension


@given(relations(max_points=6), st.integers(1, 3))
def test_class_counting_and_extension_axioms(rel, k):
    if extension_size(rel, k) > 20_000:
        return
    ext = build_extension(rel, BaseSpace.uniform(k))
    assert len(ext.rel.classes) == sum(k ** len(c) for c in rel.classes)
    assert check_bernoulli(ext).is_extension


@given(st.integers(2, 3), st.integers(2, 4))
def test_transitivity_contrast(k, size):
    # a single class never stays a single class once labels are added
    ext = build_extension(EqRel.full(size), BaseSpace.uniform(k))
    assert not ext.rel.is_ergodic_proxy()


def test_budget_is_enforced():
    with pytest.raises(BudgetError, match="budget"):
        build_extension(EqRel.full(8), BaseSpace.uniform(3), budget=1000)


def test_atomless_base_has_no_finite_extension():
    with pytest.raises(ValueError, match="atomless"):
        build_extension(EqRel.full(2), BaseSpace.atomless_marker())


def test_product_base_weights():
    b = product_base([BaseSpace.uniform(2), BaseSpace.bernoulli(F(1, 3))])
    assert b.symbols == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert b.weights == (F(1, 3), F(1, 6), F(1, 3), F(1, 6))


def test_percolation_labels_single_swap():
    g = Graphing.from_perms([(1, 0)])
    p = F(1, 3)
    wit = perc_label_iso(g, p, pairwise=True)
    assert wit.source.n == wit.target.n == 8
    assert bool(wit.report)
    src = percolation_extension(g, p)
    for (x, om), wt in zip(src.points, src.rel.weights):
        k = sum(om)
        assert wt == F(1, 2) * p ** k * (1 - p) ** (len(om) - k)


@given(st.integers(0, 500))
def test_percolation_labels_random_graphings(seed):
    g = random_graphing(seed, max_points=4, max_gens=2)
    if sum(len(c) * 2 ** (g.n * len(c)) for c in g.rel.classes) > 5000:
        return
    assert bool(perc_label_iso(g, F(2, 5)).report)


def test_lift_with_index_one_is_identity():
    rel = EqRel.full(3)
    base = BaseSpace.uniform(2)
    wit = lift_subrelation_iso(rel, rel, base)
    assert bool(wit.report) and wit.ledger["index"] == 1
    ext = build_extension(rel, base)
    tgt = build_extension(rel, base.power(1))
    for i, j in enumerate(wit.mapping):
        (x, om), (y, lab) = ext.points[i], tgt.points[j]
        assert x == y and tuple(base.power(1).symbols[s][0] for s in lab) == om


def test_lift_pairing_doubles_entropy():
    rel = EqRel.full(4)
    sub = EqRel.from_classes(rel.weights, [[0, 1], [2, 3]])
    wit = lift_subrelation_iso(rel, sub, BaseSpace.uniform(2), pairwise=True)
    assert bool(wit.report)
    assert wit.ledger["index"] == 2
    assert wit.ledger["entropy_target"] == pytest.approx(2 * math.log(2))
    assert wit.ledger["entropy_target"] == pytest.approx(wit.ledger["entropy_predicted"])


def test_transversal_rejects_unequal_subclasses():
    rel = EqRel.full(4)
    sub = EqRel.from_classes(rel.weights, [[0], [1, 2, 3]])
    with pytest.raises(TransversalError):
        transversal_maps(rel, sub)


def test_lift_rejects_a_bad_transversal():
    rel = EqRel.full(4)
    sub = EqRel.from_classes(rel.weights, [[0, 1], [2, 3]])
    bad = [Automorphism.identity(4), Automorphism((1, 0, 2, 3))]
    with pytest.raises(TransversalError, match="overlap"):
        lift_subrelation_iso(rel, sub, BaseSpace.uniform(2), maps=bad)


def test_trivial_compression_is_relabelling():
    rel = EqRel.full(3)
    base = BaseSpace.uniform(2)
    wit = compression_iso(rel, [0, 1, 2], base, [PartialIso((0, 1, 2), (0, 1, 2))])
    assert bool(wit.report)
    assert wit.ledger["mu_Y"] == 1 and wit.ledger["entropy_factor"] == 1
    assert wit.ledger["entropy_target"] == pytest.approx(base.entropy())


def test_compression_to_half():
    rel = EqRel.full(4)
    base = BaseSpace.uniform(2)
    isos = [PartialIso((0, 1), (0, 1)), PartialIso((0, 1), (2, 3))]
    wit = compression_iso(rel, [0, 1], base, isos, pairwise=True)
    assert bool(wit.report)
    assert wit.ledger["mu_Y"] == F(1, 2)
    assert wit.ledger["entropy_factor"] == 2
    assert wit.ledger["entropy_target"] == pytest.approx(2 * base.entropy())


def test_compression_with_padding():
    # theta_1 is defined only on 0, so the point 1 carries the padding symbol in coordinate 1
    rel = EqRel.full(3)
    isos = [PartialIso((0, 1), (0, 1)), PartialIso((0,), (2,))]
    wit = compression_iso(rel, [0, 1], BaseSpace.uniform(3), isos)
    assert bool(wit.report)
    assert wit.ledger["entropy_factor"] == wit.ledger["entropy_factor_predicted"] == F(3, 2)


def test_compression_family_must_cover():
    rel = EqRel.full(4)
    with pytest.raises(TransversalError, match="cover"):
        compression_iso(rel, [0, 1], BaseSpace.uniform(2), [PartialIso((0, 1), (0, 1))])


def test_shift_conjugacy_three_cycle():
    rel = EqRel.full(3)
    wit = shift_conjugacy(rel, Automorphism((1, 2, 0)), BaseSpace.uniform(2))
    assert len(wit.product_points) == 24 and bool(wit)


def test_shift_conjugacy_trivial():
    rel = EqRel.full(1)
    wit = shift_conjugacy(rel, Automorphism((0,)), BaseSpace.uniform(2))
    assert bool(wit) and len(wit.sigma) == 2


def test_shift_conjugacy_with_index_two():
    rel = EqRel.full(4)
    wit = shift_conjugacy(rel, Automorphism((1, 0, 3, 2)), BaseSpace.uniform(2))
    assert bool(wit) and set(wit.cycle_lengths.values()) == {2}


def test_orbit_extension_for_free_action():
    G = FiniteGroup.cyclic(3)
    act = free_action(G, 2)
    wit = orbit_extension_iso(act, [F(1, 6)] * 6, BaseSpace.uniform(2))
    assert bool(wit.report) and wit.ledger["group_order"] == 3


def test_null_symbols_rejected_where_labels_are_enumerated():
    with pytest.raises(ValueError, match="positive weight"):
        shift_conjugacy(EqRel.full(2), Automorphism((1, 0)), BaseSpace.bernoulli(1))


@given(st.integers(0, 10_000))
def test_random_extension_instances(seed):
    I = random_extension_instance(seed, max_ext_points=3000)
    assert check_bernoulli(build_extension(I.rel, I.base)).is_extension
    assert bool(lift_subrelation_iso(I.rel, I.sub, I.base).report)
    assert bool(compression_iso(I.rel, I.Y, I.base, I.isos).report)


def test_extension_json_is_canonical():
    ext = build_extension(EqRel.full(2), BaseSpace.uniform(2))
    assert ext.to_json() == build_extension(EqRel.full(2), BaseSpace.uniform(2)).to_json()
    assert '"1/8"' in ext.to_json()
