import numpy as np
import pytest

from influx.augment import (
    DimensionMismatch,
    MissingInExtension,
    NotOutputComplete,
    OldReactionTouchesNewMetabolite,
    StoichiometryMismatch,
    check_augmenticity,
    extend_with_exits,
    has_noncatalytic_mother,
    is_augmentation,
    menetekel,
    non_exit_reactions,
    okada_check,
    okada_defect,
)
from influx.gf import make_rng
from influx.influence import InfluenceConfig, influence_matrix
from influx.network import load_fixture, parse_network, stoich_matrix
from netgen import random_regular_network


def test_tca_a_to_d_witness():
    w = is_augmentation(load_fixture("tca_A"), load_fixture("tca_D"))
    assert w.new_metabolites == ("S1,7P",) or list(w.new_metabolites) == ["S1,7P"]
    assert w.partial_selection == {"S1,7P": "N2"}
    assert w.partial_det in (1, -1)
    assert w.hypothesis_holds


def test_identity_augmentation():
    net = load_fixture("fig31")
    rep = check_augmenticity(net, net, config=InfluenceConfig(seed=1))
    assert rep.status == "ok" and not rep.lost and not rep.gained and not rep.lumpings


def test_tca_b_to_c_lumps_classes():
    rep = check_augmenticity(load_fixture("tca_B"), load_fixture("tca_C"), config=InfluenceConfig(seed=2))
    assert rep.status == "ok"
    assert rep.lumpings
    assert rep.gained


def test_missing_reaction_in_extension():
    net0 = parse_network("1: A -> B\n2: B ->\n3: -> A\n")
    net1 = parse_network("1: A -> B\n2: B ->\n")
    with pytest.raises(MissingInExtension):
        is_augmentation(net0, net1)


def test_changed_stoichiometry():
    net0 = parse_network("1: A -> B\n2: B ->\n")
    net1 = parse_network("1: A -> 2 B\n2: B ->\n")
    with pytest.raises(StoichiometryMismatch):
        is_augmentation(net0, net1)


def test_old_reaction_touching_new_metabolite():
    net0 = parse_network("1: A -> B\n2: B ->\n")
    net1 = parse_network("1: A -> B\n2: B + C ->\n3: C ->\n")
    with pytest.raises(OldReactionTouchesNewMetabolite):
        is_augmentation(net0, net1)


def test_name_mapping():
    net0 = parse_network("a: X -> Y\nb: Y ->\n")
    net1 = parse_network("A1: X1 -> Y1\nB1: Y1 ->\nC1: Y1 -> Z\nD1: Z ->\n")
    mapping = {"a": "A1", "b": "B1", "X": "X1", "Y": "Y1"}
    w = is_augmentation(net0, net1, mapping)
    assert w.partial_selection == {"Z": "D1"}


def test_exit_extension_counts():
    net = load_fixture("fig31")
    ext = extend_with_exits(net)
    assert ext.n_reactions == net.n_reactions + 8
    assert extend_with_exits(ext) == ext
    assert len(non_exit_reactions(ext)) == net.n_reactions - 2


def test_menetekel_on_a_cycle_collapses():
    net = parse_network("1: A -> B\n2: B -> C\n3: C -> A\n4: -> A\n")
    res = menetekel(net, InfluenceConfig(seed=0))
    assert res.collapsed
    assert set(res.core) == {"1", "2", "3"}


def test_menetekel_counterexample():
    """Both reactions have a non-catalytic mother, yet two classes survive the exits."""
    net = parse_network("1: A + B -> A + 2 B\n2: A -> 2 B\n")
    assert all(has_noncatalytic_mother(net, j) for j in range(2))
    res = menetekel(net, InfluenceConfig(seed=0, repeats=2))
    assert not res.collapsed
    assert sorted(map(sorted, res.classes)) == [["1", "exit_B"], ["2", "exit_A"]]


def test_menetekel_producer_rule():
    """With all exits present, ``j*`` influences ``j'`` when ``j*`` changes a non-catalytic mother of ``j'``."""
    rng = make_rng(31)
    checked = 0
    for _ in range(25):
        M = int(rng.integers(2, 5))
        net = extend_with_exits(random_regular_network(rng, M, int(rng.integers(M, M + 3)), feeds=False))
        infl = influence_matrix(net, InfluenceConfig(seed=3, repeats=2))
        S = stoich_matrix(net)
        F = infl.flux_block()
        for jp in range(net.n_reactions):
            r = net.reactions[jp]
            for name, c in r.inputs.items():
                m = net.metabolite_index(name)
                if r.outputs.get(name, 0) == c:
                    continue
                for js in np.flatnonzero(S[m]):
                    if js != jp:
                        assert F[jp, js], (net.reaction_names[js], net.reaction_names[jp])
                        checked += 1
    assert checked > 50


def test_okada_containment_and_strictness():
    net = load_fixture("fig31")
    infl = influence_matrix(net, InfluenceConfig(seed=4))
    rep = okada_check(net, ["4", "7", "11", "12"], ["B", "D", "G", "H"], infl)
    assert rep.contained
    assert set(rep.metabolite_union) <= {"B", "D", "G", "H"}
    rep = okada_check(net, ["11", "12"], ["G", "H"], infl)
    assert rep.metabolite_union == ("G", "H")


def test_okada_single_child_probe_is_strict():
    net = load_fixture("fig31")
    infl = influence_matrix(net, InfluenceConfig(seed=4))
    rep = okada_check(net, ["15"], ["J"], infl)
    assert rep.contained and rep.strict
    assert rep.flux_union == ()


def test_okada_hypothesis_errors():
    net = load_fixture("fig31")
    infl = influence_matrix(net, InfluenceConfig(seed=4))
    with pytest.raises(NotOutputComplete):
        okada_check(net, ["5"], ["C"], infl)
    with pytest.raises(DimensionMismatch):
        okada_check(net, ["14", "15"], ["J"], infl)
    assert okada_defect(net, [net.reaction_index("15")], [net.metabolite_index("J")]) == 0
