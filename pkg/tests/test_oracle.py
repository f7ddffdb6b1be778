import pytest

from influx.linalg import int_det_bareiss
from influx.network import load_fixture, parse_network, stoich_matrix
from influx.oracle import (
    ChildSelectionOracle,
    EnumerationBudgetExceeded,
    enumerate_child_selections,
    oracle_flux_influence,
    oracle_metabolite_influence,
    oracle_regular,
)


def named(net, J):
    return {net.metabolite_names[m]: net.reaction_names[j] for m, j in J.items()}


def test_fig31_child_selections():
    net = load_fixture("fig31")
    sels = [named(net, J) for J in enumerate_child_selections(net)]
    assert len(sels) == 6
    assert {J["C"] for J in sels} == {"5", "6"}
    assert {J["F"] for J in sels} == {"8", "10", "13"}
    forced = {"A": "3", "B": "4", "D": "7", "E": "9", "H": "12", "I": "14", "J": "15"}
    for J in sels:
        assert all(J[m] == j for m, j in forced.items())
        assert len(set(J.values())) == len(J)


def test_distinct_selections_give_distinct_images_or_assignments():
    net = load_fixture("fig31")
    sels = list(enumerate_child_selections(net))
    keys = {tuple(sorted(J.items())) for J in sels}
    assert len(keys) == len(sels)


def test_fig31_regular_witness_has_nonzero_minor():
    net = load_fixture("fig31")
    o = ChildSelectionOracle(net)
    J = o.regular_witness()
    S = stoich_matrix(net)
    cols = sorted(J.values())
    assert int_det_bareiss(S[:, cols].tolist()) != 0


def test_fig31_known_influences():
    net = load_fixture("fig31")
    r, m = net.reaction_index, net.metabolite_index
    assert oracle_flux_influence(net, r("10"), r("13"))
    assert oracle_flux_influence(net, r("8"), r("8"))
    assert not oracle_flux_influence(net, r("3"), r("5"))
    assert oracle_metabolite_influence(net, r("11"), m("G"))
    assert not oracle_metabolite_influence(net, r("11"), m("C"))


def test_no_children_means_no_selection():
    net = parse_network("x: A -> B\ny: A -> 2 B\n")
    assert list(enumerate_child_selections(net)) == []
    assert not oracle_regular(net)


def test_budget_exceeded():
    lines = [f"{i}{k}: M{i} -> " for i in range(8) for k in range(4)]
    net = parse_network("\n".join(lines))
    with pytest.raises(EnumerationBudgetExceeded):
        list(enumerate_child_selections(net, budget=100))
    assert sum(1 for _ in enumerate_child_selections(net, budget=10**6)) == 4**8


def test_square_influence_reaches_beyond_selection_preimages():
    """``x`` moves ``B`` although every child selection sends ``B`` to ``y``."""
    net = parse_network("x: A ->\ny: A + B ->\n")
    sels = [named(net, J) for J in enumerate_child_selections(net)]
    assert sels == [{"A": "x", "B": "y"}]
    assert oracle_metabolite_influence(net, net.reaction_index("x"), net.metabolite_index("B"))
