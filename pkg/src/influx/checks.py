"""Consistency checks on influence matrices: transitivity, single-child laws, oracle agreement."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .influence import InfluenceMatrix
from .network import ReactionNetwork, single_children
from .oracle import DEFAULT_BUDGET, ChildSelectionOracle


def transitivity_violations(net: ReactionNetwork, infl: InfluenceMatrix) -> list[tuple[str, str, str]]:
    """Triples ``(alpha, via, beta)`` breaking closure of the influence relation.

    Two rules are checked: ``alpha ~> j ~> beta`` and ``alpha ~> m |- j ~> beta``
    must both give ``alpha ~> beta``.  Columns exist for every perturbation
    present in ``infl`` (reactions, plus metabolites in extended mode).
    """
    A = infl.matrix
    E = infl.n_reactions
    ncols = A.shape[1]
    rows = infl.row_names
    cols = infl.col_names
    out = []
    # alpha ~> j ~> beta
    for j in range(E):
        sources = np.flatnonzero(A[j, :ncols])
        targets = np.flatnonzero(A[:, j])
        for a in sources:
            missing = targets[~A[targets, a]]
            out.extend((cols[a], rows[j], rows[b]) for b in missing)
    # alpha ~> m |- j ~> beta
    for j in range(E):
        targets = np.flatnonzero(A[:, j])
        for m in net.mothers(j):
            for a in np.flatnonzero(A[E + m, :ncols]):
                missing = targets[~A[targets, a]]
                out.extend((cols[a], f"{rows[E + m]}|-{rows[j]}", rows[b]) for b in missing)
    return out


def single_child_violations(net: ReactionNetwork, infl: InfluenceMatrix) -> list[str]:
    """A single child influences no flux and no metabolite other than its mother."""
    out = []
    for j, m in sorted(single_children(net)):
        name = net.reaction_names[j]
        fluxes = infl.flux_influence_set(j)
        if fluxes:
            out.append(f"single child {name} influences fluxes {sorted(net.reaction_names[k] for k in fluxes)}")
        mets = infl.metabolite_influence_set(j)
        if mets != {m}:
            out.append(
                f"single child {name} influences {sorted(net.metabolite_names[k] for k in mets)}, "
                f"expected only {net.metabolite_names[m]}"
            )
    return out


@dataclass
class OracleComparison:
    mismatches: list[tuple[str, str, bool, bool]] = field(default_factory=list)  # (row, col, randomized, oracle)

    @property
    def agree(self) -> bool:
        return not self.mismatches


def compare_with_oracle(
    net: ReactionNetwork, infl: InfluenceMatrix, budget: int = DEFAULT_BUDGET
) -> OracleComparison:
    """Entry-by-entry comparison of the reaction columns with the exact oracle."""
    exact = ChildSelectionOracle(net, budget).influence_matrix().matrix
    E = infl.n_reactions
    got = infl.matrix[:, :E]
    result = OracleComparison()
    for b, a in zip(*np.nonzero(got != exact)):
        result.mismatches.append((infl.row_names[b], infl.reaction_names[a], bool(got[b, a]), bool(exact[b, a])))
    return result
