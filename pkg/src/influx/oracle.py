"""Exact influence relations by enumerating child selections.

A child selection assigns every metabolite one of its own child reactions,
injectively.  By Cauchy-Binet, ``det(SR)`` is the sum over child
selections ``J`` of ``+-det(S[:, J(M)]) * prod_m r_{J(m), m}``.  Distinct
selections use distinct sets of pairs ``(J(m), m)`` and hence distinct
monomials, so the sum is a nonzero polynomial iff one of the minors is
nonzero.  The same holds for the swapped and augmented column sets that
characterize flux and metabolite influence.

Everything here is exact integer arithmetic and exponential in the worst
case; it is meant for small networks and as an independent check on the
randomized computation.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .influence import InfluenceMatrix
from .linalg import int_det_bareiss
from .network import ReactionNetwork, stoich_matrix

DEFAULT_BUDGET = 10**7


class EnumerationBudgetExceeded(RuntimeError):
    pass


def enumerate_child_selections(
    net: ReactionNetwork,
    domain: Sequence[int] | None = None,
    codomain: Sequence[int] | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
) -> Iterator[dict[int, int]]:
    """Yield every injective map ``m -> J(m)`` with ``m`` an input of ``J(m)``.

    Metabolites with a single admissible child are assigned first; the rest
    follow in ascending order, trying candidate reactions in ascending order.
    """
    domain = list(range(net.n_metabolites)) if domain is None else sorted(domain)
    allowed = set(range(net.n_reactions)) if codomain is None else set(codomain)
    candidates = {m: [j for j in net.children(m) if j in allowed] for m in domain}
    if any(not c for c in candidates.values()):
        return
    forced = [m for m in domain if len(candidates[m]) == 1]
    order = forced + [m for m in domain if len(candidates[m]) > 1]
    used: set[int] = set()
    assignment: dict[int, int] = {}
    steps = 0

    def backtrack(pos: int) -> Iterator[dict[int, int]]:
        nonlocal steps
        if pos == len(order):
            yield {m: assignment[m] for m in domain}
            return
        m = order[pos]
        for j in candidates[m]:
            if j in used:
                continue
            steps += 1
            if steps > budget:
                raise EnumerationBudgetExceeded(f"more than {budget} enumeration steps")
            used.add(j)
            assignment[m] = j
            yield from backtrack(pos + 1)
            used.discard(j)
            del assignment[m]

    yield from backtrack(0)


class ChildSelectionOracle:
    """Caches selections and minor nonzeroness for repeated queries on one network."""

    def __init__(self, net: ReactionNetwork, budget: int = DEFAULT_BUDGET):
        self.net = net
        self.budget = budget
        self.S = stoich_matrix(net).tolist()
        self._full: list[dict[int, int]] | None = None
        self._partial: dict[int, list[dict[int, int]]] = {}
        self._nonzero = lru_cache(maxsize=None)(self._minor_nonzero)

    def _minor_nonzero(self, cols: frozenset[int]) -> bool:
        cols_sorted = sorted(cols)
        if len(cols_sorted) != self.net.n_metabolites:
            return False
        minor = [[row[j] for j in cols_sorted] for row in self.S]
        return int_det_bareiss(minor) != 0

    def minor_nonzero(self, cols) -> bool:
        return self._nonzero(frozenset(cols))

    @property
    def full_selections(self) -> list[dict[int, int]]:
        if self._full is None:
            self._full = list(enumerate_child_selections(self.net, budget=self.budget))
        return self._full

    def partial_selections(self, m_out: int) -> list[dict[int, int]]:
        if m_out not in self._partial:
            dom = [m for m in range(self.net.n_metabolites) if m != m_out]
            self._partial[m_out] = list(enumerate_child_selections(self.net, dom, budget=self.budget))
        return self._partial[m_out]

    def regular_witness(self) -> dict[int, int] | None:
        for J in self.full_selections:
            if self.minor_nonzero(J.values()):
                return J
        return None

    def regular(self) -> bool:
        return self.regular_witness() is not None

    def flux_witness(self, j_star: int, j_prime: int) -> dict[int, int] | None:
        for J in self.full_selections:
            image = set(J.values())
            if j_star in image:
                continue
            if j_star == j_prime:
                if self.minor_nonzero(image):
                    return J
            elif j_prime in image:
                if self.minor_nonzero((image - {j_prime}) | {j_star}):
                    return J
        return None

    def flux_influence(self, j_star: int, j_prime: int) -> bool:
        return self.flux_witness(j_star, j_prime) is not None

    def metabolite_witness(self, j_star: int, m_prime: int) -> dict[int, int] | None:
        for J in self.partial_selections(m_prime):
            image = set(J.values())
            if j_star in image:
                continue
            if self.minor_nonzero(image | {j_star}):
                return J
        return None

    def metabolite_influence(self, j_star: int, m_prime: int) -> bool:
        return self.metabolite_witness(j_star, m_prime) is not None

    def influence_matrix(self) -> InfluenceMatrix:
        E, M = self.net.n_reactions, self.net.n_metabolites
        mat = np.zeros((E + M, E), dtype=bool)
        for js in range(E):
            for jp in range(E):
                mat[jp, js] = self.flux_influence(js, jp)
            for m in range(M):
                mat[E + m, js] = self.metabolite_influence(js, m)
        return InfluenceMatrix(mat, self.net.reaction_names, self.net.metabolite_names, exact=True)


def oracle_regular(net: ReactionNetwork, budget: int = DEFAULT_BUDGET) -> bool:
    return ChildSelectionOracle(net, budget).regular()


def oracle_flux_influence(net: ReactionNetwork, j_star: int, j_prime: int, budget: int = DEFAULT_BUDGET) -> bool:
    return ChildSelectionOracle(net, budget).flux_influence(j_star, j_prime)


def oracle_metabolite_influence(net: ReactionNetwork, j_star: int, m_prime: int, budget: int = DEFAULT_BUDGET) -> bool:
    return ChildSelectionOracle(net, budget).metabolite_influence(j_star, m_prime)


def oracle_influence_matrix(net: ReactionNetwork, budget: int = DEFAULT_BUDGET) -> InfluenceMatrix:
    """Exact ``(E + M) x E`` influence pattern; requires a regular network."""
    oracle = ChildSelectionOracle(net, budget)
    if not oracle.regular():
        raise ValueError("network is not regular: no child selection with a nonsingular minor")
    return oracle.influence_matrix()
