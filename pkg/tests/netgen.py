"""Random small reaction networks for property tests."""

from __future__ import annotations

import numpy as np

from influx.network import NetworkError, ReactionNetwork, validate_full_rank, RankDeficient
from influx.oracle import oracle_regular

LETTERS = "ABCDEFGHIJKLMNOP"


def random_side(rng: np.random.Generator, mets: list[str], max_species: int, max_coeff: int) -> dict[str, int]:
    k = int(rng.integers(0, max_species + 1))
    chosen = rng.choice(len(mets), size=min(k, len(mets)), replace=False)
    return {mets[i]: int(rng.integers(1, max_coeff + 1)) for i in sorted(chosen)}


def random_network(
    rng: np.random.Generator,
    n_metabolites: int,
    n_reactions: int,
    *,
    max_species: int = 2,
    max_coeff: int = 2,
    feeds: bool = True,
) -> ReactionNetwork | None:
    """One random draw; ``None`` when the draw is not a valid network."""
    mets = list(LETTERS[:n_metabolites])
    triples = []
    for j in range(n_reactions):
        ins = random_side(rng, mets, max_species, max_coeff)
        if not feeds and not ins:
            ins = {mets[int(rng.integers(n_metabolites))]: 1}
        outs = random_side(rng, mets, max_species, max_coeff)
        if not ins and not outs:
            return None
        triples.append((str(j + 1), ins, outs))
    try:
        return ReactionNetwork.from_reactions(triples, mets)
    except NetworkError:
        return None


def random_regular_network(rng: np.random.Generator, n_metabolites: int, n_reactions: int, **kw) -> ReactionNetwork:
    """Rejection-sample until the network has full rank and is regular."""
    while True:
        net = random_network(rng, n_metabolites, n_reactions, **kw)
        if net is None or any(not net.children(m) for m in range(net.n_metabolites)):
            continue
        try:
            validate_full_rank(net)
        except RankDeficient:
            continue
        if oracle_regular(net):
            return net
