"""Randomized influence matrices from the block Jacobian ``B = [[-I, R], [S, 0]]``.

Every entry of ``B^{-1}`` is a rational function of the rate derivatives
``r_jm`` with integer coefficients.  Evaluating at random points modulo a
random large prime decides which entries vanish identically: a nonzero
value is a certificate, a zero value is wrong with probability at most
``M / (p - 1)`` per evaluation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .gf import PrimeField, make_rng, random_prime
from .linalg import FieldMatrix, LUDecomposition
from .network import ReactionNetwork, input_pattern, stoich_matrix, validate_full_rank

log = logging.getLogger(__name__)

PRIME_SWITCH_AFTER = 4


class StructurallySingular(ArithmeticError):
    """All sampled Jacobians were singular: ``det(SR)`` is probably identically zero."""

    def __init__(self, attempts: int, primes: Sequence[int]):
        self.attempts = attempts
        self.primes = list(primes)
        super().__init__(
            f"B was singular for all {attempts} samples over {len(set(primes))} primes; "
            "det(SR) is a candidate for vanishing identically, confirm with the oracle"
        )


@dataclass(frozen=True)
class InfluenceConfig:
    seed: int = 0
    prime_bits: int = 127
    repeats: int = 1
    extended: bool = False
    max_retries: int = 8
    prime: int | None = None  # fixed modulus, for experiments with small primes

    def __post_init__(self):
        if self.prime_bits < 8:
            raise ValueError("prime_bits must be >= 8")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")


@dataclass(frozen=True)
class RateSample:
    values: Mapping[tuple[int, int], int]  # (m, j) -> r_jm
    p: int
    seed: object = None

    def value(self, j: int, m: int) -> int:
        return self.values.get((m, j), 0)


def sample_rates(net: ReactionNetwork, fld: PrimeField, rng: np.random.Generator) -> RateSample:
    """Independent uniform nonzero values for every structural nonzero ``r_jm``."""
    pairs = sorted(input_pattern(net), key=lambda mj: (mj[1], mj[0]))
    values = {mj: fld.random_element(rng, nonzero=True) for mj in pairs}
    return RateSample(values, fld.p)


@dataclass(frozen=True)
class BlockMatrixB:
    matrix: FieldMatrix
    n_reactions: int
    n_metabolites: int

    @property
    def size(self) -> int:
        return self.n_reactions + self.n_metabolites


def assemble_B(net: ReactionNetwork, sample: RateSample, S: np.ndarray | None = None) -> BlockMatrixB:
    """Block matrix with reactions first, metabolites second."""
    if S is None:
        S = stoich_matrix(net)
    E, M = net.n_reactions, net.n_metabolites
    p = sample.p
    n = E + M
    rows = [[0] * n for _ in range(n)]
    for j in range(E):
        rows[j][j] = p - 1
    for (m, j), v in sample.values.items():
        rows[j][E + m] = v % p
    for m in range(M):
        row = rows[E + m]
        for j in range(E):
            s = int(S[m, j])
            if s:
                row[j] = s % p
    return BlockMatrixB(FieldMatrix._wrap(rows, p, n), E, M)


@dataclass
class InfluenceMatrix:
    """Boolean zero pattern of ``B^{-1}``.

    ``matrix[beta, alpha]`` is True when perturbing ``alpha`` changes
    ``beta``.  Rows are reactions then metabolites; columns are reactions,
    followed by metabolites in extended mode.
    """

    matrix: np.ndarray
    reaction_names: list[str]
    metabolite_names: list[str]
    extended: bool = False
    primes: list[int] = field(default_factory=list)
    evaluations: int = 0
    false_zero_bound: float = 0.0
    exact: bool = False

    @property
    def n_reactions(self) -> int:
        return len(self.reaction_names)

    @property
    def n_metabolites(self) -> int:
        return len(self.metabolite_names)

    @property
    def row_names(self) -> list[str]:
        return self.reaction_names + self.metabolite_names

    @property
    def col_names(self) -> list[str]:
        return self.reaction_names + (self.metabolite_names if self.extended else [])

    def flux_block(self) -> np.ndarray:
        """``E x E`` block: ``[j', j*]`` is True iff ``j* ~> j'``."""
        E = self.n_reactions
        return self.matrix[:E, :E]

    def metabolite_block(self) -> np.ndarray:
        E = self.n_reactions
        return self.matrix[E:, :E]

    def flux_influence_set(self, j: int) -> set[int]:
        return set(np.flatnonzero(self.flux_block()[:, j]).tolist())

    def metabolite_influence_set(self, j: int) -> set[int]:
        return set(np.flatnonzero(self.metabolite_block()[:, j]).tolist())

    def restricted(self) -> InfluenceMatrix:
        """Copy without the metabolite-perturbation columns."""
        return InfluenceMatrix(
            self.matrix[:, : self.n_reactions].copy(), list(self.reaction_names),
            list(self.metabolite_names), False, list(self.primes), self.evaluations,
            self.false_zero_bound, self.exact,
        )


def _invert_with_retries(net, S, config, rng, primes_used):
    """One successful (prime, sample) inversion, following the resampling policy."""
    fld = PrimeField(config.prime) if config.prime is not None else random_prime(config.prime_bits, rng)
    failures = 0
    for attempt in range(config.max_retries):
        if attempt and attempt % PRIME_SWITCH_AFTER == 0 and config.prime is None:
            fld = random_prime(config.prime_bits, rng)
        primes_used.append(fld.p)
        sample = sample_rates(net, fld, rng)
        B = assemble_B(net, sample, S)
        lu = LUDecomposition(B.matrix)
        if not lu.is_singular:
            return fld, sample, lu.inverse()
        failures += 1
        log.debug("singular sample %d modulo %d", attempt, fld.p)
    raise StructurallySingular(failures, primes_used)


def influence_matrix(net: ReactionNetwork, config: InfluenceConfig | None = None) -> InfluenceMatrix:
    """OR of the nonzero patterns of ``B^{-1}`` over ``config.repeats`` random draws."""
    config = config or InfluenceConfig()
    validate_full_rank(net, config.prime)
    S = stoich_matrix(net)
    E, M = net.n_reactions, net.n_metabolites
    ncols = E + M if config.extended else E
    rng = make_rng(config.seed)
    acc = np.zeros((E + M, ncols), dtype=bool)
    primes: list[int] = []
    bound = 1.0
    for _ in range(config.repeats):
        tried: list[int] = []
        fld, _, inv = _invert_with_retries(net, S, config, rng, tried)
        primes.append(fld.p)
        for i, row in enumerate(inv.tolist()):
            for a in range(ncols):
                if row[a]:
                    acc[i, a] = True
        bound *= M / (fld.p - 1)
    return InfluenceMatrix(
        acc, net.reaction_names, net.metabolite_names, config.extended,
        primes, config.repeats, min(bound, 1.0),
    )


@dataclass(frozen=True)
class RegularityVerdict:
    regular: bool
    det: int
    p: int
    attempts: int

    @property
    def label(self) -> str:
        return "regular" if self.regular else "degenerate-candidate"


def is_regular(net: ReactionNetwork, config: InfluenceConfig | None = None) -> RegularityVerdict:
    """Regular iff some random ``B`` is invertible.

    ``det B = (-1)^E det(SR)`` has integer coefficients, so one nonzero
    evaluation modulo ``p`` proves it nonzero as a polynomial.
    """
    config = config or InfluenceConfig()
    validate_full_rank(net, config.prime)
    S = stoich_matrix(net)
    rng = make_rng(config.seed)
    tried: list[int] = []
    try:
        fld, sample, _ = _invert_with_retries(net, S, config, rng, tried)
    except StructurallySingular:
        return RegularityVerdict(False, 0, tried[-1], len(tried))
    d = LUDecomposition(assemble_B(net, sample, S).matrix).det
    return RegularityVerdict(True, d, fld.p, len(tried))


def rate_key(net: ReactionNetwork, key: str | tuple[str, str]) -> tuple[int, int]:
    """Resolve ``"5"`` (sole input of reaction 5) or ``"12:H"`` / ``("12", "H")`` to ``(m, j)``."""
    if isinstance(key, tuple):
        rname, mname = key
    elif ":" in key:
        rname, mname = key.split(":", 1)
    else:
        rname, mname = key, None
    j = net.reaction_index(rname)
    mothers = net.mothers(j)
    if mname is None:
        if len(mothers) != 1:
            raise ValueError(f"reaction {rname!r} has {len(mothers)} inputs; name one as '{rname}:<metabolite>'")
        return mothers[0], j
    m = net.metabolite_index(mname)
    if m not in mothers:
        raise ValueError(f"{mname!r} is not an input of reaction {rname!r}")
    return m, j


def detB_factor_probe(
    net: ReactionNetwork,
    constraints: Sequence[Mapping[str | tuple[str, str], int]],
    *,
    seed: int = 0,
    prime_bits: int = 127,
) -> list[int]:
    """``det B`` at random points restricted to each linear relation ``sum c * r = 0``.

    An empty relation gives a generic point.  The last variable of each
    relation is solved for; all other rates are random and nonzero.
    """
    rng = make_rng(seed)
    fld = random_prime(prime_bits, rng)
    S = stoich_matrix(net)
    out = []
    for relation in constraints:
        sample = dict(sample_rates(net, fld, rng).values)
        terms = [(rate_key(net, k), c % fld.p) for k, c in relation.items() if c % fld.p]
        if terms:
            (last, c_last), rest = terms[-1], terms[:-1]
            acc = sum(c * sample[mj] for mj, c in rest) % fld.p
            sample[last] = -acc * fld.inv(c_last) % fld.p
        B = assemble_B(net, RateSample(sample, fld.p), S)
        out.append(LUDecomposition(B.matrix).det)
    return out
