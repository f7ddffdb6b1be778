"""Reaction networks: parsing, serialization and derived stoichiometric data.

The text format has one reaction per line::

    # comment
    1: Glucose + PEP -> G6P + PYR
    f1: -> Glucose
    d1: Lactate ->
    12: 2 G + H -> I
    2: G6P <-> F6P          # expands to 2a / 2b

Metabolites are numbered in order of first appearance unless an
``@metabolites`` directive fixes the order explicitly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

NAME_RE = re.compile(r"^[A-Za-z0-9_.,\-]+$")
_LINE_RE = re.compile(r"^\s*([A-Za-z0-9_.,\-]+)\s*:(.*)$")


class NetworkError(ValueError):
    """Raised for malformed or inconsistent network input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RankDeficient(ValueError):
    def __init__(self, rank: int, n_metabolites: int):
        self.rank = rank
        self.n_metabolites = n_metabolites
        super().__init__(
            f"stoichiometric matrix has rank {rank} < {n_metabolites} metabolites"
        )


@dataclass(frozen=True)
class Metabolite:
    id: int
    name: str


@dataclass(frozen=True)
class Reaction:
    id: int
    name: str
    inputs: Mapping[str, int]
    outputs: Mapping[str, int]

    def __post_init__(self):
        for side in (self.inputs, self.outputs):
            for m, c in side.items():
                if not isinstance(c, (int, np.integer)) or c <= 0:
                    raise NetworkError(
                        f"reaction {self.name!r}: coefficient of {m!r} must be a positive integer"
                    )
        object.__setattr__(self, "inputs", MappingProxyType(dict(self.inputs)))
        object.__setattr__(self, "outputs", MappingProxyType(dict(self.outputs)))

    def __eq__(self, other):
        if not isinstance(other, Reaction):
            return NotImplemented
        return (
            self.id == other.id
            and self.name == other.name
            and dict(self.inputs) == dict(other.inputs)
            and dict(self.outputs) == dict(other.outputs)
        )

    def __hash__(self):
        return hash((self.id, self.name, tuple(sorted(self.inputs.items())),
                     tuple(sorted(self.outputs.items()))))

    @property
    def is_feed(self) -> bool:
        return not self.inputs

    @property
    def is_exit(self) -> bool:
        return not self.outputs

    def is_monomolecular_exit(self) -> bool:
        return self.is_exit and len(self.inputs) == 1 and next(iter(self.inputs.values())) == 1


@dataclass(frozen=True)
class ReactionNetwork:
    metabolites: tuple[Metabolite, ...]
    reactions: tuple[Reaction, ...]
    _m_index: Mapping[str, int] = field(init=False, repr=False, compare=False)
    _r_index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "metabolites", tuple(self.metabolites))
        object.__setattr__(self, "reactions", tuple(self.reactions))
        if not self.metabolites:
            raise NetworkError("network has no metabolites")
        if not self.reactions:
            raise NetworkError("network has no reactions")
        m_index: dict[str, int] = {}
        for i, m in enumerate(self.metabolites):
            if m.id != i:
                raise NetworkError(f"metabolite {m.name!r} has id {m.id}, expected {i}")
            if m.name in m_index:
                raise NetworkError(f"duplicate metabolite {m.name!r}")
            m_index[m.name] = i
        r_index: dict[str, int] = {}
        for i, r in enumerate(self.reactions):
            if r.id != i:
                raise NetworkError(f"reaction {r.name!r} has id {r.id}, expected {i}")
            if r.name in r_index:
                raise NetworkError(f"duplicate reaction name {r.name!r}")
            r_index[r.name] = i
            for m in (*r.inputs, *r.outputs):
                if m not in m_index:
                    raise NetworkError(f"reaction {r.name!r} references unknown metabolite {m!r}")
        object.__setattr__(self, "_m_index", MappingProxyType(m_index))
        object.__setattr__(self, "_r_index", MappingProxyType(r_index))

    @classmethod
    def from_reactions(
        cls,
        reactions: Iterable[tuple[str, Mapping[str, int], Mapping[str, int]]],
        metabolites: Iterable[str] | None = None,
    ) -> ReactionNetwork:
        """Build a network from ``(name, inputs, outputs)`` triples."""
        reactions = list(reactions)
        if metabolites is None:
            order: dict[str, None] = {}
            for _, ins, outs in reactions:
                for m in (*ins, *outs):
                    order.setdefault(m, None)
            metabolites = order
        mets = tuple(Metabolite(i, name) for i, name in enumerate(metabolites))
        rxns = tuple(
            Reaction(i, name, dict(ins), dict(outs))
            for i, (name, ins, outs) in enumerate(reactions)
        )
        return cls(mets, rxns)

    @property
    def n_metabolites(self) -> int:
        return len(self.metabolites)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)

    @property
    def metabolite_names(self) -> list[str]:
        return [m.name for m in self.metabolites]

    @property
    def reaction_names(self) -> list[str]:
        return [r.name for r in self.reactions]

    def metabolite_index(self, name: str) -> int:
        return self._m_index[name]

    def reaction_index(self, name: str) -> int:
        return self._r_index[name]

    def has_metabolite(self, name: str) -> bool:
        return name in self._m_index

    def has_reaction(self, name: str) -> bool:
        return name in self._r_index

    def children(self, m: int) -> list[int]:
        """Reactions that have metabolite ``m`` among their inputs."""
        name = self.metabolites[m].name
        return [r.id for r in self.reactions if name in r.inputs]

    def mothers(self, j: int) -> list[int]:
        return sorted(self._m_index[name] for name in self.reactions[j].inputs)

    def with_reactions(self, extra: Iterable[tuple[str, Mapping[str, int], Mapping[str, int]]]) -> ReactionNetwork:
        triples = [(r.name, r.inputs, r.outputs) for r in self.reactions]
        triples.extend(extra)
        names = list(self.metabolite_names)
        seen = set(names)
        for _, ins, outs in triples:
            for m in (*ins, *outs):
                if m not in seen:
                    seen.add(m)
                    names.append(m)
        return ReactionNetwork.from_reactions(triples, names)

    def digest(self) -> str:
        import hashlib

        return hashlib.sha256(serialize_network(self).encode()).hexdigest()


def _parse_side(text: str, lineno: int) -> dict[str, int]:
    tokens = text.split()
    side: dict[str, int] = {}
    i = 0
    expect_term = True
    while i < len(tokens):
        tok = tokens[i]
        if not expect_term:
            if tok != "+":
                raise NetworkError(f"expected '+' between terms, got {tok!r}", lineno)
            expect_term = True
            i += 1
            continue
        coeff = 1
        if re.fullmatch(r"[+-]?\d+", tok) and i + 1 < len(tokens) and tokens[i + 1] != "+":
            coeff = int(tok)
            if coeff <= 0:
                raise NetworkError(f"coefficient must be positive, got {coeff}", lineno)
            i += 1
            tok = tokens[i]
        if not NAME_RE.match(tok):
            raise NetworkError(f"invalid metabolite name {tok!r}", lineno)
        side[tok] = side.get(tok, 0) + coeff
        expect_term = False
        i += 1
    if tokens and expect_term:
        raise NetworkError("dangling '+'", lineno)
    return side


def parse_network(text: str) -> ReactionNetwork:
    """Parse the line-oriented reaction format into a :class:`ReactionNetwork`."""
    triples: list[tuple[str, dict[str, int], dict[str, int]]] = []
    seen_names: set[str] = set()
    declared: list[str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@metabolites"):
            declared = line.split()[1:]
            bad = [m for m in declared if not NAME_RE.match(m)]
            if bad:
                raise NetworkError(f"invalid metabolite name {bad[0]!r}", lineno)
            continue
        match = _LINE_RE.match(line)
        if match is None:
            raise NetworkError("expected 'name: inputs -> outputs'", lineno)
        name, body = match.groups()
        if "<->" in body:
            lhs, rhs = body.split("<->", 1)
            reversible = True
        elif "->" in body:
            lhs, rhs = body.split("->", 1)
            reversible = False
        else:
            raise NetworkError("missing '->'", lineno)
        if "->" in rhs:
            raise NetworkError("more than one arrow", lineno)
        ins = _parse_side(lhs, lineno)
        outs = _parse_side(rhs, lineno)
        if not ins and not outs:
            raise NetworkError(f"reaction {name!r} has neither inputs nor outputs", lineno)
        expanded = [(name + "a", ins, outs), (name + "b", outs, ins)] if reversible else [(name, ins, outs)]
        for rname, y, ybar in expanded:
            if rname in seen_names:
                raise NetworkError(f"duplicate reaction name {rname!r}", lineno)
            seen_names.add(rname)
            triples.append((rname, y, ybar))
    if not triples:
        raise NetworkError("no reactions found")
    if declared is not None:
        used = {m for _, y, ybar in triples for m in (*y, *ybar)}
        missing = used.difference(declared)
        if missing:
            raise NetworkError(f"metabolites not declared: {sorted(missing)}")
        return ReactionNetwork.from_reactions(triples, declared)
    return ReactionNetwork.from_reactions(triples)


def _format_side(side: Mapping[str, int], order: Mapping[str, int]) -> str:
    terms = []
    for m in sorted(side, key=order.__getitem__):
        c = side[m]
        terms.append(m if c == 1 else f"{c} {m}")
    return " + ".join(terms)


def serialize_network(net: ReactionNetwork) -> str:
    order = {m.name: m.id for m in net.metabolites}
    lines = []
    # the parser numbers metabolites by first appearance, inputs before outputs
    appearance: dict[str, None] = {}
    for r in net.reactions:
        for side in (r.inputs, r.outputs):
            for m in sorted(side, key=order.__getitem__):
                appearance.setdefault(m, None)
    if list(appearance) != net.metabolite_names:
        lines.append("@metabolites " + " ".join(net.metabolite_names))
    for r in net.reactions:
        lhs = _format_side(r.inputs, order)
        rhs = _format_side(r.outputs, order)
        lines.append(" ".join(part for part in (f"{r.name}:", lhs, "->", rhs) if part))
    return "\n".join(lines) + "\n"


def network_to_dict(net: ReactionNetwork) -> dict:
    return {
        "metabolites": net.metabolite_names,
        "reactions": [
            {"name": r.name, "inputs": dict(r.inputs), "outputs": dict(r.outputs)}
            for r in net.reactions
        ],
    }


def network_from_dict(data: Mapping) -> ReactionNetwork:
    try:
        triples = [
            (r["name"], {m: int(c) for m, c in r.get("inputs", {}).items()},
             {m: int(c) for m, c in r.get("outputs", {}).items()})
            for r in data["reactions"]
        ]
    except (KeyError, TypeError, AttributeError) as exc:
        raise NetworkError(f"malformed network JSON: {exc}") from exc
    return ReactionNetwork.from_reactions(triples, data.get("metabolites"))


def load_network(path: str | Path) -> ReactionNetwork:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return network_from_dict(json.loads(text))
    return parse_network(text)


def fixture_path(name: str) -> Path:
    """Path of a bundled network file, e.g. ``fixture_path("fig31")``."""
    if not name.endswith(".net"):
        name += ".net"
    return Path(str(resources.files("influx") / "data" / name))


def load_fixture(name: str) -> ReactionNetwork:
    return load_network(fixture_path(name))


def stoich_matrix(net: ReactionNetwork) -> np.ndarray:
    """Integer ``M x E`` matrix with columns ``outputs - inputs``."""
    S = np.zeros((net.n_metabolites, net.n_reactions), dtype=np.int64)
    for r in net.reactions:
        for m, c in r.inputs.items():
            S[net.metabolite_index(m), r.id] -= c
        for m, c in r.outputs.items():
            S[net.metabolite_index(m), r.id] += c
    return S


def input_pattern(net: ReactionNetwork) -> frozenset[tuple[int, int]]:
    """Pairs ``(m, j)`` with metabolite ``m`` an input of reaction ``j``.

    Catalysts count as inputs.
    """
    return frozenset(
        (net.metabolite_index(m), r.id) for r in net.reactions for m in r.inputs
    )


def single_children(net: ReactionNetwork) -> set[tuple[int, int]]:
    """Pairs ``(j, m)`` where ``j`` is the only reaction consuming ``m``."""
    out = set()
    for m in range(net.n_metabolites):
        kids = net.children(m)
        if len(kids) == 1:
            out.add((kids[0], m))
    return out


@dataclass(frozen=True)
class RankReport:
    rank: int
    n_metabolites: int
    method: str
    modulus: int | None = None

    @property
    def full_rank(self) -> bool:
        return self.rank == self.n_metabolites


def validate_full_rank(net: ReactionNetwork, p: int | None = None, *, exact_limit: int = 64) -> RankReport:
    """Check that the stoichiometric matrix has full row rank.

    Small networks (``E + M <= exact_limit``) use exact fraction-free
    elimination; otherwise the rank is taken modulo ``p``.
    """
    from .linalg import FieldMatrix, int_rank_bareiss

    S = stoich_matrix(net)
    M, E = S.shape
    if E + M <= exact_limit or p is None:
        report = RankReport(int_rank_bareiss(S.tolist()), M, "bareiss")
    else:
        report = RankReport(FieldMatrix.from_ints(S.tolist(), p).rank(), M, "modular", p)
    if not report.full_rank:
        raise RankDeficient(report.rank, M)
    return report
