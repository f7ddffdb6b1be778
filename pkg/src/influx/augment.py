"""Comparing a network with its extensions, and Okada's upper estimate of influence regions.

Three questions are answered here:

* is ``net1`` an augmentation of ``net0`` (shared reactions unchanged,
  old reactions silent on new metabolites), and does a partial child
  selection of the new metabolites into the new reactions have a nonzero
  minor?  If so every influence of ``net0`` must survive in ``net1``;
* what happens when every metabolite gets its own monomolecular exit;
* does a subnetwork satisfying Okada's output completeness and dimension
  conditions actually contain the influence sets of its reactions?
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .graphkit import flux_classes
from .influence import InfluenceConfig, InfluenceMatrix, influence_matrix
from .linalg import int_det_bareiss, int_rank_bareiss
from .network import ReactionNetwork, stoich_matrix
from .oracle import DEFAULT_BUDGET, enumerate_child_selections

EXIT_PREFIX = "exit_"


class AugmentationError(ValueError):
    """``net1`` does not extend ``net0``."""


class MissingInExtension(AugmentationError):
    def __init__(self, kind: str, name: str):
        self.kind = kind
        self.name = name
        super().__init__(f"{kind} {name!r} of the smaller network is absent from the larger one")


class StoichiometryMismatch(AugmentationError):
    def __init__(self, reaction: str):
        self.reaction = reaction
        super().__init__(f"reaction {reaction!r} has different stoichiometry in the two networks")


class OldReactionTouchesNewMetabolite(AugmentationError):
    def __init__(self, reaction: str, metabolite: str):
        self.reaction = reaction
        self.metabolite = metabolite
        super().__init__(f"shared reaction {reaction!r} involves the new metabolite {metabolite!r}")


class NoValidPartialSelection(LookupError):
    """No selection of new metabolites into new reactions has a nonzero minor."""


class NotOutputComplete(ValueError):
    def __init__(self, metabolite: str, reaction: str):
        self.metabolite = metabolite
        self.reaction = reaction
        super().__init__(f"{metabolite} feeds reaction {reaction}, which lies outside the subnetwork")


class DimensionMismatch(ValueError):
    def __init__(self, value: int):
        self.value = value
        super().__init__(
            f"dim(ker S on E0) + |M0| - |E0| = {value}, but Okada's estimate needs 0"
        )


@dataclass(frozen=True)
class AugmentationWitness:
    reaction_map: Mapping[str, str]  # net0 name -> net1 name
    metabolite_map: Mapping[str, str]
    new_metabolites: tuple[str, ...]
    new_reactions: tuple[str, ...]
    partial_selection: Mapping[str, str] | None = None  # new metabolite -> new reaction
    partial_det: int | None = None

    @property
    def hypothesis_holds(self) -> bool:
        """True when persistence of influences is guaranteed."""
        return not self.new_metabolites or self.partial_selection is not None


def _side(side: Mapping[str, int], rename: Mapping[str, str]) -> dict[str, int]:
    return {rename.get(m, m): c for m, c in side.items()}


def is_augmentation(
    net0: ReactionNetwork,
    net1: ReactionNetwork,
    name_mapping: Mapping[str, str] | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
) -> AugmentationWitness:
    """Match ``net0`` inside ``net1`` by name and look for the partial child selection.

    ``name_mapping`` renames reactions or metabolites of ``net0`` whose
    names differ in ``net1``; unmapped names are matched verbatim.
    """
    rename = dict(name_mapping or {})
    met_map = {m: rename.get(m, m) for m in net0.metabolite_names}
    rxn_map = {r: rename.get(r, r) for r in net0.reaction_names}
    for m, m1 in met_map.items():
        if not net1.has_metabolite(m1):
            raise MissingInExtension("metabolite", m)
    for r, r1 in rxn_map.items():
        if not net1.has_reaction(r1):
            raise MissingInExtension("reaction", r)
    old_mets = set(met_map.values())
    for r0 in net0.reactions:
        r1 = net1.reactions[net1.reaction_index(rxn_map[r0.name])]
        for side0, side1 in ((r0.inputs, r1.inputs), (r0.outputs, r1.outputs)):
            for m in side1:
                if m not in old_mets:
                    raise OldReactionTouchesNewMetabolite(r0.name, m)
            if _side(side0, met_map) != dict(side1):
                raise StoichiometryMismatch(r0.name)
    new_mets = tuple(m for m in net1.metabolite_names if m not in old_mets)
    old_rxns = set(rxn_map.values())
    new_rxns = tuple(r for r in net1.reaction_names if r not in old_rxns)
    selection, value = _find_partial_selection(net1, new_mets, new_rxns, budget)
    return AugmentationWitness(rxn_map, met_map, new_mets, new_rxns, selection, value)


def _find_partial_selection(net1, new_mets, new_rxns, budget):
    if not new_mets:
        return None, None
    rows = [net1.metabolite_index(m) for m in new_mets]
    cols = [net1.reaction_index(r) for r in new_rxns]
    S = stoich_matrix(net1)
    for J in enumerate_child_selections(net1, rows, cols, budget=budget):
        minor = [[int(S[m, J[mm]]) for mm in rows] for m in rows]
        d = int_det_bareiss(minor)
        if d:
            names = {net1.metabolite_names[m]: net1.reaction_names[J[m]] for m in rows}
            return names, d
    return None, None


@dataclass
class AugmentationReport:
    witness: AugmentationWitness
    lost: list[tuple[str, str]] = field(default_factory=list)  # (j*, alpha) in net0 only
    gained: list[tuple[str, str]] = field(default_factory=list)  # (j*, alpha) in net1 only
    lumpings: list[tuple[tuple[str, ...], tuple[tuple[str, ...], ...]]] = field(default_factory=list)

    @property
    def informational(self) -> bool:
        """Persistence is not guaranteed, so losses are reported but not judged."""
        return not self.witness.hypothesis_holds

    @property
    def violations(self) -> list[tuple[str, str]]:
        return [] if self.informational else list(self.lost)

    @property
    def status(self) -> str:
        if self.informational:
            return "informational"
        return "violation" if self.lost else "ok"


def check_augmenticity(
    net0: ReactionNetwork,
    net1: ReactionNetwork,
    infl0: InfluenceMatrix | None = None,
    infl1: InfluenceMatrix | None = None,
    *,
    config: InfluenceConfig | None = None,
    name_mapping: Mapping[str, str] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> AugmentationReport:
    """Compare the influences of ``net0`` with those of its augmentation ``net1``.

    Only perturbations of reactions are compared.  A lumping is a class of
    ``net1`` that merges reactions from two or more classes of ``net0``.
    """
    witness = is_augmentation(net0, net1, name_mapping, budget=budget)
    infl0 = infl0 if infl0 is not None else influence_matrix(net0, config)
    infl1 = infl1 if infl1 is not None else influence_matrix(net1, config)
    E0 = net0.n_reactions
    rows0 = net0.reaction_names + net0.metabolite_names
    rows1 = [net1.reaction_index(witness.reaction_map[n]) for n in net0.reaction_names] + [
        net1.n_reactions + net1.metabolite_index(witness.metabolite_map[n]) for n in net0.metabolite_names
    ]
    report = AugmentationReport(witness)
    for js in range(E0):
        js1 = net1.reaction_index(witness.reaction_map[net0.reaction_names[js]])
        for beta, name in enumerate(rows0):
            b0 = bool(infl0.matrix[beta, js])
            b1 = bool(infl1.matrix[rows1[beta], js1])
            if b0 and not b1:
                report.lost.append((net0.reaction_names[js], name))
            elif b1 and not b0:
                report.gained.append((net0.reaction_names[js], name))
    classes0 = flux_classes(infl0)
    label0 = {}
    for c in classes0:
        members = tuple(net0.reaction_names[j] for j in c.members)
        for name in members:
            label0[witness.reaction_map[name]] = members
    for c in flux_classes(infl1):
        members = tuple(net1.reaction_names[j] for j in c.members)
        parts = []
        for name in members:
            part = label0.get(name)
            if part is not None and part not in parts:
                parts.append(part)
        if len(parts) > 1:
            report.lumpings.append((members, tuple(parts)))
    return report


def extend_with_exits(net: ReactionNetwork, prefix: str = EXIT_PREFIX) -> ReactionNetwork:
    """Add ``m ->`` for every metabolite that lacks a monomolecular exit."""
    covered = {next(iter(r.inputs)) for r in net.reactions if r.is_monomolecular_exit()}
    taken = set(net.reaction_names)
    extra = []
    for m in net.metabolite_names:
        if m in covered:
            continue
        name = prefix + m
        while name in taken:
            name += "_"
        taken.add(name)
        extra.append((name, {m: 1}, {}))
    return net.with_reactions(extra) if extra else net


def non_exit_reactions(net: ReactionNetwork) -> list[int]:
    """Reactions other than monomolecular exits."""
    return [r.id for r in net.reactions if not r.is_monomolecular_exit()]


def has_noncatalytic_mother(net: ReactionNetwork, j: int) -> bool:
    r = net.reactions[j]
    return any(r.outputs.get(m, 0) != c for m, c in r.inputs.items())


@dataclass(frozen=True)
class MenetekelResult:
    extended: ReactionNetwork
    core: tuple[str, ...]  # non-exit reactions with a non-catalytic mother
    classes: tuple[tuple[str, ...], ...]

    @property
    def collapsed(self) -> bool:
        core = set(self.core)
        return any(core <= set(c) for c in self.classes)


def menetekel(net: ReactionNetwork, config: InfluenceConfig | None = None) -> MenetekelResult:
    """Add all monomolecular exits and report the resulting flux classes."""
    ext = extend_with_exits(net)
    infl = influence_matrix(ext, config)
    names = ext.reaction_names
    classes = tuple(tuple(names[j] for j in c.members) for c in flux_classes(infl))
    core = tuple(names[j] for j in non_exit_reactions(ext) if has_noncatalytic_mother(ext, j))
    return MenetekelResult(ext, core, classes)


def _indices(names_or_ids: Iterable[str | int], lookup) -> list[int]:
    return sorted({x if isinstance(x, int) else lookup(x) for x in names_or_ids})


def output_completeness_witness(net: ReactionNetwork, E0: Sequence[int], M0: Sequence[int]) -> tuple[int, int] | None:
    """A pair ``m0 |- j0`` with ``m0`` in ``M0`` and ``j0`` outside ``E0``, if any."""
    inside = set(E0)
    for m in M0:
        for j in net.children(m):
            if j not in inside:
                return m, j
    return None


def okada_defect(net: ReactionNetwork, E0: Sequence[int], M0: Sequence[int]) -> int:
    """``dim(ker S on E0) + |M0| - |E0|``, which equals ``|M0| - rank S[:, E0]``."""
    S = stoich_matrix(net)
    cols = S[:, list(E0)].tolist() if E0 else []
    r = int_rank_bareiss(cols) if E0 else 0
    return len(M0) - r


@dataclass(frozen=True)
class OkadaReport:
    reactions: tuple[str, ...]
    metabolites: tuple[str, ...]
    flux_union: tuple[str, ...]
    metabolite_union: tuple[str, ...]
    contained: bool
    strict: bool  # the estimate overshoots the actual influence region


def okada_check(
    net: ReactionNetwork,
    E0: Iterable[str | int],
    M0: Iterable[str | int],
    infl: InfluenceMatrix,
) -> OkadaReport:
    """Check that the influence sets of reactions in ``E0`` stay inside ``(E0, M0)``."""
    E0 = _indices(E0, net.reaction_index)
    M0 = _indices(M0, net.metabolite_index)
    pair = output_completeness_witness(net, E0, M0)
    if pair is not None:
        m, j = pair
        raise NotOutputComplete(net.metabolite_names[m], net.reaction_names[j])
    defect = okada_defect(net, E0, M0)
    if defect:
        raise DimensionMismatch(defect)
    flux: set[int] = set()
    mets: set[int] = set()
    for j in E0:
        flux |= infl.flux_influence_set(j)
        mets |= infl.metabolite_influence_set(j)
    contained = flux <= set(E0) and mets <= set(M0)
    strict = contained and (flux != set(E0) or mets != set(M0))
    rn, mn = net.reaction_names, net.metabolite_names
    return OkadaReport(
        tuple(rn[j] for j in E0), tuple(mn[m] for m in M0),
        tuple(rn[j] for j in sorted(flux)), tuple(mn[m] for m in sorted(mets)),
        contained, strict,
    )
