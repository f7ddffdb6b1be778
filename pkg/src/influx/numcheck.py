"""Finite-perturbation check of structural predictions with affine rate laws.

Rates are ``r_j(eps, x) = c_j + a_j eps_j + sum_m k_jm x_m`` with
``k_jm`` nonzero exactly when ``m`` is an input of ``j`` and ``a_j``
nonzero for every reaction.  The perturbation is additive: with a square
stoichiometric matrix every rate vanishes at steady state, and feeds have
no concentration dependence, so scaling a rate by ``1 + eps`` could
perturb nothing.  Steady states are solutions of a linear system, and a
perturbation can be applied exactly (up to rounding) without any
nonlinear solver.  Structural zeros
of the influence matrix must show up as numerical zeros; structural
nonzeros are expected, but a particular random model may happen to sit
close to a cancelling configuration.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from .gf import make_rng, spawn_rngs
from .influence import InfluenceMatrix
from .network import ReactionNetwork, input_pattern, stoich_matrix

MAX_CONDITION = 1e12
MAX_MODEL_TRIES = 16
DEFAULT_STEP = 0.05
BALANCE_TOL = 1e-8


class SingularJacobian(ArithmeticError):
    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(f"steady-state system is numerically singular (condition {condition:.3g})")


class FluxImbalance(ArithmeticError):
    """The flux response violates ``S Phi = 0`` beyond rounding."""


class HardViolation(AssertionError):
    def __init__(self, entry: EntryCheck):
        self.entry = entry
        super().__init__(
            f"{entry.kind} {entry.name} responds to reaction {entry.perturbed} "
            f"with |value| = {abs(entry.value):.3g}, but the structure says it cannot"
        )


@dataclass(frozen=True)
class AffineRateModel:
    c: np.ndarray  # (E,)
    K: np.ndarray  # (E, M), zero off the input pattern
    a: np.ndarray  # (E,) derivative of each rate with respect to its own eps
    x_star: np.ndarray  # (M,) positive steady state of the unperturbed model

    def rates(self, x: np.ndarray, eps: np.ndarray | None = None) -> np.ndarray:
        r = self.c + self.K @ x
        return r if eps is None else r + self.a * eps


def _condition(A: np.ndarray) -> float:
    return float(np.linalg.cond(A)) if A.size else 1.0


def random_affine_model(
    net: ReactionNetwork,
    seed: int | np.random.Generator = 0,
    *,
    max_tries: int = MAX_MODEL_TRIES,
) -> AffineRateModel:
    """Random affine rates with a prescribed positive steady state ``x_star``.

    The constants are ``c = rho - K x_star`` with ``rho`` a random vector in
    the kernel of ``S``, so ``S r(x_star) = S rho = 0``.  In the square case
    the kernel is trivial and all rates vanish at the steady state.
    """
    rng = make_rng(seed)
    S = stoich_matrix(net).astype(float)
    E, M = net.n_reactions, net.n_metabolites
    kernel = null_space(S) if E > M else np.zeros((E, 0))
    pairs = sorted(input_pattern(net), key=lambda mj: (mj[1], mj[0]))
    cond = np.inf
    for _ in range(max_tries):
        K = np.zeros((E, M))
        for m, j in pairs:
            K[j, m] = rng.uniform(0.5, 2.0) * rng.choice((-1.0, 1.0))
        a = rng.uniform(0.5, 2.0, size=E) * rng.choice((-1.0, 1.0), size=E)
        x_star = rng.uniform(0.5, 2.0, size=M)
        rho = kernel @ rng.normal(size=kernel.shape[1])
        cond = _condition(S @ K)
        if cond <= MAX_CONDITION:
            return AffineRateModel(rho - K @ x_star, K, a, x_star)
    raise SingularJacobian(cond)


def steady_state(net: ReactionNetwork, model: AffineRateModel, eps: np.ndarray | None = None) -> np.ndarray:
    """Solve ``S (c + a eps + K x) = 0`` for ``x``."""
    S = stoich_matrix(net).astype(float)
    A = S @ model.K
    cond = _condition(A)
    if cond > MAX_CONDITION:
        raise SingularJacobian(cond)
    shift = model.c if eps is None else model.c + model.a * eps
    return np.linalg.solve(A, -S @ shift)


@dataclass(frozen=True)
class ResponseRecord:
    perturbed: int
    step: float
    x0: np.ndarray
    dx: np.ndarray  # x1 - x0
    phi: np.ndarray  # r(eps1, x1) - r(0, x0), the forced change included

    @property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.x0), initial=0.0)))

    def balance(self, S: np.ndarray) -> float:
        return float(np.max(np.abs(S @ self.phi), initial=0.0))


def finite_perturbation(
    net: ReactionNetwork,
    model: AffineRateModel,
    j_star: int,
    step: float = DEFAULT_STEP,
) -> ResponseRecord:
    """Steady-state change when ``eps`` of ``j_star`` moves from 0 to ``step``.

    The concentration change is solved for directly: subtracting the two
    steady-state equations gives ``S K dx = -step a_j* S[:, j*]``, which
    keeps rounding errors relative to the size of the response.
    """
    S = stoich_matrix(net).astype(float)
    x0 = steady_state(net, model)
    A = S @ model.K
    cond = _condition(A)
    if cond > MAX_CONDITION:
        raise SingularJacobian(cond)
    forced = step * float(model.a[j_star])
    dx = np.linalg.solve(A, -S[:, j_star] * forced)
    phi = model.K @ dx
    phi[j_star] += forced
    record = ResponseRecord(j_star, step, x0, dx, phi)
    size = max(1.0, float(np.max(np.abs(phi), initial=0.0)))
    if record.balance(S) > BALANCE_TOL * size:
        raise FluxImbalance(f"|S Phi| = {record.balance(S):.3g} for perturbation of reaction {j_star}")
    return record


@dataclass(frozen=True)
class EntryCheck:
    kind: str  # "flux" or "metabolite"
    name: str
    perturbed: str
    structural: bool
    value: float
    classification: str  # "zero", "nonzero" or "unclear"


@dataclass
class PatternReport:
    entries: list[EntryCheck] = field(default_factory=list)

    @property
    def hard(self) -> list[EntryCheck]:
        return [e for e in self.entries if not e.structural and e.classification != "zero"]

    @property
    def soft_misses(self) -> list[EntryCheck]:
        return [e for e in self.entries if e.structural and e.classification != "nonzero"]

    @property
    def structural_nonzeros(self) -> int:
        return sum(e.structural for e in self.entries)

    def extend(self, other: PatternReport) -> None:
        self.entries.extend(other.entries)


def validate_tolerances(tol_zero: float, tol_nonzero: float) -> None:
    if tol_zero <= 0 or tol_nonzero <= 0:
        raise ValueError("tolerances must be positive")
    if tol_zero > 1e-3 * tol_nonzero:
        raise ValueError("tol_zero must be at most 1e-3 * tol_nonzero")


def compare_patterns(
    record: ResponseRecord,
    infl: InfluenceMatrix,
    tol_zero: float = 1e-8,
    tol_nonzero: float = 1e-4,
    *,
    strict: bool = False,
) -> PatternReport:
    """Classify every response entry and set it against the structural prediction.

    With ``strict`` the first structural zero that responds raises
    ``HardViolation``.
    """
    validate_tolerances(tol_zero, tol_nonzero)
    E = infl.n_reactions
    scale = record.scale
    column = infl.matrix[:, record.perturbed]
    values = np.concatenate([record.phi, record.dx])
    names = infl.row_names
    who = infl.reaction_names[record.perturbed]
    report = PatternReport()
    for beta, v in enumerate(values):
        size = abs(float(v))
        if size < tol_zero * scale:
            cls = "zero"
        elif size > tol_nonzero * scale:
            cls = "nonzero"
        else:
            cls = "unclear"
        entry = EntryCheck("flux" if beta < E else "metabolite", names[beta], who, bool(column[beta]), float(v), cls)
        if strict and not entry.structural and cls != "zero":
            raise HardViolation(entry)
        report.entries.append(entry)
    return report


@dataclass(frozen=True)
class NumcheckSummary:
    models: int
    records: int
    report: PatternReport
    max_balance: float  # max over records of |S Phi| / max(1, |Phi|)
    skipped_models: int = 0

    @property
    def soft_rate(self) -> float:
        n = self.report.structural_nonzeros
        return len(self.report.soft_misses) / n if n else 0.0

    @property
    def passed(self) -> bool:
        return not self.report.hard and self.soft_rate < 0.05 and self.max_balance <= BALANCE_TOL


def run_numcheck(
    net: ReactionNetwork,
    infl: InfluenceMatrix,
    *,
    models: int = 20,
    seed: int = 0,
    step: float = DEFAULT_STEP,
    tol_zero: float = 1e-8,
    tol_nonzero: float = 1e-4,
    reactions: Sequence[int] | None = None,
) -> NumcheckSummary:
    """Perturb every reaction in ``models`` independent random affine models."""
    validate_tolerances(tol_zero, tol_nonzero)
    S = stoich_matrix(net).astype(float)
    targets = range(net.n_reactions) if reactions is None else reactions
    report = PatternReport()
    count = 0
    skipped = 0
    worst = 0.0
    for rng in spawn_rngs(make_rng(seed), models):
        try:
            model = random_affine_model(net, rng)
        except SingularJacobian:
            skipped += 1
            continue
        for j in targets:
            rec = finite_perturbation(net, model, j, step)
            report.extend(compare_patterns(rec, infl, tol_zero, tol_nonzero))
            worst = max(worst, rec.balance(S) / max(1.0, float(np.max(np.abs(rec.phi)))))
            count += 1
    return NumcheckSummary(models - skipped, count, report, worst, skipped)


CSV_HEADER = ("perturbed", "kind", "entry", "structural", "value", "classification")


def write_csv(report: PatternReport, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for e in report.entries:
            w.writerow((e.perturbed, e.kind, e.name, int(e.structural), repr(e.value), e.classification))
