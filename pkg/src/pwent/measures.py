"""Reduced functions, bipartite and genuine measures, and the three
partitewise-measure families (genuine-measure based, bipartition based,
negativity based, plus the relative-entropy upper bound).

Pure-state evaluations are exact up to factorization tolerance; mixed
inputs to the h-based families route through the convex roof and are
upper bounds. Default configurations reproduce the GHZ/W benchmark
table: the gem family uses the min-over-parties genuine form with the
squared linear-entropy reduced function, the genuine-gem family and the
extensibility measure use the half-sum form.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .convex_roof import MarginalHMeasure, RoofBudget, convex_roof_min
from .linalg import (
    hermitian_eig,
    partial_trace,
    partial_transpose,
    purity_of_matrix,
    reduced_density,
    relative_entropy,
    dephased,
    trace_norm,
    von_neumann_entropy,
)
from .registers import DEFAULT_TOL, DensityMatrix, PureState, Tolerances, pure_to_dm
from .separability import Factorization, finest_factorization
from .partitions import enumerate_admissible_partitions

__all__ = [
    "REDUCED_KINDS",
    "GENUINE_FORMS",
    "MeasureConfig",
    "reduced_value",
    "bipartite_pure",
    "bipartite_mixed",
    "wootters_concurrence",
    "negativity",
    "genuine_measure_pure",
    "partitewise_gem",
    "genuine_partitewise_gem",
    "partitewise_bipartition",
    "partitewise_negativity",
    "relative_entropy_upper_bound",
]

REDUCED_KINDS = ("lin_sq", "lin_sqrt", "von_neumann")
GENUINE_FORMS = ("min_parties", "half_sum")


@dataclass(frozen=True)
class MeasureConfig:
    """Reduced function, genuine form and budgets shared by one evaluation."""

    reduced: str = "lin_sq"
    genuine_form: str = "min_parties"
    tol: Tolerances = field(default_factory=Tolerances)
    roof_budget: RoofBudget = field(default_factory=RoofBudget)
    roof_seed: int = 0

    def __post_init__(self):
        if self.reduced not in REDUCED_KINDS:
            raise ValueError(f"unknown reduced function {self.reduced!r}")
        if self.genuine_form not in GENUINE_FORMS:
            raise ValueError(f"unknown genuine form {self.genuine_form!r}")

    def describe(self) -> str:
        return f"h={self.reduced} eg={self.genuine_form}"


def reduced_value(rho: DensityMatrix, kind: str = "lin_sq") -> float:
    """Scalar reduced function: vanishes exactly on pure states.

    lin_sq is 2(1 - tr rho^2), lin_sqrt its square root, von_neumann the
    base-2 von Neumann entropy. Linear entropies below the zero-eigenvalue
    threshold collapse to exact zero; the square root would otherwise
    amplify rounding dust at pure marginals to ~1e-8.
    """
    if kind == "von_neumann":
        return von_neumann_entropy(rho)
    ent = max(1.0 - purity_of_matrix(rho.mat), 0.0)
    if ent < DEFAULT_TOL.zero_eig:
        ent = 0.0
    if kind == "lin_sq":
        return 2.0 * ent
    if kind == "lin_sqrt":
        return math.sqrt(2.0 * ent)
    raise ValueError(f"unknown reduced function {kind!r}")


def bipartite_pure(psi: PureState, block, kind: str = "lin_sq") -> float:
    """Entanglement of a pure state across block | complement."""
    block = psi.shape.validate_parties(block, allow_full=False)
    return reduced_value(reduced_density(psi, block), kind)


def wootters_concurrence(rho: DensityMatrix) -> float:
    """Closed-form two-qubit concurrence."""
    if rho.shape.dims != (2, 2):
        raise ValueError(f"concurrence needs a two-qubit state, got dims {rho.shape.dims}")
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    yy = np.kron(sy, sy)
    tilde = yy @ rho.mat.conj() @ yy
    dec = hermitian_eig(rho.mat)
    root = (dec.eigvecs * np.sqrt(np.clip(dec.eigvals, 0.0, None))) @ dec.eigvecs.conj().T
    lam = np.sqrt(np.clip(hermitian_eig(root @ tilde @ root).eigvals, 0.0, None))
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def bipartite_mixed(rho: DensityMatrix, kind: str = "lin_sqrt",
                    budget: RoofBudget | None = None, seed: int = 0) -> tuple[float, bool]:
    """Bipartite entanglement of a possibly mixed two-party state.

    Returns (value, exact). Two-qubit states use the Wootters closed
    form; anything else is a convex-roof upper bound of the pure measure.
    """
    if rho.shape.n_parties != 2:
        raise ValueError("bipartite_mixed expects a two-party register")
    if rho.shape.dims == (2, 2):
        return wootters_concurrence(rho), True
    if rho.is_pure():
        dec = hermitian_eig(rho.mat)
        psi = PureState(rho.shape, dec.eigvecs[:, 0], normalize=True)
        return bipartite_pure(psi, (0,), kind), True
    if kind == "von_neumann":
        roof = convex_roof_min(
            rho, pure_measure=lambda st: bipartite_pure(st, (0,), kind),
            budget=budget or RoofBudget(), seed=seed)
    else:
        roof = convex_roof_min(
            rho, pure_measure=MarginalHMeasure(rho.shape.dims, (0,), kind),
            budget=budget or RoofBudget(), seed=seed)
    return roof.value, False


def negativity(rho: DensityMatrix, subset) -> float:
    """(||rho^{T_subset}||_tr - 1) / 2, clamped at zero."""
    pt = partial_transpose(rho, subset)
    return max(0.0, (trace_norm(pt) - 1.0) / 2.0)


def _grouped_marginals(psi: PureState, groups) -> list[DensityMatrix]:
    return [reduced_density(psi, g) for g in groups]


def _group_biseparable(fact: Factorization, groups) -> bool:
    """True when some bipartition of the groups splits the factor set."""
    group_of = {}
    for gi, g in enumerate(groups):
        for p in g:
            group_of[p] = gi
    # connect groups sharing a factor; biseparable iff the graph splits
    n = len(groups)
    adj = {i: set() for i in range(n)}
    for f in fact.factors:
        touched = sorted({group_of[p] for p in f.parties})
        for a, b in zip(touched, touched[1:]):
            adj[a].add(b)
            adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) < n


def genuine_measure_pure(psi: PureState, cfg: MeasureConfig | None = None,
                         groups=None) -> float:
    """Genuine multipartite entanglement of a pure state.

    min_parties takes the minimum of the reduced function over the
    single-party (or per-group) marginals and is gated to zero on
    biseparable states; half_sum takes half the sum of the same values
    with no gate, matching the figure-caption convention.
    """
    if cfg is None:
        cfg = MeasureConfig()
    n = psi.shape.n_parties
    if groups is None:
        groups = [(p,) for p in range(n)]
    groups = [tuple(g) for g in groups]
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    vals = [reduced_value(m, cfg.reduced) for m in _grouped_marginals(psi, groups)]
    if cfg.genuine_form == "half_sum":
        return 0.5 * float(sum(vals))
    fact = finest_factorization(psi, cfg.tol.fact)
    if _group_biseparable(fact, groups):
        return 0.0
    return float(min(vals))


def _genuine_of_factor(state: PureState, cfg: MeasureConfig) -> float:
    """E_g of one finest factor: bipartite value for two parties, the
    genuine measure otherwise (factors are non-biseparable by construction)."""
    if state.shape.n_parties == 1:
        return 0.0
    if state.shape.n_parties == 2:
        return bipartite_pure(state, (0,), cfg.reduced)
    return genuine_measure_pure(state, cfg)


def _validate_designated(psi_shape, designated) -> tuple[int, ...]:
    designated = tuple(int(p) for p in designated)
    if len(designated) < 2 or len(set(designated)) != len(designated):
        raise ValueError("need at least two distinct designated parties")
    if any(p < 0 or p >= psi_shape.n_parties for p in designated):
        raise ValueError("designated party out of range")
    return designated


def partitewise_gem(psi: PureState, designated, cfg: MeasureConfig | None = None) -> float:
    """Partitewise entanglement from genuine measures of the finest factors.

    Factors holding two or more designated parties contribute their
    genuine measure. For exactly two designated parties the bipartite
    entanglement of the reduced pair state is added on top of any such
    factor with three or more parties; a two-party factor is the pair
    itself, so its contribution is exactly that reduced-pair term.
    """
    if cfg is None:
        cfg = MeasureConfig()
    designated = _validate_designated(psi.shape, designated)
    k = len(designated)
    fact = finest_factorization(psi, cfg.tol.fact)
    upsilon = [f for f in fact.factors
               if len(set(f.parties) & set(designated)) >= 2]
    if k == 2:
        pair = reduced_density(psi, designated)
        value, _ = bipartite_mixed(pair, cfg.reduced, cfg.roof_budget, cfg.roof_seed)
        for f in upsilon:
            if f.state.shape.n_parties >= 3:
                value += genuine_measure_pure(f.state, cfg)
        return value
    return float(sum(_genuine_of_factor(f.state, cfg) for f in upsilon))


def genuine_partitewise_gem(psi: PureState, designated,
                            cfg: MeasureConfig | None = None) -> float:
    """Genuine partitewise entanglement: the genuine measure of the single
    finest factor containing every designated party, zero when the
    designated parties split across factors."""
    if cfg is None:
        cfg = MeasureConfig(genuine_form="half_sum")
    designated = _validate_designated(psi.shape, designated)
    fact = finest_factorization(psi, cfg.tol.fact)
    for f in fact.factors:
        hit = len(set(f.parties) & set(designated))
        if hit == len(designated):
            return _genuine_of_factor(f.state, cfg)
        if hit:
            return 0.0
    return 0.0


def _inner_h_minima(psi: PureState, designated, kind: str) -> list[float]:
    """Per designated party, the minimum reduced value over its block
    augmented by any subset of the undesignated parties."""
    n = psi.shape.n_parties
    free = [p for p in range(n) if p not in designated]
    out = []
    for a in designated:
        best = math.inf
        for rsize in range(len(free) + 1):
            for extra in itertools.combinations(free, rsize):
                block = (a,) + extra
                best = min(best, reduced_value(reduced_density(psi, block), kind))
        out.append(best)
    return out


def partitewise_bipartition(psi: PureState, designated, kind: str = "lin_sq",
                            variant: str = "min") -> float:
    """Bipartition-based family: min / gated sum / geometric mean of the
    per-party minimal cut values (cuts never absorb other designated parties)."""
    designated = _validate_designated(psi.shape, designated)
    inner = _inner_h_minima(psi, designated, kind)
    if variant == "min":
        return float(min(inner))
    if variant == "sum":
        return float(sum(inner)) if min(inner) > 0.0 else 0.0
    if variant == "geo":
        return float(math.prod(inner)) ** (1.0 / len(inner))
    raise ValueError(f"unknown variant {variant!r}")


def partitewise_negativity(rho: DensityMatrix | PureState, designated,
                           variant: str = "min") -> float:
    """Negativity-based family; applies to mixed states directly but is
    blind to PPT entanglement."""
    if isinstance(rho, PureState):
        rho = pure_to_dm(rho)
    designated = _validate_designated(rho.shape, designated)
    n = rho.shape.n_parties
    free = [p for p in range(n) if p not in designated]
    inner = []
    for a in designated:
        best = math.inf
        for rsize in range(len(free) + 1):
            for extra in itertools.combinations(free, rsize):
                best = min(best, negativity(rho, (a,) + extra))
        inner.append(best)
    if variant == "min":
        return float(min(inner))
    if variant == "sum":
        return float(sum(inner)) if min(inner) > 0.0 else 0.0
    if variant == "geo":
        return float(math.prod(inner)) ** (1.0 / len(inner))
    raise ValueError(f"unknown variant {variant!r}")


def relative_entropy_upper_bound(rho: DensityMatrix, designated,
                                 extra_candidates=(),
                                 include_dephased: bool = True) -> float:
    """Upper bound on the relative-entropy distance to the partitewise
    separable set, minimized over a finite candidate family.

    Candidates: products of the state's own marginals over every
    admissible partition, their computational-basis dephasings, and any
    caller-supplied states. Returns ``math.inf`` when no candidate has
    compatible support; the result is a bound, not the measure.
    """
    designated = _validate_designated(rho.shape, designated)
    candidates: list[DensityMatrix] = []
    for part in enumerate_admissible_partitions(rho.shape, designated):
        mat = np.array([[1.0 + 0.0j]])
        for block in part.blocks:
            mat = np.kron(mat, partial_trace(rho, block).mat)
        block_order = [p for b in part.blocks for p in b]
        dims = tuple(rho.shape.dims[p] for p in block_order)
        perm = [block_order.index(p) for p in range(rho.shape.n_parties)]
        d = rho.shape.size
        tens = mat.reshape(dims + dims)
        tens = tens.transpose(perm + [rho.shape.n_parties + p for p in perm])
        sigma = DensityMatrix(rho.shape, tens.reshape(d, d))
        candidates.append(sigma)
        if include_dephased:
            candidates.append(dephased(sigma))
    candidates.extend(extra_candidates)
    return min(relative_entropy(rho, sigma) for sigma in candidates)
