"""Extendability predicates, canonical purifications and the
extensibility measure, plus the extension-maximality harness.

A state on k parties is extension-capable when at least two single-party
marginals are mixed; its extensibility is then the genuine measure of
the spectral purification (one ancilla party of dimension equal to the
numerical rank, appended last). The maximality harness checks that no
sampled extension family beats the purification.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import hermitian_eig, partial_trace, reduced_density
from .measures import MeasureConfig, genuine_measure_pure
from .registers import DEFAULT_TOL, DensityMatrix, PureState, RegisterShape

__all__ = [
    "PurificationResult",
    "ExtensionSample",
    "MaximalityReport",
    "is_pw_extendable",
    "is_gpw_extendable",
    "canonical_purification",
    "ensemble_purification",
    "extensibility",
    "default_extensibility_config",
    "sample_extensions",
    "verify_extension_maximality",
]


def default_extensibility_config() -> MeasureConfig:
    """Half-sum genuine form over the square-root linear entropy."""
    return MeasureConfig(reduced="lin_sqrt", genuine_form="half_sum")


@dataclass(frozen=True)
class PurificationResult:
    """Pure state on the original parties plus one trailing ancilla."""

    state: PureState
    ancilla_dim: int
    eigvals: tuple[float, ...]
    near_threshold: bool = False  # spectrum within a decade of the rank cutoff


@dataclass(frozen=True)
class ExtensionSample:
    """One member of the sampled extension families.

    ``ensemble`` is the defining pure-state decomposition of ``state``;
    its weighted genuine-measure average is an achievable upper bound.
    """

    kind: str                    # purification | mixture | split
    state: DensityMatrix
    params: dict
    ensemble: tuple[tuple[float, PureState], ...]


def _marginal_ranks(rho: DensityMatrix, threshold: float) -> list[int]:
    ranks = []
    for p in range(rho.shape.n_parties):
        vals = hermitian_eig(partial_trace(rho, (p,)).mat).eigvals
        ranks.append(int(np.sum(vals > threshold)))
    return ranks


def is_pw_extendable(rho: DensityMatrix, threshold: float = DEFAULT_TOL.rank) -> bool:
    """True when at least two single-party marginals have rank >= 2."""
    if rho.shape.n_parties < 2:
        raise ValueError("extendability needs at least two parties")
    ranks = _marginal_ranks(rho, threshold)
    return sum(r >= 2 for r in ranks) >= 2


def is_gpw_extendable(rho: DensityMatrix, threshold: float = DEFAULT_TOL.rank) -> bool:
    """True when rho is mixed and no proper marginal is pure."""
    dec = hermitian_eig(rho.mat)
    if int(np.sum(dec.eigvals > threshold)) < 2:
        return False  # pure global state
    n = rho.shape.n_parties
    for size in range(1, n):
        for sub in itertools.combinations(range(n), size):
            red = partial_trace(rho, sub)
            if 1.0 - red.purity() < DEFAULT_TOL.fact:
                return False
    return True


def canonical_purification(rho: DensityMatrix,
                           threshold: float = DEFAULT_TOL.rank) -> PurificationResult:
    """Spectral purification: sum_j sqrt(q_j) |psi_j>|j> with descending
    eigenvalues and the deterministic eigenbasis; ancilla dimension is
    the count of eigenvalues above ``threshold``."""
    dec = hermitian_eig(rho.mat)
    keep = dec.eigvals > threshold
    q = dec.eigvals[keep]
    vecs = dec.eigvecs[:, keep]
    r = max(int(q.size), 1)
    near = bool(np.any((dec.eigvals > threshold) & (dec.eigvals <= 10.0 * threshold)))
    amp = (vecs * np.sqrt(np.clip(q, 0.0, None))).reshape(-1)
    shape = RegisterShape(rho.shape.dims + (r,))
    state = PureState(shape, amp, normalize=True)
    return PurificationResult(state=state, ancilla_dim=r,
                              eigvals=tuple(float(x) for x in q),
                              near_threshold=near)


def ensemble_purification(ensemble) -> PurificationResult:
    """sum_i sqrt(p_i) |psi_i>|i> for an explicit ensemble; the ancilla
    marginal reproduces the mixture. Weights must sum to one."""
    ensemble = list(ensemble)
    if not ensemble:
        raise ValueError("empty ensemble")
    weights = np.array([float(w) for w, _ in ensemble])
    if np.any(weights < 0.0) or abs(weights.sum() - 1.0) > DEFAULT_TOL.norm:
        raise ValueError(f"weights must be nonnegative and sum to 1, got sum {weights.sum()!r}")
    states = [st for _, st in ensemble]
    base = states[0].shape
    if any(st.shape != base for st in states):
        raise ValueError("ensemble states live on different registers")
    r = len(ensemble)
    mat = np.stack([math.sqrt(float(w)) * st.amp for w, st in ensemble], axis=1)
    amp = mat.reshape(-1)
    shape = RegisterShape(base.dims + (r,))
    state = PureState(shape, amp, normalize=True)
    eig = tuple(float(w) for w, _ in ensemble)
    return PurificationResult(state=state, ancilla_dim=r, eigvals=eig)


def extensibility(rho: DensityMatrix, cfg: MeasureConfig | None = None) -> float:
    """Genuine measure of the canonical purification, zero for
    non-extendable states."""
    if cfg is None:
        cfg = default_extensibility_config()
    if not is_pw_extendable(rho, cfg.tol.rank):
        return 0.0
    pur = canonical_purification(rho, cfg.tol.rank)
    return genuine_measure_pure(pur.state, cfg)


def _product_ensemble(rho2: DensityMatrix, weight2: float, ancilla_diag: np.ndarray,
                      shape_ext: RegisterShape, threshold: float):
    """Ensemble for rho2 (x) diag(ancilla) on the extended register."""
    dec = hermitian_eig(rho2.mat)
    out = []
    r = ancilla_diag.size
    for j in range(int(np.sum(dec.eigvals > threshold))):
        for c in range(r):
            if ancilla_diag[c] <= threshold:
                continue
            amp = np.zeros(shape_ext.size, dtype=complex)
            amp[c::r] = dec.eigvecs[:, j]
            w = weight2 * float(dec.eigvals[j]) * float(ancilla_diag[c])
            out.append((w, PureState(shape_ext, amp, normalize=True)))
    return out


def sample_extensions(rho: DensityMatrix, strategy: str = "all",
                      threshold: float = DEFAULT_TOL.rank) -> list[ExtensionSample]:
    """Extension families over the purification register: the
    purification itself, mixtures rho (x) rho_C against it on a nine-point
    grid, and spectral splits (splits enumerate subsets of at most the
    top four eigenvalues). Raises for pure input."""
    if strategy not in ("all", "purification", "mixtures", "splits"):
        raise ValueError(f"unknown strategy {strategy!r}")
    dec = hermitian_eig(rho.mat)
    keep = dec.eigvals > threshold
    q = dec.eigvals[keep]
    vecs = dec.eigvecs[:, keep]
    r = int(q.size)
    if r < 2:
        raise ValueError("extension sampling needs a mixed state")

    pur = canonical_purification(rho, threshold)
    shape_ext = pur.state.shape
    phi = pur.state
    samples: list[ExtensionSample] = []

    if strategy in ("all", "purification"):
        samples.append(ExtensionSample(
            kind="purification",
            state=DensityMatrix(shape_ext, phi.projector()),
            params={},
            ensemble=((1.0, phi),),
        ))

    ancilla_diag = np.zeros(r)
    ancilla_diag[: q.size] = q

    if strategy in ("all", "mixtures"):
        for p in [x / 10.0 for x in range(1, 10)]:
            ens = [( (1.0 - p), phi)] + [
                (p * w, st) for w, st in _product_ensemble(
                    rho, 1.0, ancilla_diag, shape_ext, threshold)
            ]
            mat = sum(w * st.projector() for w, st in ens)
            samples.append(ExtensionSample(
                kind="mixture",
                state=DensityMatrix(shape_ext, mat),
                params={"p": p},
                ensemble=tuple(ens),
            ))

    if strategy in ("all", "splits"):
        idx = list(range(min(r, 4)))
        for size in range(1, len(idx)):
            for alpha in itertools.combinations(idx, size):
                p_alpha = float(np.sum(q[list(alpha)]))
                comp = [j for j in range(r) if j not in alpha]
                # purification of the alpha part, embedded on the same ancilla
                amp = np.zeros(shape_ext.size, dtype=complex)
                for j in alpha:
                    amp[j::r] = math.sqrt(q[j] / p_alpha) * vecs[:, j]
                phi_alpha = PureState(shape_ext, amp, normalize=True)
                comp_mat = sum(q[j] * np.outer(vecs[:, j], vecs[:, j].conj())
                               for j in comp) / (1.0 - p_alpha)
                rho2 = DensityMatrix(rho.shape, comp_mat)
                ens = [(p_alpha, phi_alpha)] + [
                    ((1.0 - p_alpha) * w, st) for w, st in _product_ensemble(
                        rho2, 1.0, ancilla_diag, shape_ext, threshold)
                ]
                mat = sum(w * st.projector() for w, st in ens)
                samples.append(ExtensionSample(
                    kind="split",
                    state=DensityMatrix(shape_ext, mat),
                    params={"alpha": alpha, "p_alpha": p_alpha},
                    ensemble=tuple(ens),
                ))
    return samples


@dataclass
class MaximalityReport:
    """Per-sample achievable bounds against the extensibility value."""

    e_ext: float
    rows: list[tuple[str, dict, float]] = field(default_factory=list)
    tol: float = DEFAULT_TOL.cmp

    @property
    def passed(self) -> bool:
        return all(bound <= self.e_ext + self.tol for _, _, bound in self.rows)


def verify_extension_maximality(rho: DensityMatrix, cfg: MeasureConfig | None = None,
                                strategy: str = "all") -> MaximalityReport:
    """Check that every sampled extension's defining-ensemble average of
    the genuine measure stays below the extensibility value.

    The bound per sample is the seeded-ensemble average itself; a roof
    search could only lower it, so the verdict is unaffected.
    """
    if cfg is None:
        cfg = default_extensibility_config()
    dec = hermitian_eig(rho.mat)
    if int(np.sum(dec.eigvals > cfg.tol.rank)) < 2:
        raise ValueError("maximality harness needs a mixed state")
    if not is_pw_extendable(rho, cfg.tol.rank):
        raise ValueError("maximality harness needs mixed single-party marginals")
    value = extensibility(rho, cfg)
    report = MaximalityReport(e_ext=value, tol=cfg.tol.cmp)
    for sample in sample_extensions(rho, strategy, cfg.tol.rank):
        bound = float(sum(w * genuine_measure_pure(st, cfg)
                          for w, st in sample.ensemble))
        report.rows.append((sample.kind, sample.params, bound))
    return report
