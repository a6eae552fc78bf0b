"""Heuristic convex-roof minimization over pure-state ensembles.

Every size-m ensemble of a rank-r state arises from an m x r isometry
applied to the spectral ensemble, so the search space is the isometry
manifold. Isometries are parameterized by a real vector (real and
imaginary parts of an m x r seed matrix) through Gram-Schmidt
orthonormalization, and the optimizer is a derivative-free coordinate
pattern search with steps shrinking by halves from 0.5 down to 1e-6.
The result is an upper bound on the true roof: the search always starts
from the spectral ensemble (and any caller-seeded ensembles), so it
never does worse than those.

Measures given as :class:`MarginalHMeasure` descriptors run in a
compiled kernel (same search semantics, much faster); arbitrary
callables run in the generic numpy path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import hermitian_eig
from .registers import DEFAULT_TOL, DensityMatrix, PureState

__all__ = [
    "RoofBudget",
    "RoofResult",
    "MarginalHMeasure",
    "convex_roof_min",
    "ensemble_average",
]


@dataclass(frozen=True)
class RoofBudget:
    """Optimizer budget: random restarts, ensemble cap and step schedule."""

    restarts: int = 3            # random starts beyond the deterministic ones
    max_ensemble: int | None = None  # ensemble size cap, default 2 * rank
    step_init: float = 0.5
    step_min: float = 1e-6
    shrink: float = 0.5
    max_sweeps: int = 1000
    value_floor: float = 1e-9    # stop once the (nonnegative) average is this small
    kicks: int = 0               # seeded perturbation restarts from the incumbent
    kick_scales: tuple[float, ...] = (0.5, 0.2, 0.08)


@dataclass(frozen=True)
class MarginalHMeasure:
    """Pure measure ``h(reduced state on block)`` for the compiled roof path.

    ``kind`` is ``lin_sq`` for 2(1 - tr rho^2) or ``lin_sqrt`` for its
    square root; on two qubits with a single-party block, ``lin_sqrt`` is
    the pure-state concurrence.
    """

    dims: tuple[int, ...]
    block: tuple[int, ...]
    kind: str = "lin_sqrt"

    def __post_init__(self):
        if self.kind not in ("lin_sq", "lin_sqrt"):
            raise ValueError(f"unsupported kind {self.kind!r}")
        if not self.block or len(self.block) >= len(self.dims):
            raise ValueError("block must be a nonempty proper party subset")

    def permutation(self) -> tuple[tuple[int, ...], int, int]:
        block = tuple(sorted(self.block))
        rest = tuple(p for p in range(len(self.dims)) if p not in block)
        d_left = math.prod(self.dims[p] for p in block)
        d_right = math.prod(self.dims[p] for p in rest)
        return block + rest, d_left, d_right

    def __call__(self, psi: PureState) -> float:
        perm, dl, dr = self.permutation()
        mat = psi.tensor().transpose(perm).reshape(dl, dr)
        gram = mat @ mat.conj().T
        val = 2.0 * max(1.0 - float(np.sum(np.abs(gram) ** 2)), 0.0)
        return math.sqrt(val) if self.kind == "lin_sqrt" else val


@dataclass
class RoofResult:
    """Best ensemble found; ``value`` is an upper bound on the roof."""

    value: float
    weights: np.ndarray
    states: list[PureState]
    evals: int
    converged: bool
    best_start: str

    def reconstruction(self) -> np.ndarray:
        d = self.states[0].amp.size
        mat = np.zeros((d, d), dtype=complex)
        for w, st in zip(self.weights, self.states):
            mat += w * st.projector()
        return mat


def ensemble_average(ensemble, pure_measure) -> float:
    """Weighted average of a pure-state measure over an ensemble."""
    return float(sum(w * pure_measure(st) for w, st in ensemble))


def _gram_schmidt_columns(z: np.ndarray) -> np.ndarray | None:
    m, r = z.shape
    q = np.empty((m, r), dtype=complex)
    for j in range(r):
        v = z[:, j].astype(complex)
        for i in range(j):
            v = v - q[:, i] * np.vdot(q[:, i], v)
        nrm = float(np.linalg.norm(v))
        if nrm < 1e-10:
            return None
        q[:, j] = v / nrm
    return q


def _ensemble_to_start(ensemble, eigvecs: np.ndarray, sqrt_q: np.ndarray,
                       m: int) -> np.ndarray:
    """Mixing matrix whose rows reproduce a caller-supplied ensemble."""
    r = sqrt_q.size
    phi = np.asarray([math.sqrt(max(float(w), 0.0)) * st.amp for w, st in ensemble])
    v = (phi @ eigvecs[:, :r].conj()) / sqrt_q
    if v.shape[0] < m:
        v = np.vstack([v, np.zeros((m - v.shape[0], r), dtype=complex)])
    return v


_KERNEL = None


def _compiled_kernel():
    """Build (once) the jitted objective and pattern-search driver."""
    global _KERNEL
    if _KERNEL is not None:
        return _KERNEL
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _KERNEL = False
        return _KERNEL

    @njit(cache=True)
    def objective(theta, basis, m, r, d, dl, dr, sqrt_kind):
        q = np.empty((m, r), dtype=np.complex128)
        for j in range(r):
            for i in range(m):
                q[i, j] = complex(theta[j * m + i], theta[m * r + j * m + i])
            for k in range(j):
                coef = 0.0 + 0.0j
                for i in range(m):
                    coef += np.conj(q[i, k]) * q[i, j]
                for i in range(m):
                    q[i, j] -= coef * q[i, k]
            nrm = 0.0
            for i in range(m):
                nrm += q[i, j].real ** 2 + q[i, j].imag ** 2
            nrm = math.sqrt(nrm)
            if nrm < 1e-10:
                return math.inf
            for i in range(m):
                q[i, j] /= nrm
        total = 0.0
        member = np.empty(d, dtype=np.complex128)
        gram = np.empty((dl, dl), dtype=np.complex128)
        for i in range(m):
            w = 0.0
            for c in range(d):
                acc = 0.0 + 0.0j
                for j in range(r):
                    acc += q[i, j] * basis[j, c]
                member[c] = acc
                w += acc.real ** 2 + acc.imag ** 2
            if w <= 1e-14:
                continue
            tr2 = 0.0
            for a in range(dl):
                for b in range(dl):
                    acc = 0.0 + 0.0j
                    for c in range(dr):
                        acc += member[a * dr + c] * np.conj(member[b * dr + c])
                    gram[a, b] = acc
                    tr2 += acc.real ** 2 + acc.imag ** 2
            tr2 /= w * w
            h = 2.0 * (1.0 - tr2)
            if h < 0.0:
                h = 0.0
            if sqrt_kind:
                h = math.sqrt(h)
            total += w * h
        return total

    @njit(cache=True)
    def search(theta0, basis, m, r, d, dl, dr, sqrt_kind,
               step_init, step_min, shrink, max_sweeps, floor):
        theta = theta0.copy()
        f = objective(theta, basis, m, r, d, dl, dr, sqrt_kind)
        evals = 1
        step = step_init
        sweeps = 0
        n = theta.size
        while step >= step_min and sweeps < max_sweeps:
            if f <= floor:
                break
            sweeps += 1
            improved = False
            for i in range(n):
                base = theta[i]
                theta[i] = base + step
                ft = objective(theta, basis, m, r, d, dl, dr, sqrt_kind)
                evals += 1
                if ft < f - 1e-15:
                    f = ft
                    improved = True
                    continue
                theta[i] = base - step
                ft = objective(theta, basis, m, r, d, dl, dr, sqrt_kind)
                evals += 1
                if ft < f - 1e-15:
                    f = ft
                    improved = True
                    continue
                theta[i] = base
            if not improved:
                step *= shrink
        return theta, f, evals, step < step_min

    _KERNEL = (objective, search)
    return _KERNEL


def convex_roof_min(rho: DensityMatrix, pure_measure=None, budget: RoofBudget | None = None,
                    seed: int = 0, seed_ensembles=(), batch_measure=None) -> RoofResult:
    """Minimize the ensemble average of a pure-state measure over decompositions.

    ``pure_measure`` maps a PureState to a float; a
    :class:`MarginalHMeasure` instance enables the compiled kernel.
    ``batch_measure``, when given, maps an array of normalized amplitude
    rows to an array of values (vectorizes the generic path). The search
    is deterministic for a fixed seed; restarts are reduced by value
    first, start index second.
    """
    if pure_measure is None and batch_measure is None:
        raise ValueError("need pure_measure or batch_measure")
    if budget is None:
        budget = RoofBudget()
    tol = DEFAULT_TOL

    dec = hermitian_eig(rho.mat)
    keep = dec.eigvals > tol.rank
    q = dec.eigvals[keep]
    vecs = dec.eigvecs[:, keep]
    r = int(q.size)
    shape = rho.shape
    d = shape.size

    def measure_rows(rows: np.ndarray) -> np.ndarray:
        if batch_measure is not None:
            return np.asarray(batch_measure(rows), dtype=float)
        return np.array([pure_measure(PureState(shape, row, normalize=True))
                         for row in rows], dtype=float)

    if r == 1:
        st = PureState(shape, vecs[:, 0], normalize=True)
        val = float(measure_rows(st.amp[None, :])[0])
        return RoofResult(value=val, weights=np.array([1.0]), states=[st],
                          evals=1, converged=True, best_start="pure")

    m = budget.max_ensemble if budget.max_ensemble is not None else 2 * r
    m = max([m, r] + [len(e) for e in seed_ensembles])
    basis = (vecs * np.sqrt(q)).T  # row j = sqrt(q_j) |psi_j>

    kernel = None
    basis_kernel = None
    if isinstance(pure_measure, MarginalHMeasure) and batch_measure is None:
        if tuple(pure_measure.dims) != shape.dims:
            raise ValueError("measure dims do not match the state register")
        built = _compiled_kernel()
        if built:
            perm, dl, dr = pure_measure.permutation()
            reordered = basis.reshape((r,) + shape.dims).transpose(
                (0,) + tuple(p + 1 for p in perm)).reshape(r, d)
            basis_kernel = np.ascontiguousarray(reordered)
            kernel = (built[1], dl, dr, pure_measure.kind == "lin_sqrt")

    def matrix_from_theta(theta: np.ndarray) -> np.ndarray:
        re = theta[: m * r].reshape(r, m).T
        im = theta[m * r:].reshape(r, m).T
        return re + 1j * im

    def objective_one(theta: np.ndarray) -> float:
        iso = _gram_schmidt_columns(matrix_from_theta(theta))
        if iso is None:
            return math.inf
        members = iso @ basis
        w = np.sum(np.abs(members) ** 2, axis=1)
        live = w > 1e-14
        if not np.any(live):
            return math.inf
        rows = members[live] / np.sqrt(w[live])[:, None]
        return float(np.dot(w[live], measure_rows(rows)))

    def theta_from_matrix(v: np.ndarray) -> np.ndarray:
        # column-major stacking to match the compiled kernel's layout
        return np.concatenate([v.real.T.reshape(-1), v.imag.T.reshape(-1)])

    starts: list[tuple[str, np.ndarray]] = []
    ident = np.zeros((m, r), dtype=complex)
    ident[:r, :r] = np.eye(r)
    starts.append(("spectral", theta_from_matrix(ident)))
    for i, ens in enumerate(seed_ensembles):
        starts.append((f"seed{i}", theta_from_matrix(
            _ensemble_to_start(ens, vecs, np.sqrt(q), m))))
    rng = np.random.default_rng(seed)
    for i in range(budget.restarts):
        z = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
        starts.append((f"random{i}", theta_from_matrix(z)))

    def run_one(theta0: np.ndarray, step_init: float) -> tuple[np.ndarray, float, bool]:
        nonlocal evals
        if kernel is not None:
            run, dl, dr, sqrt_kind = kernel
            theta, f, ev, conv = run(theta0.copy(), basis_kernel, m, r, d, dl, dr,
                                     sqrt_kind, step_init, budget.step_min,
                                     budget.shrink, budget.max_sweeps,
                                     budget.value_floor)
            evals += int(ev)
            return theta, float(f), bool(conv) or float(f) <= budget.value_floor
        theta = theta0.copy()
        f = objective_one(theta)
        evals += 1
        step = step_init
        sweeps = 0
        done = False
        while step >= budget.step_min and sweeps < budget.max_sweeps:
            if f <= budget.value_floor:
                done = True
                break
            sweeps += 1
            improved = False
            for i in range(theta.size):
                base = theta[i]
                for delta in (step, -step):
                    theta[i] = base + delta
                    ft = objective_one(theta)
                    evals += 1
                    if ft < f - 1e-15:
                        f = ft
                        improved = True
                        break
                    theta[i] = base
            if not improved:
                step *= budget.shrink
        return theta, f, done or step < budget.step_min

    evals = 0
    best_val = math.inf
    best_theta = starts[0][1]
    best_label = starts[0][0]
    converged = False
    for label, theta0 in starts:
        if best_val <= budget.value_floor:
            break
        theta, f, conv = run_one(theta0, budget.step_init)
        converged = converged or conv
        if f < best_val - 1e-15:
            best_val = f
            best_theta = theta
            best_label = label

    # Perturbation restarts from the incumbent escape the shallow basins
    # that plague weakly entangled states.
    for k in range(budget.kicks):
        if best_val <= budget.value_floor:
            break
        scale = budget.kick_scales[k % len(budget.kick_scales)]
        kicked = best_theta + scale * rng.standard_normal(best_theta.size)
        theta, f, conv = run_one(kicked, max(0.1, scale))
        converged = converged or conv
        if f < best_val - 1e-12:
            best_val = f
            best_theta = theta
            best_label = f"kick{k}"

    # The mixing matrix is basis-order independent, so the ensemble is
    # rebuilt in the original amplitude order for both paths.
    iso = _gram_schmidt_columns(matrix_from_theta(best_theta))
    members = iso @ basis
    w = np.sum(np.abs(members) ** 2, axis=1)
    live = w > 1e-14
    weights = w[live]
    states = [PureState(shape, row, normalize=True) for row in members[live]]
    value = best_val
    return RoofResult(value=value, weights=weights, states=states,
                      evals=evals, converged=converged, best_start=best_label)
