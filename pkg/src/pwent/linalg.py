"""Dense complex linear algebra over multi-qudit registers.

Kronecker products, reductions, partial transposes, a self-contained
cyclic Jacobi eigensolver for Hermitian matrices, trace norms, entropies
and overlaps. All functions are pure; inputs are never mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .registers import DEFAULT_TOL, DensityMatrix, PureState, RegisterShape, Tolerances

__all__ = [
    "SpectralDecomposition",
    "kron",
    "kron_all",
    "partial_trace",
    "reduced_density",
    "reduced_matrix",
    "partial_transpose",
    "hermitian_eig",
    "trace_norm",
    "linear_entropy",
    "purity_of_matrix",
    "von_neumann_entropy",
    "relative_entropy",
    "overlap",
    "dephased",
    "canonical_phase",
]

_JACOBI_OFF_TARGET = 1e-12  # off-diagonal Frobenius mass at convergence
_MAX_SWEEPS = 100


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in descending order with matching orthonormal columns."""

    eigvals: np.ndarray
    eigvecs: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.eigvecs * self.eigvals) @ self.eigvecs.conj().T

    def rank(self, threshold: float = DEFAULT_TOL.rank) -> int:
        return int(np.sum(self.eigvals > threshold))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product in the row-major basis convention."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(mats) -> np.ndarray:
    out = None
    for m in mats:
        out = np.asarray(m) if out is None else np.kron(out, np.asarray(m))
    if out is None:
        raise ValueError("kron_all needs at least one factor")
    return out


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on ``keep`` (original party order preserved).

    ``keep`` may be the full party set, in which case a copy is returned.
    """
    shape = rho.shape
    keep = shape.validate_parties(keep)
    if len(keep) == shape.n_parties:
        return DensityMatrix(shape, rho.mat)
    return DensityMatrix(shape.subshape(keep), reduced_matrix(rho.mat, shape, keep))


def reduced_matrix(mat: np.ndarray, shape: RegisterShape, keep) -> np.ndarray:
    """Partial trace on a raw matrix; ``keep`` must be sorted and proper."""
    dims = shape.dims
    n = len(dims)
    t = mat.reshape(dims + dims)
    removed = [p for p in range(n) if p not in keep]
    for p in sorted(removed, reverse=True):
        half = t.ndim // 2
        t = np.trace(t, axis1=p, axis2=p + half)
    d = shape.dim_of(keep)
    return t.reshape(d, d)


def reduced_density(psi: PureState, keep) -> DensityMatrix:
    """Reduced state of a pure state, computed without forming the projector."""
    shape = psi.shape
    keep = shape.validate_parties(keep)
    rest = [p for p in range(shape.n_parties) if p not in keep]
    m = psi.tensor().transpose(tuple(keep) + tuple(rest)).reshape(
        shape.dim_of(keep), shape.dim_of(rest) if rest else 1
    )
    return DensityMatrix(shape.subshape(keep), m @ m.conj().T)


def reduced_purity(psi: PureState, keep) -> float:
    """tr(rho_keep^2) for a pure state, via the Gram matrix of the split."""
    shape = psi.shape
    keep = shape.validate_parties(keep)
    rest = [p for p in range(shape.n_parties) if p not in keep]
    m = psi.tensor().transpose(tuple(keep) + tuple(rest)).reshape(
        shape.dim_of(keep), shape.dim_of(rest) if rest else 1
    )
    g = m @ m.conj().T
    return float(np.sum(np.abs(g) ** 2))


def partial_transpose(rho: DensityMatrix, subset) -> np.ndarray:
    """Transpose the ``subset`` tensor factors; returns a raw matrix.

    The result is Hermitian with trace 1 but in general not PSD, so it is
    returned as a plain array rather than a DensityMatrix.
    """
    shape = rho.shape
    subset = shape.validate_parties(subset, allow_full=False)
    dims = shape.dims
    n = len(dims)
    t = rho.mat.reshape(dims + dims)
    axes = list(range(2 * n))
    for p in subset:
        axes[p], axes[p + n] = axes[p + n], axes[p]
    return t.transpose(axes).reshape(shape.size, shape.size)


def canonical_phase(vec: np.ndarray) -> np.ndarray:
    """Rescale so the first significant component is real and positive."""
    v = np.asarray(vec)
    mags = np.abs(v)
    top = float(mags.max(initial=0.0))
    if top == 0.0:
        return v.copy()
    idx = int(np.argmax(mags > 1e-8 * top))
    ph = v[idx] / abs(v[idx])
    return v * np.conj(ph)


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> tuple[float, complex]:
    """2x2 unitary parameters (c, s) diagonalizing [[app, apq], [apq*, aqq]].

    The rotation acts as columns (p, q) <- (c*p - conj(s)*q, s*p + c*q).
    """
    mag = abs(apq)
    u = apq / mag
    tau = (aqq - app) / (2.0 * mag)
    if tau >= 0.0:
        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    return c, s * u


def hermitian_eig(mat: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> SpectralDecomposition:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Deterministic: eigenvalues are returned in descending order, each
    eigenvector is phase-normalized so its first significant component is
    real positive, and exact ties are broken by lexicographic comparison
    of the normalized eigenvector components.

    Raises ValueError when the input is not Hermitian within ``tol.herm``.
    """
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    herm_err = float(np.max(np.abs(m - m.conj().T))) if n else 0.0
    if herm_err > tol.herm:
        raise ValueError(f"matrix not Hermitian: max deviation {herm_err!r}")

    a = (m + m.conj().T) / 2.0
    v = np.eye(n, dtype=complex)
    if n > 1:
        fro = float(np.linalg.norm(a))
        target = max(_JACOBI_OFF_TARGET, 1e-14 * fro)
        rot_thr = target / n
        for _ in range(_MAX_SWEEPS):
            # Off-diagonal mass summed directly: subtracting the diagonal
            # mass from the total cancels catastrophically near convergence.
            off2 = np.abs(a) ** 2
            np.fill_diagonal(off2, 0.0)
            off = math.sqrt(float(off2.sum()))
            if off <= target:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if abs(apq) <= rot_thr:
                        continue
                    app = a[p, p].real
                    aqq = a[q, q].real
                    c, s = _jacobi_rotation(app, aqq, apq)
                    sc = np.conj(s)
                    col_p = c * a[:, p] - sc * a[:, q]
                    col_q = s * a[:, p] + c * a[:, q]
                    # 2x2 block handled in closed form; the rotated rows are
                    # conjugates of the rotated columns (A stays Hermitian).
                    t = 2.0 * (sc * apq).real
                    cc = c * c
                    ss = (s * sc).real
                    col_p[p] = cc * app + ss * aqq - c * t
                    col_q[q] = ss * app + cc * aqq + c * t
                    col_p[q] = 0.0
                    col_q[p] = 0.0
                    a[:, p] = col_p
                    a[:, q] = col_q
                    a[p, :] = np.conj(col_p)
                    a[q, :] = np.conj(col_q)
                    vc_p = c * v[:, p] - sc * v[:, q]
                    v[:, q] = s * v[:, p] + c * v[:, q]
                    v[:, p] = vc_p

    vals = np.diag(a).real.copy()
    vecs = np.empty_like(v)
    for j in range(n):
        vecs[:, j] = canonical_phase(v[:, j])

    order = sorted(
        range(n),
        key=lambda j: (-vals[j], tuple((x.real, x.imag) for x in vecs[:, j])),
    )
    # Stable descending order; exact eigenvalue ties fall through to the
    # lexicographic eigenvector key above.
    vals = vals[order]
    vecs = vecs[:, order]
    return SpectralDecomposition(eigvals=vals, eigvecs=vecs)


def trace_norm(mat: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    dec = hermitian_eig(mat, tol)
    return float(np.sum(np.abs(dec.eigvals)))


def purity_of_matrix(mat: np.ndarray) -> float:
    return float(np.sum(np.abs(mat) ** 2))


def linear_entropy(rho: DensityMatrix) -> float:
    """1 - tr(rho^2); zero exactly on pure states."""
    return 1.0 - rho.purity()


def _positive_eigvals(mat: np.ndarray, tol: Tolerances) -> np.ndarray:
    vals = hermitian_eig(mat, tol).eigvals
    return vals[vals > tol.zero_eig]


def von_neumann_entropy(rho: DensityMatrix, tol: Tolerances = DEFAULT_TOL) -> float:
    """-tr(rho log2 rho), with eigenvalues below ``tol.zero_eig`` dropped."""
    vals = _positive_eigvals(rho.mat, tol)
    return float(-np.sum(vals * np.log2(vals)))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix,
                     tol: Tolerances = DEFAULT_TOL) -> float:
    """Quantum relative entropy tr rho (log2 rho - log2 sigma) in bits.

    Returns ``math.inf`` when the support of rho is not contained in the
    support of sigma. Raises ValueError on register mismatch.
    """
    if rho.shape != sigma.shape:
        raise ValueError("states live on different registers")
    dec_s = hermitian_eig(sigma.mat, tol)
    svals = dec_s.eigvals
    weights = np.einsum("ij,jk,ki->i", dec_s.eigvecs.conj().T, rho.mat, dec_s.eigvecs).real
    null = svals <= tol.zero_eig
    if float(np.sum(weights[null])) > 1e-9:
        return math.inf
    rvals = _positive_eigvals(rho.mat, tol)
    val = float(np.sum(rvals * np.log2(rvals)))
    live = ~null
    val -= float(np.sum(weights[live] * np.log2(svals[live])))
    return max(val, 0.0)


def overlap(psi: PureState, phi: PureState) -> float:
    """|<psi|phi>|^2."""
    if psi.shape != phi.shape:
        raise ValueError("states live on different registers")
    return float(abs(np.vdot(psi.amp, phi.amp)) ** 2)


def dephased(rho: DensityMatrix) -> DensityMatrix:
    """Diagonal part of rho in the computational basis."""
    return DensityMatrix(rho.shape, np.diag(np.diag(rho.mat)))
