"""Register shapes and state containers for multi-qudit systems.

Basis convention: row-major mixed-radix over party index 0..n-1, i.e. a
basis index maps to a digit string (b_0, b_1, ..., b_{n-1}) with party 0
the slowest-varying digit. Party order is never silently permuted;
operations returning reduced objects keep the original relative order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "RegisterShape",
    "PureState",
    "DensityMatrix",
    "pure_to_dm",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used throughout the package (all overridable)."""

    norm: float = 1e-9      # state normalization / trace
    herm: float = 1e-9      # Hermiticity
    psd: float = 1e-9       # allowed negative eigenvalue mass
    recon: float = 1e-8     # spectral / purification reconstruction
    eig: float = 1e-8       # eigenvalue comparisons
    fact: float = 1e-8      # purity threshold in factor detection
    zero_eig: float = 1e-12  # eigenvalues below this are treated as exact zeros
    rank: float = 1e-12     # rank / mixedness threshold
    cmp: float = 1e-7       # extension-maximality comparison slack


DEFAULT_TOL = Tolerances()


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RegisterShape:
    """Ordered list of per-party local dimensions.

    Party labels are implicit by index. Dimension-1 parties are permitted
    so that rank-1 ancillas (trivial purifications) are representable.
    """

    dims: tuple[int, ...]

    def __init__(self, dims) -> None:
        dims = tuple(int(d) for d in dims)
        if len(dims) < 1:
            raise ValueError("a register needs at least one party")
        if any(d < 1 for d in dims):
            raise ValueError(f"local dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    def parties(self) -> tuple[int, ...]:
        return tuple(range(len(self.dims)))

    def dim_of(self, parties) -> int:
        return math.prod(self.dims[p] for p in parties)

    def subshape(self, parties) -> "RegisterShape":
        return RegisterShape(tuple(self.dims[p] for p in parties))

    def digits(self, index: int) -> tuple[int, ...]:
        """Mixed-radix digits of a basis index, party 0 first."""
        out = []
        for d in reversed(self.dims):
            out.append(index % d)
            index //= d
        return tuple(reversed(out))

    def index(self, digits) -> int:
        """Basis index of a digit string, inverse of :meth:`digits`."""
        idx = 0
        for b, d in zip(digits, self.dims, strict=True):
            if not 0 <= b < d:
                raise ValueError(f"digit {b} out of range for dimension {d}")
            idx = idx * d + b
        return idx

    def validate_parties(self, parties, *, allow_full: bool = True,
                         allow_empty: bool = False) -> tuple[int, ...]:
        """Normalize a party subset to a sorted tuple, with range checks."""
        parties = tuple(sorted({int(p) for p in parties}))
        if not parties and not allow_empty:
            raise ValueError("party subset must be nonempty")
        if any(p < 0 or p >= self.n_parties for p in parties):
            raise ValueError(f"party index out of range for {self.n_parties} parties")
        if not allow_full and len(parties) == self.n_parties:
            raise ValueError("party subset must be a proper subset")
        return parties


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over a :class:`RegisterShape`."""

    shape: RegisterShape
    amp: np.ndarray = field(repr=False)

    def __init__(self, shape: RegisterShape, amp, *, tol: Tolerances = DEFAULT_TOL,
                 normalize: bool = False) -> None:
        if not isinstance(shape, RegisterShape):
            shape = RegisterShape(shape)
        amp = np.asarray(amp, dtype=complex).reshape(-1).copy()
        if amp.size != shape.size:
            raise ValueError(f"amplitude length {amp.size} != register dimension {shape.size}")
        nrm = float(np.linalg.norm(amp))
        if normalize:
            if nrm == 0.0:
                raise ValueError("cannot normalize the zero vector")
            amp = amp / nrm
        elif abs(nrm - 1.0) > tol.norm:
            raise ValueError(f"state not normalized: ||amp|| = {nrm!r}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "amp", _freeze(amp))

    @property
    def dims(self) -> tuple[int, ...]:
        return self.shape.dims

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per party."""
        return self.amp.reshape(self.dims)

    def projector(self) -> np.ndarray:
        return np.outer(self.amp, self.amp.conj())

    def isclose(self, other: "PureState", tol: float = 1e-9,
                up_to_phase: bool = False) -> bool:
        if self.shape != other.shape:
            return False
        if up_to_phase:
            return abs(abs(np.vdot(self.amp, other.amp)) - 1.0) <= tol
        return bool(np.linalg.norm(self.amp - other.amp) <= tol)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, trace-one matrix over a :class:`RegisterShape`.

    The constructor always checks shape, Hermiticity and trace; the PSD
    check costs an eigendecomposition and is opt-in via ``check_psd``
    (used on file loads and external inputs).
    """

    shape: RegisterShape
    mat: np.ndarray = field(repr=False)

    def __init__(self, shape: RegisterShape, mat, *, tol: Tolerances = DEFAULT_TOL,
                 check_psd: bool = False) -> None:
        if not isinstance(shape, RegisterShape):
            shape = RegisterShape(shape)
        mat = np.asarray(mat, dtype=complex).copy()
        d = shape.size
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} != ({d}, {d})")
        herm_err = float(np.max(np.abs(mat - mat.conj().T))) if d else 0.0
        if herm_err > tol.herm:
            raise ValueError(f"matrix not Hermitian: max deviation {herm_err!r}")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > tol.norm:
            raise ValueError(f"trace must be 1, got {tr!r}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "mat", _freeze(mat))
        if check_psd:
            evals = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
            if float(evals.min()) < -tol.psd:
                raise ValueError(f"matrix not PSD: min eigenvalue {float(evals.min())!r}")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.shape.dims

    def purity(self) -> float:
        """tr(rho^2), computed as the squared Frobenius norm."""
        return float(np.sum(np.abs(self.mat) ** 2))

    def is_pure(self, tol: float = DEFAULT_TOL.fact) -> bool:
        return 1.0 - self.purity() < tol

    def isclose(self, other: "DensityMatrix", tol: float = 1e-9) -> bool:
        return self.shape == other.shape and bool(
            np.linalg.norm(self.mat - other.mat) <= tol
        )


def pure_to_dm(psi: PureState) -> DensityMatrix:
    """Projector |psi><psi| as a DensityMatrix."""
    return DensityMatrix(psi.shape, psi.projector())
