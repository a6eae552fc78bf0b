"""Named state families and seeded random state constructors.

All stochastic constructors take an explicit seed or generator; streams
are PCG64 (``numpy.random.default_rng``) and amplitudes are drawn as
standard normal real parts followed by imaginary parts, then normalized.
"""

from __future__ import annotations

import numpy as np

from .partitions import PartitionSpec
from .registers import DensityMatrix, PureState, RegisterShape

__all__ = [
    "basis_state",
    "make_bell",
    "make_ghz",
    "make_w",
    "make_ame5",
    "fig1_state",
    "fig2a_state",
    "fig2b_state",
    "maximally_mixed",
    "random_pure",
    "random_product",
    "random_density",
    "random_unitary",
    "apply_local_unitaries",
]


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def basis_state(shape: RegisterShape, digits) -> PureState:
    amp = np.zeros(shape.size, dtype=complex)
    amp[shape.index(digits)] = 1.0
    return PureState(shape, amp)


def make_ghz(n: int, d: int = 2) -> PureState:
    """(1/sqrt(d)) sum_j |j j ... j> on n parties of local dimension d."""
    if n < 2 or d < 2:
        raise ValueError(f"need n >= 2 and d >= 2, got n={n}, d={d}")
    shape = RegisterShape((d,) * n)
    amp = np.zeros(shape.size, dtype=complex)
    for j in range(d):
        amp[shape.index((j,) * n)] = 1.0 / np.sqrt(d)
    return PureState(shape, amp)


def make_bell() -> PureState:
    """(|00> + |11>) / sqrt(2)."""
    return make_ghz(2, 2)


def make_w(n: int = 3) -> PureState:
    """Uniform superposition of the n single-excitation qubit basis states."""
    if n < 2:
        raise ValueError(f"need n >= 2, got n={n}")
    shape = RegisterShape((2,) * n)
    amp = np.zeros(shape.size, dtype=complex)
    for i in range(n):
        digits = [0] * n
        digits[i] = 1
        amp[shape.index(digits)] = 1.0 / np.sqrt(n)
    return PureState(shape, amp)


# Five-qubit state with eight signed amplitudes of magnitude 1/sqrt(8);
# every marginal on at most two parties is maximally mixed.
_AME5_TERMS = (
    ((0, 0, 0, 0, 0), -1.0),
    ((0, 1, 1, 1, 1), +1.0),
    ((1, 0, 0, 1, 1), -1.0),
    ((1, 1, 1, 0, 0), +1.0),
    ((0, 0, 1, 1, 0), +1.0),
    ((0, 1, 0, 0, 1), +1.0),
    ((1, 0, 1, 0, 1), +1.0),
    ((1, 1, 0, 1, 0), +1.0),
)


def make_ame5() -> PureState:
    shape = RegisterShape((2,) * 5)
    amp = np.zeros(shape.size, dtype=complex)
    for digits, sign in _AME5_TERMS:
        amp[shape.index(digits)] = sign / np.sqrt(8.0)
    return PureState(shape, amp)


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def fig1_state(p: float, t: float) -> DensityMatrix:
    """p |phi><phi| + (1-p) I/4 with |phi> = sqrt(t)|00> + sqrt(1-t)|11>."""
    p = _check_unit("p", p)
    t = _check_unit("t", t)
    shape = RegisterShape((2, 2))
    phi = np.zeros(4, dtype=complex)
    phi[0] = np.sqrt(t)
    phi[3] = np.sqrt(1.0 - t)
    mat = p * np.outer(phi, phi.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return DensityMatrix(shape, mat)


def fig2a_state(p: float) -> DensityMatrix:
    """p |Phi+><Phi+| + (1-p) |+><+| x |0><0|."""
    p = _check_unit("p", p)
    shape = RegisterShape((2, 2))
    bell = make_bell().projector()
    plus0 = np.zeros(4, dtype=complex)
    plus0[0] = plus0[2] = 1.0 / np.sqrt(2.0)  # (|00> + |10>) / sqrt(2)
    mat = p * bell + (1.0 - p) * np.outer(plus0, plus0.conj())
    return DensityMatrix(shape, mat)


def fig2b_state(p: float) -> DensityMatrix:
    """Werner-type mixture p |Phi+><Phi+| + (1-p) I/4."""
    p = _check_unit("p", p)
    shape = RegisterShape((2, 2))
    mat = p * make_bell().projector() + (1.0 - p) * np.eye(4) / 4.0
    return DensityMatrix(shape, mat)


def maximally_mixed(shape: RegisterShape) -> DensityMatrix:
    d = shape.size
    return DensityMatrix(shape, np.eye(d) / d)


def random_pure(shape: RegisterShape, seed_or_rng=0) -> PureState:
    """Haar-like pure state: normalized complex Gaussian amplitudes."""
    rng = _rng(seed_or_rng)
    d = shape.size
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(shape, z, normalize=True)


def random_product(partition: PartitionSpec, seed_or_rng=0) -> PureState:
    """Tensor product of independent random block states, original party order."""
    if not partition.covers_all():
        raise ValueError("partition blocks must cover every party")
    rng = _rng(seed_or_rng)
    shape = partition.shape
    block_states = [random_pure(shape.subshape(b), rng) for b in partition.blocks]
    amp = np.array([1.0 + 0.0j])
    for st in block_states:
        amp = np.kron(amp, st.amp)
    block_order = [p for b in partition.blocks for p in b]
    block_dims = tuple(shape.dims[p] for p in block_order)
    # permute axes from block order back to ascending party order
    perm = [block_order.index(p) for p in range(shape.n_parties)]
    amp = amp.reshape(block_dims).transpose(perm).reshape(-1)
    return PureState(shape, amp)


def random_density(shape: RegisterShape, rank: int, seed_or_rng=0) -> DensityMatrix:
    """Random rank-``rank`` mixture of Haar-like pure states with Dirichlet-free weights."""
    rng = _rng(seed_or_rng)
    if not 1 <= rank <= shape.size:
        raise ValueError(f"rank must lie in [1, {shape.size}]")
    w = rng.random(rank) + 0.05
    w /= w.sum()
    mat = np.zeros((shape.size, shape.size), dtype=complex)
    for wi in w:
        psi = random_pure(shape, rng)
        mat += wi * psi.projector()
    return DensityMatrix(shape, mat)


def random_unitary(dim: int, seed_or_rng=0) -> np.ndarray:
    """Haar-like unitary from Gram-Schmidt on a complex Gaussian matrix."""
    rng = _rng(seed_or_rng)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q = np.zeros_like(z)
    for j in range(dim):
        v = z[:, j]
        for i in range(j):
            v = v - q[:, i] * np.vdot(q[:, i], v)
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            raise RuntimeError("degenerate Gaussian draw")
        q[:, j] = v / nrm
    return q


def apply_local_unitaries(psi: PureState, unitaries) -> PureState:
    """Apply one unitary per party (identity for ``None`` entries)."""
    t = psi.tensor()
    n = psi.shape.n_parties
    unitaries = list(unitaries)
    if len(unitaries) != n:
        raise ValueError("need one unitary per party")
    for i, u in enumerate(unitaries):
        if u is None:
            continue
        t = np.tensordot(np.asarray(u), t, axes=([1], [i]))
        t = np.moveaxis(t, 0, i)
    return PureState(psi.shape, t.reshape(-1))
