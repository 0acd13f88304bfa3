"""Dense complex operator algebra for small quantum systems.

Everything downstream (thermal states, channels, work statistics) is built
on exact eigendecompositions of Hermitian matrices, so this module owns the
validated operator types and the spectral primitives: decomposition with a
deterministic treatment of degenerate eigenspaces, matrix exponentials
through the eigenbasis, and rank-1 energy projectors.

Dimensions are assumed small (a few hundred at most); all arrays are dense
``complex128`` and frozen after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_ATOL = 1e-12
ORTHONORMALITY_ATOL = 1e-10
DENSITY_ATOL = 1e-12
# Eigenvalues closer than this fraction of the spectral range are treated as
# one degenerate cluster when fixing the eigenbasis.
DEGENERACY_REL_GAP = 1e-10


def as_complex_matrix(entries, name: str = "matrix") -> np.ndarray:
    """Coerce ``entries`` to a square, finite complex matrix.

    Returns a read-only ``complex128`` copy. Raises ``ValueError`` for
    non-square shapes or non-finite entries.
    """
    mat = np.array(entries, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
        raise ValueError(f"{name} must be a square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat.view(float))):
        raise ValueError(f"{name} contains non-finite entries")
    mat.flags.writeable = False
    return mat


def matrix_from_pairs(data, name: str = "matrix") -> np.ndarray:
    """Build a complex matrix from nested rows of ``[re, im]`` pairs.

    This is the wire format used by scenario files.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError(f"{name} must be rows of [re, im] pairs")
    return as_complex_matrix(arr[..., 0] + 1j * arr[..., 1], name=name)


def matrix_to_pairs(mat: np.ndarray) -> list:
    """Inverse of :func:`matrix_from_pairs`."""
    m = np.asarray(mat, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


@dataclass(frozen=True)
class HermitianOperator:
    """A finite-dimensional Hermitian operator.

    Construction symmetrizes the input when the anti-Hermitian part is below
    ``atol`` and rejects it otherwise, so ``matrix`` is exactly equal to its
    conjugate transpose.
    """

    matrix: np.ndarray

    def __init__(self, matrix, atol: float = HERMITICITY_ATOL):
        mat = as_complex_matrix(matrix, name="HermitianOperator.matrix")
        dev = np.max(np.abs(mat - mat.conj().T))
        if dev > atol:
            raise ValueError(
                f"matrix is not Hermitian: max |H - H^dag| = {dev:.3e} > {atol:.1e}"
            )
        sym = 0.5 * (mat + mat.conj().T)
        sym.flags.writeable = False
        object.__setattr__(self, "matrix", sym)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def diagonal(cls, values) -> "HermitianOperator":
        vals = np.asarray(values, dtype=float)
        return cls(np.diag(vals.astype(complex)))


@dataclass(frozen=True)
class Spectrum:
    """Full eigensystem of a Hermitian operator.

    ``eigenvalues`` are real and ascending; ``eigenvectors`` holds the
    matching orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __init__(self, eigenvalues, eigenvectors, atol: float = ORTHONORMALITY_ATOL):
        evals = np.array(eigenvalues, dtype=float)
        vecs = np.array(eigenvectors, dtype=complex)
        if evals.ndim != 1 or vecs.shape != (evals.size, evals.size):
            raise ValueError("eigenvalue/eigenvector shapes are inconsistent")
        if not np.all(np.isfinite(evals)) or not np.all(np.isfinite(vecs.view(float))):
            raise ValueError("spectrum contains non-finite entries")
        if np.any(np.diff(evals) < 0):
            raise ValueError("eigenvalues must be sorted ascending")
        gram = vecs.conj().T @ vecs
        dev = np.max(np.abs(gram - np.eye(evals.size)))
        if dev > atol:
            raise ValueError(f"eigenvectors not orthonormal: deviation {dev:.3e}")
        evals.flags.writeable = False
        vecs.flags.writeable = False
        object.__setattr__(self, "eigenvalues", evals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def reconstruct(self) -> np.ndarray:
        """V diag(lambda) V^dag, the operator this spectrum came from."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def shifted(self, offset: float) -> "Spectrum":
        """Same eigenbasis with all eigenvalues shifted by ``offset``."""
        return Spectrum(self.eigenvalues + offset, self.eigenvectors)


@dataclass(frozen=True)
class DensityOperator:
    """A positive semidefinite, unit-trace Hermitian matrix."""

    matrix: np.ndarray

    def __init__(self, matrix, atol: float = DENSITY_ATOL):
        mat = as_complex_matrix(matrix, name="DensityOperator.matrix")
        dev = np.max(np.abs(mat - mat.conj().T))
        if dev > atol:
            raise ValueError(f"density matrix not Hermitian: deviation {dev:.3e}")
        sym = 0.5 * (mat + mat.conj().T)
        tr = np.trace(sym).real
        if abs(tr - 1.0) > atol:
            raise ValueError(f"density matrix trace {tr!r} differs from 1")
        lo = np.linalg.eigvalsh(sym)[0]
        if lo < -atol:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
        sym.flags.writeable = False
        object.__setattr__(self, "matrix", sym)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def maximally_mixed(dim: int) -> DensityOperator:
    """The state with uniform population and no coherences, 1/d."""
    return DensityOperator(np.eye(dim, dtype=complex) / dim)


def _fix_degenerate_clusters(evals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Replace the eigenbasis of each degenerate cluster by a deterministic one.

    Within a cluster the eigenbasis returned by LAPACK is an arbitrary
    orthonormal frame; we fix it by Gram-Schmidt of the standard basis
    vectors projected onto the cluster subspace, taken in index order. This
    makes repeated runs (and different LAPACK builds) reproducible.
    """
    n = evals.size
    spread = float(evals[-1] - evals[0])
    thresh = DEGENERACY_REL_GAP * spread
    out = np.array(vecs)
    i = 0
    while i < n:
        j = i + 1
        while j < n and evals[j] - evals[j - 1] <= thresh:
            j += 1
        if j - i > 1:
            out[:, i:j] = _standard_basis_frame(vecs[:, i:j])
        i = j
    return out

def _standard_basis_frame(block: np.ndarray) -> np.ndarray:
    n, k = block.shape
    proj = block @ block.conj().T
    frame: list[np.ndarray] = []
    for e in range(n):
        v = proj[:, e].copy()
        for u in frame:
            v -= u * (u.conj() @ v)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            frame.append(v / norm)
        if len(frame) == k:
            break
    for col in range(k):
        # fallback for pathological subspaces barely visible from the
        # standard basis; keeps the frame complete
        if len(frame) == k:
            break
        v = block[:, col].copy()
        for u in frame:
            v -= u * (u.conj() @ v)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            frame.append(v / norm)
    return np.column_stack(frame)


def spectral_decompose(h: HermitianOperator) -> Spectrum:
    """Eigendecompose ``h`` into an ascending, deterministically based spectrum."""
    evals, vecs = np.linalg.eigh(h.matrix)
    vecs = _fix_degenerate_clusters(evals, vecs)
    return Spectrum(evals, vecs)


def spectrum_expm(spec: Spectrum, scale: complex) -> np.ndarray:
    """exp(scale * H) evaluated through the eigenbasis of ``spec``."""
    if not np.isfinite(complex(scale)):
        raise ValueError("scale must be finite")
    v = spec.eigenvectors
    return (v * np.exp(scale * spec.eigenvalues)) @ v.conj().T


def hermitian_expm(h: HermitianOperator, scale: complex) -> np.ndarray:
    """exp(scale * H) for Hermitian H.

    Computed as V diag(exp(scale * lambda)) V^dag, which keeps imaginary
    scales exactly unitary and real negative scales positive definite.
    """
    return spectrum_expm(spectral_decompose(h), scale)


def projector(spec: Spectrum, index: int) -> np.ndarray:
    """Rank-1 projector |v_index><v_index| onto one eigenvector."""
    if not 0 <= index < spec.dim:
        raise IndexError(f"eigenvector index {index} out of range for dim {spec.dim}")
    v = spec.eigenvectors[:, index]
    return np.outer(v, v.conj())


def random_hermitian(dim: int, rng: np.random.Generator | int) -> HermitianOperator:
    """A GUE-style random Hermitian matrix, reproducible from the rng/seed."""
    gen = np.random.default_rng(rng) if isinstance(rng, (int, np.integer)) else rng
    a = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    return HermitianOperator(0.5 * (a + a.conj().T))


def random_unitary(dim: int, rng: np.random.Generator | int) -> np.ndarray:
    """A Haar-distributed random unitary, reproducible from the rng/seed."""
    gen = np.random.default_rng(rng) if isinstance(rng, (int, np.integer)) else rng
    a = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    # fix the phase freedom of QR so the draw is a function of ``a`` alone
    d = np.diagonal(r)
    return q * (d / np.abs(d))
