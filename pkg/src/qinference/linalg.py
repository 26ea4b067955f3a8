"""
Dense complex linear algebra primitives and validated operator types.

Matrices are plain ``numpy`` complex arrays; :class:`Projector` and
:class:`DensityMatrix` wrap a read-only copy after checking their defining
properties. Every rank decision goes through ``eigen_gap_tol``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

MAX_DIM = 32


@dataclass(frozen=True)
class ToleranceProfile:
    """Numerical thresholds shared by all modules."""

    validation_tol: float = 1e-10
    eigen_gap_tol: float = 1e-8
    probability_tol: float = 1e-9

    def __post_init__(self):
        for name in ("validation_tol", "eigen_gap_tol", "probability_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InputError(f"{name} must be strictly positive, got {value!r}")
        if self.eigen_gap_tol >= 0.5:
            raise InputError("eigen_gap_tol must be < 0.5")


DEFAULT_TOL = ToleranceProfile()


def as_complex_matrix(a, max_dim: int = MAX_DIM) -> np.ndarray:
    """Return ``a`` as a square, finite complex128 array.

    Raises
    ------
    InputError
        If the array is not square, is empty, exceeds ``max_dim`` or holds
        NaN/Inf entries.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    d = m.shape[0]
    if d < 1:
        raise InputError("matrix dimension must be >= 1")
    if d > max_dim:
        raise InputError(f"dimension {d} exceeds the supported maximum {max_dim}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return m


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=np.complex128, copy=True)
    m.setflags(write=False)
    return m


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


class Projector:
    """Orthogonal projector: Hermitian, idempotent, spectrum in {0, 1}.

    Instances are immutable; ``matrix`` is a read-only array.
    """

    __slots__ = ("matrix", "rank", "tol")

    def __init__(self, matrix, tol: ToleranceProfile = DEFAULT_TOL):
        m = as_complex_matrix(matrix)
        herm = max_abs(m - dagger(m))
        if herm > tol.validation_tol:
            raise InputError(f"projector is not Hermitian (residual {herm:.3e})")
        idem = max_abs(m @ m - m)
        if idem > tol.validation_tol:
            raise InputError(f"projector is not idempotent (residual {idem:.3e})")
        evals = np.linalg.eigvalsh(hermitian_part(m))
        near_one = np.abs(evals - 1.0) <= tol.eigen_gap_tol
        near_zero = np.abs(evals) <= tol.eigen_gap_tol
        if not np.all(near_one | near_zero):
            raise InputError("projector has eigenvalues away from {0, 1}")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "rank", int(np.count_nonzero(near_one)))
        object.__setattr__(self, "tol", tol)

    def __setattr__(self, name, value):
        raise AttributeError("Projector is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"Projector(dim={self.dim}, rank={self.rank})"


class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator."""

    __slots__ = ("matrix", "tol")

    def __init__(self, matrix, tol: ToleranceProfile = DEFAULT_TOL):
        m = as_complex_matrix(matrix)
        herm = max_abs(m - dagger(m))
        if herm > tol.validation_tol:
            raise InputError(f"density matrix is not Hermitian (residual {herm:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > tol.validation_tol:
            raise InputError(f"density matrix trace {tr.real:.12g} differs from 1")
        lo = float(np.linalg.eigvalsh(hermitian_part(m))[0])
        if lo < -tol.validation_tol:
            raise InputError(f"density matrix has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "tol", tol)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def identity(dim: int, tol: ToleranceProfile = DEFAULT_TOL) -> Projector:
    return Projector(np.eye(dim), tol)


def zero(dim: int, tol: ToleranceProfile = DEFAULT_TOL) -> Projector:
    return Projector(np.zeros((dim, dim)), tol)


def ket(*amplitudes) -> np.ndarray:
    """Normalized column vector from the given amplitudes."""
    v = np.asarray(amplitudes, dtype=np.complex128).ravel()
    n = np.linalg.norm(v)
    if n == 0:
        raise InputError("cannot normalize the zero vector")
    return v / n


def outer(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).ravel()
    return np.outer(v, v.conj())


def orthonormal_basis(vectors, dim: int | None = None,
                      tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Columns spanning the same space as ``vectors``; dependent directions dropped.

    Singular values at or below ``tol.eigen_gap_tol`` are treated as zero.
    """
    vecs = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
    if not vecs:
        if dim is None:
            raise InputError("dimension required for an empty vector set")
        return np.zeros((dim, 0), dtype=np.complex128)
    sizes = {v.size for v in vecs}
    if len(sizes) != 1:
        raise InputError(f"vectors have mismatched dimensions {sorted(sizes)}")
    d = sizes.pop()
    if dim is not None and dim != d:
        raise InputError(f"vectors have dimension {d}, expected {dim}")
    a = np.stack(vecs, axis=1)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    return u[:, s > tol.eigen_gap_tol]


def projector_from_basis(vectors, dim: int | None = None,
                         tol: ToleranceProfile = DEFAULT_TOL) -> Projector:
    """Orthogonal projector onto ``span(vectors)``.

    An empty or all-zero vector set gives the zero projector (``dim`` is
    required when ``vectors`` is empty).

    >>> projector_from_basis([(1, 0), (1, 0)]).rank
    1
    """
    u = orthonormal_basis(vectors, dim, tol)
    return Projector(hermitian_part(u @ dagger(u)), tol)


def projector_onto_columns(u: np.ndarray, tol: ToleranceProfile = DEFAULT_TOL) -> Projector:
    """Projector ``U U†`` for a matrix with orthonormal columns."""
    u = np.asarray(u, dtype=np.complex128)
    return Projector(hermitian_part(u @ dagger(u)), tol)


def trace_inner(a, b) -> complex:
    """``tr(A B)`` for two operators of equal dimension."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape or a.ndim != 2:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    # tr(AB) = sum_ij A_ij B_ji, without forming the product
    return complex(np.einsum("ij,ji->", a, b))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_state(dim: int, purity_mix: float, seed=None,
                 tol: ToleranceProfile = DEFAULT_TOL) -> DensityMatrix:
    """Mixture ``(purity_mix/dim)·1 + (1 - purity_mix)·|ψ⟩⟨ψ|`` with a uniform random ``|ψ⟩``.

    Parameters
    ----------
    dim : int
        Hilbert-space dimension, at least 2.
    purity_mix : float
        Weight of the maximally mixed component, in ``[0, 1]``.
    seed : int, sequence or numpy Generator
        Determines ``|ψ⟩``.
    """
    if dim < 2:
        raise InputError("random_state requires dim >= 2")
    if not 0.0 <= purity_mix <= 1.0:
        raise InputError(f"purity_mix must lie in [0, 1], got {purity_mix!r}")
    psi = random_unit_vector(dim, _rng(seed))
    m = (purity_mix / dim) * np.eye(dim) + (1.0 - purity_mix) * outer(psi)
    return DensityMatrix(hermitian_part(m), tol)


def random_projector(dim: int, rank: int, rng: np.random.Generator,
                     tol: ToleranceProfile = DEFAULT_TOL) -> Projector:
    u = random_unitary(dim, rng)
    return projector_onto_columns(u[:, :rank], tol)
