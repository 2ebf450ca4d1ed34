"""Dense complex linear algebra and multipartite index bookkeeping.

Everything here is a pure function of ndarrays plus a small layout type
that records how a matrix dimension factors into labelled subsystems.
Logarithms are base 2 throughout (entropies are in bits).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Tolerances shared across the package (see also states.validate_state).
HERM_TOL = 1e-12      # entrywise, relative to the largest |entry|
PSD_TOL = 1e-10       # most negative eigenvalue allowed
TRACE_TOL = 1e-10
EIG_RESIDUAL_TOL = 1e-10
CONV_TOL = 1e-12      # iterative-ascent convergence threshold


class LayoutError(ValueError):
    """A subsystem layout is inconsistent with the matrix it describes."""


@dataclass(frozen=True)
class Factor:
    """One tensor factor: a labelled local Hilbert space."""

    label: str
    dim: int
    party: int
    role: str  # "key" or "shield"


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered list of tensor factors making up a matrix dimension."""

    factors: tuple[Factor, ...]

    def __post_init__(self) -> None:
        labels = [f.label for f in self.factors]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate factor labels: {labels}")
        for f in self.factors:
            if f.dim < 1:
                raise LayoutError(f"factor {f.label!r} has dim {f.dim} < 1")
            if f.role not in ("key", "shield"):
                raise LayoutError(f"factor {f.label!r} has unknown role {f.role!r}")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.factors else 1

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f.label for f in self.factors)

    def index_of(self, label: str) -> int:
        for k, f in enumerate(self.factors):
            if f.label == label:
                return k
        raise LayoutError(f"unknown factor label {label!r}")

    def check_matches(self, mat: np.ndarray) -> None:
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise LayoutError(f"expected a square matrix, got shape {mat.shape}")
        if mat.shape[0] != self.total_dim:
            raise LayoutError(
                f"layout dims {self.dims} give total {self.total_dim}, "
                f"matrix is {mat.shape[0]}x{mat.shape[1]}"
            )

    def subset(self, labels: Iterable[str]) -> "SubsystemLayout":
        """Layout restricted to `labels`, in this layout's order."""
        wanted = set(labels)
        unknown = wanted - set(self.labels)
        if unknown:
            raise LayoutError(f"unknown factor labels {sorted(unknown)}")
        return SubsystemLayout(tuple(f for f in self.factors if f.label in wanted))


def layout(factors: Sequence[tuple[str, int, int, str]]) -> SubsystemLayout:
    """Build a SubsystemLayout from (label, dim, party, role) tuples."""
    return SubsystemLayout(tuple(Factor(*f) for f in factors))


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""

    eigenvalues: np.ndarray   # real, shape (n,), descending
    eigenvectors: np.ndarray  # complex, shape (n, n), column k pairs with eigenvalue k


def as_complex(mat: np.ndarray) -> np.ndarray:
    """View input as a complex ndarray, rejecting non-finite entries."""
    out = np.asarray(mat, dtype=complex)
    if not np.all(np.isfinite(out.view(float))):
        raise ValueError("matrix contains NaN or Inf entries")
    return out


def hermiticity_defect(mat: np.ndarray) -> float:
    """Largest |M - M^dagger| entry, scaled by the largest |entry| of M."""
    mat = np.asarray(mat)
    scale = float(np.max(np.abs(mat))) if mat.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(mat - mat.conj().T))) / scale


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of a nonempty sequence (left to right).

    Works for matrices and for vectors alike; the result keeps the
    dimensionality of the inputs.
    """
    mats = list(mats)
    if not mats:
        raise ValueError("kron_all needs at least one factor")
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def partial_trace(
    mat: np.ndarray, lay: SubsystemLayout, keep: Iterable[str]
) -> np.ndarray:
    """Trace out all factors not in `keep`; kept factors stay in layout order.

    Preserves the trace of `mat`.
    """
    mat = np.asarray(mat, dtype=complex)
    lay.check_matches(mat)
    keep_set = set(keep)
    if not keep_set:
        raise LayoutError("keep must be a nonempty set of factor labels")
    keep_idx = sorted(lay.index_of(lbl) for lbl in keep_set)

    dims = lay.dims
    n = len(dims)
    tensor = mat.reshape(dims + dims)
    # Equate bra/ket axes of every traced factor, keep the rest.
    row_axes = list(range(2 * n))
    for j in range(n):
        if j not in keep_idx:
            row_axes[n + j] = row_axes[j]
    out_axes = [row_axes[j] for j in keep_idx] + [row_axes[n + j] for j in keep_idx]
    reduced = np.einsum(tensor, row_axes, out_axes)
    d_keep = int(np.prod([dims[j] for j in keep_idx]))
    return reduced.reshape(d_keep, d_keep)


def hermitian_eig(mat: np.ndarray, herm_tol: float = HERM_TOL) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    mat = as_complex(mat)
    defect = hermiticity_defect(mat)
    if defect > herm_tol:
        raise ValueError(f"matrix is not Hermitian (scaled defect {defect:.3e})")
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
    order = np.argsort(vals)[::-1]
    return HermitianEig(eigenvalues=vals[order], eigenvectors=vecs[:, order])


def schmidt_max(
    vec: np.ndarray, dim_left: int, dim_right: int
) -> tuple[float, np.ndarray, np.ndarray]:
    """Best product approximation of a bipartite vector.

    Returns (sigma, left, right) where sigma is the largest singular value
    of the dim_left x dim_right reshaping of `vec` and the unit vectors
    satisfy <left (x) right | vec> = sigma (real, nonnegative).
    """
    vec = np.asarray(vec, dtype=complex).ravel()
    if vec.size != dim_left * dim_right:
        raise ValueError(
            f"vector length {vec.size} != dim_left*dim_right = {dim_left * dim_right}"
        )
    u, s, vh = np.linalg.svd(vec.reshape(dim_left, dim_right))
    return float(s[0]), u[:, 0].copy(), vh[0, :].copy()


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """(1/2) * trace norm of a - b, for Hermitian a, b of equal dimension."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    vals = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(0.5 * np.sum(np.abs(vals)))


def von_neumann_entropy(rho: np.ndarray, neg_tol: float = PSD_TOL) -> float:
    """Entropy -sum(lam * log2 lam) of a density matrix, in bits.

    Eigenvalues in [-neg_tol, 0) are clamped to 0; anything more negative
    is an error.
    """
    rho = as_complex(rho)
    vals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if vals.min(initial=0.0) < -neg_tol:
        raise ValueError(f"eigenvalue {vals.min():.3e} below -{neg_tol:g}")
    vals = np.clip(vals, 0.0, None)
    nz = vals[vals > 0.0]
    if not nz.size:
        return 0.0
    # an eigenvalue a hair above 1 would otherwise give a tiny negative
    return max(float(-np.sum(nz * np.log2(nz))), 0.0)


def factor_permutation(dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Flat-index permutation realizing a reordering of tensor factors.

    `order[t]` names the source factor placed at target position t. The
    returned array p satisfies: reordered[a, b] = original[p[a], p[b]].
    """
    dims = list(dims)
    n = len(dims)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {list(order)} is not a permutation of 0..{n - 1}")
    total = int(np.prod(dims)) if n else 1
    src = np.arange(total).reshape(dims) if n else np.arange(total)
    return np.transpose(src, axes=list(order)).ravel()


def permute_factors(
    mat: np.ndarray, dims: Sequence[int], order: Sequence[int]
) -> np.ndarray:
    """Reorder the tensor factors of a square matrix on prod(dims)."""
    mat = np.asarray(mat, dtype=complex)
    p = factor_permutation(dims, order)
    if mat.shape != (p.size, p.size):
        raise ValueError(f"matrix shape {mat.shape} does not match dims {list(dims)}")
    return mat[np.ix_(p, p)]
