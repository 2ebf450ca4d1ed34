"""Largest product overlap of a cross operator.

For key values i != j the cross operator X = U_i rho U_j^dagger is what a
product-state probe can see of the coherence between the two key branches.
The quantity of interest is

    eta = max |<f_1 (x) ... (x) f_N| X |g_1 (x) ... (x) g_N>|

over unit vectors f_k, g_k on the per-party shield factors. `eta_optimize`
runs multi-start alternating ascent; `brute_force_eta` is a deliberately
plain re-implementation used to cross-check it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import CONV_TOL, kron_all, schmidt_max
from .private_states import PrivateStateSpec

CROSS_NORM_FLOOR = 1e-14
ETA_FLOOR = 1e-8
DETERMINISTIC_STARTS = 4
BRUTE_FORCE_SWEEPS = 50
BRUTE_FORCE_DIM_CAP = 64


@dataclass
class OverlapResult:
    """Outcome of a product-overlap maximization.

    a1 and a2 (the branch weights of the optimal product vectors) are filled
    in by `a_values`, which needs the generating spec.
    """

    eta: float
    theta: float
    bra_vectors: list[np.ndarray]
    ket_vectors: list[np.ndarray]
    converged: bool
    sweeps: int
    a1: float | None = None
    a2: float | None = None
    start_etas: list[float] = field(default_factory=list)


def cross_operator(spec: PrivateStateSpec, i: int, j: int) -> np.ndarray:
    """X = U_i rho U_j^dagger on the shield space, for key values i != j."""
    d = spec.d
    if not (0 <= i < d and 0 <= j < d):
        raise ValueError(f"key values must lie in [0, {d}), got ({i}, {j})")
    if i == j:
        raise ValueError("cross operator needs two distinct key values")
    x = spec.unitaries[i].matrix @ spec.shield.matrix @ spec.unitaries[j].matrix.conj().T
    if np.abs(x).max() <= CROSS_NORM_FLOOR:
        raise ValueError(
            "cross operator is numerically zero; the shield state is corrupted"
        )
    return x


def _random_product(dims: tuple[int, ...], rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for dim in dims:
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        out.append(v / np.linalg.norm(v))
    return out


def _basis_product(dims: tuple[int, ...], flat: int) -> list[np.ndarray]:
    out = []
    for idx, dim in zip(np.unravel_index(flat, dims), dims):
        v = np.zeros(dim, dtype=complex)
        v[idx] = 1.0
        out.append(v)
    return out


def _contract_except(tensor: np.ndarray, vectors: list[np.ndarray], skip: int) -> np.ndarray:
    """Contract every axis but `skip` against the matching vector."""
    t = tensor
    for axis in reversed(range(len(vectors))):
        if axis != skip:
            t = np.tensordot(t, vectors[axis], axes=([axis], [0]))
    return t


def _overlap(x: np.ndarray, bras: list[np.ndarray], kets: list[np.ndarray]) -> complex:
    return complex(kron_all(bras).conj() @ x @ kron_all(kets))


def _sweep(
    x: np.ndarray,
    dims: tuple[int, ...],
    bras: list[np.ndarray],
    kets: list[np.ndarray],
) -> None:
    """One monotone ascent pass updating all bra then all ket factors in place.

    With two factors each half-pass is solved globally through the largest
    Schmidt coefficient; otherwise factors are updated one at a time.
    """
    n = len(dims)
    v = (x @ kron_all(kets)).reshape(dims)
    if n == 2:
        _, left, right = schmidt_max(v.ravel(), dims[0], dims[1])
        bras[0], bras[1] = left, right
    else:
        for k in range(n):
            t = _contract_except(v, [b.conj() for b in bras], k)
            nrm = np.linalg.norm(t)
            if nrm > 0.0:
                bras[k] = t / nrm
    w = (x.conj().T @ kron_all(bras)).reshape(dims)
    if n == 2:
        _, left, right = schmidt_max(w.ravel(), dims[0], dims[1])
        kets[0], kets[1] = left, right
    else:
        for k in range(n):
            t = _contract_except(w.conj(), kets, k)
            nrm = np.linalg.norm(t)
            if nrm > 0.0:
                kets[k] = t.conj() / nrm


def _seed_sequence(seed: int | np.random.SeedSequence) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def eta_optimize(
    x: np.ndarray,
    dims: tuple[int, ...] | list[int],
    restarts: int = 32,
    max_iters: int = 200,
    conv_tol: float = CONV_TOL,
    seed: int | np.random.SeedSequence = 0,
) -> OverlapResult:
    """Maximize the product overlap of `x` over the factors in `dims`.

    Runs alternating ascent from the largest-magnitude entries of `x` (so the
    result can never fall below the best single entry) and from `restarts`
    random product starts. The result is flagged non-converged only when
    every start exhausted `max_iters` sweeps.
    """
    dims = tuple(int(v) for v in dims)
    total = int(np.prod(dims, dtype=np.int64))
    if x.shape != (total, total):
        raise ValueError(f"operator shape {x.shape} does not match dims {dims}")

    magnitudes = np.abs(x).ravel()
    top = np.argsort(magnitudes)[::-1][:DETERMINISTIC_STARTS]
    starts: list[tuple[list[np.ndarray], list[np.ndarray]]] = []
    for flat in top:
        if magnitudes[flat] <= 0.0:
            continue
        row, col = divmod(int(flat), total)
        starts.append((_basis_product(dims, row), _basis_product(dims, col)))
    for child in _seed_sequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        starts.append((_random_product(dims, rng), _random_product(dims, rng)))

    best: tuple[float, list[np.ndarray], list[np.ndarray], bool, int] | None = None
    start_etas: list[float] = []
    any_converged = False
    for bras, kets in starts:
        eta_prev = abs(_overlap(x, bras, kets))
        converged = False
        sweeps = 0
        for sweeps in range(1, max_iters + 1):
            _sweep(x, dims, bras, kets)
            eta_now = abs(_overlap(x, bras, kets))
            if abs(eta_now - eta_prev) <= conv_tol:
                converged = True
                break
            eta_prev = eta_now
        eta_final = abs(_overlap(x, bras, kets))
        start_etas.append(eta_final)
        any_converged = any_converged or converged
        if best is None or eta_final > best[0]:
            best = (eta_final, bras, kets, converged, sweeps)

    assert best is not None
    eta, bras, kets, _, sweeps = best
    if eta < ETA_FLOOR:
        warnings.warn(
            f"product overlap {eta:.3e} is below {ETA_FLOOR:.0e}; "
            "its phase is numerically meaningless",
            stacklevel=2,
        )
    theta = float(np.angle(_overlap(x, bras, kets)))
    return OverlapResult(
        eta=float(eta),
        theta=theta,
        bra_vectors=bras,
        ket_vectors=kets,
        converged=any_converged,
        sweeps=sweeps,
        start_etas=start_etas,
    )


def a_values(
    spec: PrivateStateSpec, i: int, j: int, result: OverlapResult
) -> OverlapResult:
    """Fill in the branch weights of the maximizing product vectors.

    a1 = <f|U_i rho U_i^dagger|f> and a2 = <g|U_j rho U_j^dagger|g>; both are
    needed by the filtering stage. Returns the same result object.
    """
    rho = spec.shield.matrix
    f = kron_all(result.bra_vectors)
    g = kron_all(result.ket_vectors)
    ui = spec.unitaries[i].matrix
    uj = spec.unitaries[j].matrix
    result.a1 = float(np.real(f.conj() @ (ui @ rho @ ui.conj().T) @ f))
    result.a2 = float(np.real(g.conj() @ (uj @ rho @ uj.conj().T) @ g))
    return result


def optimize_pair(
    spec: PrivateStateSpec,
    i: int,
    j: int,
    restarts: int = 32,
    max_iters: int = 200,
    conv_tol: float = CONV_TOL,
    seed: int | np.random.SeedSequence = 0,
) -> OverlapResult:
    """Cross operator, overlap maximization, and branch weights in one call."""
    x = cross_operator(spec, i, j)
    result = eta_optimize(
        x,
        spec.shield_dims,
        restarts=restarts,
        max_iters=max_iters,
        conv_tol=conv_tol,
        seed=seed,
    )
    return a_values(spec, i, j, result)


def brute_force_eta(
    x: np.ndarray,
    dims: tuple[int, ...] | list[int],
    samples: int = 64,
    seed: int | np.random.SeedSequence = 0,
) -> float:
    """Plain multi-start estimate of the product overlap, for cross-checking.

    Every factor is updated one at a time (no Schmidt shortcut for two
    parties) and every start runs a fixed number of sweeps with no
    convergence test. Only small operators are accepted.
    """
    dims = tuple(int(v) for v in dims)
    total = int(np.prod(dims, dtype=np.int64))
    if total > BRUTE_FORCE_DIM_CAP:
        raise ValueError(
            f"brute-force path is limited to dimension {BRUTE_FORCE_DIM_CAP}, got {total}"
        )
    if x.shape != (total, total):
        raise ValueError(f"operator shape {x.shape} does not match dims {dims}")
    best = 0.0
    for child in _seed_sequence(seed).spawn(samples):
        rng = np.random.default_rng(child)
        bras = _random_product(dims, rng)
        kets = _random_product(dims, rng)
        for _ in range(BRUTE_FORCE_SWEEPS):
            v = (x @ kron_all(kets)).reshape(dims)
            for k in range(len(dims)):
                t = _contract_except(v, [b.conj() for b in bras], k)
                nrm = np.linalg.norm(t)
                if nrm > 0.0:
                    bras[k] = t / nrm
            w = (x.conj().T @ kron_all(bras)).reshape(dims)
            for k in range(len(dims)):
                t = _contract_except(w.conj(), kets, k)
                nrm = np.linalg.norm(t)
                if nrm > 0.0:
                    kets[k] = t.conj() / nrm
        best = max(best, abs(_overlap(x, bras, kets)))
    return best
