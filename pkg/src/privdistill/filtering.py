"""Local filtering of a private state onto a two-level key pair.

Given maximizing product vectors for the cross operator of key values
(i, j), each party applies a two-outcome filter that keeps only its key
values i and j and projects its shield onto the corresponding product
factor. Party 0 carries the balancing weight so that, on success, the two
surviving branches have equal weight:

    V = |0><i| (x) <f_0|  +  sqrt(a1/a2) e^{i theta} |1><j| (x) <g_0|

when a2 >= a1, and the reverse scaling (W, the same operator rescaled by
sqrt(a2/a1) e^{-i theta}) when a1 > a2. Every other party applies the
unscaled P_k = |0><i| (x) <f_k| + |1><j| (x) <g_k|. The surviving state
lives on N two-level keys and is a mixture of the two generalized Bell
states (|0...0> +/- |1...1>)/sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import kron_all, layout, permute_factors
from .overlap import OverlapResult
from .private_states import PrivateState
from .states import DensityMatrix, bell_vector, validate_state

SUCCESS_FLOOR = 1e-14


class FilterError(ValueError):
    """The filter bank annihilated the state (success probability ~ 0)."""


@dataclass(frozen=True)
class FilterSet:
    """One rectangular filter per party, mapping key_k (x) shield_k to C^2."""

    party_ops: tuple[np.ndarray, ...]
    variant: str  # "V" (weight on the ket branch) or "W" (on the bra branch)
    i: int
    j: int


@dataclass(frozen=True)
class FilterOutcome:
    state: DensityMatrix  # on N two-level key factors
    success: float
    p: float  # weight of the + Bell state in the surviving mixture
    residual: float  # entrywise distance from the two-Bell-state form


@dataclass(frozen=True)
class PredictedOutcome:
    success: float
    p: float


def _two_row_filter(
    d: int, i: int, j: int, bra: np.ndarray, ket: np.ndarray,
    bra_weight: complex, ket_weight: complex,
) -> np.ndarray:
    s = bra.shape[0]
    op = np.zeros((2, d * s), dtype=complex)
    op[0, i * s : (i + 1) * s] = bra_weight * bra.conj()
    op[1, j * s : (j + 1) * s] = ket_weight * ket.conj()
    return op


def build_filters(
    spec, i: int, j: int, result: OverlapResult, variant: str | None = None
) -> FilterSet:
    """Filter bank for key pair (i, j) from a completed overlap result.

    The variant is chosen from the branch weights (V when a2 >= a1) unless
    forced explicitly.
    """
    if result.a1 is None or result.a2 is None:
        raise ValueError("overlap result has no branch weights; run a_values first")
    if len(result.bra_vectors) != spec.parties:
        raise ValueError(
            f"overlap result has {len(result.bra_vectors)} product factors, "
            f"spec has {spec.parties} parties"
        )
    a1, a2, theta = result.a1, result.a2, result.theta
    if min(a1, a2) <= 0.0:
        raise FilterError(
            f"branch weights a1={a1:.3e}, a2={a2:.3e} must be positive to filter"
        )
    if variant is None:
        variant = "V" if a2 >= a1 else "W"
    if variant not in ("V", "W"):
        raise ValueError(f"variant must be 'V' or 'W', got {variant!r}")
    if variant == "V":
        bra_weight: complex = 1.0
        ket_weight = np.sqrt(a1 / a2) * np.exp(1j * theta)
    else:
        bra_weight = np.sqrt(a2 / a1) * np.exp(-1j * theta)
        ket_weight = 1.0

    ops = []
    for k in range(spec.parties):
        bw, kw = (bra_weight, ket_weight) if k == 0 else (1.0, 1.0)
        ops.append(
            _two_row_filter(
                spec.d, i, j, result.bra_vectors[k], result.ket_vectors[k], bw, kw
            )
        )
    return FilterSet(party_ops=tuple(ops), variant=variant, i=i, j=j)


def apply_filter(state: PrivateState, filters: FilterSet) -> FilterOutcome:
    """Apply one filter per party; return the surviving state and statistics.

    The state's factors are regrouped per party before the product filter
    acts. `residual` is the largest entrywise deviation of the surviving
    state from p P_+ + (1-p) P_-, the mixture of the two Bell projectors it
    should equal exactly.
    """
    spec = state.spec
    n = spec.parties
    dims = [spec.d] * n + list(spec.shield_dims)
    interleave = [x for k in range(n) for x in (k, n + k)]
    regrouped = permute_factors(state.rho.matrix, dims, interleave)

    full = kron_all(list(filters.party_ops))
    out = full @ regrouped @ full.conj().T
    success = float(np.real(np.trace(out)))
    if success <= SUCCESS_FLOOR:
        raise FilterError(f"filter success probability {success:.3e} is ~ 0")

    post = out / success
    post = (post + post.conj().T) / 2
    out_layout = layout([(f"K{k}", 2, k, "key") for k in range(n)])
    dm = validate_state(post, out_layout)

    plus = bell_vector(+1, 0, 1, 2, n)
    minus = bell_vector(-1, 0, 1, 2, n)
    p = float(np.real(plus.conj() @ post @ plus))
    target = p * np.outer(plus, plus.conj()) + (1 - p) * np.outer(minus, minus.conj())
    residual = float(np.abs(post - target).max())
    return FilterOutcome(state=dm, success=success, p=p, residual=residual)


def predict_outcome(result: OverlapResult, d: int = 2) -> PredictedOutcome:
    """Closed-form success probability and Bell-state weight of the filter.

    Exactly two of the d equally weighted key branches survive, each with
    weight min(a1, a2)/d, so the success probability is (2/d) min(a1, a2).
    The + Bell state carries p = 1/2 + eta / (2 sqrt(a1 a2)).
    """
    if result.a1 is None or result.a2 is None:
        raise ValueError("overlap result has no branch weights; run a_values first")
    a1, a2 = result.a1, result.a2
    if min(a1, a2) <= 0.0:
        raise FilterError(
            f"branch weights a1={a1:.3e}, a2={a2:.3e} must be positive to filter"
        )
    success = (2.0 / d) * min(a1, a2)
    p = float(0.5 + result.eta / (2.0 * np.sqrt(a1 * a2)))
    if p > 1.0 + 1e-9:
        raise ValueError(
            f"p={p} exceeds 1; eta is inconsistent with the branch weights"
        )
    return PredictedOutcome(success=float(success), p=min(p, 1.0))
