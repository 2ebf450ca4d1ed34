"""Product-overlap maximization: oracles, invariants, and the dual route."""

import numpy as np
import pytest

from privdistill.linalg import layout
from privdistill.overlap import (
    a_values,
    brute_force_eta,
    cross_operator,
    eta_optimize,
    optimize_pair,
)
from privdistill.private_states import PrivateStateSpec, random_spec
from privdistill.states import UnitaryOp, validate_state

SWAP = np.eye(4)[[0, 2, 1, 3]].astype(complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

BELL_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
BELL_MINUS = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)


def two_qubit_shield_spec(shield, u1):
    dm = validate_state(shield, layout([("S0", 2, 0, "shield"), ("S1", 2, 1, "shield")]))
    return PrivateStateSpec(
        d=2, parties=2, shield_dims=(2, 2),
        unitaries=(UnitaryOp(np.eye(4, dtype=complex)), UnitaryOp(u1)),
        shield=dm,
    )


def test_cross_operator_swap_shield():
    spec = two_qubit_shield_spec(np.eye(4) / 4, SWAP)
    x = cross_operator(spec, 0, 1)
    assert np.abs(x - SWAP / 4).max() < 1e-15


def test_cross_operator_argument_checks():
    spec = random_spec(2, 2, (2, 2), seed=0)
    with pytest.raises(ValueError):
        cross_operator(spec, 0, 0)
    with pytest.raises(ValueError):
        cross_operator(spec, 0, 2)
    with pytest.raises(ValueError):
        cross_operator(spec, -1, 1)


def test_eta_swap_shield_quarter():
    spec = two_qubit_shield_spec(np.eye(4) / 4, SWAP)
    res = optimize_pair(spec, 0, 1, seed=0)
    assert abs(res.eta - 0.25) < 1e-9
    assert abs(res.a1 - 0.25) < 1e-9
    assert abs(res.a2 - 0.25) < 1e-9
    assert res.converged


def test_eta_bell_shield_half():
    """Shield |Bell+><Bell+| with U_1 = sigma_z (x) I gives the cross
    operator |Bell+><Bell-|, whose best product overlap is 1/2."""
    spec = two_qubit_shield_spec(np.outer(BELL_PLUS, BELL_PLUS.conj()), np.kron(SZ, np.eye(2)))
    x = cross_operator(spec, 0, 1)
    assert np.abs(x - np.outer(BELL_PLUS, BELL_MINUS.conj())).max() < 1e-14
    res = optimize_pair(spec, 0, 1, seed=0)
    assert abs(res.eta - 0.5) < 1e-9
    assert abs(res.a1 - 0.5) < 1e-9
    assert abs(res.a2 - 0.5) < 1e-9


def test_eta_never_below_largest_entry():
    for seed in range(6):
        spec = random_spec(2, 2, (2, 3), seed=seed)
        x = cross_operator(spec, 0, 1)
        res = eta_optimize(x, spec.shield_dims, restarts=2, seed=seed)
        assert res.eta >= np.abs(x).max() - 1e-12


def test_cauchy_schwarz_bound():
    for seed in range(6):
        spec = random_spec(3, 2, (2, 2), seed=seed)
        res = optimize_pair(spec, 0, 2, restarts=8, seed=seed)
        assert res.eta <= np.sqrt(res.a1 * res.a2) + 1e-12


def test_overlap_value_matches_returned_vectors():
    spec = random_spec(2, 2, (3, 2), seed=11)
    x = cross_operator(spec, 0, 1)
    res = eta_optimize(x, spec.shield_dims, seed=1)
    f = np.kron(res.bra_vectors[0], res.bra_vectors[1])
    g = np.kron(res.ket_vectors[0], res.ket_vectors[1])
    val = np.vdot(f, x @ g)
    assert abs(abs(val) - res.eta) < 1e-12
    assert abs(np.angle(val) - res.theta) < 1e-9
    for v in res.bra_vectors + res.ket_vectors:
        assert abs(np.linalg.norm(v) - 1) < 1e-12


def test_single_factor_case_is_operator_norm():
    rng = np.random.default_rng(3)
    for seed in range(4):
        m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        res = eta_optimize(m, (5,), restarts=4, seed=seed)
        top = np.linalg.svd(m, compute_uv=False)[0]
        assert abs(res.eta - top) < 1e-9


def test_three_factor_case_against_brute_force():
    for seed in range(3):
        spec = random_spec(2, 3, (2, 2, 2), seed=seed)
        x = cross_operator(spec, 0, 1)
        res = eta_optimize(x, spec.shield_dims, seed=seed)
        brute = brute_force_eta(x, spec.shield_dims, samples=48, seed=seed + 100)
        assert abs(res.eta - brute) < 1e-6


def test_two_routes_agree_on_bipartite_operators():
    for seed in range(5):
        spec = random_spec(2, 2, (3, 3), seed=seed)
        x = cross_operator(spec, 0, 1)
        res = eta_optimize(x, spec.shield_dims, seed=seed)
        brute = brute_force_eta(x, spec.shield_dims, samples=48, seed=seed + 7)
        assert abs(res.eta - brute) < 1e-6


def test_eta_optimize_determinism():
    spec = random_spec(2, 2, (2, 3), seed=21)
    x = cross_operator(spec, 0, 1)
    a = eta_optimize(x, spec.shield_dims, seed=5)
    b = eta_optimize(x, spec.shield_dims, seed=5)
    assert a.eta == b.eta
    assert a.theta == b.theta
    for va, vb in zip(a.bra_vectors + a.ket_vectors, b.bra_vectors + b.ket_vectors):
        assert np.array_equal(va, vb)


def test_eta_optimize_shape_mismatch():
    with pytest.raises(ValueError):
        eta_optimize(np.eye(4), (2, 3))


def test_tiny_overlap_warns():
    x = np.diag([1e-10, 0.0]).astype(complex)
    with pytest.warns(UserWarning):
        res = eta_optimize(x, (2,), restarts=2, seed=0)
    assert res.eta <= 1e-8


def test_a_values_against_direct_formula():
    spec = random_spec(3, 2, (2, 2), seed=2)
    res = optimize_pair(spec, 1, 2, restarts=8, seed=3)
    rho = spec.shield.matrix
    f = np.kron(res.bra_vectors[0], res.bra_vectors[1])
    g = np.kron(res.ket_vectors[0], res.ket_vectors[1])
    u1, u2 = spec.unitaries[1].matrix, spec.unitaries[2].matrix
    assert abs(res.a1 - np.vdot(f, u1 @ rho @ u1.conj().T @ f).real) < 1e-13
    assert abs(res.a2 - np.vdot(g, u2 @ rho @ u2.conj().T @ g).real) < 1e-13
    assert 0.0 < res.a1 <= 1.0 + 1e-12
    assert 0.0 < res.a2 <= 1.0 + 1e-12


def test_brute_force_dimension_cap():
    with pytest.raises(ValueError):
        brute_force_eta(np.eye(128), (128,))


def test_brute_force_shape_mismatch():
    with pytest.raises(ValueError):
        brute_force_eta(np.eye(4), (2, 3))


def test_sweeps_are_monotone():
    """Successive sweeps from a fixed start never decrease the overlap."""
    from privdistill.overlap import _overlap, _sweep

    spec = random_spec(2, 2, (3, 3), seed=13)
    x = cross_operator(spec, 0, 1)
    rng = np.random.default_rng(0)
    bras = [v / np.linalg.norm(v) for v in
            (rng.normal(size=3) + 1j * rng.normal(size=3) for _ in range(2))]
    kets = [v / np.linalg.norm(v) for v in
            (rng.normal(size=3) + 1j * rng.normal(size=3) for _ in range(2))]
    prev = abs(_overlap(x, bras, kets))
    for _ in range(20):
        _sweep(x, (3, 3), bras, kets)
        now = abs(_overlap(x, bras, kets))
        assert now >= prev - 1e-12
        prev = now
