import numpy as np
import pytest

from privdistill.linalg import (
    Factor,
    LayoutError,
    SubsystemLayout,
    factor_permutation,
    hermitian_eig,
    hermiticity_defect,
    kron,
    kron_all,
    layout,
    partial_trace,
    permute_factors,
    schmidt_max,
    trace_distance,
    von_neumann_entropy,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

# Hand-computed: kron(sigma_x, sigma_z) has exactly four nonzero entries.
KRON_XZ_ENTRIES = {(0, 2): 1.0, (1, 3): -1.0, (2, 0): 1.0, (3, 1): -1.0}

# 0.5 * (|0.9 - 0.5| + |0.1 - 0.5|)
TRACE_DIST_ORACLE = 0.4


def random_hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


def random_state_vector(dim, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def test_kron_oracle():
    k = kron(SX, SZ)
    assert k.shape == (4, 4)
    for (r, c), val in KRON_XZ_ENTRIES.items():
        assert k[r, c] == val
    nonzero = {(r, c) for r in range(4) for c in range(4) if k[r, c] != 0}
    assert nonzero == set(KRON_XZ_ENTRIES)


def test_kron_all_matches_repeated_kron():
    rng = np.random.default_rng(1)
    mats = [rng.normal(size=(d, d)) + 0j for d in (2, 3, 2)]
    expected = np.kron(np.kron(mats[0], mats[1]), mats[2])
    assert np.array_equal(kron_all(mats), expected)
    assert np.array_equal(kron_all([mats[1]]), mats[1])


def test_kron_all_keeps_vectors_flat():
    v = kron_all([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
    assert v.shape == (4,)
    assert v[1] == 1.0


def test_kron_all_empty_rejected():
    with pytest.raises(ValueError):
        kron_all([])


def test_layout_validation():
    lay = layout([("K0", 2, 0, "key"), ("S0", 3, 0, "shield")])
    assert lay.total_dim == 6
    assert lay.dims == (2, 3)
    assert lay.index_of("S0") == 1
    with pytest.raises(LayoutError):
        layout([("A", 2, 0, "key"), ("A", 2, 1, "key")])
    with pytest.raises(LayoutError):
        layout([("A", 0, 0, "key")])
    with pytest.raises(LayoutError):
        layout([("A", 2, 0, "banana")])
    with pytest.raises(LayoutError):
        lay.index_of("missing")
    with pytest.raises(LayoutError):
        lay.check_matches(np.eye(5))


def test_partial_trace_of_product_state():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        a = random_hermitian(2, seed)
        a = a @ a.conj().T
        a /= np.trace(a)
        b = random_hermitian(3, seed + 100)
        b = b @ b.conj().T
        b /= np.trace(b)
        lay = layout([("A", 2, 0, "shield"), ("B", 3, 1, "shield")])
        full = np.kron(a, b)
        assert np.abs(partial_trace(full, lay, ["A"]) - a).max() < 1e-12
        assert np.abs(partial_trace(full, lay, ["B"]) - b).max() < 1e-12
        # keeping everything is the identity operation
        assert np.abs(partial_trace(full, lay, ["A", "B"]) - full).max() == 0.0


def test_partial_trace_bell_state():
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / np.sqrt(2)
    lay = layout([("A", 2, 0, "key"), ("B", 2, 1, "key")])
    reduced = partial_trace(np.outer(bell, bell.conj()), lay, ["A"])
    assert np.abs(reduced - np.eye(2) / 2).max() < 1e-15


def test_partial_trace_preserves_trace():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    lay = layout([("A", 2, 0, "key"), ("B", 3, 0, "shield"), ("C", 2, 1, "key")])
    reduced = partial_trace(m, lay, ["B"])
    assert abs(np.trace(reduced) - np.trace(m)) < 1e-12


def test_partial_trace_empty_keep_rejected():
    lay = layout([("A", 2, 0, "key")])
    with pytest.raises(LayoutError):
        partial_trace(np.eye(2), lay, [])


def test_hermitian_eig_descending_and_residual():
    for seed in range(8):
        m = random_hermitian(6, seed)
        eig = hermitian_eig(m)
        vals, vecs = eig.eigenvalues, eig.eigenvectors
        assert np.all(np.diff(vals) <= 1e-12)
        for k in range(6):
            residual = np.linalg.norm(m @ vecs[:, k] - vals[k] * vecs[:, k])
            assert residual < 1e-10
        assert np.abs(vecs.conj().T @ vecs - np.eye(6)).max() < 1e-10


def test_hermitian_eig_rejects_non_hermitian():
    m = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        hermitian_eig(m)


def test_hermiticity_defect_scale_invariant():
    m = np.array([[0.0, 1e-14], [0.0, 0.0]]) + np.eye(2)
    small = hermiticity_defect(m)
    assert small == hermiticity_defect(1e6 * m)


def test_schmidt_max_product_vector():
    for seed in range(5):
        left = random_state_vector(3, seed)
        right = random_state_vector(4, seed + 50)
        sigma, f, g = schmidt_max(np.kron(left, right), 3, 4)
        assert abs(sigma - 1.0) < 1e-12
        overlap = np.vdot(np.kron(f, g), np.kron(left, right))
        assert abs(abs(overlap) - 1.0) < 1e-12


def test_schmidt_max_overlap_convention():
    """<left (x) right | v> equals the top singular value, real and >= 0."""
    for seed in range(5):
        v = random_state_vector(12, seed)
        sigma, left, right = schmidt_max(v, 3, 4)
        overlap = np.vdot(np.kron(left, right), v)
        assert abs(overlap - sigma) < 1e-12
        assert sigma <= 1.0 + 1e-12
        svals = np.linalg.svd(v.reshape(3, 4), compute_uv=False)
        assert abs(sigma - svals[0]) < 1e-12


def test_schmidt_max_dimension_mismatch():
    with pytest.raises(ValueError):
        schmidt_max(np.zeros(5), 2, 3)


def test_trace_distance_oracle():
    assert abs(trace_distance(np.eye(2) / 2, np.diag([0.9, 0.1])) - TRACE_DIST_ORACLE) < 1e-15
    a = random_hermitian(4, 3)
    assert trace_distance(a, a) == 0.0
    b = random_hermitian(4, 4)
    assert abs(trace_distance(a, b) - trace_distance(b, a)) < 1e-12


def test_trace_distance_shape_mismatch():
    with pytest.raises(ValueError):
        trace_distance(np.eye(2), np.eye(3))


def test_entropy_uniform_and_pure():
    for d in (2, 3, 4, 5):
        assert abs(von_neumann_entropy(np.eye(d) / d) - np.log2(d)) < 1e-12
    pure = np.zeros((3, 3), dtype=complex)
    pure[0, 0] = 1.0
    assert von_neumann_entropy(pure) == 0.0


def test_entropy_clamps_tiny_negatives():
    rho = np.diag([1.0 + 5e-11, -5e-11])
    assert von_neumann_entropy(rho) >= 0.0
    with pytest.raises(ValueError):
        von_neumann_entropy(np.diag([1.1, -0.1]))


def test_factor_permutation_swaps_kron_order():
    rng = np.random.default_rng(11)
    for da, db in [(2, 3), (3, 4), (2, 2)]:
        a = rng.normal(size=(da, da)) + 1j * rng.normal(size=(da, da))
        b = rng.normal(size=(db, db)) + 1j * rng.normal(size=(db, db))
        swapped = permute_factors(np.kron(a, b), [da, db], [1, 0])
        assert np.abs(swapped - np.kron(b, a)).max() < 1e-12


def test_factor_permutation_identity_and_errors():
    assert np.array_equal(factor_permutation([2, 3], [0, 1]), np.arange(6))
    with pytest.raises(ValueError):
        factor_permutation([2, 3], [0, 0])
    with pytest.raises(ValueError):
        permute_factors(np.eye(5), [2, 3], [1, 0])


def test_factor_permutation_three_factors():
    """Cycling three factors of a triple Kronecker product."""
    rng = np.random.default_rng(2)
    mats = [rng.normal(size=(d, d)) + 0j for d in (2, 3, 2)]
    full = kron_all(mats)
    cycled = permute_factors(full, [2, 3, 2], [2, 0, 1])
    expected = kron_all([mats[2], mats[0], mats[1]])
    assert np.abs(cycled - expected).max() < 1e-12


def test_subsystem_layout_subset():
    lay = layout([("K0", 2, 0, "key"), ("K1", 2, 1, "key"), ("S0", 3, 0, "shield")])
    sub = lay.subset(["K0", "S0"])
    assert sub.labels == ("K0", "S0")
    assert sub.total_dim == 6
    assert isinstance(sub, SubsystemLayout)
    assert sub.factors[0] == Factor("K0", 2, 0, "key")
