import numpy as np
import pytest

from blockadechain.operators import (
    InvariantViolation,
    OperatorSum,
    PauliTerm,
    Propagator,
    StateVector,
    expm_unitary,
    phase_optimized_distance,
    phase_set_distance,
    realize,
    realize_diagonal,
    spectral_norm,
)

rng = np.random.default_rng(20260810)


def random_hermitian(dim, generator=rng):
    a = generator.standard_normal((dim, dim)) + 1j * generator.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def random_unitary(dim, generator=rng):
    a = generator.standard_normal((dim, dim)) + 1j * generator.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def expm_taylor(a, terms=20):
    """Scaling-and-squaring Taylor series, independent of the eigh path."""
    norm = np.linalg.norm(a, np.inf)
    s = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0 else 0
    m = a / 2**s
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ m / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


# ---------------------------------------------------------------------------
# realize

def test_single_site_z_diagonal():
    h = realize(OperatorSum([PauliTerm(1.0, {1: "Z"})], 1))
    # |1> (index 1) is the +1 eigenstate
    assert np.allclose(h, np.diag([-1.0, 1.0]))


def test_two_site_xy_coupling():
    op = OperatorSum([PauliTerm(1.0, {1: "X", 2: "X"}), PauliTerm(1.0, {1: "Y", 2: "Y"})], 2)
    h = realize(op)
    expected = np.zeros((4, 4))
    expected[1, 2] = expected[2, 1] = 2.0  # |01> <-> |10>
    assert np.allclose(h, expected)
    assert h[0, 0] == 0 and h[3, 3] == 0


def test_next_nearest_term_against_basis_loop():
    # brute force: apply sigma^z eigenvalues state by state
    j2 = 0.05
    h = realize(OperatorSum([PauliTerm(j2, {1: "Z", 3: "Z"})], 3))
    expected = np.zeros((8, 8))
    for idx in range(8):
        bits = [(idx >> (2 - k)) & 1 for k in range(3)]
        s = [2 * b - 1 for b in bits]
        expected[idx, idx] = j2 * s[0] * s[2]
    assert np.allclose(h, expected, atol=1e-15)


def test_realize_rejects_out_of_range_site():
    with pytest.raises(ValueError, match="beyond register"):
        OperatorSum([PauliTerm(1.0, {3: "Z"})], 2)


def test_realize_rejects_oversized_register():
    with pytest.raises(ValueError, match="dimension cap"):
        realize(OperatorSum([PauliTerm(1.0, {1: "Z"})], 15))


def test_pauli_term_validation():
    with pytest.raises(ValueError):
        PauliTerm(np.inf, {1: "Z"})
    with pytest.raises(ValueError):
        PauliTerm(1.0, {0: "Z"})
    with pytest.raises(ValueError):
        PauliTerm(1.0, {1: "Q"})


def test_realize_diagonal_matches_dense():
    terms = [PauliTerm(0.3, {1: "Z", 2: "Z"}), PauliTerm(-0.7, {2: "Z", 4: "Z"}), PauliTerm(0.1, {3: "Z"})]
    op = OperatorSum(terms, 4)
    assert op.is_diagonal
    diag = realize_diagonal(op)
    assert np.allclose(diag, np.real(np.diag(realize(op))), atol=1e-15)


def test_realize_diagonal_rejects_offdiagonal_terms():
    with pytest.raises(ValueError, match="non-Z"):
        realize_diagonal(OperatorSum([PauliTerm(1.0, {1: "X"})], 2))


# ---------------------------------------------------------------------------
# expm_unitary

def test_expm_zero_generator():
    u = expm_unitary(np.zeros((4, 4)), t=2.7)
    assert np.allclose(u.matrix, np.eye(4))


def test_expm_pi_half_sigma_x():
    sx = realize(OperatorSum([PauliTerm(1.0, {1: "X"})], 1))
    u = expm_unitary(sx, t=np.pi / 2)
    assert np.allclose(u.matrix, -1j * sx, atol=1e-14)


def test_expm_against_taylor_oracle():
    for _ in range(5):
        h = random_hermitian(8)
        t = 0.37
        u = expm_unitary(h, t).matrix
        ref = expm_taylor(-1j * t * h)
        assert np.max(np.abs(u - ref)) < 1e-10


def test_expm_sign_argument():
    h = random_hermitian(4)
    forward = expm_unitary(h, 0.5, sign=1).matrix
    backward = expm_unitary(h, 0.5, sign=-1).matrix
    assert np.allclose(forward @ backward, np.eye(4), atol=1e-12)


def test_expm_semigroup_property():
    h = random_hermitian(8)
    u1 = expm_unitary(h, 0.4).matrix
    u2 = expm_unitary(h, 0.9).matrix
    u12 = expm_unitary(h, 1.3).matrix
    assert np.max(np.abs(u1 @ u2 - u12)) < 1e-10


def test_expm_rejects_non_hermitian():
    bad = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="Hermitian"):
        expm_unitary(bad, 1.0)


def test_propagator_unitarity_certificate():
    for _ in range(3):
        u = expm_unitary(random_hermitian(16), 1.1).matrix
        assert np.max(np.abs(u.conj().T @ u - np.eye(16))) < 1e-10
    with pytest.raises(InvariantViolation, match="unitarity"):
        Propagator(np.ones((3, 3)))


# ---------------------------------------------------------------------------
# spectral norm

def test_spectral_norm_identity():
    assert spectral_norm(np.eye(7)) == pytest.approx(1.0, abs=1e-14)


def test_spectral_norm_phase_difference_of_unitary():
    alpha = 0.3
    u = random_unitary(6)
    d = spectral_norm(u - np.exp(1j * alpha) * u)
    assert d == pytest.approx(2 * abs(np.sin(alpha / 2)), abs=1e-12)


def test_spectral_norm_against_power_iteration():
    for seed in range(3):
        local = np.random.default_rng(seed)
        a = local.standard_normal((16, 16)) + 1j * local.standard_normal((16, 16))
        b = a.conj().T @ a
        best = 0.0
        for start in range(2):
            x = local.standard_normal(16) + 1j * local.standard_normal(16)
            x /= np.linalg.norm(x)
            for _ in range(20000):
                y = b @ x
                x = y / np.linalg.norm(y)
            best = max(best, np.sqrt(np.real(x.conj() @ b @ x)))
        assert spectral_norm(a) == pytest.approx(best, abs=1e-10)


def test_spectral_norm_left_unitary_invariance():
    u = random_unitary(8)
    v = random_unitary(8)
    w = random_unitary(8)
    d0 = spectral_norm(u - v)
    d1 = spectral_norm(w @ u - w @ v)
    assert d0 == pytest.approx(d1, abs=1e-11)


def test_spectral_norm_rejects_non_finite():
    a = np.eye(3, dtype=complex)
    a[0, 0] = np.nan
    with pytest.raises(ValueError, match="finite"):
        spectral_norm(a)


# ---------------------------------------------------------------------------
# phase optimization

def test_phase_distance_identical_unitaries():
    u = random_unitary(5)
    phi, d = phase_optimized_distance(u, u)
    assert d < 1e-12
    assert phi == pytest.approx(0.0, abs=1e-6) or phi == pytest.approx(2 * np.pi, abs=1e-6)


def test_phase_distance_pure_global_phase():
    beta = 1.1
    phi, d = phase_optimized_distance(np.eye(4), np.exp(1j * beta) * np.eye(4))
    assert d < 1e-12
    assert phi == pytest.approx((-beta) % (2 * np.pi), abs=1e-8)


def test_phase_distance_diagonal_vs_dense_grid():
    thetas = 0.01 * np.arange(1, 9)
    v = np.diag(np.exp(1j * thetas))
    phi, d = phase_optimized_distance(np.eye(8), v)

    def objective(grid):
        return np.max(np.abs(1 - np.exp(1j * (grid[:, None] + thetas[None, :]))), axis=1)

    grid = np.linspace(0, 2 * np.pi, 100000, endpoint=False)
    vals = objective(grid)
    k = int(np.argmin(vals))
    step = grid[1] - grid[0]
    for _ in range(3):  # zoom the exhaustive search around its bracket
        grid = np.linspace(grid[k] - step, grid[k] + step, 2001)
        vals = objective(grid)
        k = int(np.argmin(vals))
        step = grid[1] - grid[0]
    assert d == pytest.approx(vals[k], abs=1e-7)
    # analytic optimum for phases on an arc: 2 sin(spread / 4)
    assert d == pytest.approx(2 * np.sin((thetas[-1] - thetas[0]) / 4), abs=1e-9)


def test_phase_distance_never_exceeds_raw():
    for _ in range(5):
        u = random_unitary(6)
        v = random_unitary(6)
        _, d = phase_optimized_distance(u, v)
        assert d <= spectral_norm(u - v) + 1e-12


def test_phase_distance_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        phase_optimized_distance(np.eye(2), np.eye(3))


def test_phase_set_distance_matches_matrix_search():
    local = np.random.default_rng(7)
    for _ in range(10):
        thetas = local.uniform(-2.0, 2.0, size=6)
        _, d_set = phase_set_distance(thetas)
        _, d_mat = phase_optimized_distance(np.eye(6), np.diag(np.exp(1j * thetas)))
        assert d_set == pytest.approx(d_mat, abs=1e-9)


def test_phase_set_distance_single_point():
    phi, d = phase_set_distance([1.3])
    assert d == pytest.approx(0.0, abs=1e-15)
    assert phi == pytest.approx((2 * np.pi - 1.3) % (2 * np.pi), abs=1e-12)


# ---------------------------------------------------------------------------
# state vectors

def test_basis_state_indexing():
    sv = StateVector.basis_state([1, 0, 0])  # site 1 is the most significant bit
    assert sv.amplitudes[4] == 1.0
    assert np.linalg.norm(sv.amplitudes) == pytest.approx(1.0)


def test_state_norm_validation():
    with pytest.raises(ValueError, match="norm"):
        StateVector(np.array([1.0, 1.0]), 1)
    StateVector(np.array([1.0, 1.0]), 1, unnormalized=True)
