import numpy as np
import pytest

from blockadechain.deviation import idle_deviation
from blockadechain.josephson import (
    JosephsonArraySpec,
    build_capacitance_matrix,
    decay_check,
    extract_couplings,
    invert_capacitance,
)
from blockadechain.operators import OperatorSum, PauliTerm, realize


def array_spec(n, eps, c0=1.0, gate_charges=None):
    # split c0 evenly between gate and junction capacitance
    return JosephsonArraySpec(
        n_boxes=n, c_g=c0 / 2, c_j=c0 / 2, c_c=eps * c0, gate_charges=gate_charges
    )


def tridiagonal_inverse(a):
    """Closed-form inverse of a symmetric tridiagonal matrix via the
    alpha/beta continuant recursions; independent of LAPACK."""
    n = a.shape[0]
    d = np.diag(a).copy()
    e = np.diag(a, 1).copy()
    alpha = np.zeros(n + 1)
    alpha[0], alpha[1] = 1.0, d[0]
    for i in range(2, n + 1):
        alpha[i] = d[i - 1] * alpha[i - 1] - e[i - 2] ** 2 * alpha[i - 2]
    beta = np.zeros(n + 2)
    beta[n + 1], beta[n] = 1.0, d[n - 1]
    for i in range(n - 1, 0, -1):
        beta[i] = d[i - 1] * beta[i + 1] - e[i - 1] ** 2 * beta[i + 2]
    det = alpha[n]
    inv = np.zeros((n, n))
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            off = np.prod(e[i - 1 : j - 1]) if j > i else 1.0
            inv[i - 1, j - 1] = (-1) ** (i + j) * off * alpha[i - 1] * beta[j + 1] / det
            inv[j - 1, i - 1] = inv[i - 1, j - 1]
    return inv


# ---------------------------------------------------------------------------
# capacitance matrix

def test_two_box_matrix_with_edge_correction():
    spec = array_spec(2, 0.1)
    c = build_capacitance_matrix(spec)
    assert np.allclose(c, [[1.1, -0.1], [-0.1, 1.1]])


def test_decoupled_boxes_give_scaled_identity():
    spec = array_spec(4, 0.0, c0=2.0)
    assert np.allclose(build_capacitance_matrix(spec), 2.0 * np.eye(4))


def test_six_box_matrix_against_elementwise_oracle():
    spec = array_spec(6, 0.03, c0=1.5)
    c = build_capacitance_matrix(spec)
    c0, eps = 1.5, 0.03
    expected = np.zeros((6, 6))
    for i in range(6):
        for j in range(6):
            if i == j:
                expected[i, j] = c0 * (1 + eps) if i in (0, 5) else c0 * (1 + 2 * eps)
            elif abs(i - j) == 1:
                expected[i, j] = -c0 * eps
    assert np.allclose(c, expected)
    assert np.all(np.linalg.eigvalsh(c) > 0)


def test_spec_validation():
    with pytest.raises(ValueError):
        JosephsonArraySpec(1, 0.5, 0.5, 0.01)
    with pytest.raises(ValueError):
        JosephsonArraySpec(4, -0.5, 0.5, 0.01)
    with pytest.raises(ValueError):
        JosephsonArraySpec(4, 0.5, 0.5, 2.0)  # epsilon >= 1
    with pytest.warns(UserWarning, match="epsilon"):
        JosephsonArraySpec(4, 0.5, 0.5, 0.5)


# ---------------------------------------------------------------------------
# inversion

def test_diagonal_inverse_is_reciprocal():
    c = np.diag([2.0, 4.0, 5.0])
    assert np.allclose(invert_capacitance(c), np.diag([0.5, 0.25, 0.2]))


def test_two_box_adjugate_inverse():
    spec = array_spec(2, 0.1)
    inv = invert_capacitance(build_capacitance_matrix(spec))
    det = 1.1**2 - 0.1**2
    assert np.allclose(inv, np.array([[1.1, 0.1], [0.1, 1.1]]) / det, atol=1e-15)


def test_inverse_against_continuant_oracle():
    spec = array_spec(8, 0.01)
    c = build_capacitance_matrix(spec)
    inv = invert_capacitance(c)
    assert np.max(np.abs(inv - tridiagonal_inverse(c))) < 1e-12
    assert np.max(np.abs(c @ inv - np.eye(8))) < 1e-12
    assert np.max(np.abs(inv - inv.T)) == 0.0


def test_inverse_against_column_solve_oracle():
    spec = array_spec(8, 0.01)
    c = build_capacitance_matrix(spec)
    inv = invert_capacitance(c)
    columns = np.column_stack(
        [np.linalg.solve(c, np.eye(8)[:, k]) for k in range(8)]
    )
    assert np.max(np.abs(inv - columns)) < 1e-12


def test_inverse_rejects_singular():
    with pytest.raises(ValueError, match="singular"):
        invert_capacitance(np.zeros((3, 3)))


# ---------------------------------------------------------------------------
# decay of the inverse

def test_decay_ratios_in_band():
    spec = array_spec(8, 0.01)
    inv = invert_capacitance(build_capacitance_matrix(spec))
    ratios, in_band = decay_check(inv, spec.epsilon)
    assert in_band
    assert all(abs(r / 0.01 - 1) < 0.05 for r in ratios)
    assert len(ratios) >= 3


def test_decay_ratio_small_eps_limit():
    spec = array_spec(8, 1e-4)
    inv = invert_capacitance(build_capacitance_matrix(spec))
    ratios, in_band = decay_check(inv, spec.epsilon)
    assert in_band
    assert ratios[0] == pytest.approx(1e-4, rel=5e-4)


def test_decay_needs_five_boxes():
    spec = array_spec(4, 0.01)
    inv = invert_capacitance(build_capacitance_matrix(spec))
    with pytest.raises(ValueError, match="five"):
        decay_check(inv, spec.epsilon)


# ---------------------------------------------------------------------------
# coupling extraction

def test_decoupled_array_has_zero_couplings():
    spec = array_spec(4, 0.0)
    report = extract_couplings(spec, invert_capacitance(build_capacitance_matrix(spec)))
    assert all(v == 0.0 for v in report.couplings_by_order.values())
    assert np.all(report.zz_matrix == 0.0)


def test_two_box_coupling_closed_form():
    # adjugate inverse off-diagonal eps/(1+2 eps) in units of 1/C0
    spec = array_spec(2, 0.1)
    report = extract_couplings(spec, invert_capacitance(build_capacitance_matrix(spec)))
    assert report.couplings_by_order[1] == pytest.approx(0.1 / (4 * 1.2), abs=1e-15)


def test_coupling_hierarchy_and_chain_emission():
    spec = array_spec(8, 0.01)
    report = extract_couplings(spec, invert_capacitance(build_capacitance_matrix(spec)))
    j = report.couplings_by_order
    assert j[2] / j[1] == pytest.approx(0.01, rel=0.05)
    values = [abs(j[k]) for k in sorted(j)]
    assert all(a > b for a, b in zip(values, values[1:]))  # strictly decreasing
    assert all(v > 0 for v in j.values())  # sign follows the inverse entries
    assert report.residual_bound == pytest.approx(abs(j[3]), rel=1e-12)
    chain = report.effective_chain
    assert chain.n_spins == 8
    assert chain.j1 == pytest.approx(j[1])
    assert chain.j2 == pytest.approx(j[2])


def test_quadratic_form_expansion_against_spin_matrix():
    # realize sum_ij (2e)^2/2 Cinv_ij (n_i - ng_i)(n_j - ng_j) directly with
    # n = (1 + Z)/2 occupation matrices and compare with the extracted terms
    rng = np.random.default_rng(3)
    n = 4
    ng = tuple(rng.uniform(0.2, 0.8, n))
    spec = array_spec(n, 0.05, gate_charges=ng)
    cinv = invert_capacitance(build_capacitance_matrix(spec))
    report = extract_couplings(spec, cinv)

    dim = 2**n
    number_ops = []
    for site in range(1, n + 1):
        z = realize(OperatorSum([PauliTerm(1.0, {site: "Z"})], n))
        number_ops.append((np.eye(dim) + z) / 2)
    e2 = spec.c0  # reduced units
    direct = np.zeros((dim, dim), dtype=complex)
    for i in range(n):
        for j in range(n):
            a = number_ops[i] - ng[i] * np.eye(dim)
            b = number_ops[j] - ng[j] * np.eye(dim)
            direct += e2 / 2 * cinv[i, j] * (a @ b)

    terms = []
    for i in range(n):
        for j in range(i + 1, n):
            terms.append(PauliTerm(report.zz_matrix[i, j], {i + 1: "Z", j + 1: "Z"}))
    for i in range(n):
        terms.append(PauliTerm(report.linear_coeffs[i], {i + 1: "Z"}))
    reconstructed = realize(OperatorSum(terms, n)) + report.constant * np.eye(dim)
    assert np.max(np.abs(direct - reconstructed)) < 1e-12


def test_linear_fields_vanish_at_degeneracy_point():
    spec = array_spec(6, 0.02)  # default gate charges 1/2
    report = extract_couplings(spec, invert_capacitance(build_capacitance_matrix(spec)))
    assert np.max(np.abs(report.linear_coeffs)) < 1e-15


def test_si_units_mode():
    spec = JosephsonArraySpec(2, 0.5e-15, 0.5e-15, 0.1e-15)
    report = extract_couplings(
        spec, invert_capacitance(build_capacitance_matrix(spec)), units="si"
    )
    e2 = (2 * 1.602176634e-19) ** 2
    expected = e2 / 4 * 0.1 / (1.2 * 1e-15)
    assert report.couplings_by_order[1] == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError, match="units"):
        extract_couplings(spec, invert_capacitance(build_capacitance_matrix(spec)), units="cgs")


def test_pipeline_consistency_with_deviation_module():
    spec = array_spec(8, 0.01)
    report = extract_couplings(spec, invert_capacitance(build_capacitance_matrix(spec)))
    j2 = report.effective_chain.j2
    direct = idle_deviation(4, j2, 0.8)
    via_chain = idle_deviation(4, report.effective_chain.j2, 0.8)
    assert direct.lower_bound == via_chain.lower_bound
    assert direct.exact_phase_opt == via_chain.exact_phase_opt
