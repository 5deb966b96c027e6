import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dunklriesz.hermite import build_basis
from dunklriesz.kernels import heat_kernel
from dunklriesz.reflection import root_system, weight
from dunklriesz.spectral import (
    OperatorMatrix,
    OrderTooSmall,
    SpectralVector,
    analyze,
    delta_matrix,
    exact_adjoint_residual,
    gauss_generalized_hermite,
    heat_apply,
    inv_sqrt_apply,
    operator_norm,
    quadrature_rule,
    riesz_matrix,
    synthesize,
)


def test_gauss_kappa0_matches_classical_tables():
    nodes, wts = gauss_generalized_hermite(0.0, 12)
    on, ow = np.polynomial.hermite.hermgauss(12)
    order = np.argsort(nodes)
    assert np.allclose(nodes[order], np.sort(on), atol=1e-12)
    assert np.allclose(wts[order], ow[np.argsort(on)], atol=1e-13)


@pytest.mark.parametrize("kappa", [0.0, 0.5, 1.0, 2.7])
def test_gauss_moments(kappa):
    nodes, wts = gauss_generalized_hermite(kappa, 24)
    assert wts.sum() == pytest.approx(math.gamma(kappa + 0.5), rel=1e-13)
    assert (wts * nodes**2).sum() == pytest.approx(math.gamma(kappa + 1.5), rel=1e-13)
    assert (wts * nodes**4).sum() == pytest.approx(math.gamma(kappa + 2.5), rel=1e-12)


def test_gauss_recurrence_vs_exact_moment_construction():
    """Derive the first recurrence coefficients from exact Hankel moments
    (Fraction arithmetic on Gamma ratios) and compare with the closed form."""
    kappa = Fraction(1, 3)
    # moments m_{2k} = Gamma(k + kappa + 1/2) / Gamma(kappa + 1/2) (normalized)
    moms = [Fraction(1)]
    for k in range(1, 8):
        moms.append(moms[-1] * (k - 1 + kappa + Fraction(1, 2)))
    # orthogonalize 1, x, x^2, ... by hand: b_n^2 = h_n / h_{n-1}
    # with h_n the squared norms from the moment matrix (even weight)
    import numpy.linalg as la

    n = 4
    H = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(n + 1):
            H[i, j] = float(moms[(i + j) // 2]) if (i + j) % 2 == 0 else 0.0
    L = la.cholesky(H)
    hs = np.diag(L) ** 2
    b_sq = hs[1:] / hs[:-1]
    closed = [(k + 2 * float(kappa) * (k % 2)) / 2.0 for k in range(1, n + 1)]
    assert np.allclose(b_sq, closed, rtol=1e-10)


def test_gauss_order_guard():
    with pytest.raises(OrderTooSmall):
        gauss_generalized_hermite(0.5, 0)


def test_rule_reproduces_c_kappa(z2_half, z2_half_basis8):
    rule = quadrature_rule(z2_half, 48)
    est = rule.integrate(np.exp(np.sum(rule.nodes**2, axis=-1) / 2.0))
    assert est == pytest.approx(z2_half_basis8.c_kappa, rel=1e-8)


def test_rule_general_group_weight_folded(a2_one):
    # integrates w_kappa e^{-|x|^2} (polynomial weight at kappa = 1): the
    # total mass matches the exact moment expansion of c at variance 1/2
    rule = quadrature_rule(a2_one, 40)
    got = rule.integrate(np.ones(rule.size))
    # int w e^{-|x|^2} dx = 2^{-gamma - d/2} * int w e^{-|x|^2/2} scaled:
    # w homogeneous of degree 2 gamma = 6 => substitute x -> x/sqrt(2)
    from dunklriesz.hermite import c_kappa

    want = c_kappa(a2_one) * 2.0 ** -(3 + 1) * 2.0**0  # (1/sqrt2)^(2g+d) = 2^-(g+d/2)
    assert got == pytest.approx(want, rel=1e-10)


def test_analyze_orthonormality(z2_half_basis8):
    rule = quadrature_rule(z2_half_basis8.rs, 2 * z2_half_basis8.N + 8)
    for m in [(0,), (3,), (8,)]:
        v = analyze(z2_half_basis8, rule, lambda X, m=m: z2_half_basis8.hermite_function(m, X))
        expected = np.zeros(z2_half_basis8.size)
        expected[z2_half_basis8.position(m)] = 1.0
        assert np.allclose(v.values, expected, atol=1e-9)


def test_analyze_zero_and_linearity(z2_half_basis8):
    b = z2_half_basis8
    rule = quadrature_rule(b.rs, 2 * b.N + 8)
    z = analyze(b, rule, lambda X: np.zeros(X.shape[0]))
    assert np.allclose(z.values, 0.0)
    f = lambda X: b.hermite_function((0,), X) + 2.0 * b.hermite_function((2,), X)
    v = analyze(b, rule, f)
    expected = np.zeros(b.size)
    expected[0], expected[b.position((2,))] = 1.0, 2.0
    assert np.allclose(v.values, expected, atol=1e-9)


def test_synthesize_unit_vector(z2_half_basis8):
    b = z2_half_basis8
    v = SpectralVector(b, np.eye(b.size)[4])
    xs = np.linspace(-2, 2, 7)[:, None]
    assert np.allclose(synthesize(b, v, xs), b.hermite_function(b.indices[4], xs))


def test_round_trip(z2_half_basis8):
    b = z2_half_basis8
    rule = quadrature_rule(b.rs, 2 * b.N + 8)
    rng = np.random.default_rng(0)
    v = SpectralVector(b, rng.normal(size=b.size))
    w = analyze(b, rule, lambda X: synthesize(b, v, X))
    assert np.allclose(w.values, v.values, atol=1e-8)


def test_l2_orthonormality_2d(z2sq_ones):
    b = build_basis(z2sq_ones, 4)
    rule = quadrature_rule(b.rs, 2 * b.N + 8)
    hm = b.hermite_function_matrix(rule.nodes)
    boost = np.exp(np.sum(rule.nodes**2, axis=-1) / 2.0)
    G = (hm * boost) @ ((hm * boost) * rule.weights).T
    assert np.max(np.abs(G - np.eye(b.size))) < 1e-8


def test_heat_apply_semigroup(z2_half_basis8):
    b = z2_half_basis8
    rng = np.random.default_rng(1)
    v = SpectralVector(b, rng.normal(size=b.size))
    a = heat_apply(b, 0.7, heat_apply(b, 0.3, v))
    c = heat_apply(b, 1.0, v)
    assert np.allclose(a.values, c.values, rtol=1e-14)
    assert np.allclose(heat_apply(b, 0.0, v).values, v.values)


def test_heat_apply_ground_state(z2_half_basis8):
    v = SpectralVector(z2_half_basis8, np.eye(z2_half_basis8.size)[0])
    out = heat_apply(z2_half_basis8, 1.0, v)
    assert out.values[0] == pytest.approx(math.exp(-2.0), rel=1e-14)  # 2 gamma + d = 2


@given(st.floats(0.05, 2.0), st.floats(0.05, 2.0))
@settings(max_examples=25, deadline=None)
def test_heat_apply_semigroup_property(s, t):
    rs = root_system("z2", multiplicity=Fraction(1, 2))
    b = build_basis(rs, 6)
    v = SpectralVector(b, np.arange(1.0, b.size + 1.0))
    a = heat_apply(b, s, heat_apply(b, t, v)).values
    c = heat_apply(b, s + t, v).values
    assert np.allclose(a, c, rtol=1e-12)


def test_inv_sqrt_examples(z2_half_basis8, z2_zero_basis8):
    v = SpectralVector(z2_half_basis8, np.eye(z2_half_basis8.size)[0])
    assert inv_sqrt_apply(z2_half_basis8, v).values[0] == pytest.approx(2.0**-0.5)
    for n in range(5):
        v0 = SpectralVector(z2_zero_basis8, np.eye(z2_zero_basis8.size)[n])
        assert inv_sqrt_apply(z2_zero_basis8, v0).values[n] == pytest.approx(
            (2 * n + 1) ** -0.5
        )
    lam = z2_half_basis8.eigenvalues()
    w = inv_sqrt_apply(z2_half_basis8, inv_sqrt_apply(z2_half_basis8, v))
    assert np.allclose(lam * w.values, v.values)


def test_delta_entries_classical(z2_zero_basis8):
    D = delta_matrix(z2_zero_basis8, 1, "lower")
    for n in range(1, 9):
        assert D.values[n - 1, n] == pytest.approx(math.sqrt(2 * n), abs=1e-12)
    assert np.count_nonzero(np.abs(D.values) > 1e-12) == 8  # strictly sub-diagonal


def test_delta_on_ground_state(z2_half_basis8):
    D = delta_matrix(z2_half_basis8, 1, "lower")
    assert np.allclose(D.values[:, 0], 0.0)
    assert D.values[0, 1] == pytest.approx(2.0, abs=1e-13)  # sqrt(2(1+2k)) at k=1/2


def test_delta_raise_leaks_top_shell(z2_half_basis8):
    Dr = delta_matrix(z2_half_basis8, 1, "raise")
    assert Dr.leaky_top_shell


def test_adjointness(z2_half_basis8):
    D = delta_matrix(z2_half_basis8, 1, "lower")
    Dr = delta_matrix(z2_half_basis8, 1, "raise")
    rows = [i for i, n in enumerate(z2_half_basis8.indices) if sum(n) <= z2_half_basis8.N - 1]
    assert np.max(np.abs(D.values - Dr.values.T)[rows, :]) < 1e-13
    assert exact_adjoint_residual(z2_half_basis8, 1) > 0


def test_oscillator_reconstruction(z2_half_basis8):
    b = z2_half_basis8
    D = delta_matrix(b, 1, "lower").values
    Dr = delta_matrix(b, 1, "raise").values
    L = 0.5 * (D @ Dr + Dr @ D)
    lam = b.eigenvalues()
    safe = [i for i, n in enumerate(b.indices) if sum(n) <= b.N - 1]
    resid = np.max(np.abs((L - np.diag(lam))[np.ix_(safe, safe)]))
    assert resid < 1e-12


def test_riesz_action_examples(z2_half_basis8, z2_zero_basis8):
    R = riesz_matrix(z2_half_basis8, 1)
    assert np.allclose(R.values[:, 0], 0.0)       # R h_0 = 0
    assert R.values[0, 1] == pytest.approx(1.0, abs=1e-12)  # R h_1 = h_0 at k=1/2
    R0 = riesz_matrix(z2_zero_basis8, 1)
    for n in range(1, 9):
        assert R0.values[n - 1, n] == pytest.approx(
            math.sqrt(2 * n / (2 * n + 1)), abs=1e-12
        )


def test_operator_norm_edge_cases(z2_half_basis8):
    Z = OperatorMatrix(z2_half_basis8, np.zeros((4, 4)))
    assert operator_norm(Z) == 0.0
    I = OperatorMatrix(z2_half_basis8, np.eye(5))
    assert operator_norm(I) == pytest.approx(1.0, abs=1e-9)


def test_operator_norm_vs_svd(z2_half_basis8):
    rng = np.random.default_rng(4)
    A = rng.normal(size=(12, 12))
    assert operator_norm(OperatorMatrix(z2_half_basis8, A)) == pytest.approx(
        np.linalg.svd(A, compute_uv=False)[0], rel=1e-8
    )


@pytest.mark.parametrize("mult", [0, Fraction(1, 2), 1, 2])
def test_riesz_norm_bound_d1(mult):
    b = build_basis(root_system("z2", multiplicity=mult), 10)
    assert operator_norm(riesz_matrix(b, 1)) <= math.sqrt(2) + 1e-8


def test_riesz_norm_bound_2d(z2sq_ones, a2_one):
    for rs, N in ((z2sq_ones, 6), (a2_one, 5)):
        b = build_basis(rs, N)
        for j in (1, 2):
            assert operator_norm(riesz_matrix(b, j)) <= math.sqrt(2) + 1e-8


def test_pair_norm_inequality(z2_half_basis8):
    b = z2_half_basis8
    R = riesz_matrix(b, 1).restrict_columns(b.N - 1)
    Rs = riesz_matrix(b, 1, adjoint=True).restrict_columns(b.N - 1)
    rng = np.random.default_rng(9)
    for _ in range(50):
        v = rng.normal(size=R.shape[1])
        v /= np.linalg.norm(v)
        assert np.linalg.norm(R @ v) ** 2 + np.linalg.norm(Rs @ v) ** 2 <= 2 + 1e-8


def test_heat_matrix_matches_kernel_integration(z2_half_basis8):
    """e^{-tL} through coefficients vs pointwise integration against k_t."""
    b = z2_half_basis8
    rule = quadrature_rule(b.rs, 40)
    t = 0.6
    v = SpectralVector(b, np.eye(b.size)[2] + 0.5 * np.eye(b.size)[5])
    f = lambda X: synthesize(b, v, X)
    lhs = synthesize(b, heat_apply(b, t, v), np.array([[0.4], [1.1]]))
    for i, x in enumerate([0.4, 1.1]):
        kt = heat_kernel(b, t, np.array([x]), rule.nodes[0])  # warm the cache
        kvals = np.array([heat_kernel(b, t, np.array([x]), yq) for yq in rule.nodes])
        boost = np.exp(np.sum(rule.nodes**2, axis=-1))
        rhs = float(np.sum(rule.weights * kvals * f(rule.nodes) * boost))
        assert lhs[i] == pytest.approx(rhs, rel=1e-4)


def test_matrix_csv_export(z2_half_basis8, tmp_path):
    D = delta_matrix(z2_half_basis8, 1, "lower")
    path = tmp_path / "delta.csv"
    D.to_csv(str(path), tol=1e-14)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "row,col,value"
    assert len(rows) == 1 + np.count_nonzero(np.abs(D.values) > 1e-14)


def test_spectral_vector_json(z2_half_basis8):
    v = SpectralVector(z2_half_basis8, np.arange(float(z2_half_basis8.size)))
    d = v.as_dict()
    w = SpectralVector.from_dict(z2_half_basis8, d)
    assert np.allclose(v.values, w.values)
