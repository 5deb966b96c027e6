"""Quadrature for the weighted measure, Hermite coefficient analysis and
synthesis, and matrix realizations of the ladder, inverse-square-root, and
Riesz operators on the truncated basis.

Operator matrices are built from the exact conjugation identities

    delta_j (e^{-|x|^2/2} H) = e^{-|x|^2/2} T_j H,
    delta_j^*(e^{-|x|^2/2} H) = e^{-|x|^2/2} (2 x_j H - T_j H),

followed by re-expansion in the H basis through the pairing.  delta_j maps
the degree-|n| shell to |n|-1 exactly; the raising variant loses the top
shell to truncation, which is flagged, not fatal.  When the basis is exact
the matrix entries are single roundings of exact field elements, and
delta/delta* transpose-adjointness holds exactly before rounding.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .hermite import HermiteBasis
from .polyalg import get_algebra
from .reflection import RootSystem, weight


class OrderTooSmall(ValueError):
    pass


class MomentMatrixSingular(ArithmeticError):
    """Moment determinant vanished; impossible for kappa >= 0."""


@dataclass
class QuadratureRule:
    """Nodes/weights targeting integrands against w_kappa(x) e^{-|x|^2} dx."""

    nodes: np.ndarray      # (Q, d)
    weights: np.ndarray    # (Q,)
    description: str

    @property
    def size(self) -> int:
        return self.weights.size

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def gauss_generalized_hermite(kappa: float, order: int):
    """Gauss rule for the weight |u|^(2 kappa) e^{-u^2} on the line.

    Golub-Welsch on the Jacobi matrix; the recurrence coefficients for this
    weight are b_n^2 = (n + 2 kappa [n odd]) / 2, the matrix its (finite,
    positive) moments m_{2k} = Gamma(k + kappa + 1/2) determine.  Exact for
    polynomials up to degree 2*order - 1.
    """
    if order < 1:
        raise OrderTooSmall("quadrature order must be >= 1")
    if kappa < 0:
        raise MomentMatrixSingular("negative kappa outside the admissible range")
    n = np.arange(1, order)
    b = np.sqrt((n + 2.0 * kappa * (n % 2)) / 2.0)
    nodes, vecs = eigh_tridiagonal(np.zeros(order), b)
    m0 = math.gamma(kappa + 0.5)
    weights = m0 * vecs[0, :] ** 2
    return nodes, weights


def quadrature_rule(rs: RootSystem, order: int) -> QuadratureRule:
    """Tensor rule for integrands against w_kappa(x) e^{-|x|^2} dx.

    Z2^d: per-axis generalized Gauss rules (weights absorb the 2^kappa_j
    factors the sqrt(2)-normalized roots put into w_kappa); exact for
    polynomial integrands of degree <= 2*order - 1 per axis.  Other groups:
    tensor Gauss-Hermite with w_kappa multiplied into the weights (accuracy
    then depends on the smoothness of w_kappa).
    """
    axis_k = rs.axis_kappas()
    if axis_k is not None:
        axes = [gauss_generalized_hermite(axis_k[j], order) for j in range(rs.dim)]
        scale = float(np.prod(2.0**axis_k))
        desc = f"tensor generalized Gauss-Hermite, order {order}"
    else:
        axes = [gauss_generalized_hermite(0.0, order) for _ in range(rs.dim)]
        scale = 1.0
        desc = f"tensor Gauss-Hermite x explicit weight, order {order}"
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    w = axes[0][1]
    for j in range(1, rs.dim):
        w = np.outer(w, axes[j][1]).ravel()
    w = w * scale
    if axis_k is None:
        w = w * weight(rs, nodes)
    return QuadratureRule(nodes=nodes, weights=np.asarray(w, dtype=float), description=desc)


@dataclass
class SpectralVector:
    """Coefficients <f, h_n> over the truncated basis."""

    basis: HermiteBasis
    values: np.ndarray

    def coeff(self, n) -> float:
        return float(self.values[self.basis.position(n)])

    def as_dict(self) -> dict:
        return {
            ",".join(map(str, n)): float(v)
            for n, v in zip(self.basis.indices, self.values)
        }

    @staticmethod
    def from_dict(basis: HermiteBasis, d: dict) -> "SpectralVector":
        vals = np.zeros(basis.size)
        for key, v in d.items():
            vals[basis.position(tuple(int(s) for s in key.split(",")))] = v
        return SpectralVector(basis, vals)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


@dataclass
class OperatorMatrix:
    """Dense operator on the truncated Hermite-coefficient space."""

    basis: HermiteBasis
    values: np.ndarray
    label: str = ""
    leaky_top_shell: bool = False

    def apply(self, v: SpectralVector) -> SpectralVector:
        return SpectralVector(self.basis, self.values @ v.values)

    def restrict_columns(self, max_order: int) -> np.ndarray:
        cols = [i for i, n in enumerate(self.basis.indices) if sum(n) <= max_order]
        return self.values[:, cols]

    def to_csv(self, path: str, tol: float = 0.0):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["row", "col", "value"])
            for i in range(self.values.shape[0]):
                for j in range(self.values.shape[1]):
                    if abs(self.values[i, j]) > tol:
                        wr.writerow([i, j, repr(self.values[i, j])])


def analyze(basis: HermiteBasis, rule: QuadratureRule, f) -> SpectralVector:
    """Hermite coefficients <f, h_n>_kappa by quadrature.

    f must be evaluable on the rule's nodes ((Q, d) array in, (Q,) out; a
    scalar-only callable is applied pointwise).  The rule integrates against
    w_kappa e^{-|x|^2}, so the integrand is f * h_n * e^{+|x|^2}.
    """
    nodes = rule.nodes
    try:
        fv = np.asarray(f(nodes), dtype=float)
        if fv.shape != (nodes.shape[0],):
            raise TypeError
    except TypeError:
        fv = np.array([float(f(p)) for p in nodes])
    boost = np.exp(np.sum(nodes**2, axis=-1) / 2.0)
    hmat = basis.hermite_function_matrix(nodes)  # (size, Q): includes e^{-|x|^2/2}
    coeffs = hmat * boost[None, :] @ (rule.weights * fv * boost)
    # note: h_n e^{|x|^2} = (h_n e^{|x|^2/2}) e^{|x|^2/2}; split the boost so
    # neither factor overflows before the Gaussian weight cancels it
    return SpectralVector(basis, coeffs)


def synthesize(basis: HermiteBasis, v: SpectralVector, x):
    """sum_n v_n h_n(x) at a point or batch (..., d)."""
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    pts = np.atleast_2d(x)
    hmat = basis.hermite_function_matrix(pts)
    out = v.values @ hmat
    return float(out[0]) if squeeze else out


def heat_apply(basis: HermiteBasis, t: float, v: SpectralVector) -> SpectralVector:
    """e^{-t L} on coefficients: multiply by e^{-t(2|n| + 2 gamma + d)}."""
    if t < 0:
        raise ValueError("heat semigroup needs t >= 0")
    return SpectralVector(basis, np.exp(-t * basis.eigenvalues()) * v.values)


def inv_sqrt_apply(basis: HermiteBasis, v: SpectralVector) -> SpectralVector:
    """L^{-1/2} on coefficients: multiply by (2|n| + 2 gamma + d)^{-1/2}."""
    return SpectralVector(basis, basis.eigenvalues() ** -0.5 * v.values)


def delta_matrix(basis: HermiteBasis, j: int, variant: str = "lower") -> OperatorMatrix:
    """Matrix of delta_j ("lower") or delta_j^* ("raise") on {h_n}.

    Entries include the 2^{-+1/2} normalization between neighboring shells.
    """
    if variant not in ("lower", "raise"):
        raise ValueError("variant must be 'lower' or 'raise'")
    key = ("delta", j, variant)
    if key in basis._cache:
        return basis._cache[key]
    exact = basis.exact
    alg = get_algebra(basis.rs, exact)
    size = basis.size
    M = np.zeros((size, size))
    xj = alg.variable(j)
    H_list = basis.H_raw_exact if exact else basis.H
    quarter = Fraction(1, 4) if exact else 0.25
    shells: dict[int, list[int]] = {}
    for i, n in enumerate(basis.indices):
        shells.setdefault(sum(n), []).append(i)
    leaky = False
    for col, n in enumerate(basis.indices):
        deg = sum(n)
        if variant == "lower":
            if deg == 0:
                continue
            P = alg.dunkl(j, H_list[col])
            target, factor = deg - 1, 2.0**-0.5
        else:
            if deg == basis.N:
                leaky = True
                continue
            P = xj * H_list[col] * alg.scalar(2) - alg.dunkl(j, H_list[col])
            target, factor = deg + 1, 2.0**0.5
        Q = alg.exp_laplacian(P, quarter)
        cache = {(0,) * basis.rs.dim: Q}
        for row in shells.get(target, []):
            m = basis.indices[row]
            if exact:
                S = alg.apply_poly_operator(basis.psi_exact[row], Q, cache).constant_term()
                if not S:
                    continue
                entry = (
                    factor
                    * 2.0 ** -sum(m)
                    * float(S)
                    / math.sqrt(basis.norms[row] * basis.norms[col])
                )
            else:
                S = alg.apply_poly_operator(basis.phi[row], Q, cache).constant_term()
                entry = factor * 2.0 ** -sum(m) * float(S)
            M[row, col] = entry
    out = OperatorMatrix(basis, M, label=f"delta{'*' if variant == 'raise' else ''}_{j}", leaky_top_shell=leaky)
    basis._cache[key] = out
    return out


def riesz_matrix(basis: HermiteBasis, j: int, adjoint: bool = False) -> OperatorMatrix:
    """R_j = delta_j L^{-1/2} (or R_j^* = delta_j^* L^{-1/2})."""
    D = delta_matrix(basis, j, "raise" if adjoint else "lower")
    lam = basis.eigenvalues() ** -0.5
    return OperatorMatrix(
        basis,
        D.values * lam[None, :],
        label=f"riesz{'*' if adjoint else ''}_{j}",
        leaky_top_shell=D.leaky_top_shell,
    )


def operator_norm(M: OperatorMatrix | np.ndarray, tol: float = 1e-10, max_iter: int = 10000) -> float:
    """Largest singular value by power iteration on M^T M."""
    A = M.values if isinstance(M, OperatorMatrix) else np.asarray(M, dtype=float)
    if A.size == 0 or not np.any(A):
        return 0.0
    B = A.T @ A
    v = np.ones(B.shape[0]) / math.sqrt(B.shape[0])
    lam = 0.0
    for _ in range(max_iter):
        w = B @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(nw - lam) <= tol * max(1.0, nw):
            lam = nw
            break
        lam = nw
    return math.sqrt(lam)


def exact_adjoint_residual(basis: HermiteBasis, j: int):
    """Exact-field check that delta_j and delta_j^* are mutual adjoints.

    Returns the number of entry pairs compared; raises AssertionError with
    the offending indices when the exact identity fails.  Exact bases only.
    """
    if not basis.exact:
        raise ValueError("exact adjoint check requires an exact basis")
    alg = get_algebra(basis.rs, True)
    xj = alg.variable(j)
    quarter = Fraction(1, 4)
    qraise_cache: dict[int, object] = {}

    def qraise(row):
        if row not in qraise_cache:
            P = xj * basis.H_raw_exact[row] * alg.scalar(2) - alg.dunkl(j, basis.H_raw_exact[row])
            qraise_cache[row] = alg.exp_laplacian(P, quarter)
        return qraise_cache[row]

    checked = 0
    for col, n in enumerate(basis.indices):
        deg = sum(n)
        if deg == 0:
            continue
        # lowering: S_low[m, n] = [psi_m, e^{Lap/4} T_j H_n] on the shell |m| = |n| - 1
        Qlow = alg.exp_laplacian(alg.dunkl(j, basis.H_raw_exact[col]), quarter)
        for row, m in enumerate(basis.indices):
            if sum(m) != deg - 1:
                continue
            S_low = alg.apply_poly_operator(basis.psi_exact[row], Qlow).constant_term()
            # raising on column m: S_raise[n, m] = [psi_n, e^{Lap/4}(2 x_j H_m - T_j H_m)]
            S_raise = alg.apply_poly_operator(basis.psi_exact[col], qraise(row)).constant_term()
            assert S_low == S_raise, (m, n, S_low, S_raise)
            checked += 1
    return checked
