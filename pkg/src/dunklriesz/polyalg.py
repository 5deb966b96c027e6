"""Sparse multivariate polynomials and the exact action of Dunkl operators.

Polynomials are exponent-tuple -> coefficient maps.  Coefficients are duck
typed: qfield.Surd in exact mode, floats otherwise.  The Dunkl operator

    T_j p = d p/dx_j + sum_{alpha in R+} kappa(alpha) alpha_j
            (p - p o sigma_alpha) / <x, alpha>

is implemented with exact division of the numerator by the linear form
<x, alpha> (the numerator vanishes on the mirror, so the division is exact;
a nonzero remainder signals a bug, never valid input).
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .qfield import Surd
from .reflection import RootSystem, _exact_reflection_matrix, reflection_matrix


class DimensionMismatch(ValueError):
    pass


class NonzeroRemainder(ArithmeticError):
    """Division by a mirror linear form left a remainder; arithmetic bug."""


NEG_INF = float("-inf")


class Polynomial:
    """Sparse polynomial over R^d; immutable by convention."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict | None = None):
        self.dim = dim
        self.terms = terms or {}

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls(dim, {})

    @classmethod
    def constant(cls, dim: int, c) -> "Polynomial":
        if _is_zero(c):
            return cls(dim, {})
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, exponents, c=1) -> "Polynomial":
        exponents = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exponents):
            raise ValueError("negative exponent")
        if _is_zero(c):
            return cls(len(exponents), {})
        return cls(len(exponents), {exponents: c})

    @classmethod
    def variable(cls, j: int, dim: int, c=1) -> "Polynomial":
        """x_j (1-based axis index)."""
        e = [0] * dim
        e[j - 1] = 1
        return cls.monomial(e, c)

    # -- ring structure -----------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.dim != other.dim:
            raise DimensionMismatch(f"dim {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return self + Polynomial.constant(self.dim, other)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            c2 = terms.get(e, 0) + c if e in terms else c
            if _is_zero(c2):
                terms.pop(e, None)
            else:
                terms[e] = c2
        return Polynomial(self.dim, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                c3 = terms.get(e, 0) + c if e in terms else c
                if _is_zero(c3):
                    terms.pop(e, None)
                else:
                    terms[e] = c3
        return Polynomial(self.dim, terms)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "Polynomial":
        if _is_zero(c):
            return Polynomial.zero(self.dim)
        return Polynomial(self.dim, {e: c * v for e, v in self.terms.items()})

    # -- calculus and evaluation --------------------------------------------

    @property
    def degree(self):
        """Max total degree; -inf for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=NEG_INF)

    def is_zero(self) -> bool:
        return not self.terms

    def partial_derivative(self, j: int) -> "Polynomial":
        """d/dx_j (1-based)."""
        i = j - 1
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
                terms[e2] = terms.get(e2, 0) + c * e[i]
        return Polynomial(self.dim, {e: c for e, c in terms.items() if not _is_zero(c)})

    def __call__(self, point):
        return self.eval(point)

    def eval(self, point):
        """Evaluate at a point (sequence of scalars, exact or float)."""
        if len(point) != self.dim:
            raise DimensionMismatch("point dimension mismatch")
        total = 0
        for e, c in self.terms.items():
            v = c
            for xi, ei in zip(point, e):
                if ei:
                    v = v * xi**ei
            total = total + v
        return total

    def eval_float(self, x) -> np.ndarray | float:
        """Vectorized float evaluation; x has shape (..., d)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for e, c in self.terms.items():
            term = float(c) * np.ones_like(out)
            for i, ei in enumerate(e):
                if ei:
                    term = term * x[..., i] ** ei
            out = out + term
        return float(out) if out.ndim == 0 else out

    def compose_linear(self, rows) -> "Polynomial":
        """p(M x): substitute x_i -> sum_j M[i][j] x_j.

        `rows` is a sequence of coefficient rows (exact scalars or floats);
        for a reflection or any orthogonal M this is the pullback p o M.
        """
        lin = [Polynomial(self.dim, {_unit(self.dim, j): row[j] for j in range(self.dim) if not _is_zero(row[j])}) for row in rows]
        out = Polynomial.zero(self.dim)
        cache: dict = {}
        for e, c in self.terms.items():
            if e not in cache:
                m = Polynomial.constant(self.dim, _one_like(c))
                for i, ei in enumerate(e):
                    for _ in range(ei):
                        m = m * lin[i]
                cache[e] = m
            out = out + cache[e].scale(c)
        return out

    def map_coefficients(self, fn) -> "Polynomial":
        terms = {}
        for e, c in self.terms.items():
            v = fn(c)
            if not _is_zero(v):
                terms[e] = v
        return Polynomial(self.dim, terms)

    def to_float(self) -> "Polynomial":
        return self.map_coefficients(float)

    def constant_term(self):
        return self.terms.get((0,) * self.dim, 0)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        bits = []
        for e in sorted(self.terms, key=lambda t: (sum(t), t)):
            mono = "*".join(f"x{i+1}^{k}" for i, k in enumerate(e) if k) or "1"
            bits.append(f"({self.terms[e]})*{mono}")
        return " + ".join(bits)


def _unit(d, j):
    e = [0] * d
    e[j] = 1
    return tuple(e)


def _is_zero(c) -> bool:
    if isinstance(c, Surd):
        return not c
    return c == 0


def _one_like(c):
    return Surd.of(1) if isinstance(c, Surd) else 1.0


def divide_linear(p: Polynomial, coeffs, exact: bool, rel_tol: float = 1e-9):
    """Divide p by the linear form sum_j coeffs[j] x_j; return the quotient.

    Long division in the pivot variable (first/largest nonzero coefficient).
    Raises NonzeroRemainder unless the remainder vanishes (exactly in exact
    mode, relative to the numerator scale in float mode).
    """
    d = p.dim
    if exact:
        pivot = next(j for j in range(d) if not _is_zero(coeffs[j]))
    else:
        pivot = int(np.argmax([abs(float(c)) for c in coeffs]))
    cp = coeffs[pivot]
    # split p into slices by pivot exponent
    slices: dict[int, dict] = {}
    for e, c in p.terms.items():
        k = e[pivot]
        rest = e[:pivot] + (0,) + e[pivot + 1:]
        slices.setdefault(k, {})[rest] = c
    if not slices:
        return Polynomial.zero(d)
    lrest = Polynomial(d, {_unit(d, j): coeffs[j] for j in range(d) if j != pivot and not _is_zero(coeffs[j])})
    kmax = max(slices)
    quot_slices: dict[int, Polynomial] = {}
    carry = Polynomial(d, slices.get(kmax, {}))
    for k in range(kmax, 0, -1):
        b = carry.scale(_invert(cp, exact))
        quot_slices[k - 1] = b
        lower = Polynomial(d, slices.get(k - 1, {}))
        carry = lower - b * lrest
    rem = carry
    if exact:
        if not rem.is_zero():
            raise NonzeroRemainder(f"nonzero remainder {rem!r}")
    else:
        scale = max((abs(float(c)) for c in p.terms.values()), default=0.0)
        if any(abs(float(c)) > rel_tol * max(scale, 1e-300) for c in rem.terms.values()):
            raise NonzeroRemainder("remainder above float tolerance")
    out = Polynomial.zero(d)
    xpiv = Polynomial.variable(pivot + 1, d, _one_like(cp))
    for k, q in quot_slices.items():
        mono = Polynomial.monomial(_unit(d, pivot), _one_like(cp)) if k == 1 else None
        term = q
        for _ in range(k):
            term = term * xpiv
        out = out + term
    return out


def _invert(c, exact: bool):
    if exact:
        return Surd.of(1) / c if not isinstance(c, Surd) else c.inverse()
    return 1.0 / float(c)


class DunklAlgebra:
    """Dunkl operator calculus bound to one root system.

    Caches reflection pullbacks of monomials per root, which dominates the
    cost of repeated T_j applications on graded bases.
    """

    def __init__(self, rs: RootSystem, exact: bool | None = None):
        if exact is None:
            exact = rs.exact_capable
        if exact and not rs.exact_capable:
            raise ValueError("root system has no exact coordinates/multiplicities")
        self.rs = rs
        self.exact = exact
        self.dim = rs.dim
        if exact:
            self.alphas = [tuple(a) for a in rs.exact_roots]
            self.kappas = [Surd.of(f) for f in rs.multiplicity_exact]
            self.sigmas = [_exact_reflection_matrix(a) for a in rs.exact_roots]
            self.one = Surd.of(1)
        else:
            self.alphas = [tuple(float(v) for v in a) for a in rs.positive_roots]
            self.kappas = [float(k) for k in rs.multiplicity]
            self.sigmas = [tuple(tuple(row) for row in reflection_matrix(a)) for a in rs.positive_roots]
            self.one = 1.0
        self._pullback_cache: list[dict] = [dict() for _ in self.alphas]

    # -- constructors in the right coefficient ring -------------------------

    def scalar(self, v):
        if self.exact:
            return Surd.of(v) if not isinstance(v, Surd) else v
        return float(v)

    def constant(self, v) -> Polynomial:
        return Polynomial.constant(self.dim, self.scalar(v))

    def monomial(self, exponents, c=1) -> Polynomial:
        return Polynomial.monomial(exponents, self.scalar(c))

    def variable(self, j: int) -> Polynomial:
        return Polynomial.variable(j, self.dim, self.scalar(1))

    # -- operators -----------------------------------------------------------

    def reflect_pullback(self, i: int, p: Polynomial) -> Polynomial:
        """p o sigma_{alpha_i}, with per-monomial caching."""
        cache = self._pullback_cache[i]
        rows = self.sigmas[i]
        out = Polynomial.zero(self.dim)
        for e, c in p.terms.items():
            if e not in cache:
                cache[e] = Polynomial.monomial(e, self.one).compose_linear(rows)
            out = out + cache[e].scale(c)
        return out

    def divided_difference(self, p: Polynomial, i: int) -> Polynomial:
        """(p - p o sigma_alpha) / <x, alpha> for positive root i; exact."""
        num = p - self.reflect_pullback(i, p)
        if num.is_zero():
            return num
        return divide_linear(num, self.alphas[i], self.exact)

    def dunkl(self, j: int, p: Polynomial) -> Polynomial:
        """T_j p (1-based axis j); degree-lowering on homogeneous input."""
        out = p.partial_derivative(j)
        for i, alpha in enumerate(self.alphas):
            aj = alpha[j - 1]
            if _is_zero(aj) or _is_zero(self.kappas[i]):
                continue
            out = out + self.divided_difference(p, i).scale(self.kappas[i] * aj)
        return out

    def laplacian(self, p: Polynomial) -> Polynomial:
        """Dunkl Laplacian: sum_j T_j^2 p."""
        out = Polynomial.zero(self.dim)
        for j in range(1, self.dim + 1):
            out = out + self.dunkl(j, self.dunkl(j, p))
        return out

    def exp_laplacian(self, p: Polynomial, s) -> Polynomial:
        """exp(s * Laplacian) p -- a finite sum since the Laplacian lowers degree.

        In exact mode s must be rational (it is +-1/4 everywhere we use it).
        """
        if self.exact:
            s = Fraction(s)
        out = p
        term = p
        k = 0
        deg = p.degree
        if deg == NEG_INF:
            return p
        while 2 * (k + 1) <= deg:
            k += 1
            term = self.laplacian(term)
            if term.is_zero():
                break
            if self.exact:
                coef = Surd.of(s**k / math.factorial(k))
            else:
                coef = float(s) ** k / math.factorial(k)
            out = out + term.scale(coef)
        return out

    def conjugated_oscillator(self, p: Polynomial) -> Polynomial:
        """Gaussian-conjugated harmonic oscillator:

        L~ p = -Laplacian p + sum_j [ x_j T_j p + T_j(x_j p) ],
        satisfying L(e^{-|x|^2/2} p) = e^{-|x|^2/2} L~ p.  Degree preserving;
        generalized Hermite polynomials are its eigenvectors with eigenvalue
        2|n| + 2 gamma + d.
        """
        out = -self.laplacian(p)
        for j in range(1, self.dim + 1):
            xj = self.variable(j)
            out = out + xj * self.dunkl(j, p) + self.dunkl(j, xj * p)
        return out

    def apply_poly_operator(self, p: Polynomial, q: Polynomial, cache: dict | None = None) -> Polynomial:
        """p(T) q: substitute T_j for x_j in p and apply to q.

        An optional cache maps exponent tuples m to T^m q, shared across calls
        with the same q (used heavily by the pairing).
        """
        if cache is None:
            cache = {(0,) * self.dim: q}
        out = Polynomial.zero(self.dim)
        for e, c in p.terms.items():
            out = out + self._t_power(e, q, cache).scale(c)
        return out

    def _t_power(self, e: tuple, q: Polynomial, cache: dict) -> Polynomial:
        if e in cache:
            return cache[e]
        j = next(i for i, k in enumerate(e) if k)
        prev = e[:j] + (e[j] - 1,) + e[j + 1:]
        val = self.dunkl(j + 1, self._t_power(prev, q, cache))
        cache[e] = val
        return val


def get_algebra(rs: RootSystem, exact: bool | None = None) -> DunklAlgebra:
    """Memoized DunklAlgebra per root system and arithmetic mode."""
    key = ("algebra", exact if exact is not None else rs.exact_capable)
    if key not in rs._cache:
        rs._cache[key] = DunklAlgebra(rs, exact)
    return rs._cache[key]


# thin functional entry points mirroring the operator vocabulary


def dunkl_apply(rs: RootSystem, j: int, p: Polynomial, exact: bool | None = None) -> Polynomial:
    return get_algebra(rs, exact).dunkl(j, p)


def dunkl_laplacian(rs: RootSystem, p: Polynomial, exact: bool | None = None) -> Polynomial:
    return get_algebra(rs, exact).laplacian(p)


def exp_laplacian(rs: RootSystem, p: Polynomial, s, exact: bool | None = None) -> Polynomial:
    return get_algebra(rs, exact).exp_laplacian(p, s)


def conjugated_oscillator(rs: RootSystem, p: Polynomial, exact: bool | None = None) -> Polynomial:
    return get_algebra(rs, exact).conjugated_oscillator(p)


def divided_difference(rs: RootSystem, p: Polynomial, root_index: int, exact: bool | None = None) -> Polynomial:
    return get_algebra(rs, exact).divided_difference(p, root_index)
