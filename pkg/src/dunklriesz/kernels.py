"""Dunkl kernel, Dunkl-Hermite heat kernels, Gaussian translations, and the
Riesz transform kernel.

Evaluator dispatch
------------------
* rank one / Z2^d: the one-dimensional kernel E_kappa(u, v) depends only on
  w = u*v and splits into even/odd modified-Bessel parts,

      E(w) = Gamma(k+1/2) (|w|/2)^(1/2-k) [ I_{k-1/2}(|w|) + sgn(w) I_{k+1/2}(|w|) ],

  which is evaluated in log scale through exponentially scaled Bessel
  functions (scipy.special.ive).  This stays finite and fully accurate for
  the arguments ~ x*y/sinh(2t) -> +-infinity that the Riesz time integral
  produces; the spec'd power-series recursion (dunkl_kernel_1d) is kept as
  the independent cross-check.
* any other reflection group: Mehler inversion through a built Hermite basis.

Heat kernel
-----------
    k_t(x,y) = c_kappa^{-1} (sinh 2t)^(-gamma-d/2)
               e^{-coth(2t)(|x|^2+|y|^2)/2} E_kappa(x/sinh 2t, y).

The prefactor is the one forced by substituting r = e^{-2t} into the Mehler
formula ((1-r^2)/r = 2 sinh 2t) and is the only choice that reduces to the
classical Hermite kernel at kappa = 0.  `prefactor="printed"` switches to the
m_kappa variant, which is off by exactly 2^(gamma+d/2); the verification
suite asserts that it fails the spectral-series comparison.

Riesz kernel
------------
    K_j(x,y) = pi^(-1/2) * int_0^inf k_t(x,y) [ (1-coth 2t) x_j
               + y_j / sinh 2t ] dt / sqrt(t),

absolutely convergent off the orbit of x.  The t -> 0 endpoint is handled by
the substitution t = u^2 (absorbing dt/sqrt(t)); the tail uses the
e^{-(2 gamma + d + 2) t} decay.  A fixed Gauss-Legendre panel evaluator
(vectorized over point batches) backs the verification harness; the adaptive
scipy.integrate.quad route is the reference implementation and its oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln, ive
from numpy.polynomial.legendre import leggauss

from .hermite import HermiteBasis
from .reflection import min_orbit_distance, orbit_distances


class SeriesNonConvergence(ArithmeticError):
    pass


class TruncationTooCoarse(ArithmeticError):
    pass


class WrongGroup(ValueError):
    pass


class OrbitTooClose(ValueError):
    """Riesz kernel requested below the orbit separation floor."""


class QuadratureNonConvergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class KernelConfig:
    series_truncation: int = 64       # max index for the 1-D series evaluator
    series_tail_tol: float = 1e-12
    mehler_r_cap: float = 0.5         # per-point r = min(cap, 1/(1+|x||y|))
    mehler_tail_tol: float = 1e-6     # last-shell contribution, relative
    quad_rel_tol: float = 1e-10       # adaptive Riesz integration
    t_split: float = 1.0
    u_panel_nodes: int = 24           # Gauss-Legendre nodes per u-panel
    tail_panel_nodes: int = 16
    separation_floor: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.mehler_r_cap < 1.0:
            raise ValueError("mehler_r must lie in (0, 1)")


DEFAULT_CONFIG = KernelConfig()


# ---------------------------------------------------------------------------
# rank-one Dunkl kernel


def dunkl_kernel_1d(kappa: float, u: float, v: float, cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    """E_kappa(u, v) for the rank-one system by the defining power series.

    a_0 = 1, a_n = v a_{n-1} / (n + 2 kappa [n odd]); returns sum a_n u^n.
    Raises SeriesNonConvergence when the tail bound at the truncation index
    exceeds tolerance (large |u v|); the Bessel route has no such cap.
    """
    total, term = 1.0, 1.0
    w = u * v
    for n in range(1, cfg.series_truncation + 1):
        term = term * w / (n + 2.0 * kappa * (n % 2))
        total += term
    # geometric tail bound once |w| < n/2
    n = cfg.series_truncation + 1
    if abs(w) > n / 2.0:
        raise SeriesNonConvergence(
            f"|uv|={abs(w):.3g} too large for series truncation {cfg.series_truncation}"
        )
    tail = abs(term) * (abs(w) / n) / (1.0 - abs(w) / n)
    if tail > cfg.series_tail_tol * max(1.0, abs(total)):
        raise SeriesNonConvergence(f"series tail {tail:.3g} above tolerance")
    return total


_ASYMPT_SWITCH = 1e5


def _a1(nu):
    return (4.0 * nu * nu - 1.0) / 8.0


def _a2(nu):
    return (4.0 * nu * nu - 1.0) * (4.0 * nu * nu - 9.0) / 128.0


def _log_bracket(nu: float, x: np.ndarray, sign: np.ndarray) -> np.ndarray:
    """log( e^{-x} [ I_nu(x) + sign I_{nu+1}(x) ] ), robust for any x > 0.

    Below the switch, scipy.special.ive is accurate and the bracket is within
    float range.  Above it the two-term uniform asymptotics are at machine
    precision; the minus branch cancels at leading order and starts at
    (nu + 1/2)/x, so its log is assembled analytically (the raw value can
    underflow long before the log does).
    """
    xs = np.where(x > _ASYMPT_SWITCH, 1.0, x)
    direct = np.log(ive(nu, xs) + sign * ive(nu + 1, xs))
    xb = np.where(x > _ASYMPT_SWITCH, x, _ASYMPT_SWITCH)
    base = -0.5 * np.log(2.0 * math.pi * xb)
    plus = base + math.log(2.0) + np.log1p(-(_a1(nu) + _a1(nu + 1)) / (2.0 * xb))
    c2 = (2 * nu + 1.0) * (2 * nu - 1.0) * (2 * nu + 3.0) / 32.0
    minus = (
        base
        + math.log(nu + 0.5)
        - np.log(xb)
        + np.log1p(-c2 / ((nu + 0.5) * xb))
    )
    asym = np.where(sign > 0, plus, minus)
    return np.where(x > _ASYMPT_SWITCH, asym, direct)


def log_dunkl_kernel_1d(kappa: float, w) -> np.ndarray:
    """log E_kappa at product argument w = u*v, vectorized; exact at kappa=0.

    E grows like e^w w^{-kappa} as w -> +inf and (for kappa > 0) like
    e^{|w|} |w|^{-kappa-1} as w -> -inf; both regimes stay finite in log scale.
    """
    w = np.asarray(w, dtype=float)
    if kappa == 0.0:
        return w + 0.0
    aw = np.abs(w)
    nu = kappa - 0.5
    safe = np.where(aw > 0, aw, 1.0)
    sign = np.sign(np.where(w == 0, 1.0, w))
    out = (
        gammaln(kappa + 0.5)
        + (0.5 - kappa) * np.log(safe / 2.0)
        + safe
        + _log_bracket(nu, safe, sign)
    )
    return np.where(aw > 0, out, 0.0)


def dlog_dunkl_kernel_1d(kappa: float, w) -> np.ndarray:
    """d/dw of log E_kappa(w), vectorized; equals (E'/E)(w).

    From the defining equation, E'(w) = E(w) - 2 kappa g(w)/w with g the odd
    part, so E'/E = 1 - (2 kappa / w) g/(f+g); g/w has a finite limit at 0.
    Far regimes use the analytic limits 1 - kappa/w and -1 - (kappa+1)/w.
    """
    w = np.asarray(w, dtype=float)
    if kappa == 0.0:
        return np.ones_like(w)
    aw = np.abs(w)
    nu = kappa - 0.5
    small = aw < 1e-8
    big = aw > _ASYMPT_SWITCH
    mid = ~small & ~big
    safe = np.where(mid, aw, 1.0)
    sign = np.sign(np.where(w == 0, 1.0, w))
    i0 = ive(nu, safe)
    i1 = ive(nu + 1, safe)
    ratio = sign * i1 / (i0 + sign * i1)               # g/(f+g)
    out = 1.0 - 2.0 * kappa * ratio / np.where(mid, w, 1.0)
    wb = np.where(big, w, 1.0)
    out = np.where(big & (w > 0), 1.0 - kappa / wb, out)
    out = np.where(big & (w < 0), -1.0 - (kappa + 1.0) / wb, out)
    return np.where(small, 1.0 / (1.0 + 2.0 * kappa), out)


def dunkl_kernel_z2d(rs_or_basis, x, y, cfg: KernelConfig = DEFAULT_CONFIG):
    """E_kappa for Z2^d as the product of per-axis rank-one kernels."""
    rs = getattr(rs_or_basis, "rs", rs_or_basis)
    kappas = rs.axis_kappas()
    if kappas is None:
        raise WrongGroup("dunkl_kernel_z2d requires a Z2^d root system")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    logs = sum(
        log_dunkl_kernel_1d(kappas[j], x[..., j] * y[..., j]) for j in range(rs.dim)
    )
    out = np.exp(logs)
    return float(out) if np.ndim(out) == 0 else out


def dunkl_kernel_mehler(basis: HermiteBasis, x, y, cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    """E_kappa(x, y) for any group, by inverting the Mehler formula.

    With x' = (1-r^2) x / (2r):

        E(x,y) = (1-r^2)^(gamma+d/2) e^{r^2 (|x'|^2+|y|^2)/(1-r^2)}
                 sum_{|n| <= N} H_n(x') H_n(y) r^|n| / 2^|n|.

    r is chosen per point to balance the rescaled argument against tail
    decay.  Raises TruncationTooCoarse when the top degree shell still
    contributes more than `mehler_tail_tol` relatively.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = min(cfg.mehler_r_cap, 1.0 / (1.0 + float(np.linalg.norm(x) * np.linalg.norm(y))))
    xp = (1.0 - r * r) / (2.0 * r) * x
    total = 0.0
    shell = 0.0
    for i, n in enumerate(basis.indices):
        Hx = basis.H[i].eval_float(xp)
        Hy = basis.H[i].eval_float(y)
        term = Hx * Hy * r ** sum(n) / 2.0 ** sum(n)
        total += term
        if sum(n) == basis.N:
            shell += abs(term)
    if shell > cfg.mehler_tail_tol * max(abs(total), 1e-300):
        raise TruncationTooCoarse(
            f"top shell contributes {shell:.2e} vs total {total:.2e}"
        )
    pref = (1.0 - r * r) ** (basis.gamma + basis.rs.dim / 2.0)
    arg = r * r / (1.0 - r * r) * float(xp @ xp + y @ y)
    return pref * math.exp(arg) * total


def dunkl_kernel(basis: HermiteBasis, x, y, cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    """E_kappa(x,y) via the best available evaluator for the basis group."""
    if basis.rs.axis_kappas() is not None:
        return float(dunkl_kernel_z2d(basis.rs, x, y, cfg))
    return dunkl_kernel_mehler(basis, x, y, cfg)


# ---------------------------------------------------------------------------
# heat kernels


class Z2Evaluator:
    """Vectorized closed-form kernels for Z2^d, all in log scale internally."""

    def __init__(self, kappas, c_kappa: float, gamma: float):
        self.kappas = np.asarray(kappas, dtype=float)
        self.d = self.kappas.size
        self.c_kappa = c_kappa
        self.gamma = gamma

    @staticmethod
    def from_basis(basis: HermiteBasis) -> "Z2Evaluator":
        kappas = basis.rs.axis_kappas()
        if kappas is None:
            raise WrongGroup("Z2Evaluator requires a Z2^d system")
        return Z2Evaluator(kappas, basis.c_kappa, basis.gamma)

    def log_E(self, X, Y):
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        return sum(
            log_dunkl_kernel_1d(self.kappas[j], X[..., j] * Y[..., j])
            for j in range(self.d)
        )

    def log_heat(self, t, X, Y):
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        s = math.sinh(2.0 * t)
        c = math.cosh(2.0 * t) / s
        q = np.sum(X * X, axis=-1) + np.sum(Y * Y, axis=-1)
        return (
            -math.log(self.c_kappa)
            - (self.gamma + self.d / 2.0) * math.log(s)
            - 0.5 * c * q
            + self.log_E(X / s, Y)
        )

    def heat(self, t, X, Y):
        return np.exp(self.log_heat(t, X, Y))

    def dlog_heat_dy(self, t, X, Y, i):
        """d/dy_i of log k_t."""
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        s = math.sinh(2.0 * t)
        c = math.cosh(2.0 * t) / s
        w = X[..., i] * Y[..., i] / s
        return -c * Y[..., i] + (X[..., i] / s) * dlog_dunkl_kernel_1d(self.kappas[i], w)

    def heat_dy(self, t, X, Y, i):
        return self.heat(t, X, Y) * self.dlog_heat_dy(t, X, Y, i)

    def log_gaussian_translate(self, c: float, X, Y):
        """log of tau_x(e^{-c|.|^2})(-y) = e^{-c(|x|^2+|y|^2)} E(2c y, x)."""
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        q = np.sum(X * X, axis=-1) + np.sum(Y * Y, axis=-1)
        return -c * q + self.log_E(2.0 * c * Y, X)

    def riesz_bracket(self, t, X, Y, j):
        s = math.sinh(2.0 * t)
        c = math.cosh(2.0 * t) / s
        return (1.0 - c) * np.asarray(X)[..., j] + np.asarray(Y)[..., j] / s

    def riesz_integrand(self, t, X, Y, j):
        """h_t(x,y) = k_t(x,y) [ (1 - coth 2t) x_j + y_j / sinh 2t ]."""
        return self.heat(t, X, Y) * self.riesz_bracket(t, X, Y, j)


def _evaluator(basis: HermiteBasis) -> Z2Evaluator | None:
    if "z2eval" not in basis._cache:
        kappas = basis.rs.axis_kappas()
        basis._cache["z2eval"] = (
            Z2Evaluator(kappas, basis.c_kappa, basis.gamma) if kappas is not None else None
        )
    return basis._cache["z2eval"]


def heat_kernel(
    basis: HermiteBasis,
    t: float,
    x,
    y,
    cfg: KernelConfig = DEFAULT_CONFIG,
    prefactor: str = "consistent",
):
    """Dunkl-Hermite heat kernel k_t(x, y), t > 0.

    prefactor="consistent" (default) uses c_kappa^{-1} (sinh 2t)^(-gamma-d/2);
    "printed" uses m_kappa instead, which is larger by 2^(gamma+d/2) and fails
    the spectral-series consistency check (kept for the discrepancy test).
    """
    if t <= 0:
        raise ValueError("heat kernel needs t > 0")
    ev = _evaluator(basis)
    if ev is not None:
        val = ev.heat(t, x, y)
    else:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        s = math.sinh(2.0 * t)
        c = math.cosh(2.0 * t) / s
        E = dunkl_kernel_mehler(basis, x / s, y, cfg)
        val = (
            1.0
            / basis.c_kappa
            * s ** -(basis.gamma + basis.rs.dim / 2.0)
            * math.exp(-0.5 * c * float(x @ x + y @ y))
            * E
        )
    if prefactor == "printed":
        val = val * 2.0 ** (basis.gamma + basis.rs.dim / 2.0)
    elif prefactor != "consistent":
        raise ValueError("prefactor must be 'consistent' or 'printed'")
    return float(val) if np.ndim(val) == 0 else val


def heat_kernel_classical(t: float, x, y):
    """Classical Hermite semigroup kernel (kappa = 0):

        (2 pi sinh 2t)^(-d/2) exp(-[tanh(t)|x+y|^2 + coth(t)|x-y|^2]/4).
    """
    if t <= 0:
        raise ValueError("heat kernel needs t > 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x.shape[-1]
    sp = np.sum((x + y) ** 2, axis=-1)
    sm = np.sum((x - y) ** 2, axis=-1)
    out = (2.0 * math.pi * math.sinh(2.0 * t)) ** (-d / 2.0) * np.exp(
        -0.25 * (math.tanh(t) * sp + (1.0 / math.tanh(t)) * sm)
    )
    return float(out) if np.ndim(out) == 0 else out


def heat_kernel_series(kappas, t: float, x, y, tol: float = 1e-10, max_terms: int = 600):
    """Spectral-series oracle sum_n e^{-t(2|n|+2gamma+d)} h_n(x) h_n(y).

    Z2^d only (tensor structure: the d-dimensional series is the product of
    rank-one series).  Independent of the closed form; used to adjudicate the
    heat-kernel constant.
    """
    from .hermite import hermite_functions_1d

    kappas = np.atleast_1d(np.asarray(kappas, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    total = 1.0
    for j, k in enumerate(kappas):
        # adaptive 1-D series with geometric tail bound
        nmax = 40
        while True:
            hx = hermite_functions_1d(k, nmax, np.array([x[j]]))[:, 0]
            hy = hermite_functions_1d(k, nmax, np.array([y[j]]))[:, 0]
            lam = 2.0 * np.arange(nmax + 1) + 2.0 * k + 1.0
            vals = np.exp(-t * lam) * hx * hy
            s = float(np.sum(vals))
            tail = float(np.max(np.abs(vals[-8:]))) / max(1.0 - math.exp(-2.0 * t), 1e-12)
            if tail <= tol * max(abs(s), 1e-300):
                break
            if nmax >= max_terms:
                raise SeriesNonConvergence("heat series did not converge")
            nmax *= 2
        total *= s
    return total


def gaussian_translate(basis_or_rs, c: float, x, y, cfg: KernelConfig = DEFAULT_CONFIG):
    """Dunkl translation of a Gaussian: tau_x(e^{-c|.|^2})(-y), c > 0.

    Closed identity e^{-c(|x|^2+|y|^2)} E_kappa(2c y, x); symmetric in (x, y)
    and squeezed between e^{-c max_g |y-gx|^2} and e^{-c min_g |y-gx|^2}.
    """
    if c <= 0:
        raise ValueError("gaussian_translate needs c > 0")
    rs = getattr(basis_or_rs, "rs", basis_or_rs)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    kappas = rs.axis_kappas()
    if kappas is not None:
        ev = Z2Evaluator(kappas, 1.0, float(np.sum(kappas)))
        out = np.exp(ev.log_gaussian_translate(c, x, y))
        return float(out) if np.ndim(out) == 0 else out
    if isinstance(basis_or_rs, HermiteBasis):
        E = dunkl_kernel_mehler(basis_or_rs, 2.0 * c * y, x, cfg)
        return math.exp(-c * float(x @ x + y @ y)) * E
    raise WrongGroup("general-group gaussian_translate needs a HermiteBasis")


# ---------------------------------------------------------------------------
# Riesz kernel


def _bracket_general(t, x, y, j):
    s = math.sinh(2.0 * t)
    c = math.cosh(2.0 * t) / s
    return (1.0 - c) * x[..., j] + y[..., j] / s


def riesz_kernel(basis: HermiteBasis, j: int, x, y, cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    """K_j(x, y) by adaptive quadrature of the subordination time integral.

    j is a 1-based axis.  Requires y off the orbit of x by at least the
    separation floor; below it the integral is a genuine singularity and the
    evaluation refuses rather than returning garbage.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    md = min_orbit_distance(basis.rs.group, x, y)
    if md <= cfg.separation_floor:
        raise OrbitTooClose(f"orbit distance {md:.2e} below floor {cfg.separation_floor:.2e}")
    ev = _evaluator(basis)
    if ev is not None:
        integrand = lambda t: float(ev.riesz_integrand(t, x, y, j - 1))
    else:
        integrand = lambda t: heat_kernel(basis, t, x, y, cfg) * float(
            _bracket_general(t, x, y, j - 1)
        )

    # t in (0, 1]: substitute t = u^2 so dt/sqrt(t) = 2 du
    head, err1 = quad(
        lambda u: 2.0 * integrand(u * u),
        0.0,
        math.sqrt(cfg.t_split),
        epsabs=1e-14,
        epsrel=cfg.quad_rel_tol,
        limit=300,
    )
    t_max = cfg.t_split + 60.0 / (2.0 * basis.gamma + basis.rs.dim + 2.0)
    tail, err2 = quad(
        lambda t: integrand(t) / math.sqrt(t),
        cfg.t_split,
        t_max,
        epsabs=1e-14,
        epsrel=cfg.quad_rel_tol,
        limit=200,
    )
    total = (head + tail) / math.sqrt(math.pi)
    if err1 + err2 > 1e-6 * max(abs(total), 1e-12):
        raise QuadratureNonConvergence(
            f"riesz quadrature error {err1 + err2:.2e} vs value {total:.2e}"
        )
    return total


def _panel_nodes(breaks, n_nodes):
    """Gauss-Legendre nodes/weights tiled over consecutive panels."""
    xs, ws = leggauss(n_nodes)
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        nodes.append(mid + half * xs)
        weights.append(half * ws)
    return np.concatenate(nodes), np.concatenate(weights)


def riesz_kernel_many(
    basis: HermiteBasis, j: int, X, Y, cfg: KernelConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """Vectorized K_j over broadcast batches X, Y of shape (..., d).

    Fixed Gauss-Legendre panels (geometric refinement of the u = sqrt(t)
    endpoint); cross-checked against the adaptive scalar route in the tests.
    Z2^d systems only.
    """
    ev = _evaluator(basis)
    if ev is None:
        raise WrongGroup("riesz_kernel_many requires a Z2^d system")
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    X, Y = np.broadcast_arrays(X, Y)
    md = orbit_distances(basis.rs.group, X, Y)
    if np.any(md <= cfg.separation_floor):
        raise OrbitTooClose("a point pair sits below the separation floor")

    u_hi = math.sqrt(cfg.t_split)
    u_lo = max(1e-4, min(0.05, float(np.min(md)) / 8.0)) * u_hi
    breaks = [0.0]
    b = u_lo
    while b < u_hi:
        breaks.append(b)
        b *= 2.0
    breaks.append(u_hi)
    un, uw = _panel_nodes(np.array(breaks), cfg.u_panel_nodes)

    t_max = cfg.t_split + 60.0 / (2.0 * ev.gamma + ev.d + 2.0)
    tb = [cfg.t_split]
    b = 2.0 * cfg.t_split
    while b < t_max:
        tb.append(b)
        b *= 2.0
    tb.append(t_max)
    tn, tw = _panel_nodes(np.array(tb), cfg.tail_panel_nodes)

    out = np.zeros(X.shape[:-1])
    for u, w in zip(un, uw):
        out += 2.0 * w * ev.riesz_integrand(u * u, X, Y, j - 1)
    for t, w in zip(tn, tw):
        out += w * ev.riesz_integrand(t, X, Y, j - 1) / math.sqrt(t)
    return out / math.sqrt(math.pi)
