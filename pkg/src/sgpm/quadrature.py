"""S-matrices and optimal S-matrices for definite integration on [0, L].

An S-matrix row ``i`` maps samples of ``f`` at the Gauss nodes to an
approximation of the ``q``-fold integral of ``f`` over ``[0, x_i]``.  The
optimal variant picks a separate Gegenbauer parameter for every row, chosen to
minimize the leading term of the quadrature error, and samples ``f`` at the
Gauss nodes of that parameter (the adjoint nodes of the row).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import binom

from sgpm.gegenbauer import (
    GegenbauerBasis,
    NodeSet,
    check_alpha,
    gauss_nodes,
    leading_coefficient,
    monic_table,
    shift_nodeset,
)

logger = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)


@lru_cache(maxsize=128)
def _legendre_rule(p: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(p)


def basis_integrals(basis: GegenbauerBasis, jmax: int, uppers) -> np.ndarray:
    """Integrals of degrees ``0..jmax`` from the left end of ``basis`` to each upper limit.

    Returns an array of shape ``(len(uppers), jmax + 1)``.  A Gauss-Legendre rule
    with ``jmax // 2 + 1`` points is exact for every degree up to ``jmax``.
    """
    uppers = np.atleast_1d(np.asarray(uppers, dtype=float))
    g, w = _legendre_rule(jmax // 2 + 1)
    half = 0.5 * (uppers - basis.lower)
    pts = basis.lower + half[:, None] * (g[None, :] + 1.0)
    vals = basis.eval_all(jmax, pts)
    return np.einsum("p,upj->uj", w, vals) * half[:, None]


def integrate_basis(basis: GegenbauerBasis, j: int, upper):
    """Definite integral of the degree-``j`` member from the left end to ``upper``."""
    out = basis_integrals(basis, j, upper)[:, j]
    return out if np.ndim(upper) else float(out[0])


def first_order_rows(ns: NodeSet, uppers) -> np.ndarray:
    """First-order S-matrix rows of the rule ``ns`` for the given upper limits.

    Entry ``[i, k] = w_k sum_j C_j(x_k) / lambda_j * int C_j`` with the integral
    taken from the left end of the interval to ``uppers[i]``.
    """
    n = ns.n
    basis = ns.basis
    inv = np.array([1.0 / basis.norm_sq(j) for j in range(n + 1)])
    ints = basis_integrals(basis, n, uppers)
    vals = basis.eval_all(n, ns.nodes)
    return ((ints * inv) @ vals.T) * ns.weights


def cardinal_integrals(nodes, lower: float, uppers) -> np.ndarray:
    """Integrals of the Lagrange cardinal polynomials of ``nodes`` from ``lower`` to each upper limit.

    Uses the product form of the cardinal polynomials, so the result does not
    depend on the normalization of any orthogonal family.  Equal in exact
    arithmetic to :func:`first_order_rows` for the Gauss rule with these nodes.
    """
    z = np.asarray(nodes, dtype=float)
    uppers = np.atleast_1d(np.asarray(uppers, dtype=float))
    return _cardinal_rows(np.broadcast_to(z, (uppers.size, z.size)), lower, uppers)


def _cardinal_rows(z: np.ndarray, lower: float, uppers: np.ndarray) -> np.ndarray:
    # Row r integrates the cardinal polynomials of nodes z[r] up to uppers[r].
    m = z.shape[1] - 1
    g, w = _legendre_rule(m // 2 + 1)
    half = 0.5 * (uppers - lower)
    pts = lower + half[:, None] * (g[None, :] + 1.0)
    gap = z[:, :, None] - z[:, None, :]
    idx = np.arange(m + 1)
    gap[:, idx, idx] = 1.0
    # ratio[r, p, k, j] = (x - z_j) / (z_k - z_j), with 1 where j == k.
    ratio = (pts[:, :, None, None] - z[:, None, None, :]) / gap[:, None]
    ratio[..., idx, idx] = 1.0
    card = np.prod(ratio, axis=-1)
    return np.einsum("p,rpk->rk", w, card) * half[:, None]


@dataclass(frozen=True)
class SMatrix:
    """S-matrix of order ``order`` on [0, length].

    ``entries`` has one row per upper limit in ``upper`` and one column per node
    of ``nodeset``.  Square unless extra upper limits were requested.
    """

    order: int
    entries: np.ndarray
    alpha: float
    length: float
    nodeset: NodeSet
    upper: np.ndarray

    def apply(self, samples) -> np.ndarray:
        return self.entries @ np.asarray(samples, dtype=float)


def build_smatrix(alpha: float, n: int, L: float, q: int = 1, upper=None) -> SMatrix:
    """S-matrix of order ``q`` on [0, L] with ``n + 1`` Gauss nodes.

    Args:
        alpha: Gegenbauer parameter of the nodes.
        n: Nodes are the ``n + 1`` zeros of the degree ``n + 1`` member.
        L: Interval length.
        q: Integration order.
        upper: Upper integration limits in [0, L]; defaults to the nodes.
    """
    if n < 0 or q < 1:
        raise ValueError("need n >= 0 and q >= 1")
    if not L > 0:
        raise ValueError("L must be positive")
    std = gauss_nodes(alpha, n)
    ns = shift_nodeset(std, L)
    upper = ns.nodes.copy() if upper is None else np.atleast_1d(np.asarray(upper, dtype=float))
    if q == 1:
        entries = first_order_rows(ns, upper)
    else:
        half = L / 2.0
        upper_std = upper / half - 1.0
        first = first_order_rows(std, upper_std)
        diff = upper_std[:, None] - std.nodes[None, :]
        entries = half**q * diff ** (q - 1) / math.factorial(q - 1) * first
    return SMatrix(q, entries, std.alpha, float(L), ns, upper)


def _monic_top(alphas: np.ndarray, deg: int, y: np.ndarray, derivs: int = 0):
    # Monic member of degree deg at y, broadcasting alphas against y.  With
    # derivs > 0 a tuple with the alpha-derivatives up to that order.
    p0 = np.ones(np.broadcast_shapes(np.shape(alphas), np.shape(y)))
    p1 = p0 * y if deg else p0
    if not derivs:
        for b in monic_table(alphas, deg):
            p0, p1 = p1, y * p1 - b * p0
        return p1
    zero = np.zeros_like(p0)
    if deg == 0:
        return (p0,) + (zero,) * derivs
    tables = monic_table(alphas, deg, derivs=2)
    # Value, first and second alpha-derivative stacked on a leading axis; the
    # operation order matches the unstacked three-term recurrences.
    prev = np.stack([p0, zero, zero])
    cur = np.stack([p1, zero, zero])
    for b, db, ddb in zip(*tables):
        nxt = y * cur - b * prev
        nxt[1] -= db * prev[0]
        nxt[2] -= 2.0 * db * prev[1]
        nxt[2] -= ddb * prev[0]
        prev, cur = cur, nxt
    return tuple(cur[: derivs + 1])


def eta(alpha, L: float, m: int, x_i: float):
    """Error coefficient ``2^m / K_{m+1} * int_0^{x_i} C_{L,m+1}``.

    ``alpha`` may be an array, in which case the result has the same shape.
    """
    scalar = np.ndim(alpha) == 0
    alphas = np.atleast_1d(np.asarray(alpha, dtype=float))
    if np.any(alphas <= -0.5):
        raise ValueError("alpha must exceed -1/2")
    deg = m + 1
    g, w = _legendre_rule(deg // 2 + 1)
    half = 0.5 * x_i
    y = 2.0 * (half * (g + 1.0)) / L - 1.0
    # C_{m+1} / K_{m+1} is the monic member.
    out = (_monic_top(alphas[:, None], deg, y) @ w) * half * 2.0**m
    return float(out[0]) if scalar else out.reshape(np.shape(alpha))


@dataclass(frozen=True)
class SearchConfig:
    """Settings for the per-node parameter search.

    The search runs over ``t`` with ``alpha = t^2 - 1/2 + eps``; ``alpha_max``
    fixes the upper end of the ``t`` range.
    """

    alpha_max: float = 20.0
    grid: int = 401
    xtol: float = 1e-12
    maxiter: int = 200
    eps: float = 3 * EPS

    def to_alpha(self, t):
        return np.asarray(t) ** 2 - 0.5 + self.eps

    @property
    def t_max(self) -> float:
        return math.sqrt(self.alpha_max + 0.5 - self.eps)


@dataclass(frozen=True)
class AlphaSearch:
    """Outcome of one parameter search."""

    alpha: float
    t: float
    eta: float
    converged: bool
    degenerate: bool = False
    iterations: int = 0


def _scan(ts: np.ndarray, etas: np.ndarray, floor: np.ndarray):
    # Cell [ts[j], ts[j+1]] of the first zero crossing, else the argmin bracket.
    # Rows whose eta never rises above the roundoff floor are flagged flat.
    rows = np.arange(etas.shape[0])
    flat = ~np.any(np.abs(etas) > floor, axis=1)
    change = np.sign(etas[:, :-1]) * np.sign(etas[:, 1:]) <= 0
    crossing = change.any(axis=1)
    first = np.argmax(change, axis=1)
    best = np.argmin(etas**2, axis=1)
    lo = np.where(crossing, ts[first], ts[np.maximum(best - 1, 0)])
    hi = np.where(crossing, ts[np.minimum(first + 1, ts.size - 1)], ts[np.minimum(best + 1, ts.size - 1)])
    return lo, hi, crossing & ~flat, flat, ts[best], etas[rows, best]


def search_alpha(L: float, m: int, x_i: float, search: SearchConfig | None = None) -> AlphaSearch:
    """Minimize ``eta^2`` over ``alpha > -1/2`` for the node ``x_i``.

    A scan over ``t`` comes first.  If ``eta`` changes sign, every zero is a
    global minimizer and the smallest one is taken, refined with Brent's root
    finder; otherwise a bounded Brent minimization refines the best cell.
    """
    search = search or SearchConfig()
    if not 0.0 <= x_i <= L * (1 + 1e-14):
        raise ValueError(f"integration node {x_i} outside [0, {L}]")
    ts = np.linspace(0.0, search.t_max, search.grid)
    etas = eta(search.to_alpha(ts), L, m, x_i)
    floor = _eta_grid(search, L, m, np.array([float(x_i)]))[2]
    lo, hi, crossing, flat, t_grid, e_grid = (v[0] for v in _scan(ts, etas[None, :], floor))
    if flat:
        logger.warning("eta vanishes identically at x=%g; returning alpha=0", x_i)
        return AlphaSearch(0.0, math.sqrt(0.5 - search.eps), 0.0, True, degenerate=True)

    def signed(t):
        return float(eta(float(search.to_alpha(t)), L, m, x_i))

    if crossing:
        if signed(lo) == 0.0:
            t_best, its, converged = float(lo), 0, True
        else:
            t_best, res = brentq(signed, lo, hi, xtol=search.xtol, maxiter=search.maxiter, full_output=True, disp=False)
            its, converged = res.function_calls, bool(res.converged)
    else:
        res = minimize_scalar(
            lambda t: signed(t) ** 2,
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": search.xtol, "maxiter": search.maxiter},
        )
        t_best, its, converged = float(res.x), int(res.nfev), bool(res.success)
        # Ties go to the smaller t of the grid point.
        if res.fun >= e_grid**2:
            t_best = float(t_grid)
    if not converged:
        logger.warning("alpha search hit the iteration cap at x=%g; keeping best value", x_i)
    alpha = float(search.to_alpha(t_best))
    return AlphaSearch(alpha, float(t_best), float(eta(alpha, L, m, x_i)), converged, False, int(its))


class _EtaRows:
    # eta for row i at parameters alphas[i, k] (or alphas[0, k] for every row),
    # with the quadrature geometry of each row computed once.

    def __init__(self, L: float, m: int, xs: np.ndarray):
        self.deg = m + 1
        g, self.w = _legendre_rule(self.deg // 2 + 1)
        half = 0.5 * xs[:, None, None]
        self.y = 2.0 * (half * (g + 1.0)) / L - 1.0
        self.scale = half[:, :, 0] * 2.0**m

    def __call__(self, alphas: np.ndarray, derivs: int = 0):
        out = _monic_top(alphas[:, :, None], self.deg, self.y, derivs)
        if not derivs:
            return (out @ self.w) * self.scale
        return tuple((v @ self.w) * self.scale for v in out)


def _eta_rows(alphas: np.ndarray, L: float, m: int, xs: np.ndarray, derivs: int = 0):
    return _EtaRows(L, m, xs)(alphas, derivs)


def _chebyshev_coefficients(alphas: np.ndarray, deg: int) -> np.ndarray:
    # Chebyshev coefficients of the monic member of degree deg, one row per
    # parameter; multiplication by y maps T_j to (T_{j-1} + T_{j+1}) / 2.
    c0 = np.zeros((alphas.size, deg + 1))
    c0[:, 0] = 1.0
    if deg == 0:
        return c0
    c1 = np.zeros_like(c0)
    c1[:, 1] = 1.0
    for b in monic_table(alphas, deg):
        yc = np.zeros_like(c1)
        yc[:, 1:] += 0.5 * c1[:, :-1]
        yc[:, :-1] += 0.5 * c1[:, 1:]
        yc[:, 1] += 0.5 * c1[:, 0]
        c0, c1 = c1, yc - b[:, None] * c0
    return c1


def _chebyshev_moments(L: float, m: int, xs: np.ndarray) -> np.ndarray:
    # 2^m times the integral of T_j(2x/L - 1) over [0, x_i], per row.
    deg = m + 1
    g, w = _legendre_rule(deg // 2 + 1)
    half = 0.5 * xs[:, None]
    y = 2.0 * (half * (g + 1.0)) / L - 1.0
    return (np.polynomial.chebyshev.chebvander(y, deg) * w[None, :, None]).sum(axis=1) * half * 2.0**m


@lru_cache(maxsize=64)
def _grid_table(search: "SearchConfig", deg: int) -> tuple[np.ndarray, np.ndarray, float]:
    # Search grid in t, Chebyshev coefficients of the monic member at each grid
    # parameter, and the largest coefficient sum on a coarse subgrid.
    ts = np.linspace(0.0, search.t_max, search.grid)
    coeffs = _chebyshev_coefficients(search.to_alpha(ts), deg)
    total = float(np.abs(coeffs[::_COARSE]).sum(axis=1).max())
    ts.flags.writeable = False
    coeffs.flags.writeable = False
    return ts, coeffs, total


def _eta_grid(search: "SearchConfig", L: float, m: int, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Search grid, ``eta`` for every row at every grid parameter, and a roundoff floor per row."""
    ts, coeffs, total = _grid_table(search, m + 1)
    etas = _chebyshev_moments(L, m, xs) @ coeffs.T
    # |T_j| <= 1 bounds the integrand by the coefficient sum.
    return ts, etas, (_NOISE * 2.0**m * total) * xs[:, None]


_NOISE = 100 * EPS
_COARSE = 20



def _rtsafe(fun, lo, hi, flo, fhi, tol, maxiter):
    # Newton steps kept inside a shrinking bracket, bisection when a step would
    # leave it; vectorized over rows.  ``fun(a)`` returns (h, dh/da) and
    # ``tol(a)`` the step size accepted as converged.  Starts at the secant
    # point of the bracket.
    denom = np.where(fhi != flo, fhi - flo, 1.0)
    a = np.where(fhi != flo, (lo * fhi - hi * flo) / denom, 0.5 * (lo + hi))
    a = np.where((a > lo) & (a < hi), a, 0.5 * (lo + hi))
    done = hi <= lo
    its = 0
    while its < maxiter and not done.all():
        h, dh = fun(a)
        its += 1
        same = np.sign(h) == np.sign(flo)
        lo = np.where(done, lo, np.where(same, a, lo))
        hi = np.where(done, hi, np.where(same, hi, a))
        flo = np.where(done | ~same, flo, h)
        safe = np.where(dh != 0.0, dh, 1.0)
        step = np.where(dh != 0.0, h / safe, np.inf)
        # A converged Newton step may land a hair outside the updated bracket.
        hit = (h == 0.0) | (np.abs(step) <= tol(a))
        new = a - step
        bad = ~np.isfinite(new) | (new <= lo) | (new >= hi)
        new = np.where(bad & ~hit, 0.5 * (lo + hi), new)
        a = np.where(done | (h == 0.0), a, new)
        mid = 0.5 * (lo + hi)
        done = done | hit | (hi - lo <= tol(a)) | (mid <= lo) | (mid >= hi)
    return a, its, done


def search_alphas(L: float, m: int, xs, search: SearchConfig | None = None) -> list[AlphaSearch]:
    """Batched form of :func:`search_alpha` for many nodes at once.

    Same selection rule, but the scan is shared and the refinements run in
    lockstep over the rows: safeguarded Newton in ``alpha`` on ``eta`` where it
    crosses zero, and on ``eta * d eta / d alpha`` elsewhere, with analytic
    derivatives throughout.
    """
    search = search or SearchConfig()
    xs = np.asarray(xs, dtype=float).ravel()
    if np.any(xs < 0.0) or np.any(xs > L * (1 + 1e-14)):
        raise ValueError(f"integration nodes must lie in [0, {L}]")
    if xs.size == 0:
        return []
    rows = _EtaRows(L, m, xs)
    ts, etas, floor = _eta_grid(search, L, m, xs)
    lo, hi, crossing, flat, t_grid, e_grid = _scan(ts, etas, floor)
    # One refinement for every row: the zero of eta on crossing rows, the zero
    # of eta * d eta / d alpha (a stationary point of eta^2) on the others.
    e_ends, d_ends = rows(search.to_alpha(np.stack([lo, hi], axis=1)), derivs=1)
    e_lo, e_hi = e_ends.T
    d_lo, d_hi = d_ends.T
    g_lo = np.where(crossing, e_lo, e_lo * d_lo)
    g_hi = np.where(crossing, e_hi, e_hi * d_hi)
    hi = np.where(crossing & (g_lo == 0.0), lo, hi)
    inner = ~crossing & ~flat & (g_lo < 0.0) & (g_hi > 0.0)
    active = (crossing | inner) & (hi > lo)
    # Rows without an interior stationary point take the better endpoint.
    edge = np.where(e_lo**2 <= e_hi**2, lo, hi)
    lo = np.where(active | crossing, lo, edge)
    hi = np.where(active | crossing, hi, edge)

    def h(alpha):
        e, d, dd = (v[:, 0] for v in rows(alpha[:, None], derivs=2))
        return np.where(crossing, e, e * d), np.where(crossing, d, d * d + e * dd)

    def tol(alpha):
        # Image of the t tolerance under alpha = t^2 - 1/2 + eps, but never
        # finer than alpha itself can resolve.
        t = np.sqrt(np.maximum(alpha + 0.5 - search.eps, 0.0))
        return np.maximum(search.xtol * (2.0 * t + search.xtol), 4.0 * np.spacing(alpha))

    a_lo, a_hi = search.to_alpha(lo), search.to_alpha(hi)
    a_best, its, ok = _rtsafe(h, a_lo, a_hi, np.where(active, g_lo, -1.0), np.where(active, g_hi, 1.0), tol, search.maxiter)
    t_best = np.sqrt(np.clip(a_best + 0.5 - search.eps, lo**2, hi**2))
    t_best = np.where(active, t_best, lo)
    # A stationary point worse than the grid value is not the minimum we want;
    # keep the grid point then.
    etas_best = rows(search.to_alpha(t_best)[:, None])[:, 0]
    keep = ~crossing & (etas_best**2 >= e_grid**2)
    t_best = np.where(keep, t_grid, t_best)
    etas_best = np.where(keep, e_grid, etas_best)
    iters = np.full(xs.size, its + 2)
    if not ok.all():
        logger.warning("alpha search hit the iteration cap on %d rows", int((~ok).sum()))
    alphas = search.to_alpha(t_best)
    out = []
    for i, x in enumerate(xs):
        if flat[i]:
            logger.warning("eta vanishes identically at x=%g; returning alpha=0", x)
            out.append(AlphaSearch(0.0, math.sqrt(0.5 - search.eps), 0.0, True, degenerate=True))
        else:
            out.append(AlphaSearch(float(alphas[i]), float(t_best[i]), float(etas_best[i]), bool(ok[i]), False, int(iters[i])))
    return out


def optimize_alpha(L: float, m: int, x_i: float, search: SearchConfig | None = None) -> float:
    """Optimal Gegenbauer parameter for integrating over ``[0, x_i]`` with degree ``m``."""
    return search_alpha(L, m, x_i, search).alpha


@dataclass(frozen=True)
class OptimalSMatrix:
    """Optimal S-matrix with one Gegenbauer parameter per row.

    ``adjoint[i]`` holds the shifted Gauss rule of row ``i``; ``entries[i, k]``
    weights the sample of the integrand at ``adjoint[i].nodes[k]``.
    """

    order: int
    entries: np.ndarray
    first: np.ndarray
    alphas: np.ndarray
    adjoint: tuple
    nodes: np.ndarray
    L: float
    m: int
    flags: tuple = field(default=())

    @property
    def adjoint_nodes(self) -> np.ndarray:
        """Matrix of adjoint nodes; row ``i`` belongs to integration node ``i``."""
        return np.stack([ns.nodes for ns in self.adjoint])

    def with_order(self, q: int) -> "OptimalSMatrix":
        """Same rows and parameters at integration order ``q``."""
        return replace(self, order=q, entries=_raise_order(self.first, self.nodes, self.adjoint_nodes, q))

    def apply(self, f) -> np.ndarray:
        """Integrate the callable ``f`` over ``[0, x_i]`` for every row."""
        return np.sum(self.entries * np.asarray(f(self.adjoint_nodes), dtype=float), axis=1)


def _raise_order(first: np.ndarray, nodes: np.ndarray, z: np.ndarray, q: int) -> np.ndarray:
    if q not in (1, 2):
        raise ValueError("optimal S-matrices are provided for q in {1, 2}")
    if q == 1:
        return first.copy()
    return (nodes[:, None] - z) * first


def build_optimal_smatrix(
    n: int,
    m: int,
    L: float,
    integration_nodes,
    q: int = 1,
    search: SearchConfig | None = None,
) -> OptimalSMatrix:
    """Optimal S-matrix with ``n + 1`` rows and ``m + 1`` columns.

    Args:
        n: Number of rows minus one; must match ``integration_nodes``.
        m: Degree of the interpolant used in every row.
        L: Interval length.
        integration_nodes: Upper limits ``x_i`` in [0, L].
        q: Integration order, 1 or 2.
        search: Parameter search settings.
    """
    nodes = np.asarray(integration_nodes, dtype=float)
    if nodes.shape != (n + 1,):
        raise ValueError(f"expected {n + 1} integration nodes, got shape {nodes.shape}")
    if m < 0:
        raise ValueError("m must be nonnegative")
    alphas, adjoint, flags = [], [], []
    for i, res in enumerate(search_alphas(L, m, nodes, search)):
        if res.degenerate or not res.converged:
            flags.append((i, "degenerate" if res.degenerate else "not converged"))
        alphas.append(res.alpha)
        adjoint.append(shift_nodeset(gauss_nodes(res.alpha, m), L))
    z = np.stack([ns.nodes for ns in adjoint])
    # Product form of the cardinal functions; the orthogonal-sum form loses
    # all accuracy as alpha approaches -1/2.
    first = _cardinal_rows(z, 0.0, nodes)
    return OptimalSMatrix(
        order=q,
        entries=_raise_order(first, nodes, z, q),
        first=first,
        alphas=np.array(alphas),
        adjoint=tuple(adjoint),
        nodes=nodes,
        L=float(L),
        m=int(m),
        flags=tuple(flags),
    )


def max_poly_bound(alpha: float, n: int) -> float:
    """Bound on ``max |C_{L,n}|`` over [0, L].

    Equal to 1 for ``alpha >= 0``.  For negative ``alpha`` the even-degree value is
    attained at the midpoint; the odd-degree value is a strict upper bound.
    """
    alpha = check_alpha(alpha)
    if alpha >= 0 or n == 0:
        return 1.0
    ratio = math.exp(math.lgamma(n + 1) + math.lgamma(2 * alpha) - math.lgamma(n + 2 * alpha))
    if n % 2 == 0:
        return ratio * abs(binom(n / 2 + alpha - 1, n / 2))
    h = (n - 1) / 2
    return 2 * ratio * abs(alpha) / math.sqrt(n * (2 * alpha + n)) * abs(binom(h + alpha, h))


@dataclass(frozen=True)
class QuadratureErrorReport:
    """Error estimate for integrating over ``[0, x_i]`` with degree ``m``.

    ``bound`` is the leading-term estimate built from ``eta``; ``uniform_bound``
    replaces the integral of the node polynomial by ``x_i`` times its maximum and
    is a guaranteed bound.
    """

    x_i: float
    alpha: float
    m: int
    eta: float
    bound: float
    uniform_bound: float
    observed: float | None = None


def error_formula(alpha: float, L: float, m: int, x_i: float, A: float, observed=None) -> QuadratureErrorReport:
    """Leading-term error estimate and uniform bound for a derivative bound ``A``."""
    if A < 0:
        raise ValueError("derivative bound must be nonnegative")
    alpha = check_alpha(alpha)
    e = eta(alpha, L, m, x_i)
    scale = (L / 2.0) ** (m + 1) * A / (2.0**m * math.factorial(m + 1))
    uniform = scale * 2.0**m / leading_coefficient(alpha, m + 1) * x_i * max_poly_bound(alpha, m + 1)
    return QuadratureErrorReport(float(x_i), alpha, m, e, scale * abs(e), uniform, observed)
