"""Error metrics, coefficient bounds and convergence sweeps."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from sgpm.gegenbauer import check_alpha, norm_squared
from sgpm.quadrature import max_poly_bound
from sgpm.telegraph import (
    SolutionField,
    TelegraphProblem,
    discretize,
    evaluate_solution_at_grid,
    evaluate_solution_lattice,
    solve_problem,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ErrorReport:
    """Grid norms of the absolute error matrix plus lattice maximum and RMS."""

    l1: float
    l2: float
    linf: float
    Linf: float
    rms: float
    elapsed: float = 0.0

    def as_dict(self) -> dict:
        return {"l1": self.l1, "l2": self.l2, "linf": self.linf, "Linf": self.Linf, "rms": self.rms}


def _power(G: np.ndarray, v: np.ndarray, tol: float, maxiter: int, squarings: int = 6) -> float:
    # Power steps on M, a normalized power G^(2^s) of G; each stall squares M,
    # which squares the convergence ratio.  Convergence is judged on G itself.
    M = G.copy()
    lam = 0.0
    for _ in range(squarings + 1):
        for _ in range(maxiter):
            w = G @ v
            lam = float(v @ w)
            if lam <= 0.0:
                return 0.0
            # For symmetric G the residual bounds the distance to an eigenvalue.
            if np.linalg.norm(w - lam * v) <= tol * lam:
                return lam
            u = M @ v
            v = u / np.linalg.norm(u)
        M = M @ M
        M /= np.abs(M).max()
    return lam


def spectral_norm(E, tol: float = 1e-10, maxiter: int = 500) -> float:
    """Largest singular value by power iteration on ``E^T E`` from the all-ones vector.

    A run that hits ``maxiter`` continues on the squared iteration matrix.  If
    the result falls below the largest diagonal entry of ``E^T E`` (a lower
    bound for the top eigenvalue, so the start missed the top eigenvector), a
    second run starts from the unit vector at that entry.
    """
    E = np.asarray(E, dtype=float)
    if not E.size or not np.any(E):
        return 0.0
    # Scaling keeps E^T E clear of underflow and overflow.
    scale = float(np.abs(E).max())
    E = E / scale
    G = E.T @ E
    lam = _power(G, np.ones(G.shape[0]) / math.sqrt(G.shape[0]), tol, maxiter)
    k = int(np.argmax(np.diag(G)))
    if lam < G[k, k] * (1 - tol):
        lam = max(lam, _power(G, np.eye(G.shape[0])[k], tol, maxiter))
    return scale * math.sqrt(lam)


def matrix_norms(E) -> tuple[float, float, float]:
    """``(max column sum, spectral norm, max row sum)`` of ``|E|``."""
    E = np.abs(np.asarray(E, dtype=float))
    return float(E.sum(axis=0).max()), spectral_norm(E), float(E.sum(axis=1).max())


def error_matrix(exact: Callable, field: SolutionField) -> np.ndarray:
    """Absolute error at the collocation grid; rows follow ``x``, columns ``t``."""
    disc = field.disc
    xg, tg = disc.ns_x.nodes, disc.ns_t.nodes
    return np.abs(exact(xg[:, None], tg[None, :]) - evaluate_solution_at_grid(field))


def lattice_error(exact: Callable, field: SolutionField, lattice: int = 100) -> np.ndarray:
    """Absolute error on a uniform ``lattice x lattice`` grid covering the closed domain."""
    xs = np.linspace(0.0, field.disc.l, lattice)
    ts = np.linspace(0.0, field.disc.tau, lattice)
    return np.abs(exact(xs[:, None], ts[None, :]) - evaluate_solution_lattice(field, xs, ts))


def rms_error(exact: Callable, field: SolutionField, lattice: int | None = None) -> float:
    """Root mean square error on the collocation grid, or on a uniform lattice if given."""
    E = error_matrix(exact, field) if lattice is None else lattice_error(exact, field, lattice)
    return float(np.sqrt(np.mean(E**2)))


def error_norms(exact: Callable, field: SolutionField, lattice: int = 100) -> ErrorReport:
    E = error_matrix(exact, field)
    l1, l2, linf = matrix_norms(E)
    big = float(lattice_error(exact, field, lattice).max())
    return ErrorReport(l1, l2, linf, big, float(np.sqrt(np.mean(E**2))), sum(field.timings.values()))


def _half_factor(alpha: float, n: int) -> float:
    # (n + a) Gamma(n + 2a) / (Gamma(2a + 1) n!), equal to 1/2 at n = 0
    if n == 0:
        return 0.5
    if n + 2 * alpha < 150:
        return (n + alpha) * math.gamma(n + 2 * alpha) / (math.gamma(2 * alpha + 1) * math.gamma(n + 1))
    return (n + alpha) * math.exp(math.lgamma(n + 2 * alpha) - math.lgamma(2 * alpha + 1) - math.lgamma(n + 1))


def _dimension_factor(alpha: float, n: int) -> float:
    if alpha >= 0:
        return 2.0 * _half_factor(alpha, n)
    # (sum of Christoffel numbers) * max|C_n| / lambda_n on [-1, 1]
    total = math.exp(0.5 * math.log(math.pi) + math.lgamma(alpha + 0.5) - math.lgamma(alpha + 1))
    return total * max_poly_bound(alpha, n) / norm_squared(alpha, n)


def coefficient_bound(alpha: float, n: int, m: int, uxx_bound: float) -> float:
    """Upper bound on ``|phi~_{n,m}|`` given ``sup |u_xx| <= uxx_bound``.

    For ``alpha >= 0`` this equals
    ``4 (n+a)(m+a) Gamma(n+2a) Gamma(m+2a) / (Gamma(2a+1)^2 n! m!) * uxx_bound``,
    read with its limiting value 1/2 per factor at degree 0.
    """
    alpha = check_alpha(alpha)
    return _dimension_factor(alpha, n) * _dimension_factor(alpha, m) * uxx_bound


@dataclass(frozen=True)
class CoefficientCheck:
    n: int
    m: int
    value: float
    bound: float
    passed: bool


def coefficient_bound_check(
    field: SolutionField, alpha: float | None, uxx_bound: float, rtol: float = 1e-12
) -> list[CoefficientCheck]:
    """Compare every solved coefficient against its bound.

    ``rtol`` absorbs rounding where the bound is attained, as for the mean of a
    constant at ``alpha = 0``.
    """
    alpha = field.disc.alpha if alpha is None else alpha
    out = []
    coeffs = field.coeffs
    for n in range(coeffs.shape[0]):
        for m in range(coeffs.shape[1]):
            value = abs(float(coeffs[n, m]))
            bound = coefficient_bound(alpha, n, m, uxx_bound)
            out.append(CoefficientCheck(n, m, value, bound, value <= bound * (1 + rtol)))
    return out


@dataclass(frozen=True)
class SweepRow:
    N: int
    mt: int
    L_plus_1: int
    report: ErrorReport | None
    seconds: float
    alpha_stars: tuple = ()
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: list
    slope: float | None = None

    def successes(self) -> list:
        return [r for r in self.rows if r.report is not None]


def fit_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``ys`` against ``xs``."""
    return float(np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 1)[0])


def timed_solve(problem: TelegraphProblem, N: int, mt: int | None = None, alpha: float = 0.0, nt: int | None = None):
    """Discretize and solve on an ``N x nt`` grid (``nt`` defaults to ``N``).

    Returns the field and the total wall time in seconds.
    """
    t0 = time.perf_counter()
    disc = discretize(N, N if nt is None else nt, mt, alpha=alpha, l=problem.l, tau=problem.tau)
    field = solve_problem(problem, disc)
    total = time.perf_counter() - t0
    field.timings["total_s"] = total
    return field, total


def _sweep_row(problem, exact, N, mt, alpha, lattice) -> SweepRow:
    mt = N if mt is None else mt
    try:
        field, seconds = timed_solve(problem, N, mt, alpha)
        report = error_norms(exact, field, lattice) if exact is not None else None
        return SweepRow(N, mt, (N + 1) ** 2, report, seconds, tuple(field.disc.opt1.alphas.tolist()))
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        logger.warning("sweep row N=%d failed: %s", N, exc)
        return SweepRow(N, mt, (N + 1) ** 2, None, float("nan"), (), str(exc))


def convergence_sweep(
    problem: TelegraphProblem,
    exact: Callable | None,
    N_list: Sequence[int],
    mt_rule: Callable[[int], int] | None = None,
    alpha: float = 0.0,
    lattice: int = 100,
    jobs: int = 1,
) -> SweepResult:
    """Solve for each ``N`` with ``M_t = mt_rule(N)`` (default ``M_t = N``).

    Failed rows are kept with their error message.  The reported slope is the
    least-squares slope of ``log10 E_inf`` against ``N`` over successful rows.
    """
    if not N_list:
        raise ValueError("empty N list")
    rule = mt_rule or (lambda n: n)
    args = [(problem, exact, N, rule(N), alpha, lattice) for N in N_list]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda a: _sweep_row(*a), args))
    else:
        rows = [_sweep_row(*a) for a in args]
    good = [r for r in rows if r.report is not None and r.report.Linf > 0]
    slope = None
    if len(good) >= 2:
        slope = fit_slope([r.N for r in good], [math.log10(r.report.Linf) for r in good])
    return SweepResult(rows, slope)
