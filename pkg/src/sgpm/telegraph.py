"""Collocation solver for the telegraph equation on ``[0, l] x [0, tau]``.

    u_tt + beta1 u_t + beta2 u = u_xx + f(x, t)
    u(x, 0) = g1(x),  u_t(x, 0) = g2(x),  u(0, t) = h1(t),  u(l, t) = h2(t)

The unknown is ``phi = u_xx``.  Integrating twice in space and time turns the
problem into an integral equation for ``phi``; ``u`` is recovered through the
operator ``J`` (double integral in ``x`` with the boundary terms removed) plus
the linear boundary lift ``psi``.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from sgpm.gegenbauer import GegenbauerBasis, NodeSet, gauss_nodes, shift_nodeset
from sgpm.interpolation import BivariateInterpolant, forward_transform_2d
from sgpm.quadrature import OptimalSMatrix, SearchConfig, SMatrix, build_optimal_smatrix, build_smatrix

logger = logging.getLogger(__name__)


def sample(fn: Callable, *args) -> np.ndarray:
    """Call ``fn`` on arrays and broadcast the result to the argument shape."""
    args = [np.asarray(a, dtype=float) for a in args]
    shape = np.broadcast(*args).shape
    out = np.asarray(fn(*args), dtype=float)
    return np.broadcast_to(out, shape).copy()


@dataclass(frozen=True)
class TelegraphProblem:
    """Problem data.  Every function must accept numpy arrays."""

    beta1: float
    beta2: float
    f: Callable
    g1: Callable
    g2: Callable
    h1: Callable
    h2: Callable
    l: float = 1.0
    tau: float = 1.0
    name: str = "custom"
    exact: Callable | None = None

    def __post_init__(self):
        if not (self.l > 0 and self.tau > 0):
            raise ValueError(f"domain lengths must be positive, got l={self.l}, tau={self.tau}")

    def advisories(self, tol: float = 1e-10) -> list[str]:
        """Mismatches between initial and boundary data at the two corners."""
        out = []
        for x, h, label in ((0.0, self.h1, "g1(0) vs h1(0)"), (self.l, self.h2, "g1(l) vs h2(0)")):
            gap = abs(float(sample(self.g1, x)) - float(sample(h, 0.0)))
            if gap > tol:
                out.append(f"{label} differ by {gap:.3e}")
        return out

    def check_compatibility(self) -> list[str]:
        notes = self.advisories()
        for note in notes:
            warnings.warn(f"incompatible data: {note}", stacklevel=2)
        return notes


def kappa(problem: TelegraphProblem, x, t):
    """Initial-data term ``(beta1 t + 1) g1(x) + t g2(x)``."""
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    return (problem.beta1 * t + 1.0) * sample(problem.g1, x) + t * sample(problem.g2, x)


def psi(problem: TelegraphProblem, x, t):
    """Linear lift of the boundary data, ``theta h2(t) + (1 - theta) h1(t)`` with ``theta = x / l``.

    Written in this form so ``psi(0, t)`` and ``psi(l, t)`` return ``h1`` and ``h2``
    without rounding.
    """
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    theta = x / problem.l
    return theta * sample(problem.h2, t) + (1.0 - theta) * sample(problem.h1, t)


@dataclass(frozen=True)
class Discretization:
    """Grids and integration matrices shared by assembly and reconstruction.

    ``px2`` is the second-order S-matrix in ``x`` with ``nx + 2`` rows: one per
    grid node plus a final row for the upper limit ``l``.
    """

    nx: int
    nt: int
    mt: int
    alpha: float
    l: float
    tau: float
    ns_x: NodeSet
    ns_t: NodeSet
    px2: SMatrix
    pt1: SMatrix
    pt2: SMatrix
    opt1: OptimalSMatrix
    opt2: OptimalSMatrix

    @property
    def size(self) -> int:
        return (self.nx + 1) * (self.nt + 1)

    @property
    def theta(self) -> np.ndarray:
        return self.ns_x.nodes / self.l

    @property
    def jmat(self) -> np.ndarray:
        """Discrete ``J``: ``J[i, s] = p2[i, s] - theta_i p2[nx + 1, s]``."""
        p = self.px2.entries
        return p[: self.nx + 1] - self.theta[:, None] * p[self.nx + 1][None, :]

    def index(self, i, j):
        return index(i, j, self.nx)


def index(i, j, nx: int):
    """Position of the unknown at ``(x_i, t_j)`` in the flattened system."""
    return i + j * (nx + 1)


def discretize(
    nx: int,
    nt: int,
    mt: int | None = None,
    alpha: float = 0.0,
    l: float = 1.0,
    tau: float = 1.0,
    search: SearchConfig | None = None,
) -> Discretization:
    """Build every matrix the solver needs.

    Args:
        nx, nt: Grid sizes; the grid has ``(nx + 1) x (nt + 1)`` Gauss nodes.
        mt: Degree of the optimal time quadrature; defaults to ``nt``.
        alpha: Gegenbauer parameter of the collocation grid.
        l, tau: Domain lengths.
        search: Settings of the per-row parameter search.
    """
    if min(nx, nt) < 0:
        raise ValueError("grid sizes must be nonnegative")
    mt = nt if mt is None else mt
    if mt < 0:
        raise ValueError("mt must be nonnegative")
    ns_x = shift_nodeset(gauss_nodes(alpha, nx), l)
    ns_t = shift_nodeset(gauss_nodes(alpha, nt), tau)
    px2 = build_smatrix(alpha, nx, l, q=2, upper=np.append(ns_x.nodes, l))
    pt1 = build_smatrix(alpha, nt, tau, q=1)
    pt2 = build_smatrix(alpha, nt, tau, q=2)
    opt1 = build_optimal_smatrix(nt, mt, tau, ns_t.nodes, q=1, search=search)
    opt2 = opt1.with_order(2)
    return Discretization(nx, nt, mt, ns_x.alpha, float(l), float(tau), ns_x, ns_t, px2, pt1, pt2, opt1, opt2)


@dataclass(frozen=True)
class CollocationSystem:
    """Dense system ``A phi = rhs``; unknowns ordered by :func:`index`."""

    A: np.ndarray
    rhs: np.ndarray
    nx: int
    nt: int

    def index(self, i, j):
        return index(i, j, self.nx)


@dataclass
class OpCounter:
    """Multiplication and division tally for the reference assembly."""

    matrix: int = 0
    rhs: int = 0


def _rhs_samples(problem: TelegraphProblem, disc: Discretization):
    xg = disc.ns_x.nodes
    tg = disc.ns_t.nodes
    z = disc.opt1.adjoint_nodes
    psi_hat = kappa(problem, xg[:, None], tg[None, :]) - psi(problem, xg[:, None], tg[None, :])
    psi_z = psi(problem, xg[:, None, None], z[None, :, :])
    f_z = sample(problem.f, xg[:, None, None], z[None, :, :])
    return psi_hat, psi_z, f_z


def assemble(problem: TelegraphProblem, disc: Discretization) -> CollocationSystem:
    """Collocation matrix and right-hand side.

    Produces the same floating point values as :func:`assemble_reference`;
    each entry goes through the same operations in the same order.
    """
    nx, nt = disc.nx, disc.nt
    p1 = disc.pt1.entries
    p2 = disc.pt2.entries
    jm = disc.jmat
    tfac = problem.beta1 * p1 + problem.beta2 * p2
    A = np.kron(tfac + np.eye(nt + 1), jm) - np.kron(p2, np.eye(nx + 1))

    q1 = disc.opt1.entries
    q2 = disc.opt2.entries
    psi_hat, psi_z, f_z = _rhs_samples(problem, disc)
    s1 = np.zeros((nx + 1, nt + 1))
    s2 = np.zeros((nx + 1, nt + 1))
    sf = np.zeros((nx + 1, nt + 1))
    for k in range(disc.mt + 1):
        s1 = s1 + q1[:, k] * psi_z[:, :, k]
    for k in range(disc.mt + 1):
        s2 = s2 + q2[:, k] * psi_z[:, :, k]
    for k in range(disc.mt + 1):
        sf = sf + q2[:, k] * f_z[:, :, k]
    rhs = psi_hat - (problem.beta1 * s1 + problem.beta2 * s2) + sf
    # rhs[i, j] -> position index(i, j)
    return CollocationSystem(A, rhs.T.reshape(-1), nx, nt)


def assemble_reference(
    problem: TelegraphProblem, disc: Discretization, counter: OpCounter | None = None
) -> CollocationSystem:
    """Entry-by-entry assembly following the row loop of the reference algorithm.

    Slow; kept for verification and for counting multiplications and divisions.
    """
    nx, nt, mt = disc.nx, disc.nt, disc.mt
    b1, b2 = problem.beta1, problem.beta2
    p = disc.px2.entries
    p1 = disc.pt1.entries
    p2 = disc.pt2.entries
    q1 = disc.opt1.entries
    q2 = disc.opt2.entries
    psi_hat, psi_z, f_z = _rhs_samples(problem, disc)
    c = counter if counter is not None else OpCounter()

    size = nx + nt + nx * nt
    c.matrix += 1
    A = np.zeros((size + 1, size + 1))
    rhs = np.zeros(size + 1)
    top = nx + 1

    def idx(i, j):
        c.matrix += 1
        return i + j * (nx + 1)

    for i in range(nx + 1):
        theta = disc.ns_x.nodes[i] / disc.l
        c.matrix += 1
        for j in range(nt + 1):
            n = idx(i, j)
            A[n, n] = (p[i, i] - theta * p[top, i]) * (b1 * p1[j, j] + b2 * p2[j, j] + 1.0) - p2[j, j]
            c.matrix += 4
            for k in range(nx + 1):
                if k != i:
                    A[n, idx(k, j)] = (p[i, k] - theta * p[top, k]) * (b1 * p1[j, j] + b2 * p2[j, j] + 1.0)
                    c.matrix += 4
            for k in range(nt + 1):
                if k != j:
                    A[n, idx(i, k)] = (p[i, i] - theta * p[top, i]) * (b1 * p1[j, k] + b2 * p2[j, k]) - p2[j, k]
                    c.matrix += 4
                    for s in range(nx + 1):
                        if s != i:
                            A[n, idx(s, k)] = (p[i, s] - theta * p[top, s]) * (b1 * p1[j, k] + b2 * p2[j, k])
                            c.matrix += 4
            s1 = s2 = sf = 0.0
            for k in range(mt + 1):
                s1 = s1 + q1[j, k] * psi_z[i, j, k]
            for k in range(mt + 1):
                s2 = s2 + q2[j, k] * psi_z[i, j, k]
            for k in range(mt + 1):
                sf = sf + q2[j, k] * f_z[i, j, k]
            rhs[n] = psi_hat[i, j] - (b1 * s1 + b2 * s2) + sf
            c.rhs += 3 * (mt + 1) + 2
    return CollocationSystem(A, rhs, nx, nt)


def matrix_op_count(nx: int, nt: int) -> int:
    """Multiplications and divisions spent on the matrix by the reference assembly."""
    return 1 + (1 + nx) * (1 + 5 * (1 + nt) ** 2 * (1 + nx))


def rhs_op_count(nx: int, nt: int, mt: int) -> int:
    return (5 + 3 * mt) * (1 + nt) * (1 + nx)


class SingularSystemError(ArithmeticError):
    """Raised when LU factorization meets a pivot that is zero to working precision."""

    def __init__(self, pivot: float, position: int):
        super().__init__(f"matrix is singular to working precision: pivot {pivot:.3e} at position {position}")
        self.pivot = pivot
        self.position = position


@dataclass(frozen=True)
class SolveInfo:
    residual: float
    min_pivot: float
    pivot_growth: float


def solve(system: CollocationSystem | np.ndarray, rhs=None, *, return_info: bool = False):
    """Solve by LU with partial pivoting.

    Accepts a :class:`CollocationSystem` or a matrix plus right-hand side.
    """
    if isinstance(system, CollocationSystem):
        A, b = system.A, system.rhs
    else:
        A, b = np.asarray(system, dtype=float), np.asarray(rhs, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
        raise ValueError("need a square matrix and a matching right-hand side")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    diag = np.abs(np.diag(lu))
    amax = np.abs(A).max() if A.size else 0.0
    pos = int(np.argmin(diag)) if diag.size else 0
    if diag.size and (diag[pos] == 0.0 or diag[pos] <= A.shape[0] * np.finfo(float).eps * amax):
        raise SingularSystemError(float(diag[pos]), pos)
    x = scipy.linalg.lu_solve((lu, piv), b)
    res = np.abs(A @ x - b).max()
    scale = np.abs(A).sum(axis=1).max() * np.abs(x).max() + np.abs(b).max()
    rel = float(res / scale) if scale > 0 else 0.0
    if rel > 1e-10:
        logger.warning("relative residual %.3e exceeds 1e-10", rel)
    growth = float(np.abs(np.triu(lu)).max() / amax) if amax > 0 else 1.0
    if not return_info:
        return x
    return x, SolveInfo(rel, float(diag[pos]), growth)


@dataclass(frozen=True)
class SolutionField:
    """Solved collocation values of ``phi = u_xx`` and their tensor transform."""

    problem: TelegraphProblem
    disc: Discretization
    phi: np.ndarray
    interp: BivariateInterpolant
    info: SolveInfo | None = None
    timings: dict = field(default_factory=dict)

    @property
    def coeffs(self) -> np.ndarray:
        return self.interp.coeffs

    def __call__(self, x, t):
        return evaluate_solution(self, x, t)


def solve_problem(problem: TelegraphProblem, disc: Discretization) -> SolutionField:
    """Assemble, solve and transform."""
    if abs(disc.l - problem.l) > 0 or abs(disc.tau - problem.tau) > 0:
        raise ValueError("discretization was built for a different domain")
    t0 = time.perf_counter()
    system = assemble(problem, disc)
    t1 = time.perf_counter()
    x, info = solve(system, return_info=True)
    t2 = time.perf_counter()
    phi = x.reshape(disc.nt + 1, disc.nx + 1).T
    interp = forward_transform_2d(phi, disc.ns_x, disc.ns_t)
    timings = {"assemble_s": t1 - t0, "solve_s": t2 - t1}
    return SolutionField(problem, disc, phi, interp, info, timings)


def _poch(a: float, n: int) -> float:
    return math.prod(a + k for k in range(n))


def j_operator_basis(l: float, alpha: float, j: int, x):
    """``J`` applied to the degree-``j`` shifted basis member on [0, l], at ``x``.

    ``J g(x) = int_0^x int_0^s g - (x / l) int_0^l int_0^s g``.  Exact zeros are
    returned at ``x = 0`` and ``x = l``.
    """
    xa = np.asarray(x, dtype=float)
    a = float(alpha)
    if j == 0:
        val = 0.5 * xa * (xa - l)
    elif j == 1:
        val = (l - 2 * xa) * (l - xa) * xa / (6 * l)
    elif j == 2:
        if a == 0.0:
            val = (l - xa) * xa * (l**2 + 4 * l * xa - 4 * xa**2) / (6 * l**2)
        else:
            # The general coefficient form divides by alpha here; this is its
            # simplified limit-free equivalent.
            quad = 2 * a * (l**2 - 2 * l * xa + 2 * xa**2) - (l**2 + 4 * l * xa - 4 * xa**2)
            val = xa * (xa - l) * quad / (6 * l**2 * (2 * a + 1))
    else:
        basis = GegenbauerBasis(a, l, shifted=True)
        cv = basis.eval_all(j + 2, xa)
        nu1 = l**2 / (16 * _poch(a + j - 1, 2) * _poch(2 * a + j - 2, 2))
        nu2 = _poch(j - 1, 2)
        nu3 = 1.0 / (_poch(j + 1, 2) * (a + j + 1))
        nu4 = _poch(2 * a + j - 2, 2)
        nu5 = 2 * _poch(j + 1, 2) * (a + j)
        nu6 = -(a + j - 1) * _poch(2 * a + j, 2)
        wp = (4 / l) * (4 * (a - 2) * a + 3) * _poch(a + j - 1, 3) * ((-1) ** j * (l - xa) + xa)
        val = nu1 * (nu2 * cv[..., j - 2] - nu3 * (nu4 * (nu5 * cv[..., j] + nu6 * cv[..., j + 2]) + wp))
    val = np.where((xa == 0.0) | (xa == l), 0.0, val)
    return val if val.ndim else float(val)


def j_operator_matrix(l: float, alpha: float, nmax: int, x) -> np.ndarray:
    """``J C_{l,n}(x)`` for ``n = 0..nmax``; shape ``x.shape + (nmax + 1,)``."""
    xa = np.asarray(x, dtype=float)
    return np.stack([np.asarray(j_operator_basis(l, alpha, n, xa)) for n in range(nmax + 1)], axis=-1)


def evaluate_solution(field: SolutionField, x, t):
    """Reconstruct ``u`` at broadcast points from the modal coefficients of ``phi``."""
    disc = field.disc
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    jx = j_operator_matrix(disc.l, disc.alpha, disc.nx, x)
    ct = disc.ns_t.basis.eval_all(disc.nt, t)
    u = np.einsum("...n,nm,...m->...", jx, field.coeffs, ct) + psi(field.problem, x, t)
    return u if u.ndim else float(u)


def evaluate_solution_lattice(field: SolutionField, xs, ts) -> np.ndarray:
    """Reconstruct ``u`` on the lattice ``xs x ts``; rows follow ``xs``."""
    disc = field.disc
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    jx = j_operator_matrix(disc.l, disc.alpha, disc.nx, xs)
    ct = disc.ns_t.basis.eval_all(disc.nt, ts)
    return jx @ field.coeffs @ ct.T + psi(field.problem, xs[:, None], ts[None, :])


def evaluate_solution_at_grid(field: SolutionField) -> np.ndarray:
    """``u`` at the collocation grid through the discrete ``J`` matrix."""
    disc = field.disc
    xg = disc.ns_x.nodes
    tg = disc.ns_t.nodes
    return disc.jmat @ field.phi + psi(field.problem, xg[:, None], tg[None, :])
