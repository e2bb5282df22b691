"""Gegenbauer polynomials on [-1, 1] and on the shifted interval [0, L].

The standardization used throughout is ``C_n(1) = 1``.  With it the three-term
recurrence reads

    (n + 2a) C_{n+1}(x) = 2 (n + a) x C_n(x) - n C_{n-1}(x),

and the family stays well defined in the limit ``a -> 0`` where it becomes the
first-kind Chebyshev family.  The weight is ``(1 - x^2)^(a - 1/2)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

logger = logging.getLogger(__name__)

ALPHA_MIN = -0.5
_NEWTON_TOL = 1e-14
_NEWTON_MAXITER = 100


def check_alpha(alpha: float) -> float:
    """Return ``alpha`` as a float or raise if it is outside ``(-1/2, inf)``."""
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= ALPHA_MIN:
        raise ValueError(f"Gegenbauer parameter must satisfy alpha > -1/2, got {alpha!r}")
    return alpha


def leading_coefficient(alpha: float, n: int) -> float:
    """Leading coefficient ``K_n`` of the standard polynomial ``C_n``."""
    alpha = check_alpha(alpha)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n == 0:
        return 1.0
    log_k = (
        (n - 1) * math.log(2.0)
        + math.lgamma(n + alpha)
        + math.lgamma(2 * alpha + 1)
        - math.lgamma(n + 2 * alpha)
        - math.lgamma(alpha + 1)
    )
    return math.exp(log_k)


def norm_squared(alpha: float, n: int) -> float:
    """Squared weighted norm of the standard polynomial ``C_n`` on [-1, 1].

    Every Gamma argument stays positive for ``alpha > -1/2`` so the value is
    continuous through ``alpha = 0``.
    """
    alpha = check_alpha(alpha)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    log_head = (2 * alpha - 1) * math.log(2.0) + 2 * math.lgamma(alpha + 0.5)
    if n == 0:
        return math.exp(log_head + math.log(2.0) - math.lgamma(2 * alpha + 1))
    return math.exp(
        log_head + math.lgamma(n + 1) - math.log(n + alpha) - math.lgamma(n + 2 * alpha)
    )


def _recurrence(alpha: float, nmax: int, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    cols = [np.ones_like(x), x][: nmax + 1]
    for k in range(1, nmax):
        cols.append((2 * (k + alpha) / (k + 2 * alpha)) * x * cols[k] - (k / (k + 2 * alpha)) * cols[k - 1])
    return np.stack(cols, axis=-1)


def monic_step(alpha, k: int):
    """Coefficient ``b_k`` of the monic recurrence ``p_{k+1} = x p_k - b_k p_{k-1}``.

    Unlike the ``C_n(1) = 1`` form it never divides by ``k + 2 alpha``, so it
    stays accurate as ``alpha`` approaches -1/2.  ``alpha`` may be an array.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k == 1:
        return 1.0 / (2.0 * (1.0 + alpha))
    return k * (k + 2.0 * alpha - 1.0) / (4.0 * (k + alpha) * (k + alpha - 1.0))


def monic_table(alpha, deg: int, derivs: int = 0):
    """``b_1 .. b_{deg-1}`` stacked along a new leading axis.

    With ``derivs`` of 1 or 2 a tuple is returned that also holds the first (and
    second) derivatives in ``alpha``.
    """
    a = np.asarray(alpha, dtype=float)
    n = max(deg - 1, 0)
    b = np.empty((n,) + a.shape)
    db = np.empty_like(b)
    ddb = np.empty_like(b)
    if n:
        b[0] = 1.0 / (2.0 * (1.0 + a))
        db[0] = -b[0] / (1.0 + a)
        ddb[0] = 2.0 * b[0] / (1.0 + a) ** 2
    if n > 1:
        # k + a - 1 > 1/2 for k >= 2, so nothing here can vanish.
        k = np.arange(2.0, deg).reshape((-1,) + (1,) * a.ndim)
        u, v, w = k + 2.0 * a - 1.0, k + a, k + a - 1.0
        b[1:] = k * u / (4.0 * v * w)
        if derivs:
            # Logarithmic derivative and its slope.
            ell = 2.0 / u - 1.0 / v - 1.0 / w
            db[1:] = b[1:] * ell
            ddb[1:] = b[1:] * (ell**2 - 4.0 / u**2 + 1.0 / v**2 + 1.0 / w**2)
    return (b, db, ddb)[: derivs + 1] if derivs else b


def _monic_values(alpha: float, n: int, x: np.ndarray) -> np.ndarray:
    # Monic member of degree n, same zeros as C_n.
    p0 = np.ones_like(x)
    if n == 0:
        return p0
    p1 = np.array(x, dtype=float)
    for k in range(1, n):
        p0, p1 = p1, x * p1 - monic_step(alpha, k) * p0
    return p1


def _value_and_slope(alpha: float, n: int, x: float) -> tuple[float, float]:
    # Monic member and its derivative by the differentiated recurrence; used by
    # the root finder.
    if n == 0:
        return 1.0, 0.0
    c0, c1 = 1.0, x
    d0, d1 = 0.0, 1.0
    for k in range(1, n):
        b = monic_step(alpha, k)
        c0, c1, d0, d1 = c1, x * c1 - b * c0, d1, c1 + x * d1 - b * d0
    return c1, d1


def _christoffel(alpha: float, n: int, x: np.ndarray) -> np.ndarray:
    # 1 / sum_j p_j(x)^2 over the orthonormal family, j = 0..n.
    mu0 = math.exp(0.5 * math.log(math.pi) + math.lgamma(alpha + 0.5) - math.lgamma(alpha + 1.0))
    p0 = np.zeros_like(x)
    p1 = np.full_like(x, 1.0 / math.sqrt(mu0))
    total = p1**2
    a_prev = 0.0
    for j in range(n):
        a = math.sqrt(monic_step(alpha, j + 1))
        p0, p1 = p1, (x * p1 - a_prev * p0) / a
        a_prev = a
        total = total + p1**2
    return 1.0 / total


@dataclass(frozen=True)
class GegenbauerBasis:
    """Gegenbauer family on [-1, 1], or on [0, length] when ``shifted``.

    Attributes:
        alpha: Parameter, strictly greater than -1/2.
        length: Interval length. Must be 2 for the standard interval.
        shifted: Whether the family lives on [0, length].
    """

    alpha: float
    length: float = 2.0
    shifted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        if not (self.length > 0 and math.isfinite(self.length)):
            raise ValueError(f"interval length must be positive, got {self.length!r}")
        if not self.shifted and self.length != 2.0:
            raise ValueError("the standard interval has length 2; pass shifted=True")

    @property
    def lower(self) -> float:
        return 0.0 if self.shifted else -1.0

    @property
    def upper(self) -> float:
        return self.lower + self.length

    @property
    def half_length(self) -> float:
        return self.length / 2.0

    def to_standard(self, x):
        x = np.asarray(x, dtype=float)
        if not self.shifted:
            return x
        return 2.0 * x / self.length - 1.0

    def from_standard(self, x):
        x = np.asarray(x, dtype=float)
        if not self.shifted:
            return x
        return self.half_length * (x + 1.0)

    def _flag_outside(self, x: np.ndarray) -> None:
        if logger.isEnabledFor(logging.DEBUG):
            tol = 1e-12 * self.length
            if np.any((x < self.lower - tol) | (x > self.upper + tol)):
                logger.debug("evaluation outside [%g, %g] is untrusted", self.lower, self.upper)

    def eval_all(self, nmax: int, x) -> np.ndarray:
        """Values of degrees ``0..nmax`` at ``x``; shape ``x.shape + (nmax + 1,)``."""
        if nmax < 0:
            raise ValueError("degree must be nonnegative")
        x = np.asarray(x, dtype=float)
        self._flag_outside(x)
        return _recurrence(self.alpha, nmax, self.to_standard(x))

    def eval(self, n: int, x):
        """Value of the degree-``n`` member at ``x``."""
        out = self.eval_all(n, x)[..., n]
        return out if out.ndim else float(out)

    def norm_sq(self, n: int) -> float:
        """Squared weighted norm of the degree-``n`` member."""
        scale = self.half_length ** (2 * self.alpha) if self.shifted else 1.0
        return scale * norm_squared(self.alpha, n)

    def leading(self, n: int) -> float:
        """Leading coefficient of the degree-``n`` member in powers of ``x``."""
        k = leading_coefficient(self.alpha, n)
        return k * (2.0 / self.length) ** n if self.shifted else k

    def norm_table(self, nmax: int) -> "NormTable":
        return NormTable(
            alpha=self.alpha,
            norms=np.array([self.norm_sq(j) for j in range(nmax + 1)]),
            leading=np.array([self.leading(j) for j in range(nmax + 1)]),
        )


@dataclass(frozen=True)
class NormTable:
    """Precomputed squared norms and leading coefficients for degrees 0..n."""

    alpha: float
    norms: np.ndarray
    leading: np.ndarray


@dataclass(frozen=True)
class NodeSet:
    """Gauss nodes and Christoffel weights of one basis.

    ``nodes`` holds ``n + 1`` points, the zeros of the degree ``n + 1`` member,
    in ascending order.
    """

    basis: GegenbauerBasis
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.nodes.size - 1

    @property
    def alpha(self) -> float:
        return self.basis.alpha

    @property
    def length(self) -> float:
        return self.basis.length


def _newton_half(alpha: float, count: int) -> np.ndarray | None:
    half = count // 2
    roots: list[float] = []
    for r in range(half):
        x = math.cos((2 * r + 1) * math.pi / (2 * count))
        converged = False
        for _ in range(_NEWTON_MAXITER):
            f, df = _value_and_slope(alpha, count, x)
            # Deflate the roots already found.
            denom = df - f * sum(1.0 / (x - z) for z in roots)
            if denom == 0.0 or not math.isfinite(denom):
                break
            dx = f / denom
            x -= dx
            if abs(dx) <= _NEWTON_TOL:
                converged = True
                break
        if not converged:
            return None
        roots.append(x)
    pos = np.array(sorted(roots))
    if pos.size and (pos[0] <= 0.0 or pos[-1] > 1.0 or np.any(np.diff(pos) <= 1e-12)):
        return None
    return pos


def _bisect(alpha: float, count: int, a: float, b: float) -> float:
    fa = _value_and_slope(alpha, count, a)[0]
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        fm = _value_and_slope(alpha, count, mid)[0]
        if fm == 0.0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _bracket_half(alpha: float, count: int) -> np.ndarray:
    half = count // 2
    for refine in range(4):
        m = (50 * count + 100) * 4**refine
        # Exclude theta = pi/2 (x = 0), a root when count is odd.
        theta = np.linspace(0.0, math.pi / 2, m)[:-1]
        grid = np.sort(np.cos(theta))
        vals = _monic_values(alpha, count, grid)
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        if idx.size == half:
            return np.array([_bisect(alpha, count, grid[i], grid[i + 1]) for i in idx])
    raise RuntimeError(f"could not bracket the zeros of C_{count} for alpha={alpha}")


@lru_cache(maxsize=512)
def _standard_rule(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    count = n + 1
    pos = _newton_half(alpha, count)
    if pos is None:
        logger.info("Newton root finder rejected for alpha=%g, n=%d; using bisection", alpha, n)
        pos = _bracket_half(alpha, count)
    mid = [0.0] if count % 2 else []
    nodes = np.concatenate([-pos[::-1], mid, pos])
    weights = _christoffel(alpha, n, nodes)
    # Exact symmetry of the weights.
    weights = 0.5 * (weights + weights[::-1])
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def gauss_nodes(alpha: float, n: int) -> NodeSet:
    """Gauss rule on [-1, 1] with ``n + 1`` nodes, the zeros of ``C_{n+1}``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    alpha = check_alpha(alpha)
    nodes, weights = _standard_rule(alpha, int(n))
    return NodeSet(GegenbauerBasis(alpha), nodes, weights)


def shift_nodeset(ns: NodeSet, length: float) -> NodeSet:
    """Map a standard rule to [0, length], scaling weights by ``(length/2)^(2 alpha)``."""
    if ns.basis.shifted:
        raise ValueError("node set is already shifted")
    basis = GegenbauerBasis(ns.alpha, float(length), shifted=True)
    half = basis.half_length
    nodes = half * (ns.nodes + 1.0)
    weights = half ** (2 * ns.alpha) * ns.weights
    return NodeSet(basis, nodes, weights)


def shifted_gauss_nodes(alpha: float, n: int, length: float) -> NodeSet:
    return shift_nodeset(gauss_nodes(alpha, n), length)



def bivariate_eval(basis_x: GegenbauerBasis, basis_t: GegenbauerBasis, n: int, m: int, x, t):
    """Tensor product member ``C_n(x) C_m(t)`` of two bases."""
    out = np.asarray(basis_x.eval(n, x)) * np.asarray(basis_t.eval(m, t))
    return out if out.ndim else float(out)
