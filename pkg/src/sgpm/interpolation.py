"""Discrete Gegenbauer transforms and interpolants in one and two variables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sgpm.gegenbauer import GegenbauerBasis, NodeSet


def _inverse_norms(basis: GegenbauerBasis, n: int) -> np.ndarray:
    return np.array([1.0 / basis.norm_sq(j) for j in range(n + 1)])


def transform_matrix(ns: NodeSet) -> np.ndarray:
    """Matrix ``T`` with ``coeffs = T @ samples`` for the rule ``ns``.

    ``T[j, k] = w_k C_j(x_k) / lambda_j``.
    """
    vals = ns.basis.eval_all(ns.n, ns.nodes)
    return (_inverse_norms(ns.basis, ns.n)[:, None] * vals.T) * ns.weights[None, :]


def clenshaw(basis: GegenbauerBasis, coeffs: np.ndarray, x) -> np.ndarray:
    """Evaluate ``sum_j coeffs[j] C_j(x)`` by backward recurrence.

    Extra trailing axes of ``coeffs`` are carried through, giving an output of
    shape ``x.shape + coeffs.shape[1:]``.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    y = basis.to_standard(x)
    y = y.reshape(y.shape + (1,) * (coeffs.ndim - 1))
    a = basis.alpha
    n = coeffs.shape[0] - 1
    if n == 0:
        return coeffs[0] + np.zeros_like(y)
    # p_{k+1} = A_k x p_k - B_k p_{k-1} with A_k = 2(k+a)/(k+2a), B_k = k/(k+2a).
    b1 = np.zeros(np.broadcast_shapes(y.shape, coeffs.shape[1:]))
    b2 = np.zeros_like(b1)
    for k in range(n, 0, -1):
        ak = 2 * (k + a) / (k + 2 * a)
        bk1 = (k + 1) / (k + 1 + 2 * a)
        b1, b2 = coeffs[k] + ak * y * b1 - bk1 * b2, b1
    # Recover c_0 p_0 + b_1 p_1 - B_1 p_0 b_2, with p_1 = x (A_0 = 1).
    return coeffs[0] + y * b1 - (1.0 / (1 + 2 * a)) * b2


@dataclass(frozen=True)
class Interpolant1D:
    """Interpolant ``sum_j coeffs[j] C_j`` on the rule it was built from."""

    nodeset: NodeSet
    coeffs: np.ndarray

    def __call__(self, x):
        return clenshaw(self.nodeset.basis, self.coeffs, x)


def forward_transform_1d(samples, ns: NodeSet) -> Interpolant1D:
    """Discrete transform of nodal ``samples`` taken at ``ns.nodes``."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape[0] != ns.nodes.size:
        raise ValueError(f"expected {ns.nodes.size} samples, got {samples.shape[0]}")
    return Interpolant1D(ns, np.tensordot(transform_matrix(ns), samples, axes=1))


def lagrange_basis(ns: NodeSet, k: int, x) -> np.ndarray:
    """Cardinal function ``L_k`` of the rule ``ns`` in Christoffel form."""
    n = ns.n
    basis = ns.basis
    inv = _inverse_norms(basis, n)
    at_node = basis.eval_all(n, ns.nodes[k])
    at_x = basis.eval_all(n, x)
    return ns.weights[k] * (at_x @ (inv * at_node))


def lagrange_matrix(ns: NodeSet, x) -> np.ndarray:
    """All cardinal functions at ``x``; shape ``x.shape + (n + 1,)``."""
    vals = ns.basis.eval_all(ns.n, x)
    return vals @ transform_matrix(ns)


@dataclass(frozen=True)
class BivariateInterpolant:
    """Tensor interpolant ``sum_{n,m} coeffs[n, m] C_n(x) C_m(t)``.

    ``values`` keeps the nodal samples with rows along ``x`` and columns along
    ``t``.
    """

    ns_x: NodeSet
    ns_t: NodeSet
    coeffs: np.ndarray
    values: np.ndarray

    def __call__(self, x, t):
        return eval_interpolant_2d(self, x, t)


def forward_transform_2d(values, ns_x: NodeSet, ns_t: NodeSet) -> BivariateInterpolant:
    """Two-pass transform: first along ``x`` for each ``t`` column, then along ``t``."""
    values = np.asarray(values, dtype=float)
    expected = (ns_x.nodes.size, ns_t.nodes.size)
    if values.shape != expected:
        raise ValueError(f"expected samples of shape {expected}, got {values.shape}")
    partial = transform_matrix(ns_x) @ values
    coeffs = partial @ transform_matrix(ns_t).T
    return BivariateInterpolant(ns_x, ns_t, coeffs, values)


def eval_interpolant_2d(interp: BivariateInterpolant, x, t) -> np.ndarray:
    """Evaluate at broadcast points ``(x, t)``."""
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    bx = interp.ns_x.basis.eval_all(interp.ns_x.n, x)
    bt = interp.ns_t.basis.eval_all(interp.ns_t.n, t)
    return np.einsum("...n,nm,...m->...", bx, interp.coeffs, bt)


def eval_interpolant_lattice(interp: BivariateInterpolant, xs, ts) -> np.ndarray:
    """Evaluate on the lattice ``xs x ts``; rows follow ``xs``."""
    bx = interp.ns_x.basis.eval_all(interp.ns_x.n, np.asarray(xs, dtype=float))
    bt = interp.ns_t.basis.eval_all(interp.ns_t.n, np.asarray(ts, dtype=float))
    return bx @ interp.coeffs @ bt.T
