import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from sgpm.problems import get_example
from sgpm.telegraph import (
    OpCounter,
    SingularSystemError,
    TelegraphProblem,
    assemble,
    assemble_reference,
    discretize,
    evaluate_solution,
    evaluate_solution_at_grid,
    evaluate_solution_lattice,
    index,
    j_operator_basis,
    j_operator_matrix,
    kappa,
    matrix_op_count,
    psi,
    rhs_op_count,
    solve,
    solve_problem,
)

X, T = sp.symbols("x t")

# Exact solutions and coefficients written out independently of the registry.
EXACT = {
    1: (X**2 + T, 1, 1),
    2: (X**4 * (X - 1) ** 4 * sp.exp(2 * T), 10, 24),
    3: (sp.sin(X) * sp.cos(T), 12, 4),
    4: (sp.exp(-2 * T) * sp.sinh(X), 20, 25),
}


def zero_problem():
    z = lambda *a: np.zeros(np.broadcast(*a).shape)
    return TelegraphProblem(beta1=2.0, beta2=3.0, f=z, g1=z, g2=z, h1=z, h2=z)


def problem_from_exact(u, b1, b2, l=1.0, tau=1.0):
    # Data consistent with u_tt + b1 u_t + b2 u = u_xx + f.
    f = sp.diff(u, T, 2) + b1 * sp.diff(u, T) + b2 * u - sp.diff(u, X, 2)
    num = lambda e, *v: sp.lambdify(v, sp.simplify(e), "numpy")
    return TelegraphProblem(
        beta1=float(b1),
        beta2=float(b2),
        f=num(f, X, T),
        g1=num(u.subs(T, 0), X),
        g2=num(sp.diff(u, T).subs(T, 0), X),
        h1=num(u.subs(X, 0), T),
        h2=num(u.subs(X, l), T),
        l=l,
        tau=tau,
        exact=num(u, X, T),
    )


def grid_error(field):
    d = field.disc
    Xg, Tg = np.meshgrid(d.ns_x.nodes, d.ns_t.nodes, indexing="ij")
    return np.abs(evaluate_solution_at_grid(field) - field.problem.exact(Xg, Tg)).max()


def lattice_max_error(field, k=100):
    xs = np.linspace(0, field.disc.l, k)
    ts = np.linspace(0, field.disc.tau, k)
    return np.abs(evaluate_solution_lattice(field, xs, ts) - field.problem.exact(xs[:, None], ts[None, :])).max()


def test_kappa_and_psi_examples():
    p1 = get_example(1)
    assert kappa(p1, 0.5, 0.2) == pytest.approx(0.5, abs=1e-15)
    xs = np.linspace(0, 1, 7)
    np.testing.assert_array_equal(kappa(p1, xs, 0.0), p1.g1(xs))
    assert not kappa(zero_problem(), xs, 0.4).any()
    np.testing.assert_allclose(psi(p1, xs, 0.3), xs + 0.3, atol=1e-15)
    ts = np.linspace(0, 1, 7)
    np.testing.assert_array_equal(psi(p1, 0.0, ts), p1.h1(ts))
    np.testing.assert_array_equal(psi(p1, 1.0, ts), p1.h2(ts))
    assert not psi(get_example(2), xs, 0.7).any()


@pytest.mark.parametrize("ex", [1, 2, 3, 4])
def test_registry_matches_independent_derivation(ex):
    u, b1, b2 = EXACT[ex]
    ref = problem_from_exact(u, b1, b2)
    p = get_example(ex)
    assert (p.beta1, p.beta2, p.l, p.tau) == (b1, b2, 1.0, 1.0)
    rng = np.random.default_rng(ex)
    x, t = rng.uniform(0, 1, 40), rng.uniform(0, 1, 40)
    for name in ("f", "exact"):
        np.testing.assert_allclose(getattr(p, name)(x, t), getattr(ref, name)(x, t), rtol=1e-12, atol=1e-13)
    for name in ("g1", "g2"):
        np.testing.assert_allclose(np.broadcast_to(getattr(p, name)(x), x.shape), getattr(ref, name)(x), atol=1e-13)
    for name in ("h1", "h2"):
        np.testing.assert_allclose(np.broadcast_to(getattr(p, name)(t), t.shape), getattr(ref, name)(t), atol=1e-13)


def test_domain_must_be_positive():
    z = lambda *a: 0.0
    with pytest.raises(ValueError):
        TelegraphProblem(1.0, 1.0, z, z, z, z, z, l=0.0)
    with pytest.raises(ValueError):
        discretize(-1, 3)


def test_compatibility_advisories():
    p = get_example(1)
    assert p.check_compatibility() == []
    bad = TelegraphProblem(1.0, 1.0, p.f, p.g1, p.g2, lambda t: t + 0.5, p.h2)
    with pytest.warns(UserWarning, match="g1\\(0\\) vs h1\\(0\\)"):
        notes = bad.check_compatibility()
    assert len(notes) == 1


def test_index_and_shape():
    d = discretize(1, 1)
    system = assemble(get_example(1), d)
    assert system.A.shape == (4, 4)
    assert system.index(1, 1) == 3
    for nx, nt in [(1, 1), (3, 2), (4, 6)]:
        seen = sorted(index(i, j, nx) for i in range(nx + 1) for j in range(nt + 1))
        assert seen == list(range((nx + 1) * (nt + 1)))


def direct_entries(problem, disc):
    # Entry formula rendered independently, one entry at a time.
    p = disc.px2.entries
    p1, p2 = disc.pt1.entries, disc.pt2.entries
    nx, nt = disc.nx, disc.nt
    top = nx + 1
    size = (nx + 1) * (nt + 1)
    A = np.zeros((size, size))
    for i in range(nx + 1):
        theta = disc.ns_x.nodes[i] / disc.l
        for j in range(nt + 1):
            for s in range(nx + 1):
                for k in range(nt + 1):
                    a = p[i, s] - theta * p[top, s]
                    b = problem.beta1 * p1[j, k] + problem.beta2 * p2[j, k]
                    if k == j:
                        b = b + 1.0
                    v = a * b
                    if s == i:
                        v = v - p2[j, k]
                    A[i + j * (nx + 1), s + k * (nx + 1)] = v
    return A


@pytest.mark.parametrize("nx", range(1, 7))
def test_assembly_bitwise_equivalence(nx):
    problem = get_example(3)
    for nt in range(1, 7):
        disc = discretize(nx, nt, mt=min(nt, 4))
        fast = assemble(problem, disc)
        ref = assemble_reference(problem, disc)
        direct = direct_entries(problem, disc)
        assert np.array_equal(fast.A, ref.A)
        assert np.array_equal(fast.A, direct)
        assert np.array_equal(fast.rhs, ref.rhs)


def test_operation_count():
    assert matrix_op_count(2, 2) == 409
    for nx, nt, mt in [(2, 2, 2), (3, 5, 4), (1, 4, 6)]:
        counter = OpCounter()
        assemble_reference(get_example(1), discretize(nx, nt, mt), counter)
        assert counter.matrix == 1 + (1 + nx) * (1 + 5 * (1 + nt) ** 2 * (1 + nx))
        assert counter.matrix == matrix_op_count(nx, nt)
        assert counter.rhs == rhs_op_count(nx, nt, mt)


def test_solve_examples():
    b = np.array([1.5, -2.0, 3.0])
    np.testing.assert_array_equal(solve(np.eye(3), b), b)
    np.testing.assert_allclose(solve(np.array([[2.0, 0.0], [0.0, 4.0]]), np.array([2.0, 8.0])), [1.0, 2.0])
    rng = np.random.default_rng(7)
    A = rng.standard_normal((50, 50)) + 50 * np.eye(50)
    b = rng.standard_normal(50)
    x, info = solve(A, b, return_info=True)
    rel = np.abs(A @ x - b).max() / (np.abs(A).sum(axis=1).max() * np.abs(x).max() + np.abs(b).max())
    assert rel <= 1e-10 and info.residual <= 1e-10


def test_solve_reports_singular_pivot():
    with pytest.raises(SingularSystemError) as err:
        solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 2.0]))
    assert err.value.pivot < 1e-12
    with pytest.raises(ValueError):
        solve(np.eye(3), np.ones(2))


def test_example1_exact():
    field = solve_problem(get_example(1), discretize(4, 4, 4))
    assert grid_error(field) <= 1e-12
    assert abs(field(0.37, 0.81) - (0.37**2 + 0.81)) <= 1e-11


def test_zero_data_gives_zero():
    field = solve_problem(zero_problem(), discretize(5, 4, 3))
    assert not field.phi.any()
    assert not np.asarray(field(np.linspace(0, 1, 5), 0.3)).any()
    np.testing.assert_array_equal(evaluate_solution_at_grid(field), 0.0)


def test_example3_error_level():
    field = solve_problem(get_example(3), discretize(6, 6, 6))
    assert lattice_max_error(field) <= 10 * 1.160e-7


def test_j_examples():
    assert j_operator_basis(1.0, 0.3, 0, 0.5) == pytest.approx(-0.125, abs=1e-16)
    assert j_operator_basis(1.0, 0.0, 2, 0.25) == pytest.approx(0.0546875, abs=1e-16)
    for j in range(12):
        for a in (-0.3, 0.0, 0.7):
            assert j_operator_basis(1.7, a, j, 0.0) == 0.0
            assert j_operator_basis(1.7, a, j, 1.7) == 0.0


def hyp_j(l, a, j, x):
    # Closed form through a terminating 2F1(-j-2, j+2a-2; a-3/2; 1 - x/l).
    z = 1 - x / l
    total, term = 0.0, 1.0
    for k in range(j + 3):
        total += term
        term *= (-j - 2 + k) * (j + 2 * a - 2 + k) / ((a - 1.5 + k) * (k + 1)) * z
    pre = (4 * (a - 2) * a + 3) * l / (4 * math.prod(j + 1 + k for k in range(2)) * (2 * a + j - 2) * (2 * a + j - 1))
    return pre * (l * total + (-1) ** j * (x - l) - x)


@pytest.mark.parametrize("a", [-0.3, 0.3, 1.0, 2.2])
def test_j_against_hypergeometric_form(a):
    l = 1.3
    xs = np.linspace(0.05, 1.25, 9)
    for j in range(0, 9):
        if (2 * a + j - 2) * (2 * a + j - 1) == 0:
            continue
        np.testing.assert_allclose(j_operator_basis(l, a, j, xs), [hyp_j(l, a, j, x) for x in xs], atol=1e-13)


def exact_j(l, a, j, x):
    # J applied to the shifted member in rational arithmetic.
    y = sp.Symbol("y")
    a, l, x = (sp.Rational(str(v)) for v in (a, l, x))
    z = (1 - (2 * y / l - 1)) / 2
    poly, term = 0, sp.Integer(1)
    for k in range(j + 1):
        poly += term * z**k
        term *= sp.Integer(-j + k) * (j + 2 * a + k) / ((a + sp.Rational(1, 2) + k) * (k + 1))
    once = sp.integrate(poly, (y, 0, y))
    twice = sp.integrate(once, (y, 0, y))
    return float(twice.subs(y, x) - x / l * twice.subs(y, l))


@pytest.mark.parametrize("a", [-0.4, 0.0, 0.5, 1.5, 3.0])
def test_j_against_exact_integration(a):
    l = 1.5
    for j in (0, 1, 2, 3, 5, 8, 12):
        for x in (0.15, 0.6, 1.2):
            assert j_operator_basis(l, a, j, x) == pytest.approx(exact_j(l, a, j, x), abs=1e-13)


def test_j_matrix_stacks_members():
    xs = np.linspace(0, 1, 5)
    m = j_operator_matrix(1.0, 0.2, 4, xs)
    assert m.shape == (5, 5)
    np.testing.assert_array_equal(m[:, 3], j_operator_basis(1.0, 0.2, 3, xs))


@settings(max_examples=20, deadline=None)
@given(ex=st.sampled_from([1, 2, 3, 4]), seed=st.integers(0, 2**32 - 1))
def test_boundary_values_exact(ex, seed):
    p = get_example(ex)
    field = solve_problem(p, discretize(5, 5))
    ts = np.random.default_rng(seed).uniform(0, 1, 100)
    np.testing.assert_array_equal(field(0.0, ts), np.broadcast_to(p.h1(ts), ts.shape))
    np.testing.assert_array_equal(field(1.0, ts), np.broadcast_to(p.h2(ts), ts.shape))


@pytest.mark.parametrize("ex", [1, 2, 3, 4])
def test_modal_and_grid_reconstruction_agree(ex):
    field = solve_problem(get_example(ex), discretize(12, 12))
    d = field.disc
    Xg, Tg = np.meshgrid(d.ns_x.nodes, d.ns_t.nodes, indexing="ij")
    modal = evaluate_solution(field, Xg, Tg)
    grid = evaluate_solution_at_grid(field)
    assert np.abs(modal - grid).max() <= 1e-9 * np.abs(modal).max()


@pytest.mark.parametrize("ex", [1, 2, 3, 4])
def test_collocation_residual(ex):
    p = get_example(ex)
    for n in (3, 8):
        disc = discretize(n, n)
        system = assemble(p, disc)
        field = solve_problem(p, disc)
        res = system.A @ field.phi.T.reshape(-1) - system.rhs
        assert np.abs(res).max() <= 1e-9 * np.abs(system.rhs).max()


@pytest.mark.parametrize("alpha", [-0.2, 0.3])
def test_other_collocation_parameters(alpha):
    field = solve_problem(get_example(1), discretize(4, 4, alpha=alpha))
    assert grid_error(field) <= 1e-12
    field = solve_problem(get_example(3), discretize(8, 8, alpha=alpha))
    assert field.disc.alpha == alpha
    assert grid_error(field) <= 1e-9


@pytest.mark.parametrize(
    "u",
    [X**3 * T + 2 * X - T**2, (1 + X) ** 2 * (2 - T) ** 3, X**4 - T**4 + X * T],
)
def test_polynomial_reproduction(u):
    p = problem_from_exact(u, 3, 2)
    field = solve_problem(p, discretize(4, 4))
    assert grid_error(field) <= 1e-11


@pytest.mark.parametrize("ex", [1, 2, 3, 4])
def test_initial_condition_consistency(ex):
    p = get_example(ex)
    field = solve_problem(p, discretize(8, 8))
    xs = np.random.default_rng(ex).uniform(0, 1, 50)
    ic = np.abs(field(xs, 0.0) - p.g1(xs)).max()
    assert ic <= max(10 * grid_error(field), 1e-13)


@pytest.mark.parametrize("ex", [2, 3, 4])
def test_exponential_convergence(ex):
    p = get_example(ex)
    ns = np.array([4, 6, 8, 10, 12])
    errs = np.array([lattice_max_error(solve_problem(p, discretize(n, n))) for n in ns])
    logs = np.log10(errs)
    assert np.all(np.diff(logs) < 0)
    slope = np.polyfit(ns * np.log(ns), logs, 1)[0]
    assert slope < 0
    # Gains per step do not shrink: faster than any fixed algebraic rate.
    drops = -np.diff(logs)
    assert drops[-1] > 1.0


def test_discretization_domain_mismatch():
    with pytest.raises(ValueError):
        solve_problem(get_example(1), discretize(3, 3, l=2.0))

