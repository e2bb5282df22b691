"""Benchmark problems with known exact solutions, all on the unit square."""

from __future__ import annotations

import numpy as np

from sgpm.telegraph import TelegraphProblem


def _zero(x):
    return np.zeros_like(x)


def example1() -> TelegraphProblem:
    # u = x^2 + t
    return TelegraphProblem(
        beta1=1.0,
        beta2=1.0,
        f=lambda x, t: x**2 + t - 1.0,
        g1=lambda x: x**2,
        g2=lambda x: np.ones_like(x),
        h1=lambda t: t,
        h2=lambda t: 1.0 + t,
        name="example1",
        exact=lambda x, t: x**2 + t,
    )


def _quartic(x):
    return x**4 * (x - 1.0) ** 4


def example2() -> TelegraphProblem:
    # u = x^4 (x - 1)^4 exp(2t)
    def f(x, t):
        poly = 12 * x**4 - 24 * x**3 - 2 * x**2 + 14 * x - 3
        return 4 * np.exp(2 * t) * x**2 * (x - 1.0) ** 2 * poly

    return TelegraphProblem(
        beta1=10.0,
        beta2=24.0,
        f=f,
        g1=_quartic,
        g2=lambda x: 2 * _quartic(x),
        h1=_zero,
        h2=_zero,
        name="example2",
        exact=lambda x, t: _quartic(x) * np.exp(2 * t),
    )


def example3() -> TelegraphProblem:
    # u = sin(x) cos(t)
    return TelegraphProblem(
        beta1=12.0,
        beta2=4.0,
        f=lambda x, t: 4 * (np.cos(t) - 3 * np.sin(t)) * np.sin(x),
        g1=np.sin,
        g2=_zero,
        h1=_zero,
        h2=lambda t: np.sin(1.0) * np.cos(t),
        name="example3",
        exact=lambda x, t: np.sin(x) * np.cos(t),
    )


def example4() -> TelegraphProblem:
    # u = exp(-2t) sinh(x)
    return TelegraphProblem(
        beta1=20.0,
        beta2=25.0,
        f=lambda x, t: -12 * np.exp(-2 * t) * np.sinh(x),
        g1=np.sinh,
        g2=lambda x: -2 * np.sinh(x),
        h1=_zero,
        h2=lambda t: np.exp(-2 * t) * np.sinh(1.0),
        name="example4",
        exact=lambda x, t: np.exp(-2 * t) * np.sinh(x),
    )


EXAMPLES = {1: example1, 2: example2, 3: example3, 4: example4}


def get_example(number: int) -> TelegraphProblem:
    try:
        return EXAMPLES[int(number)]()
    except KeyError:
        raise ValueError(f"unknown example {number}; choose from {sorted(EXAMPLES)}") from None
