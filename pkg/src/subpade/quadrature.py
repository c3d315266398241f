"""Gauss-Legendre quadrature helpers.

All integrators follow the same scheme: a fixed-node Gauss-Legendre rule
whose node count is doubled until two successive results agree to the
requested tolerance.  Integrands receive a numpy array of nodes and must
return an array of values.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ConvergenceFailure

_NODE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def legendre_nodes(count: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the `count`-point Gauss-Legendre rule on [-1, 1]."""
    if count not in _NODE_CACHE:
        _NODE_CACHE[count] = np.polynomial.legendre.leggauss(count)
    return _NODE_CACHE[count]


def fixed_quad(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, count: int):
    """Gauss-Legendre rule with a fixed node count on [a, b]."""
    x, w = legendre_nodes(count)
    t = 0.5 * (b - a) * x + 0.5 * (a + b)
    return 0.5 * (b - a) * np.sum(w * f(t))


def adaptive_quad(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float,
    *,
    initial_count: int = 32,
    max_count: int = 1 << 16,
    abs_floor: float = 1e-300,
):
    """Double the node count until two successive results agree to `tol` (relative).

    Raises ConvergenceFailure when `max_count` nodes are not enough.
    """
    prev = fixed_quad(f, a, b, initial_count)
    count = 2 * initial_count
    while count <= max_count:
        cur = fixed_quad(f, a, b, count)
        if abs(cur - prev) <= tol * max(abs(cur), abs_floor):
            return cur
        prev = cur
        count *= 2
    raise ConvergenceFailure(
        f"quadrature on [{a}, {b}] did not reach tol={tol} with {max_count} nodes"
    )


def decaying_tail_quad(
    f: Callable[[np.ndarray], np.ndarray],
    start: float,
    tol: float,
    *,
    abs_tol: float,
    max_doublings: int = 200,
):
    """Integrate a smoothly decaying integrand over [start, infinity).

    The domain is covered by geometric chunks [a, 2a]; chunks are added until
    one falls below `abs_tol`.  Suited to integrands with power-law decay.
    """
    total = 0.0
    a = start
    for _ in range(max_doublings):
        chunk = adaptive_quad(f, a, 2 * a, tol)
        total += chunk
        a *= 2
        if abs(chunk) < abs_tol:
            return total
    raise ConvergenceFailure(f"tail integral from {start} did not decay below {abs_tol}")
