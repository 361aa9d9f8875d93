"""Truncated Taylor arithmetic ("jets").

A jet of order ``K`` at a point is the array ``c[0..K]`` of Taylor
coefficients, ``c[k] = f^{(k)}(z0) / k!``.  Jets of rational functions are
exact to rounding, so derivatives of Blaschke products and of elements of
H-infinity_B are read off from jets rather than differentiated symbolically.
"""

from __future__ import annotations

import math

import numpy as np


def constant(c, order: int) -> np.ndarray:
    out = np.zeros(order + 1, dtype=complex)
    out[0] = c
    return out


def variable(z0, order: int) -> np.ndarray:
    """Jet of the identity map ``z`` at ``z0``."""
    out = np.zeros(order + 1, dtype=complex)
    out[0] = z0
    if order >= 1:
        out[1] = 1.0
    return out


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    order = len(a) - 1
    return np.convolve(a, b)[: order + 1]


def reciprocal(a: np.ndarray) -> np.ndarray:
    """Jet of ``1/f`` from the jet of ``f`` (requires ``f(z0) != 0``)."""
    if a[0] == 0:
        raise ZeroDivisionError("reciprocal of a jet vanishing at the base point")
    order = len(a) - 1
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0 / a[0]
    for k in range(1, order + 1):
        out[k] = -np.dot(a[1 : k + 1], out[k - 1 :: -1][:k]) / a[0]
    return out


def power(a: np.ndarray, n: int) -> np.ndarray:
    order = len(a) - 1
    result = constant(1.0, order)
    base = a.copy()
    while n > 0:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def polyval(coeffs, x: np.ndarray) -> np.ndarray:
    """Evaluate a polynomial (ascending coefficients) on the jet ``x`` by Horner.

    ``coeffs`` may carry trailing value dimensions (matrix-valued polynomials);
    the result then has shape ``(order + 1,) + coeffs.shape[1:]``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    order = len(x) - 1
    vshape = coeffs.shape[1:]
    acc = np.zeros((order + 1,) + vshape, dtype=complex)
    for c in coeffs[::-1]:
        acc = mul_valued(x, acc)
        acc[0] = acc[0] + c
    return acc


def mul_valued(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Multiply a scalar jet ``a`` by a jet ``b`` with trailing value dimensions."""
    order = len(a) - 1
    out = np.zeros_like(b, dtype=complex)
    for k in range(order + 1):
        out[k:] = out[k:] + a[k] * b[: order + 1 - k]
    return out


def derivatives(jet: np.ndarray) -> np.ndarray:
    """Convert Taylor coefficients to derivatives ``f^{(k)}(z0)``."""
    fact = np.array([math.factorial(k) for k in range(len(jet))], dtype=float)
    fact = fact.reshape((-1,) + (1,) * (np.ndim(jet) - 1))
    return jet * fact
