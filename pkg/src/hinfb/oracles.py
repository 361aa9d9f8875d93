"""Independent numerical oracles used to validate the closed-form routes.

* boundary quadrature of H^2 inner products (trapezoid rule on the circle);
* Taylor-truncation compression: multiplication by ``f`` as a lower-triangular
  Toeplitz operator on the first ``N`` Taylor coefficients, compressed to an
  orthonormalized coefficient basis of ``H^2 (-) lcm(B, E) H^2``.

Neither route uses the Leibniz Grammian or the diagonal ``D_f`` picture.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

from .modelspace import Label, label_taylor_coeffs
from .problem import InterpolationProblem

QUAD_POINTS = 2**14
TRUNCATION_N = 1024


def circle(n: int = QUAD_POINTS) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def quadrature_inner(f, g, n: int = QUAD_POINTS) -> complex:
    """``(1/2pi) int f conj(g)`` over the unit circle, ``n`` equispaced nodes."""
    zeta = circle(n)
    return complex(np.mean(f(zeta) * np.conj(g(zeta))))


def taylor_coefficients(f, n_terms: int, oversample: int = 4) -> np.ndarray:
    """First ``n_terms`` Taylor coefficients of ``f`` analytic on a neighbourhood of the closed disk.

    Sampled on ``oversample * n_terms`` roots of unity and transformed by FFT;
    aliasing decays geometrically.  Matrix-valued ``f`` returns shape ``(n_terms, k, k)``.
    """
    M = oversample * n_terms
    vals = np.asarray(f(circle(M)))
    coeffs = np.fft.fft(vals, axis=0) / M
    return coeffs[:n_terms]


def orthonormal_coefficient_basis(labels, n_terms: int) -> np.ndarray:
    V = np.stack([label_taylor_coeffs(Label(*lab), n_terms) for lab in labels], axis=1)
    U, _ = np.linalg.qr(V)
    return U


def truncated_compression(problem: InterpolationProblem, f, n_terms: int = TRUNCATION_N) -> np.ndarray:
    """Matrix of ``P_K M_f |_K`` in an orthonormal coefficient basis (slot-major in matrix mode)."""
    labels = [(alpha, i) for alpha, mult in problem.B.zeros for i in range(mult)]
    labels += [(complex(z), 0) for z in problem.free_nodes]
    U = orthonormal_coefficient_basis(labels, n_terms)
    F = taylor_coefficients(f, n_terms)
    if F.ndim == 1:
        FU = fftconvolve(F[:, None], U, axes=0)[:n_terms]
        return U.conj().T @ FU
    k = F.shape[1]
    d = U.shape[1]
    out = np.zeros((d * k, d * k), dtype=complex)
    for a in range(d):
        for l in range(k):
            col = fftconvolve(F[:, :, l], U[:, a : a + 1], axes=0)[:n_terms]  # (N, k)
            out[:, a * k + l] = (U.conj().T @ col).reshape(-1)
    return out


def truncated_norm(problem: InterpolationProblem, f, n_terms: int = TRUNCATION_N) -> float:
    return float(np.linalg.norm(truncated_compression(problem, f, n_terms), 2))


def lagrange_element(problem: InterpolationProblem, lam, free_values):
    """A function ``lam + B p`` in H-infinity_B with the given free-node values.

    ``p`` interpolates ``(value - lam) / B(z)`` at the free nodes, solved as a
    Vandermonde system; independent of the idempotent construction.
    """
    from .constrained import ConstrainedFunction

    lam = np.asarray(lam, dtype=complex)
    zf = np.asarray(problem.free_nodes, dtype=complex)
    if len(zf) == 0:
        return ConstrainedFunction.constant(problem.B, lam)
    rhs = (np.asarray(free_values, dtype=complex) - lam) / np.asarray(problem.B(zf)).reshape((-1,) + (1,) * lam.ndim)
    V = np.vander(zf, increasing=True)
    p = np.linalg.solve(V, rhs.reshape(len(zf), -1)).reshape(rhs.shape)
    return ConstrainedFunction.from_poly(problem.B, lam, p)
