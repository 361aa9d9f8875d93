"""Finite-dimensional *-algebra generated by the compressed quotient.

``rho(e_0)`` (value 1 at the zeros of B, 0 at free nodes) and ``rho(e_j)``
(1 at the j-th free node) are ``Q^{-1/2} P Q^{1/2}`` for coordinate
projections ``P``.  Their *-algebra is saturated numerically and its
fullness is decided twice: by dimension (``d^2``) and by the commutant
(scalars only).  Both must match the predicate ``m <= n - r``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .errors import ConditioningWarning, InternalAssertionError, RankToleranceError, UnsupportedCaseError
from .problem import InterpolationProblem
from .quotient import CompressionRep, QuotientElement, build_compression, rho

RANK_TOL = 1e-9
CLOSURE_RESIDUAL = 1e-10
BORDERLINE = (1e-11, 1e-7)
MAX_ROUNDS = 64


@dataclass(frozen=True)
class MatrixAlgebraBasis:
    """Trace-orthonormal basis of a *-closed matrix subspace containing the identity."""

    d: int
    basis: tuple[np.ndarray, ...]
    singular_values: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.basis)

    def stacked(self) -> np.ndarray:
        return np.stack([b.reshape(-1) for b in self.basis], axis=1)

    def closure_residual(self) -> float:
        """Largest distance of a product or adjoint of basis elements from the span."""
        S = self.stacked()
        P = S @ S.conj().T
        worst = 0.0
        for a in self.basis:
            for x in [a.conj().T] + [a @ b for b in self.basis]:
                v = x.reshape(-1)
                worst = max(worst, float(np.linalg.norm(v - P @ v)))
        return worst


def generators(problem: InterpolationProblem, comp: CompressionRep | None = None) -> list[np.ndarray]:
    if problem.r < 1:
        raise UnsupportedCaseError("envelope diagnostics are defined for r >= 1")
    comp = comp or build_compression(problem)
    nf = comp.n_free
    gens = [rho(QuotientElement(1.0, np.zeros(nf)), comp)]
    for j in range(nf):
        fv = np.zeros(nf)
        fv[j] = 1.0
        gens.append(rho(QuotientElement(0.0, fv), comp))
    return gens


def _orthonormal_span(mats: list[np.ndarray], tol: float) -> tuple[np.ndarray, np.ndarray]:
    A = np.stack([m.reshape(-1) for m in mats], axis=1)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > tol * max(s[0], 1.0)))
    return U[:, :rank], s


def star_algebra_closure(gens: list[np.ndarray], tol: float = RANK_TOL) -> MatrixAlgebraBasis:
    """Span saturation: adjoin identity and adjoints, multiply all pairs, repeat until the dimension is stable."""
    d = gens[0].shape[0]
    mats = [np.eye(d, dtype=complex)] + [np.asarray(g, dtype=complex) for g in gens]
    mats += [g.conj().T for g in mats]
    U, s = _orthonormal_span(mats, tol)
    dims = [U.shape[1]]
    for _ in range(MAX_ROUNDS):
        basis = [U[:, i].reshape(d, d) for i in range(U.shape[1])]
        products = [a @ b for a in basis for b in basis]
        U, s = _orthonormal_span(basis + products + [a.conj().T for a in basis], tol)
        dims.append(U.shape[1])
        if dims[-1] == dims[-2]:
            break
        if dims[-1] < dims[-2]:
            raise RankToleranceError(f"dimension fell from {dims[-2]} to {dims[-1]}; singular values {s}")
    else:
        raise RankToleranceError(f"no stable dimension after {MAX_ROUNDS} rounds: {dims}")
    return MatrixAlgebraBasis(d, tuple(U[:, i].reshape(d, d) for i in range(U.shape[1])), s)


def commutant(algebra: MatrixAlgebraBasis, tol: float = RANK_TOL) -> tuple[int, list[np.ndarray]]:
    """Matrices ``X`` with ``XG = GX`` for every basis element ``G``."""
    d = algebra.d
    eye = np.eye(d)
    # row-major vec: vec(XG) = (I kron G^T) vec X, vec(GX) = (G kron I) vec X
    system = np.concatenate([np.kron(eye, G.T) - np.kron(G, eye) for G in algebra.basis], axis=0)
    s = np.linalg.svd(system, compute_uv=False)
    scale = max(s[0], 1.0)
    border = s[(s > BORDERLINE[0] * scale) & (s < BORDERLINE[1] * scale)]
    if border.size:
        warnings.warn(f"commutant singular values near the rank threshold: {border}", ConditioningWarning, stacklevel=2)
    N = null_space(system, rcond=tol * scale / s[0] if s[0] > 0 else tol)
    return N.shape[1], [N[:, i].reshape(d, d) for i in range(N.shape[1])]


def envelope_report(problem: InterpolationProblem) -> dict:
    """Generated algebra dimension and commutant against the predicate ``m <= n - r``."""
    comp = build_compression(problem)
    d = comp.dim
    alg = star_algebra_closure(generators(problem, comp))
    cdim, _ = commutant(alg)
    full_by_dim = alg.dim == d * d
    full_by_commutant = cdim == 1
    prediction = problem.m <= problem.n - problem.r
    agreement = full_by_dim == full_by_commutant == prediction
    report = {
        "m": problem.m,
        "n": problem.n,
        "r": problem.r,
        "d": d,
        "algebra_dim": alg.dim,
        "commutant_dim": cdim,
        "is_full": full_by_dim,
        "theorem_prediction": prediction,
        "agreement": agreement,
        "envelope": f"M_{d}" if full_by_dim else None,
    }
    if not agreement:
        raise InternalAssertionError(f"envelope routes disagree: {report}")
    return report
