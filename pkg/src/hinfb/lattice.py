"""Subspaces ``psi (V (+) z^N H^2)`` invariant under H-infinity_B for ``B = z^N``.

``psi`` is a monomial ``z^a`` and ``V`` a space of polynomials of degree
``< N``.  Such a subspace contains ``z^(a+N) H^2``, so modulo ``z^D`` (any
``D >= a + N``) it is the finite coefficient space

    F = z^a V + span{z^(a+N), ..., z^(D-1)}

and lattice operations are linear algebra on ``C^D``.  The canonical pair
``(phi, W)`` has ``phi = psi * gcd(z^N, inner divisor of V)`` and
``gcd(W, z^N) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blaschke import BlaschkeProduct, divides, gcd, lcm
from .errors import InternalAssertionError, InvalidParameterError, UnsupportedCaseError

RANK_TOL = 1e-10
ROOT_RADIUS = 1 - 1e-6
ROOT_CLUSTER = 1e-8


def _monomial_power(phi: BlaschkeProduct) -> int:
    if phi.degree == 0:
        return 0
    if not phi.is_monomial():
        raise UnsupportedCaseError("lattice operations support monomial inner factors z^a only")
    return phi.degree


def _monomial(a: int) -> BlaschkeProduct:
    return BlaschkeProduct(((0j, a),)) if a else BlaschkeProduct(())


def _orth(A: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis for the column space of ``A`` (columns)."""
    if A.size == 0 or A.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > tol * max(s[0], 1.0))) if s.size and s[0] > 0 else 0
    return U[:, :rank]


def _same_span(A: np.ndarray, B: np.ndarray) -> bool:
    if A.shape[1] != B.shape[1]:
        return False
    return _orth(np.concatenate([A, B], axis=1)).shape[1] == A.shape[1]


@dataclass(frozen=True)
class InvariantSubspace:
    """``psi (V (+) z^N H^2)``; ``V_basis`` rows are ascending coefficient vectors of length ``N``."""

    psi: BlaschkeProduct
    V_basis: np.ndarray
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise InvalidParameterError("N must be positive")
        V = np.asarray(self.V_basis, dtype=complex)
        V = V.reshape(-1, V.shape[-1]) if V.size else np.zeros((0, self.N), dtype=complex)
        if V.shape[1] > self.N:
            if np.any(np.abs(V[:, self.N :]) > 0):
                raise InvalidParameterError(f"V must consist of polynomials of degree < {self.N}")
            V = V[:, : self.N]
        elif V.shape[1] < self.N:
            V = np.pad(V, ((0, 0), (0, self.N - V.shape[1])))
        if V.shape[0] and _orth(V.T).shape[1] != V.shape[0]:
            raise InvalidParameterError("V basis polynomials are linearly dependent")
        _monomial_power(self.psi)
        object.__setattr__(self, "V_basis", V)

    @property
    def shift(self) -> int:
        return _monomial_power(self.psi)

    def finite_part(self, D: int) -> np.ndarray:
        """Columns spanning the subspace modulo ``z^D``."""
        a, N = self.shift, self.N
        if D < a + N:
            raise InvalidParameterError(f"truncation {D} below a + N = {a + N}")
        cols = []
        for v in self.V_basis:
            c = np.zeros(D, dtype=complex)
            c[a : a + N] = v
            cols.append(c)
        for k in range(a + N, D):
            c = np.zeros(D, dtype=complex)
            c[k] = 1.0
            cols.append(c)
        return np.stack(cols, axis=1) if cols else np.zeros((D, 0), dtype=complex)


def inner_divisor(poly) -> BlaschkeProduct:
    """Zeros of a polynomial inside the disk (clustered), as a Blaschke product."""
    p = np.trim_zeros(np.asarray(poly, dtype=complex), "b")
    if p.size == 0:
        raise InvalidParameterError("the zero polynomial has no inner divisor")
    lead_zeros = len(p) - len(np.trim_zeros(p, "f"))
    roots = np.roots(np.trim_zeros(p, "f")[::-1]) if len(np.trim_zeros(p, "f")) > 1 else np.array([])
    inside = [complex(z) for z in roots if abs(z) < ROOT_RADIUS]
    clusters: list[list[complex]] = []
    for z in inside:
        for cl in clusters:
            if abs(cl[0] - z) < ROOT_CLUSTER:
                cl.append(z)
                break
        else:
            clusters.append([z])
    zeros = []
    n0 = lead_zeros
    for cl in clusters:
        c = complex(np.mean(cl))
        if abs(c) < ROOT_CLUSTER:
            n0 += len(cl)
        else:
            zeros.append((c, len(cl)))
    if n0:
        zeros.insert(0, (0j, n0))
    return BlaschkeProduct(tuple(zeros))


def canonical_form(s: InvariantSubspace) -> tuple[BlaschkeProduct, np.ndarray]:
    """``(phi_M, W_M)`` with ``phi_M = psi theta``, ``theta = gcd(z^N, inner divisor of V)``."""
    N = s.N
    theta = _monomial(N)
    for v in s.V_basis:
        theta = gcd(theta, inner_divisor(v))
    t = _monomial_power(theta)
    W = []
    for v in s.V_basis:
        if np.any(np.abs(v[:t]) > RANK_TOL * max(1.0, np.max(np.abs(v)))):
            raise InternalAssertionError("division by the common inner factor leaves a remainder")
        w = np.zeros(N, dtype=complex)
        w[: N - t] = v[t:]
        W.append(w)
    for k in range(N - t, N):
        w = np.zeros(N, dtype=complex)
        w[k] = 1.0
        W.append(w)
    W = np.array(W, dtype=complex).reshape(-1, N)
    if not np.any(np.abs(W[:, 0]) > RANK_TOL):
        raise InternalAssertionError("canonical W has a common zero at 0")
    phi = _monomial(s.shift + t)
    # coefficient-space cross-check: phi is z^(first row touched by the subspace)
    F = s.finite_part(s.shift + 2 * N)
    if _leading_order(F) != s.shift + t:
        raise InternalAssertionError("root-extraction and coefficient-space divisors disagree")
    return phi, W


def _leading_order(F: np.ndarray) -> int:
    rows = np.nonzero(np.max(np.abs(F), axis=1) > RANK_TOL)[0]
    return int(rows[0]) if rows.size else F.shape[0]


def _from_finite(F: np.ndarray, N: int) -> InvariantSubspace:
    """Canonical subspace ``z^s (W (+) z^N H^2)`` from a finite part containing its tail."""
    D = F.shape[0]
    s = _leading_order(F)
    if s + N > D:
        raise InternalAssertionError("truncation too short for the computed divisor")
    tail = np.eye(D, dtype=complex)[:, s + N :]
    if _orth(np.concatenate([F, tail], axis=1)).shape[1] != F.shape[1]:
        raise InternalAssertionError("subspace does not contain phi B H^2")
    W = _orth(F[s : s + N])
    W[np.abs(W) < 1e-14] = 0.0
    return InvariantSubspace(_monomial(s), W.T, N)


def _truncation(*subspaces: InvariantSubspace) -> int:
    N = subspaces[0].N
    if any(x.N != N for x in subspaces):
        raise InvalidParameterError("subspaces must share the exponent N")
    phis = [canonical_form(x)[0] for x in subspaces]
    L = phis[0]
    for p in phis[1:]:
        L = lcm(L, p)
    return max(L.degree + 2 * N, max(x.shift + N for x in subspaces))


def meet(s1: InvariantSubspace, s2: InvariantSubspace) -> tuple[InvariantSubspace, dict]:
    """Intersection, with the bounds ``lcm(phi_M, phi_N) | phi_X | z^N lcm(phi_M, phi_N)``."""
    D = _truncation(s1, s2)
    A, B = _orth(s1.finite_part(D)), _orth(s2.finite_part(D))
    K = _null(np.concatenate([A, -B], axis=1))
    X = _orth(A @ K[: A.shape[1]])
    out = _from_finite(X, s1.N)
    phi1, phi2 = canonical_form(s1)[0], canonical_form(s2)[0]
    phiX = canonical_form(out)[0]
    L = lcm(phi1, phi2)
    report = {
        "phi_M": phi1,
        "phi_N": phi2,
        "phi_X": phiX,
        "lower_bound": divides(L, phiX),
        "upper_bound": divides(phiX, _monomial(s1.N) * L),
    }
    if not (report["lower_bound"] and report["upper_bound"]):
        raise InternalAssertionError(f"meet divisor bounds fail: {report}")
    return out, report


def join(s1: InvariantSubspace, s2: InvariantSubspace) -> tuple[InvariantSubspace, dict]:
    """Closed span, with ``phi_Y = gcd(phi_M, phi_N)``."""
    D = _truncation(s1, s2)
    Y = _orth(np.concatenate([s1.finite_part(D), s2.finite_part(D)], axis=1))
    out = _from_finite(Y, s1.N)
    phi1, phi2 = canonical_form(s1)[0], canonical_form(s2)[0]
    phiY = canonical_form(out)[0]
    report = {"phi_M": phi1, "phi_N": phi2, "phi_Y": phiY, "gcd_law": phiY.same_zeros(gcd(phi1, phi2))}
    if not report["gcd_law"]:
        raise InternalAssertionError(f"join divisor law fails: {report}")
    return out, report


def _null(A: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    _, s, Vh = np.linalg.svd(A)
    rank = int(np.sum(s > tol * max(s[0], 1.0))) if s.size else 0
    return Vh[rank:].conj().T


def same_subspace(s1: InvariantSubspace, s2: InvariantSubspace) -> bool:
    D = _truncation(s1, s2)
    return _same_span(_orth(s1.finite_part(D)), _orth(s2.finite_part(D)))


def decomposition_consistency(psi, V, phi_claim, W_claim, N: int) -> dict:
    """Compare two decompositions and check ``phi_M = psi`` iff ``W_M = V`` on each."""
    a = InvariantSubspace(psi, V, N)
    b = InvariantSubspace(phi_claim, W_claim, N)
    checks = {}
    for name, sub in (("first", a), ("second", b)):
        phi, W = canonical_form(sub)
        phi_eq = phi.same_zeros(sub.psi)
        w_eq = _same_span(_orth(W.T), _orth(sub.V_basis.T))
        checks[name] = {"phi_equals_psi": phi_eq, "w_equals_v": w_eq, "biconditional": phi_eq == w_eq}
    return {
        "equal": same_subspace(a, b),
        "first": checks["first"],
        "second": checks["second"],
        "biconditional_holds": checks["first"]["biconditional"] and checks["second"]["biconditional"],
    }
