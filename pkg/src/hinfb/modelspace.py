"""Derivative-kernel coordinates for model spaces H^2 (-) phi H^2.

A label ``(w, i)`` stands for the H^2 function ``z^i / (1 - conj(w) z)^(i+1)``;
for a finite Blaschke product the labels ``(alpha_j, i)``, ``i < m_j``, span
its model space.  Inner products between labels have a closed form
(``<f, z^m k_w^{m+1}> = f^{(m)}(w)/m!`` applied to a label), so every
Grammian here is exact to rounding.

Grammian convention: ``Q[a, b] = <e_b, e_a>``, hence for coefficients ``c``
the H^2 norm of ``sum_a c_a e_a`` is ``c^* Q c``.  With Szego kernels this
makes the free-node block the usual Pick matrix ``[1/(1 - z_i conj(z_j))]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import comb
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln

from .blaschke import BlaschkeProduct, match_points
from .errors import ConditioningWarning, InvalidParameterError, NearDependentBasisError

EIG_FLOOR = 1e-12
CONDITIONING_RADIUS = 0.95


class Label(NamedTuple):
    """Basis symbol ``z^order * k_w^(order+1)``."""

    w: complex
    order: int = 0


def szego(z, w):
    """Szego kernel ``k_w(z) = 1 / (1 - conj(w) z)``."""
    return 1.0 / (1.0 - np.conj(w) * np.asarray(z, dtype=complex))


def eval_label(label: Label, z):
    w, i = label
    z = np.asarray(z, dtype=complex)
    out = z**i / (1.0 - np.conj(w) * z) ** (i + 1)
    return out[()] if out.ndim == 0 else out


def label_taylor_coeffs(label: Label, n_terms: int) -> np.ndarray:
    """Coefficients of ``z^i (1 - conj(w) z)^-(i+1)``: ``C(k, i) conj(w)^(k-i)`` for ``k >= i``."""
    w, i = label
    out = np.zeros(n_terms, dtype=complex)
    if i >= n_terms:
        return out
    k = np.arange(i, n_terms)
    wb = np.conj(complex(w))
    # C(k, i) grows polynomially while |w|^(k-i) decays; use logs to avoid overflow
    if wb == 0:
        out[i] = 1.0
        return out
    logc = gammaln(k + 1) - gammaln(i + 1) - gammaln(k - i + 1)
    out[i:] = np.exp(logc + (k - i) * np.log(abs(wb))) * np.exp(1j * (k - i) * np.angle(wb))
    return out


def inner_product(a: Label, b: Label) -> complex:
    """``<e_a, e_b>`` in H^2, i.e. the ``b.order``-th Taylor coefficient of ``e_a`` at ``b.w``.

    Leibniz expansion of ``z^i (1 - conj(u) z)^-(i+1)`` around ``w``::

        sum_l C(i, l) w^(i-l) * C(i+j-l, j-l) conj(u)^(j-l) / (1 - conj(u) w)^(i+1+j-l)
    """
    u, i = complex(a.w), a.order
    w, j = complex(b.w), b.order
    ub = np.conj(u)
    c = 1.0 - ub * w
    total = 0j
    for l in range(0, min(i, j) + 1):
        total += comb(i, l) * w ** (i - l) * comb(i + j - l, j - l) * ub ** (j - l) / c ** (i + 1 + j - l)
    return complex(total)


@dataclass(frozen=True)
class GrammianRep:
    """Grammian of an ordered label list with its Hermitian square roots."""

    labels: tuple[Label, ...]
    Q: np.ndarray
    Q_half: np.ndarray
    Q_invhalf: np.ndarray
    eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def condition(self) -> float:
        return float(self.eigenvalues[-1] / self.eigenvalues[0])


def grammian(labels: Sequence[Label]) -> GrammianRep:
    labels = tuple(Label(complex(w), int(i)) for w, i in labels)
    for a in range(len(labels)):
        if abs(labels[a].w) >= 1:
            raise InvalidParameterError(f"label point {labels[a].w!r} is not in the open disk")
        if abs(labels[a].w) > CONDITIONING_RADIUS:
            warnings.warn(
                f"label point {labels[a].w!r} lies beyond radius {CONDITIONING_RADIUS}", ConditioningWarning, stacklevel=2
            )
        for b in range(a):
            if labels[a].order == labels[b].order and match_points(labels[a].w, labels[b].w):
                raise InvalidParameterError(f"duplicate label {labels[a]}")
    d = len(labels)
    Q = np.empty((d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            Q[a, b] = inner_product(labels[b], labels[a])
    Q = 0.5 * (Q + Q.conj().T)
    evals, evecs = np.linalg.eigh(Q)
    if d and evals[0] < EIG_FLOOR:
        raise NearDependentBasisError(
            f"Grammian eigenvalue {evals[0]:.3g} below {EIG_FLOOR:g}; nodes or zeros are too close"
        )
    Q_half = (evecs * np.sqrt(evals)) @ evecs.conj().T
    Q_invhalf = (evecs / np.sqrt(evals)) @ evecs.conj().T
    return GrammianRep(labels, Q, Q_half, Q_invhalf, evals)


def model_basis(B: BlaschkeProduct) -> list[Label]:
    """Labels spanning H^2 (-) B H^2, zeros in input order, orders ascending."""
    return [Label(alpha, i) for alpha, mult in B.zeros for i in range(mult)]


def label_matrix(labels: Sequence[Label], z) -> np.ndarray:
    """``M[j, a] = e_a(z_j)``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return np.stack([np.atleast_1d(eval_label(lab, z)) for lab in labels], axis=-1)


@dataclass(frozen=True)
class ModelVector:
    """Element of a model space written in a derivative-kernel basis."""

    labels: tuple[Label, ...]
    coeffs: np.ndarray

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        vals = label_matrix(self.labels, z.ravel()) @ self.coeffs
        return vals.reshape(z.shape)[()] if z.ndim == 0 else vals.reshape(z.shape)

    def norm_sq(self, gram: GrammianRep | None = None) -> float:
        gram = gram or grammian(self.labels)
        return float(np.real(self.coeffs.conj() @ gram.Q @ self.coeffs))

    def rotated(self, phase: complex) -> "ModelVector":
        return ModelVector(self.labels, self.coeffs * phase)

    def phase_fixed(self, tol: float = 1e-12) -> "ModelVector":
        """Rotate so the first coordinate with modulus > tol is real and nonnegative."""
        for c in self.coeffs:
            if abs(c) > tol:
                return self.rotated(abs(c) / c)
        return self

    @classmethod
    def from_orthonormal(cls, B: BlaschkeProduct, x, gram: GrammianRep | None = None) -> "ModelVector":
        """Map orthonormal coordinates ``x`` (``|x| = 1``) to label coefficients ``Q^{-1/2} x``."""
        gram = gram or grammian(model_basis(B))
        return cls(gram.labels, gram.Q_invhalf @ np.asarray(x, dtype=complex))

    @classmethod
    def normalized(cls, labels: Sequence[Label], coeffs) -> "ModelVector":
        labels = tuple(Label(complex(w), int(i)) for w, i in labels)
        coeffs = np.asarray(coeffs, dtype=complex)
        v = cls(labels, coeffs)
        return cls(labels, coeffs / np.sqrt(v.norm_sq()))


def _check_unit(B: BlaschkeProduct, v: ModelVector, tol: float = 1e-12) -> None:
    basis = model_basis(B)
    if len(v.labels) != len(basis) or any(
        lv.order != lb.order or not match_points(lv.w, lb.w) for lv, lb in zip(v.labels, basis)
    ):
        raise InvalidParameterError("v is not expressed in the model-space basis of B")
    nsq = v.norm_sq()
    if abs(nsq - 1.0) > tol:
        raise InvalidParameterError(f"v must be a unit vector, got |v|^2 = {nsq!r}")


def constrained_kernel(B: BlaschkeProduct, v: ModelVector, z, w, check: bool = True):
    """Reproducing kernel of ``[v] (+) B H^2``: ``v(z) conj(v(w)) + B(z) conj(B(w)) / (1 - z conj(w))``."""
    if check:
        _check_unit(B, v)
    return v(z) * np.conj(v(w)) + B(z) * np.conj(B(w)) / (1.0 - np.asarray(z) * np.conj(w))
