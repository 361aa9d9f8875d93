"""Elements ``f = lam + B h`` of H-infinity_B with ``h`` a polynomial in ``z`` and ``B``.

``h`` is held in bivariate form ``h = sum_k B^k p_k(z)`` as an array
``H[k, d]`` (coefficient of ``B^k z^d``).  Products stay in this form,

    (l1 + B h1)(l2 + B h2) = l1 l2 + B (l1 h2 + l2 h1 + B h1 h2),

so membership in H-infinity_B (equal values at the zeros of B, vanishing
derivatives up to each multiplicity) holds by construction.  ``lam`` and
``H`` may carry trailing value dimensions for matrix-valued functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve

from . import taylor
from .blaschke import BlaschkeProduct


@dataclass(frozen=True)
class ConstrainedFunction:
    __array_ufunc__ = None  # make ndarray * f dispatch to __rmul__

    B: BlaschkeProduct
    lam: complex | np.ndarray
    H: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=complex)
        H = np.asarray(self.H, dtype=complex)
        if H.ndim < 2:
            H = H.reshape((1, -1) + lam.shape) if H.size else np.zeros((1, 1) + lam.shape, dtype=complex)
        if H.shape[2:] != lam.shape:
            raise ValueError(f"value shape mismatch: lam {lam.shape}, H {H.shape}")
        object.__setattr__(self, "lam", lam[()] if lam.ndim == 0 else lam)
        object.__setattr__(self, "H", H)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_poly(cls, B: BlaschkeProduct, lam, p) -> "ConstrainedFunction":
        """``lam + B * p(z)`` with ``p`` given by ascending coefficients."""
        p = np.asarray(p, dtype=complex)
        return cls(B, lam, p[np.newaxis, ...])

    @classmethod
    def constant(cls, B: BlaschkeProduct, c) -> "ConstrainedFunction":
        c = np.asarray(c, dtype=complex)
        return cls(B, c, np.zeros((1, 1) + c.shape, dtype=complex))

    # -- structure ------------------------------------------------------------

    @property
    def value_shape(self) -> tuple:
        return np.shape(self.lam)

    def normal_form(self) -> dict:
        """Plain-data view: ``lam`` and ``h[k][d]`` coefficients of ``B^k z^d``."""
        return {"lam": self.lam, "h": self.H}

    # -- evaluation -------------------------------------------------------------

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        expand = (1,) * len(self.value_shape)
        zz = z.reshape(z.shape + expand)
        Bz = np.asarray(self.B(z)).reshape(z.shape + expand)
        h = np.zeros(z.shape + self.value_shape, dtype=complex)
        bk = np.ones_like(Bz)
        for Hk in self.H:
            pk = np.zeros_like(h)
            for c in Hk[::-1]:
                pk = pk * zz + c
            h = h + bk * pk
            bk = bk * Bz
        out = self.lam + Bz * h
        return out[()] if np.ndim(out) == 0 else out

    def jet(self, z0: complex, order: int) -> np.ndarray:
        """Taylor coefficients ``f^{(j)}(z0)/j!``, shape ``(order+1,) + value_shape``."""
        bj = self.B.jet(z0, order)
        zj = taylor.variable(z0, order)
        h = np.zeros((order + 1,) + self.value_shape, dtype=complex)
        bk = taylor.constant(1.0, order)
        for k in range(self.H.shape[0]):
            h = h + taylor.mul_valued(bk, taylor.polyval(self.H[k], zj))
            bk = taylor.mul(bk, bj)
        out = taylor.mul_valued(bj, h)
        out[0] = out[0] + self.lam
        return out

    def derivative(self, z0: complex, k: int):
        return taylor.derivatives(self.jet(z0, k))[k]

    # -- algebra ------------------------------------------------------------------

    def _aligned(self, other: "ConstrainedFunction"):
        K = max(self.H.shape[0], other.H.shape[0])
        D = max(self.H.shape[1], other.H.shape[1])

        def pad(H):
            widths = [(0, K - H.shape[0]), (0, D - H.shape[1])] + [(0, 0)] * (H.ndim - 2)
            return np.pad(H, widths)

        return pad(self.H), pad(other.H)

    def __add__(self, other):
        if not isinstance(other, ConstrainedFunction):
            return ConstrainedFunction(self.B, self.lam + np.asarray(other, dtype=complex), self.H)
        a, b = self._aligned(other)
        return ConstrainedFunction(self.B, self.lam + other.lam, a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, c):
        """Scalar (or constant matrix, when ``self`` is scalar-valued) times ``f``."""
        c = np.asarray(c, dtype=complex)
        if c.ndim == 0:
            return ConstrainedFunction(self.B, c * self.lam, c * self.H)
        if self.value_shape:
            raise ValueError("constant-matrix scaling needs a scalar-valued function")
        return ConstrainedFunction(self.B, self.lam * c, self.H[..., None, None] * c)

    def __mul__(self, other):
        if not isinstance(other, ConstrainedFunction):
            return self.__rmul__(other)
        if self.value_shape or other.value_shape:
            raise ValueError("products are defined for scalar-valued functions only")
        l1, l2 = self.lam, other.lam
        H1, H2 = self.H, other.H
        cross = convolve(H1, H2)  # h1 h2 as bivariate polynomial in (B, z)
        K = max(H1.shape[0], H2.shape[0], cross.shape[0] + 1)
        D = max(H1.shape[1], H2.shape[1], cross.shape[1])
        out = np.zeros((K, D), dtype=complex)
        out[: H2.shape[0], : H2.shape[1]] += l1 * H2
        out[: H1.shape[0], : H1.shape[1]] += l2 * H1
        out[1 : cross.shape[0] + 1, : cross.shape[1]] += cross
        return ConstrainedFunction(self.B, l1 * l2, out)

    def __neg__(self):
        return (-1.0) * self
