"""Finite Blaschke products.

A product is stored as its zero multiset ``((alpha_1, m_1), ..., (alpha_p, m_p))``
in input order, and always carries the normalizing factors ``|a|/a`` so that
``B(0) > 0`` whenever 0 is not a zero.  The divisor lattice (gcd, lcm,
divisibility) is computed on multisets; inner functions differing by a
unimodular constant are identified, which the normalization makes canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import taylor
from .errors import AmbiguousMatchError, InvalidParameterError

TAU_ZERO = 1e-9
# points closer than this are the same point; between this and TAU_ZERO they are ambiguous
IDENTICAL_TOL = 1e-15


def match_points(a: complex, b: complex, tol: float = TAU_ZERO) -> bool:
    """True when ``a`` and ``b`` denote the same disk point.

    Raises AmbiguousMatchError if they are closer than ``tol`` but not identical.
    """
    d = abs(complex(a) - complex(b))
    if d <= IDENTICAL_TOL:
        return True
    if d < tol:
        raise AmbiguousMatchError(
            f"points {complex(a)!r} and {complex(b)!r} are {d:.3g} apart (< {tol:g}) but not identical"
        )
    return False


def mobius(a: complex, z):
    """Elementary disk automorphism ``phi_a(z) = (a - z) / (1 - conj(a) z)``; ``phi_0(z) = z``."""
    a = complex(a)
    if not abs(a) < 1:
        raise InvalidParameterError(f"Mobius parameter must lie in the open disk, got |a| = {abs(a)}")
    z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
    if a == 0:
        return z
    return (a - z) / (1 - np.conj(a) * z)


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product given by distinct zeros with multiplicities."""

    zeros: tuple[tuple[complex, int], ...] = ()

    def __post_init__(self):
        cleaned = []
        for alpha, mult in self.zeros:
            alpha = complex(alpha)
            mult = int(mult)
            if not abs(alpha) < 1:
                raise InvalidParameterError(f"zero {alpha!r} is not in the open unit disk")
            if mult < 1:
                raise InvalidParameterError(f"multiplicity of {alpha!r} must be >= 1, got {mult}")
            for beta, _ in cleaned:
                if match_points(alpha, beta):
                    raise InvalidParameterError(f"zero {alpha!r} listed twice; merge multiplicities")
            cleaned.append((alpha, mult))
        object.__setattr__(self, "zeros", tuple(cleaned))

    # -- construction -----------------------------------------------------

    @classmethod
    def from_points(cls, points: Iterable[complex]) -> "BlaschkeProduct":
        """Build from a list of zeros with repetition (repeats raise the multiplicity)."""
        acc: list[list] = []
        for p in points:
            for entry in acc:
                if match_points(p, entry[0]):
                    entry[1] += 1
                    break
            else:
                acc.append([complex(p), 1])
        return cls(tuple((a, m) for a, m in acc))

    @classmethod
    def monomial(cls, n: int) -> "BlaschkeProduct":
        """``z**n``."""
        return cls(((0j, n),)) if n > 0 else cls()

    # -- basic data -------------------------------------------------------

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.zeros)

    @property
    def points(self) -> list[complex]:
        """Zeros repeated according to multiplicity."""
        return [a for a, m in self.zeros for _ in range(m)]

    def multiplicity(self, alpha: complex) -> int:
        for beta, m in self.zeros:
            if match_points(alpha, beta):
                return m
        return 0

    def is_monomial(self) -> bool:
        return all(a == 0 for a, _ in self.zeros)

    def __mul__(self, other: "BlaschkeProduct") -> "BlaschkeProduct":
        return BlaschkeProduct.from_points(self.points + other.points)

    def same_zeros(self, other: "BlaschkeProduct") -> bool:
        """Equality as zero multisets (order-independent)."""
        if self.degree != other.degree or len(self.zeros) != len(other.zeros):
            return False
        return all(other.multiplicity(a) == m for a, m in self.zeros)

    # -- evaluation -------------------------------------------------------

    def __call__(self, z):
        """Evaluate B at a scalar or array of points with |z| <= 1."""
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for alpha, mult in self.zeros:
            if alpha == 0:
                out = out * z**mult
            else:
                factor = (abs(alpha) / alpha) * (alpha - z) / (1 - np.conj(alpha) * z)
                out = out * factor**mult
        return out[()] if out.ndim == 0 else out

    def jet(self, z0: complex, order: int) -> np.ndarray:
        """Taylor coefficients ``B^{(k)}(z0)/k!`` for k = 0..order."""
        z0 = complex(z0)
        out = taylor.constant(1.0, order)
        for alpha, mult in self.zeros:
            if alpha == 0:
                factor = taylor.variable(z0, order)
            else:
                num = np.zeros(order + 1, dtype=complex)
                den = np.zeros(order + 1, dtype=complex)
                num[0] = (abs(alpha) / alpha) * (alpha - z0)
                den[0] = 1 - np.conj(alpha) * z0
                if order >= 1:
                    num[1] = -(abs(alpha) / alpha)
                    den[1] = -np.conj(alpha)
                factor = taylor.mul(num, taylor.reciprocal(den))
            out = taylor.mul(out, taylor.power(factor, mult))
        return out

    def to_records(self) -> list[dict]:
        return [{"re": a.real, "im": a.imag, "mult": m} for a, m in self.zeros]

    @classmethod
    def from_records(cls, records: Sequence[dict]) -> "BlaschkeProduct":
        return cls(tuple((complex(r["re"], r.get("im", 0.0)), int(r.get("mult", 1))) for r in records))

    def __repr__(self):
        inner = ", ".join(f"{a:.6g}^{m}" if m > 1 else f"{a:.6g}" for a, m in self.zeros)
        return f"BlaschkeProduct[{inner}]"


def evaluate(B: BlaschkeProduct, z: complex, deriv_order: int = 0) -> complex:
    """``B^{(k)}(z)`` for ``k = deriv_order``, via jets."""
    if abs(z) > 1 + 1e-14:
        raise InvalidParameterError(f"evaluation point must satisfy |z| <= 1, got {abs(z)}")
    if deriv_order == 0:
        return complex(B(z))
    return complex(taylor.derivatives(B.jet(z, deriv_order))[deriv_order])


def _combine(B1: BlaschkeProduct, B2: BlaschkeProduct, pick) -> BlaschkeProduct:
    out = []
    used = set()
    for alpha, m1 in B1.zeros:
        m2 = 0
        for j, (beta, mb) in enumerate(B2.zeros):
            if match_points(alpha, beta):
                m2 = mb
                used.add(j)
                break
        m = pick(m1, m2)
        if m > 0:
            out.append((alpha, m))
    for j, (beta, mb) in enumerate(B2.zeros):
        if j not in used:
            m = pick(0, mb)
            if m > 0:
                out.append((beta, m))
    return BlaschkeProduct(tuple(out))


def gcd(B1: BlaschkeProduct, B2: BlaschkeProduct) -> BlaschkeProduct:
    """Greatest common inner divisor: pointwise min of multiplicities."""
    return _combine(B1, B2, min)


def lcm(B1: BlaschkeProduct, B2: BlaschkeProduct) -> BlaschkeProduct:
    """Least common multiple: pointwise max of multiplicities."""
    return _combine(B1, B2, max)


def divides(B1: BlaschkeProduct, B2: BlaschkeProduct) -> bool:
    """``B1 <= B2`` in the divisor order."""
    return gcd(B1, B2).same_zeros(B1)
