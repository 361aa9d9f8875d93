"""The ideal of functions in H-infinity_B vanishing at the nodes, and interpolants built from it.

For ``r >= 1`` the ideal is generated by the inner function ``lcm(B, E)``
(``E`` has simple zeros at the nodes).  For ``r = 0`` it is ``E (W + B H^inf)``
with ``W`` one-dimensional, spanned by ``1 + B sum_j c_j k_{z_j}`` where ``c``
solves ``diag(B(z_j)) [k_{z_j}(z_i)] c = -1``.

Interpolants are assembled from a separating function ``g`` (distinct values
at the node representatives) and the Lagrange idempotents

    e_j = prod_{s != j} (g - g(z_s)) / (g(z_j) - g(z_s)),

all kept in exact ``lam + B h`` form so membership never depends on rounding.
Nodes at zeros of B form one representative: every element of H-infinity_B
takes a single value there, and the constrained kernels at those nodes are all
multiples of ``v``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .blaschke import BlaschkeProduct, lcm
from .constrained import ConstrainedFunction
from .errors import ConditioningWarning, InfeasibleByStructureError, InternalAssertionError, SeparationError, SeparationWarning
from .modelspace import szego
from .problem import InterpolationProblem

__all__ = [
    "ConstrainedFunction",
    "DependenceVerdict",
    "IdealDescription",
    "construct_interpolant",
    "dependence_check",
    "ideal_structure",
    "idempotents",
    "representatives",
    "separating_function",
]

SEPARATION_BUDGET = 50
SEPARATION_RELATIVE = 1e-6
SEPARATION_WARN = 1e-3
DEPENDENCE_RESIDUAL = 1e-10
DEPENDENCE_COEF = 1e-10
ROUND_TRIP_TOL = 1e-9


@dataclass(frozen=True)
class IdealDescription:
    case_r: int
    generator_inner: BlaschkeProduct | None
    w_coeffs: np.ndarray | None
    w_dim: int
    nodes: np.ndarray = field(repr=False)
    B: BlaschkeProduct = field(repr=False)

    def generator(self, z):
        """Evaluate the generator: ``lcm(B, E)`` for r >= 1, ``E * w`` for r = 0."""
        z = np.asarray(z, dtype=complex)
        if self.generator_inner is not None:
            return self.generator_inner(z)
        E = BlaschkeProduct(tuple((complex(p), 1) for p in self.nodes))
        return E(z) * self.w(z)

    def w(self, z):
        """``w = 1 + B sum_j c_j k_{z_j}`` (r = 0 only); vanishes at every node."""
        if self.w_coeffs is None:
            raise InfeasibleByStructureError("w is defined only in the r = 0 case")
        z = np.asarray(z, dtype=complex)
        s = sum(c * szego(z, zj) for c, zj in zip(self.w_coeffs, self.nodes))
        return 1.0 + self.B(z) * s


def ideal_structure(problem: InterpolationProblem) -> IdealDescription:
    if problem.r >= 1:
        return IdealDescription(problem.r, lcm(problem.B, problem.E), None, problem.r, problem.nodes, problem.B)
    z = problem.nodes
    Bz = np.asarray(problem.B(z))
    K = 1.0 / (1.0 - np.outer(z, z.conj()))
    A = Bz[:, None] * K
    try:
        c = np.linalg.solve(A, -np.ones(len(z), dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise InternalAssertionError("r = 0 ideal system is singular") from exc
    return IdealDescription(0, None, c, 1, z, problem.B)


def representatives(problem: InterpolationProblem) -> np.ndarray:
    """One node for the cluster at zeros of B (if any), then the free nodes."""
    return problem.nodes[problem.r - 1 :] if problem.r >= 1 else problem.nodes


def _separation(vals: np.ndarray) -> tuple[float, float]:
    if len(vals) < 2:
        return np.inf, 0.0
    gaps = [abs(a - b) for a, b in combinations(vals, 2)]
    return min(gaps), max(gaps)


def _annulus(rng: np.random.Generator, size: int, inner: float = 0.5, outer: float = 1.5) -> np.ndarray:
    return rng.uniform(inner, outer, size) * np.exp(2j * np.pi * rng.uniform(size=size))


def separating_function(problem: InterpolationProblem, seed: int = 0, budget: int = SEPARATION_BUDGET) -> ConstrainedFunction:
    """``g = lam0 + B (c0 + c1 z)`` taking distinct values at the node representatives.

    All ``budget`` draws are scored and the one with the largest relative
    separation is kept, since Lagrange idempotents amplify errors by roughly
    ``(diameter / separation)^(n - 1)``.
    """
    pts = representatives(problem)
    rng = np.random.default_rng(seed)
    best, best_rel, best_sep = None, -1.0, 0.0
    for _ in range(budget):
        lam0, c0, c1 = _annulus(rng, 3)
        g = ConstrainedFunction.from_poly(problem.B, lam0, [c0, c1])
        if len(pts) < 2:
            return g
        sep, diam = _separation(np.asarray(g(pts)))
        rel = sep / diam if diam > 0 else 0.0
        if rel > best_rel:
            best, best_rel, best_sep = g, rel, sep
    if best is None or best_rel < SEPARATION_RELATIVE:
        raise SeparationError(f"no separating function in {budget} draws; best separation {best_sep:.3e}")
    if best_sep < SEPARATION_WARN:
        warnings.warn(f"separating function has node separation {best_sep:.3e}", SeparationWarning, stacklevel=2)
    return best


def idempotents(problem: InterpolationProblem, g: ConstrainedFunction) -> list[ConstrainedFunction]:
    """Lagrange idempotents in ``g`` over the node representatives."""
    pts = representatives(problem)
    vals = np.asarray(g(pts))
    sep, diam = _separation(vals)
    if len(pts) >= 2 and not sep > 1e-12 * max(diam, 1.0):
        raise SeparationError(f"g separates the nodes by only {sep:.3e}")
    out = []
    for j in range(len(pts)):
        e = ConstrainedFunction.constant(problem.B, 1.0)
        for s in range(len(pts)):
            if s != j:
                e = e * ((1.0 / (vals[j] - vals[s])) * (g - vals[s]))
        out.append(e)
    return out


@dataclass(frozen=True)
class DependenceVerdict:
    dependent: bool
    consistent: bool
    alpha: np.ndarray
    residual: float
    violations: tuple[int, ...]


def _targets_equal(a, b, tol: float = 1e-12) -> bool:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    return float(np.max(np.abs(a - b))) <= tol * max(1.0, float(np.max(np.abs(b))))


def dependence_check(kernels, targets, gram=None) -> DependenceVerdict:
    """Forced target equalities when the last kernel depends on the others.

    ``kernels`` are coordinate vectors ``x_1..x_{n+1}`` in a basis with
    Grammian ``gram`` (``gram[a, b] = <e_b, e_a>``; identity if omitted).  If
    ``x_{n+1} = sum alpha_i x_i`` (relative residual below 1e-10), positivity of
    the block Pick matrix forces ``W_i = W_{n+1}`` whenever ``alpha_i != 0``.
    """
    X = np.asarray(kernels, dtype=complex)
    V, u = X[:-1].T, X[-1]
    G = np.eye(X.shape[1]) if gram is None else np.asarray(gram, dtype=complex)
    w, U = np.linalg.eigh(0.5 * (G + G.conj().T))
    S = (U * np.sqrt(np.maximum(w, 0.0))) @ U.conj().T  # G^{1/2}
    alpha, *_ = np.linalg.lstsq(S @ V, S @ u, rcond=None)
    res = S @ (V @ alpha - u)
    scale = max(float(np.linalg.norm(S @ u)), 1e-300)
    residual = float(np.linalg.norm(res)) / scale
    if residual > DEPENDENCE_RESIDUAL:
        return DependenceVerdict(False, True, alpha, residual, ())
    last = targets[-1]
    violations = tuple(i for i, a in enumerate(alpha) if abs(a) > DEPENDENCE_COEF and not _targets_equal(targets[i], last))
    return DependenceVerdict(True, not violations, alpha, residual, violations)


def _zero_cluster_check(problem: InterpolationProblem) -> None:
    """Run the dependence check on the constrained kernels at the zeros of B.

    Coordinates of ``k^v_z`` in the orthogonal system ``(v, B k_{z_1}, .., B k_{z_n})``
    are ``conj(v(z)) e_0 + conj(B(z)) e_z``; a generic ``v = k_alpha / |k_alpha|``
    keeps ``v(alpha) != 0`` at every zero.
    """
    r = problem.r
    if r <= 1:
        return
    z = problem.nodes
    a1 = complex(problem.B.zeros[0][0])
    v = szego(z, a1) * np.sqrt(1 - abs(a1) ** 2)
    Bz = np.asarray(problem.B(z))
    n = len(z)
    coords = np.zeros((n, n + 1), dtype=complex)
    coords[:, 0] = np.conj(v)
    coords[np.arange(n), np.arange(n) + 1] = np.conj(Bz)
    gram = np.zeros((n + 1, n + 1), dtype=complex)
    gram[0, 0] = 1.0
    gram[1:, 1:] = 1.0 / (1.0 - np.outer(z, z.conj()))
    for extra in range(1, r):
        idx = [0] + list(range(r, n)) + [extra]
        verdict = dependence_check(coords[idx], [problem.targets[i] for i in idx], gram)
        if verdict.dependent and not verdict.consistent:
            raise InfeasibleByStructureError(
                f"targets at zeros of B differ (node {extra} vs node 0); no element of H-infinity_B interpolates them"
            )


def construct_interpolant(
    problem: InterpolationProblem, seed: int = 0, g: ConstrainedFunction | None = None
) -> ConstrainedFunction:
    """An element of H-infinity_B taking the target values at every node (no norm control)."""
    _zero_cluster_check(problem)
    g = separating_function(problem, seed) if g is None else g
    es = idempotents(problem, g)
    r = problem.r
    vals = problem.targets[r - 1 :] if r >= 1 else problem.targets
    h = ConstrainedFunction.constant(problem.B, np.zeros_like(vals[0]))
    for wj, e in zip(vals, es):
        h = h + wj * e
    got = np.asarray(h(problem.nodes))
    err = float(np.max(np.abs(got - problem.targets)))
    scale = max(1.0, float(np.max(np.abs(problem.targets))))
    if err > ROUND_TRIP_TOL * scale:
        # small |B| at a free node forces large h coefficients and cancellation
        warnings.warn(f"interpolant misses targets by {err:.3e}", ConditioningWarning, stacklevel=2)
    return h
