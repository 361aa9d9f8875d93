"""Exact norms in the quotient H-infinity_B / I through a finite compression.

For ``r >= 1`` the ideal is ``lcm(B, E) H-infinity`` and the quotient norm of
``f`` is the norm of ``M_f^*`` on ``K = H^2 (-) lcm(B, E) H^2``.  In the basis

    {z^i k_alpha^(i+1) : zeros alpha of B, i < mult}  u  {k_z : free nodes z}

``M_f^*`` acts diagonally with entries ``conj(lam)`` (on every zero label) and
``conj(f(z))`` (on free nodes), so with ``R = Q^{1/2}`` the map
``rho(f) = R^{-1} D_f R`` is a completely isometric copy of the quotient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalAssertionError, InvalidParameterError, UnsupportedCaseError
from .modelspace import GrammianRep, Label, grammian, model_basis
from .problem import InterpolationProblem

TAU_PSD = 1e-9
# outside this band around norm 1 the two contraction tests must agree
AGREEMENT_BAND = 1e-6


@dataclass(frozen=True)
class CompressionRep:
    problem: InterpolationProblem
    labels: tuple[Label, ...]
    gram: GrammianRep

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        return self.problem.m

    @property
    def n_free(self) -> int:
        return self.problem.n - self.problem.r


def compression_labels(problem: InterpolationProblem) -> list[Label]:
    return model_basis(problem.B) + [Label(complex(z), 0) for z in problem.free_nodes]


def build_compression(problem: InterpolationProblem) -> CompressionRep:
    if problem.r < 1:
        raise UnsupportedCaseError(
            "exact quotient norms need at least one node at a zero of B (r >= 1); "
            "use the feasibility sweep and the truncation oracle for r = 0"
        )
    labels = compression_labels(problem)
    gram = grammian(labels)
    if gram.dim != problem.m + problem.n - problem.r:
        raise InternalAssertionError(f"basis size {gram.dim} != m + n - r")
    return CompressionRep(problem, tuple(gram.labels), gram)


@dataclass(frozen=True)
class QuotientElement:
    """Coset ``f + I`` recorded by its value ``lam`` at the zeros of B and its free-node values.

    Scalar mode: ``lam`` complex, ``free_values`` shape ``(n - r,)``.
    Matrix mode: ``lam`` ``k x k``, ``free_values`` shape ``(n - r, k, k)``.
    """

    lam: complex | np.ndarray
    free_values: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=complex)
        fv = np.asarray(self.free_values, dtype=complex)
        if fv.shape[1:] != lam.shape:
            raise InvalidParameterError(f"value shapes disagree: lam {lam.shape}, free values {fv.shape}")
        object.__setattr__(self, "lam", lam[()] if lam.ndim == 0 else lam)
        object.__setattr__(self, "free_values", fv)

    @property
    def k(self) -> int:
        return 1 if np.ndim(self.lam) == 0 else np.shape(self.lam)[0]

    @property
    def is_matrix(self) -> bool:
        return np.ndim(self.lam) == 2

    @classmethod
    def from_function(cls, problem: InterpolationProblem, f) -> "QuotientElement":
        """Coset of a ConstrainedFunction ``f`` (its ``lam`` and values at free nodes)."""
        return cls(f.lam, np.asarray(f(problem.free_nodes)))

    @classmethod
    def from_targets(cls, problem: InterpolationProblem) -> "QuotientElement":
        """Coset of any interpolant of ``problem`` (requires ``r >= 1`` and consistent zero targets)."""
        if problem.r < 1:
            raise UnsupportedCaseError("targets determine a coset directly only when r >= 1")
        if not problem.zero_targets_consistent():
            raise InvalidParameterError("targets at zeros of B differ; no element of H-infinity_B interpolates them")
        return cls(problem.targets[0], problem.free_targets)

    def diagonal(self, m: int) -> list:
        """Slot values of ``D_f`` in basis order: ``lam`` repeated ``m`` times, then free values."""
        return [self.lam] * m + list(self.free_values)

    def __mul__(self, other: "QuotientElement") -> "QuotientElement":
        if self.is_matrix:
            return QuotientElement(self.lam @ other.lam, self.free_values @ other.free_values)
        return QuotientElement(self.lam * other.lam, self.free_values * other.free_values)

    def __rmul__(self, c) -> "QuotientElement":
        return QuotientElement(c * self.lam, c * self.free_values)

    def __add__(self, other: "QuotientElement") -> "QuotientElement":
        return QuotientElement(self.lam + other.lam, self.free_values + other.free_values)


def _check_dims(elem: QuotientElement, comp: CompressionRep) -> None:
    if len(elem.free_values) != comp.n_free:
        raise InvalidParameterError(f"element has {len(elem.free_values)} free values, compression has {comp.n_free}")


def _block_diag(elem: QuotientElement, m: int) -> np.ndarray:
    slots = elem.diagonal(m)
    if not elem.is_matrix:
        return np.diag(np.asarray(slots, dtype=complex))
    k = elem.k
    D = np.zeros((len(slots) * k, len(slots) * k), dtype=complex)
    for s, blk in enumerate(slots):
        D[s * k : (s + 1) * k, s * k : (s + 1) * k] = blk
    return D


def _lifted(mat: np.ndarray, k: int) -> np.ndarray:
    # slot-major ordering: slot a, component l -> index a*k + l
    return mat if k == 1 else np.kron(mat, np.eye(k))


def diagonal_matrix(elem: QuotientElement, comp: CompressionRep) -> np.ndarray:
    """``D_f`` (block diagonal in matrix mode)."""
    _check_dims(elem, comp)
    return _block_diag(elem, comp.m)


def rho(elem: QuotientElement, comp: CompressionRep) -> np.ndarray:
    """``Q^{-1/2} D_f Q^{1/2}``; in matrix mode ``Q`` is lifted to ``Q (x) I_k``."""
    D = diagonal_matrix(elem, comp)
    k = elem.k if elem.is_matrix else 1
    return _lifted(comp.gram.Q_invhalf, k) @ D @ _lifted(comp.gram.Q_half, k)


def quotient_norm(elem: QuotientElement, comp: CompressionRep) -> float:
    """``||f + I||``, the largest singular value of ``rho(f)``."""
    return float(np.linalg.norm(rho(elem, comp), 2))


def contraction_margin(elem: QuotientElement, comp: CompressionRep) -> float:
    """Smallest eigenvalue of ``Q - D_f Q D_f^*``."""
    D = diagonal_matrix(elem, comp)
    k = elem.k if elem.is_matrix else 1
    Qk = _lifted(comp.gram.Q, k)
    S = Qk - D @ Qk @ D.conj().T
    return float(np.linalg.eigvalsh(0.5 * (S + S.conj().T))[0])


def is_contraction(elem: QuotientElement, comp: CompressionRep, tau: float = TAU_PSD) -> tuple[bool, float]:
    """Grammian contraction test, cross-checked against the singular-value route."""
    margin = contraction_margin(elem, comp)
    ok = margin >= -tau
    norm = quotient_norm(elem, comp)
    if ok != (norm <= 1 + tau) and abs(norm - 1) > AGREEMENT_BAND:
        raise InternalAssertionError(f"contraction tests disagree: margin {margin:.3e}, norm {norm:.12f}")
    return ok, margin


def mfstar_on_label(f, label: Label) -> dict[Label, complex]:
    """``M_f^*(z^m k_w^{m+1}) = sum_j conj(f^{(j)}(w))/j! z^{m-j} k_w^{m-j+1}``.

    ``f`` is anything with a ``jet(w, order)`` method returning ``f^{(j)}(w)/j!``.
    """
    w, m = label
    jet = f.jet(w, m)
    return {Label(w, m - j): complex(np.conj(jet[j])) for j in range(m + 1)}


def mfstar_matrix(f, comp: CompressionRep) -> np.ndarray:
    """Matrix of ``M_f^*`` on the compression basis; column ``b`` holds the image of label ``b``."""
    index = {lab: a for a, lab in enumerate(comp.labels)}
    A = np.zeros((comp.dim, comp.dim), dtype=complex)
    for b, lab in enumerate(comp.labels):
        for target, coef in mfstar_on_label(f, lab).items():
            a = index.get(target)
            if a is None:
                raise InternalAssertionError(f"image label {target} outside the compression basis")
            A[a, b] += coef
    return A


# ---------------------------------------------------------------------------
# Matrix gap search
# ---------------------------------------------------------------------------

GAP_BUDGET = 100_000
GAP_SCREEN_CHUNK = 64


@dataclass
class GapResult:
    """Outcome of a gap search; ``targets`` are the certified (scaled) targets in node order."""

    found: bool
    seed: int
    evaluated: int
    problem: InterpolationProblem | None
    ratio: float
    quotient_norm: float
    sup_compression_norm: float
    sweep_min_lambda: float
    sweep_margin: float
    tightened: dict

    @property
    def targets(self):
        return None if self.problem is None else self.problem.targets


def _screen_points(m: int, rng: np.random.Generator, count: int = 256) -> np.ndarray:
    from .feasibility import projective_grid

    if m == 2:
        return projective_grid(16)[0]
    x = rng.normal(size=(count, m)) + 1j * rng.normal(size=(count, m))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _screen(template: InterpolationProblem, T: np.ndarray, Linv: np.ndarray, Kx: np.ndarray, comp: CompressionRep):
    """Batched ``(quotient norm, grid estimate of sup_v ||sigma_v||)`` for targets ``T`` of shape (I, n, k, k)."""
    I, n, k = T.shape[0], T.shape[1], T.shape[2]
    r, m = template.r, template.m
    slots = np.concatenate([np.repeat(T[:, :1], m, axis=1), T[:, r:]], axis=1)  # (I, d, k, k)
    d = slots.shape[1]
    D = np.zeros((I, d * k, d * k), dtype=complex)
    for s in range(d):
        D[:, s * k : (s + 1) * k, s * k : (s + 1) * k] = slots[:, s]
    Rinv, R = _lifted(comp.gram.Q_invhalf, k), _lifted(comp.gram.Q_half, k)
    qn = np.linalg.svd(Rinv @ D @ R, compute_uv=False)[:, 0]
    red = np.concatenate([T[:, :1], T[:, r:]], axis=1)  # virtual zero node, then free nodes
    N = red.shape[1]
    Dr = np.zeros((I, N * k, N * k), dtype=complex)
    for s in range(N):
        Dr[:, s * k : (s + 1) * k, s * k : (s + 1) * k] = red[:, s]
    A = Dr[:, None] @ Kx[None] @ Dr.conj().transpose(0, 2, 1)[:, None]
    M = Linv[None] @ A @ Linv.conj().transpose(0, 2, 1)[None]
    top = np.linalg.eigvalsh(0.5 * (M + M.conj().transpose(0, 1, 3, 2)))[..., -1]
    return qn, np.sqrt(np.maximum(top.max(axis=1), 0.0))


def matrix_gap_search(
    template: InterpolationProblem,
    seed: int,
    k: int = 2,
    budget: int = GAP_BUDGET,
    target_ratio: float = 1.05,
    slack: float = 1e-3,
    sweep_config=None,
) -> GapResult:
    """Search ``k x k`` targets whose block Pick matrices pass for every ``v`` while the quotient norm exceeds 1.

    Random targets are screened in batches by the ratio of the exact matrix
    quotient norm to a grid estimate of ``sup_v ||sigma_v||``.  The best
    candidate is rescaled so that the supremum sits at ``1 / (1 + slack)`` and
    certified by ``matrix_pick_sweep``; a tightened rerun (more restarts, smaller
    PSD tolerance) and the truncation oracle for the norm are recorded.
    """
    from .feasibility import SearchConfig, _reduced_model, matrix_pick_sweep
    from .modelspace import grammian as _grammian
    from .modelspace import model_basis as _model_basis
    from .oracles import lagrange_element, truncated_norm

    if template.r < 1 or template.m < 2 or template.n - template.r < template.m:
        raise InvalidParameterError("gap search needs r >= 1, m >= 2 and n - r >= m")
    comp = build_compression(template)
    if comp.dim <= (template.n - template.r) + 1:
        raise InternalAssertionError("compression dimension does not exceed the scalar block bound")
    rng = np.random.default_rng(seed)
    n = template.n
    mgram = _grammian(_model_basis(template.B))
    probe = template.with_targets(np.zeros((n, k, k)))
    model = _reduced_model(probe, mgram)
    x = _screen_points(template.m, rng)
    _, Kx = model.kernel(x)
    Linv = np.linalg.inv(np.linalg.cholesky(0.5 * (Kx + Kx.conj().transpose(0, 2, 1))))

    best_ratio, best_T, evaluated = 0.0, None, 0
    while evaluated < budget and best_ratio < target_ratio:
        size = min(GAP_SCREEN_CHUNK, budget - evaluated)
        T = rng.normal(size=(size, n, k, k)) + 1j * rng.normal(size=(size, n, k, k))
        T[:, 1 : template.r] = T[:, :1]
        qn, sup = _screen(template, T, Linv, Kx, comp)
        ratio = qn / sup
        i = int(np.argmax(ratio))
        if ratio[i] > best_ratio:
            best_ratio, best_T = float(ratio[i]), T[i]
        evaluated += size

    cfg = sweep_config or SearchConfig(seed=seed)
    raw = template.with_targets(best_T)
    sup = matrix_pick_sweep(raw, cfg).sup_norm
    scaled = template.with_targets(best_T / (sup * (1 + slack)))
    verdict = matrix_pick_sweep(scaled, cfg)
    qn = quotient_norm(QuotientElement.from_targets(scaled), comp)
    found = verdict.status == "feasible" and verdict.margin >= 1e-6 and qn >= 1 + 1e-4
    tightened = {}
    if found:
        tight = matrix_pick_sweep(
            scaled,
            SearchConfig(restarts=4 * cfg.restarts, max_iter=2 * cfg.max_iter, seed=seed + 1, tau_psd=1e-11),
        )
        f = lagrange_element(scaled, scaled.targets[0], scaled.free_targets)
        oracle = truncated_norm(scaled, f)
        tightened = {
            "min_lambda": tight.min_lambda,
            "margin": tight.margin,
            "status": tight.status,
            "tau_psd": 1e-11,
            "oracle_norm": oracle,
        }
        found = tight.status == "feasible" and tight.margin >= 1e-6 and oracle >= 1 + 1e-4
    return GapResult(
        found=found,
        seed=seed,
        evaluated=evaluated,
        problem=scaled,
        ratio=qn / verdict.sup_norm,
        quotient_norm=qn,
        sup_compression_norm=verdict.sup_norm,
        sweep_min_lambda=verdict.min_lambda,
        sweep_margin=verdict.margin,
        tightened=tightened,
    )
