"""Constrained Pick feasibility for H-infinity_B.

A solution of norm <= 1 exists iff for every unit ``v`` in ``H^2 (-) B H^2``

    [(1 - w_i conj(w_j)) K^v(z_i, z_j)] >= 0,
    K^v(z, w) = v(z) conj(v(w)) + B(z) conj(B(w)) / (1 - z conj(w)).

The sweep minimizes the smallest eigenvalue of that matrix over the unit
sphere of the model space (``m = deg B`` complex dimensions, written in
orthonormal coordinates ``x`` so that ``v = Q^{-1/2} x`` in label coordinates).
Alongside, it maximizes the norm of the compression of ``M_f^*`` to
``[v] (+) B span{k_z : free nodes}``; the supremum of that norm over ``v`` is
the quotient norm, and ``margin = 1 - sup`` is reported with the verdict.

Both objectives are smooth away from eigenvalue crossings.  They are
minimized by Riemannian gradient descent with Armijo backtracking, run as one
vectorized batch over all seeded restarts; for ``m = 2`` a deterministic grid
over the projective line seeds extra starts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidParameterError
from .modelspace import ModelVector, constrained_kernel, grammian, label_matrix, model_basis
from .problem import InterpolationProblem

log = logging.getLogger(__name__)

TAU_PSD = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 64
    grid: int = 256
    grid_starts: int = 8
    max_iter: int = 400
    gtol: float = 1e-11
    seed: int = 0
    polish: int = 4
    tau_psd: float = TAU_PSD
    # an infeasible raw minimum must not coexist with a clearly positive norm margin
    consistency_band: float = 1e-7


@dataclass
class SweepVerdict:
    feasible: bool
    status: str
    min_lambda: float
    worst_v: ModelVector
    restarts_used: int
    margin: float
    sup_norm: float
    converged: int
    necessary_only: bool = False
    notes: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Classical and constrained Pick matrices
# ---------------------------------------------------------------------------


def classical_pick(nodes, targets, tau: float = TAU_PSD) -> tuple[np.ndarray, bool, float]:
    """Pick matrix ``[(1 - w_i conj(w_j)) / (1 - z_i conj(z_j))]``, PSD verdict, min eigenvalue."""
    z = np.asarray(nodes, dtype=complex)
    w = np.asarray(targets, dtype=complex)
    P = (1 - np.outer(w, w.conj())) / (1 - np.outer(z, z.conj()))
    lam = float(np.linalg.eigvalsh(0.5 * (P + P.conj().T))[0])
    return P, lam >= -tau, lam


def constrained_pick_matrix(problem: InterpolationProblem, v: ModelVector) -> np.ndarray:
    """``[(1 - W_i W_j^*) K^v(z_i, z_j)]``; block form (slot-major) for matrix targets."""
    z = problem.nodes
    K = constrained_kernel(problem.B, v, z[:, None], z[None, :])
    T = _target_blocks(problem.targets)
    n, k = T.shape[0], T.shape[1]
    Kbig = np.einsum("ij,pq->ipjq", K, np.eye(k)).reshape(n * k, n * k)
    D = _block_diag(T)
    return Kbig - D @ Kbig @ D.conj().T


def _target_blocks(targets) -> np.ndarray:
    t = np.asarray(targets, dtype=complex)
    return t[:, None, None] if t.ndim == 1 else t


def _block_diag(T: np.ndarray) -> np.ndarray:
    n, k = T.shape[0], T.shape[1]
    D = np.zeros((n * k, n * k), dtype=complex)
    for i in range(n):
        D[i * k : (i + 1) * k, i * k : (i + 1) * k] = T[i]
    return D


# ---------------------------------------------------------------------------
# Batched objectives on the model-space sphere
# ---------------------------------------------------------------------------


class _SphereModel:
    """Pick-type data ``a(x) = c0 + E x``, ``K = a a^* + C``, block diagonal ``D``."""

    def __init__(self, E: np.ndarray, c0: np.ndarray, C: np.ndarray, T: np.ndarray):
        self.E = E
        self.c0 = c0
        self.C = C
        self.n, self.k = T.shape[0], T.shape[1]
        self.D = _block_diag(T)
        self.DH = self.D.conj().T
        self.Ik = np.eye(self.k)

    def kernel(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a = self.c0 + x @ self.E.T
        Kmat = a[:, :, None] * a[:, None, :].conj() + self.C
        R, n, k = len(x), self.n, self.k
        Kbig = Kmat if k == 1 else np.einsum("rij,pq->ripjq", Kmat, self.Ik).reshape(R, n * k, n * k)
        return a, Kbig

    def _grad(self, a, y, coef_y, coef_z):
        # d/d conj(x) of coef_y * y^*(a a^* (x) I)y + coef_z * y^*D(a a^* (x) I)D^*y
        R, n, k = len(a), self.n, self.k
        Y = y.reshape(R, n, k)
        Z = (y @ self.D.conj()).reshape(R, n, k)  # rows of D^* y
        eta = np.einsum("rip,ri->rp", Y.conj(), a)
        zeta = np.einsum("rip,ri->rp", Z.conj(), a)
        uY = np.einsum("im,rip->rmp", self.E.conj(), Y)
        uZ = np.einsum("im,rip->rmp", self.E.conj(), Z)
        return np.einsum("rp,rmp->rm", coef_y[:, None] * eta, uY) + np.einsum("rp,rmp->rm", coef_z[:, None] * zeta, uZ)

    def pick_min(self, x: np.ndarray, grad: bool = True):
        """Smallest eigenvalue of ``K - D K D^*`` per row of ``x`` (and its Wirtinger gradient)."""
        a, K = self.kernel(x)
        P = K - self.D @ K @ self.DH
        P = 0.5 * (P + P.conj().transpose(0, 2, 1))
        if not grad:
            return np.linalg.eigvalsh(P)[:, 0]
        w, V = np.linalg.eigh(P)
        y = V[:, :, 0]
        ones = np.ones(len(x))
        return w[:, 0], self._grad(a, y, ones, -ones)

    def neg_norm_sq(self, x: np.ndarray, grad: bool = True):
        """``-||compression||^2``: minus the top eigenvalue of the pencil ``(D K D^*, K)``."""
        a, K = self.kernel(x)
        K = 0.5 * (K + K.conj().transpose(0, 2, 1))
        L = np.linalg.cholesky(K)
        A = self.D @ K @ self.DH
        Linv = np.linalg.inv(L)
        M = Linv @ A @ Linv.conj().transpose(0, 2, 1)
        M = 0.5 * (M + M.conj().transpose(0, 2, 1))
        if not grad:
            return -np.linalg.eigvalsh(M)[:, -1]
        w, V = np.linalg.eigh(M)
        mu = w[:, -1]
        y = np.einsum("rji,rj->ri", Linv.conj(), V[:, :, -1])  # L^{-*} w, so that y^* K y = 1
        g = self._grad(a, y, mu, -np.ones(len(x)))
        return -mu, g


def _raw_model(problem: InterpolationProblem, gram) -> _SphereModel:
    z = problem.nodes
    E = label_matrix(gram.labels, z) @ gram.Q_invhalf
    Bz = np.asarray(problem.B(z))
    C = np.outer(Bz, Bz.conj()) / (1 - np.outer(z, z.conj()))
    return _SphereModel(E, np.zeros(len(z), dtype=complex), C, _target_blocks(problem.targets))


def _reduced_model(problem: InterpolationProblem, gram) -> _SphereModel | None:
    """Compression onto ``[v] (+) B span{k_z : free z}`` (r >= 1) or onto node kernels (r = 0)."""
    if problem.r == 0:
        return _raw_model(problem, gram)
    if not problem.zero_targets_consistent(tol=1e-9):
        return None
    zf = problem.free_nodes
    nf = len(zf)
    E = np.zeros((nf + 1, gram.dim), dtype=complex)
    if nf:
        E[1:] = label_matrix(gram.labels, zf) @ gram.Q_invhalf
    c0 = np.zeros(nf + 1, dtype=complex)
    c0[0] = 1.0
    Bz = np.asarray(problem.B(zf))
    C = np.zeros((nf + 1, nf + 1), dtype=complex)
    C[1:, 1:] = np.outer(Bz, Bz.conj()) / (1 - np.outer(zf, zf.conj()))
    T = _target_blocks(problem.targets)
    T = np.concatenate([T[:1], T[problem.r :]], axis=0)
    return _SphereModel(E, c0, C, T)


# ---------------------------------------------------------------------------
# Optimizer
# ---------------------------------------------------------------------------


def _normalize(x):
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _descend(fun, x0: np.ndarray, max_iter: int, gtol: float, ftol: float = 1e-15):
    """Batched Riemannian gradient descent on the unit sphere of C^m with Armijo steps."""
    x = _normalize(x0.astype(complex))
    f, g = fun(x)
    step = np.full(len(x), 0.5)
    done = np.zeros(len(x), dtype=bool)
    for _ in range(max_iter):
        radial = np.real(np.sum(x.conj() * g, axis=1, keepdims=True))
        gp = g - radial * x
        gnorm2 = np.sum(np.abs(gp) ** 2, axis=1)
        done |= gnorm2 < gtol**2
        done |= step < 1e-14
        if done.all():
            break
        xn = _normalize(x - step[:, None] * gp)
        fn, gn = fun(xn)
        accept = (fn <= f - 1e-4 * 2 * step * gnorm2) & ~done
        # accepted steps that no longer move the objective count as settled
        done |= accept & (f - fn <= ftol * (1.0 + np.abs(f)))
        x = np.where(accept[:, None], xn, x)
        f = np.where(accept, fn, f)
        g = np.where(accept[:, None], gn, g)
        step = np.where(accept, np.minimum(step * 2.0, 4.0), step * 0.5)
    return x, f, done


def _polish(fun, x0: np.ndarray, gtol: float, max_iter: int = 200):
    """BFGS on ``y -> fun(y / |y|)`` in real coordinates, for one start."""
    m = len(x0)

    def real_fun(u):
        y = u[:m] + 1j * u[m:]
        r = np.linalg.norm(y)
        x = y / r
        f, g = fun(x[None, :])
        g = g[0] - np.real(np.vdot(x, g[0])) * x
        g = 2 * g / r
        return float(f[0]), np.concatenate([g.real, g.imag])

    res = minimize(real_fun, np.concatenate([x0.real, x0.imag]), jac=True, method="BFGS", options={"gtol": gtol, "maxiter": max_iter})
    x = _normalize((res.x[:m] + 1j * res.x[m:])[None, :])[0]
    f, g = fun(x[None, :])
    gp = g[0] - np.real(np.vdot(x, g[0])) * x
    # gradients below ~sqrt(eps) are not resolvable; 1e-7 bounds the objective error near 1e-14
    return x, float(f[0]), bool(np.linalg.norm(gp) < max(gtol, 1e-7) * (1.0 + abs(float(f[0]))))


def projective_grid(resolution: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Points ``(cos t, e^{i p} sin t)`` of CP^1, ``t`` in [0, pi/2], ``p`` in [0, 2 pi)."""
    t = np.linspace(0.0, np.pi / 2, resolution)
    p = np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)
    T, Pp = np.meshgrid(t, p, indexing="ij")
    x = np.stack([np.cos(T).ravel() + 0j, (np.exp(1j * Pp) * np.sin(T)).ravel()], axis=1)
    return x, T.ravel(), Pp.ravel()


def grid_scan(problem: InterpolationProblem, resolution: int = 256, chunk: int = 8192):
    """Raw minimum eigenvalue on the ``resolution^2`` grid of CP^1 (m = 2 only).

    Returns ``(theta1, theta2, lambda_min)`` arrays; ``theta1`` is the polar and
    ``theta2`` the relative phase angle of the orthonormal coordinates.
    """
    if problem.m != 2:
        raise InvalidParameterError("grid scan is defined for deg B = 2")
    gram = grammian(model_basis(problem.B))
    model = _raw_model(problem, gram)
    x, t1, t2 = projective_grid(resolution)
    vals = np.concatenate([model.pick_min(x[i : i + chunk], grad=False) for i in range(0, len(x), chunk)])
    return t1, t2, vals


def _starts(m: int, cfg: SearchConfig, rng: np.random.Generator) -> np.ndarray:
    x = rng.normal(size=(cfg.restarts, m)) + 1j * rng.normal(size=(cfg.restarts, m))
    return _normalize(x)


def _best(vals: np.ndarray) -> int:
    # deterministic min-reduction keyed on (value, restart index)
    return int(np.lexsort((np.arange(len(vals)), vals))[0])


def _sweep(problem: InterpolationProblem, cfg: SearchConfig, necessary_only: bool) -> SweepVerdict:
    gram = grammian(model_basis(problem.B))
    m = gram.dim
    rng = np.random.default_rng(cfg.seed)
    raw = _raw_model(problem, gram)
    red = _reduced_model(problem, gram)
    x0 = _starts(m, cfg, rng)
    if m == 2 and cfg.grid:
        xg, _, _ = projective_grid(cfg.grid)
        vals = np.concatenate([raw.pick_min(xg[i : i + 8192], grad=False) for i in range(0, len(xg), 8192)])
        top = np.argsort(vals, kind="stable")[: cfg.grid_starts]
        x0 = np.concatenate([x0, xg[top]], axis=0)
    notes: list[str] = []

    xr, fr, conv_r = _descend(raw.pick_min, x0, cfg.max_iter, cfg.gtol)
    if red is not None:
        # rescale by the largest start value so steps and tolerances are O(1)
        scale = max(float(-red.neg_norm_sq(x0, grad=False).min()), 1e-12)

        def scaled(x, grad=True):
            out = red.neg_norm_sq(x, grad)
            return (out[0] / scale, out[1] / scale) if grad else out / scale

        xn, fn, conv_n = _descend(scaled, x0, cfg.max_iter, cfg.gtol)
        if not conv_n.any() and cfg.polish:
            # slow linear convergence on ill-conditioned instances; curvature fixes it
            for j in np.argsort(fn, kind="stable")[: cfg.polish]:
                x, f, ok = _polish(scaled, xn[j], cfg.gtol)
                if f <= fn[j]:
                    xn[j], fn[j] = x, f
                conv_n[j] = ok
        fn = fn * scale
        # cross-feed: evaluate each objective at the other's optimizers
        fr_cross = raw.pick_min(xn, grad=False)
        fn_cross = red.neg_norm_sq(xr, grad=False)
        xr_all = np.concatenate([xr, xn])
        fr_all = np.concatenate([fr, fr_cross])
        fn_all = np.concatenate([fn, fn_cross])
        sup_norm = float(np.sqrt(max(-fn_all.min(), 0.0)))
        margin = 1.0 - sup_norm
    else:
        xr_all, fr_all = xr, fr
        conv_n = np.ones(0, dtype=bool)
        sup_norm, margin = float("nan"), float("nan")
        notes.append("targets at zeros of B disagree; no element of H-infinity_B interpolates them")

    i = _best(fr_all)
    min_lambda = float(fr_all[i])
    worst = ModelVector.from_orthonormal(problem.B, xr_all[i], gram).phase_fixed()
    converged = int(conv_r.sum() + conv_n.sum())
    # the norm route is smooth at its optimum; it decides whether the search settled
    settled = bool(conv_n.any()) if red is not None else bool(conv_r.any())

    feasible = min_lambda >= -cfg.tau_psd
    if not feasible:
        status = "infeasible"
    elif not settled:
        status = "indeterminate"
        notes.append(f"no restart settled within {cfg.max_iter} iterations")
    elif red is not None and margin < -cfg.consistency_band:
        status = "indeterminate"
        notes.append(f"compression norm {sup_norm:.12g} exceeds 1 but no negative Pick eigenvalue was found")
    elif abs(min_lambda) <= cfg.tau_psd and (np.isnan(margin) or margin <= cfg.consistency_band):
        status = "boundary-feasible"
    else:
        status = "feasible"
    if necessary_only:
        notes.append("matrix targets: positivity for all v is necessary but not sufficient")
    log.debug("sweep: status=%s min_lambda=%.3e margin=%.3e", status, min_lambda, margin)
    return SweepVerdict(
        feasible=feasible and status != "indeterminate",
        status=status,
        min_lambda=min_lambda,
        worst_v=worst,
        restarts_used=len(x0),
        margin=margin,
        sup_norm=sup_norm,
        converged=converged,
        necessary_only=necessary_only,
        notes=notes,
    )


def feasibility_sweep(problem: InterpolationProblem, config: SearchConfig | None = None) -> SweepVerdict:
    """Decide scalar constrained Nevanlinna-Pick solvability by sweeping ``v``."""
    if problem.is_matrix:
        raise InvalidParameterError("feasibility_sweep takes scalar targets; use matrix_pick_sweep")
    return _sweep(problem, config or SearchConfig(), necessary_only=False)


def matrix_pick_sweep(problem: InterpolationProblem, config: SearchConfig | None = None) -> SweepVerdict:
    """Block Pick positivity over all ``v`` for matrix targets (a necessary condition only)."""
    if not problem.is_matrix:
        raise InvalidParameterError("matrix_pick_sweep takes k x k matrix targets")
    return _sweep(problem, config or SearchConfig(), necessary_only=True)


def pick_min_eigenvalue(problem: InterpolationProblem, v: ModelVector) -> float:
    P = constrained_pick_matrix(problem, v)
    return float(np.linalg.eigvalsh(0.5 * (P + P.conj().T))[0])


def compression_norm(problem: InterpolationProblem, v: ModelVector) -> float:
    """Norm of ``M_f^*`` compressed to ``[v] (+) B span{k_z : free z}`` for a unit ``v``."""
    gram = grammian(model_basis(problem.B))
    red = _reduced_model(problem, gram)
    if red is None:
        raise InvalidParameterError("targets at zeros of B disagree")
    x = gram.Q_half @ v.coeffs
    return float(np.sqrt(-red.neg_norm_sq(x[None, :], grad=False)[0]))


def gcd_restricted_probe(problem: InterpolationProblem, verdict: SweepVerdict, eps: float = 1e-5, seed: int = 0) -> float:
    """Change in the raw minimum when ``worst_v`` is nudged off ``{v : v(alpha) = 0}``.

    Returns ``|lambda(v') - lambda(v)|`` for a perturbation of size ``eps`` whose
    result has ``gcd(v', B) = 1``; returns 0 when ``worst_v`` already has that property.
    """
    v = verdict.worst_v
    alphas = [a for a, _ in problem.B.zeros]
    if all(abs(v(a)) > 1e-12 for a in alphas):
        return 0.0
    gram = grammian(model_basis(problem.B))
    rng = np.random.default_rng(seed)
    x = gram.Q_half @ v.coeffs
    d = rng.normal(size=x.shape) + 1j * rng.normal(size=x.shape)
    x2 = x + eps * d / np.linalg.norm(d)
    x2 /= np.linalg.norm(x2)
    v2 = ModelVector.from_orthonormal(problem.B, x2, gram)
    return abs(pick_min_eigenvalue(problem, v2) - pick_min_eigenvalue(problem, v))
