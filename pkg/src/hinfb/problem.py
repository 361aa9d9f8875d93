"""Interpolation problem data for H-infinity_B."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blaschke import TAU_ZERO, BlaschkeProduct, match_points
from .errors import InvalidParameterError


@dataclass(frozen=True)
class InterpolationProblem:
    """Nodes, targets and the constraint ``B`` of an H-infinity_B interpolation problem.

    Nodes are reordered on construction so that the first ``r`` are zeros of
    ``B`` (snapped to the exact zero); ``perm[j]`` is the input index of node
    ``j``.  Targets are complex scalars, or ``k x k`` matrices in matrix mode.
    """

    B: BlaschkeProduct
    nodes: np.ndarray
    targets: np.ndarray
    r: int = field(init=False)
    perm: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        B = self.B
        if B.degree < 2:
            raise InvalidParameterError(f"constraint B must have total multiplicity >= 2, got {B.degree}")
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=complex))
        targets = np.asarray(self.targets, dtype=complex)
        n = len(nodes)
        if n < 1:
            raise InvalidParameterError("at least one node is required")
        if targets.shape[:1] != (n,):
            raise InvalidParameterError(f"expected {n} targets, got shape {targets.shape}")
        if targets.ndim not in (1, 3) or (targets.ndim == 3 and targets.shape[1] != targets.shape[2]):
            raise InvalidParameterError("targets must be scalars or square matrices of a common size")
        if np.any(np.abs(nodes) >= 1):
            raise InvalidParameterError("all nodes must lie in the open unit disk")
        for i in range(n):
            for j in range(i):
                if abs(nodes[i] - nodes[j]) < TAU_ZERO:
                    raise InvalidParameterError(f"nodes {j} and {i} coincide within {TAU_ZERO:g}")
        zero_idx, free_idx = [], []
        snapped = nodes.copy()
        for j, z in enumerate(nodes):
            for alpha, _ in B.zeros:
                if match_points(z, alpha):
                    snapped[j] = alpha
                    zero_idx.append(j)
                    break
            else:
                free_idx.append(j)
        perm = tuple(zero_idx + free_idx)
        object.__setattr__(self, "nodes", snapped[list(perm)])
        object.__setattr__(self, "targets", targets[list(perm)])
        object.__setattr__(self, "r", len(zero_idx))
        object.__setattr__(self, "perm", perm)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return self.B.degree

    @property
    def is_matrix(self) -> bool:
        return self.targets.ndim == 3

    @property
    def k(self) -> int:
        return self.targets.shape[1] if self.is_matrix else 1

    @property
    def zero_nodes(self) -> np.ndarray:
        return self.nodes[: self.r]

    @property
    def free_nodes(self) -> np.ndarray:
        return self.nodes[self.r :]

    @property
    def free_targets(self) -> np.ndarray:
        return self.targets[self.r :]

    @property
    def E(self) -> BlaschkeProduct:
        """Blaschke product with simple zeros at the nodes."""
        return BlaschkeProduct(tuple((z, 1) for z in self.nodes))

    def zero_targets_consistent(self, tol: float = 1e-12) -> bool:
        """Targets at zeros of B must coincide for any element of H-infinity_B."""
        if self.r <= 1:
            return True
        t0 = self.targets[0]
        return all(np.max(np.abs(self.targets[j] - t0)) <= tol * max(1.0, np.max(np.abs(t0))) for j in range(1, self.r))

    def with_targets(self, targets) -> "InterpolationProblem":
        """Same B and nodes (in the current order) with new targets."""
        return InterpolationProblem(self.B, self.nodes, np.asarray(targets, dtype=complex))
