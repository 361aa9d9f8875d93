import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from scipy.stats import unitary_group

from hinfb.blaschke import BlaschkeProduct
from hinfb.cstar import MatrixAlgebraBasis, commutant, envelope_report, generators, star_algebra_closure
from hinfb.errors import UnsupportedCaseError
from hinfb.problem import InterpolationProblem

from .strategies import random_problem, seeds, separated_points

Z2 = BlaschkeProduct.monomial(2)
TWO_ZEROS = InterpolationProblem(BlaschkeProduct.from_points([0, 0.5]), [0, 0.3, -0.4j], [0, 0, 0])


def diagonal_algebra(d):
    units = [np.diag(np.eye(d)[i]).astype(complex) for i in range(d)]
    return star_algebra_closure(units)


class TestGenerators:
    def test_partition_of_unity(self, rng):
        gens = generators(random_problem(rng))
        assert np.max(np.abs(sum(gens) - np.eye(len(gens[0])))) < 1e-12

    @given(seeds)
    def test_orthogonal_idempotents(self, seed):
        gens = generators(random_problem(np.random.default_rng(seed)))
        scale = max(np.linalg.norm(g, 2) for g in gens) ** 2
        for i, a in enumerate(gens):
            assert np.max(np.abs(a @ a - a)) < 1e-12 * scale
            for b in gens[i + 1 :]:
                assert np.max(np.abs(a @ b)) < 1e-12 * scale

    def test_r_zero_rejected(self):
        with pytest.raises(UnsupportedCaseError):
            generators(InterpolationProblem(Z2, [0.5, 0.2], [0, 0]))


class TestClosure:
    def test_identity_only(self):
        assert star_algebra_closure([np.eye(3)]).dim == 1

    def test_matrix_units(self):
        d = 3
        units = [np.outer(np.eye(d)[i], np.eye(d)[j]) for i in range(d) for j in range(d)]
        alg = star_algebra_closure(units)
        assert alg.dim == 9 and alg.closure_residual() < 1e-10

    def test_two_zeros(self):
        alg = star_algebra_closure(generators(TWO_ZEROS))
        assert alg.dim == 16 and alg.closure_residual() < 1e-10

    def test_trace_orthonormal(self):
        alg = star_algebra_closure(generators(TWO_ZEROS))
        S = alg.stacked()
        assert np.allclose(S.conj().T @ S, np.eye(alg.dim), atol=1e-12)

    @settings(max_examples=15)
    @given(seeds)
    def test_unitary_invariance(self, seed):
        rng = np.random.default_rng(seed)
        gens = generators(random_problem(rng))
        U = unitary_group.rvs(len(gens[0]), random_state=rng)
        conj = [U @ g @ U.conj().T for g in gens]
        assert star_algebra_closure(conj).dim == star_algebra_closure(gens).dim


class TestCommutant:
    def test_full_algebra(self):
        dim, basis = commutant(star_algebra_closure(generators(TWO_ZEROS)))
        assert dim == 1
        assert np.allclose(basis[0] / basis[0][0, 0], np.eye(4), atol=1e-10)

    def test_diagonal(self):
        assert commutant(diagonal_algebra(4))[0] == 4

    def test_excess_three_by_two(self):
        B = BlaschkeProduct.from_points([0, 0.4, -0.3])
        p = InterpolationProblem(B, [0, 0.5j, -0.6 + 0.1j], [0, 0, 0])
        alg = star_algebra_closure(generators(p))
        cdim, _ = commutant(alg)
        assert cdim > 1 and cdim - 1 == p.m - (p.n - p.r)

    def test_borderline_warns(self):
        eps = 1e-9
        A = np.diag([1.0, 1.0 + eps]).astype(complex)
        with pytest.warns(Warning):
            commutant(MatrixAlgebraBasis(2, (np.eye(2) / np.sqrt(2), A - np.trace(A) / 2 * np.eye(2)), np.ones(2)))

    @settings(max_examples=15)
    @given(seeds)
    def test_fullness_routes_agree(self, seed):
        alg = star_algebra_closure(generators(random_problem(np.random.default_rng(seed))))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert (commutant(alg)[0] == 1) == (alg.dim == alg.d**2)


class TestEnvelope:
    @pytest.mark.parametrize("n", [3, 4])
    def test_single_origin_node(self, n):
        nodes = [0, 0.5, -0.4j, 0.3 + 0.3j][:n]
        rep = envelope_report(InterpolationProblem(Z2, nodes, np.zeros(n)))
        assert rep["is_full"] and rep["envelope"] == f"M_{n + 1}" and rep["algebra_dim"] == (n + 1) ** 2

    def test_two_zeros(self):
        rep = envelope_report(TWO_ZEROS)
        assert (rep["algebra_dim"], rep["commutant_dim"], rep["envelope"]) == (16, 1, "M_4")

    def test_not_full(self):
        rep = envelope_report(InterpolationProblem(Z2, [0, 0.5], [0, 0]))
        assert not rep["is_full"] and rep["agreement"] and rep["envelope"] is None

    def test_dimension_gap_on_gap_configs(self, rng):
        zeros = [0, 0.5]
        free = separated_points(rng, 3, avoid=zeros)
        p = InterpolationProblem(BlaschkeProduct.from_points(zeros), np.concatenate([[0], free]), np.zeros(4))
        rep = envelope_report(p)
        assert rep["d"] > (p.n - p.r) + 1
