"""Acceptance criteria, one test each; every test records a single pass/fail line."""

import json
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from hinfb.blaschke import BlaschkeProduct, divides, gcd
from hinfb.cli import parse_problem
from hinfb.constrained import ConstrainedFunction
from hinfb.cstar import envelope_report
from hinfb.feasibility import SearchConfig, classical_pick, feasibility_sweep, matrix_pick_sweep
from hinfb.ideal import construct_interpolant
from hinfb.lattice import InvariantSubspace, canonical_form, decomposition_consistency, join, meet
from hinfb.modelspace import Label, eval_label, inner_product
from hinfb.oracles import lagrange_element, quadrature_inner, truncated_norm
from hinfb.problem import InterpolationProblem
from hinfb.quotient import QuotientElement, build_compression, matrix_gap_search, mfstar_matrix, quotient_norm

from .acceptance_log import record
from .strategies import disk_points, random_problem, separated_points

pytestmark = pytest.mark.slow

ROOT = Path(__file__).resolve().parents[1]
FIXTURE = ROOT / "tests" / "fixtures" / "gap_instance.json"
ONE = BlaschkeProduct(())


def envelope_case(rng, m, free, r=None):
    zeros = separated_points(rng, m, 0.7)
    B = BlaschkeProduct.from_points(zeros)
    r = r if r is not None else int(rng.integers(1, m + 1))
    nodes = np.concatenate([zeros[:r], separated_points(rng, free, 0.8, avoid=zeros)])
    return InterpolationProblem(B, nodes, np.zeros(len(nodes)))


def test_01_envelope_dichotomy():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    cases = [envelope_case(rng, m, f, r=1) for m in (2, 3) for f in (1, 2, 3)]
    for _ in range(20):
        cases.append(envelope_case(rng, int(rng.integers(2, 4)), int(rng.integers(1, 4))))
    reports = [envelope_report(p) for p in cases]
    elapsed = time.perf_counter() - t0
    agree = sum(rep["agreement"] and rep["is_full"] == (rep["m"] <= rep["n"] - rep["r"]) for rep in reports)
    ok = agree == len(cases) and elapsed < 30
    record(1, ok, f"envelope agreement {agree}/{len(cases)} (9 grid + 20 random), {elapsed:.1f} s")
    assert ok


def test_02_two_zeros_three_nodes():
    p = InterpolationProblem(BlaschkeProduct.from_points([0, 0.5]), [0, 0.3, -0.4j], [0, 0, 0])
    rep = envelope_report(p)
    ok = rep["algebra_dim"] == 16 and rep["commutant_dim"] == 1
    record(2, ok, f"algebra_dim {rep['algebra_dim']}, commutant_dim {rep['commutant_dim']}, envelope {rep['envelope']}")
    assert ok


def test_03_single_origin_node_envelopes():
    nodes = [0, 0.5, -0.4j, 0.3 + 0.3j]
    dims = {}
    for n in (3, 4):
        rep = envelope_report(InterpolationProblem(BlaschkeProduct.monomial(2), nodes[:n], np.zeros(n)))
        dims[n] = rep["algebra_dim"]
    ok = dims == {3: 16, 4: 25}
    record(3, ok, f"algebra dims n=3: {dims[3]}, n=4: {dims[4]} (expected 16, 25)")
    assert ok


def test_04_quotient_norm_oracle():
    rng = np.random.default_rng(104)
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    while count < 50:
        p = random_problem(rng, m_max=4, free_max=4)
        if p.n > 5:
            continue
        elem = QuotientElement.from_targets(p)
        f = lagrange_element(p, elem.lam, elem.free_values)
        exact = quotient_norm(elem, build_compression(p))
        worst = max(worst, abs(exact - truncated_norm(p, f)) / exact)
        count += 1
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 120
    record(4, ok, f"worst relative deviation {worst:.2e} on 50 problems, {elapsed:.1f} s")
    assert ok


def test_05_sweep_matches_norm():
    rng = np.random.default_rng(105)
    t0 = time.perf_counter()
    matched = skipped = 0
    mismatches = []
    for i in range(30):
        p = random_problem(rng)
        h = construct_interpolant(p)
        nrm = quotient_norm(QuotientElement.from_function(p, h), build_compression(p))
        # spread instances across both sides of the boundary
        p = p.with_targets(p.targets * rng.uniform(0.5, 1.5) / nrm)
        h = construct_interpolant(p)
        nrm = quotient_norm(QuotientElement.from_function(p, h), build_compression(p))
        verdict = feasibility_sweep(p)
        if abs(nrm - 1) < 1e-4:
            skipped += 1
        elif verdict.feasible == (nrm <= 1 + 1e-9) and verdict.status != "indeterminate":
            matched += 1
        else:
            mismatches.append((i, nrm, verdict.status))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 300
    record(5, ok, f"{matched} matched, {skipped} within 1e-4 of boundary, mismatches {mismatches}, {elapsed:.1f} s")
    assert ok


def test_06_classical_reduction():
    rng = np.random.default_rng(106)
    zeta = np.exp(2j * np.pi * np.arange(4096) / 4096)
    feasible = necessary = 0
    for _ in range(100):
        p = random_problem(rng)
        lam = complex(rng.normal() + 1j * rng.normal())
        poly = rng.normal(size=3) + 1j * rng.normal(size=3)
        f = ConstrainedFunction.from_poly(p.B, lam, poly)
        sup = float(np.max(np.abs(f(zeta))))
        scale = rng.uniform(0.3, 1.0) / (sup * (1 + 1e-3))
        q = p.with_targets(scale * np.asarray(f(p.nodes)))
        verdict = feasibility_sweep(q)
        feasible += verdict.feasible
        if verdict.feasible:
            necessary += classical_pick(q.nodes, q.targets)[1]
    ok = feasible == 100 and necessary == feasible
    record(6, ok, f"sweep feasible {feasible}/100, classical Pick PSD in {necessary}/{feasible} feasible cases")
    assert ok


def test_07_grammian_quadrature():
    rng = np.random.default_rng(107)
    worst = 0.0
    for _ in range(50):
        w = disk_points(rng, 2, radius=0.8)
        a = Label(complex(w[0]), int(rng.integers(0, 4)))
        b = Label(complex(w[1]), int(rng.integers(0, 4)))
        ref = quadrature_inner(lambda z: eval_label(a, z), lambda z: eval_label(b, z))
        worst = max(worst, abs(inner_product(a, b) - ref))
    ok = worst < 1e-9
    record(7, ok, f"worst absolute deviation {worst:.2e} on 50 inner products (2^14-point quadrature)")
    assert ok


def test_08_adjoint_multiplication_diagonal():
    rng = np.random.default_rng(108)
    off_worst = diag_worst = 0.0
    for _ in range(20):
        p = random_problem(rng, mults=True)
        comp = build_compression(p)
        f = ConstrainedFunction.from_poly(p.B, complex(rng.normal() + 1j * rng.normal()), rng.normal(size=3) + 1j * rng.normal(size=3))
        A = mfstar_matrix(f, comp)
        values = [f.lam] * comp.m + list(np.asarray(f(p.free_nodes)))
        off_worst = max(off_worst, float(np.max(np.abs(A - np.diag(np.diag(A))))))
        diag_worst = max(diag_worst, float(np.max(np.abs(np.diag(A) - np.conj(values)))))
    ok = off_worst < 1e-12 and diag_worst < 1e-12
    record(8, ok, f"off-diagonal max {off_worst:.2e}, diagonal deviation {diag_worst:.2e} over 20 functions")
    assert ok


def _random_subspace(rng, N):
    a = int(rng.integers(0, 3))
    V = []
    for _ in range(int(rng.integers(0, 3))):
        v = np.zeros(N)
        low = int(rng.integers(0, N))
        v[low : int(rng.integers(low, N)) + 1] = rng.integers(-2, 3, size=1)[0] or 1
        v[low] = v[low] or 1
        V.append(v)
    V = np.array(V).reshape(-1, N)
    if len(V) == 2 and np.linalg.matrix_rank(V) < 2:
        V = V[:1]
    return InvariantSubspace(BlaschkeProduct.monomial(a) if a else ONE, V, N)


def test_09_lattice():
    phi, W = canonical_form(InvariantSubspace(ONE, [[0, 1]], 2))
    shift_ok = phi.same_zeros(BlaschkeProduct.monomial(1)) and np.linalg.matrix_rank(W) == 2
    shift_ok &= decomposition_consistency(ONE, [[0, 1]], BlaschkeProduct.monomial(1), [[1, 0], [0, 1]], 2)["equal"]
    m1 = InvariantSubspace(ONE, [[1, 0, 1, 0, 0], [0, 0, 0, 1, 0]], 5)
    m2 = InvariantSubspace(ONE, [[1, 0, -1, 0, 0], [0, 0, 0, 1, 0]], 5)
    _, rep = meet(m1, m2)
    z5_ok = rep["phi_M"].degree == 0 and rep["phi_N"].degree == 0 and divides(BlaschkeProduct.monomial(3), rep["phi_X"])
    rng = np.random.default_rng(109)
    joins = 0
    for _ in range(200):
        N = int(rng.integers(1, 7))
        s1, s2 = _random_subspace(rng, N), _random_subspace(rng, N)
        _, jrep = join(s1, s2)
        joins += jrep["phi_Y"].same_zeros(gcd(jrep["phi_M"], jrep["phi_N"]))
    ok = shift_ok and z5_ok and joins == 200
    record(9, ok, f"shift identity {shift_ok}, z^5 meet divisor degree {rep['phi_X'].degree} (z^3 | phi_X: {z5_ok}), join law {joins}/200")
    assert ok


def test_10_matrix_gap():
    t0 = time.perf_counter()
    template = InterpolationProblem(
        BlaschkeProduct.monomial(2), [0, 0.6, -0.3 + 0.5j, -0.4 - 0.45j], np.zeros((4, 2, 2))
    )
    found = []
    for seed in (0, 1, 2):
        res = matrix_gap_search(template, seed, k=2)
        if res.found and res.sweep_margin >= 1e-6 and res.quotient_norm >= 1 + 1e-4 and res.tightened.get("status") == "feasible":
            found.append((seed, res.quotient_norm, res.sweep_margin))
    # frozen instance: re-derive every certified quantity
    fx = json.loads(FIXTURE.read_text())
    p = parse_problem(fx)
    nrm = quotient_norm(QuotientElement.from_targets(p), build_compression(p))
    sweep = matrix_pick_sweep(p)
    fixture_ok = sweep.feasible and sweep.margin >= 1e-6 and nrm >= 1 + 1e-4 and abs(nrm - fx["quotient_norm"]) < 1e-9
    elapsed = time.perf_counter() - t0
    ok = bool(found) and fixture_ok and elapsed < 600
    record(10, ok, f"gap instances for seeds {[s for s, _, _ in found]} (norm, margin {[(round(n, 4), float(f'{m:.1e}')) for _, n, m in found]}); fixture norm {nrm:.6f} margin {sweep.margin:.1e}; {elapsed:.1f} s")
    assert ok


def test_11_interpolant_round_trip():
    rng = np.random.default_rng(111)
    worst_fit = worst_member = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for _ in range(100):
            p = random_problem(rng, mults=True)
            h = construct_interpolant(p)
            scale = max(1.0, float(np.max(np.abs(p.targets))))
            worst_fit = max(worst_fit, float(np.max(np.abs(h(p.nodes) - p.targets))) / scale)
            base = h(p.B.zeros[0][0])
            for alpha, mult in p.B.zeros:
                jet = h.jet(alpha, mult - 1)
                worst_member = max(worst_member, abs(jet[0] - base), float(np.max(np.abs(jet[1:]), initial=0.0)))
    ok = worst_fit < 1e-9 and worst_member < 1e-9
    record(11, ok, f"worst target residual {worst_fit:.2e}, worst membership defect {worst_member:.2e} on 100 problems")
    assert ok
