"""Command-line entry point: ``python -m hinfb <command> config.json``.

Exit codes: 0 success or feasible, 1 infeasible or negative result,
2 indeterminate, 3 invalid input, 4 internal assertion.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .blaschke import BlaschkeProduct
from .errors import (
    HinfbError,
    InfeasibleByStructureError,
    InternalAssertionError,
    InvalidParameterError,
)

log = logging.getLogger("hinfb")

EXIT_OK, EXIT_NEGATIVE, EXIT_INDETERMINATE, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2, 3, 4
SEED_ENV = "HINFB_SEED"
COMMANDS = ("feasibility", "norm", "envelope", "construct", "lattice", "gap-search", "grammian")


class ConfigError(InvalidParameterError):
    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def _scalar(v) -> bool:
    return isinstance(v, (int, float, str, bool, type(None), np.integer, np.floating, np.bool_))


def dumps(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits and insertion-ordered keys."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        if all(_scalar(v) for v in obj.values()):
            return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(_scalar(v) or (isinstance(v, dict) and all(_scalar(x) for x in v.values())) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps(cplx(obj), indent)
    if isinstance(obj, np.ndarray):
        return dumps(encode(obj), indent)
    return json.dumps(str(obj))


def cplx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def encode(a):
    a = np.asarray(a)
    if a.ndim == 0:
        return cplx(a) if np.iscomplexobj(a) else a.item()
    return [encode(x) for x in a]


def _complex(x, where: str) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, dict) and "re" in x:
        try:
            return complex(float(x["re"]), float(x.get("im", 0.0)))
        except (TypeError, ValueError):
            raise ConfigError(where, "re/im must be numbers") from None
    raise ConfigError(where, "expected a number or {re, im}")


def _complex_array(x, where: str) -> np.ndarray:
    if isinstance(x, list):
        return np.array([_complex_array(v, f"{where}[{i}]") for i, v in enumerate(x)], dtype=complex)
    return np.asarray(_complex(x, where))


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------


def load_config(path: str) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None


def parse_constraint(cfg: dict) -> BlaschkeProduct:
    if "constraint" not in cfg:
        raise ConfigError("constraint", "missing")
    zeros = []
    for i, rec in enumerate(cfg["constraint"]):
        where = f"constraint[{i}]"
        z = _complex(rec, where)
        if abs(z) >= 1:
            raise ConfigError(where, f"|zero| = {abs(z):.17g} >= 1")
        mult = rec.get("mult", 1) if isinstance(rec, dict) else 1
        if not isinstance(mult, int) or mult < 1:
            raise ConfigError(f"{where}.mult", "must be a positive integer")
        zeros.append((z, mult))
    return BlaschkeProduct(tuple(zeros))


def parse_problem(cfg: dict, need_targets: bool = True):
    from .problem import InterpolationProblem

    B = parse_constraint(cfg)
    if "nodes" not in cfg:
        raise ConfigError("nodes", "missing")
    nodes = np.array([_complex(z, f"nodes[{i}]") for i, z in enumerate(cfg["nodes"])], dtype=complex)
    for i, z in enumerate(nodes):
        if abs(z) >= 1:
            raise ConfigError(f"nodes[{i}]", f"|node| = {abs(z):.17g} >= 1")
    if "targets" in cfg:
        targets = _complex_array(cfg["targets"], "targets")
    elif need_targets:
        raise ConfigError("targets", "missing")
    else:
        targets = np.zeros(len(nodes), dtype=complex)
    return InterpolationProblem(B, nodes, targets)


def search_config(cfg: dict, seed: int):
    from .feasibility import SearchConfig

    sc = SearchConfig(seed=seed)
    overrides = dict(cfg.get("search", {}))
    tol = cfg.get("tolerances", {})
    if "tau_psd" in tol:
        overrides["tau_psd"] = float(tol["tau_psd"])
    known = set(SearchConfig.__dataclass_fields__)
    for key in overrides:
        if key not in known:
            raise ConfigError(f"search.{key}", "unknown option")
    return replace(sc, **overrides)


def resolve_seed(cli_seed: int | None, cfg: dict) -> int:
    if cli_seed is not None:
        return cli_seed
    if "seed" in cfg:
        seed = cfg["seed"]
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed", "must be an unsigned integer")
        return seed
    return int(os.environ.get(SEED_ENV, "0"))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _problem_summary(p) -> dict:
    return {
        "constraint": [{"re": a.real, "im": a.imag, "mult": m} for a, m in p.B.zeros],
        "nodes": encode(p.nodes),
        "r": p.r,
        "m": p.m,
        "n": p.n,
    }


def cmd_feasibility(cfg, args) -> tuple[dict, int]:
    from .feasibility import classical_pick, feasibility_sweep, grid_scan, matrix_pick_sweep

    p = parse_problem(cfg)
    sc = search_config(cfg, resolve_seed(args.seed, cfg))
    verdict = matrix_pick_sweep(p, sc) if p.is_matrix else feasibility_sweep(p, sc)
    report = {"command": "feasibility", "seed": sc.seed, "problem": _problem_summary(p)}
    if not p.is_matrix:
        _, ok, lam = classical_pick(p.nodes, p.targets, sc.tau_psd)
        report["classical_pick"] = {"psd": ok, "min_eigenvalue": lam}
    report.update(
        {
            "status": verdict.status,
            "feasible": verdict.feasible,
            "necessary_only": verdict.necessary_only,
            "min_lambda": verdict.min_lambda,
            "margin": verdict.margin,
            "sup_compression_norm": verdict.sup_norm,
            "restarts_used": verdict.restarts_used,
            "converged": verdict.converged,
            "worst_v": {
                "labels": [{"w": cplx(lab.w), "order": lab.order} for lab in verdict.worst_v.labels],
                "coeffs": encode(verdict.worst_v.coeffs),
            },
            "notes": verdict.notes,
        }
    )
    if args.csv:
        if p.m != 2 or p.is_matrix:
            raise ConfigError("--csv", "grid export is available for scalar problems with deg B = 2")
        t1, t2, lam = grid_scan(p, sc.grid)
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta1", "theta2", "phase", "lambda_min"])
            for a, b, c in zip(t1, t2, lam):
                w.writerow([_fmt_float(a), _fmt_float(b), "0", _fmt_float(c)])
        report["csv"] = args.csv
    code = {"infeasible": EXIT_NEGATIVE, "indeterminate": EXIT_INDETERMINATE}.get(verdict.status, EXIT_OK)
    return report, code


def cmd_norm(cfg, args) -> tuple[dict, int]:
    from .oracles import lagrange_element, truncated_norm
    from .quotient import QuotientElement, build_compression, is_contraction, quotient_norm

    p = parse_problem(cfg)
    comp = build_compression(p)
    elem = QuotientElement.from_targets(p)
    nrm = quotient_norm(elem, comp)
    ok, margin = is_contraction(elem, comp)
    report = {
        "command": "norm",
        "problem": _problem_summary(p),
        "dimension": comp.dim,
        "quotient_norm": nrm,
        "contraction": ok,
        "contraction_margin": margin,
    }
    if args.oracle:
        report["oracle_norm"] = truncated_norm(p, lagrange_element(p, elem.lam, elem.free_values))
    return report, EXIT_OK if ok else EXIT_NEGATIVE


def cmd_envelope(cfg, args) -> tuple[dict, int]:
    from .cstar import envelope_report

    p = parse_problem(cfg, need_targets=False)
    rep = envelope_report(p)
    return {"command": "envelope", "problem": _problem_summary(p), **rep}, EXIT_OK


def cmd_construct(cfg, args) -> tuple[dict, int]:
    from .ideal import construct_interpolant, ideal_structure
    from .quotient import QuotientElement, build_compression, quotient_norm

    p = parse_problem(cfg)
    seed = resolve_seed(args.seed, cfg)
    h = construct_interpolant(p, seed=seed)
    ideal = ideal_structure(p)
    residuals = np.abs(np.asarray(h(p.nodes)) - p.targets)
    residuals = residuals.reshape(p.n, -1).max(axis=1)
    report = {
        "command": "construct",
        "seed": seed,
        "problem": _problem_summary(p),
        "interpolant": {"lam": encode(h.lam), "h": encode(h.H)},
        "node_residuals": [float(x) for x in residuals],
        "ideal": {
            "r": ideal.case_r,
            "w_dim": ideal.w_dim,
            "generator_zeros": None if ideal.generator_inner is None else ideal.generator_inner.to_records(),
            "w_coeffs": None if ideal.w_coeffs is None else encode(ideal.w_coeffs),
        },
    }
    if p.r >= 1:
        report["quotient_norm"] = quotient_norm(QuotientElement.from_function(p, h), build_compression(p))
    return report, EXIT_OK


def _subspace(rec: dict, N: int, where: str):
    from .lattice import InvariantSubspace

    a = rec.get("psi_power", 0)
    if not isinstance(a, int) or a < 0:
        raise ConfigError(f"{where}.psi_power", "must be a nonnegative integer")
    V = [_complex_array(v, f"{where}.V[{i}]") for i, v in enumerate(rec.get("V", []))]
    psi = BlaschkeProduct(((0j, a),)) if a else BlaschkeProduct(())
    return InvariantSubspace(psi, np.array(V).reshape(-1, N) if V else np.zeros((0, N)), N)


def cmd_lattice(cfg, args) -> tuple[dict, int]:
    from .lattice import canonical_form, join, meet

    N = cfg.get("N")
    if not isinstance(N, int) or N < 1:
        raise ConfigError("N", "must be a positive integer")
    subs = [_subspace(rec, N, f"subspaces[{i}]") for i, rec in enumerate(cfg.get("subspaces", []))]
    if not subs:
        raise ConfigError("subspaces", "at least one subspace is required")

    def canon(s):
        phi, W = canonical_form(s)
        return {"phi_power": phi.degree, "W": encode(W)}

    report = {"command": "lattice", "N": N, "canonical": [canon(s) for s in subs]}
    if len(subs) >= 2:
        X, mrep = meet(subs[0], subs[1])
        Y, jrep = join(subs[0], subs[1])
        report["meet"] = {
            "phi_power": mrep["phi_X"].degree,
            "lower_bound": mrep["lower_bound"],
            "upper_bound": mrep["upper_bound"],
            "W": encode(X.V_basis),
        }
        report["join"] = {"phi_power": jrep["phi_Y"].degree, "gcd_law": jrep["gcd_law"], "W": encode(Y.V_basis)}
    return report, EXIT_OK


def cmd_gap_search(cfg, args) -> tuple[dict, int]:
    from .quotient import matrix_gap_search

    p = parse_problem(cfg, need_targets=False)
    k = int(cfg.get("k", 2))
    template = p.with_targets(np.zeros((p.n, k, k)))
    seeds = cfg.get("seeds", [resolve_seed(args.seed, cfg)])
    budget = int(cfg.get("budget", 100_000))
    tried = []
    found = None
    for s in seeds:
        res = matrix_gap_search(template, int(s), k=k, budget=budget)
        tried.append({"seed": int(s), "found": res.found, "evaluated": res.evaluated, "ratio": res.ratio})
        if res.found:
            found = res
            break
    report = {"command": "gap-search", "problem": _problem_summary(p), "seeds": tried, "found": found is not None}
    if found is not None:
        fixture = gap_fixture(found)
        report["instance"] = fixture
        if args.fixture:
            Path(args.fixture).write_text(dumps(fixture) + "\n")
            report["fixture"] = args.fixture
    return report, EXIT_OK if found is not None else EXIT_NEGATIVE


def gap_fixture(res) -> dict:
    p = res.problem
    return {
        "seed": res.seed,
        "constraint": [{"re": a.real, "im": a.imag, "mult": m} for a, m in p.B.zeros],
        "nodes": encode(p.nodes),
        "targets": encode(p.targets),
        "quotient_norm": res.quotient_norm,
        "sup_compression_norm": res.sup_compression_norm,
        "sweep_min_lambda": res.sweep_min_lambda,
        "sweep_margin": res.sweep_margin,
        "tau_psd": 1e-9,
        "tightened": res.tightened,
        "compression_dim": p.m + p.n - p.r,
        "scalar_block_bound": p.n - p.r + 1,
    }


def cmd_grammian(cfg, args) -> tuple[str, int]:
    from .modelspace import grammian, model_basis
    from .quotient import compression_labels

    B = parse_constraint(cfg)
    if cfg.get("nodes"):
        labels = compression_labels(parse_problem(cfg, need_targets=False))
    else:
        labels = model_basis(B)
    Q = grammian(labels).Q
    lines = [",".join(f"{_fmt_float(x.real)},{_fmt_float(x.imag)}" for x in row) for row in Q]
    return "\n".join(lines), EXIT_OK


HANDLERS = {
    "feasibility": cmd_feasibility,
    "norm": cmd_norm,
    "envelope": cmd_envelope,
    "construct": cmd_construct,
    "lattice": cmd_lattice,
    "gap-search": cmd_gap_search,
    "grammian": cmd_grammian,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hinfb", description="Constrained Nevanlinna-Pick computations for H-infinity_B.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("config", help="JSON problem configuration")
    ap.add_argument("--seed", type=int, default=None, help=f"overrides config seed and ${SEED_ENV}")
    ap.add_argument("--csv", default=None, help="feasibility: write the deg-2 lambda_min grid here")
    ap.add_argument("--fixture", default=None, help="gap-search: write the certified instance here")
    ap.add_argument("--oracle", action="store_true", help="norm: also run the truncation oracle")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        cfg = load_config(args.config)
        if not isinstance(cfg, dict):
            raise ConfigError(args.config, "top level must be an object")
        report, code = HANDLERS[args.command](cfg, args)
    except (InternalAssertionError, AssertionError) as exc:
        print(f"internal assertion: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except InfeasibleByStructureError as exc:
        print(dumps({"command": args.command, "status": "infeasible", "reason": str(exc)}), file=out)
        return EXIT_NEGATIVE
    except (HinfbError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(report if isinstance(report, str) else dumps(report), file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
