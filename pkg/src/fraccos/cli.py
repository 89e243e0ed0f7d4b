"""Command-line front end: ``fraccos solve | verify | convergence``.

A problem is described by a YAML file::

    alpha: 1.5
    A: [[-0.2, 0.05], [0.05, -0.1]]        # or {builder: laplacian, size: 3, scale: 0.1}
    B: {builder: random, size: 2, norm: 0.05}
    t_grid: {start: 0.05, stop: 2.0, steps: 40}
    tol: 1.0e-8
    lambda_list: [1.5, 2.5, 5.0]
    seed: 7

Matrix builders: ``laplacian`` (``scale * tridiag(1, -2, 1)``),
``diagonal`` (``values``), ``random_symmetric`` (``size``,
``spectral_radius``, negative semidefinite) and ``random`` (``size``,
``norm``).  Random builders draw from ``numpy.random.default_rng(seed)``.

Exit codes: 0 success, 2 invalid spec, 3 numerical failure, 4 failed check.
Floats are written with 17 significant digits; every row carries the
label of the identity it comes from.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml

from . import laplace, series
from .errors import DomainError, FraccosError, HypothesisError, TailTooLargeError
from .families import (check_alpha, check_functional_equation, estimate_exponential_bound,
                       family_values, opnorm)
from .quadrature import QuadratureConfig
from .resolvent import (ResolventPoint, corollary_scaled_check, lemma_bound_check,
                        neumann_resolvent, perturbed_resolvent_direct)

EXIT_OK, EXIT_SPEC, EXIT_NUMERIC, EXIT_FAILED = 0, 2, 3, 4

ORACLE_FACTOR = 100.0        # oracle deviation allowed relative to the series tolerance
BOUND_SLACK = 1e-9           # induction bounds and majorants
RESOLVENT_TOL = 1e-10
FUNCTIONAL_TOL = 1e-6

# identity labels written into every report row
ANCHORS = {
    "functional_equation": "cosine-functional-equation",
    "oracle_cosine": "series-representation-cosine",
    "oracle_sine": "series-representation-sine",
    "induction_sine": "induction-bound-sine-terms",
    "induction_generated": "induction-bound-cosine-terms",
    "induction_literal": "induction-bound-cosine-terms-sine-fed",
    "majorant_sine": "majorant-sine",
    "majorant_cosine": "majorant-cosine",
    "majorant_corrected": "majorant-cosine-corrected",
    "majorant_stated": "majorant-cosine-as-stated",
    "neumann": "perturbed-resolvent-neumann-series",
    "lemma": "perturbed-resolvent-difference-bound",
    "corollary": "perturbed-resolvent-scaled-bound",
    "laplace_relations": "laplace-family-resolvent",
    "laplace_terms": "laplace-series-terms",
    "laplace_perturbed": "laplace-perturbed-families",
    "solve": "mild-solution",
    "truncation": "series-truncation",
    "quadrature": "quadrature-refinement",
    "decay": "series-decay-rate",
}


class SpecError(ValueError):
    """Invalid problem specification."""


# --------------------------------------------------------------------------
# problem spec


@dataclass
class ProblemSpec:
    alpha: float
    A: np.ndarray
    B: np.ndarray
    t_grid: np.ndarray
    tol: float = 1e-8
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    lambda_list: list = field(default_factory=list)
    seed: int = 0
    v0: np.ndarray | None = None
    v1: np.ndarray | None = None
    laplace: laplace.LaplaceQuadrature = field(default_factory=laplace.LaplaceQuadrature)
    max_term_index: int = 6


def _build_matrix(node, rng, name) -> np.ndarray:
    if isinstance(node, (int, float)):
        return np.array([[float(node)]])
    if isinstance(node, list):
        try:
            M = np.array(node, dtype=float)
        except (TypeError, ValueError) as exc:
            raise SpecError(f"{name}: matrix literal is not numeric") from exc
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.size == 0:
            raise SpecError(f"{name}: matrix literal must be square, got shape {M.shape}")
        return M
    if not isinstance(node, dict) or "builder" not in node:
        raise SpecError(f"{name}: expected a matrix literal or a builder mapping")
    kind = node["builder"]
    try:
        if kind == "laplacian":
            d = int(node["size"])
            scale = float(node.get("scale", 1.0))
            M = scale * (np.diag(-2.0 * np.ones(d)) + np.diag(np.ones(d - 1), 1)
                         + np.diag(np.ones(d - 1), -1))
        elif kind == "diagonal":
            M = np.diag(np.asarray(node["values"], dtype=float))
        elif kind == "random_symmetric":
            d = int(node["size"])
            X = rng.standard_normal((d, d))
            M = -(X @ X.T)
            rho = np.max(np.abs(np.linalg.eigvalsh(M)))
            M = M * (float(node.get("spectral_radius", 1.0)) / rho)
        elif kind == "random":
            d = int(node["size"])
            M = rng.standard_normal((d, d))
            M = M * (float(node.get("norm", 1.0)) / opnorm(M))
        elif kind == "zero":
            M = np.zeros((int(node["size"]),) * 2)
        else:
            raise SpecError(f"{name}: unknown builder {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"{name}: bad builder arguments ({exc})") from exc
    if M.ndim != 2 or M.shape[0] < 1:
        raise SpecError(f"{name}: builder produced an empty matrix")
    return M


def _vector(node, d, default, name):
    if node is None:
        return default
    v = np.atleast_1d(np.asarray(node, dtype=float))
    if v.shape != (d,):
        raise SpecError(f"{name} must have {d} entries")
    return v


def parse_spec(data: dict, seed: int | None = None, tol: float | None = None) -> ProblemSpec:
    """Validate a mapping (e.g. loaded YAML) and build a :class:`ProblemSpec`."""
    if not isinstance(data, dict):
        raise SpecError("spec must be a mapping")
    seed = int(data.get("seed", 0)) if seed is None else int(seed)
    rng = np.random.default_rng(seed)
    try:
        alpha = check_alpha(float(data["alpha"]))
    except KeyError:
        raise SpecError("alpha is required") from None
    except (TypeError, ValueError, DomainError) as exc:
        raise SpecError(str(exc)) from exc
    if "A" not in data:
        raise SpecError("A is required")
    A = _build_matrix(data["A"], rng, "A")
    B = _build_matrix(data.get("B", 0.0), rng, "B") if "B" in data else np.zeros_like(A)
    if A.shape != B.shape:
        raise SpecError(f"A and B dimensions differ: {A.shape} vs {B.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise SpecError("matrices must be finite")
    tg = data.get("t_grid", {"start": 0.0, "stop": 1.0, "steps": 10})
    try:
        if isinstance(tg, dict):
            t_grid = np.linspace(float(tg["start"]), float(tg["stop"]), int(tg["steps"]) + 1)
        else:
            t_grid = np.asarray(tg, dtype=float).ravel()
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"t_grid: {exc}") from exc
    if t_grid.size == 0 or np.any(t_grid < 0) or np.any(np.diff(t_grid) <= 0):
        raise SpecError("t_grid must be non-negative and strictly increasing")
    tol = float(data.get("tol", 1e-8)) if tol is None else float(tol)
    if not tol > 0:
        raise SpecError("tol must be positive")
    try:
        quad = QuadratureConfig(**(data.get("quad") or {}))
        lap = laplace.LaplaceQuadrature(**(data.get("laplace") or {}))
    except (TypeError, ValueError) as exc:
        raise SpecError(f"quadrature settings: {exc}") from exc
    lams = [float(x) for x in (data.get("lambda_list") or [])]
    if any(not lam > 0 for lam in lams):
        raise SpecError("lambda_list entries must be positive")
    d = A.shape[0]
    e1 = np.eye(d)[0]
    v0 = _vector(data.get("v0"), d, e1, "v0")
    v1 = _vector(data.get("v1"), d, np.zeros(d), "v1")
    reach = max(float(t_grid[-1]), lap.T_max if lams else 0.0) ** alpha
    if reach * max(opnorm(A), opnorm(A + B)) > 100.0:
        raise SpecError("t**alpha * ||A|| exceeds the Mittag-Leffler evaluation domain (100)")
    return ProblemSpec(alpha, A, B, t_grid, tol, quad, lams, seed, v0, v1, lap,
                       int(data.get("max_term_index", 6)))


def load_spec(path: str | None, seed=None, tol=None) -> ProblemSpec:
    try:
        if path is None:
            text = resources.files("fraccos.data").joinpath("default_spec.yaml").read_text()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        data = yaml.safe_load(text)
    except OSError as exc:
        raise SpecError(f"cannot read spec: {exc}") from exc
    except yaml.YAMLError as exc:
        raise SpecError(f"malformed YAML: {exc}") from exc
    return parse_spec(data, seed, tol)


# --------------------------------------------------------------------------
# output


def fmt(x) -> str:
    """17 significant digits; integers and strings pass through."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(v) -> str:
    if isinstance(v, str):
        return json.dumps(v)
    if v is None:
        return "null"
    s = fmt(v)
    return json.dumps(s) if s in ("nan", "inf", "-inf") else s


def json_record(rec: dict) -> str:
    return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in rec.items()) + "}"


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([x if isinstance(x, str) else fmt(x) for x in r])
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands


def cmd_solve(spec: ProblemSpec, out: str | None = None) -> int:
    """Write ``t, v_0, ..., v_{d-1}`` rows of ``C v0 + S v1`` for ``A + B``."""
    v = series.solve_cauchy(spec.alpha, spec.t_grid, spec.A, spec.B, spec.v0, spec.v1,
                            spec.tol, spec.quad)
    d = spec.A.shape[0]
    rows = [[t, *vec, ANCHORS["solve"]] for t, vec in zip(spec.t_grid, v)]
    _write(_csv(["t", *[f"v{i}" for i in range(d)], "anchor"], rows), out)
    return EXIT_OK


def _rec(name, anchor_key, measured, target, passed, **extra):
    status = passed if isinstance(passed, str) else ("pass" if passed else "fail")
    return {"check": name, "anchor": ANCHORS[anchor_key], "measured": measured,
            "target": target, "status": status, "pass": status != "fail", **extra}


def _worst(norm, bound, t):
    k = int(np.argmin(bound - norm))
    return float(norm[k]), float(bound[k]), float(t[k])


def verification_records(spec: ProblemSpec) -> list[dict]:
    """All verification records for ``spec`` (see :func:`cmd_verify`)."""
    a, A, B, quad = spec.alpha, spec.A, spec.B, spec.quad
    t = spec.t_grid[spec.t_grid > 0]
    if t.size == 0:
        raise SpecError("t_grid needs positive times")
    recs = []
    b = float(opnorm(B))

    # functional equation on sampled pairs
    pairs = [(s, u) for s in t[:: max(1, t.size // 3)] for u in t[:: max(1, t.size // 3)] if s <= u]
    for s, u in pairs[:6]:
        r = check_functional_equation(a, A, float(s), float(u), quad)
        recs.append(_rec("functional_equation", "functional_equation", r, FUNCTIONAL_TOL,
                         r <= FUNCTIONAL_TOL, s=float(s), t=float(u)))

    # series vs Mittag-Leffler oracle
    bound = estimate_exponential_bound(a, A, np.concatenate([[0.0], quad.grid(t[-1]).nodes, t]))
    C, rc = series.perturbed_cosine(a, t, A, B, spec.tol, quad, bound)
    CL, rl = series.perturbed_cosine(a, t, A, B, spec.tol, quad, bound, recursion="literal")
    S, rs = series.perturbed_sine(a, t, A, B, spec.tol, quad, bound)
    oracle_tol = ORACLE_FACTOR * spec.tol
    for key, val, kind in (("oracle_cosine", C, "cosine"), ("oracle_sine", S, "sine")):
        dev = float(np.max(np.abs(val - family_values(kind, a, A + B, t))))
        recs.append(_rec(f"series_vs_oracle_{kind}", key, dev, oracle_tol, dev <= oracle_tol))

    # induction bounds
    for key, rep in (("induction_sine", rs), ("induction_generated", rc), ("induction_literal", rl)):
        for term in rep.terms[1:spec.max_term_index + 1]:
            slack = series.induction_bound_check(term, bound, b)
            maj = slack + term.term_norm
            nrm, bnd, tw = _worst(term.term_norm, maj, t)
            recs.append(_rec(f"{key}_n{term.n}", key, nrm, bnd,
                             bool(np.all(slack >= -BOUND_SLACK * (1 + maj))), n=term.n, t=tw))

    # majorants
    mr = series.majorant_check(a, t, A, B, bound, families=(C, CL, S))
    env = series.majorant_envelopes(a, t, bound, b)
    for key, slack, envelope, asserted in (
            ("majorant_sine", mr.sine_slack, env["sine"], True),
            ("majorant_cosine", mr.cosine_slack, env["cosine"], True),
            ("majorant_corrected", mr.literal_corrected_slack, env["cosine_corrected"], True),
            ("majorant_stated", mr.stated_slack, env["cosine_stated"], False)):
        nrm, bnd, tw = _worst(envelope - slack, envelope, t)
        ok = bool(np.all(slack >= -BOUND_SLACK * (1 + envelope)))
        recs.append(_rec(key, key, nrm, bnd, ok if asserted else "info", t=tw,
                         holds=ok))

    # resolvent and Laplace checks per lambda
    for lam in spec.lambda_list:
        recs.extend(_lambda_records(spec, lam, bound))
    return recs


def _lambda_records(spec, lam, bound):
    a, A, B = spec.alpha, spec.A, spec.B
    recs = []
    point = ResolventPoint(lam, a)
    try:
        series_R, rep = neumann_resolvent(point, A, B)
    except HypothesisError as exc:
        for key in ("neumann", "lemma", "corollary", "laplace_perturbed"):
            recs.append(_rec(key, key, None, None, "hypothesis not met", **{"lambda": lam},
                             reason=str(exc)))
        series_R = None
    if series_R is not None:
        dev = float(opnorm(series_R - perturbed_resolvent_direct(point, A, B)))
        recs.append(_rec("neumann", "neumann", dev, RESOLVENT_TOL, dev <= RESOLVENT_TOL,
                         **{"lambda": lam}, theta=rep.theta))
        for key, chk in (("lemma", lemma_bound_check(point, A, B)),
                         ("corollary", corollary_scaled_check(point, A, B))):
            recs.append(_rec(key, key, chk.lhs, chk.rhs, chk.slack >= -RESOLVENT_TOL,
                             **{"lambda": lam}, theta=chk.theta))
    lq = spec.laplace
    if not lam > bound.omega:
        recs.append(_rec("laplace", "laplace_relations", None, None, "hypothesis not met",
                         **{"lambda": lam}, reason="lambda <= omega"))
        return recs
    checks = [("laplace_relations", lambda: laplace.check_transform_relations(lam, a, A, bound, lq))]
    for n in (1, 2):
        checks.append(("laplace_terms", lambda n=n: laplace.check_term_recursion_transform(
            n, lam, a, A, B, lq, bound)))
    if series_R is not None:
        checks.append(("laplace_perturbed",
                       lambda: laplace.check_perturbed_transforms(lam, a, A, B, lq, bound)))
    for i, (key, run) in enumerate(checks):
        try:
            chk = run()
        except TailTooLargeError as exc:
            recs.append(_rec(key, key, None, None, "hypothesis not met", **{"lambda": lam},
                             reason=str(exc)))
            continue
        n_extra = {"n": i} if key == "laplace_terms" else {}
        for name, r in chk.residuals.items():
            recs.append(_rec(f"{key}:{name}", key, r, chk.allowance, r <= chk.allowance,
                             **{"lambda": lam}, **n_extra))
        for name, r in chk.informational.items():
            recs.append(_rec(f"{key}:{name}", key, r, chk.allowance, "info",
                             **{"lambda": lam}, **n_extra))
    return recs


def cmd_verify(spec: ProblemSpec, out: str | None = None) -> int:
    """Run every check; one JSON record per line.  Exit 0 iff nothing failed.

    Checks whose hypotheses are not met (``||B R|| >= 1``, ``lambda`` too
    close to the growth bound) are reported as such and do not fail.
    Records with status ``info`` document variants that are not expected
    to hold.
    """
    recs = verification_records(spec)
    _write("".join(json_record(r) + "\n" for r in recs), out)
    return EXIT_OK if all(r["pass"] for r in recs) else EXIT_FAILED


def convergence_rows(spec: ProblemSpec) -> list[list]:
    a, A, B, quad = spec.alpha, spec.A, spec.B, spec.quad
    t = spec.t_grid[spec.t_grid > 0]
    rows = []
    C, rc = series.perturbed_cosine(a, t, A, B, spec.tol, quad)
    S, rs = series.perturbed_sine(a, t, A, B, spec.tol, quad, rc.bound)
    for fam, rep in (("cosine", rc), ("sine", rs)):
        oracle = family_values(fam, a, A + B, t)
        partial = np.zeros_like(oracle)
        for term, nrm, maj in zip(rep.terms, rep.per_term_norms, rep.majorant_values):
            partial = partial + term.values
            err = float(np.max(np.abs(partial - oracle)))
            rows.append(["truncation", fam, term.n, float(np.max(nrm)), float(np.max(maj)), err,
                         ANCHORS["truncation"]])
        norms = np.array([float(np.max(n)) for n in rep.per_term_norms[1:]])
        keep = norms > 1e-300
        rate = float("nan")
        if keep.sum() >= 2:
            idx = np.arange(1, norms.size + 1)[keep]
            rate = float(np.exp(np.polyfit(idx, np.log(norms[keep]), 1)[0]))
        rows.append(["decay", fam, rep.n_used, "", "", rate, ANCHORS["decay"]])
    for panels in (1, 2, 4, 8):
        q = QuadratureConfig(panels=panels, nodes_per_panel=6, grading_levels=quad.grading_levels,
                             target_tol=quad.target_tol, de_step=quad.de_step)
        try:
            Cq, _ = series.perturbed_cosine(a, t, A, B, spec.tol, q, rc.bound)
            err = float(np.max(np.abs(Cq - family_values("cosine", a, A + B, t))))
        except FraccosError:
            err = float("nan")
        rows.append(["quadrature", "cosine", panels, "", "", err, ANCHORS["quadrature"]])
    return rows


def cmd_convergence(spec: ProblemSpec, out: str | None = None) -> int:
    """CSV table: per-term norms, majorants and cumulative error vs the oracle.

    ``table=decay`` rows give the fitted geometric ratio of successive term
    norms; ``table=quadrature`` rows the oracle deviation of the cosine
    series on coarse grids with 1, 2, 4 and 8 panels of 6 nodes.
    """
    header = ["table", "family", "index", "term_norm", "majorant", "error", "anchor"]
    _write(_csv(header, convergence_rows(spec)), out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "convergence": cmd_convergence}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fraccos",
                                description="Perturbed fractional cosine families: solve, verify, convergence.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--spec", help="YAML problem file (default: the bundled spec)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--seed", type=int, help="seed for random matrix builders")
    p.add_argument("--tol", type=float, help="series truncation tolerance")
    return p


def _diagnostic(exc: BaseException) -> None:
    sys.stderr.write(json_record({"error": type(exc).__name__, "message": str(exc)}) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec, args.seed, args.tol)
    except (SpecError, DomainError) as exc:
        _diagnostic(exc)
        return EXIT_SPEC
    try:
        return COMMANDS[args.command](spec, args.out)
    except (SpecError, DomainError) as exc:
        _diagnostic(exc)
        return EXIT_SPEC
    except (FraccosError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _diagnostic(exc)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
