"""Command line front end: ``twistperiod run JOB.json`` and ``twistperiod verify-suite``.

Exit codes: 0 all requested checks pass, 1 a check failed, 2 invalid job,
3 precondition failure (reason printed and stored), 4 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import jsonschema

from .chambers import Chamber, ChamberCensus, brute_force_chambers, enumerate_chambers
from .connection import ComplexRational, ExponentData, is_asymptotically_generic, is_generic
from .geometry import AffineFunctional, Arrangement, GeometryError
from .quadrature import NonConvergence, NonDecayingDirection, QuadratureError, TwistedIntegrand, integrate_chain
from .rdbasis import (
    LINEAR,
    NONE,
    QUADRATIC,
    PhaseSpec,
    PreconditionError,
    RankMismatch,
    RdBasis,
    Truncation,
    rank_cross_check,
    rd_basis,
    stability_check,
)
from .regularization import RegularizationError, regularize_bounded, regularize_truncated

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_PRECONDITION, EXIT_NONCONVERGENCE = 0, 1, 2, 3, 4

TASKS = ("chambers", "basis", "periods", "verify")

_RAT = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}]}
_CRAT = {"oneOf": [_RAT, {"type": "array", "items": _RAT, "minItems": 2, "maxItems": 2}]}

JOB_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["dim", "hyperplanes", "exponents"],
    "additionalProperties": False,
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "hyperplanes": {"type": "array", "items": {"type": "array", "items": _RAT}},
        "exponents": {"type": "array", "items": _CRAT},
        "phase": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": [NONE, LINEAR, QUADRATIC]},
                "f": {"type": "array", "items": _RAT},
                "R": {"oneOf": [_RAT, {"const": "auto"}]},
            },
        },
        "form": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["coeff", "powers"],
                "additionalProperties": False,
                "properties": {"coeff": _CRAT, "powers": {"type": "array", "items": {"type": "integer"}}},
            },
        },
        "tasks": {"type": "array", "items": {"enum": list(TASKS)}, "uniqueItems": True},
        "labels": {"type": "array", "items": {"type": "string"}},
    },
}


class JobError(ValueError):
    """Malformed job (exit 2)."""


# ---------------------------------------------------------------- serialisation


def rat_str(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else "%d/%d" % (q.numerator, q.denominator)


def parse_rat(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(s.replace(" ", ""))


def complex_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def chamber_json(ch: Chamber) -> dict:
    return {
        "id": ch.id,
        "sign": list(ch.sign),
        "witness": [rat_str(x) for x in ch.witness],
        "bounded": ch.bounded,
    }


def chamber_from_json(d) -> Chamber:
    return Chamber(tuple(d["sign"]), tuple(parse_rat(x) for x in d["witness"]), d["bounded"], d["id"])


def census_json(census: ChamberCensus) -> dict:
    return {
        "n_total": census.n_total,
        "n_bounded": census.n_bounded,
        "n_unbounded": census.n_unbounded,
        "chambers": [chamber_json(c) for c in census.chambers],
    }


def census_from_json(d) -> ChamberCensus:
    return ChamberCensus(tuple(chamber_from_json(c) for c in d["chambers"]))


def basis_json(b: RdBasis) -> dict:
    return {
        "phase": b.phase.kind,
        "R": None if b.R is None else rat_str(b.R),
        "rank": b.rank,
        "bounded": [chamber_json(c) for c in b.bounded],
        "truncated": [
            {
                "chamber": chamber_json(t.chamber),
                "slice_witness": None if t.slice_witness is None else [rat_str(x) for x in t.slice_witness],
            }
            for t in b.truncated
        ],
        "slice_bounded": b.slice_bounded,
        "hypotheses": {k: v for k, v in b.hypotheses.items()},
    }


def basis_from_json(d, phase: PhaseSpec) -> RdBasis:
    R = None if d["R"] is None else parse_rat(d["R"])
    truncated = [
        Truncation(
            chamber_from_json(t["chamber"]),
            None if t["slice_witness"] is None else tuple(parse_rat(x) for x in t["slice_witness"]),
        )
        for t in d["truncated"]
    ]
    return RdBasis(phase.with_R(R) if R is not None else phase, R,
                   [chamber_from_json(c) for c in d["bounded"]], truncated, d["slice_bounded"], d["hypotheses"])


def load_report(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------- job parsing


def parse_job(data: dict):
    """Validate against the schema and build library objects; raises JobError."""
    try:
        jsonschema.validate(data, JOB_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise JobError("schema: %s" % exc.message) from None
    n = data["dim"]
    rows = [[parse_rat(x) for x in r] for r in data["hyperplanes"]]
    for k, r in enumerate(rows):
        if len(r) != n + 1:
            raise JobError("schema: hyperplane %d has %d coefficients, expected %d" % (k + 1, len(r), n + 1))
    if len(data["exponents"]) != len(rows):
        raise JobError("schema: %d exponents for %d hyperplanes" % (len(data["exponents"]), len(rows)))
    alphas = [ComplexRational.parse(_crat(v)) for v in data["exponents"]]
    ph = data.get("phase", {"kind": NONE})
    kind = ph["kind"]
    f = None
    if kind == LINEAR:
        if "f" not in ph or len(ph["f"]) != n + 1:
            raise JobError("schema: linear phase needs f with %d coefficients" % (n + 1))
        f = AffineFunctional(tuple(parse_rat(x) for x in ph["f"]))
        if f.is_constant():
            raise JobError("schema: phase functional is constant")
    R = ph.get("R", "auto")
    R = None if R == "auto" or kind == NONE else parse_rat(R)
    form = []
    for term in data.get("form", [{"coeff": 1, "powers": [0] * len(rows)}]):
        if len(term["powers"]) != len(rows):
            raise JobError("schema: form powers need one entry per hyperplane")
        form.append((complex(ComplexRational.parse(_crat(term["coeff"]))), tuple(term["powers"])))
    tasks = data.get("tasks", list(TASKS))
    try:
        A = Arrangement.from_rows(rows, data.get("labels"))
    except GeometryError as exc:
        raise JobError("schema: %s" % exc) from None
    phase = PhaseSpec(kind, f, R)
    return A, ExponentData.scalar(alphas), phase, tuple(form), tasks, R is None and kind != NONE


def _crat(v):
    if isinstance(v, list):
        return (parse_rat(v[0]), parse_rat(v[1]))
    return parse_rat(v)


# ---------------------------------------------------------------- running


class _Abort(Exception):
    def __init__(self, code, reason, certificates=()):
        super().__init__(reason)
        self.code = code
        self.reason = reason
        self.certificates = list(certificates)


def _verdict_json(v):
    return {"ok": v.ok, "certificates": list(v.certificates)}


def _chain_for(cycle, kind, basis, A, E, eps=None):
    if kind == "bounded":
        return regularize_bounded(cycle, A, E, eps=eps)
    return regularize_truncated(cycle, basis.phase, A, E, eps=eps)


def _periods(A, E, basis, form, tol, check_eps):
    I = TwistedIntegrand.from_exponents(A, E, basis.phase, form)
    rows = []
    cycles = [("bounded", c) for c in basis.bounded] + [("truncated", t.chamber) for t in basis.truncated]
    for kind, ch in cycles:
        chain = _chain_for(ch, kind, basis, A, E)
        rep = integrate_chain(I, chain, tol)
        row = {
            "cycle": kind,
            "chamber": ch.id,
            "sign": list(ch.sign),
            "value": complex_json(rep.value),
            "abs_error_estimate": rep.abs_error_estimate,
            "cells": rep.cells_evaluated,
            "nodes": rep.nodes_used,
            "epsilon": chain.epsilon,
        }
        if check_eps:
            half = integrate_chain(I, _chain_for(ch, kind, basis, A, E, eps=chain.epsilon / 2), tol)
            gap = abs(half.value - rep.value)
            bound = 10 * max(tol * abs(rep.value), rep.abs_error_estimate + half.abs_error_estimate, 1e-14)
            row["epsilon_halving_gap"] = float(gap)
            row["epsilon_halving_ok"] = bool(gap <= bound)
        rows.append(row)
    return rows


def _oracle_checks(tol):
    from .validation import HgParams, verify_euler_integral, verify_kummer_integral

    e = verify_euler_integral(HgParams(Fraction(1, 2), Fraction(1, 3), Fraction(3, 2), Fraction(1, 4)), tol)
    k = verify_kummer_integral(Fraction(1, 2), Fraction(3, 2), 1, tol)
    return {
        "euler_residual": float(e["residual"]),
        "euler_ok": bool(e["residual"] < 1e-8),
        "kummer_residual": float(k["residual"]),
        "kummer_ok": bool(k["residual"] < 1e-8),
        "kummer_det": complex_json(k["det"]),
        "kummer_rank2": bool(k["rank2"]),
    }


def execute(A, E, phase, form, tasks, auto_R, tol=1e-10) -> dict:
    """Run the requested tasks; raises _Abort for exit codes 3 and 4."""
    report = {"input": {"dim": A.dim, "hyperplanes": [[rat_str(x) for x in r] for r in A.rows()],
                        "exponents": [a.to_json() for a in E.alphas], "phase": phase.kind, "tasks": list(tasks)}}
    checks = {}
    census = enumerate_chambers(A)
    if "chambers" in tasks:
        report["census"] = census_json(census)
        if len(A) <= 12:
            brute = brute_force_chambers(A)
            checks["census_matches_brute_force"] = sorted(c.sign for c in brute.chambers) == sorted(
                c.sign for c in census.chambers)
    basis = None
    if any(t in tasks for t in ("basis", "periods", "verify")):
        gen = is_generic(A, E)
        report["genericity"] = _verdict_json(gen)
        asym = None
        if phase.kind == LINEAR:
            asym = is_asymptotically_generic(A, E, phase.f)
            report["asymptotic_genericity"] = _verdict_json(asym)
        for v in (gen, asym):
            if v is not None and v.ok is False:
                raise _Abort(EXIT_PRECONDITION, v.reason, v.certificates)
            if v is not None and v.ok is None:
                raise _Abort(EXIT_PRECONDITION, v.reason or "genericity: undecided", v.certificates)
        try:
            basis = rd_basis(A, E, phase, census)
        except PreconditionError as exc:
            raise _Abort(EXIT_PRECONDITION, exc.reason, exc.certificates) from None
        except GeometryError as exc:
            raise _Abort(EXIT_PRECONDITION, "basis: %s" % exc) from None
        report["basis"] = basis_json(basis)
        try:
            report["rank_cross_check"] = rank_cross_check(A, E, basis.phase, basis, census)
        except RankMismatch as exc:
            report["rank_cross_check"] = {"ok": False, "message": str(exc)}
        checks["rank_cross_check"] = report["rank_cross_check"]["ok"]
        if auto_R:
            st = stability_check(A, E, phase, census)
            report["stability"] = st
            checks["stability"] = st["stable"]
    if "periods" in tasks:
        try:
            report["periods"] = _periods(A, E, basis, form, tol, "verify" in tasks)
        except (RegularizationError, NonDecayingDirection) as exc:
            raise _Abort(EXIT_PRECONDITION, "periods: %s" % exc) from None
        except NonConvergence as exc:
            raise _Abort(EXIT_NONCONVERGENCE, "periods: %s" % exc) from None
        except QuadratureError as exc:
            raise _Abort(EXIT_PRECONDITION, "periods: %s" % exc) from None
        if "verify" in tasks:
            checks["epsilon_halving"] = all(r["epsilon_halving_ok"] for r in report["periods"])
    if "verify" in tasks:
        v = _oracle_checks(tol)
        report["validation"] = v
        checks["oracles"] = v["euler_ok"] and v["kummer_ok"] and v["kummer_rank2"]
    report["checks"] = checks
    report["status"] = "ok" if all(checks.values()) else "failed"
    return report


def _write(out_dir, name, text):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def run(job_path, out_dir=".", plot=False, tol=1e-10, stream=None) -> int:
    stream = stream or sys.stderr
    try:
        with open(job_path, encoding="utf-8") as fh:
            data = json.load(fh)
        A, E, phase, form, tasks, auto_R = parse_job(data)
    except (OSError, json.JSONDecodeError, JobError) as exc:
        print(json.dumps({"exit": EXIT_SCHEMA, "reason": str(exc)}), file=stream)
        return EXIT_SCHEMA
    try:
        report = execute(A, E, phase, form, tasks, auto_R, tol)
        code = EXIT_OK if report["status"] == "ok" else EXIT_FAIL
    except _Abort as exc:
        report = {"status": "error", "exit": exc.code, "reason": exc.reason, "certificates": exc.certificates}
        code = exc.code
        print(json.dumps({"exit": code, "reason": exc.reason}), file=stream)
    _write(out_dir, "report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    if plot and code in (EXIT_OK, EXIT_FAIL):
        if A.dim != 2:
            print(json.dumps({"warning": "plot skipped: dimension %d" % A.dim}), file=stream)
        else:
            from .plot import plot_svg

            census = census_from_json(report["census"]) if "census" in report else enumerate_chambers(A)
            basis = basis_from_json(report["basis"], phase) if "basis" in report else None
            _write(out_dir, "chambers.svg", plot_svg(A, census, basis))
    return code


def verify_suite(stream=None) -> int:
    from .suite import run_suite

    stream = stream or sys.stdout
    results = run_suite()
    for name, ok, detail in results:
        print("%s %s: %s" % ("PASS" if ok else "FAIL", name, detail), file=stream)
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_FAIL


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="twistperiod", description="Chambers, rapid-decay bases and twisted periods.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a JSON job")
    p_run.add_argument("job")
    p_run.add_argument("--out", default=".")
    p_run.add_argument("--plot", action="store_true")
    p_run.add_argument("--tol", type=float, default=1e-10)
    sub.add_parser("verify-suite", help="run the built-in acceptance battery")
    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.job, args.out, args.plot, args.tol)
    return verify_suite()


if __name__ == "__main__":
    sys.exit(main())
