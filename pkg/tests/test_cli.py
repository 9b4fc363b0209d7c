import io
import json
import os
from fractions import Fraction

import pytest

from twistperiod.chambers import enumerate_chambers
from twistperiod.cli import (
    JobError,
    basis_from_json,
    basis_json,
    census_from_json,
    census_json,
    load_report,
    main,
    parse_job,
    parse_rat,
    rat_str,
    run,
)
from twistperiod.connection import ExponentData
from twistperiod.geometry import AffineFunctional, Arrangement
from twistperiod.plot import plot_svg
from twistperiod.rdbasis import rd_basis_linear
from twistperiod.suite import KUMMER_JOB

JOBS = os.path.join(os.path.dirname(__file__), "..", "jobs")


def _run(tmp_path, job, **kw):
    path = tmp_path / "job.json"
    path.write_text(job if isinstance(job, str) else json.dumps(job))
    out = tmp_path / "out"
    code = run(str(path), str(out), stream=io.StringIO(), **kw)
    rep = load_report(out / "report.json") if (out / "report.json").exists() else None
    return code, rep, out


def test_rational_strings():
    assert rat_str(Fraction(-3, 4)) == "-3/4" and rat_str(Fraction(2)) == "2"
    assert parse_rat(" 5 / 10 ") == Fraction(1, 2) and parse_rat(3) == 3


def test_kummer_job(tmp_path):
    code, rep, _ = _run(tmp_path, KUMMER_JOB)
    assert code == 0 and rep["status"] == "ok"
    assert rep["basis"]["rank"] == 2 and len(rep["periods"]) == 2
    assert rep["census"]["n_bounded"] == 1 and all(rep["checks"].values())


def test_nongeneric_job(tmp_path):
    code, rep, _ = _run(tmp_path, dict(KUMMER_JOB, exponents=["1", "1/3"]))
    assert code == 3 and rep["status"] == "error"
    assert rep["reason"] == "genericity: integer eigenvalue at j=1"


def test_schema_errors(tmp_path):
    assert _run(tmp_path, "{not json")[0] == 2
    assert _run(tmp_path, dict(KUMMER_JOB, dim=0))[0] == 2
    assert _run(tmp_path, dict(KUMMER_JOB, exponents=["1/2"]))[0] == 2
    assert _run(tmp_path, dict(KUMMER_JOB, hyperplanes=[[0, 1, 2], [1, -1]]))[0] == 2
    with pytest.raises(JobError):
        parse_job(dict(KUMMER_JOB, phase={"kind": "linear", "f": [3, 0]}))


def test_shipped_jobs(tmp_path):
    code, rep, out = _run(tmp_path, open(os.path.join(JOBS, "three_lines.json")).read(), plot=True)
    assert code == 0 and rep["basis"]["rank"] == 3
    svg = (out / "chambers.svg").read_text()
    assert svg.count('class="bounded"') == 1 and 'class="truncated"' in svg and 'class="phase"' in svg
    code, rep, _ = _run(tmp_path, open(os.path.join(JOBS, "nongeneric.json")).read())
    assert code == 3 and rep["certificates"]


def test_report_round_trip():
    A = Arrangement.from_rows([(0, 0, 1), (-1, 1, 1), (-2, 1, -1)])
    E = ExponentData.scalar([Fraction(1, 5), Fraction(1, 7), Fraction(1, 11)])
    c = enumerate_chambers(A)
    b = rd_basis_linear(A, E, AffineFunctional((0, 1, 0)), census=c)
    c2 = census_from_json(json.loads(json.dumps(census_json(c))))
    assert [ch.sign for ch in c2.chambers] == [ch.sign for ch in c.chambers]
    b2 = basis_from_json(json.loads(json.dumps(basis_json(b))), b.phase)
    assert b2.sign_sets() == b.sign_sets() and b2.R == b.R


def test_plot_regions():
    tri = Arrangement.from_rows([(0, 1, 0), (0, 0, 1), (1, -1, -1)])
    assert plot_svg(tri, enumerate_chambers(tri)).count('class="bounded"') == 1
    four = Arrangement.from_rows([(0, 0, 1), (-1, 1, 1), (-2, 1, -1), (-3, 1, 0)])
    svg = plot_svg(four, enumerate_chambers(four))
    assert svg.count('class="bounded"') == 3 and svg.startswith("<svg")
    with pytest.raises(ValueError):
        plot_svg(Arrangement.from_rows([(0, 1)]), None)


def test_main_dispatch(tmp_path, capsys):
    path = tmp_path / "job.json"
    path.write_text(json.dumps(dict(KUMMER_JOB, tasks=["chambers"])))
    assert main(["run", str(path), "--out", str(tmp_path)]) == 0
    assert load_report(tmp_path / "report.json")["census"]["n_total"] == 3
    with pytest.raises(SystemExit):
        main([])
