import math

import pytest

import tscal


def test_square_on_integers():
    assert tscal.t_alpha("t^2", "hZ(h=1)", 2, 0.5) == pytest.approx(5 * math.sqrt(2), rel=1e-15)


def test_objects_and_strings_are_interchangeable():
    ts = tscal.TimeScale("qN0(q=2)")
    f = tscal.Expr("log(t)")
    assert f(math.e) == pytest.approx(1)
    assert ts.sigma(4) == 8 and ts.mu(4) == 4
    assert tscal.t_alpha(f, ts, 8, 1) == pytest.approx(math.log(2) / 8, rel=1e-14)


def test_higher_order_and_zero_limit():
    h = tscal.t_alpha_higher("t^3", "hZ(h=1)", 1, 2.1)
    assert h["value"] == pytest.approx(6, rel=1e-12)
    assert h["cross_check"] == pytest.approx(6, rel=1e-12)
    value, _ = tscal.t_alpha_at_zero("t^2", "qZbar(q=2)", 0.5)
    assert abs(value) <= 1e-6


def test_chain_rule():
    w = tscal.chain_rule_witness("t^2", "t", "qN0(q=2)", 4, 0.5)
    assert w["c"] == pytest.approx(6)
    assert tscal.naive_chain_gap("t", "t", "hZ(h=1)", 4, 0.5) == pytest.approx(-2, abs=1e-12)


def test_integral():
    r = tscal.cauchy("t", "R", 1, 10 ** (2 / 3), 0.5)
    assert abs(r["value"] - 6) <= 1e-8
    assert tscal.cauchy("t^2", "hZ(h=1)", 1, 4, 1)["value"] == 14
    assert tscal.ftc_check("t^2", "R", [1, 2], 0.5)["passed"]
    assert tscal.monotonicity_check("t^2", "hZ(h=1)", 1, 10, 0.5)["status"] == "monotone"


def test_oracles():
    assert tscal.definition_scan("t^2", "hZ(h=1)", 2, 0.5, 5 * math.sqrt(2), 1e-9)
    assert len(tscal.law_names()) == 15
    report = tscal.run_law_suite("sum", 100, 7)
    assert report["passed"] and report["cases_run"] == 100


def test_exceptions():
    with pytest.raises(tscal.ParseError):
        tscal.Expr("t +* 2")
    with pytest.raises(tscal.MathError):
        tscal.t_alpha("t", "hZ(h=1)", 1.5, 0.5)
    with pytest.raises(tscal.UnknownLaw):
        tscal.run_law_suite("unknown_law", 1, 0)
    assert issubclass(tscal.ParseError, tscal.Error)
    assert issubclass(tscal.MathError, tscal.Error)
