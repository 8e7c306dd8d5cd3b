"""Certification: verdict correctness and interval-bound soundness."""

import math

import numpy as np
import pytest

from shapeguard import Interval, PolyModel, ShapeConstraint, certify, monomial_basis


def region1d(lo=-1.0, hi=1.0):
    return {"x": Interval(lo, hi)}


def test_certified_monotone_cubic():
    # f = x^3 + 3x is strictly increasing: f' = 3x^2 + 3 >= 3
    model = PolyModel(("x",), 3, {(3,): 1.0, (1,): 3.0})
    cons = [ShapeConstraint({"x": 1}, Interval(0.0, math.inf), region1d())]
    report = certify(model, cons)
    (entry,) = report.entries
    assert entry.verdict == "CERTIFIED"
    assert report.all_certified and not report.any_violated
    assert entry.enclosure.lo >= -1e-9


def test_violated_with_witness_point():
    # f = x^3 - x dips: f'(0) = -1
    model = PolyModel(("x",), 3, {(3,): 1.0, (1,): -1.0})
    cons = [ShapeConstraint({"x": 1}, Interval(0.0, math.inf), region1d())]
    report = certify(model, cons)
    (entry,) = report.entries
    assert entry.verdict == "VIOLATED"
    assert entry.worst_violation == pytest.approx(1.0, abs=1e-3)
    x = entry.worst_point["x"]
    assert 3 * x**2 - 1 == pytest.approx(-entry.worst_violation, abs=1e-9)


def test_touching_extremum_is_certified():
    # f = x^3 has f' = 3x^2 >= 0 with equality exactly at x = 0: the
    # bisection must close on the active point rather than give up
    model = PolyModel(("x",), 3, {(3,): 1.0})
    cons = [ShapeConstraint({"x": 1}, Interval(0.0, math.inf), region1d())]
    report = certify(model, cons)
    assert report.entries[0].verdict == "CERTIFIED"


def test_value_constraint_two_sided():
    model = PolyModel(("x",), 2, {(2,): 1.0})  # x^2 on [-1,1] lies in [0,1]
    cons = [ShapeConstraint({}, Interval(0.0, 1.0), region1d())]
    assert certify(model, cons).entries[0].verdict == "CERTIFIED"
    cons = [ShapeConstraint({}, Interval(0.0, 0.5), region1d())]
    assert certify(model, cons).entries[0].verdict == "VIOLATED"


def test_second_derivative_constraint():
    model = PolyModel(("x",), 2, {(2,): 2.0, (1,): -1.0})  # f'' = 4 (convex)
    cons = [ShapeConstraint({"x": 2}, Interval(0.0, math.inf), region1d())]
    assert certify(model, cons).entries[0].verdict == "CERTIFIED"


def test_multivariate_mixed_constraints():
    # f = x^2 + y^2: df/dx >= 0 on x in [0,1], violated on x in [-1,0)
    model = PolyModel(("x", "y"), 2, {(2, 0): 1.0, (0, 2): 1.0})
    box_pos = {"x": Interval(0.0, 1.0), "y": Interval(-1.0, 1.0)}
    box_all = {"x": Interval(-1.0, 1.0), "y": Interval(-1.0, 1.0)}
    cons = [
        ShapeConstraint({"x": 1}, Interval(0.0, math.inf), box_pos),
        ShapeConstraint({"x": 1}, Interval(0.0, math.inf), box_all),
    ]
    report = certify(model, cons)
    assert report.entries[0].verdict == "CERTIFIED"
    assert report.entries[1].verdict == "VIOLATED"


def random_case(rng, n_vars):
    names = tuple(f"x{i}" for i in range(n_vars))
    degree = int(rng.integers(1, 5))
    basis = monomial_basis(n_vars, degree)
    coeffs = {a: float(c) for a, c in zip(basis, rng.normal(size=len(basis)))}
    model = PolyModel(names, degree, coeffs)
    region = {}
    for v in names:
        lo, hi = sorted(rng.uniform(-1.5, 1.5, size=2))
        region[v] = Interval(lo, hi)
    var = names[int(rng.integers(n_vars))]
    order = int(rng.integers(0, 3))
    derivative = {var: order} if order else {}
    if rng.random() < 0.5:
        bound = Interval(float(rng.normal()), math.inf)
    else:
        bound = Interval(-math.inf, float(rng.normal()))
    return model, ShapeConstraint(derivative, bound, region)


def test_certified_soundness_random_sample():
    # smaller cousin of the acceptance-scale soundness sweep
    rng = np.random.default_rng(42)
    checked = 0
    for _ in range(80):
        n_vars = int(rng.integers(1, 3))
        model, c = random_case(rng, n_vars)
        entry = certify(model, [c]).entries[0]
        if entry.verdict != "CERTIFIED":
            continue
        checked += 1
        deriv = model.derivative(c.derivative_tuple(model.variables))
        axes = [
            np.linspace(c.region[v].lo, c.region[v].hi, 200 if n_vars == 1 else 60)
            for v in model.variables
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        cols = {v: m.ravel() for v, m in zip(model.variables, mesh)}
        vals = deriv.evaluate_columns(cols)
        if math.isfinite(c.bound.lo):
            assert vals.min() >= c.bound.lo - 1e-9
        if math.isfinite(c.bound.hi):
            assert vals.max() <= c.bound.hi + 1e-9
    assert checked > 10  # the sweep must actually exercise CERTIFIED verdicts


def test_report_serialization():
    model = PolyModel(("x",), 3, {(3,): 1.0, (1,): 3.0})
    cons = [ShapeConstraint({"x": 1}, Interval(0.0, math.inf), region1d())]
    obj = certify(model, cons).to_dict()
    assert obj["all_certified"] is True
    assert obj["constraints"][0]["verdict"] == "CERTIFIED"
    assert len(obj["constraints"][0]["enclosure"]) == 2
