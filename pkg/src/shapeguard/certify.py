"""Sound post-fit certification of shape constraints on polynomial models.

Each constraint is checked two ways:

* interval route: adaptive bisection of the region, bounding the derivative
  polynomial on each sub-box with interval arithmetic.  If every sub-box's
  enclosure fits inside the bound the constraint is CERTIFIED (a guarantee,
  not a sample).
* sampling route: a dense tensor grid; any sampled breach beyond ``tol``
  makes the constraint VIOLATED.

When neither route decides (interval bounds too conservative within the box
budget, no sampled breach) the verdict is UNDECIDED.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constraints import ShapeConstraint
from .errors import ArityError
from .intervals import Interval, box_width, split_box
from .poly import PolyModel

__all__ = ["ConstraintCertificate", "CertificationReport", "certify"]

MAX_GRID_TOTAL = 10**6


@dataclass
class ConstraintCertificate:
    constraint: ShapeConstraint
    verdict: str  # "CERTIFIED" | "VIOLATED" | "UNDECIDED"
    enclosure: Interval
    worst_violation: float
    worst_point: dict | None
    boxes_examined: int

    def to_dict(self) -> dict:
        return {
            "constraint": self.constraint.describe(),
            "verdict": self.verdict,
            "enclosure": [self.enclosure.lo, self.enclosure.hi],
            "worst_violation": self.worst_violation,
            "worst_point": self.worst_point,
            "boxes_examined": self.boxes_examined,
        }


@dataclass
class CertificationReport:
    entries: list = field(default_factory=list)

    @property
    def all_certified(self) -> bool:
        return all(e.verdict == "CERTIFIED" for e in self.entries)

    @property
    def any_violated(self) -> bool:
        return any(e.verdict == "VIOLATED" for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "all_certified": self.all_certified,
            "any_violated": self.any_violated,
            "constraints": [e.to_dict() for e in self.entries],
        }


def _box_bound(deriv: PolyModel, grads: dict, box: dict) -> Interval:
    """Naive bound intersected with the centered (mean-value) form.

    The centered form f(mid) + sum_i df/dx_i(box) * (box_i - mid_i) has slack
    quadratic in the box width, which is what lets bisection close in on
    constraints that are active (extremum touching the bound).
    """
    naive = deriv.interval_bound(box)
    mids = {v: iv.mid for v, iv in box.items()}
    centered = Interval.point(deriv.evaluate(mids))
    for v, g in grads.items():
        iv = box[v]
        centered = centered + g.interval_bound(box) * Interval(iv.lo - mids[v], iv.hi - mids[v])
    if naive.intersects(centered):
        return naive.intersect(centered)
    return naive  # float rounding pushed the forms apart; keep the naive bound


def _interval_certify(
    deriv: PolyModel, bound: Interval, region: dict, max_boxes: int, tol: float
):
    """Adaptive bisection; returns (certified, refined enclosure, boxes used).

    CERTIFIED means the enclosure fits the bound widened by ``tol`` — the
    same tolerance below which sampling never reports VIOLATED, so the two
    verdict routes agree on what counts as a breach.
    """
    bound = Interval(bound.lo - tol, bound.hi + tol)
    grads = {v: deriv.derivative_of_var(v) for v in region}
    stack = [dict(region)]
    hull = None
    boxes = 0
    certified = True
    min_width = 1e-12 * max(box_width(region), 1.0)
    while stack:
        box = stack.pop()
        boxes += 1
        enc = _box_bound(deriv, grads, box)
        if bound.encloses(enc):
            # only accepted leaves enter the reported hull; a split parent's
            # loose enclosure is superseded by its children
            hull = enc if hull is None else hull.hull(enc)
            continue
        if boxes >= max_boxes or box_width(box) <= min_width:
            hull = enc if hull is None else hull.hull(enc)
            certified = False
            break
        left, right = split_box(box)
        stack.append(left)
        stack.append(right)
    if hull is None:
        hull = deriv.interval_bound(region)
    return certified, hull, boxes


def _sample_worst(deriv: PolyModel, constraint: ShapeConstraint, points_per_dim: int):
    variables = deriv.variables
    n_vars = max(len(variables), 1)
    per_dim = max(2, min(points_per_dim, int(MAX_GRID_TOTAL ** (1.0 / n_vars))))
    axes = []
    for v in variables:
        iv = constraint.region[v]
        axes.append(np.array([iv.lo]) if iv.lo == iv.hi else np.linspace(iv.lo, iv.hi, per_dim))
    mesh = np.meshgrid(*axes, indexing="ij")
    cols = {v: m.reshape(-1) for v, m in zip(variables, mesh)}
    vals = deriv.evaluate_columns(cols)
    worst = 0.0
    worst_point = None
    lo, hi = constraint.bound.lo, constraint.bound.hi
    if np.isfinite(lo):
        i = int(np.argmin(vals))
        breach = float(lo - vals[i])
        if breach > worst:
            worst = breach
            worst_point = {v: float(cols[v][i]) for v in variables}
    if np.isfinite(hi):
        i = int(np.argmax(vals))
        breach = float(vals[i] - hi)
        if breach > worst:
            worst = breach
            worst_point = {v: float(cols[v][i]) for v in variables}
    return worst, worst_point


def certify(
    model: PolyModel,
    constraints,
    *,
    grid_points_per_dim: int = 64,
    tol: float = 1e-9,
    max_boxes: int = 4000,
) -> CertificationReport:
    """Certify each constraint on the model; see module docstring for verdicts."""
    report = CertificationReport()
    for c in constraints:
        deriv = model.derivative(c.derivative_tuple(model.variables))
        missing = [v for v in model.variables if v not in c.region]
        if missing:
            raise ArityError(f"constraint region missing model variables {missing}")
        region = {v: c.region[v] for v in model.variables}
        certified, enclosure, boxes = _interval_certify(deriv, c.bound, region, max_boxes, tol)
        worst, worst_point = _sample_worst(deriv, c, grid_points_per_dim)
        if certified:
            verdict = "CERTIFIED"
        elif worst > tol:
            verdict = "VIOLATED"
        else:
            verdict = "UNDECIDED"
        report.entries.append(
            ConstraintCertificate(
                constraint=c,
                verdict=verdict,
                enclosure=enclosure,
                worst_violation=worst,
                worst_point=worst_point,
                boxes_examined=boxes,
            )
        )
    return report
