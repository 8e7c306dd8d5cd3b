"""Constraint-based data validation: segmentation, scoring, ROC, grid search.

A dataset is split into segments wherever a controlled input changes, a
constrained model is trained on the full data, per-segment RMSE is computed
on the unit-normalized target, and the dataset is classified invalid when the
maximum segment RMSE exceeds the threshold ``t`` (strictly).  Sweeping ``t``
over corpus scores yields the ROC curve; ``invalid`` is the positive class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace as dc_replace

import numpy as np

from . import gbt as gbt_mod
from . import scpr as scpr_mod
from . import scsr as scsr_mod
from .certify import certify as run_certification
from .datasets import Dataset, scale_unit
from .errors import ConfigError, DegenerateError, GridError, SchemaError

__all__ = [
    "Segment",
    "ValidationConfig",
    "ValidationReport",
    "RocCurve",
    "segment",
    "score_segments",
    "classify",
    "roc",
    "grid_search",
    "validate_corpus",
    "monotone_from_constraints",
    "fit_predict",
]


@dataclass(frozen=True)
class Segment:
    """Row range [start, end) with constant controlled values."""

    start: int
    end: int
    controlled_values: tuple  # ((name, value), ...)


@dataclass
class ValidationConfig:
    threshold: float
    controlled_variables: list
    algorithm: str  # "pr" | "scpr" | "scsr" | "gbt"
    algorithm_config: object = None
    constraints: list = field(default_factory=list)
    target: str | None = None

    def __post_init__(self):
        if self.threshold <= 0:
            raise ConfigError("threshold must be > 0")
        if self.algorithm not in ("pr", "scpr", "scsr", "gbt"):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")


@dataclass
class ValidationReport:
    dataset: str
    segment_rmses: list
    score: float
    verdict: str  # "valid" | "invalid"
    fit_report: dict | None = None
    certification: dict | None = None
    label: str | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "segment_rmses": self.segment_rmses,
            "score": self.score,
            "verdict": self.verdict,
            "fit_report": self.fit_report,
            "certification": self.certification,
            "label": self.label,
            "error": self.error,
        }


@dataclass
class RocCurve:
    fpr: list
    tpr: list
    thresholds: list
    auc: float

    def to_csv(self) -> str:
        lines = ["threshold,fpr,tpr"]
        for t, f, tp in zip(self.thresholds, self.fpr, self.tpr):
            lines.append(f"{t!r},{f!r},{tp!r}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# segmentation and scoring
# ---------------------------------------------------------------------------


def segment(data: Dataset, controlled) -> list:
    """Maximal runs of rows with constant controlled values (exact equality)."""
    for c in controlled:
        if c not in data.columns:
            raise SchemaError(f"controlled column {c!r} not present")
    n = data.n_rows
    if n == 0:
        return []
    cols = [data.columns[c] for c in controlled]
    segments = []
    start = 0
    for i in range(1, n):
        if any(col[i] != col[i - 1] for col in cols):
            segments.append(_make_segment(controlled, cols, start, i))
            start = i
    segments.append(_make_segment(controlled, cols, start, n))
    return segments


def _make_segment(controlled, cols, start, end) -> Segment:
    values = tuple((name, float(col[start])) for name, col in zip(controlled, cols))
    return Segment(start=start, end=end, controlled_values=values)


def score_segments(predictions, data: Dataset, segments) -> list:
    """Per-segment root-mean-square residual."""
    predictions = np.asarray(predictions, dtype=float)
    if len(predictions) != data.n_rows:
        raise SchemaError("predictions length mismatch")
    resid = predictions - data.y
    return [
        float(np.sqrt(np.mean(resid[s.start : s.end] ** 2))) for s in segments
    ]


def classify(segment_rmses, t: float) -> str:
    """'invalid' iff any segment RMSE strictly exceeds t."""
    if t <= 0:
        raise ConfigError("threshold must be > 0")
    score = max(segment_rmses, default=0.0)
    return "invalid" if score > t else "valid"


# ---------------------------------------------------------------------------
# ROC
# ---------------------------------------------------------------------------


def roc(scores, labels) -> RocCurve:
    """Threshold sweep over unique scores; invalid is the positive class."""
    scores = [float(s) for s in scores]
    labels = list(labels)
    if len(scores) != len(labels):
        raise SchemaError("scores/labels length mismatch")
    pos = sum(1 for l in labels if l == "invalid")
    neg = len(labels) - pos
    if pos == 0 or neg == 0:
        raise DegenerateError("ROC needs both classes present")

    thresholds = [math.inf] + sorted(set(scores), reverse=True) + [-math.inf]
    fpr, tpr = [], []
    for t in thresholds:
        tp = sum(1 for s, l in zip(scores, labels) if s > t and l == "invalid")
        fp = sum(1 for s, l in zip(scores, labels) if s > t and l != "invalid")
        tpr.append(tp / pos)
        fpr.append(fp / neg)
    trapezoid = getattr(np, "trapezoid", np.trapz)
    auc = float(trapezoid(tpr, fpr))
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds, auc=auc)


# ---------------------------------------------------------------------------
# model adapters
# ---------------------------------------------------------------------------


def monotone_from_constraints(constraints) -> dict:
    """Directions usable by GBT: full-space one-sided first-order constraints."""
    monotone = {}
    for c in constraints:
        if c.order != 1:
            continue
        (var, _), = c.derivative.items()
        if c.bound.lo == 0.0 and math.isinf(c.bound.hi):
            monotone[var] = 1
        elif c.bound.hi == 0.0 and math.isinf(c.bound.lo):
            monotone[var] = -1
    return monotone


def fit_predict(algorithm, train: Dataset, test: Dataset, config, constraints=(), target=None):
    """Fit on `train`, return (predictions on test, fitted object, fit info dict)."""
    target = target or train.target
    constraints = list(constraints)
    if algorithm in ("pr", "scpr"):
        cfg = config if isinstance(config, scpr_mod.SCPRConfig) else scpr_mod.SCPRConfig(**(config or {}))
        if algorithm == "scpr" and constraints:
            model, report = scpr_mod.fit_constrained(train, cfg, constraints, target=target)
        else:
            model, report = scpr_mod.fit_unconstrained(train, cfg, target=target)
        preds = model.evaluate_columns(test.columns)
        return preds, model, report.to_dict()
    if algorithm == "gbt":
        cfg = config if isinstance(config, gbt_mod.GBTConfig) else gbt_mod.GBTConfig(**(config or {}))
        if not cfg.monotone and constraints:
            cfg = dc_replace(cfg, monotone=monotone_from_constraints(constraints))
        ensemble = gbt_mod.fit_gbt(train, cfg, target=target)
        preds = gbt_mod.predict_gbt(ensemble, {f: test.columns[f] for f in ensemble.features})
        return preds, ensemble, {"n_trees": len(ensemble.trees)}
    if algorithm == "scsr":
        cfg = config if isinstance(config, scsr_mod.GAConfig) else scsr_mod.GAConfig(**(config or {}))
        history = scsr_mod.evolve(train, test, cfg, constraints)
        stop = scsr_mod.select_stopping_generation(history)
        rec = history[stop]
        a, b = rec.best_scale
        preds = a * scsr_mod.eval_tree_columns(rec.best_tree, test.columns) + b
        return preds, rec.best_tree, {
            "stopping_generation": stop,
            "train_rmse": rec.best_train_rmse,
        }
    raise ConfigError(f"unknown algorithm {algorithm!r}")


# ---------------------------------------------------------------------------
# grid search
# ---------------------------------------------------------------------------


def _expand_grid(param_grid):
    if isinstance(param_grid, dict):
        import itertools

        keys = list(param_grid)
        cells = [dict(zip(keys, combo)) for combo in itertools.product(*param_grid.values())]
        return cells
    return [dict(c) for c in param_grid]


def _contiguous_folds(data: Dataset, folds: int):
    n = data.n_rows
    bounds = [round(i * n / folds) for i in range(folds + 1)]
    out = []
    for i in range(folds):
        test_idx = np.arange(bounds[i], bounds[i + 1])
        train_idx = np.concatenate([np.arange(0, bounds[i]), np.arange(bounds[i + 1], n)])
        out.append((train_idx, test_idx))
    return out


def grid_search(valid_datasets, algorithm, param_grid, folds=2, constraints=(), target=None):
    """Sum of fold test RMSE per grid cell across all valid datasets.

    Folds are contiguous (unshuffled) row splits.  Ties break toward the
    smallest degree, then the largest lambda; failed cells are excluded.
    Returns (best params, result table).
    """
    valid_datasets = list(valid_datasets)
    if len(valid_datasets) < 2:
        raise ConfigError("grid search needs >= 2 valid datasets")
    cells = _expand_grid(param_grid)
    if not cells:
        raise ConfigError("empty parameter grid")

    table = []
    for cell in cells:
        total = 0.0
        failed = None
        for ds in valid_datasets:
            for train_idx, test_idx in _contiguous_folds(ds, folds):
                train = ds.select_rows(train_idx)
                test = ds.select_rows(test_idx)
                try:
                    preds, _, _ = fit_predict(algorithm, train, test, cell, constraints, target)
                    rmse = float(np.sqrt(np.mean((preds - test.y) ** 2)))
                    if not math.isfinite(rmse):
                        raise GridError("non-finite test RMSE")
                    total += rmse
                except Exception as exc:  # cell marked failed, search continues
                    failed = f"{type(exc).__name__}: {exc}"
                    break
            if failed:
                break
        table.append({"params": cell, "sum_test_rmse": None if failed else total, "error": failed})

    ok = [row for row in table if row["error"] is None]
    if not ok:
        raise GridError("every grid cell failed")

    def tie_key(row):
        p = row["params"]
        return (
            row["sum_test_rmse"],
            p.get("degree", p.get("max_depth", 0)),
            -p.get("lam", 0.0),
        )

    best = min(ok, key=tie_key)
    return best["params"], table


def grid_table_to_csv(table) -> str:
    keys = sorted({k for row in table for k in row["params"]})
    lines = [",".join(keys + ["sum_test_rmse", "error"])]
    for row in table:
        vals = [repr(row["params"].get(k, "")) for k in keys]
        vals.append("" if row["sum_test_rmse"] is None else repr(row["sum_test_rmse"]))
        vals.append(row["error"] or "")
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# corpus validation
# ---------------------------------------------------------------------------


def validate_dataset(data: Dataset, config: ValidationConfig) -> ValidationReport:
    """Train a constrained model on the full dataset and threshold segment RMSE.

    Inputs are unit-scaled before fitting; RMSE is normalized by the target
    range so one threshold is comparable across datasets.
    """
    target = config.target or data.target
    features = [c for c in data.columns if c != target]
    scaled, _ = scale_unit(data, features)
    y = scaled.columns[target]
    y_range = float(y.max() - y.min())
    if y_range <= 0:
        y_range = 1.0

    segments = segment(scaled, config.controlled_variables)
    preds, model, fit_info = fit_predict(
        config.algorithm, scaled, scaled, config.algorithm_config, config.constraints, target
    )
    rmses = [r / y_range for r in score_segments(preds, scaled, segments)]
    verdict = classify(rmses, config.threshold)

    certification = None
    if config.algorithm in ("pr", "scpr") and config.constraints:
        certification = run_certification(model, config.constraints).to_dict()

    return ValidationReport(
        dataset=data.name,
        segment_rmses=rmses,
        score=max(rmses, default=0.0),
        verdict=verdict,
        fit_report=fit_info if isinstance(fit_info, dict) else None,
        certification=certification,
        label=data.label,
    )


def validate_corpus(datasets, config: ValidationConfig):
    """Validate every dataset; failures are recorded per dataset, never fatal.

    Returns (reports, confusion dict, RocCurve or None).
    """
    reports = []
    for ds in datasets:
        try:
            reports.append(validate_dataset(ds, config))
        except Exception as exc:
            reports.append(
                ValidationReport(
                    dataset=ds.name,
                    segment_rmses=[],
                    score=math.inf,
                    verdict="invalid",
                    label=ds.label,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )

    confusion = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    for r in reports:
        if r.label is None:
            continue
        truth_invalid = r.label == "invalid"
        flagged = r.verdict == "invalid"
        if truth_invalid and flagged:
            confusion["tp"] += 1
        elif truth_invalid:
            confusion["fn"] += 1
        elif flagged:
            confusion["fp"] += 1
        else:
            confusion["tn"] += 1

    curve = None
    labeled = [(r.score, r.label) for r in reports if r.label is not None]
    label_set = {l for _, l in labeled}
    if len(label_set) == 2:
        curve = roc([s for s, _ in labeled], [l for _, l in labeled])
    return reports, confusion, curve
