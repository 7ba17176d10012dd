"""Graph-tuple neural networks and filter-class theory checks."""

import json

from ._core import (
    AssumptionViolation,
    ConfigError,
    DimensionError,
    DivergenceError,
    DomainError,
    Error,
    ParseError,
    SchemaError,
    class_distance,
    coulomb_matrix,
    gradcheck,
    nc_binomial_residual,
    oracle_risk_gap,
    radius_views,
    threshold_views,
    words,
)
from . import _core

__all__ = [
    "AssumptionViolation",
    "ConfigError",
    "DimensionError",
    "DivergenceError",
    "DomainError",
    "Error",
    "ParseError",
    "SchemaError",
    "class_distance",
    "coulomb_matrix",
    "evaluate",
    "generate_dataset",
    "gradcheck",
    "nc_binomial_residual",
    "oracle_risk_gap",
    "radius_views",
    "threshold_views",
    "train",
    "verify_theory",
    "words",
]


def generate_dataset(task, count, seed=0, points=32, size=6):
    """List of records, one dict per line of the dataset file."""
    text = _core.generate_dataset(task, count, seed, points, size)
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def _to_text(data):
    if isinstance(data, str):
        return data
    return "\n".join(json.dumps(r) for r in data) + "\n"


def train(config, data):
    """Runs an experiment. Returns (model, report, metrics_csv)."""
    model, report, csv = _core.train_json(json.dumps(config), _to_text(data))
    return json.loads(model), json.loads(report), csv


def evaluate(model, data):
    return json.loads(_core.evaluate_json(json.dumps(model), _to_text(data)))


def verify_theory(m=2, n=4, trials=100, seed=0, mc_samples=100000):
    return json.loads(_core.verify_theory_json(m, n, trials, seed, mc_samples))
