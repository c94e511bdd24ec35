"""Structured numerical evidence returned by the verification-style operations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class VerificationReport:
    """Named scalar metrics plus optional per-sample tables.

    `metrics` holds scalar summaries (max residuals, fitted exponents,
    ratios); `tables` holds the raw per-sample / per-parameter arrays the
    metrics were computed from; `notes` records non-fatal observations
    (skipped samples, perturbed inputs, soft-check warnings).
    """

    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self):
        def conv(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, (list, tuple)):
                return [conv(u) for u in v]
            return v

        return {
            "name": self.name,
            "passed": bool(self.passed),
            "metrics": {k: conv(v) for k, v in self.metrics.items()},
            "tables": {k: conv(v) for k, v in self.tables.items()},
            "notes": list(self.notes),
        }


def fit_loglog_slope(xs, ys):
    """Least-squares slope of log|y| against log|x|.

    Used for fitted decay/growth exponents; pairs with y == 0 are dropped.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.abs(np.asarray(ys, dtype=float))
    keep = ys > 0
    if keep.sum() < 2:
        raise ValueError("need at least two nonzero samples for a log-log fit")
    coeffs = np.polyfit(np.log(xs[keep]), np.log(ys[keep]), 1)
    return float(coeffs[0])
