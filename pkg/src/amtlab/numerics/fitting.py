"""Least-squares estimation of algebraic decay rates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NOISE_FLOOR = 100 * np.finfo(float).eps


@dataclass(frozen=True)
class DecayFit:
    """Fit of ``|e(R)| ~ constant * R**-exponent`` (times ``log R`` for the
    ``power_log`` model).  ``residual`` is the RMS misfit in log coordinates.
    """

    exponent: float
    constant: float
    residual: float
    model: str = "power"
    below_noise_floor: bool = False

    def within(self, target, tol):
        return (not self.below_noise_floor) and abs(self.exponent - target) <= tol


def fit_decay(samples, model="power", noise_floor=NOISE_FLOOR):
    """Fit a decay exponent to ``(scale, residual)`` pairs.

    Decay is measured as the scale grows.  For claims about a small parameter
    ``delta -> 0`` pass ``scale = 1/delta``; the ``power_log`` model then uses
    ``|log delta| = log scale`` as intended.

    Samples whose residual sits below ``noise_floor`` carry no rate
    information.  When fewer than three usable samples remain the result is
    flagged ``below_noise_floor`` with a NaN exponent instead of raising.
    """
    if model not in ("power", "power_log"):
        raise ValueError(f"unknown model {model!r}")
    pts = [(float(s), abs(float(e))) for s, e in samples]
    if len(pts) < 3:
        raise ValueError("need at least 3 samples")
    scales = np.array([s for s, _ in pts])
    if np.any(scales <= 0):
        raise ValueError("scales must be positive")
    if scales.max() / scales.min() < 10.0 * (1 - 1e-12):
        raise ValueError("scales must span at least one decade")
    if any(e == 0.0 for _, e in pts) and all(e == 0.0 for _, e in pts):
        return DecayFit(float("nan"), 0.0, 0.0, model, below_noise_floor=True)

    usable = [(s, e) for s, e in pts if e > noise_floor]
    if len(usable) < 3:
        return DecayFit(float("nan"), 0.0, 0.0, model, below_noise_floor=True)
    s = np.array([u[0] for u in usable])
    e = np.array([u[1] for u in usable])
    logs = np.log(s)
    y = np.log(e)
    if model == "power_log":
        if np.any(logs <= 0):
            raise ValueError("power_log model needs scales > 1")
        y = y - np.log(logs)
    design = np.column_stack([np.ones_like(logs), logs])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    misfit = y - design @ coef
    return DecayFit(
        exponent=float(-coef[1]),
        constant=float(np.exp(coef[0])),
        residual=float(np.sqrt(np.mean(misfit**2))),
        model=model,
    )
