"""Least-squares cosine series for periodic scalar series of the orbit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from choreo8.io import write_json


class FitError(ValueError):
    """The design matrix is rank deficient or the samples are unusable."""


@dataclass(frozen=True)
class CosineSeriesFit:
    """c0 + sum_j c_j cos(j * base_frequency * tau); tau in radians.

    ``sine_coefficients`` is filled only when sine terms were requested, to
    check that the series is even about tau = 0.
    """

    multipliers: tuple[int, ...]
    c0: float
    coefficients: tuple[float, ...]
    residual_max: float
    residual_rms: float
    base_frequency: int = 1
    name: str = ""
    sine_multipliers: tuple[int, ...] = ()
    sine_coefficients: tuple[float, ...] = field(default=())

    @property
    def harmonics(self) -> list[tuple[int, float]]:
        return list(zip(self.multipliers, self.coefficients))

    def evaluate(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        out = np.full(tau.shape, self.c0)
        w = self.base_frequency
        for j, c in zip(self.multipliers, self.coefficients):
            out = out + c * np.cos(j * w * tau)
        for j, c in zip(self.sine_multipliers, self.sine_coefficients):
            out = out + c * np.sin(j * w * tau)
        return out

    def to_dict(self) -> dict:
        d = {
            "series_name": self.name,
            "base_frequency": self.base_frequency,
            "multipliers": list(self.multipliers),
            "coefficients": [self.c0, *self.coefficients],
            "residual_max": self.residual_max,
            "residual_rms": self.residual_rms,
        }
        if self.sine_multipliers:
            d["sine_multipliers"] = list(self.sine_multipliers)
            d["sine_coefficients"] = list(self.sine_coefficients)
        return d

    def write_json(self, path):
        write_json(path, self.to_dict())


def _design(tau, multipliers, sine_multipliers, w):
    cols = [np.ones_like(tau)]
    cols += [np.cos(j * w * tau) for j in multipliers]
    cols += [np.sin(j * w * tau) for j in sine_multipliers]
    return np.column_stack(cols)


def fit_cosine_series(tau, values, multipliers, base_frequency: int = 1, name: str = "",
                      sine_multipliers=(), method: str = "lsq") -> CosineSeriesFit:
    """Fit c0 + sum c_j cos(j w tau).

    Series are phased so that tau = 0 is an extremum (the orbit is symmetric
    under tau -> -tau there), which makes a pure cosine basis sufficient.

    ``method='lsq'`` minimizes the sum of squared residuals over all samples.
    ``method='collocation'`` instead passes the series exactly through the
    samples at tau_k = k pi / (w m_max), k = 0..n, n the number of cosine
    terms; for a single harmonic these are the two extremes, giving
    c0 = (max + min) / 2. Residuals are reported over all samples either way.
    Raises FitError for repeated or non-positive multipliers, too few samples
    or a rank-deficient design.
    """
    tau = np.asarray(tau, dtype=float)
    values = np.asarray(values, dtype=float)
    multipliers = tuple(int(m) for m in multipliers)
    sine_multipliers = tuple(int(m) for m in sine_multipliers)
    if tau.shape != values.shape or tau.ndim != 1:
        raise FitError("tau and values must be 1-D arrays of equal length")
    for group in (multipliers, sine_multipliers):
        if any(m <= 0 for m in group):
            raise FitError("multipliers must be positive integers (c0 is always fitted)")
        if len(set(group)) != len(group):
            raise FitError(f"duplicate multipliers in {list(group)}")
    ncoef = 1 + len(multipliers) + len(sine_multipliers)
    if len(tau) < 2 * ncoef:
        raise FitError(f"need at least {2 * ncoef} samples for {ncoef} coefficients")
    a = _design(tau, multipliers, sine_multipliers, base_frequency)
    if np.linalg.matrix_rank(a) < ncoef:
        raise FitError("design matrix is rank deficient")
    if method == "lsq":
        coef, *_ = np.linalg.lstsq(a, values, rcond=None)
    elif method == "collocation":
        if sine_multipliers:
            raise FitError("collocation fits cosine terms only")
        rows = _collocation_rows(tau, multipliers, base_frequency)
        sub = a[rows]
        if np.linalg.matrix_rank(sub) < ncoef:
            raise FitError("collocation nodes do not determine the coefficients")
        coef = np.linalg.solve(sub, values[rows])
    else:
        raise FitError(f"unknown fit method {method!r}")
    nc = 1 + len(multipliers)
    fit = CosineSeriesFit(
        multipliers=multipliers,
        c0=float(coef[0]),
        coefficients=tuple(float(c) for c in coef[1:nc]),
        residual_max=0.0,
        residual_rms=0.0,
        base_frequency=base_frequency,
        name=name,
        sine_multipliers=sine_multipliers,
        sine_coefficients=tuple(float(c) for c in coef[nc:]),
    )
    # residuals through evaluate() so the reported bound holds exactly for it
    rep = residual(fit, tau, values)
    return replace(fit, residual_max=rep.max, residual_rms=rep.rms)


def _collocation_rows(tau, multipliers, w) -> list[int]:
    m_max = max(multipliers) if multipliers else 1
    step = math.pi / (w * m_max)
    rows = []
    for k in range(len(multipliers) + 1):
        target = tau[0] + k * step
        i = int(np.argmin(np.abs(tau - target)))
        if abs(tau[i] - target) > 1e-9:
            raise FitError(f"no sample at collocation node tau = {math.degrees(target):.6g} deg")
        rows.append(i)
    return rows


@dataclass(frozen=True)
class ResidualReport:
    tau: np.ndarray
    residual: np.ndarray
    max: float
    rms: float

    @property
    def tau_deg(self) -> np.ndarray:
        return np.degrees(self.tau)


def residual(fit: CosineSeriesFit, tau, values) -> ResidualReport:
    """Pointwise data - model with its max |.| and rms."""
    tau = np.asarray(tau, dtype=float)
    r = np.asarray(values, dtype=float) - fit.evaluate(tau)
    return ResidualReport(tau, r, float(np.max(np.abs(r))), float(math.sqrt(np.mean(r * r))))


def periodic_samples(series, grid_tau):
    """Drop a closing sample at tau_start + 2 pi so the grid is uniform over one period."""
    tau = np.asarray(grid_tau, dtype=float)
    vals = np.asarray(series, dtype=float)
    if len(tau) > 1 and abs((tau[-1] - tau[0]) - 2.0 * math.pi) < 1e-9:
        return tau[:-1], vals[:-1]
    return tau, vals
