"""Variance attribution, main-sequence fits and the statistics around them."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import special

from .errors import (
    EmptyGrid,
    EmptyInput,
    LengthMismatch,
    MixedModels,
    NoConvergence,
    NonPositiveData,
    RankDeficient,
    RankDeficientWarning,
    ZeroVariance,
)
from .signal import TimeSeries

MAX_ITER = 200
REL_STEP_TOL = 1e-10
MAX_HALVINGS = 60


def _values(s):
    return s.samples if isinstance(s, TimeSeries) else np.asarray(s, dtype=np.float64)


# --------------------------------------------------------------------------
# PVAF


def _r_squared(y, X, sst):
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    return 1.0 - float(resid @ resid) / sst, rank


def incremental_pvaf(dependent, regressors) -> list:
    """Percent of variance added by each regressor, entered in the given order.

    Entry ``k`` is ``100 * (R2(1..k) - R2(1..k-1))`` for an ordinary least
    squares model with intercept. Collinear regressors trigger a
    :class:`RankDeficientWarning`; the increments then come from the
    minimum-norm solution.
    """
    y = _values(dependent)
    cols = [_values(r) for r in regressors]
    if any(c.shape != y.shape for c in cols):
        raise LengthMismatch("dependent and regressors must share one length")
    if y.shape[0] < len(cols) + 2:
        raise LengthMismatch(f"need at least {len(cols) + 2} samples for {len(cols)} regressors")
    yc = y - y.mean()
    sst = float(yc @ yc)
    if sst == 0.0:
        raise ZeroVariance("dependent series is constant")
    X = np.ones((y.shape[0], len(cols) + 1))
    out, prev, deficient = [], 0.0, False
    for k, c in enumerate(cols, start=1):
        X[:, k] = c
        r2, rank = _r_squared(y, X[:, :k + 1], sst)
        deficient |= rank < k + 1
        out.append(100.0 * (r2 - prev))
        prev = r2
    if deficient:
        warnings.warn("collinear regressors; PVAF from minimum-norm fit", RankDeficientWarning,
                      stacklevel=2)
    return out


@dataclass(frozen=True, eq=False)
class PvafTable:
    band_names: tuple
    per_event_pvaf: np.ndarray
    median_pvaf: np.ndarray
    mad_pvaf: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, PvafTable):
            return NotImplemented
        return (
            tuple(self.band_names) == tuple(other.band_names)
            and np.array_equal(self.per_event_pvaf, other.per_event_pvaf)
            and np.array_equal(self.median_pvaf, other.median_pvaf)
            and np.array_equal(self.mad_pvaf, other.mad_pvaf)
        )

    def to_dict(self):
        return {
            "band_names": list(self.band_names),
            "per_event_pvaf": self.per_event_pvaf.tolist(),
            "median_pvaf": self.median_pvaf.tolist(),
            "mad_pvaf": self.mad_pvaf.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        n = len(d["band_names"])
        return cls(
            tuple(d["band_names"]),
            np.asarray(d["per_event_pvaf"], dtype=np.float64).reshape(-1, n),
            np.asarray(d["median_pvaf"], dtype=np.float64),
            np.asarray(d["mad_pvaf"], dtype=np.float64),
        )


def aggregate_pvaf(rows, band_names=None) -> PvafTable:
    """Columnwise median and raw (unscaled) median absolute deviation."""
    rows = [list(r) for r in rows]
    if not rows:
        raise EmptyInput("no PVAF rows to aggregate")
    if len({len(r) for r in rows}) != 1:
        raise LengthMismatch("PVAF rows differ in length")
    m = np.asarray(rows, dtype=np.float64)
    med = np.median(m, axis=0)
    mad = np.median(np.abs(m - med), axis=0)
    names = tuple(band_names) if band_names is not None else tuple(
        f"band{i + 1}" for i in range(m.shape[1]))
    if len(names) != m.shape[1]:
        raise LengthMismatch("band_names does not match the PVAF row length")
    return PvafTable(names, m, med, mad)


# --------------------------------------------------------------------------
# t distribution


def t_cdf(t, df):
    return special.stdtr(df, t)


def t_quantile(q, df):
    return special.stdtrit(df, q)


class TTestResult(NamedTuple):
    t: float
    df: int
    p_two_tailed: float


def paired_t_test(x, y) -> TTestResult:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatch("paired samples must have equal length")
    n = x.shape[0]
    if n < 2:
        raise EmptyInput("need at least two pairs")
    d = x - y
    if not np.any(d):
        return TTestResult(0.0, n - 1, 1.0)
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        raise ZeroVariance("all paired differences are equal and nonzero")
    t = float(np.mean(d)) / (sd / math.sqrt(n))
    p = float(min(1.0, 2.0 * t_cdf(-abs(t), n - 1)))
    return TTestResult(t, n - 1, p)


# --------------------------------------------------------------------------
# main sequence


class Model(str, enum.Enum):
    POWER_LAW = "power_law"
    EXPONENTIAL = "exponential"


COEFF_NAMES = {Model.POWER_LAW: ("a", "b"), Model.EXPONENTIAL: ("V_max", "C")}


def _power_law(theta, x):
    a, b = theta
    xb = x ** b
    return a * xb, np.column_stack([xb, a * xb * np.log(x)])


def _exponential(theta, x):
    vmax, c = theta
    e = np.exp(-x / c)
    return vmax * (1.0 - e), np.column_stack([1.0 - e, -vmax * e * x / (c * c)])


_MODELS = {Model.POWER_LAW: _power_law, Model.EXPONENTIAL: _exponential}


def predict(model, coeffs, x):
    return _MODELS[Model(model)](np.asarray(coeffs, dtype=np.float64),
                                 np.asarray(x, dtype=np.float64))[0]


@dataclass(frozen=True)
class MainSequenceFit:
    model: Model
    coeffs: tuple
    ci95: tuple
    adj_r2: float
    r2: float
    n_points: int
    condition_label: str = ""
    sse: float = 0.0
    iterations: int = 0

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        object.__setattr__(self, "ci95", tuple((float(lo), float(hi)) for lo, hi in self.ci95))

    @property
    def coeff_names(self):
        return COEFF_NAMES[self.model]

    def predict(self, x):
        return predict(self.model, self.coeffs, x)

    def to_dict(self):
        return {
            "model": self.model.value,
            "coeffs": list(self.coeffs),
            "ci95": [list(c) for c in self.ci95],
            "adj_r2": self.adj_r2,
            "r2": self.r2,
            "n_points": self.n_points,
            "condition_label": self.condition_label,
            "sse": self.sse,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def _check_points(points):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise LengthMismatch("points must be (amplitude, peak_velocity) pairs")
    if pts.shape[0] < 3:
        raise EmptyInput(f"need at least 3 points, got {pts.shape[0]}")
    if not np.all(np.isfinite(pts)) or np.any(pts <= 0):
        raise NonPositiveData("amplitudes and velocities must be finite and positive")
    return pts[:, 0], pts[:, 1]


def _gauss_newton(f, theta, x, y):
    """Damped Gauss-Newton on the sum of squared residuals."""
    pred, J = f(theta, x)
    r = y - pred
    sse = float(r @ r)
    for it in range(1, MAX_ITER + 1):
        s = np.linalg.svd(J, compute_uv=False)
        if not np.all(np.isfinite(s)) or s[-1] <= s[0] * 1e-12:
            raise RankDeficient("Jacobian is rank deficient; coefficients are not identifiable")
        step = np.linalg.lstsq(J, r, rcond=None)[0]
        lam = 1.0
        for _ in range(MAX_HALVINGS):
            trial = theta + lam * step
            t_pred, t_J = f(trial, x)
            t_r = y - t_pred
            t_sse = float(t_r @ t_r)
            if np.isfinite(t_sse) and t_sse <= sse:
                break
            lam *= 0.5
        else:
            grad = float(np.linalg.norm(J.T @ r))
            if np.all(np.abs(step) <= 1e-8 * (np.abs(theta) + 1e-12)):
                return theta, J, sse, it
            raise NoConvergence(
                f"no descent step after {it} iterations (gradient norm {grad:.3g})",
                iterations=it, grad_norm=grad,
            )
        change = np.max(np.abs(trial - theta) / np.maximum(np.abs(trial), 1e-300))
        theta, pred, J, r, sse = trial, t_pred, t_J, t_r, t_sse
        if change < REL_STEP_TOL:
            return theta, J, sse, it
    grad = float(np.linalg.norm(J.T @ r))
    raise NoConvergence(
        f"no convergence in {MAX_ITER} iterations (gradient norm {grad:.3g})",
        iterations=MAX_ITER, grad_norm=grad,
    )


def _finish(model, theta, J, sse, iterations, y, label):
    n = y.shape[0]
    dof = n - 2
    yc = y - y.mean()
    sst = float(yc @ yc)
    r2 = 1.0 - sse / sst if sst > 0 else 1.0
    adj = 1.0 - (1.0 - r2) * (n - 1) / dof
    cov = (sse / dof) * np.linalg.inv(J.T @ J)
    half = t_quantile(0.975, dof) * np.sqrt(np.clip(np.diag(cov), 0.0, None))
    ci = tuple((float(c - h), float(c + h)) for c, h in zip(theta, half))
    return MainSequenceFit(model, tuple(theta), ci, float(adj), float(r2), n, label, sse,
                           iterations)


def fit_power_law(points, condition_label="") -> MainSequenceFit:
    """Least-squares ``velocity = a * amplitude**b`` in linear velocity units.

    Starts from the log-log regression line. 95% limits are Wald intervals
    from the Jacobian at the optimum with residual variance ``SSE/(n-2)``.
    """
    x, y = _check_points(points)
    lx = np.log(x)
    if np.ptp(lx) == 0.0:
        raise RankDeficient("all amplitudes are equal; the exponent is not identifiable")
    b0, la0 = np.polyfit(lx, np.log(y), 1)
    theta, J, sse, it = _gauss_newton(_power_law, np.array([math.exp(la0), b0]), x, y)
    return _finish(Model.POWER_LAW, theta, J, sse, it, y, condition_label)


def fit_exponential(points, condition_label="") -> MainSequenceFit:
    """Least-squares ``velocity = V_max * (1 - exp(-amplitude / C))``."""
    x, y = _check_points(points)
    theta0 = np.array([1.05 * y.max(), float(np.median(x))])
    theta, J, sse, it = _gauss_newton(_exponential, theta0, x, y)
    return _finish(Model.EXPONENTIAL, theta, J, sse, it, y, condition_label)


def fit_model(model, points, condition_label=""):
    if Model(model) is Model.POWER_LAW:
        return fit_power_law(points, condition_label)
    return fit_exponential(points, condition_label)


class DifferenceCurve(NamedTuple):
    amplitudes: np.ndarray
    diff: np.ndarray
    crossovers: list


def _sign_changes(x, d):
    nz = np.flatnonzero(d != 0.0)
    out = []
    for i, j in zip(nz[:-1], nz[1:]):
        if np.sign(d[i]) == np.sign(d[j]):
            continue
        if j == i + 1:
            out.append(float(x[i] - d[i] * (x[j] - x[i]) / (d[j] - d[i])))
        else:
            out.append(float(np.mean(x[i + 1:j])))
    return out


def difference_curve(fit_ref: MainSequenceFit, fit_cmp: MainSequenceFit, amplitudes) -> DifferenceCurve:
    """``ref(x) - cmp(x)`` on the grid plus interpolated sign changes."""
    if fit_ref.model is not fit_cmp.model:
        raise MixedModels("difference curves need two fits of the same model")
    x = np.asarray(amplitudes, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise EmptyGrid("amplitude grid is empty")
    d = fit_ref.predict(x) - fit_cmp.predict(x)
    return DifferenceCurve(x, d, _sign_changes(x, d))


DISTINCT = "distinct"
NOT_DISTINCT = "not-distinct"


class OverlapFlags(NamedTuple):
    condition_label: str
    flags: dict


def ci_overlap_report(reference: MainSequenceFit, conditions: Sequence[MainSequenceFit]) -> list:
    """Per condition and coefficient: does the condition's 95% CI contain the reference estimate?"""
    out = []
    for fit in conditions:
        if fit.model is not reference.model:
            raise MixedModels(f"{fit.condition_label}: {fit.model.value} vs {reference.model.value}")
        flags = {
            name: NOT_DISTINCT if lo <= ref <= hi else DISTINCT
            for name, ref, (lo, hi) in zip(fit.coeff_names, reference.coeffs, fit.ci95)
        }
        out.append(OverlapFlags(fit.condition_label, flags))
    return out
