"""Least-squares estimation of per-constituent energy coefficients.

Observed slices give a design matrix of packet flows (one column per active
constituent) and an energy vector; the coefficient vector is the ordinary
least-squares solution. The solve goes through an SVD rather than the
textbook normal-equation inverse: the inverse is numerically fragile
exactly when flow columns are nearly collinear, which is common in quiet
phases. Rank deficiency is surfaced as an error naming the dependent
columns instead of returning garbage coefficients.

No intercept term anywhere: zero flows must predict zero energy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .energy_core import (
    CONSTITUENT_ORDER,
    CoefficientVector,
    Constituent,
    ConstituentFlowVector,
    overall_energy,
)

#: Smallest-to-largest singular value ratio below which the design matrix is
#: treated as rank-deficient.
RANK_RTOL = 1e-10


class RankDeficientError(ValueError):
    """Design matrix has (near-)dependent columns; carries their names."""

    def __init__(self, columns: Sequence[str]):
        self.columns = tuple(columns)
        super().__init__(f"design matrix is rank-deficient in columns: {', '.join(self.columns)}")


def _mask_tuple(active) -> tuple[bool, bool, bool, bool, bool]:
    active = tuple(bool(a) for a in active)
    if len(active) != 5:
        raise ValueError("active mask must have 5 entries")
    if not any(active):
        raise ValueError("active mask must select at least one constituent")
    return active


@dataclass
class ObservationSet:
    """M observations of active-constituent flows and slice energies."""

    flows: np.ndarray                 # (M, N) packet counts, N = active constituents
    energy: np.ndarray                # (M,) joules
    active: tuple[bool, ...] = (True,) * 5
    slices: tuple[int, ...] | None = None
    phases: tuple[str, ...] | None = None

    def __post_init__(self):
        self.flows = np.asarray(self.flows, dtype=float)
        self.energy = np.asarray(self.energy, dtype=float)
        self.active = _mask_tuple(self.active)
        if self.flows.ndim != 2:
            raise ValueError("flows must be a 2D matrix")
        if self.energy.ndim != 1 or self.energy.shape[0] != self.flows.shape[0]:
            raise ValueError("energy must be a vector with one entry per observation")
        if self.flows.shape[1] != sum(self.active):
            raise ValueError(
                f"flows has {self.flows.shape[1]} columns but mask activates {sum(self.active)}")
        if not np.all(np.isfinite(self.flows)) or not np.all(np.isfinite(self.energy)):
            raise ValueError("observations must be finite")
        if np.any(self.flows < 0):
            raise ValueError("packet flows must be nonnegative")
        for name in ("slices", "phases"):
            val = getattr(self, name)
            if val is not None and len(val) != self.flows.shape[0]:
                raise ValueError(f"{name} annotation length must match observation count")

    @property
    def n_obs(self) -> int:
        return self.flows.shape[0]

    @property
    def n_constituents(self) -> int:
        return self.flows.shape[1]

    def column_names(self) -> tuple[str, ...]:
        return tuple(f"b_{c.value}" for c, a in zip(CONSTITUENT_ORDER, self.active) if a)

    @classmethod
    def from_flow_vectors(cls, flow_vectors: Sequence[ConstituentFlowVector],
                          energies: Sequence[float], active=(True,) * 5,
                          slices=None, phases=None) -> "ObservationSet":
        active = _mask_tuple(active)
        cols = [i for i, a in enumerate(active) if a]
        flows = np.array([[fv.as_tuple()[i] for i in cols] for fv in flow_vectors], dtype=float)
        if flows.size == 0:
            flows = flows.reshape(0, len(cols))
        return cls(flows, np.asarray(list(energies), dtype=float), active,
                   None if slices is None else tuple(slices),
                   None if phases is None else tuple(phases))

    def rows(self, start: int, stop: int) -> "ObservationSet":
        return ObservationSet(
            self.flows[start:stop], self.energy[start:stop], self.active,
            None if self.slices is None else self.slices[start:stop],
            None if self.phases is None else self.phases[start:stop])


@dataclass
class FitResult:
    coefficients: CoefficientVector
    residuals: np.ndarray
    condition: float
    n_obs: int
    stderr: tuple[float, ...] = ()   # per active constituent, classical OLS proxy

    @property
    def rss(self) -> float:
        return float(self.residuals @ self.residuals)


def fit_ls(obs: ObservationSet, *, warn_small: bool = True) -> FitResult:
    """Fit the coefficient vector minimizing ||E - b A||2 over the observations.

    Raises :class:`RankDeficientError` naming the dependent columns when the
    smallest-to-largest singular value ratio drops below ``RANK_RTOL``, and
    ``ValueError`` when there are not strictly more observations than
    active constituents.
    """
    m, n = obs.flows.shape
    if m <= n:
        raise ValueError(f"need more observations than constituents (M={m}, N={n})")
    if warn_small and m < 10 * n:
        warnings.warn(f"only {m} observations for {n} constituents; recommend at least {10 * n}",
                      stacklevel=2)

    u, s, vt = np.linalg.svd(obs.flows, full_matrices=False)
    if s[0] == 0.0 or s[-1] / s[0] < RANK_RTOL:
        raise RankDeficientError(_dependent_columns(s, vt, obs.column_names()))

    alpha_active = vt.T @ ((u.T @ obs.energy) / s)
    residuals = obs.energy - obs.flows @ alpha_active

    # Classical per-coefficient standard-error proxy: sqrt(sigma^2 * (b^T b)^-1_kk).
    dof = m - n
    sigma2 = float(residuals @ residuals) / dof if dof > 0 else float("nan")
    inv_diag = np.sum((vt.T / s) ** 2, axis=1)
    stderr = tuple(float(x) for x in np.sqrt(sigma2 * inv_diag))

    alpha = np.zeros(5)
    alpha[[i for i, a in enumerate(obs.active) if a]] = alpha_active
    coeffs = CoefficientVector(alpha, obs.active)
    if any(a < 0 for a in alpha_active):
        warnings.warn("fitted coefficients contain negative entries (least-squares artifact)",
                      stacklevel=2)
    return FitResult(coeffs, residuals, float(s[0] / s[-1]), m, stderr)


def _dependent_columns(s: np.ndarray, vt: np.ndarray, names: tuple[str, ...]) -> list[str]:
    if s[0] == 0.0:
        return list(names)
    rank = int(np.sum(s / s[0] >= RANK_RTOL))
    involved: set[int] = set()
    for null_vec in vt[rank:]:
        peak = np.max(np.abs(null_vec))
        involved.update(int(i) for i in np.nonzero(np.abs(null_vec) >= 1e-6 * peak)[0])
    return [names[i] for i in sorted(involved)]


def predict(coefficients: CoefficientVector, flows: ConstituentFlowVector) -> float:
    """Predicted slice energy for one flow vector (mask must match)."""
    return overall_energy(coefficients, flows)


def predict_rows(coefficients: CoefficientVector, obs: ObservationSet) -> np.ndarray:
    """Predicted energies for every observation row."""
    if obs.active != coefficients.active:
        raise ValueError("observation mask does not match coefficient mask")
    alpha_active = np.array([a for a, act in zip(coefficients.alpha, coefficients.active) if act])
    return obs.flows @ alpha_active


@dataclass
class ErrorReport:
    pct_errors: tuple[float, ...]   # signed (predicted - observed) / observed * 100
    mape: float
    max_abs_pct: float


def error_report(predictions: Sequence[float], observations: Sequence[float]) -> ErrorReport:
    """Percentage-error metrics of predictions against observed energies.

    Per-slice errors are kept signed so spikes stay visible; the summary
    metrics are absolute. Observed values must be strictly positive.
    """
    preds = np.asarray(list(predictions), dtype=float)
    obs = np.asarray(list(observations), dtype=float)
    if preds.shape != obs.shape or preds.ndim != 1 or preds.size == 0:
        raise ValueError("predictions and observations must be equal-length, nonempty vectors")
    if np.any(obs <= 0):
        raise ValueError("observed values must be > 0 for percentage metrics")
    pct = (preds - obs) / obs * 100.0
    return ErrorReport(tuple(float(p) for p in pct),
                       float(np.mean(np.abs(pct))), float(np.max(np.abs(pct))))


@dataclass
class WindowFit:
    start: int
    stop: int
    result: FitResult


@dataclass
class RollingFit:
    window: int
    fits: list[WindowFit] = field(default_factory=list)
    skipped: list[tuple[int, str]] = field(default_factory=list)   # (start, reason)


def rolling_fit(obs: ObservationSet, window: int) -> RollingFit:
    """Refit the model on every length-``window`` run of consecutive rows.

    Rank-deficient windows are recorded in ``skipped`` and do not abort the
    sweep; the window must exceed the constituent count and fit in the data.
    """
    n = obs.n_constituents
    if window <= n:
        raise ValueError(f"window must exceed the number of constituents ({n})")
    if window > obs.n_obs:
        raise ValueError(f"window {window} larger than observation count {obs.n_obs}")
    out = RollingFit(window)
    for start in range(obs.n_obs - window + 1):
        sub = obs.rows(start, start + window)
        try:
            out.fits.append(WindowFit(start, start + window, fit_ls(sub, warn_small=False)))
        except RankDeficientError as exc:
            out.skipped.append((start, str(exc)))
    return out
