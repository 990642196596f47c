"""Autoregressive distributed-lag estimation, IRF recursion, and shock decomposition.

The fitted model is

    y_t = alpha * p_t + sum_j beta_j y_{t-j} + sum_j gamma_j p_{t-j} + effects + u

The response to a one-period unit impulse in p follows the recursion
phi_0 = alpha, phi_k = sum_j beta_j phi_{k-j} + gamma_k (gamma_k = 0 past lag
J); summing phi gives the long-run response to a sustained unit shift,
(alpha + sum gamma) / (1 - sum beta). A variant sometimes written down instead
adds the whole running sum of gamma at every horizon; it is available behind
``accumulate_lag_weights`` for comparison, but it neither matches the
one-period-impulse semantics nor converges to the long-run value above, so the
default is the internally consistent form.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import DataError
from .lp import RegressionFit, _fit_projection, _prepare_sample, _resolve_bandwidth
from .panel import LagSpec, PanelFrame, build_shifts


@dataclass(frozen=True)
class ArdlSpec:
    outcome: str
    measure: str
    lags: int = 4
    groups: tuple[str, ...] = ()
    hac_bandwidth: int | str = "auto"

    def __post_init__(self):
        if self.lags < 1:
            raise ValueError("at least one lag is required")


@dataclass(frozen=True)
class ArdlFit:
    alpha: float
    beta: tuple[float, ...]
    gamma: tuple[float, ...]
    lags: int
    stable: bool
    covariance: np.ndarray
    names: tuple[str, ...]
    nobs: int
    n_countries: int
    within_r2: float
    resid_sd: float

    def se(self, name: str) -> float:
        i = self.names.index(name)
        return float(np.sqrt(max(self.covariance[i, i], 0.0)))


@dataclass(frozen=True)
class ArdlIrf:
    phi: np.ndarray
    cumulative: np.ndarray
    phi_inf: float
    stable: bool


def lag_polynomial_stable(beta: Sequence[float]) -> bool:
    """True iff all roots of 1 - sum beta_j L^j lie outside the unit circle."""
    beta = np.asarray(beta, dtype=float)
    if beta.size == 0 or not beta.any():
        return True
    # p(x) = 1 - beta_1 x - ... - beta_J x^J, highest degree first for np.roots.
    coeffs = np.concatenate([-beta[::-1], [1.0]])
    roots = np.roots(coeffs)
    return bool(np.all(np.abs(roots) > 1.0))


def _ardl_regression(frame: PanelFrame, spec: ArdlSpec) -> RegressionFit:
    """The underlying least-squares fit, regressors ordered (measure, y lags, measure lags)."""
    frame.require_columns([spec.outcome, spec.measure, *spec.groups])
    lag_offsets = tuple(range(1, spec.lags + 1))
    frame = build_shifts(frame, LagSpec(spec.outcome, lags=lag_offsets))
    frame = build_shifts(frame, LagSpec(spec.measure, lags=lag_offsets))
    regressors = [
        spec.measure,
        *[f"{spec.outcome}_lag{j}" for j in lag_offsets],
        *[f"{spec.measure}_lag{j}" for j in lag_offsets],
    ]
    outcome_values = frame.data[spec.outcome]
    sample = _prepare_sample(frame, outcome_values, regressors, spec.groups)
    if sample is None or len(sample) < len(regressors) + 1:
        raise DataError("not enough complete observations to fit the lag model")
    bw = _resolve_bandwidth(spec.hac_bandwidth, 0, sample["year"].nunique())
    return _fit_projection(sample, regressors, spec.groups, bw)


def estimate_ardl(frame: PanelFrame, spec: ArdlSpec) -> ArdlFit:
    """Least squares on demeaned data of the outcome on the measure and J lags of both."""
    J = spec.lags
    lag_offsets = tuple(range(1, J + 1))
    fit = _ardl_regression(frame, spec)
    alpha = fit.coefficient(spec.measure)
    beta = tuple(fit.coefficient(f"{spec.outcome}_lag{j}") for j in lag_offsets)
    gamma = tuple(fit.coefficient(f"{spec.measure}_lag{j}") for j in lag_offsets)
    stable = lag_polynomial_stable(beta)
    if not stable:
        warnings.warn("fitted lag polynomial is unstable; long-run values unreliable", stacklevel=2)
    return ArdlFit(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        lags=J,
        stable=stable,
        covariance=fit.covariance,
        names=fit.names,
        nobs=fit.nobs,
        n_countries=fit.n_countries,
        within_r2=fit.within_r2,
        resid_sd=float(fit.residuals.std(ddof=0)),
    )


def ardl_irf(
    alpha: float,
    beta: Sequence[float],
    gamma: Sequence[float],
    horizon: int,
    *,
    accumulate_lag_weights: bool = False,
) -> ArdlIrf:
    """Impulse response of the outcome to a one-period unit shock in the measure."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if beta.shape != gamma.shape:
        raise ValueError("beta and gamma must have the same length")
    J = beta.size
    phi = np.zeros(horizon + 1)
    phi[0] = alpha
    for k in range(1, horizon + 1):
        m = min(k, J)
        acc = float(beta[:m] @ phi[k - m : k][::-1])
        if accumulate_lag_weights:
            acc += float(gamma[:m].sum())
        elif k <= J:
            acc += float(gamma[k - 1])
        phi[k] = acc
    stable = lag_polynomial_stable(beta)
    denom = 1.0 - float(beta.sum())
    if stable and abs(denom) > 1e-12:
        phi_inf = (alpha + float(gamma.sum())) / denom
    else:
        phi_inf = float("nan")
        stable = False
    return ArdlIrf(phi=phi, cumulative=np.cumsum(phi), phi_inf=phi_inf, stable=stable)


def irf_from_ardl(fit: ArdlFit, horizon: int, *, accumulate_lag_weights: bool = False) -> ArdlIrf:
    return ardl_irf(
        fit.alpha, fit.beta, fit.gamma, horizon, accumulate_lag_weights=accumulate_lag_weights
    )


def solve_transitory_shock(own_irf: Sequence[float]) -> np.ndarray:
    """Shock series that turns the measure's own response into a one-period impulse.

    Forward substitution on the unit lower-triangular Toeplitz system
    T(own_irf) @ shock = e_0; the unit diagonal guarantees a solution.
    """
    q = np.asarray(own_irf, dtype=float)
    if q.ndim != 1 or q.size == 0:
        raise DataError("own_irf must be a nonempty 1-d sequence")
    if abs(q[0] - 1.0) > 1e-12:
        raise DataError(f"own_irf must be normalized to start at 1, got {q[0]}")
    H = q.size
    shock = np.zeros(H)
    shock[0] = 1.0
    for k in range(1, H):
        shock[k] = -float(q[1 : k + 1] @ shock[:k][::-1])
    return shock


def transitory_outcome_irf(
    shock_path: Sequence[float], outcome_irf: Sequence[float]
) -> np.ndarray:
    """Outcome response to the purely transitory shock: truncated convolution."""
    s = np.asarray(shock_path, dtype=float)
    a = np.asarray(outcome_irf, dtype=float)
    if s.shape != a.shape:
        raise DataError(f"length mismatch: shock path {s.size}, outcome irf {a.size}")
    return np.convolve(s, a)[: s.size]


def permanent_outcome_irf(transitory: Sequence[float]) -> np.ndarray:
    """Cumulative response to a sustained unit shift: running sums."""
    return np.cumsum(np.asarray(transitory, dtype=float))


@dataclass(frozen=True)
class ShockDecomposition:
    own_irf: np.ndarray
    shock_path: np.ndarray
    transitory: np.ndarray
    permanent: np.ndarray

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "horizon": np.arange(self.own_irf.size),
                "own_irf": self.own_irf,
                "shock_path": self.shock_path,
                "transitory": self.transitory,
                "permanent": self.permanent,
            }
        )

    def to_csv(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False)


def decompose_response(
    own_irf: Sequence[float],
    outcome_irf: Sequence[float],
    *,
    normalize: bool = True,
) -> ShockDecomposition:
    """Split an estimated response into transitory and cumulative-permanent parts.

    ``own_irf`` is the measure's response to its own shock (impact element
    normalized to one), ``outcome_irf`` the outcome's response to the same
    shock; both truncated at the same horizon.
    """
    q = np.asarray(own_irf, dtype=float)
    if normalize:
        if q[0] == 0:
            raise DataError("own_irf impact element is zero; cannot normalize")
        q = q / q[0]
    shock = solve_transitory_shock(q)
    transitory = transitory_outcome_irf(shock, outcome_irf)
    return ShockDecomposition(
        own_irf=q,
        shock_path=shock,
        transitory=transitory,
        permanent=permanent_outcome_irf(transitory),
    )


def ardl_to_csv(fit: ArdlFit, irf: ArdlIrf, params_path: str | Path, irf_path: str | Path) -> None:
    rows = [("alpha", fit.alpha, fit.se(fit.names[0]))]
    for j, b in enumerate(fit.beta, start=1):
        rows.append((f"beta{j}", b, fit.se(fit.names[j])))
    for j, g in enumerate(fit.gamma, start=1):
        rows.append((f"gamma{j}", g, fit.se(fit.names[fit.lags + j])))
    pd.DataFrame(rows, columns=["parameter", "estimate", "se"]).to_csv(params_path, index=False)
    pd.DataFrame(
        {
            "horizon": np.arange(irf.phi.size),
            "phi": irf.phi,
            "cumulative": irf.cumulative,
        }
    ).to_csv(irf_path, index=False)
