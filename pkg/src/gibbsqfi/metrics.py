"""Monotone Riemannian metrics d^2_f(S, S) on Gibbs states by four routes.

The routes are mutually cross-checking:

  * ``metric_mc_oracle``   -- Morozova-Cencov double sum over eigenpairs,
                              the brute-force reference;
  * ``metric_spectral``    -- filter-function form with the stable
                              log-mean kernel;
  * ``metric_from_dsf``    -- line sum over a structure-factor comb;
  * ``metric_series_A/B``  -- truncated moment expansions around the BKM
                              and MC points, built from iterated
                              commutators.

All metrics carry the 1/4 normalization that makes the Bures member one
quarter of the fidelity susceptibility (see fidelity_susceptibility).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import families as fam
from .dsf import LineSpectrum, bogoliubov_duhamel, build_cross_dsf, build_dsf
from .hilbert import (
    GibbsState,
    HermitianOperator,
    as_operator,
    duhamel_weight_matrix,
    thermal_average,
    to_eigenbasis,
)

__all__ = [
    "MetricDiagnostics",
    "MetricResult",
    "metric_mc_oracle",
    "metric_spectral",
    "metric_from_dsf",
    "metric_series_A",
    "metric_series_B",
    "metric_difference_to_bkm",
    "cross_metric",
    "fidelity_susceptibility",
    "METHODS",
]

METHODS = ("mc_oracle", "spectral", "dsf_sum", "series_A", "series_B")

# window where the log-mean kernel switches to its Taylor form
_DEGENERATE_WINDOW = 2e-4


@dataclass
class MetricDiagnostics:
    """Method metadata attached to every metric value."""

    truncation: int | None = None
    convergence_radius_ok: bool = True
    degenerate_pairs_handled: int = 0
    last_term: float | None = None


@dataclass
class MetricResult:
    value: float
    method: str
    diagnostics: MetricDiagnostics = field(default_factory=MetricDiagnostics)


def _nonnegative(raw: float, scale: float, method: str) -> float:
    if raw < 0.0:
        if raw < -1e-11 * max(scale, 1e-300):
            raise ArithmeticError(f"{method} produced a negative metric: {raw!r}")
        return 0.0
    return raw


@dataclass
class _Frame:
    """Family-independent eigen-data shared by the closed-sum routes."""

    state: GibbsState
    s_eig: np.ndarray
    abs2: np.ndarray
    x: np.ndarray
    kernel: np.ndarray
    mean: float
    degenerate_pairs: int


def _build_frame(state: GibbsState, S) -> _Frame:
    s_eig = to_eigenbasis(state, S).elements
    lam = state.decomposition.eigenvalues
    x = 0.5 * (lam[:, None] - lam[None, :])  # (1/2) ln(rho_n / rho_m)
    kernel = duhamel_weight_matrix(state)
    abs2 = np.abs(s_eig) ** 2
    mean = float(np.dot(state.weights, np.diag(s_eig).real))
    off = ~np.eye(state.dim, dtype=bool)
    degenerate = int(np.sum((np.abs(2.0 * x) < _DEGENERATE_WINDOW) & off))
    return _Frame(state, s_eig, abs2, x, kernel, mean, degenerate)


def _spectral_value(frame: _Frame, family: fam.MonotoneFamily) -> float:
    g = fam.eval_g(family, frame.x)
    gross = float(np.sum(g * frame.kernel * frame.abs2))
    return _nonnegative(
        0.25 * (gross - frame.mean ** 2), 0.25 * gross, "spectral"
    )


def _oracle_value(frame: _Frame, family: fam.MonotoneFamily) -> float:
    w = frame.state.weights
    lw = frame.state.log_weights
    delta = lw[None, :] - lw[:, None]
    c = fam.eval_c(family, w[:, None], w[None, :])
    summand = c * frame.kernel ** 2 * frame.abs2
    # analytic degenerate limit of c_f(rho, rho) q^2 is rho itself
    deg = np.abs(delta) < 1e-10
    rho_m = np.broadcast_to(w[:, None], summand.shape)
    summand = np.where(deg, rho_m * frame.abs2, summand)
    np.fill_diagonal(summand, 0.0)
    diag = np.diag(frame.s_eig).real
    classical = float(np.dot(w, (diag - frame.mean) ** 2))
    gross = classical + float(np.sum(summand))
    return _nonnegative(0.25 * gross, 0.25 * gross, "mc_oracle")


def metric_spectral(state: GibbsState, S, family: fam.MonotoneFamily) -> MetricResult:
    """Metric via the filter function: (1/4)[sum g_f(x) W |S_mn|^2 - <S>^2].

    x = (1/2) ln(rho_n/rho_m) and W is the log-mean kernel, so degenerate
    eigenvalue pairs take their finite limit automatically.
    """
    frame = _build_frame(state, S)
    value = _spectral_value(frame, family)
    return MetricResult(
        value,
        "spectral",
        MetricDiagnostics(degenerate_pairs_handled=frame.degenerate_pairs),
    )


def metric_mc_oracle(state: GibbsState, S, family: fam.MonotoneFamily) -> MetricResult:
    """Brute-force metric from the Morozova-Cencov kernel c_f(rho_m, rho_n).

    (1/4)[ Var(S^d) + sum_{m != n} c_f(rho_m, rho_n) q_mn^2 |S_mn|^2 ] with
    q the ratio (rho_n - rho_m)/(ln rho_n - ln rho_m); pairs closer than
    1e-10 in log weight use the analytic limit rho_m.  Serves as the
    reference for every other route.
    """
    frame = _build_frame(state, S)
    value = _oracle_value(frame, family)
    return MetricResult(
        value,
        "mc_oracle",
        MetricDiagnostics(degenerate_pairs_handled=frame.degenerate_pairs),
    )


def _bkm_kernel(omegas: np.ndarray) -> np.ndarray:
    """(1 - e^{-w})/w per line, with the value 1 at the elastic line."""
    k = np.ones_like(omegas)
    nz = omegas != 0.0
    k[nz] = -np.expm1(-omegas[nz]) / omegas[nz]
    return k


def _kernel_times_weight(omegas: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """(1 - e^{-w})/w * weight, stable against exp overflow at w << 0."""
    out = np.empty(omegas.shape, dtype=float)
    extreme = omegas < -690.0
    safe = ~extreme
    out[safe] = _bkm_kernel(omegas[safe]) * weights[safe]
    if np.any(extreme):
        # detailed balance keeps log(weight) + |omega| bounded for
        # physical spectra; unbalanced inputs may overflow to inf
        om = -omegas[extreme]
        with np.errstate(over="ignore"):
            out[extreme] = np.exp(np.log(weights[extreme]) + om - np.log(om))
    return out


def metric_from_dsf(Q: LineSpectrum, family: fam.MonotoneFamily) -> MetricResult:
    """Metric as the structure-factor line sum.

    (1/4)[ sum_j g_f(w_j/2) (1 - e^{-w_j})/w_j  w_j_weight - <S>^2 ], the
    elastic line entering with the limit factor 1.
    """
    if Q.kind != "diagonal":
        raise ValueError("metric_from_dsf expects a diagonal spectrum")
    g = fam.eval_g(family, 0.5 * Q.omegas)
    gross = float(np.sum(g * _kernel_times_weight(Q.omegas, Q.weights)))
    value = _nonnegative(0.25 * (gross - Q.mean_s ** 2), 0.25 * gross, "dsf_sum")
    return MetricResult(value, "dsf_sum", MetricDiagnostics())


def _moments_from_commutators(state: GibbsState, S, orders) -> dict[int, float]:
    """Moments M_q = (-1)^q <R_q(S) S> from genuine iterated commutators."""
    S_op = as_operator(S)
    T_matrix = state.generator_matrix()
    rho = state.rho_matrix()
    wanted = sorted(set(orders))
    out: dict[int, float] = {}
    R = S_op.matrix.copy()
    for q in range(wanted[-1] + 1):
        if q > 0:
            R = T_matrix @ R - R @ T_matrix
        if q in wanted:
            value = complex(np.trace(rho @ R @ S_op.matrix))
            out[q] = (-1.0) ** q * value.real
    return out


def _support_max_omega(state: GibbsState, S) -> float:
    """Largest Bohr frequency carrying weight of S."""
    s_eig = to_eigenbasis(state, S).elements
    lam = state.decomposition.eigenvalues
    mags = np.abs(s_eig)
    coupled = mags > 1e-14 * max(float(mags.max()), 1e-300)
    gaps = np.abs(lam[:, None] - lam[None, :])
    return float(np.max(np.where(coupled, gaps, 0.0)))


def metric_series_A(
    state: GibbsState, S, family: fam.MonotoneFamily, L: int
) -> MetricResult:
    """Truncated odd-moment expansion around the BKM metric.

    d^2_f ~ d^2_BKM + (1/4) sum_{l=1}^{L} (1/2)^{2l-1} a_{2l-1}(f) M_{2l-1}
    with the g-series coefficients a and moments from iterated commutators.
    The radius flag reports whether max|w|/2 lies inside the convergence
    radius of the g-series; outside it the value is reported but suspect.
    """
    if L < 1:
        raise ValueError("L must be a positive integer")
    mean = thermal_average(state, S)
    base = bogoliubov_duhamel(state, S, S) - mean ** 2
    coeffs = fam.taylor_coeffs(family, "g", L)
    moments = _moments_from_commutators(state, S, [2 * l - 1 for l in range(1, L + 1)])
    last = 0.0
    total = 0.25 * base
    for l in range(1, L + 1):
        term = 0.25 * 0.5 ** (2 * l - 1) * coeffs[l - 1] * moments[2 * l - 1]
        total += term
        last = term
    radius = fam.g_series_radius(family)
    ok = 0.5 * _support_max_omega(state, S) < radius
    return MetricResult(
        total,
        "series_A",
        MetricDiagnostics(truncation=L, convergence_radius_ok=ok, last_term=abs(last)),
    )


def metric_series_B(
    state: GibbsState, S, family: fam.MonotoneFamily, L: int
) -> MetricResult:
    """Truncated even-moment expansion around the MC metric (the variance).

    d^2_f ~ d^2_MC + (1/4) sum_{l=1}^{L} (1/2)^{2l} a_{2l}(f) M_{2l} with
    the ghat-series coefficients; radius diagnostics as in series A.
    """
    if L < 1:
        raise ValueError("L must be a positive integer")
    S_op = as_operator(S)
    s_squared = HermitianOperator(S_op.matrix @ S_op.matrix)
    base = thermal_average(state, s_squared) - thermal_average(state, S_op) ** 2
    coeffs = fam.taylor_coeffs(family, "g_hat", L)
    moments = _moments_from_commutators(state, S_op, [2 * l for l in range(1, L + 1)])
    last = 0.0
    total = 0.25 * base
    for l in range(1, L + 1):
        term = 0.25 * 0.5 ** (2 * l) * coeffs[l - 1] * moments[2 * l]
        total += term
        last = term
    radius = fam.g_hat_series_radius(family)
    ok = 0.5 * _support_max_omega(state, S_op) < radius
    return MetricResult(
        total,
        "series_B",
        MetricDiagnostics(truncation=L, convergence_radius_ok=ok, last_term=abs(last)),
    )


def metric_difference_to_bkm(state: GibbsState, S, family: fam.MonotoneFamily) -> float:
    """d^2_f - d^2_BKM as a single line sum over the dissipative weights.

    (1/4) sum_j [g_f(w_j/2) - 1] (1 - e^{-w_j})/w_j w_j_weight; identically
    zero for the BKM family.
    """
    Q = build_dsf(state, S)
    g = fam.eval_g(family, 0.5 * Q.omegas)
    return 0.25 * float(np.sum((g - 1.0) * _kernel_times_weight(Q.omegas, Q.weights)))


def cross_metric(state: GibbsState, A, B, family: fam.MonotoneFamily) -> complex:
    """Cross metric d^2_f(dA, dB) over the complex pair spectrum.

    (1/8) sum_j (w/2)^{-1} tanh(w/2) g_f(w/2) (1 + e^{-w}) q_j; the
    tanh/cotanh factors collapse to (1 - e^{-w})/w, giving the same kernel
    as the diagonal line sum.  Real for A = B; satisfies
    cross_metric(A, B) = conj(cross_metric(B, A)).
    """
    Q = build_cross_dsf(state, A, B)
    g = fam.eval_g(family, 0.5 * Q.omegas)
    kernel = _bkm_kernel(Q.omegas)
    return complex(0.25 * np.sum(g * kernel * Q.weights))


def fidelity_susceptibility(state: GibbsState, S) -> float:
    """chi_F = 4 d^2_Bures, the conventional fidelity-susceptibility scale."""
    return 4.0 * metric_spectral(state, S, fam.BURES).value
