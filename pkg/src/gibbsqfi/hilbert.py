"""Dense Hermitian operators, Gibbs states and thermal averages.

Everything is exact diagonalization at desk scale (dense storage, dims up
to a few thousand).  The inverse temperature is absorbed into the
generator: a Gibbs state is rho = exp(-T)/Z for a Hermitian T, so callers
that think in (H, beta) should pass beta*H.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "HermitianOperator",
    "SpectralDecomposition",
    "GibbsState",
    "ObservableInEigenbasis",
    "NestedCommutator",
    "as_operator",
    "eigendecompose",
    "gibbs_state",
    "thermal_average",
    "to_eigenbasis",
    "nested_commutator",
    "solve_xst",
    "duhamel_weight_matrix",
    "read_operator_json",
    "write_operator_json",
]

# weights below this are clamped to keep states full rank
_WEIGHT_FLOOR = 1e-300


class HermitianOperator:
    """A dense complex square matrix asserted Hermitian at construction.

    The stored matrix is the Hermitian part (H + H^dagger)/2; construction
    fails if the asymmetry exceeds ``atol`` (1e-12 by default).
    """

    __slots__ = ("matrix",)

    def __init__(self, entries, atol: float = 1e-12):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError("expected a square matrix of dimension >= 1")
        asym = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if asym > atol:
            raise ValueError(
                f"matrix is not Hermitian: max|H - H^dagger| = {asym:.3e} > {atol:.1e}"
            )
        self.matrix = 0.5 * (m + m.conj().T)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


def as_operator(value) -> HermitianOperator:
    """Coerce an array or HermitianOperator to a HermitianOperator."""
    if isinstance(value, HermitianOperator):
        return value
    return HermitianOperator(value)


@dataclass
class SpectralDecomposition:
    """Eigenvalues (ascending) and unitary eigenvector columns of T."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def eigendecompose(H) -> SpectralDecomposition:
    """Full eigendecomposition with residual and unitarity checks."""
    op = as_operator(H)
    vals, vecs = np.linalg.eigh(op.matrix)
    scale = max(float(np.max(np.abs(op.matrix))), 1e-300)
    recon = (vecs * vals) @ vecs.conj().T
    recon_err = float(np.max(np.abs(recon - op.matrix)))
    if recon_err > 1e-10 * scale:
        raise ArithmeticError(
            f"eigendecomposition residual {recon_err:.3e} exceeds 1e-10 * |H|"
        )
    unit_err = float(
        np.max(np.abs(vecs.conj().T @ vecs - np.eye(op.dim)))
    )
    if unit_err > 1e-12:
        raise ArithmeticError(f"eigenvector unitarity defect {unit_err:.3e}")
    return SpectralDecomposition(vals, vecs)


@dataclass
class GibbsState:
    """Gibbs weights rho_m = exp(-T_m - logZ) over a spectral decomposition.

    weights sum to one and are strictly positive; entries that underflow
    are clamped to 1e-300 and counted in ``clamped``.  ``log_weights`` is
    kept exactly as -T_m - logZ so ratios of weights never lose precision.
    """

    decomposition: SpectralDecomposition
    weights: np.ndarray
    log_weights: np.ndarray
    logZ: float
    clamped: int = 0
    _rho_matrix: np.ndarray | None = field(default=None, repr=False)
    _generator: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.decomposition.dim

    def rho_matrix(self) -> np.ndarray:
        """The density matrix in the original basis (cached)."""
        if self._rho_matrix is None:
            U = self.decomposition.eigenvectors
            self._rho_matrix = (U * self.weights) @ U.conj().T
        return self._rho_matrix

    def generator_matrix(self) -> np.ndarray:
        """The generator T rebuilt from the eigen-data (cached)."""
        if self._generator is None:
            U = self.decomposition.eigenvectors
            self._generator = (U * self.decomposition.eigenvalues) @ U.conj().T
        return self._generator


def gibbs_state(T) -> GibbsState:
    """Construct the Gibbs state of a Hermitian generator (beta absorbed).

    Weights are computed with a max-shift log-sum-exp, so arbitrarily
    large spectral ranges neither overflow nor underflow the partition sum.
    """
    decomposition = eigendecompose(T)
    lam = decomposition.eigenvalues
    shift = float(np.min(lam))
    log_norm = float(np.log(np.sum(np.exp(-(lam - shift)))))
    log_w = -(lam - shift) - log_norm
    # one renormalization pass keeps sum(weights) at 1 to machine precision
    log_w -= float(np.log(np.sum(np.exp(log_w))))
    weights = np.exp(log_w)
    clamped = int(np.sum(weights < _WEIGHT_FLOOR))
    if clamped:
        warnings.warn(
            f"{clamped} Gibbs weights below {_WEIGHT_FLOOR:g} clamped",
            RuntimeWarning,
            stacklevel=2,
        )
        weights = np.maximum(weights, _WEIGHT_FLOOR)
    total = float(np.sum(weights))
    if abs(total - 1.0) > 1e-13:
        raise ArithmeticError(f"Gibbs weights sum to {total!r}, not 1")
    return GibbsState(
        decomposition=decomposition,
        weights=weights,
        log_weights=log_w,
        logZ=-shift + log_norm,
        clamped=clamped,
    )


@dataclass
class ObservableInEigenbasis:
    """Matrix elements of an operator in the eigenbasis of the generator."""

    elements: np.ndarray
    basis: SpectralDecomposition | None = None
    hermitian: bool = True

    def __post_init__(self):
        if self.hermitian:
            defect = float(
                np.max(np.abs(self.elements - self.elements.conj().T))
            )
            if defect > 1e-10 * max(1.0, float(np.max(np.abs(self.elements)))):
                raise ValueError(
                    f"elements are not Hermitian (defect {defect:.3e})"
                )


def to_eigenbasis(state: GibbsState, A) -> ObservableInEigenbasis:
    """Rotate a Hermitian operator into the state's eigenbasis."""
    op = as_operator(A)
    if op.dim != state.dim:
        raise ValueError(f"dimension mismatch: {op.dim} vs {state.dim}")
    U = state.decomposition.eigenvectors
    elements = U.conj().T @ op.matrix @ U
    return ObservableInEigenbasis(elements, state.decomposition, hermitian=True)


def thermal_average(state: GibbsState, A) -> float:
    """Thermal expectation <A> = sum_m rho_m <m|A|m> for Hermitian A."""
    op = as_operator(A)
    if op.dim != state.dim:
        raise ValueError(f"dimension mismatch: {op.dim} vs {state.dim}")
    U = state.decomposition.eigenvectors
    diag = np.einsum("im,ij,jm->m", U.conj(), op.matrix, U)
    value = complex(np.dot(state.weights, diag))
    if abs(value.imag) > 1e-12 * max(1.0, abs(value.real)):
        warnings.warn(
            f"thermal average has imaginary residue {value.imag:.3e}",
            RuntimeWarning,
            stacklevel=2,
        )
    return value.real


@dataclass
class NestedCommutator:
    """R_p = [T, R_{p-1}] with R_0 = S; Hermitian for even p, anti- for odd."""

    matrix: np.ndarray
    order: int

    @property
    def is_hermitian(self) -> bool:
        return self.order % 2 == 0


def nested_commutator(T, S, p: int) -> NestedCommutator:
    """Iterated commutator R_p of the generator with an observable."""
    if p < 0:
        raise ValueError("order p must be >= 0")
    T_op, S_op = as_operator(T), as_operator(S)
    if T_op.dim != S_op.dim:
        raise ValueError(f"dimension mismatch: {T_op.dim} vs {S_op.dim}")
    R = S_op.matrix.copy()
    for _ in range(p):
        R = T_op.matrix @ R - R @ T_op.matrix
    return NestedCommutator(R, p)


def solve_xst(T, S) -> ObservableInEigenbasis:
    """Solve S = [T, X] for X with zero diagonal in the T-eigenbasis.

    Requires S to have (numerically) zero diagonal there, and no nonzero
    element across a degenerate eigenvalue pair of T.  The returned X is
    anti-Hermitian for Hermitian S.
    """
    T_op, S_op = as_operator(T), as_operator(S)
    if T_op.dim != S_op.dim:
        raise ValueError(f"dimension mismatch: {T_op.dim} vs {S_op.dim}")
    decomposition = eigendecompose(T_op)
    U = decomposition.eigenvectors
    S_eig = U.conj().T @ S_op.matrix @ U
    diag = np.abs(np.diag(S_eig))
    bad = np.nonzero(diag > 1e-12)[0]
    if bad.size:
        raise ValueError(
            f"S has nonzero diagonal in the T-eigenbasis at indices {bad.tolist()}"
        )
    lam = decomposition.eigenvalues
    gaps = lam[:, None] - lam[None, :]
    scale = max(float(np.max(np.abs(S_eig))), 1e-300)
    degenerate = (np.abs(gaps) < 1e-10) & (np.abs(S_eig) > 1e-14 * scale)
    np.fill_diagonal(degenerate, False)
    if np.any(degenerate):
        m, n = np.argwhere(degenerate)[0]
        raise ZeroDivisionError(
            f"degenerate eigenvalue pair ({int(m)}, {int(n)}) carries a "
            "nonzero S element; X is singular there"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        X = np.where(np.abs(gaps) < 1e-10, 0.0, S_eig / np.where(gaps == 0.0, 1.0, gaps))
    np.fill_diagonal(X, 0.0)
    return ObservableInEigenbasis(X, decomposition, hermitian=False)


def duhamel_weight_matrix(state: GibbsState) -> np.ndarray:
    """The stable kernel W[m, n] = (rho_n - rho_m)/(ln rho_n - ln rho_m).

    Evaluated as rho * expm1(delta)/delta on the side with the smaller
    weight, which is exact in floating point and has the analytic
    degenerate limit W[m, m] = rho_m.  Equals sqrt(rho_m rho_n) * sinhc(x)
    with x = (ln rho_n - ln rho_m)/2.
    """
    log_w = state.log_weights
    w = state.weights
    delta = log_w[None, :] - log_w[:, None]  # ln rho_n - ln rho_m
    W = np.empty_like(delta)
    small = np.abs(delta) < 2e-4
    pos = (delta > 0) & ~small
    neg = (delta < 0) & ~small
    w_m = np.broadcast_to(w[:, None], delta.shape)
    w_n = np.broadcast_to(w[None, :], delta.shape)
    W[pos] = w_n[pos] * (-np.expm1(-delta[pos])) / delta[pos]
    W[neg] = w_m[neg] * np.expm1(delta[neg]) / delta[neg]
    x = 0.5 * delta[small]
    # sqrt factors kept separate so tiny weight products cannot underflow
    geo = np.sqrt(w_m[small]) * np.sqrt(w_n[small])
    W[small] = geo * (1.0 + x * x / 6.0 + x ** 4 / 120.0)
    return W


def read_operator_json(path) -> tuple[HermitianOperator, float]:
    """Load the {"dim": n, "entries": [[[re, im], ...], ...]} matrix format.

    The matrix is symmetrized; the asymmetry norm max|H - H^dagger| of the
    raw entries is returned alongside the operator.
    """
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    dim = int(payload["dim"])
    entries = payload["entries"]
    if len(entries) != dim or any(len(row) != dim for row in entries):
        raise ValueError(f"entries of {path} do not form a {dim}x{dim} matrix")
    m = np.array(
        [[complex(cell[0], cell[1]) for cell in row] for row in entries],
        dtype=complex,
    )
    asymmetry = float(np.max(np.abs(m - m.conj().T)))
    return HermitianOperator(0.5 * (m + m.conj().T)), asymmetry


def write_operator_json(op, path):
    """Write an operator in the JSON matrix exchange format."""
    matrix = as_operator(op).matrix
    payload = {
        "dim": matrix.shape[0],
        "entries": [
            [[float(z.real), float(z.imag)] for z in row] for row in matrix
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")
