"""Bezier curve math on coefficient matrices.

A degree-b curve with n outputs is stored as an (n, b+1) float64 matrix;
column j is control point j. Evaluation, derivatives, splitting and
least-squares fitting are all expressed through the Bernstein basis, so
every operation is a matrix product on the coefficient matrix and
vectorizes cleanly over many parameters at once.

Everything here is pure: no interior mutation, safe to call from any
number of threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import FitError

# Binomial rows for every degree a gait library realistically uses are
# built eagerly at import; higher degrees fall back to the same cache.
MAX_PRECOMPUTED_DEGREE = 15


@lru_cache(maxsize=None)
def binomial_row(degree: int) -> np.ndarray:
    """C(degree, j) for j = 0..degree as a read-only float64 vector."""
    row = np.ones(degree + 1)
    for j in range(1, degree + 1):
        row[j] = row[j - 1] * (degree - j + 1) / j
    row.flags.writeable = False
    return row


for _d in range(MAX_PRECOMPUTED_DEGREE + 1):
    binomial_row(_d)
del _d


def _check_tau(tau: float) -> None:
    # NaN fails the comparison and is rejected too.
    if not 0.0 <= tau <= 1.0:
        raise ValueError(
            f"tau must lie in [0, 1], got {tau!r}; callers must clamp explicitly"
        )


def bernstein_basis(degree: int, tau: float) -> np.ndarray:
    """Bernstein basis values B_j,degree(tau) for j = 0..degree."""
    j = np.arange(degree + 1)
    return binomial_row(degree) * tau**j * (1.0 - tau) ** (degree - j)


def bernstein_matrix(degree: int, taus: np.ndarray) -> np.ndarray:
    """Design matrix whose row i holds the basis evaluated at taus[i]."""
    taus = np.asarray(taus, dtype=np.float64)
    j = np.arange(degree + 1)
    t = taus[:, None]
    return binomial_row(degree) * t**j * (1.0 - t) ** (degree - j)


def subdivision_matrices(degree: int, s: float) -> tuple[np.ndarray, np.ndarray]:
    """(b+1)x(b+1) matrices L, R such that coeffs @ L and coeffs @ R are the
    control matrices of the curve restricted to [0, s] and [s, 1].

    Column k of L carries the Bernstein weights of degree k at s (the first
    point of the k-th de Casteljau level); R mirrors this for the tail.
    Built per call: construction is O(b^2) and s changes on every splice.
    """
    b = degree
    sp = s ** np.arange(b + 1)
    cp = (1.0 - s) ** np.arange(b + 1)
    left = np.zeros((b + 1, b + 1))
    right = np.zeros((b + 1, b + 1))
    for k in range(b + 1):
        j = np.arange(k + 1)
        left[j, k] = binomial_row(k) * sp[j] * cp[k - j]
        i = np.arange(k, b + 1)
        right[i, k] = binomial_row(b - k) * sp[i - k] * cp[b - i]
    return left, right


@dataclass(frozen=True)
class BezierCurve:
    """Multi-output Bezier curve; row i is output i, column j control point j."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=np.float64))
        if coeffs.ndim != 2 or coeffs.shape[0] < 1 or coeffs.shape[1] < 2:
            raise ValueError(
                "coefficient matrix must be (n_rows >= 1, degree+1 >= 2), "
                f"got shape {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficient matrix contains non-finite entries")
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def n_rows(self) -> int:
        return self.coeffs.shape[0]

    def eval(self, tau: float) -> np.ndarray:
        """Curve value at tau in [0, 1]; out-of-range tau raises ValueError."""
        _check_tau(tau)
        return self.coeffs @ bernstein_basis(self.degree, tau)

    def sample(self, taus: np.ndarray) -> np.ndarray:
        """Evaluate at many parameters at once; returns (len(taus), n_rows)."""
        taus = np.asarray(taus, dtype=np.float64)
        if taus.size and (taus.min() < 0.0 or taus.max() > 1.0 or not np.all(np.isfinite(taus))):
            raise ValueError("tau values must lie in [0, 1]")
        return bernstein_matrix(self.degree, taus) @ self.coeffs.T

    def _derivative_coeffs(self, order: int) -> np.ndarray:
        # Hodograph: control points of d^order/dtau^order, degree b - order.
        d = np.diff(self.coeffs, n=order, axis=1)
        scale = 1.0
        for k in range(order):
            scale *= self.degree - k
        return scale * d

    def eval_derivative(self, tau: float, order: int = 1) -> np.ndarray:
        """order-th derivative with respect to tau.

        Orders beyond the degree return the zero vector (the polynomial
        derivative vanishes); order < 1 is a domain error.
        """
        _check_tau(tau)
        if order < 1:
            raise ValueError(f"derivative order must be >= 1, got {order}")
        if order > self.degree:
            return np.zeros(self.n_rows)
        d = self._derivative_coeffs(order)
        return d @ bernstein_basis(self.degree - order, tau)

    def sample_derivative(self, taus: np.ndarray, order: int = 1) -> np.ndarray:
        """Vectorized eval_derivative; returns (len(taus), n_rows)."""
        taus = np.asarray(taus, dtype=np.float64)
        if taus.size and (taus.min() < 0.0 or taus.max() > 1.0 or not np.all(np.isfinite(taus))):
            raise ValueError("tau values must lie in [0, 1]")
        if order < 1:
            raise ValueError(f"derivative order must be >= 1, got {order}")
        if order > self.degree:
            return np.zeros((len(taus), self.n_rows))
        d = self._derivative_coeffs(order)
        return bernstein_matrix(self.degree - order, taus) @ d.T

    def split(self, s: float) -> tuple[BezierCurve, BezierCurve]:
        """Subdivide at s in (0, 1]: left covers [0, s], right covers [s, 1].

        Both halves keep the original degree. At s = 1 the left half equals
        the whole curve and the right half is constant at the last control
        point. s = 0 is rejected: a zero-length segment has no usable phase
        mapping downstream.
        """
        if not 0.0 < s <= 1.0:
            raise ValueError(f"split point must lie in (0, 1], got {s!r}")
        left_m, right_m = subdivision_matrices(self.degree, s)
        # Column-by-column products share the summation order of eval(),
        # so the halves meet the original curve bitwise at the seam:
        # right.eval(0) == left.eval(1) == eval(s).
        left = np.empty_like(self.coeffs)
        right = np.empty_like(self.coeffs)
        for k in range(self.degree + 1):
            left[:, k] = self.coeffs @ left_m[:, k]
            right[:, k] = self.coeffs @ right_m[:, k]
        return BezierCurve(left), BezierCurve(right)


def fit_least_squares(taus: np.ndarray, values: np.ndarray, degree: int) -> BezierCurve:
    """Fit the degree-`degree` curve minimizing sum_i ||curve(tau_i) - y_i||^2.

    `values` is (m, n_rows), or (m,) for a scalar curve. Solved through the
    Bernstein design matrix with numpy's SVD-backed lstsq; a rank-deficient
    design raises FitError carrying the condition number.
    """
    taus = np.asarray(taus, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    if taus.ndim != 1 or values.ndim != 2 or len(taus) != len(values):
        raise ValueError(
            f"need matching 1-D taus and (m, n) values, got {taus.shape} and {values.shape}"
        )
    if len(taus) < degree + 1:
        raise ValueError(f"need at least degree+1 = {degree + 1} samples, got {len(taus)}")
    if not np.all(np.isfinite(taus)) or taus.min() < 0.0 or taus.max() > 1.0:
        raise ValueError("sample parameters must lie in [0, 1]")
    if len(np.unique(taus)) != len(taus):
        raise ValueError("sample parameters must be pairwise distinct")
    design = bernstein_matrix(degree, taus)
    solution, _, rank, singular = np.linalg.lstsq(design, values, rcond=None)
    if rank < degree + 1:
        cond = float(singular[0] / singular[-1]) if singular[-1] > 0.0 else float("inf")
        raise FitError(
            f"Bernstein design matrix is rank deficient: rank {rank} < {degree + 1}, "
            f"condition number {cond:.3e}"
        )
    return BezierCurve(solution.T)
