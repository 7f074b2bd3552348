"""Dense real linear algebra used by every audit.

Matrices are plain ``float64`` numpy arrays; :func:`as_matrix` is the single
gate that enforces shape and finiteness.  Eigen- and singular-value work is
done by Jacobi rotations compiled with numba (two-sided for eigenpairs,
one-sided for singular values), and products go through a fixed-order triple
loop so results do not depend on the BLAS in use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

Matrix = np.ndarray

SYMMETRY_RTOL = 1e-12
JACOBI_RTOL = 1e-13
JACOBI_MAX_SWEEPS = 100
ORDER_TOL = 1e-9
PD_FLOOR = 1e-10


class LinalgError(ValueError):
    pass


class ConvergenceError(LinalgError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NotPositiveDefiniteError(LinalgError):
    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


@dataclass(frozen=True)
class SpectralSummary:
    singular_values: np.ndarray
    eigenvalues_symmetric: np.ndarray | None = None


@dataclass(frozen=True)
class PsdOrderWitness:
    lhs_minus_rhs_min_eigenvalue: float
    holds: bool


def as_matrix(a) -> Matrix:
    """Validate ``a`` as a finite 2-d real array and return it as float64."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise LinalgError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise LinalgError("matrix entries must be finite")
    return m


def identity(v: int) -> Matrix:
    return np.eye(v)


def _require_square(a: Matrix, what: str = "matrix") -> int:
    if a.shape[0] != a.shape[1]:
        raise LinalgError(f"{what} must be square, got shape {a.shape}")
    return a.shape[0]


def is_symmetric(a: Matrix, rtol: float = SYMMETRY_RTOL) -> bool:
    if a.shape[0] != a.shape[1]:
        return False
    return float(np.max(np.abs(a - a.T))) <= rtol * max(hs_norm(a), 1.0)


# ---------------------------------------------------------------------------
# compiled kernels


@numba.njit(cache=True)
def _matmul_kernel(a, b):
    n, k = a.shape
    m = b.shape[1]
    out = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            s = 0.0
            for p in range(k):
                s += a[i, p] * b[p, j]
            out[i, j] = s
    return out


@numba.njit(cache=True)
def _offdiag_norm(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j] * a[i, j]
    return math.sqrt(s)


@numba.njit(cache=True)
def _jacobi_kernel(a, tol, max_sweeps):
    # Cyclic-by-row Jacobi; returns (diagonal, vectors, sweeps_used, off_norm).
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    off = _offdiag_norm(a)
    sweeps = 0
    while off > tol and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        sweeps += 1
        off = _offdiag_norm(a)
    d = np.empty(n)
    for i in range(n):
        d[i] = a[i, i]
    return d, v, sweeps, off


@numba.njit(cache=True)
def _one_sided_jacobi_kernel(a, tol, floor, max_sweeps):
    # Hestenes rotations orthogonalise the columns of a (rows >= cols); this is
    # Jacobi on aᵀa applied implicitly.  Returns (u, v, sweeps, converged).
    n = a.shape[1]
    u = a.copy()
    v = np.eye(n)
    sweeps = 0
    converged = False
    while sweeps < max_sweeps:
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for k in range(u.shape[0]):
                    alpha += u[k, p] * u[k, p]
                    beta += u[k, q] * u[k, q]
                    gamma += u[k, p] * u[k, q]
                # columns below floor are numerically zero and never rotated
                if gamma == 0.0 or alpha <= floor or beta <= floor:
                    continue
                if abs(gamma) <= tol * math.sqrt(alpha) * math.sqrt(beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                if abs(zeta) > 1e150:
                    t = 0.5 / zeta
                else:
                    t = 1.0 / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                    if zeta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                for k in range(u.shape[0]):
                    ukp = u[k, p]
                    ukq = u[k, q]
                    u[k, p] = c * ukp - s * ukq
                    u[k, q] = s * ukp + c * ukq
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        sweeps += 1
        if not rotated:
            converged = True
            break
    return u, v, sweeps, converged


# ---------------------------------------------------------------------------
# products and decompositions


def multiply(a: Matrix, b: Matrix) -> Matrix:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise LinalgError(f"dimension mismatch: {a.shape} x {b.shape}")
    return _matmul_kernel(np.ascontiguousarray(a), np.ascontiguousarray(b))


def adjoint(a: Matrix) -> Matrix:
    return np.ascontiguousarray(as_matrix(a).T)


def matrix_power(a: Matrix, k: int) -> Matrix:
    """``a**k`` by repeated left multiplication (k >= 1)."""
    if k < 1:
        raise LinalgError(f"power must be >= 1, got {k}")
    out = as_matrix(a)
    for _ in range(k - 1):
        out = multiply(out, a)
    return out


def symmetric_eigen(a: Matrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, vectors)`` with eigenvalues in decreasing order and
    the matching orthonormal eigenvectors as the columns of ``vectors``.
    Equal eigenvalues keep their diagonal order.
    """
    a = as_matrix(a)
    _require_square(a)
    if not is_symmetric(a):
        raise LinalgError("symmetric_eigen requires a symmetric matrix")
    sym = 0.5 * (a + a.T)
    tol = JACOBI_RTOL * hs_norm(sym)
    d, vecs, _, off = _jacobi_kernel(sym, tol, JACOBI_MAX_SWEEPS)
    if off > tol:
        raise ConvergenceError(
            f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps "
            f"(off-diagonal norm {off:.3e})",
            residual=float(off),
        )
    order = np.argsort(-d, kind="stable")
    return d[order], np.ascontiguousarray(vecs[:, order])


def eigenvalues_symmetric(a: Matrix) -> np.ndarray:
    return symmetric_eigen(a)[0]


ONE_SIDED_TOL = 1e-15


def _column_svd(a: Matrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # a (rows >= cols) = U diag(t) Vᵀ with decreasing t; U columns may be zero.
    floor = (np.finfo(float).eps * hs_norm(a)) ** 2
    u, v, _, converged = _one_sided_jacobi_kernel(
        np.ascontiguousarray(a), ONE_SIDED_TOL, floor, JACOBI_MAX_SWEEPS
    )
    if not converged:
        g = u.T @ u
        resid = float(np.max(np.abs(g - np.diag(np.diag(g)))))
        raise ConvergenceError(
            f"one-sided Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps "
            f"(column coupling {resid:.3e})",
            residual=resid,
        )
    t = np.sqrt(np.einsum("ij,ij->j", u, u))
    order = np.argsort(-t, kind="stable")
    t, u, v = t[order], u[:, order], v[:, order]
    nz = t > 0
    u[:, nz] /= t[nz]
    return t, u, v


def singular_values(a: Matrix) -> SpectralSummary:
    """Singular values ``t_j = sqrt(lambda_j(aᵀa))`` in decreasing order.

    ``aᵀa`` is diagonalised implicitly by one-sided Jacobi rotations on the
    columns of ``a`` so that small singular values keep absolute accuracy
    near ``eps * t_1``.  A rectangular input yields ``min(rows, cols)``
    values.  When ``a`` is symmetric its eigenvalues are attached as well.
    """
    a = as_matrix(a)
    eig = eigenvalues_symmetric(a) if is_symmetric(a) else None
    return SpectralSummary(singular_values=svals(a), eigenvalues_symmetric=eig)


def svals(a: Matrix) -> np.ndarray:
    """Decreasing singular values only; see :func:`singular_values`."""
    a = as_matrix(a)
    if a.shape[1] > a.shape[0]:
        a = a.T
    return _column_svd(a)[0]


def singular_triplets(a: Matrix, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top ``k`` singular values with left/right singular vectors (columns)."""
    a = as_matrix(a)
    _require_square(a)
    t, u, v = _column_svd(a)
    return t[:k], u[:, :k], v[:, :k]


# ---------------------------------------------------------------------------
# norms


def hs_norm(a: Matrix) -> float:
    """Hilbert-Schmidt (Frobenius) norm, summed in row-major order."""
    a = as_matrix(a)
    return math.sqrt(math.fsum(float(x) * float(x) for x in a.ravel()))


def spectral_norm(a: Matrix) -> float:
    return float(svals(a)[0])


def schatten_sum_norm(a: Matrix, p: float) -> float:
    """``sum_j t_j(a)**p`` with no ``1/p`` root applied."""
    if p < 1:
        raise LinalgError(f"Schatten exponent must be >= 1, got {p}")
    return math.fsum(float(t) ** p for t in svals(a))


def kyfan_norm(a: Matrix, k: int) -> float:
    a = as_matrix(a)
    v = min(a.shape)
    if not 1 <= k <= v:
        raise LinalgError(f"Ky Fan index must lie in [1, {v}], got {k}")
    return math.fsum(float(t) for t in svals(a)[:k])


# ---------------------------------------------------------------------------
# structure


def direct_sum(blocks) -> Matrix:
    blocks = [as_matrix(b) for b in blocks]
    if not blocks:
        raise LinalgError("direct_sum needs at least one block")
    for b in blocks:
        _require_square(b, "direct_sum block")
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    i = 0
    for b in blocks:
        n = b.shape[0]
        out[i : i + n, i : i + n] = b
        i += n
    return out


def split_direct_sum(a: Matrix, parts: int = 2) -> list[Matrix]:
    """Inverse of :func:`direct_sum` for ``parts`` equal diagonal blocks."""
    a = as_matrix(a)
    n = _require_square(a)
    if n % parts:
        raise LinalgError(f"cannot split a {n}x{n} matrix into {parts} equal blocks")
    v = n // parts
    return [a[i * v : (i + 1) * v, i * v : (i + 1) * v].copy() for i in range(parts)]


def psd_order(a: Matrix, b: Matrix, order_tolerance: float = ORDER_TOL) -> PsdOrderWitness:
    """Witness for ``b <= a`` in the Loewner order."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise LinalgError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if not (is_symmetric(a) and is_symmetric(b)):
        raise LinalgError("psd_order requires symmetric operands")
    lam_min = float(eigenvalues_symmetric(a - b)[-1])
    return PsdOrderWitness(lam_min, lam_min >= -order_tolerance)


def is_doubly_stochastic(a: Matrix, tol: float) -> bool:
    a = as_matrix(a)
    _require_square(a)
    if np.any(a < -tol):
        return False
    rows = a.sum(axis=1)
    cols = a.sum(axis=0)
    return bool(np.all(np.abs(rows - 1.0) <= tol) and np.all(np.abs(cols - 1.0) <= tol))


def inverse_sqrt_pd(a: Matrix, pd_floor: float = PD_FLOOR) -> Matrix:
    lam, q = symmetric_eigen(a)
    if lam[-1] <= pd_floor:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (smallest eigenvalue {lam[-1]:.3e})",
            eigenvalue=float(lam[-1]),
        )
    out = multiply(q * lam ** -0.5, adjoint(q))
    return 0.5 * (out + out.T)


def min_eigenvalue(a: Matrix) -> float:
    return float(eigenvalues_symmetric(a)[-1])


# ---------------------------------------------------------------------------
# text format


class MatrixFormatError(LinalgError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def format_matrix(a: Matrix) -> str:
    a = as_matrix(a)
    lines = [f"{a.shape[0]} {a.shape[1]}"]
    lines += [" ".join(f"{x:.17g}" for x in row) for row in a]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> Matrix:
    lines = text.splitlines()
    if not lines:
        raise MatrixFormatError("empty file", 1)
    header = lines[0].split()
    try:
        rows, cols = (int(x) for x in header)
    except ValueError:
        raise MatrixFormatError(f"expected 'rows cols', got {lines[0]!r}", 1) from None
    if rows < 1 or cols < 1:
        raise MatrixFormatError(f"dimensions must be positive, got {rows}x{cols}", 1)
    if len(lines) - 1 < rows:
        raise MatrixFormatError(f"expected {rows} rows, found {len(lines) - 1}", len(lines) + 1)
    out = np.empty((rows, cols))
    for i in range(rows):
        lineno = i + 2
        fields = lines[i + 1].split()
        if len(fields) != cols:
            raise MatrixFormatError(f"expected {cols} values, found {len(fields)}", lineno)
        try:
            vals = [float(x) for x in fields]
        except ValueError as exc:
            raise MatrixFormatError(str(exc), lineno) from None
        if not all(math.isfinite(x) for x in vals):
            raise MatrixFormatError("non-finite entry", lineno)
        out[i] = vals
    if any(line.strip() for line in lines[rows + 1 :]):
        raise MatrixFormatError("trailing content after last row", rows + 2)
    return out


def write_matrix(path, a: Matrix) -> Path:
    path = Path(path)
    path.write_text(format_matrix(a))
    return path


def read_matrix(path) -> Matrix:
    return parse_matrix(Path(path).read_text())
