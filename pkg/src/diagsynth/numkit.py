"""Small dense linear algebra kernels shared by the rest of the package.

Matrices are plain numpy arrays. The routines here are deliberately
self-contained (blocked LU, normal-equation least squares, cyclic Jacobi)
so that the structured solvers elsewhere have an independent reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    symmetry: float = 1e-10
    pivot: float = 1e-10
    jacobi_offdiag: float = 1e-12
    jacobi_max_sweeps: int = 100
    snap: float = 1e-9
    residual: float = 1e-9
    unitarity: float = 1e-12


TOL = Tolerances()


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when elimination meets a pivot below the guard threshold."""

    def __init__(self, index: int, value: float):
        super().__init__(f"matrix is singular to working precision: pivot {index} = {value:.3e}")
        self.index = index
        self.value = value


def _as_matrix(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def matmul(a, b) -> np.ndarray:
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def unitarity_error(u) -> float:
    """max |U^dagger U - I|."""
    u = _as_matrix(u, "u")
    if u.shape[0] != u.shape[1]:
        raise ValueError("unitarity is only defined for square matrices")
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def lu_factor(a, block: int = 64) -> tuple[np.ndarray, np.ndarray, int]:
    """Blocked right-looking LU with partial pivoting.

    Returns ``(lu, perm, swaps)`` where ``lu`` packs unit-lower L below the
    diagonal and U on and above it, and ``a[perm] == L @ U``.  Zero pivots
    are left in place (the caller decides what singular means).
    """
    lu = np.array(_as_matrix(a), dtype=np.float64, copy=True)
    n = lu.shape[0]
    if lu.shape[1] != n:
        raise ValueError(f"LU needs a square matrix, got {lu.shape}")
    perm = np.arange(n)
    swaps = 0
    for k0 in range(0, n, block):
        k1 = min(k0 + block, n)
        # panel factorisation on columns k0:k1, rows k0:n
        for k in range(k0, k1):
            p = k + int(np.argmax(np.abs(lu[k:, k])))
            if p != k:
                lu[[k, p]] = lu[[p, k]]
                perm[[k, p]] = perm[[p, k]]
                swaps += 1
            piv = lu[k, k]
            if piv == 0.0:
                continue
            lu[k + 1:, k] /= piv
            if k + 1 < k1:
                lu[k + 1:, k + 1:k1] -= np.outer(lu[k + 1:, k], lu[k, k + 1:k1])
        if k1 < n:
            # U12 = L11^{-1} A12, then the Schur complement update
            l11 = np.tril(lu[k0:k1, k0:k1], -1) + np.eye(k1 - k0)
            lu[k0:k1, k1:] = _forward_unit(l11, lu[k0:k1, k1:])
            lu[k1:, k1:] -= lu[k1:, k0:k1] @ lu[k0:k1, k1:]
    return lu, perm, swaps


def _forward_unit(l: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.array(b, copy=True)
    for i in range(1, l.shape[0]):
        x[i] -= l[i, :i] @ x[:i]
    return x


def lu_solve(lu: np.ndarray, perm: np.ndarray, b) -> np.ndarray:
    b = np.asarray(b, dtype=np.float64)
    x = b[perm].copy()
    n = lu.shape[0]
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x


def solve(a, b, pivot_tol: float = TOL.pivot) -> np.ndarray:
    """Solve ``a x = b`` (b may hold several right-hand sides as columns)."""
    lu, perm, _ = lu_factor(a)
    diag = np.abs(np.diag(lu))
    bad = np.flatnonzero(diag < pivot_tol)
    if bad.size:
        i = int(bad[0])
        raise SingularMatrixError(i, float(lu[i, i]))
    return lu_solve(lu, perm, b)


def lstsq(a, y, pivot_tol: float = TOL.pivot) -> np.ndarray:
    """Least-squares solution of ``a x ~ y`` through the normal equations.

    ``y`` may be a vector or a matrix of stacked right-hand sides (columns).
    Raises SingularMatrixError when ``a`` is numerically rank deficient.
    """
    a = _as_matrix(a, "a").astype(np.float64)
    y = np.asarray(y, dtype=np.float64)
    if y.shape[0] != a.shape[0]:
        raise ValueError(f"dimension mismatch: a is {a.shape}, y is {y.shape}")
    return solve(a.T @ a, a.T @ y, pivot_tol=pivot_tol)


def logabsdet(a) -> float:
    """ln|det a| from LU with partial pivoting; -inf for singular input."""
    lu, _, _ = lu_factor(a)
    d = np.abs(np.diag(lu))
    if np.any(d == 0.0):
        return float("-inf")
    return float(np.sum(np.log(d)))


def eig_sym(s, tol: Tolerances = TOL) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic-by-rows Jacobi eigendecomposition of a real symmetric matrix.

    Returns eigenvalues sorted in descending order and the matching
    orthonormal eigenvectors as columns.
    """
    a = np.array(_as_matrix(s, "s"), dtype=np.float64, copy=True)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError(f"eig_sym needs a square matrix, got {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if n else 1.0
    if n and np.max(np.abs(a - a.T)) > tol.symmetry * scale:
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    for _ in range(tol.jacobi_max_sweeps):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2) * 2.0)
        if off < tol.jacobi_offdiag * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta  # theta^2 would overflow
                elif theta:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                else:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - sn * aq
                a[:, q] = sn * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - sn * rq
                a[q, :] = sn * rp + c * rq
                vp = v[:, p].copy()
                v[:, p] = c * vp - sn * v[:, q]
                v[:, q] = sn * vp + c * v[:, q]
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]
