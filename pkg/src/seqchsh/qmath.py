"""Dense complex matrix helpers.

Matrices are plain ``numpy`` complex128 arrays. The helpers here add the
validation the rest of the package relies on: a joint-space size cap,
finite entries, Hermiticity checks and a cyclic Jacobi eigenvalue solver
for small Hermitian matrices.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionError, DomainError, NumericConsistencyError

MAX_DIM = 1024
HERMITIAN_TOL = 1e-10
IMAG_TOL = 1e-9
JACOBI_TOL = 1e-12
_MAX_SWEEPS = 100


def as_cmatrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex128 array within the size cap."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM or a.shape[1] > MAX_DIM:
        raise DimensionError(f"matrix {a.shape} exceeds the {MAX_DIM} dimension cap")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b``.

    Entry ``(i*b.rows + k, j*b.cols + l)`` equals ``a[i, j] * b[k, l]``.
    """
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > MAX_DIM or cols > MAX_DIM:
        raise DimensionError(f"tensor product {rows}x{cols} exceeds the {MAX_DIM} cap")
    return np.kron(a, b)


def _require_square(m: np.ndarray, name: str = "matrix") -> None:
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got {m.shape}")


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_cmatrix(m)
    _require_square(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def expectation(op, rho) -> float:
    """Real part of ``Tr(op @ rho)`` for Hermitian ``op`` and ``rho``.

    Raises NumericConsistencyError when the imaginary residue exceeds 1e-9,
    which signals a non-Hermitian operand slipping through.
    """
    op = as_cmatrix(op)
    rho = as_cmatrix(rho)
    _require_square(op, "operator")
    _require_square(rho, "state")
    if op.shape != rho.shape:
        raise DimensionError(f"operator {op.shape} and state {rho.shape} differ")
    # Tr(AB) = sum_ij A_ij B_ji without forming the product
    value = np.sum(op * rho.T)
    if abs(value.imag) >= IMAG_TOL:
        raise NumericConsistencyError(
            f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)


def _jacobi_block(a: np.ndarray, tol: float) -> np.ndarray:
    n = a.shape[0]
    for _ in range(_MAX_SWEEPS):
        off = np.linalg.norm(a[~np.eye(n, dtype=bool)])
        if off < tol:
            return np.diag(a).real.copy()
        # Pairs are collected once per sweep; stale entries are caught next sweep.
        rows, cols = np.nonzero(np.triu(np.abs(a) > tol / n, 1))
        for p, q in zip(rows.tolist(), cols.tolist()):
            apq = a[p, q]
            r = abs(apq)
            if r == 0.0:
                continue
            # phase-align column/row q so that a[p, q] becomes real positive
            phase = apq / r
            a[:, q] *= phase.conjugate()
            a[q, :] *= phase
            app = a[p, p].real
            aqq = a[q, q].real
            tau = (aqq - app) / (2.0 * r)
            t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            col_p = a[:, p].copy()
            col_q = a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p = a[p, :].copy()
            row_q = a[q, :].copy()
            a[p, :] = c * row_p - s * row_q
            a[q, :] = s * row_p + c * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[p, p] = app - t * r
            a[q, q] = aqq + t * r
    raise NumericConsistencyError("Jacobi iteration did not converge")


def eigenvalues_hermitian(m) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi rotations.

    Indices whose off-diagonal row is identically zero are split off first;
    their diagonal entries are already eigenvalues.
    """
    m = as_cmatrix(m)
    _require_square(m)
    if not is_hermitian(m):
        raise DomainError("Jacobi eigenvalue solver needs a Hermitian matrix")
    a = 0.5 * (m + m.conj().T)
    off = a - np.diag(np.diag(a))
    coupled = np.any(off != 0, axis=1)
    vals = [np.diag(a).real[~coupled]]
    if np.any(coupled):
        idx = np.flatnonzero(coupled)
        block = a[np.ix_(idx, idx)].copy()
        scale = np.sqrt(np.sum(np.abs(block) ** 2))
        tol = max(JACOBI_TOL, 8 * np.finfo(float).eps * len(idx) * scale)
        vals.append(_jacobi_block(block, tol))
    return np.sort(np.concatenate(vals))


def min_eigenvalue(m) -> float:
    return float(eigenvalues_hermitian(m)[0])
