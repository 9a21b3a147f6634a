"""Schmidt-form pure states, their density operators and the pairing parameter K."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from . import qmath
from .errors import DimensionError, NumericConsistencyError, SpecError

NORM_TOL = 1e-12
STRICT_TOL = 1e-9
DENSITY_TOL = 1e-10


@dataclass(frozen=True)
class SchmidtSpec:
    """Schmidt coefficients ``c_1 >= ... >= c_s >= 0`` with local dims ``s <= t``."""

    coeffs: tuple[float, ...]
    dim_a: int
    dim_b: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if self.dim_a < 1 or self.dim_b < 1:
            raise SpecError("local dimensions must be positive")
        if self.dim_a > self.dim_b:
            raise SpecError(f"need dim_a <= dim_b, got {self.dim_a} > {self.dim_b}")
        if self.dim_a * self.dim_b > qmath.MAX_DIM:
            raise DimensionError(
                f"joint dimension {self.dim_a * self.dim_b} exceeds {qmath.MAX_DIM}")
        if len(c) != self.dim_a:
            raise SpecError(f"expected {self.dim_a} coefficients, got {len(c)}")
        if np.any(c < 0) or np.any(c > 1) or not np.all(np.isfinite(c)):
            raise SpecError("coefficients must lie in [0, 1]")
        if np.any(np.diff(c) > 0):
            raise SpecError("coefficients must be in non-increasing order")
        if abs(np.sum(c ** 2) - 1.0) > NORM_TOL:
            raise SpecError("coefficients must have unit sum of squares")

    @property
    def joint_dim(self) -> int:
        return self.dim_a * self.dim_b

    def to_json(self) -> str:
        return json.dumps({"coeffs": list(self.coeffs), "dim_a": self.dim_a,
                           "dim_b": self.dim_b})

    @classmethod
    def from_json(cls, text: str, strict: bool = False) -> "SchmidtSpec":
        try:
            data = json.loads(text)
            coeffs, dim_a, dim_b = data["coeffs"], data["dim_a"], data["dim_b"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise SpecError(f"malformed spec JSON: {exc}") from exc
        return make_spec(coeffs, int(dim_a), int(dim_b), strict=strict)

    @classmethod
    def load(cls, path, strict: bool = False) -> "SchmidtSpec":
        return cls.from_json(Path(path).read_text(), strict=strict)


def make_spec(weights, dim_a: int, dim_b: int, strict: bool = False) -> SchmidtSpec:
    """Build a spec from raw nonnegative weights.

    Weights are zero-padded to ``dim_a`` entries, sorted descending and scaled
    to unit sum of squares. With ``strict=True`` the weights must already be
    normalized (to 1e-9) and are only sorted and padded.
    """
    w = np.asarray(list(weights), dtype=float)
    if w.ndim != 1 or len(w) == 0:
        raise SpecError("weights must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(w)):
        raise SpecError("weights must be finite")
    if np.any(w < 0):
        raise SpecError("weights must be nonnegative")
    if not np.any(w > 0):
        raise SpecError("at least one weight must be positive")
    if dim_a < 1 or dim_b < 1:
        raise SpecError("local dimensions must be positive")
    if dim_a > dim_b:
        raise SpecError(f"need dim_a <= dim_b, got {dim_a} > {dim_b}")
    if len(w) > dim_a:
        raise SpecError(f"{len(w)} weights do not fit a {dim_a}-dimensional party")
    norm2 = float(np.sum(w ** 2))
    if strict and abs(norm2 - 1.0) > STRICT_TOL:
        raise SpecError(f"strict mode: sum of squared weights is {norm2!r}, not 1")
    c = np.zeros(dim_a)
    c[: len(w)] = np.sort(w)[::-1] / np.sqrt(norm2)
    # renormalize once more so the stored tuple meets the 1e-12 invariant exactly
    c = c / np.sqrt(np.sum(c ** 2))
    return SchmidtSpec(tuple(float(x) for x in c), dim_a, dim_b)


def pure_state(spec: SchmidtSpec) -> np.ndarray:
    """Amplitude vector of ``sum_i c_i |i>|i>`` in the computational product basis."""
    t = spec.dim_b
    amps = np.zeros(spec.joint_dim, dtype=np.complex128)
    for i, c in enumerate(spec.coeffs):
        amps[i * t + i] = c
    return amps


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Joint-space density matrix. Hermiticity and unit trace are checked on construction;
    positivity is checked on demand by :meth:`check` since it needs an eigen-solve."""

    matrix: np.ndarray

    def __post_init__(self):
        m = qmath.as_cmatrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        if not qmath.is_hermitian(m, DENSITY_TOL):
            raise NumericConsistencyError("density matrix is not Hermitian")
        if abs(self.trace - 1.0) > DENSITY_TOL:
            raise NumericConsistencyError(f"density matrix has trace {self.trace!r}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @cached_property
    def min_eig(self) -> float:
        return qmath.min_eigenvalue(self.matrix)

    def check(self) -> "DensityOperator":
        if self.min_eig < -DENSITY_TOL:
            raise NumericConsistencyError(
                f"density matrix has negative eigenvalue {self.min_eig:.3e}")
        return self


def density(spec: SchmidtSpec) -> DensityOperator:
    psi = pure_state(spec)
    return DensityOperator(np.outer(psi, psi.conj()))


def k_param(spec: SchmidtSpec) -> float:
    """``K = 2 * (c1 c2 + c3 c4 + ...)``; an unpaired last coefficient (odd s) is skipped."""
    c = spec.coeffs
    k = 2.0 * sum(c[2 * k] * c[2 * k + 1] for k in range(len(c) // 2))
    # AM-GM caps K at 1; clamp the roundoff overshoot of equal pairs
    return min(k, 1.0)


def pair_slack(spec: SchmidtSpec) -> float:
    """Sum of squared gaps within each coefficient pair, plus ``c_s^2`` when s is odd."""
    c = spec.coeffs
    d = sum(c[2 * k] ** 2 - c[2 * k + 1] ** 2 for k in range(len(c) // 2))
    if len(c) % 2:
        d += c[-1] ** 2
    return d
