"""Dichotomic observables and two-outcome projective measurements used by the
sequential CHSH protocol, for even and odd local dimensions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmath
from .errors import DimensionError, DomainError, NumericConsistencyError
from .states import SchmidtSpec, k_param

OPERATOR_TOL = 1e-10
COMPLETENESS_TOL = 1e-12
MIN_LOCAL_DIM = 2
MAX_LOCAL_DIM = 32

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def pauli(which: int) -> np.ndarray:
    if which == 1:
        return SIGMA_1.copy()
    if which == 3:
        return SIGMA_3.copy()
    raise DomainError(f"only sigma_1 and sigma_3 are used, got index {which}")


def _maxabs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m)))


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian matrix with ``O @ O == I`` (spectrum in {-1, +1})."""

    matrix: np.ndarray

    def __post_init__(self):
        m = qmath.as_cmatrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"observable must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        if not qmath.is_hermitian(m, OPERATOR_TOL):
            raise NumericConsistencyError("observable is not Hermitian")
        if _maxabs(m @ m - np.eye(len(m))) > OPERATOR_TOL:
            raise NumericConsistencyError("observable does not square to identity")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class ProjectivePair:
    """Projectors ``p0`` (outcome 0) and ``p1`` (outcome 1) for input ``y``."""

    p0: np.ndarray
    p1: np.ndarray
    y: int = 0

    def __post_init__(self):
        p0 = qmath.as_cmatrix(self.p0)
        p1 = qmath.as_cmatrix(self.p1)
        if p0.shape != p1.shape or p0.shape[0] != p0.shape[1]:
            raise DimensionError(f"projector shapes {p0.shape}, {p1.shape} do not match")
        if self.y not in (0, 1):
            raise DomainError(f"input label must be 0 or 1, got {self.y}")
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)
        for name, p in (("p0", p0), ("p1", p1)):
            if not qmath.is_hermitian(p, OPERATOR_TOL):
                raise NumericConsistencyError(f"{name} is not Hermitian")
            if _maxabs(p @ p - p) > OPERATOR_TOL:
                raise NumericConsistencyError(f"{name} is not idempotent")
        if _maxabs(p0 + p1 - np.eye(len(p0))) > COMPLETENESS_TOL:
            raise NumericConsistencyError("projectors do not sum to identity")

    @property
    def dim(self) -> int:
        return self.p0.shape[0]

    @classmethod
    def from_p0(cls, p0: np.ndarray, y: int) -> "ProjectivePair":
        p0 = qmath.as_cmatrix(p0)
        return cls(p0, np.eye(len(p0)) - p0, y)

    @classmethod
    def from_observable(cls, obs: Observable, y: int) -> "ProjectivePair":
        eye = np.eye(obs.dim)
        return cls(0.5 * (eye + obs.matrix), 0.5 * (eye - obs.matrix), y)


def observable_of(pair: ProjectivePair) -> Observable:
    return Observable(pair.p0 - pair.p1)


def _check_dim(d: int, name: str) -> None:
    if not MIN_LOCAL_DIM <= d <= MAX_LOCAL_DIM:
        raise DomainError(f"{name} must be in [{MIN_LOCAL_DIM}, {MAX_LOCAL_DIM}], got {d}")


def _check_theta(theta: float) -> None:
    if not 0.0 <= theta <= math.pi / 2:
        raise DomainError(f"theta must lie in [0, pi/2], got {theta!r}")


def paired_block(d: int, block: np.ndarray) -> np.ndarray:
    """``I_{d//2} ⊗ block``, followed by a trailing +1 on the diagonal when d is odd."""
    out = np.eye(d, dtype=np.complex128)
    n = d // 2
    out[: 2 * n, : 2 * n] = np.kron(np.eye(n), block)
    return out


def alice_observables(s: int, theta: float) -> tuple[Observable, Observable]:
    _check_dim(s, "s")
    _check_theta(theta)
    c, sn = math.cos(theta), math.sin(theta)
    a0 = paired_block(s, c * SIGMA_3 + sn * SIGMA_1)
    a1 = paired_block(s, c * SIGMA_3 - sn * SIGMA_1)
    return Observable(a0), Observable(a1)


def _half_plus(t: int, block: np.ndarray) -> np.ndarray:
    return 0.5 * (np.eye(t) + paired_block(t, block))


def bob_pairs_case1(t: int) -> tuple[ProjectivePair, ProjectivePair]:
    """Sharp sigma_3-type (y=0) and sigma_1-type (y=1) measurements on each pair."""
    _check_dim(t, "t")
    return (ProjectivePair.from_p0(_half_plus(t, SIGMA_3), 0),
            ProjectivePair.from_p0(_half_plus(t, SIGMA_1), 1))


def bob_pairs_case2(t: int) -> tuple[ProjectivePair, ProjectivePair]:
    """Trivial measurement (I, 0) for y=0 and the sigma_1-type measurement for y=1."""
    _check_dim(t, "t")
    return (ProjectivePair.from_p0(np.eye(t), 0),
            ProjectivePair.from_p0(_half_plus(t, SIGMA_1), 1))


def bob2_observables_case2(t: int) -> tuple[Observable, Observable]:
    _check_dim(t, "t")
    return Observable(paired_block(t, SIGMA_3)), Observable(paired_block(t, SIGMA_1))


@dataclass(frozen=True, eq=False)
class Branch:
    """Operators played when the shared random variable selects this branch."""

    theta: float
    alice: tuple[Observable, Observable]
    bob1: tuple[ProjectivePair, ProjectivePair]
    bob2: tuple[ProjectivePair, ProjectivePair]

    def __post_init__(self):
        dims_a = {o.dim for o in self.alice}
        dims_b = {p.dim for p in self.bob1 + self.bob2}
        if len(dims_a) != 1 or len(dims_b) != 1:
            raise DimensionError("operators within a branch have inconsistent dimensions")
        if [p.y for p in self.bob1] != [0, 1] or [p.y for p in self.bob2] != [0, 1]:
            raise DomainError("measurement pairs must be ordered by input y = 0, 1")

    @property
    def dim_a(self) -> int:
        return self.alice[0].dim

    @property
    def dim_b(self) -> int:
        return self.bob1[0].dim


@dataclass(frozen=True, eq=False)
class StrategyBundle:
    """Two branches (lambda = 1, 2) and the probability ``mix_p`` of branch 1."""

    branches: tuple[Branch, Branch]
    mix_p: float

    def __post_init__(self):
        if not 0.0 <= self.mix_p <= 1.0:
            raise DomainError(f"mix_p must lie in [0, 1], got {self.mix_p!r}")
        if len(self.branches) != 2:
            raise DomainError("a bundle holds exactly two branches")
        b1, b2 = self.branches
        if (b1.dim_a, b1.dim_b) != (b2.dim_a, b2.dim_b):
            raise DimensionError("branches act on different local dimensions")

    @property
    def weights(self) -> tuple[float, float]:
        return self.mix_p, 1.0 - self.mix_p

    @property
    def thetas(self) -> tuple[float, float]:
        return self.branches[0].theta, self.branches[1].theta


def default_angles(spec: SchmidtSpec) -> tuple[float, float]:
    """``(arctan K, arctan 2K)``: the angles maximizing each branch's key score."""
    k = k_param(spec)
    return math.atan(k), math.atan(2.0 * k)


def default_bundle(spec: SchmidtSpec, theta1: float | None = None,
                   theta2: float | None = None, mix_p: float = 1.0) -> StrategyBundle:
    """Assemble the two-branch strategy for ``spec``.

    Branch 1 uses the sharp sigma_3/sigma_1 measurements for both Bobs; branch 2
    gives Bob 1 the trivial/sigma_1 pair and Bob 2 the sigma_3/sigma_1 observables.
    Omitted angles fall back to :func:`default_angles`.
    """
    d1, d2 = default_angles(spec)
    theta1 = d1 if theta1 is None else theta1
    theta2 = d2 if theta2 is None else theta2
    s, t = spec.dim_a, spec.dim_b
    case1 = bob_pairs_case1(t)
    z2, x2 = bob2_observables_case2(t)
    branch1 = Branch(theta1, alice_observables(s, theta1), case1, case1)
    branch2 = Branch(theta2, alice_observables(s, theta2), bob_pairs_case2(t),
                     (ProjectivePair.from_observable(z2, 0),
                      ProjectivePair.from_observable(x2, 1)))
    return StrategyBundle((branch1, branch2), mix_p)
