"""Closed-form CHSH lower bounds, trade-off curves and the double-violation region."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericConsistencyError

VIOLATION_MARGIN = 1e-12
ROOT_TOL = 1e-12
CRITICAL_K_TOL = 1e-10


def _check_K(K: float) -> None:
    if not 0.0 < K <= 1.0:
        raise DomainError(f"K must lie in (0, 1], got {K!r}")


def violates(value: float) -> bool:
    """Strict CHSH violation; values within 1e-12 of 2 count as boundary, not violation."""
    return value > 2.0 + VIOLATION_MARGIN


def bound_s1_case1(theta, K):
    return 2.0 * (np.cos(theta) + K * np.sin(theta))


def bound_s2_case1(theta, K):
    return bound_s1_case1(theta, K) / 2.0


def bound_s1_case2(theta, K):
    return 2.0 * K * np.sin(theta)


def bound_s2_case2(theta, K):
    return 2.0 * K * np.sin(theta) + np.cos(theta)


def tradeoff_case2(s1_hat: float, K: float) -> float:
    """Second-observer bound in branch 2 as a function of the first observer's bound."""
    _check_K(K)
    if s1_hat < 0.0 or s1_hat > 2.0 * K:
        raise DomainError(f"s1_hat must lie in [0, 2K] = [0, {2 * K}], got {s1_hat!r}")
    return s1_hat + math.sqrt(4.0 * K * K - s1_hat * s1_hat) / (2.0 * K)


def optimal_theta(case: int, K: float) -> tuple[float, float]:
    """Angle maximizing S1 (case 1) or S2 (case 2), and the maximum."""
    _check_K(K)
    if case == 1:
        return math.atan(K), 2.0 * math.sqrt(1.0 + K * K)
    if case == 2:
        return math.atan(2.0 * K), math.sqrt(4.0 * K * K + 1.0)
    raise DomainError(f"case must be 1 or 2, got {case!r}")


def _endpoints(K: float) -> tuple[float, float, float, float]:
    """Mixed scores at p = 1 and p = 0: (S1(1), S1(0), S2(1), S2(0))."""
    root1 = math.sqrt(1.0 + K * K)
    root2 = math.sqrt(4.0 * K * K + 1.0)
    return 2.0 * root1, 4.0 * K * K / root2, root1, root2


def mixed_scores(p: float, K: float) -> tuple[float, float]:
    """Lower bounds on (S1, S2) when branch 1 is played with probability p at its
    optimal angle and branch 2 at its own optimal angle."""
    _check_K(K)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    s1_one, s1_zero, s2_one, s2_zero = _endpoints(K)
    return p * s1_one + (1 - p) * s1_zero, p * s2_one + (1 - p) * s2_zero


@dataclass(frozen=True)
class FeasibleInterval:
    p_low: float
    p_high: float
    nonempty: bool


def bisect(f, lo: float, hi: float, tol: float = ROOT_TOL) -> float:
    """Root of a continuous ``f`` with a sign change on [lo, hi]."""
    flo = f(lo)
    if flo == 0.0:
        return lo
    if (flo > 0) == (f(hi) > 0):
        raise DomainError("no sign change on the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _p_low(K: float) -> float:
    s1_one, s1_zero, _, _ = _endpoints(K)
    return (2.0 - s1_zero) / (s1_one - s1_zero)


def _p_high(K: float) -> float:
    _, _, s2_one, s2_zero = _endpoints(K)
    return (s2_zero - 2.0) / (s2_zero - s2_one)


def feasible_interval(K: float) -> FeasibleInterval:
    """Range of p on which both mixed lower bounds reach 2.

    The first bound rises affinely in p and the second falls, so each endpoint
    solves a linear equation. Each closed form is cross-checked by bisection.
    """
    _check_K(K)
    p_low, p_high = _p_low(K), _p_high(K)
    for p_closed, idx in ((p_low, 0), (p_high, 1)):
        if 0.0 <= p_closed <= 1.0:
            p_bis = bisect(lambda p: mixed_scores(p, K)[idx] - 2.0, 0.0, 1.0)
            if abs(p_bis - p_closed) > ROOT_TOL:
                raise NumericConsistencyError(
                    f"bisection {p_bis!r} disagrees with closed form {p_closed!r}")
    nonempty = 0.0 <= p_low < p_high <= 1.0
    return FeasibleInterval(p_low, p_high, nonempty)


def critical_K() -> float:
    """Smallest K for which the double-violation interval is nonempty.

    Below K = sqrt(3)/2 the second bound never exceeds 2, so the search
    brackets [sqrt(3)/2, 1].
    """
    return bisect(lambda k: _p_low(k) - _p_high(k), math.sqrt(3.0) / 2.0, 1.0,
                  CRITICAL_K_TOL)


def free_angle_scores(theta1, theta2, p, K):
    """(S1, S2) lower bounds with independent branch angles and mixing weight."""
    s1 = p * bound_s1_case1(theta1, K) + (1 - p) * bound_s1_case2(theta2, K)
    s2 = p * bound_s2_case1(theta1, K) + (1 - p) * bound_s2_case2(theta2, K)
    return s1, s2


@dataclass(frozen=True)
class OptimumResult:
    theta1: float
    theta2: float
    p: float
    min_score: float


def _best_on_grid(K: float, t1: np.ndarray, t2: np.ndarray, ps: np.ndarray):
    T1, T2, P = np.meshgrid(t1, t2, ps, indexing="ij")
    s1, s2 = free_angle_scores(T1, T2, P, K)
    score = np.minimum(s1, s2)
    # argmax returns the first maximum in C order: smallest theta1, then theta2, then p
    i, j, k = np.unravel_index(int(np.argmax(score)), score.shape)
    return (i, j, k), float(score[i, j, k])


def optimize_min_violation(K: float, grid: int = 64, refine_rounds: int = 2,
                           refine_factor: int = 10) -> OptimumResult:
    """Grid search maximizing min(S1, S2) over (theta1, theta2, p).

    After the coarse ``grid``^3 search, each refinement round lays a grid with
    ``refine_factor`` times finer spacing over one coarse step either side of
    the incumbent, clipped to the domain.
    """
    _check_K(K)
    if grid < 8:
        raise DomainError(f"grid must be at least 8, got {grid}")
    half_pi = math.pi / 2
    axes = [np.linspace(0.0, half_pi, grid), np.linspace(0.0, half_pi, grid),
            np.linspace(0.0, 1.0, grid)]
    (i, j, k), best = _best_on_grid(K, *axes)
    point = [axes[0][i], axes[1][j], axes[2][k]]
    steps = [half_pi / (grid - 1), half_pi / (grid - 1), 1.0 / (grid - 1)]
    bounds = [half_pi, half_pi, 1.0]
    for _ in range(refine_rounds):
        new_axes = []
        for x, h, ub in zip(point, steps, bounds):
            fine = h / refine_factor
            offsets = np.arange(-refine_factor, refine_factor + 1) * fine
            new_axes.append(np.unique(np.clip(x + offsets, 0.0, ub)))
        (i, j, k), cand = _best_on_grid(K, *new_axes)
        if cand > best:
            best = cand
            point = [new_axes[0][i], new_axes[1][j], new_axes[2][k]]
        steps = [h / refine_factor for h in steps]
    return OptimumResult(float(point[0]), float(point[1]), float(point[2]), best)


def canonical_scores(theta: float, coeffs) -> dict[tuple[int, int], float]:
    """Exact CHSH values of the canonical construction for s = t (either parity).

    Keys are ``(k, lam)`` for Bob_1 and Bob_2. With ``e = c_s^2`` for odd s
    (else 0), the trailing block contributes a deterministic ``2e`` and removes
    weight ``e`` from the sigma_3 correlator.
    """
    c = list(coeffs)
    K = 2.0 * sum(c[2 * i] * c[2 * i + 1] for i in range(len(c) // 2))
    gaps = sum(c[2 * i] ** 2 - c[2 * i + 1] ** 2 for i in range(len(c) // 2))
    e = c[-1] ** 2 if len(c) % 2 else 0.0
    cos, sin = math.cos(theta), math.sin(theta)
    return {
        (1, 1): 2 * cos * (1 - e) + 2 * K * sin + 2 * e,
        (2, 1): cos * (1 - e) + K * sin + 2 * e,
        (1, 2): 2 * cos * gaps + 2 * K * sin + 2 * e,
        (2, 2): cos * (1 - e) + 2 * K * sin + 2 * e,
    }
