"""Self-verification suites run by ``seqchsh verify``.

Each suite returns a :class:`SuiteResult`; a suite fails on the first broken
invariant it meets, including any NumericConsistencyError raised while running.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import analytics, qmath
from .errors import NumericConsistencyError
from .measurements import (Observable, alice_observables, bob2_observables_case2,
                           bob_pairs_case1, bob_pairs_case2, default_bundle)
from .sequential import (TSIRELSON, ScenarioConfig, chsh_value, luders_update,
                         run_scenario)
from .states import density, k_param, make_spec, pair_slack

DIMS = (2, 3, 4, 5, 6, 8)
SIM_TOL = 1e-9


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    checks: int
    detail: str
    seconds: float


class _Failure(Exception):
    pass


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise _Failure(msg)


def _theta_grid(n: int = 7) -> np.ndarray:
    return np.linspace(0.0, math.pi / 2, n)


def random_spec(rng: np.random.Generator, d: int):
    return make_spec(rng.random(d) + 1e-3, d, d)


def equal_pair_spec(d: int):
    return make_spec([1.0] * d, d, d)


def suite_operators(rng, input_weight) -> int:
    n = 0
    for d in DIMS:
        for theta in _theta_grid():
            alice_observables(d, float(theta))
            n += 2
        pairs = bob_pairs_case1(d) + bob_pairs_case2(d)
        bob2_observables_case2(d)
        for p in pairs:
            eye = np.eye(d)
            _expect(np.max(np.abs(p.p0 @ p.p0 - p.p0)) <= 1e-10, f"idempotence d={d}")
            _expect(np.max(np.abs(p.p0 + p.p1 - eye)) <= 1e-12, f"completeness d={d}")
            n += 2
        bundle = default_bundle(equal_pair_spec(d), mix_p=0.5)
        _expect(len(bundle.branches) == 2, "bundle shape")
        n += 1
    return n


def suite_channel(rng, input_weight) -> int:
    n = 0
    for d in DIMS:
        for spec in (equal_pair_spec(d), random_spec(rng, d)):
            rho = density(spec).check()
            for pairs in (bob_pairs_case1(d), bob_pairs_case2(d),
                          default_bundle(spec).branches[1].bob2):
                out = rho
                for _ in range(2):
                    out = luders_update(out, pairs, d, input_weight)
                    _expect(abs(out.trace - 1.0) <= 1e-12, f"trace drift d={d}")
                    _expect(out.min_eig >= -1e-10, f"negative eigenvalue d={d}")
                    n += 2
    return n


def suite_identities(rng, input_weight) -> int:
    n = 0
    thetas = np.linspace(0.0, math.pi / 2, 1000)
    for K in np.round(np.arange(1, 11) / 10, 12):
        s1 = analytics.bound_s1_case1(thetas, K)
        _expect(np.array_equal(analytics.bound_s2_case1(thetas, K), s1 / 2), "halving identity")
        for th in thetas:
            lhs = analytics.tradeoff_case2(min(analytics.bound_s1_case2(th, K), 2 * K), K)
            _expect(abs(lhs - analytics.bound_s2_case2(th, K)) <= 1e-12,
                    f"trade-off identity K={K} theta={th}")
            n += 1
    return n


def suite_consistency(rng, input_weight) -> int:
    """Simulated scores against closed forms across dims, angles and mixing weights."""
    n = 0
    for d in DIMS:
        specs = [equal_pair_spec(d), random_spec(rng, d)]
        for spec in specs:
            K = k_param(spec)
            for theta in _theta_grid(5):
                cfg = ScenarioConfig(spec, default_bundle(spec, theta, theta, 0.5), 2,
                                     input_weight)
                rep = run_scenario(cfg)
                exact = analytics.canonical_scores(float(theta), spec.coeffs)
                for key, val in exact.items():
                    _expect(abs(rep.s(*key) - val) <= SIM_TOL,
                            f"S{key} d={d} theta={theta}: {rep.s(*key)} vs {val}")
                # paper-style lower bounds hold for every spec
                _expect(rep.s(1, 1) >= analytics.bound_s1_case1(theta, K) - SIM_TOL, "S1 case 1 bound")
                _expect(rep.s(1, 2) >= analytics.bound_s1_case2(theta, K) - SIM_TOL, "S1 case 2 bound")
                _expect(rep.s(2, 2) >= analytics.bound_s2_case2(theta, K) - SIM_TOL, "S2 case 2 bound")
                if d % 2 == 0:
                    _expect(abs(rep.s(2, 1) - rep.s(1, 1) / 2) <= SIM_TOL, "halving, simulated")
                    _expect(abs(rep.s(1, 2) - analytics.bound_s1_case2(theta, K)
                                - 2 * math.cos(theta) * pair_slack(spec)) <= SIM_TOL,
                            "case-2 slack identity")
                n += 7
        if d % 2 == 0:
            # equal pairs: mixed closed forms are exact at the default angles
            spec = specs[0]
            K = k_param(spec)
            for p in np.linspace(0.0, 1.0, 6):
                rep = run_scenario(ScenarioConfig(spec, default_bundle(spec, mix_p=float(p)),
                                                  2, input_weight))
                s1, s2 = analytics.mixed_scores(float(p), K)
                _expect(abs(rep.s_mixed(1) - s1) <= SIM_TOL, f"mixed S1 d={d} p={p}")
                _expect(abs(rep.s_mixed(2) - s2) <= SIM_TOL, f"mixed S2 d={d} p={p}")
                n += 2
    return n


def suite_tsirelson(rng, input_weight) -> int:
    n = 0
    for d in (2, 3, 4):
        for _ in range(20):
            spec = random_spec(rng, d)
            rho = density(spec)
            obs = []
            for _ in range(4):
                x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
                q, _r = np.linalg.qr(x)
                signs = rng.choice([-1.0, 1.0], size=d)
                obs.append(Observable(q @ np.diag(signs) @ q.conj().T))
            val = chsh_value(rho, *obs)
            _expect(abs(val) <= TSIRELSON + 1e-9, f"Tsirelson exceeded: {val}")
            n += 1
    return n


def suite_feasibility(rng, input_weight) -> int:
    n = 0
    for K in np.linspace(0.05, 1.0, 20):
        iv = analytics.feasible_interval(float(K))
        s1, _ = analytics.mixed_scores(min(max(iv.p_low, 0.0), 1.0), float(K))
        if 0.0 <= iv.p_low <= 1.0:
            _expect(abs(s1 - 2.0) <= 1e-10, f"p_low residual at K={K}")
        if 0.0 <= iv.p_high <= 1.0:
            _, s2 = analytics.mixed_scores(iv.p_high, float(K))
            _expect(abs(s2 - 2.0) <= 1e-10, f"p_high residual at K={K}")
        n += 2
    kc = analytics.critical_K()
    _expect(0.97 < kc < 0.98, f"critical K {kc} out of range")
    _expect(analytics.feasible_interval(min(kc + 1e-6, 1.0)).nonempty, "above critical K")
    _expect(not analytics.feasible_interval(kc - 1e-6).nonempty, "below critical K")
    return n + 3


SUITES = {
    "operators": suite_operators,
    "channel-trace-psd": suite_channel,
    "identities": suite_identities,
    "analytic-vs-simulation": suite_consistency,
    "tsirelson": suite_tsirelson,
    "feasibility": suite_feasibility,
}


def run_suites(seed: int = 12345, input_weight: float = 0.5) -> list[SuiteResult]:
    results = []
    for name, fn in SUITES.items():
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        try:
            checks = fn(rng, input_weight)
            ok, detail = True, "ok"
        except (_Failure, NumericConsistencyError) as exc:
            checks, ok, detail = 0, False, f"{type(exc).__name__}: {exc}"
        results.append(SuiteResult(name, ok, checks, detail, time.perf_counter() - start))
    return results
