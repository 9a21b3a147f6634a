"""Sequential Alice/Bob_k CHSH scenario with input- and outcome-averaged Lüders updates."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .errors import DimensionError, DomainError, NumericConsistencyError
from .measurements import Observable, ProjectivePair, StrategyBundle, observable_of
from .states import DensityOperator, SchmidtSpec, density

TSIRELSON = 2.0 * math.sqrt(2.0)
TSIRELSON_TOL = 1e-9
TRACE_TOL = 1e-12
MAX_BOBS = 16


def luders_update(rho: DensityOperator, pairs: tuple[ProjectivePair, ProjectivePair],
                  dim_a: int, input_weight: float = 0.5) -> DensityOperator:
    """Average the post-measurement state over Bob's two inputs and both outcomes.

    ``input_weight`` is the probability of each input; anything other than 0.5
    breaks trace preservation and is only exposed for fault-injection checks.
    """
    t = pairs[0].dim
    if any(p.dim != t for p in pairs):
        raise DimensionError("measurement pairs act on different dimensions")
    if rho.dim != dim_a * t:
        raise DimensionError(f"state dim {rho.dim} != {dim_a} x {t}")
    eye_a = np.eye(dim_a)
    m = rho.matrix
    out = np.zeros_like(m)
    for pair in pairs:
        for proj in (pair.p0, pair.p1):
            # projectors are idempotent, so the square root in the Lüders map is proj itself
            op = qmath.tensor(eye_a, proj)
            out += op @ m @ op
    out *= input_weight
    tr = float(np.trace(out).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise NumericConsistencyError(f"Lüders update changed the trace to {tr!r}")
    return DensityOperator(out).check()


def chsh_value(rho: DensityOperator, a0: Observable, a1: Observable,
               b0: Observable, b1: Observable) -> float:
    """<A0 B0> + <A0 B1> + <A1 B0> - <A1 B1>."""
    if a0.dim != a1.dim or b0.dim != b1.dim or a0.dim * b0.dim != rho.dim:
        raise DimensionError("observable dimensions do not match the state")
    m = rho.matrix
    total = 0.0
    for x, a in enumerate((a0, a1)):
        for y, b in enumerate((b0, b1)):
            total += (-1) ** (x * y) * qmath.expectation(qmath.tensor(a.matrix, b.matrix), m)
    return total


def check_tsirelson(value: float) -> float:
    if not math.isfinite(value) or abs(value) > TSIRELSON + TSIRELSON_TOL:
        raise NumericConsistencyError(f"CHSH value {value!r} exceeds the Tsirelson bound")
    return value


@dataclass(frozen=True)
class ScenarioConfig:
    spec: SchmidtSpec
    bundle: StrategyBundle
    n_bobs: int = 2
    input_weight: float = 0.5

    def __post_init__(self):
        if not 1 <= self.n_bobs <= MAX_BOBS:
            raise DomainError(f"n_bobs must be in [1, {MAX_BOBS}], got {self.n_bobs}")
        for br in self.bundle.branches:
            if (br.dim_a, br.dim_b) != (self.spec.dim_a, self.spec.dim_b):
                raise DimensionError("strategy dimensions do not match the spec")


@dataclass(frozen=True)
class Stage:
    """Observer ``k`` in branch ``lam`` measuring the state it received."""

    k: int
    lam: int
    s_value: float
    trace: float
    min_eig: float

    @property
    def exploratory(self) -> bool:
        return self.k > 2


@dataclass(frozen=True)
class ChshReport:
    stages: tuple[Stage, ...]
    mixed: tuple[float, ...]
    mix_p: float
    thetas: tuple[float, float]
    meta: dict = field(default_factory=dict)

    def s(self, k: int, lam: int) -> float:
        for st in self.stages:
            if st.k == k and st.lam == lam:
                return st.s_value
        raise KeyError((k, lam))

    def s_mixed(self, k: int) -> float:
        return self.mixed[k - 1]

    @property
    def n_bobs(self) -> int:
        return len(self.mixed)

    @property
    def double_violation(self) -> bool:
        return self.n_bobs >= 2 and all(v > 2.0 + 1e-12 for v in self.mixed[:2])

    def to_dict(self) -> dict:
        return {
            "meta": dict(self.meta, mix_p=self.mix_p, theta1=self.thetas[0],
                         theta2=self.thetas[1]),
            "stages": [{"k": st.k, "lambda": st.lam, "S": st.s_value,
                        "trace": st.trace, "min_eig": st.min_eig} for st in self.stages],
            "observers": [{"k": k + 1, "S_mixed": v} for k, v in enumerate(self.mixed)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def run_branch(spec: SchmidtSpec, branch, n_bobs: int,
               input_weight: float = 0.5) -> list[tuple[float, DensityOperator]]:
    """CHSH score and received state for Bob_1..Bob_n in one branch.

    Bob_1 uses ``branch.bob1``; every later Bob reuses ``branch.bob2``.
    """
    rho = density(spec).check()
    out = []
    for k in range(1, n_bobs + 1):
        pairs = branch.bob1 if k == 1 else branch.bob2
        b0, b1 = (observable_of(p) for p in pairs)
        value = check_tsirelson(chsh_value(rho, *branch.alice, b0, b1))
        out.append((value, rho))
        if k < n_bobs:
            rho = luders_update(rho, pairs, spec.dim_a, input_weight)
    return out


def run_scenario(cfg: ScenarioConfig) -> ChshReport:
    per_branch = [run_branch(cfg.spec, br, cfg.n_bobs, cfg.input_weight)
                  for br in cfg.bundle.branches]
    stages = []
    for k in range(cfg.n_bobs):
        for lam, results in enumerate(per_branch, start=1):
            value, rho = results[k]
            stages.append(Stage(k + 1, lam, value, rho.trace, rho.min_eig))
    w1, w2 = cfg.bundle.weights
    mixed = tuple(w1 * per_branch[0][k][0] + w2 * per_branch[1][k][0]
                  for k in range(cfg.n_bobs))
    return ChshReport(tuple(stages), mixed, cfg.bundle.mix_p, cfg.bundle.thetas)
