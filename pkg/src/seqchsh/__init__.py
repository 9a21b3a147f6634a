"""Exact simulation of sequential CHSH tests on bipartite Schmidt-form pure states
where every Bob measures projectively and the parties share classical randomness."""

from .analytics import (FeasibleInterval, critical_K, feasible_interval, mixed_scores,
                        optimal_theta, optimize_min_violation, tradeoff_case2)
from .errors import (DimensionError, DomainError, NumericConsistencyError, SeqChshError,
                     SpecError)
from .measurements import (Observable, ProjectivePair, StrategyBundle, alice_observables,
                           bob2_observables_case2, bob_pairs_case1, bob_pairs_case2,
                           default_bundle, observable_of, pauli)
from .sequential import ChshReport, ScenarioConfig, chsh_value, luders_update, run_scenario
from .states import DensityOperator, SchmidtSpec, density, k_param, make_spec, pair_slack, pure_state

__all__ = [
    "ChshReport", "DensityOperator", "DimensionError", "DomainError", "FeasibleInterval",
    "NumericConsistencyError", "Observable", "ProjectivePair", "ScenarioConfig", "SchmidtSpec",
    "SeqChshError", "SpecError", "StrategyBundle", "alice_observables",
    "bob2_observables_case2", "bob_pairs_case1", "bob_pairs_case2", "chsh_value",
    "critical_K", "default_bundle", "density", "feasible_interval", "k_param",
    "luders_update", "make_spec", "mixed_scores", "observable_of", "optimal_theta",
    "optimize_min_violation", "pair_slack", "pauli", "pure_state", "run_scenario",
    "tradeoff_case2",
]
