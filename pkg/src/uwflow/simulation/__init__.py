"""Synthetic case generation, scripted agent behavior, and the Monte Carlo
experiment driver."""

from .scenarios import (
    CaseMix,
    DefectKind,
    ScenarioSpec,
    UnknownPayload,
    attack_payload_ids,
    generate_cases,
    inject_prompt_attack,
)
from .behavior import BehaviorModel, SimulationBackend, load_behavior_models, simulation_gateway, scripted_backend
from .experiment import (
    ExperimentConfig,
    RobustnessResult,
    run_experiment,
    run_robustness_batch,
    load_experiment_config,
)

__all__ = [
    "BehaviorModel",
    "CaseMix",
    "DefectKind",
    "ExperimentConfig",
    "RobustnessResult",
    "ScenarioSpec",
    "SimulationBackend",
    "UnknownPayload",
    "attack_payload_ids",
    "generate_cases",
    "inject_prompt_attack",
    "load_behavior_models",
    "load_experiment_config",
    "run_experiment",
    "run_robustness_batch",
    "scripted_backend",
    "simulation_gateway",
]
