"""Scripted agent policies, path planning, and the skill-graded partner
population used for data collection."""

from .pathing import (
    HORIZONTAL_FIRST,
    VERTICAL_FIRST,
    UnreachableError,
    astar_path,
    path_length,
)
from .planner import (
    EGOCENTRIC,
    PARTNER_AWARE,
    NoPathToAnySubgoalError,
    PlannerParams,
    ScriptedPlanner,
    default_families,
    format_planner_params,
    parse_planner_params,
    planner_policy,
)
from .policy import Policy, UniformRandomPolicy
from .population import (
    CannotReachSkillTargetError,
    Checkpoint,
    evaluate_selfplay,
    load_population,
    make_partner_population,
    population_manifest,
    save_population,
)
from .rollout import RolloutResult, episode_rng, rollout_episode

__all__ = [
    "CannotReachSkillTargetError",
    "Checkpoint",
    "EGOCENTRIC",
    "HORIZONTAL_FIRST",
    "NoPathToAnySubgoalError",
    "PARTNER_AWARE",
    "PlannerParams",
    "Policy",
    "RolloutResult",
    "ScriptedPlanner",
    "UniformRandomPolicy",
    "UnreachableError",
    "VERTICAL_FIRST",
    "astar_path",
    "default_families",
    "episode_rng",
    "evaluate_selfplay",
    "format_planner_params",
    "load_population",
    "make_partner_population",
    "parse_planner_params",
    "path_length",
    "planner_policy",
    "population_manifest",
    "rollout_episode",
    "save_population",
]
