"""Skill-graded partner checkpoints.

Each planner family is degraded (more action noise, slower reactions)
until its self-play reward lands near target fractions of the family's
undegraded reward.  The degradation knob is a single scalar ``u`` in
[0, 1] mapped monotonically onto (epsilon, reaction_delay) and searched
by bisection against seeded self-play evaluations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from ..env.layout import Layout
from .planner import PlannerParams, planner_policy
from .policy import Policy
from .rollout import episode_rng, rollout_episode

DEFAULT_FRACTIONS = (0.35, 0.70, 1.00)
_MAX_EXTRA_DELAY = 4


class CannotReachSkillTargetError(ValueError):
    def __init__(self, family: str, fraction: float):
        super().__init__(f"family {family!r} cannot be degraded to {fraction:.2f} of best")
        self.family, self.fraction = family, fraction


@dataclass(frozen=True)
class Checkpoint:
    checkpoint_id: str
    policy: Policy
    params: PlannerParams
    measured_selfplay_reward: float
    skill_fraction: float


def evaluate_selfplay(
    policy: Policy, layout: Layout, episodes: int, horizon: int, seed: int
) -> float:
    """Mean (delivery reward + terminal bonus) of the policy paired with
    a copy of itself over seeded episodes."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    total = 0.0
    for k in range(episodes):
        rng = episode_rng(seed, "selfplay", policy.policy_id, k)
        result = rollout_episode(layout, (policy, policy), horizon, rng)
        total += result.reward + result.bonus
    return total / episodes


def _degrade(base: PlannerParams, u: float) -> PlannerParams:
    """Map one knob u in [0, 1] onto (epsilon, reaction_delay).

    Epsilon rises continuously over the whole range; the coarser delay
    steps only join beyond u = 0.5 so the low/mid skill range stays
    smooth enough to bisect."""
    return replace(
        base,
        epsilon=base.epsilon + u * (1.0 - base.epsilon),
        reaction_delay=base.reaction_delay + int(max(0.0, u - 0.5) * (_MAX_EXTRA_DELAY + 1)),
    )


_SCAN_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)


def make_partner_population(
    layout: Layout,
    families: list[PlannerParams],
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS,
    tolerance: float = 0.10,
    episodes: int = 3,
    horizon: int = 400,
    seed: int = 0,
    max_bisections: int = 18,
) -> list[Checkpoint]:
    """3 checkpoints per family (by default) whose self-play rewards sit
    within ±tolerance of the target fractions of the family's best.

    The family's best operating point is found by a coarse scan before
    degrading: for noisy scripted styles a little action noise can beat
    the raw base (it breaks self-play deadlocks), so reward is not
    monotone from u=0 and the scan anchors the descending branch."""
    if not families:
        raise ValueError("need at least one family")
    checkpoints = []
    for fi, base in enumerate(families):
        family_id = f"family{fi}_{base.style}"
        scanned = []
        for u in _SCAN_GRID:
            params = _degrade(base, u)
            policy = planner_policy(layout, params, policy_id=f"{family_id}_s100")
            reward = evaluate_selfplay(policy, layout, episodes, horizon, seed)
            scanned.append((reward, u, params, policy))
        best_reward, best_u, best_params, best_policy = max(
            scanned, key=lambda item: (item[0], -item[1])
        )
        if best_reward <= 0:
            raise CannotReachSkillTargetError(family_id, 1.0)
        for fraction in fractions:
            if fraction >= 1.0:
                checkpoints.append(
                    Checkpoint(
                        checkpoint_id=f"{family_id}_s100",
                        policy=best_policy,
                        params=best_params,
                        measured_selfplay_reward=best_reward,
                        skill_fraction=1.0,
                    )
                )
                continue
            checkpoint = _bisect_to_fraction(
                layout, base, family_id, fraction, best_reward,
                tolerance, episodes, horizon, seed, max_bisections,
                search_lo=best_u,
            )
            checkpoints.append(checkpoint)
    return checkpoints


def _bisect_to_fraction(
    layout, base, family_id, fraction, best_reward,
    tolerance, episodes, horizon, seed, max_bisections,
    search_lo: float = 0.0,
):
    lo, hi = search_lo, 1.0  # ratio(lo) ~ 1, ratio(hi) ~ 0
    best = None  # (abs diff, checkpoint); evaluations are noisy, keep the closest
    for _ in range(max_bisections):
        mid = (lo + hi) / 2.0
        params = _degrade(base, mid)
        policy = planner_policy(
            layout, params, policy_id=f"{family_id}_s{int(round(fraction * 100))}"
        )
        reward = evaluate_selfplay(policy, layout, episodes, horizon, seed)
        ratio = reward / best_reward
        checkpoint = Checkpoint(
            checkpoint_id=policy.policy_id,
            policy=policy,
            params=params,
            measured_selfplay_reward=reward,
            skill_fraction=ratio,
        )
        diff = abs(ratio - fraction)
        if best is None or diff < best[0]:
            best = (diff, checkpoint)
        if diff <= tolerance:
            return checkpoint
        if ratio > fraction:
            lo = mid
        else:
            hi = mid
    if best is not None and best[0] <= tolerance:
        return best[1]
    raise CannotReachSkillTargetError(family_id, fraction)


def population_manifest(checkpoints: list[Checkpoint]) -> dict:
    return {
        "checkpoints": [
            {
                "id": c.checkpoint_id,
                "params": c.params.to_mapping(),
                "measured_selfplay_reward": c.measured_selfplay_reward,
                "skill_fraction": c.skill_fraction,
            }
            for c in checkpoints
        ]
    }


def save_population(path, checkpoints: list[Checkpoint]):
    Path(path).write_text(json.dumps(population_manifest(checkpoints), indent=2))


def load_population(path, layout: Layout) -> list[Checkpoint]:
    """Rebuild checkpoint policies from a manifest (policies are fully
    determined by their planner params)."""
    manifest = json.loads(Path(path).read_text())
    checkpoints = []
    for entry in manifest["checkpoints"]:
        params = PlannerParams.from_mapping(entry["params"])
        policy = planner_policy(layout, params, policy_id=entry["id"])
        checkpoints.append(
            Checkpoint(
                checkpoint_id=entry["id"],
                policy=policy,
                params=params,
                measured_selfplay_reward=entry["measured_selfplay_reward"],
                skill_fraction=entry["skill_fraction"],
            )
        )
    return checkpoints
