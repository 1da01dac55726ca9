"""Offline dataset construction.

The collection grid pairs the target agent first with a copy of itself
and then with every partner checkpoint, crossing each pairing with the
game settings (target seat, per-side determinism).  Self-play is seat
symmetric, so it only uses the role-0 settings.  With 15 checkpoints
and the default 8 settings this yields 15 x 8 + 4 = 124 pair-settings,
and each contributes ``trajectories_per_pair`` rollouts of ``horizon``
steps.
"""

from __future__ import annotations

import numpy as np

from ..agents.policy import Policy
from ..agents.population import Checkpoint
from ..agents.rollout import episode_rng, rollout_episode
from ..env.layout import Layout
from .trajectory import Dataset, RolloutSettings, SCHEMA_VERSION, SELF_PARTNER, Trajectory

DEFAULT_SETTINGS = tuple(
    RolloutSettings(target_role=role, partner_deterministic=pd, target_deterministic=td)
    for role in (0, 1)
    for pd in (True, False)
    for td in (True, False)
)


class HorizonTooShortError(ValueError):
    pass


def pair_settings(
    population: list[Checkpoint],
    settings: tuple[RolloutSettings, ...] = DEFAULT_SETTINGS,
) -> list[tuple[str, RolloutSettings]]:
    """Ordered (partner_id, settings) cells of the collection grid."""
    cells = [(SELF_PARTNER, s) for s in settings if s.target_role == 0]
    for checkpoint in population:
        for s in settings:
            cells.append((checkpoint.checkpoint_id, s))
    return cells


def collect_dataset(
    layout: Layout,
    target: Policy,
    population: list[Checkpoint],
    settings: tuple[RolloutSettings, ...] = DEFAULT_SETTINGS,
    trajectories_per_pair: int = 5,
    horizon: int = 800,
    seed: int = 0,
    target_style: str | None = None,
    history_length: int = 10,
    prediction_length: int = 3,
) -> Dataset:
    if not population:
        raise ValueError("population must be non-empty")
    if horizon < history_length + prediction_length:
        raise HorizonTooShortError(
            f"horizon {horizon} < history {history_length} + prediction {prediction_length}"
        )
    target_style = target_style or target.policy_id
    by_id = {c.checkpoint_id: c.policy for c in population}
    cells = pair_settings(population, settings)

    trajectories = []
    for partner_id, cell in cells:
        partner = target if partner_id == SELF_PARTNER else by_id[partner_id]
        role = cell.target_role
        policies = [None, None]
        policies[role] = target
        policies[1 - role] = partner
        deterministic = [False, False]
        deterministic[role] = cell.target_deterministic
        deterministic[1 - role] = cell.partner_deterministic
        for k in range(trajectories_per_pair):
            rng = episode_rng(
                seed, partner_id, role,
                cell.partner_deterministic, cell.target_deterministic, k,
            )
            result = rollout_episode(
                layout, (policies[0], policies[1]), horizon, rng,
                deterministic=(deterministic[0], deterministic[1]),
            )
            trajectory_id = (
                f"{partner_id}_r{role}"
                f"_pd{int(cell.partner_deterministic)}"
                f"_td{int(cell.target_deterministic)}_k{k}"
            )
            trajectories.append(
                Trajectory(
                    trajectory_id=trajectory_id,
                    layout_id=layout.name,
                    target_style=target_style,
                    partner_id=partner_id,
                    settings=cell,
                    records=result.records,
                    seed=seed,
                )
            )

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "layout_id": layout.name,
        "target_style": target_style,
        "seed": seed,
        "config": {
            "trajectories_per_pair": trajectories_per_pair,
            "horizon": horizon,
            "settings": [s.to_dict() for s in settings],
            "history_length": history_length,
            "prediction_length": prediction_length,
            "num_checkpoints": len(population),
        },
        "counts": {
            "pair_settings": len(cells),
            "trajectories": len(cells) * trajectories_per_pair,
            "steps_total": len(cells) * trajectories_per_pair * horizon,
        },
        "splits": {},
    }
    return Dataset(manifest=manifest, trajectories=trajectories)


class TooFewPartnersError(ValueError):
    pass


def split_dataset(dataset: Dataset, ratios=(3, 1, 1), seed: int = 0) -> Dataset:
    """Assign each partner identity (never an individual trajectory) to
    train/val/test with counts proportional to ``ratios``."""
    partner_ids = dataset.partner_ids
    if len(partner_ids) < 5:
        raise TooFewPartnersError(
            f"need at least 5 distinct partner ids, got {len(partner_ids)}"
        )
    rng = np.random.default_rng(seed)
    order = [str(pid) for pid in rng.permutation(partner_ids)]

    total = sum(ratios)
    names = ("train", "val", "test")
    exact = [len(order) * r / total for r in ratios]
    counts = [int(np.floor(e)) for e in exact]
    remainders = [e - c for e, c in zip(exact, counts)]
    while sum(counts) < len(order):
        i = int(np.argmax(remainders))
        counts[i] += 1
        remainders[i] = -1.0

    splits = {}
    cursor = 0
    for name, count in zip(names, counts):
        for pid in order[cursor : cursor + count]:
            splits[pid] = name
        cursor += count

    manifest = dict(dataset.manifest)
    manifest["splits"] = splits
    manifest["split_seed"] = seed
    manifest["split_ratios"] = list(ratios)
    return Dataset(manifest=manifest, trajectories=dataset.trajectories)
