import json

import numpy as np
import pytest

from coopmind.agents import Checkpoint, PlannerParams, planner_policy
from coopmind.data import (
    ChecksumError,
    DEFAULT_SETTINGS,
    HorizonTooShortError,
    RolloutSettings,
    SELF_PARTNER,
    SchemaVersionError,
    TooFewPartnersError,
    collect_dataset,
    load,
    make_samples,
    pair_settings,
    save,
    split_dataset,
    trajectory_samples,
    validate_replay,
)
from coopmind.data.trajectory import Trajectory
from coopmind.env import load_layout


@pytest.fixture(scope="module")
def layout():
    return load_layout("tutorial")


@pytest.fixture(scope="module")
def target(layout):
    return planner_policy(layout, PlannerParams(style="partner_aware"), policy_id="target")


def _checkpoint(layout, idx, epsilon=0.1):
    params = PlannerParams(style="egocentric", epsilon=epsilon)
    policy = planner_policy(layout, params, policy_id=f"cp{idx}")
    return Checkpoint(
        checkpoint_id=f"cp{idx}", policy=policy, params=params,
        measured_selfplay_reward=10.0, skill_fraction=1.0,
    )


def test_single_pair_single_setting_counts(layout, target):
    population = [_checkpoint(layout, 0)]
    settings = (RolloutSettings(0, True, True),)
    dataset = collect_dataset(
        layout, target, population, settings=settings,
        trajectories_per_pair=1, horizon=20, seed=0,
    )
    assert len(dataset.trajectories) == 2  # self-play + cross-play
    assert dataset.total_steps == 40
    assert {t.partner_id for t in dataset.trajectories} == {SELF_PARTNER, "cp0"}
    assert dataset.manifest["counts"]["steps_total"] == 40


def test_paper_scale_pair_setting_arithmetic(layout):
    # 15 checkpoints x 8 settings + 4 self-play settings = 124 cells,
    # which at 5 trajectories x 800 steps gives 4.96e5 samples.
    population = [_checkpoint(layout, i) for i in range(15)]
    cells = pair_settings(population, DEFAULT_SETTINGS)
    assert len(cells) == 124
    assert 124 * 5 * 800 == 496_000


def test_horizon_too_short(layout, target):
    with pytest.raises(HorizonTooShortError):
        collect_dataset(
            layout, target, [_checkpoint(layout, 0)],
            settings=(RolloutSettings(0, True, True),),
            trajectories_per_pair=1, horizon=12, seed=0,
        )


def test_trajectory_records_have_horizon_length(layout, target):
    dataset = collect_dataset(
        layout, target, [_checkpoint(layout, 0)],
        settings=(RolloutSettings(0, False, False),),
        trajectories_per_pair=2, horizon=50, seed=1,
    )
    assert all(t.horizon == 50 for t in dataset.trajectories)
    for t in dataset.trajectories:
        timesteps = [s.timestep for s, _ in t.records]
        assert timesteps == list(range(50))


def test_collection_reproducible(layout, target):
    kwargs = dict(
        settings=(RolloutSettings(0, False, False),),
        trajectories_per_pair=1, horizon=30, seed=9,
    )
    a = collect_dataset(layout, target, [_checkpoint(layout, 0)], **kwargs)
    b = collect_dataset(layout, target, [_checkpoint(layout, 0)], **kwargs)
    assert a.trajectories[0].records == b.trajectories[0].records


@pytest.fixture(scope="module")
def small_dataset(layout, target):
    population = [_checkpoint(layout, i) for i in range(4)]
    dataset = collect_dataset(
        layout, target, population,
        settings=(RolloutSettings(0, True, False), RolloutSettings(1, False, False)),
        trajectories_per_pair=1, horizon=40, seed=2,
    )
    return dataset


def test_split_three_one_one(small_dataset):
    split = split_dataset(small_dataset, seed=0)
    splits = split.manifest["splits"]
    # 5 partner ids: 4 checkpoints + SELF
    assert len(splits) == 5
    counts = {name: 0 for name in ("train", "val", "test")}
    for name in splits.values():
        counts[name] += 1
    assert counts == {"train": 3, "val": 1, "test": 1}
    # determinism
    again = split_dataset(small_dataset, seed=0)
    assert again.manifest["splits"] == splits
    # partition: each partner in exactly one split, trajectories follow
    for trajectory in split.trajectories:
        assert trajectory.partner_id in splits
    in_any = sum(len(split.in_split(s)) for s in ("train", "val", "test"))
    assert in_any == len(split.trajectories)


def test_split_too_few_partners(layout, target):
    dataset = collect_dataset(
        layout, target, [_checkpoint(layout, 0)],
        settings=(RolloutSettings(0, True, True),),
        trajectories_per_pair=1, horizon=20, seed=0,
    )
    with pytest.raises(TooFewPartnersError):
        split_dataset(dataset)


def _synthetic_trajectory(layout, horizon, seed=0):
    from coopmind.agents.rollout import episode_rng, rollout_episode
    from coopmind.agents import UniformRandomPolicy

    rng = episode_rng(seed, "synthetic", horizon)
    policy = UniformRandomPolicy()
    result = rollout_episode(layout, (policy, policy), horizon, rng)
    return Trajectory(
        trajectory_id=f"synthetic_{horizon}",
        layout_id=layout.name,
        target_style="uniform",
        partner_id="partner",
        settings=RolloutSettings(1, False, False),
        records=result.records,
        seed=seed,
    )


def test_sample_count_800_steps(layout):
    trajectory = _synthetic_trajectory(layout, 800)
    samples = list(trajectory_samples(trajectory, n=10, l=3))
    assert len(samples) == 800 - 9 - 3


def test_sample_count_short_horizon(layout):
    trajectory = _synthetic_trajectory(layout, 12)
    assert list(trajectory_samples(trajectory, n=10, l=3)) == []


def test_sample_alignment_and_zero_slot(layout):
    trajectory = _synthetic_trajectory(layout, 60)
    samples = list(trajectory_samples(trajectory, n=10, l=3))
    rng = np.random.default_rng(0)
    role = trajectory.settings.target_role
    for idx in rng.choice(len(samples), size=10, replace=False):
        sample = samples[idx]
        t = sample.t
        # labels match the logged target actions at t, t+1, t+2
        expected = tuple(int(trajectory.records[t + i][1][role]) for i in range(3))
        assert sample.labels == expected
        # history is the n-1 preceding records; current state matches
        assert sample.history == tuple(trajectory.records[t - 9 : t])
        assert sample.current_state == trajectory.records[t][0]
        # zeroed current-action slot
        assert not sample.current_action_input.any()
        assert not sample.action_inputs()[-1].any()


def test_save_load_round_trip(tmp_path, small_dataset):
    save(small_dataset, tmp_path / "ds")
    loaded = load(tmp_path / "ds")
    assert loaded.manifest["counts"] == small_dataset.manifest["counts"]
    assert len(loaded.trajectories) == len(small_dataset.trajectories)
    for a, b in zip(loaded.trajectories, small_dataset.trajectories):
        assert a.trajectory_id == b.trajectory_id
        assert a.settings == b.settings
        assert a.records == b.records  # bit-exact state round trip


def test_load_detects_corruption(tmp_path, small_dataset):
    save(small_dataset, tmp_path / "ds")
    victim = next((tmp_path / "ds").glob("*.jsonl"))
    content = victim.read_text().splitlines()
    record = json.loads(content[3])
    record["a"] = [5, 5]
    content[3] = json.dumps(record, sort_keys=True)
    victim.write_text("\n".join(content) + "\n")
    with pytest.raises(ChecksumError):
        load(tmp_path / "ds")


def test_load_rejects_unknown_schema(tmp_path, small_dataset):
    save(small_dataset, tmp_path / "ds")
    manifest_path = tmp_path / "ds" / "manifest.json"
    manifest = json.loads(manifest_path.read_text())
    manifest["schema_version"] = 99
    manifest_path.write_text(json.dumps(manifest))
    with pytest.raises(SchemaVersionError):
        load(tmp_path / "ds")


def test_loaded_trajectories_replay_exactly(tmp_path, small_dataset, layout):
    save(small_dataset, tmp_path / "ds")
    loaded = load(tmp_path / "ds")
    for trajectory in loaded.trajectories:
        validate_replay(trajectory, layout)


def test_replay_validation_catches_tampering(layout, small_dataset):
    trajectory = small_dataset.trajectories[0]
    tampered = Trajectory(
        trajectory_id=trajectory.trajectory_id,
        layout_id=trajectory.layout_id,
        target_style=trajectory.target_style,
        partner_id=trajectory.partner_id,
        settings=trajectory.settings,
        records=list(trajectory.records),
        seed=trajectory.seed,
    )
    from dataclasses import replace

    state, action = tampered.records[5]
    tampered.records[5] = (replace(state, timestep=state.timestep + 7), action)
    from coopmind.data import ReplayMismatchError

    with pytest.raises(ReplayMismatchError):
        validate_replay(tampered, layout)


def test_make_samples_respects_split(small_dataset):
    split = split_dataset(small_dataset, seed=3)
    train_ids = {
        t.trajectory_id for t in split.in_split("train")
    }
    for sample in make_samples(split, n=5, l=2, split="train"):
        assert sample.trajectory_id in train_ids
