"""On-disk dataset format.

A dataset is a directory: ``manifest.json`` plus one ``.jsonl`` file
per trajectory (one record per line, states stored explicitly so
samples load without re-simulation).  The manifest carries the schema
version, collection config, split assignment, and a sha256 checksum per
trajectory file; loading verifies the checksums and the stored states
can be re-validated against the simulator with ``validate_replay``.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from ..env.layout import Layout
from ..env.mdp import step
from ..env.state import Action, GameState
from .trajectory import Dataset, RolloutSettings, SCHEMA_VERSION, Trajectory


class DatasetIoError(OSError):
    pass


class SchemaVersionError(ValueError):
    pass


class ChecksumError(ValueError):
    pass


class ReplayMismatchError(ValueError):
    pass


def _record_line(state: GameState, action) -> str:
    return json.dumps(
        {"t": state.timestep, "state": state.to_dict(), "a": [int(action[0]), int(action[1])]},
        sort_keys=True,
    )


def save(dataset: Dataset, path) -> None:
    try:
        root = Path(path)
        root.mkdir(parents=True, exist_ok=True)
        manifest = dict(dataset.manifest)
        entries = []
        for trajectory in dataset.trajectories:
            filename = f"{trajectory.trajectory_id}.jsonl"
            body = "".join(
                _record_line(state, action) + "\n" for state, action in trajectory.records
            )
            data = body.encode("utf-8")
            (root / filename).write_bytes(data)
            entries.append(
                {
                    "id": trajectory.trajectory_id,
                    "file": filename,
                    "sha256": hashlib.sha256(data).hexdigest(),
                    "records": len(trajectory.records),
                    "layout_id": trajectory.layout_id,
                    "target_style": trajectory.target_style,
                    "partner_id": trajectory.partner_id,
                    "settings": trajectory.settings.to_dict(),
                    "seed": trajectory.seed,
                }
            )
        manifest["trajectories"] = entries
        (root / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    except OSError as exc:
        raise DatasetIoError(f"failed to write dataset to {path}: {exc}") from exc


def load(path) -> Dataset:
    root = Path(path)
    try:
        manifest = json.loads((root / "manifest.json").read_text())
    except OSError as exc:
        raise DatasetIoError(f"failed to read dataset at {path}: {exc}") from exc
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"dataset schema {manifest.get('schema_version')} != supported {SCHEMA_VERSION}"
        )
    trajectories = []
    for entry in manifest["trajectories"]:
        try:
            data = (root / entry["file"]).read_bytes()
        except OSError as exc:
            raise DatasetIoError(f"failed to read {entry['file']}: {exc}") from exc
        digest = hashlib.sha256(data).hexdigest()
        if digest != entry["sha256"]:
            raise ChecksumError(f"{entry['file']}: checksum mismatch")
        records = []
        for line in data.decode("utf-8").splitlines():
            record = json.loads(line)
            records.append(
                (
                    GameState.from_dict(record["state"]),
                    (Action(record["a"][0]), Action(record["a"][1])),
                )
            )
        trajectories.append(
            Trajectory(
                trajectory_id=entry["id"],
                layout_id=entry["layout_id"],
                target_style=entry["target_style"],
                partner_id=entry["partner_id"],
                settings=RolloutSettings.from_dict(entry["settings"]),
                records=records,
                seed=entry["seed"],
            )
        )
    return Dataset(manifest=manifest, trajectories=trajectories)


def validate_replay(trajectory: Trajectory, layout: Layout) -> None:
    """Re-simulate the logged actions and require every stored snapshot
    to match exactly; a mismatch means the data is corrupt."""
    if not trajectory.records:
        return
    state = trajectory.records[0][0]
    for i, (stored, action) in enumerate(trajectory.records):
        if stored != state:
            raise ReplayMismatchError(
                f"{trajectory.trajectory_id}: state mismatch at record {i}"
            )
        state = step(layout, state, action).next_state
