"""Offline trajectory records and dataset container."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..env.state import GameState, JointAction

SELF_PARTNER = "SELF"
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RolloutSettings:
    """One cell of the data-collection grid: which seat the target agent
    occupies and whether each side samples or plays argmax."""

    target_role: int
    partner_deterministic: bool
    target_deterministic: bool

    def to_dict(self) -> dict:
        return {
            "target_role": self.target_role,
            "partner_deterministic": self.partner_deterministic,
            "target_deterministic": self.target_deterministic,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RolloutSettings":
        return cls(
            target_role=d["target_role"],
            partner_deterministic=d["partner_deterministic"],
            target_deterministic=d["target_deterministic"],
        )


@dataclass
class Trajectory:
    trajectory_id: str
    layout_id: str
    target_style: str
    partner_id: str  # SELF_PARTNER for self-play
    settings: RolloutSettings
    records: list[tuple[GameState, JointAction]]
    seed: int

    @property
    def horizon(self) -> int:
        return len(self.records)

    def target_action(self, t: int) -> int:
        return int(self.records[t][1][self.settings.target_role])


@dataclass
class Dataset:
    manifest: dict
    trajectories: list[Trajectory] = field(default_factory=list)

    @property
    def partner_ids(self) -> list[str]:
        return sorted({t.partner_id for t in self.trajectories})

    def split_of(self, partner_id: str) -> str | None:
        return self.manifest.get("splits", {}).get(partner_id)

    def in_split(self, split: str) -> list[Trajectory]:
        splits = self.manifest.get("splits", {})
        return [t for t in self.trajectories if splits.get(t.partner_id) == split]

    @property
    def total_steps(self) -> int:
        return sum(t.horizon for t in self.trajectories)
