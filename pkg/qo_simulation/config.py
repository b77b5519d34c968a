"""
Run configuration for the per-trigger engine.
"""

import hashlib
import json
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qo_physics.optics import InterferometerConfig
from qo_physics.qrng import NoiseModel
from qo_physics.source import EmissionModel
from qo_physics.timing import REFERENCE_CLOCK_PERIOD, GeometryConfig


# -----------------------------
# Detector defaults
# -----------------------------
DEFAULT_DARK_RATE = 60.0  # counts / s / detector
DEFAULT_GATE = REFERENCE_CLOCK_PERIOD

BlockedPath = Literal["none", "path1", "path2"]
ChoiceMode = Literal["qrng", "fixed"]

# Event-log encoding of the blocked-path flag
BLOCKED_CODES = {"none": 0, "path1": 1, "path2": 2}
BLOCKED_NAMES = {code: name for name, code in BLOCKED_CODES.items()}


class DetectorModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    efficiency: float = Field(1.0, ge=0.0, le=1.0)
    dark_rate: float = Field(DEFAULT_DARK_RATE, ge=0.0)
    gate: float = Field(DEFAULT_GATE, gt=0.0)

    @property
    def dark_per_gate(self) -> float:
        return self.dark_rate * self.gate


class RunConfig(BaseModel):
    """
    Everything the engine needs; identical configs replay identical logs.

    The optics template carries the V_EOM applied when the choice bit is 1;
    bit 0 leaves the EOM at 0 V (R = 0).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_triggers: int = Field(100_000, gt=0)
    seed: int = Field(0, ge=0)
    emission: EmissionModel = EmissionModel()
    optics: InterferometerConfig = InterferometerConfig()
    # (phase, span) pairs; empty means the optics phase for every trigger
    phase_schedule: tuple[tuple[float, int], ...] = ()
    blocked_path: BlockedPath = "none"
    detector: DetectorModel = DetectorModel()
    geometry: GeometryConfig = GeometryConfig()
    choice_mode: ChoiceMode = "qrng"
    fixed_choice_bit: Literal[0, 1] = 1
    qrng: NoiseModel = NoiseModel()
    delayed_choice: bool = True

    @model_validator(mode="after")
    def _check_schedule(self):
        if not self.phase_schedule:
            return self

        spans = [span for _, span in self.phase_schedule]
        if any(span <= 0 for span in spans):
            raise ValueError(f"phase_schedule spans must be > 0, got {spans}")
        if sum(spans) != self.n_triggers:
            raise ValueError(
                f"phase_schedule spans sum to {sum(spans)}, "
                f"expected n_triggers={self.n_triggers}"
            )
        return self

    def schedule(self) -> tuple[tuple[float, int], ...]:
        return self.phase_schedule or ((self.optics.phase, self.n_triggers),)

    def replace(self, **changes) -> "RunConfig":
        """Validated copy with fields replaced."""
        return RunConfig.model_validate({**self.model_dump(), **changes})


def config_digest(cfg: BaseModel) -> str:
    """Stable under key reordering: hashes the sorted-key JSON dump."""
    canonical = json.dumps(
        cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def derived_seed(seed: int, *keys: int) -> int:
    """Independent child seed for a sub-run (sweep point, second blocked run)."""
    state = np.random.SeedSequence(seed, spawn_key=keys).generate_state(1, dtype=np.uint32)
    return int(state[0])
