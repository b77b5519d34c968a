import json
import logging
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from qo_physics.errors import ScenarioError
from qo_physics.optics import reflectivity_from_voltage, voltage_for_reflectivity
from qo_simulation.config import RunConfig

logger = logging.getLogger(__name__)


ScenarioKind = Literal[
    "fringe_scan",
    "blocked_path",
    "alpha",
    "duality_sweep",
    "causality_check",
    "choice_comparison",
]


class Scenario(BaseModel):
    """
    One measurement sequence. run_config.n_triggers is the trigger count
    per phase point and per blocked-path run.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(min_length=1)
    kind: ScenarioKind
    run_config: RunConfig = RunConfig()
    phase_points: int = Field(20, ge=4)
    # V_EOM values in volts, or target reflectivities converted to volts
    sweep: tuple[float, ...] | None = None
    sweep_reflectivity: tuple[float, ...] | None = None

    @model_validator(mode="after")
    def _check_sweep(self):
        has_sweep = self.sweep is not None or self.sweep_reflectivity is not None

        if self.kind != "duality_sweep" and has_sweep:
            raise ValueError("sweep is only allowed for kind 'duality_sweep'")
        if self.kind == "duality_sweep":
            if not has_sweep:
                raise ValueError("duality_sweep needs 'sweep' or 'sweep_reflectivity'")
            if self.sweep is not None and self.sweep_reflectivity is not None:
                raise ValueError("give either 'sweep' or 'sweep_reflectivity', not both")
            if self.sweep is not None and any(v < 0 for v in self.sweep):
                raise ValueError(f"sweep voltages must be >= 0, got {list(self.sweep)}")
        return self

    def sweep_voltages(self) -> list[float]:
        if self.sweep is not None:
            return list(self.sweep)
        if self.sweep_reflectivity is None:
            return []
        optics = self.run_config.optics
        return [voltage_for_reflectivity(r, optics.beta, optics.v_pi)
                for r in self.sweep_reflectivity]

    def sweep_reflectivities(self) -> list[float]:
        optics = self.run_config.optics
        return [reflectivity_from_voltage(optics.model_copy(update={"v_eom": v}))
                for v in self.sweep_voltages()]


# -----------------------------
# Internal helpers
# -----------------------------
def _format_validation_error(exc: ValidationError) -> str:
    problems = []
    for err in exc.errors():
        key_path = ".".join(str(part) for part in err["loc"]) or "<root>"
        problems.append(f"{key_path}: {err['msg']}")
    return "; ".join(problems)


# -----------------------------
# Public API
# -----------------------------
def parse_scenario(data: dict, source: str = "<dict>") -> Scenario:
    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        raise ScenarioError(f"{source}: {_format_validation_error(exc)}") from exc


def load_config(path: Path) -> Scenario:
    """
    Loads and validates a JSON scenario file, filling reference defaults.

    Raises
    ------
    FileNotFoundError
        Missing file.
    ScenarioError
        Unparseable JSON or invalid fields; the message names the key path.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Required file not found: {path.as_posix()}")

    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{path.as_posix()}: invalid JSON at line {exc.lineno}, column {exc.colno}"
        ) from exc

    scenario = parse_scenario(data, source=path.as_posix())

    if scenario.kind == "duality_sweep":
        for v, r in zip(scenario.sweep_voltages(), scenario.sweep_reflectivities()):
            logger.info("Sweep point V_EOM = %.3f V -> R = %.4f", v, r)

    return scenario


def apply_overrides(scenario: Scenario, seed: int | None = None,
                    triggers: int | None = None) -> Scenario:
    """Command-line seed / trigger-count overrides, revalidated."""
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if triggers is not None:
        changes["n_triggers"] = triggers
    if not changes:
        return scenario

    try:
        run_config = scenario.run_config.replace(**changes)
    except ValidationError as exc:
        raise ScenarioError(f"override: {_format_validation_error(exc)}") from exc
    return scenario.model_copy(update={"run_config": run_config})
