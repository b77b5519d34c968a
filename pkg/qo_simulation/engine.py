"""
Per-trigger run engine.

For every clock trigger: QRNG choice bit -> EOM voltage -> emission ->
per-photon loss, routing and detection -> dark counts. Triggers are
simulated in fixed-size chunks, each with its own derived seed, so the
log does not depend on how chunks are spread over workers.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd
from tqdm import tqdm

from qo_physics.errors import ConfigurationError, DelayedChoiceViolationError
from qo_physics.optics import fringe_probability, reflectivity_from_voltage
from qo_physics.qrng import ShotNoiseQRNG
from qo_physics.source import sample_photon_counts
from qo_physics.timing import verify_delayed_choice_geometry
from qo_simulation.config import BLOCKED_CODES, RunConfig, config_digest
from qo_simulation.detector import apply_dark_counts, thin_photons

logger = logging.getLogger(__name__)


# -----------------------------
# Engine constants
# -----------------------------
FORMAT_VERSION = 1
CHUNK_SIZE = 1 << 16

# TriggerRecord field order, shared with the event-log file format
RECORD_COLUMNS = [
    "trigger_index",
    "choice_bit",
    "applied_v_eom",
    "phase",
    "blocked_path",
    "click_p1",
    "click_p2",
    "photon_count_emitted",  # ground truth, never read by the estimators
]

_PHYSICS_STREAM = 0
_QRNG_STREAM = 1


@dataclass(frozen=True)
class EventLog:
    format_version: int
    config_digest: str
    records: pd.DataFrame

    def __len__(self):
        return len(self.records)


# -----------------------------
# Internal helpers
# -----------------------------
def _phases_for(cfg: RunConfig, trigger_index: np.ndarray) -> np.ndarray:
    schedule = cfg.schedule()
    phases = np.array([phase for phase, _ in schedule], dtype=float)
    bounds = np.cumsum([span for _, span in schedule])
    return phases[np.searchsorted(bounds, trigger_index, side="right")]


def _choice_bits(cfg: RunConfig, chunk: int, n: int) -> np.ndarray:
    if cfg.choice_mode == "fixed":
        return np.full(n, cfg.fixed_choice_bit, dtype=np.int8)

    qrng = ShotNoiseQRNG(cfg.qrng, seed=cfg.seed, spawn_key=(chunk, _QRNG_STREAM))
    return qrng.draw(n)


def _route_photons(cfg: RunConfig, rng: np.random.Generator, detected: np.ndarray,
                   r: np.ndarray, phase: np.ndarray):
    """Return (hits_p1, hits_p2) for one photon slot."""
    n = detected.size

    if cfg.blocked_path == "none":
        to_p1 = rng.random(n) < fringe_probability(r, phase, cfg.optics.xi)
        return detected & to_p1, detected & ~to_p1

    # Balanced input splitter; the blocked arm absorbs its photons
    in_path1 = rng.random(n) < 0.5
    transmitted = ~in_path1 if cfg.blocked_path == "path1" else in_path1
    crossed = rng.random(n) < r
    to_p1 = in_path1 ^ crossed

    survivors = detected & transmitted
    return survivors & to_p1, survivors & ~to_p1


def _simulate_chunk(cfg: RunConfig, chunk: int, start: int, stop: int) -> pd.DataFrame:
    n = stop - start
    rng = np.random.default_rng(
        np.random.SeedSequence(cfg.seed, spawn_key=(chunk, _PHYSICS_STREAM))
    )

    trigger_index = np.arange(start, stop, dtype=np.int64)
    bits = _choice_bits(cfg, chunk, n)
    v_eom = np.where(bits == 1, cfg.optics.v_eom, 0.0)
    r = np.where(bits == 1, reflectivity_from_voltage(cfg.optics), 0.0)
    phase = _phases_for(cfg, trigger_index)

    photons = sample_photon_counts(cfg.emission, rng, n)

    hits_p1 = np.zeros(n, dtype=bool)
    hits_p2 = np.zeros(n, dtype=bool)
    # Two photons from one trigger are routed independently
    for slot in range(2):
        detected = thin_photons(photons > slot, cfg.detector, rng)
        p1, p2 = _route_photons(cfg, rng, detected, r, phase)
        hits_p1 |= p1
        hits_p2 |= p2

    click_p1, click_p2 = apply_dark_counts(hits_p1, hits_p2, cfg.detector, rng)

    return pd.DataFrame({
        "trigger_index": trigger_index,
        "choice_bit": bits.astype(np.int8),
        "applied_v_eom": v_eom,
        "phase": phase,
        "blocked_path": np.full(n, BLOCKED_CODES[cfg.blocked_path], dtype=np.int8),
        "click_p1": click_p1,
        "click_p2": click_p2,
        "photon_count_emitted": photons,
    })


def _check_causality(cfg: RunConfig):
    if not cfg.delayed_choice:
        logger.info("Delayed-choice geometry check waived for this run")
        return

    report = verify_delayed_choice_geometry(cfg.geometry)
    if not report.passed:
        raise DelayedChoiceViolationError(
            f"Choice event is {report.separation.value} "
            f"(margin {report.margin_ns:.2f} ns); refusing to run in delayed-choice mode"
        )
    logger.debug("Geometry %s, margin %.2f ns", report.separation.value, report.margin_ns)


# -----------------------------
# Public API
# -----------------------------
def run_experiment(cfg: RunConfig, workers: int = 1, progress: bool = False) -> EventLog:
    """
    Simulate cfg.n_triggers clock triggers and return the event log.

    Parameters
    ----------
    cfg : RunConfig
        Validated run configuration. The seed fully determines the log.
    workers : int
        Process count for chunk sharding; does not change the result.
    progress : bool
        Show a tqdm bar over chunks.

    Returns
    -------
    EventLog
        Records sorted by trigger_index, one per trigger.
    """
    if workers < 1:
        raise ConfigurationError(f"workers={workers} must be >= 1")
    _check_causality(cfg)

    bounds = [
        (chunk, start, min(start + CHUNK_SIZE, cfg.n_triggers))
        for chunk, start in enumerate(range(0, cfg.n_triggers, CHUNK_SIZE))
    ]
    logger.info(
        "Simulating %d triggers in %d chunks (blocked=%s, choice=%s)",
        cfg.n_triggers, len(bounds), cfg.blocked_path, cfg.choice_mode,
    )

    bar = tqdm(total=len(bounds), desc="triggers", unit="chunk", disable=not progress)
    if workers == 1:
        frames = []
        for chunk, start, stop in bounds:
            frames.append(_simulate_chunk(cfg, chunk, start, stop))
            bar.update()
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_simulate_chunk, cfg, *b) for b in bounds]
            frames = []
            for future in futures:
                frames.append(future.result())
                bar.update()
    bar.close()

    records = pd.concat(frames, ignore_index=True)[RECORD_COLUMNS]
    return EventLog(
        format_version=FORMAT_VERSION,
        config_digest=config_digest(cfg),
        records=records,
    )


def run_phase_scan(cfg: RunConfig, phases, triggers_per_point: int,
                   workers: int = 1, progress: bool = False) -> EventLog:
    """One sub-run per phase point, concatenated in phase order."""
    phases = [float(p) for p in phases]
    if not phases:
        raise ConfigurationError("Phase scan needs at least one phase")
    if triggers_per_point <= 0:
        raise ConfigurationError(f"triggers_per_point={triggers_per_point} must be > 0")

    scan_cfg = cfg.replace(
        n_triggers=len(phases) * triggers_per_point,
        phase_schedule=tuple((p, triggers_per_point) for p in phases),
    )
    return run_experiment(scan_cfg, workers=workers, progress=progress)


def run_blocked_path(cfg: RunConfig, which: str,
                     workers: int = 1, progress: bool = False) -> EventLog:
    """Same engine with one interferometer arm blocked."""
    if which not in ("path1", "path2"):
        raise ConfigurationError(f"Blocked path must be path1 or path2, got {which!r}")
    return run_experiment(cfg.replace(blocked_path=which), workers=workers, progress=progress)


def run_alpha_measurement(cfg: RunConfig, workers: int = 1,
                          progress: bool = False) -> EventLog:
    """
    Anticorrelation run: EOM held at 0 V, both arms open.

    The output beamsplitter is absent, so each detector watches one arm;
    coincidences are the records with both clicks set.
    """
    if cfg.choice_mode != "fixed" or cfg.fixed_choice_bit != 0:
        logger.info("Alpha measurement forces the choice bit to 0 (R = 0)")
    alpha_cfg = cfg.replace(choice_mode="fixed", fixed_choice_bit=0, blocked_path="none")
    return run_experiment(alpha_cfg, workers=workers, progress=progress)
