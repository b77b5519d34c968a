"""
Shot-noise quantum random number generator.

Amplified white-light shot noise is compared to the zero level once per
clock period; the comparator output is the choice bit driving the EOM.
The noise is modeled as Gaussian, so the comparator is a sign test on a
standard-normal sample shifted by the comparator offset.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.stats import norm

from qo_physics.errors import InsufficientDataError


# -----------------------------
# Test thresholds
# -----------------------------
Z_THRESHOLD = 4.0
MIN_BIAS_SAMPLES = 100


class NoiseModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    mean_offset: float = 0.0
    seed: int | None = None


@dataclass(frozen=True)
class ChoiceBit:
    value: int
    trigger_index: int


@dataclass(frozen=True)
class BiasReport:
    n: int
    frequency: float
    z_score: float
    p_value: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class AutocorrelationReport:
    n: int
    lags: tuple[int, ...]
    correlations: tuple[float, ...]
    bound: float
    degenerate: bool
    passed: bool


class ShotNoiseQRNG:
    """
    Comparator on Gaussian shot noise. Single owner of its generator state.

    Every bit consumes exactly one noise sample, so a stream drawn with
    draw(n) replays the same bits as n calls to next_choice_bit().
    """

    def __init__(self, model: NoiseModel, seed: int | None = None,
                 spawn_key: tuple[int, ...] = ()):
        # Noise seed and run seed together define the stream
        entropy = [s for s in (model.seed, seed) if s is not None]
        if not entropy:
            raise ValueError("QRNG needs a seed from the noise model or the run")

        self.model = model
        self.trigger_index = 0
        self._rng = np.random.default_rng(
            np.random.SeedSequence(entropy, spawn_key=spawn_key)
        )

    def next_choice_bit(self) -> ChoiceBit:
        noise = self._rng.standard_normal()
        bit = ChoiceBit(value=int(noise + self.model.mean_offset > 0.0),
                        trigger_index=self.trigger_index)
        self.trigger_index += 1
        return bit

    def draw(self, n: int) -> np.ndarray:
        noise = self._rng.standard_normal(n)
        self.trigger_index += n
        return (noise + self.model.mean_offset > 0.0).astype(np.int8)


def next_choice_bit(model: NoiseModel, state: ShotNoiseQRNG) -> ChoiceBit:
    """Advance the generator state by one trigger period."""
    if state.model != model:
        raise ValueError("Generator state belongs to a different noise model")
    return state.next_choice_bit()


def _as_array(bits) -> np.ndarray:
    if len(bits) and isinstance(bits[0], ChoiceBit):
        return np.fromiter((b.value for b in bits), dtype=float, count=len(bits))
    return np.asarray(bits, dtype=float)


def bias_test(bits: Sequence, threshold: float = Z_THRESHOLD) -> BiasReport:
    """
    Frequency test: z = (freq - 0.5) / sqrt(0.25 / n), pass iff |z| <= threshold.
    """
    x = _as_array(bits)
    n = x.size
    if n < MIN_BIAS_SAMPLES:
        raise InsufficientDataError(
            f"Bias test needs at least {MIN_BIAS_SAMPLES} bits, got {n}"
        )

    frequency = float(x.mean())
    z = (frequency - 0.5) / np.sqrt(0.25 / n)
    return BiasReport(
        n=n,
        frequency=frequency,
        z_score=float(z),
        p_value=float(2.0 * norm.sf(abs(z))),
        threshold=threshold,
        passed=bool(abs(z) <= threshold),
    )


def autocorrelation_test(bits: Sequence, max_lag: int = 10,
                         threshold: float = Z_THRESHOLD) -> AutocorrelationReport:
    """
    Lag-k sample autocorrelation of the centered bits for k = 1..max_lag.

    Pass iff every |r_k| <= threshold / sqrt(n). A constant sequence has no
    variance and is reported degenerate (fail).
    """
    x = _as_array(bits)
    n = x.size
    if max_lag < 1:
        raise ValueError(f"max_lag={max_lag} must be >= 1")
    if n <= 10 * max_lag:
        raise InsufficientDataError(
            f"Autocorrelation test needs more than {10 * max_lag} bits, got {n}"
        )

    lags = tuple(range(1, max_lag + 1))
    bound = threshold / np.sqrt(n)

    centered = x - x.mean()
    variance = float(np.dot(centered, centered))
    if variance == 0.0:
        return AutocorrelationReport(
            n=n, lags=lags, correlations=tuple(float("nan") for _ in lags),
            bound=float(bound), degenerate=True, passed=False,
        )

    correlations = tuple(
        float(np.dot(centered[:-k], centered[k:]) / variance) for k in lags
    )
    return AutocorrelationReport(
        n=n,
        lags=lags,
        correlations=correlations,
        bound=float(bound),
        degenerate=False,
        passed=all(abs(r) <= bound for r in correlations),
    )


def dump_bits(bits, path: Path) -> Path:
    """Write one byte per bit (values 0/1) for external test suites."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(_as_array(bits).astype(np.uint8).tobytes())
    return path
