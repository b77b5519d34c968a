"""
Scenario orchestration: simulate, persist the event logs, analyze, write
the result tables and the run manifest.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from tqdm import tqdm

from qo_analysis.complementarity import complementarity_statistic, mean_statistic
from qo_analysis.estimators import Estimate
from qo_analysis.run_analysis import analyze_alpha, analyze_blocked_paths, analyze_fringe_scan
from qo_analysis.tables import (
    FRINGE_CSV,
    SUMMARY_JSON,
    SWEEP_CSV,
    fringe_table,
    sweep_table,
    write_summary,
    write_table,
)
from qo_physics.optics import (
    MAX_DISTINGUISHABLE_R,
    has_distinguishability,
    reflectivity_from_voltage,
    theoretical_distinguishability,
    theoretical_visibility,
)
from qo_physics.source import gated_alpha, theoretical_alpha
from qo_physics.timing import reference_geometry_consistent, verify_delayed_choice_geometry
from qo_runner import __version__
from qo_runner.scenario import Scenario
from qo_simulation.config import RunConfig, config_digest, derived_seed
from qo_simulation.engine import run_alpha_measurement, run_blocked_path, run_phase_scan
from qo_simulation.event_log import write_event_log

logger = logging.getLogger(__name__)


# -----------------------------
# Output names (LOCKED)
# -----------------------------
EVENT_LOG = "events.log"
MANIFEST_JSON = "manifest.json"

# Consistency bound for pass flags
N_SIGMA = 3.0

# Sub-run stream keys for derived seeds
_BLOCKED_PATH1_STREAM = 1
_NORMAL_CHOICE_STREAM = 2
_SWEEP_STREAM = 3


@dataclass
class RunManifest:
    scenario: str
    kind: str
    scenario_digest: str
    seed: int
    outputs: list[str] = field(default_factory=list)
    started_at: str = ""
    finished_at: str = ""
    software_version: str = __version__
    flags: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())


@dataclass
class _Context:
    scenario: Scenario
    output_dir: Path
    workers: int
    progress: bool
    persist_logs: bool
    manifest: RunManifest

    @property
    def cfg(self) -> RunConfig:
        return self.scenario.run_config

    def output(self, name: str) -> Path:
        path = self.output_dir / name
        self.manifest.outputs.append(name)
        return path

    def persist(self, log, name: str):
        if self.persist_logs:
            write_event_log(log, self.output(name))


def _phases(scenario: Scenario) -> np.ndarray:
    return np.linspace(0.0, 2.0 * np.pi, scenario.phase_points, endpoint=False)


def _configs_by_bit(cfg: RunConfig) -> tuple[dict[int, float], dict[int, float]]:
    r_on = reflectivity_from_voltage(cfg.optics)
    return {0: 0.0, 1: cfg.optics.v_eom}, {0: 0.0, 1: r_on}


def _estimate_dict(est) -> dict:
    return {"value": est.value, "error": est.error}


def _consistent(value: float, expected: float, error: float) -> bool:
    return bool(abs(value - expected) <= N_SIGMA * error)


# -----------------------------
# Per-kind runners
# -----------------------------
def _fringe_scan(ctx: _Context, cfg: RunConfig, tag: str = "") -> dict:
    log = run_phase_scan(cfg, _phases(ctx.scenario), cfg.n_triggers,
                         workers=ctx.workers, progress=ctx.progress)
    ctx.persist(log, f"events{tag}.log")

    analyses = analyze_fringe_scan(log, cfg.detector)
    v_eom_by_bit, r_by_bit = _configs_by_bit(cfg)
    write_table(fringe_table(analyses, v_eom_by_bit, r_by_bit),
                ctx.output(FRINGE_CSV.replace(".csv", f"{tag}.csv")))

    per_bit = {}
    for bit, analysis in analyses.items():
        fit = analysis.fit
        v_theory = theoretical_visibility(r_by_bit[bit], cfg.optics.xi)
        per_bit[str(bit)] = {
            "v_eom": v_eom_by_bit[bit],
            "r_nominal": r_by_bit[bit],
            "visibility": fit.visibility,
            "visibility_error": fit.visibility_error,
            "visibility_theory": v_theory,
            "phase_offset": fit.phase_offset,
            "identifiable": fit.identifiable,
            "overshoot": fit.overshoot,
        }
    return {"choice_bits": per_bit, "analyses": analyses, "r_by_bit": r_by_bit}


def _run_fringe_scan(ctx: _Context) -> dict:
    result = _fringe_scan(ctx, ctx.cfg)
    cfg = ctx.cfg

    for bit, analysis in result["analyses"].items():
        fit = analysis.fit
        v_theory = theoretical_visibility(result["r_by_bit"][bit], cfg.optics.xi)
        ctx.manifest.flags[f"visibility_consistent_bit{bit}"] = _consistent(
            fit.visibility, v_theory, fit.visibility_error
        )
    return {"fringe": result["choice_bits"]}


def _blocked_runs(ctx: _Context, cfg: RunConfig, tag: str = ""):
    log2 = run_blocked_path(cfg, "path2", workers=ctx.workers, progress=ctx.progress)
    ctx.persist(log2, f"events{tag}_blocked_path2.log")

    cfg1 = cfg.replace(seed=derived_seed(cfg.seed, _BLOCKED_PATH1_STREAM))
    log1 = run_blocked_path(cfg1, "path1", workers=ctx.workers, progress=ctx.progress)
    ctx.persist(log1, f"events{tag}_blocked_path1.log")

    return analyze_blocked_paths(log2, log1, cfg.detector)


def _run_blocked_path(ctx: _Context) -> dict:
    cfg = ctx.cfg
    estimates = _blocked_runs(ctx, cfg)
    _, r_by_bit = _configs_by_bit(cfg)

    per_bit = {}
    for bit, est in estimates.items():
        r = r_by_bit[bit]
        d_theory = theoretical_distinguishability(r) if has_distinguishability(r) else None
        per_bit[str(bit)] = {
            "r_nominal": r,
            "d": _estimate_dict(est.d),
            "d1": _estimate_dict(est.d1),
            "d2": _estimate_dict(est.d2),
            "d_theory": d_theory,
        }
        if d_theory is None:
            logger.warning("R = %.4f > %.1f: no distinguishability reference for bit %d",
                           r, MAX_DISTINGUISHABLE_R, bit)
            continue
        ctx.manifest.flags[f"distinguishability_consistent_bit{bit}"] = _consistent(
            est.d.value, d_theory, est.d.error
        )
    return {"blocked_path": per_bit}


def _run_alpha(ctx: _Context) -> dict:
    cfg = ctx.cfg
    log = run_alpha_measurement(cfg, workers=ctx.workers, progress=ctx.progress)
    ctx.persist(log, EVENT_LOG)

    counts, alpha = analyze_alpha(log, cfg.detector)
    ctx.manifest.flags["sub_poissonian"] = bool(alpha.value + N_SIGMA * alpha.error < 1.0)
    return {
        "alpha": _estimate_dict(alpha),
        "alpha_theory": theoretical_alpha(cfg.emission),
        "alpha_gated_theory": gated_alpha(cfg.emission, cfg.detector.efficiency),
        "n1": counts.n1,
        "n2": counts.n2,
        "n_coinc": counts.n_coinc,
        "n_triggers": counts.n_triggers,
    }


def _run_duality_sweep(ctx: _Context) -> dict:
    cfg = ctx.cfg
    points = []
    voltages = ctx.scenario.sweep_voltages()

    for i, v_eom in enumerate(tqdm(voltages, desc="sweep", disable=not ctx.progress)):
        point_cfg = cfg.replace(
            optics=cfg.optics.model_copy(update={"v_eom": v_eom}),
            seed=derived_seed(cfg.seed, _SWEEP_STREAM, i),
        )
        tag = f"_point{i:02d}"
        fringe = _fringe_scan(ctx, point_cfg, tag=tag)
        blocked = _blocked_runs(ctx, point_cfg, tag=tag)

        # The R configuration is the EOM-on subset
        bit = 1 if 1 in fringe["analyses"] and 1 in blocked else 0
        fit = fringe["analyses"][bit].fit
        v = Estimate(fit.visibility, fit.visibility_error)
        result = complementarity_statistic(v, blocked[bit].d,
                                           r_nominal=fringe["r_by_bit"][bit])
        logger.info("V_EOM = %.1f V, R = %.4f: V^2 + D^2 = %s",
                    v_eom, result.r_nominal, result.s)
        points.append((v_eom, result))

    table = sweep_table(points, xi=cfg.optics.xi)
    write_table(table, ctx.output(SWEEP_CSV))

    results = [r for _, r in points]
    mean_s = mean_statistic(results)
    ctx.manifest.flags["duality_bound_respected"] = all(r.within_bound(N_SIGMA) for r in results)
    return {
        "points": [
            {"v_eom": v, "r_nominal": r.r_nominal, "v": _estimate_dict(r.v),
             "d": _estimate_dict(r.d), "s": _estimate_dict(r.s), "passed": r.passed}
            for v, r in points
        ],
        "mean_s": _estimate_dict(mean_s),
    }


def _run_causality_check(ctx: _Context) -> dict:
    report = verify_delayed_choice_geometry(ctx.cfg.geometry)
    logger.info("Choice event %s, margin %.2f ns", report.separation.value, report.margin_ns)
    ctx.manifest.flags["spacelike"] = bool(report.passed)
    return {
        "separation": report.separation.value,
        "margin_ns": report.margin_ns,
        "choice_precedes_arrival": report.choice_precedes_arrival,
    }


def _run_choice_comparison(ctx: _Context) -> dict:
    delayed_cfg = ctx.cfg.replace(choice_mode="qrng", delayed_choice=True)
    normal_cfg = ctx.cfg.replace(
        choice_mode="fixed", fixed_choice_bit=1, delayed_choice=False,
        seed=derived_seed(ctx.cfg.seed, _NORMAL_CHOICE_STREAM),
    )
    delayed = _fringe_scan(ctx, delayed_cfg, tag="_delayed")
    normal = _fringe_scan(ctx, normal_cfg, tag="_normal")

    fit_d = delayed["analyses"][1].fit
    fit_n = normal["analyses"][1].fit
    combined = float(np.hypot(fit_d.visibility_error, fit_n.visibility_error))
    ctx.manifest.flags["normal_and_delayed_agree"] = _consistent(
        fit_d.visibility, fit_n.visibility, combined
    )
    return {
        "delayed": delayed["choice_bits"],
        "normal": normal["choice_bits"],
        "visibility_difference": {"value": fit_d.visibility - fit_n.visibility,
                                  "error": combined},
    }


RUNNERS = {
    "fringe_scan": _run_fringe_scan,
    "blocked_path": _run_blocked_path,
    "alpha": _run_alpha,
    "duality_sweep": _run_duality_sweep,
    "causality_check": _run_causality_check,
    "choice_comparison": _run_choice_comparison,
}


# -----------------------------
# Public API
# -----------------------------
def execute(scenario: Scenario, output_dir: Path, workers: int = 1,
            progress: bool = False, persist_logs: bool = True) -> RunManifest:
    """
    Runs one scenario end to end.

    Parameters
    ----------
    scenario : Scenario
        Validated scenario.
    output_dir : Path
        Results go to output_dir / scenario.name.

    Returns
    -------
    RunManifest
        Outputs written and the scientific pass flags.
    """
    if not reference_geometry_consistent():
        logger.warning("Reference geometry: 48 m / c disagrees with 160 ns")

    manifest = RunManifest(
        scenario=scenario.name,
        kind=scenario.kind,
        scenario_digest=config_digest(scenario),
        seed=scenario.run_config.seed,
        started_at=datetime.now(timezone.utc).isoformat(),
    )
    ctx = _Context(
        scenario=scenario,
        output_dir=Path(output_dir) / scenario.name,
        workers=workers,
        progress=progress,
        persist_logs=persist_logs,
        manifest=manifest,
    )
    ctx.output_dir.mkdir(parents=True, exist_ok=True)

    logger.info("Running scenario '%s' (%s), digest %s",
                scenario.name, scenario.kind, manifest.scenario_digest)
    results = RUNNERS[scenario.kind](ctx)

    summary = {
        "scenario": scenario.name,
        "kind": scenario.kind,
        "scenario_digest": manifest.scenario_digest,
        "seed": manifest.seed,
        "results": results,
        "flags": dict(manifest.flags),
        "passed": manifest.passed,
    }
    write_summary(summary, ctx.output(SUMMARY_JSON))

    manifest.finished_at = datetime.now(timezone.utc).isoformat()
    manifest.outputs.append(MANIFEST_JSON)
    (ctx.output_dir / MANIFEST_JSON).write_text(
        json.dumps({**asdict(manifest), "passed": manifest.passed}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    logger.info("Scenario '%s' %s", scenario.name, "PASSED" if manifest.passed else "FAILED")
    return manifest
