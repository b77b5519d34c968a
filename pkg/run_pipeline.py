"""
Master Pipeline Script
Runs every scenario in configs/ in turn:
1. Causality check of the delayed-choice geometry
2. Fringe scans, blocked-path runs and the alpha measurement
3. The V^2 + D^2 sweep over the EOM voltage

Stops at the first scenario whose pass flags fail.
"""

import logging
import os
import sys
from pathlib import Path

from qo_runner.execute import execute
from qo_runner.scenario import load_config

# Causality first: nothing else is meaningful if the geometry is time-like
ORDER = [
    "causality_check",
    "fringe_scan",
    "blocked_path",
    "alpha",
    "choice_comparison",
    "duality_sweep",
]

project_root = Path(__file__).parent
config_dir = project_root / "configs"
output_dir = Path(os.environ.get("QO_OUTPUT_DIR", project_root / "output"))

logging.basicConfig(
    level=logging.WARNING,
    format="%(asctime)s [%(levelname)s] [%(name)s] %(message)s",
)

configs = sorted(
    config_dir.glob("*.json"),
    key=lambda p: (ORDER.index(p.stem) if p.stem in ORDER else len(ORDER), p.stem),
)

print("=" * 70)
print("DELAYED-CHOICE COMPLEMENTARITY - SIMULATION PIPELINE")
print("=" * 70)

written = []
for step, config_path in enumerate(configs, start=1):
    print(f"\n[STEP {step}/{len(configs)}] Running {config_path.name}...")
    print("-" * 70)
    try:
        scenario = load_config(config_path)
        manifest = execute(scenario, output_dir, progress=True)
    except Exception as e:
        print(f"Error in {config_path.name}: {e}")
        import traceback
        traceback.print_exc()
        sys.exit(2)

    for flag, ok in sorted(manifest.flags.items()):
        print(f"  {'✓' if ok else '✗'} {flag}")
    if not manifest.passed:
        print(f"\nScenario '{scenario.name}' FAILED")
        sys.exit(1)
    written.extend(f"{scenario.name}/{name}" for name in manifest.outputs)

print("\n" + "=" * 70)
print("PIPELINE COMPLETED SUCCESSFULLY!")
print("=" * 70)
print(f"\nGenerated files in {output_dir.as_posix()}:")
for name in written:
    print(f"  ✓ {name}")
print("=" * 70)
