#!/usr/bin/env python3
"""Record the committed replay cassette for the 10-item demo run.

The cassette under tests/cassettes/demo10/ backs the replay-determinism
tests: they re-run experiment 1.1 over tests/data/demo10.tsv in replay mode
and must reproduce a byte-identical report without any backend. Re-run this
script only when prompt templates or the demo dataset change, and commit the
refreshed cassette files.

Run from the repo root: python3 scripts/record_demo_cassette.py
"""

from __future__ import annotations

import shutil
from pathlib import Path

from themfit import ExperimentConfig, Gateway, NormEchoBackend, load_dataset, preprocess
from themfit.runner import run_experiment

ROOT = Path(__file__).resolve().parent.parent
CASSETTE_DIR = ROOT / "tests" / "cassettes" / "demo10"
DATASET = ROOT / "tests" / "data" / "demo10.tsv"


def main() -> None:
    if CASSETTE_DIR.exists():
        shutil.rmtree(CASSETTE_DIR)
    dataset = preprocess(load_dataset(DATASET))
    # propbank_prefix=True matches the CLI's auto default for ArgN datasets.
    cfg = ExperimentConfig.from_id("1.1", propbank_prefix=True)
    gateway = Gateway(
        "record", backend=NormEchoBackend(dataset), cassette_dir=CASSETTE_DIR
    )
    result, manifest = run_experiment(cfg, dataset, gateway)
    files = sorted(CASSETTE_DIR.glob("*.json"))
    print(f"recorded {len(files)} cassette entries under {CASSETTE_DIR}")
    print(f"rho={result.rho:.6f} scored={manifest.totals.scored}")


if __name__ == "__main__":
    main()
