#!/usr/bin/env python3
"""Run every shipped scenario and collect the reports under out/."""

import os
import sys

from nilmax.cli import main

SCENARIOS = (
    "heisenberg_identity_suite",
    "scenario_A_slab",
    "scenario_A_slab_p3",
    "scenario_A_stack",
    "scenario_B_nikodym",
)


def run() -> int:
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    out = os.environ.get("NILMAX_OUT", os.path.join(root, "out"))
    worst = 0
    for name in SCENARIOS:
        path = os.path.join(root, "scenarios", name + ".toml")
        print(f"== {name}")
        code = main(["run", path, "--out", os.path.join(out, name)])
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(run())
