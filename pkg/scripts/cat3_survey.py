#!/usr/bin/env python3
"""Full diagnostic survey of the tribonacci automorphism.

Runs the shipped cat3 config and prints the headline numbers: Lyapunov
spectrum, second-order decay slope, exponent margins, involutivity and
holonomy verdicts. Writes the versioned report under runs/cat3 (or
$SPLITLAB_OUT/runs/cat3).
"""

import json
from pathlib import Path

from splitlab.cli import run_analysis
from splitlab.reporting import RunConfig

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "cat3.toml"


def main():
    cfg = RunConfig.from_toml(CONFIG)
    out = run_analysis(cfg, quiet=False)
    report = json.loads((out / "report.json").read_text())
    pt = report["points"][0]
    print("\n== cat3 survey ==")
    print("lyapunov exponents:", [round(v, 6) for v in pt["lyapunov"]["exponents"]])
    print("second-order slope (fwd):", round(pt["second_order"]["fwd_slope"], 6),
          "verdict:", pt["second_order"]["verdict"])
    print("exponent margins:", pt["exponent_margins"]["margins"])
    print("bracket max defect:", pt["brackets"]["max_defect"])
    print("holonomy verdict:", pt["holonomy"]["fit"]["verdict"])
    print("predicted conclusion:", report["summary"]["predicted_conclusion"])


if __name__ == "__main__":
    main()
