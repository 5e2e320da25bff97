#!/usr/bin/env python3
"""Every structural identity the engine promises, measured on one run.

For the hyperbolic-cylinder potential this script prints the whole
verification report: Dirac system residuals, conformality, mean curvature
1/2 on the Minkowski side, minimality structure equations on the Heisenberg
side, para-holomorphy of the quadratic differential (with its value -1/16),
flatness of the spectral connection family, and the potential round trip.
Thresholds match the shipped acceptance suite; FD-based checks also report
their noise floor.
"""

import json

import numpy as np

from nilweier import Pipeline, translate_potential
from nilweier.verify import run_verification

pot = translate_potential("1", "0", "-0.0625", "0")
pipe = Pipeline(
    pot,
    np.linspace(-1.5, 1.5, 16 * 2 + 1),
    np.linspace(-1.5, 1.5, 16 * 2 + 1),
    trunc_n=20,
    steps_per_cell=8,
    thetas=(0.0, 0.1),
).run()

report = run_verification(pipe, oracle="hyperbolic-cylinder")
for check in report["checks"]:
    status = "pass" if check["pass"] else "FAIL"
    floor = f"  (noise floor {check['noise_floor']:.1e})" if "noise_floor" in check else ""
    print(f"[{status}] {check['check']:45s} {check['value']:.3e} <= {check['threshold']:.1e}{floor}")
print("\noverall:", "PASS" if report["passed"] else "FAIL")
print("tail mass (relative):", report["tail_relative"])
print("worst factorization conditioning:", report["max_conditioning"])
print("\nfull report as JSON:")
print(json.dumps(report, indent=2)[:400], "...")
