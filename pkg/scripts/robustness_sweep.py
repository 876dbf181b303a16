"""Static per-ion intensity fluctuations on the N=6, m=2 Dicke stage.

    python scripts/robustness_sweep.py --fluctuation 0.1 --samples 100 --window 5
"""

import argparse
import json
import os

from dickeprep.propagator import IntegratorConfig
from dickeprep.protocol import sweep_intensity
from dickeprep.pulse import PulseParams

parser = argparse.ArgumentParser()
parser.add_argument("--ions", type=int, default=6)
parser.add_argument("--excitations", type=int, default=2)
parser.add_argument("--fluctuation", type=float, default=0.1)
parser.add_argument("--samples", type=int, default=100)
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("--window", type=float, nargs="+", default=[5.0, 10.0])
parser.add_argument("--jobs", type=int, default=os.cpu_count())
args = parser.parse_args()

for w in args.window:
    res = sweep_intensity(
        args.ions,
        args.excitations,
        PulseParams(10.0, 6.0, window_halfwidth=w),
        args.fluctuation,
        args.samples,
        seed=args.seed,
        cfg=IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12, trace_samples=2),
        jobs=args.jobs,
    )
    print(f"half-width {w} T:", json.dumps(res.summary))
