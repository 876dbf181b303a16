"""Stage-2 fidelity over a grid of (Omega0 T, Delta0 T), with the adiabaticity margins.

    python scripts/plateau_map.py --ions 6 --excitations 2 > plateau.csv
"""

import argparse
import sys

import numpy as np

from dickeprep.propagator import IntegratorConfig
from dickeprep.protocol import run_stage2
from dickeprep.pulse import PulseParams, adiabaticity_margins

parser = argparse.ArgumentParser()
parser.add_argument("--ions", type=int, default=6)
parser.add_argument("--excitations", type=int, default=2)
parser.add_argument("--omega", type=float, nargs="+", default=list(np.arange(2.0, 16.1, 2.0)))
parser.add_argument("--delta", type=float, nargs="+", default=list(np.arange(0.0, 12.1, 2.0)))
parser.add_argument("--epsilon", type=float, default=1e-4)
args = parser.parse_args()

cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12, trace_samples=2)
print("omega0_T,delta0_T,fidelity,coupling_ratio,chirp_ratio")
for om in args.omega:
    for de in args.delta:
        pulse = PulseParams(float(om), float(de))
        f = run_stage2(args.ions, args.excitations, pulse, cfg).final_fidelity
        mg = adiabaticity_margins(pulse, args.excitations, args.ions, args.epsilon)
        print(f"{om},{de},{f!r},{mg.coupling_ratio!r},{mg.chirp_ratio!r}")
        sys.stdout.flush()
