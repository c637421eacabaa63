"""Compare the quartic-oscillator series metrics with their sampled oracles over a coupling sweep.

    python scripts/quartic_compare.py --lam 0 0.005 0.01 0.02
"""

import argparse

import numpy as np

from adiageo.oracle import QUARTIC, numeric_metric
from adiageo.quantum import quantum_metric_numeric, quartic_ground_state, quartic_point, \
    quartic_quantum_metric_closed
from adiageo.series import quartic_pipeline


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, nargs="+", default=[0.0, 0.005, 0.01, 0.02])
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--k", type=float, default=1.0)
    ap.add_argument("--action", type=float, default=1.0)
    ap.add_argument("--hbar", type=float, default=1.0)
    args = ap.parse_args()
    series = quartic_pipeline(3)
    print("lam,classical_err,quantum_err,classical_g11,quantum_g11")
    for lam in args.lam:
        x = quartic_point(args.m, args.k, lam)
        gc = series.metric_matrix(args.action, args.m, args.k, lam)
        ec = np.abs(numeric_metric(QUARTIC, args.action, x).as_float() - gc).max()
        sampler, _ = quartic_ground_state(x, args.hbar)
        gq = quartic_quantum_metric_closed(x, args.hbar).as_float()
        eq = np.abs(quantum_metric_numeric(sampler, x, args.hbar).as_float() - gq).max()
        print(f"{lam:g},{ec:.3e},{eq:.3e},{gc[0, 0]:.12e},{gq[0, 0]:.12e}")


if __name__ == "__main__":
    main()
