"""Relative action drift of a GHO under a smooth ramp, as a function of ramp time.

    python scripts/adiabatic_drift.py --start 1,0,1 --end 2,0,1 --times 250 1000 4000
"""

import argparse

from adiageo.models import GHO, gho_point
from adiageo.oracle import RampSchedule, adiabatic_action_drift


def _point(text):
    return gho_point(*(float(v) for v in text.split(",")))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--start", type=_point, default="1,0,1", help="X,Y,Z at t = 0")
    ap.add_argument("--end", type=_point, default="2,0,1", help="X,Y,Z at t = T")
    ap.add_argument("--times", type=float, nargs="+", default=[250.0, 1000.0, 4000.0])
    ap.add_argument("--action", type=float, default=1.0)
    ap.add_argument("--angle", type=float, default=0.3)
    ap.add_argument("--steps-per-period", type=int, default=200)
    args = ap.parse_args()
    initial = GHO.phase_map(args.angle, args.action, args.start)
    print("T,drift")
    for T in args.times:
        d = adiabatic_action_drift(GHO, RampSchedule(args.start, args.end, T), initial, args.steps_per_period)
        print(f"{T:g},{d:.6e}")


if __name__ == "__main__":
    main()
