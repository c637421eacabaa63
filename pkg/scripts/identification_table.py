"""Print the classical/quantum coefficient ratios of the quartic-oscillator metric.

Each row gives ``r`` in ``I^p = r hbar^p`` for one coefficient.

    python scripts/identification_table.py
"""

import argparse

from adiageo.quantum import identification_table


def main():
    argparse.ArgumentParser(description=__doc__.splitlines()[0]).parse_args()
    print("component,order,power,ratio,decimal")
    for r in identification_table():
        print(f"g{r.component[0]}{r.component[1]},{r.order},{r.power},{r.ratio},{float(r.ratio):.6f}")


if __name__ == "__main__":
    main()
