"""Render the golden series dumps from the transcribed reference tables.

    python scripts/render_golden.py [outdir]
"""

import argparse
from pathlib import Path

from adiageo.reference import printed_named
from adiageo.series import dump_json


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default=Path(__file__).parents[1] / "tests" / "golden", type=Path)
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for target in ("W", "G", "metric"):
        path = args.outdir / f"{target}.json"
        path.write_text(dump_json(printed_named(target)))
        print(path)


if __name__ == "__main__":
    main()
