"""Acceptance criteria, one test each.

Every criterion prints a single ``PASS``/``FAIL`` line. Run directly with
``python tests/test_acceptance.py`` for the report alone.
"""

import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from adiageo.geometry import matrix_rank, restrict_metric
from adiageo.models import GHO, GHOLIN, gho_point, omega
from adiageo.oracle import (GaugeShift, RampSchedule, adiabatic_action_drift,
                            gauge_invariance_experiment, generator_displacement_check, numeric_metric)
from adiageo.quantum import (QuantumLevel, energy_expectation, gho_berry, gho_quantum_metric,
                             gholin_berry, gholin_quantum_metric, identification_table,
                             operator_metric_and_connection, quantum_metric_numeric, quartic_ground_state,
                             quartic_point, quartic_quantum_metric_closed)
from adiageo.series import pipeline_dump, quartic_pipeline
from adiageo.verify import random_action, random_gho, random_gholin

GOLDEN = Path(__file__).parent / "golden"
SEED = 20240611


def _gap(a, b):
    diff = np.asarray(a, dtype=object) - np.asarray(b, dtype=object)
    return max(abs(Fraction(v)) for v in diff.ravel())


def criterion_1():
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        I, x = random_action(rng), random_gho(rng)
        worst = max(worst, float(np.abs(numeric_metric(GHO, I, x, 64).as_float()
                                        - GHO.metric_closed(I, x).as_float()).max()))
    g11 = GHO.metric_closed(1, gho_point(1, 0, 1))[0, 0]
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-13 and g11 == Fraction(1, 32) and elapsed < 1.0
    return ok, f"max err {worst:.2e} <= 1e-13, g11 = {g11}, {elapsed:.2f} s < 1 s"


def criterion_2():
    rng = np.random.default_rng(SEED + 2)
    worst = Fraction(0)
    for _ in range(10):
        x, xl = random_gho(rng, exact=True), random_gholin(rng, exact=True)
        I = random_action(rng, exact=True)
        hbar = Fraction(int(rng.integers(1, 21)), 10)
        for n in range(6):
            lvl = QuantumLevel(n, hbar)
            gamma = Fraction(n * n + n + 1) / I**2
            worst = max(worst, _gap(gho_quantum_metric(lvl, x).components,
                                    gamma * GHO.metric_closed(I, x).components))
            A_c, F_c = GHO.hannay(I, x)
            A_q, F_q = gho_berry(lvl, x)
            beta = lvl.c / I
            worst = max(worst, _gap(A_q.components, beta * A_c.components),
                        _gap(F_q.components, beta * F_c.components))
            # GHO+linear: the quantum objects mix two I-powers; they match at I = (n+1/2) hbar
            In = lvl.bohr_sommerfeld_action
            A_c, F_c = GHOLIN.hannay(In, xl)
            A_q, F_q = gholin_berry(lvl, xl)
            beta = lvl.c / In
            worst = max(worst, _gap(A_q.components, beta * A_c.components),
                        _gap(F_q.components, beta * F_c.components))
            # metric: the GHO block scales with gamma, the remainder with 1/hbar^2, at I = In
            pad = np.zeros((4, 4), dtype=object)
            pad[1:, 1:] = GHO.metric_closed(In, gho_point(xl["X"], xl["Y"], xl["Z"])).components
            rest = GHOLIN.metric_closed(In, xl).components - pad
            g_q = gholin_quantum_metric(lvl, xl).components
            worst = max(worst, _gap(g_q, Fraction(n * n + n + 1) / In**2 * pad + rest / hbar**2))
    return worst == 0, f"max exact gap {worst} == 0 (n = 0..5, both models)"


def criterion_3():
    rng = np.random.default_rng(SEED + 3)
    bad_rank, det_err = 0, 0.0
    for _ in range(50):
        I = random_action(rng)
        x, xl = random_gho(rng), random_gholin(rng)
        g, gl = GHO.metric_closed(I, x), GHOLIN.metric_closed(I, xl)
        bad_rank += (matrix_rank(g) != 2) + (matrix_rank(gl) != 3)
        w = omega(x)
        ref = x["Z"] ** 2 * I**4 / (256 * w**6)
        det_err = max(det_err, abs(restrict_metric(g, [0, 1]).determinant() - ref) / ref)
        w, W, Z = omega(xl), xl["W"], xl["Z"]
        ref = Z**3 * I**4 * (I * w**3 + 8 * W**2 * Z) / (256 * w**12)
        det_err = max(det_err, abs(restrict_metric(gl, [0, 1, 2]).determinant() - ref) / ref)
    return bad_rank == 0 and det_err <= 1e-10, f"{bad_rank} wrong ranks, det rel err {det_err:.2e} <= 1e-10"


def criterion_4():
    rng = np.random.default_rng(SEED + 4)
    metric_dev, raw_ok = 0.0, True
    for _ in range(20):
        shift = GaugeShift(float(rng.uniform(-2, 2)), float(rng.choice([-1, 1]) * rng.uniform(0.1, 2.0)),
                           str(rng.choice(["X", "Y", "Z"])))
        I = random_action(rng)
        for model, x in ((GHO, random_gho(rng)), (GHOLIN, random_gholin(rng))):
            md, rd = gauge_invariance_experiment(model, shift, I, x)
            metric_dev = max(metric_dev, md)
            raw_ok &= rd > 1e-3
    return metric_dev <= 1e-10 and raw_ok, f"metric dev {metric_dev:.2e} <= 1e-10, raw change > 1e-3: {raw_ok}"


def criterion_5():
    quartic_pipeline.cache_clear()
    t0 = time.perf_counter()
    same = {t: pipeline_dump(t).encode() == (GOLDEN / f"{t}.json").read_bytes() for t in ("W", "G", "metric")}
    elapsed = time.perf_counter() - t0
    return all(same.values()) and elapsed < 1.0, f"golden bytes equal {same}, {elapsed:.2f} s < 1 s"


def criterion_6():
    worst_g = worst_e = worst_r = 0.0
    for lam in (0.0, 0.005, 0.01):
        x = quartic_point(1.0, 1.0, lam)
        sampler, E = quartic_ground_state(x, 1.0)
        g = quantum_metric_numeric(sampler, x, 1.0).as_float()
        worst_g = max(worst_g, float(np.abs(g - quartic_quantum_metric_closed(x).as_float()).max()))
        printed = 0.5 + lam / 32 - 7 * lam**2 / 1536 + 37 * lam**3 / 24576
        worst_e = max(worst_e, abs(E - printed))
        # the energy also has to be the expectation value of H in the sampled state
        V = lambda q, lam=lam: 0.5 * q * q + lam * q**4 / 24
        worst_r = max(worst_r, abs(energy_expectation(sampler, x, 1.0, 1.0, V) - E))
    ok = worst_g <= 1e-5 and worst_e <= 1e-12 and worst_r <= 1e-9
    return ok, (f"metric err {worst_g:.2e} <= 1e-5, energy err {worst_e:.2e} <= 1e-12, "
                f"<H> err {worst_r:.2e} <= 1e-9")


def criterion_7():
    rows = identification_table()
    by_power = {}
    for r in rows:
        by_power.setdefault(r.power, []).append(r.ratio)
    ok = (set(by_power[2]) == {1} and set(by_power[3]) == {Fraction(3, 2)}
          and by_power[6] == [Fraction(1030086, 130621)]
          and len(by_power[4]) == 6 and all(Fraction(239, 100) <= r <= Fraction(252, 100) for r in by_power[4])
          and len(by_power[5]) == 3 and all(Fraction(417, 100) <= r <= Fraction(436, 100) for r in by_power[5]))
    spread = lambda p: f"[{float(min(by_power[p])):.3f}, {float(max(by_power[p])):.3f}]"
    return ok, f"I^4 ratios in {spread(4)}, I^5 ratios in {spread(5)}, I^6 = {by_power[6][0]}"


def criterion_8():
    rng = np.random.default_rng(SEED + 8)
    worst = {}
    for model, make in ((GHO, random_gho), (GHOLIN, random_gholin)):
        worst[model.name] = max(generator_displacement_check(model, float(rng.uniform(0, 2 * np.pi)),
                                                             random_action(rng), make(rng))
                                for _ in range(100))
    ok = all(v < 1e-6 for v in worst.values())
    return ok, ", ".join(f"{k} max err {v:.2e}" for k, v in worst.items()) + " < 1e-6"


def criterion_9():
    t0 = time.perf_counter()
    start, end = gho_point(1.0, 0.0, 1.0), gho_point(2.0, 0.0, 1.0)
    initial = GHO.phase_map(0.3, 1.0, start)
    drift = {T: adiabatic_action_drift(GHO, RampSchedule(start, end, T), initial) for T in (250.0, 1000.0, 4000.0)}
    elapsed = time.perf_counter() - t0
    ok = drift[1000.0] < 1e-2 and drift[250.0] > drift[1000.0] > drift[4000.0] and elapsed < 30
    detail = ", ".join(f"T={T:g}: {d:.2e}" for T, d in drift.items())
    return ok, f"{detail}; {elapsed:.1f} s < 30 s"


def criterion_10():
    rng = np.random.default_rng(SEED + 10)
    worst = Fraction(0)
    for _ in range(100):
        xl = random_gholin(rng, exact=True)
        lvl = QuantumLevel(int(rng.integers(0, 6)), Fraction(int(rng.integers(1, 21)), 10))
        g, A = operator_metric_and_connection(lvl, xl)
        worst = max(worst, _gap(g.components, gholin_quantum_metric(lvl, xl).components),
                    _gap(A.components, gholin_berry(lvl, xl)[0].components))
    return worst == 0, f"max exact gap {worst} == 0 on 100 points"


CRITERIA = {
    1: ("GHO exactness", criterion_1),
    2: ("gamma/beta relations", criterion_2),
    3: ("rank and determinant", criterion_3),
    4: ("gauge invariance", criterion_4),
    5: ("quartic series, classical", criterion_5),
    6: ("quartic series, quantum", criterion_6),
    7: ("identification table", criterion_7),
    8: ("generator property", criterion_8),
    9: ("adiabatic invariance", criterion_9),
    10: ("operator formulation", criterion_10),
}


def report(number):
    name, fn = CRITERIA[number]
    ok, detail = fn()
    return ok, f"{'PASS' if ok else 'FAIL'} criterion {number} ({name}): {detail}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = report(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [report(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
