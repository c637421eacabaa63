"""Named verification suites: each check reports a measured value against a bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .geometry import curvature_from_phase_space_derivatives, matrix_rank, restrict_metric
from .models import GHO, GHOLIN, gho_point, gholin_point, omega
from .oracle import (QUARTIC, QUARTIC_H, GaugeShift, RampSchedule, adiabatic_action_drift,
                     gauge_invariance_experiment, generator_displacement_check,
                     numeric_action_of_energy, numeric_metric, phase_space_derivatives,
                     poisson_curvature)
from .quantum import (QuantumLevel, energy_expectation, gho_berry, gho_quantum_metric,
                      gho_wavefunction, gholin_berry, gholin_quantum_metric,
                      operator_metric_and_connection, quantum_metric_numeric, quartic_ground_state,
                      quartic_point, quartic_quantum_metric_closed)
from .reference import FIRST_ORDER_ENERGY, printed_G, printed_metric, printed_named, printed_W
from .series import dump_json, pipeline_dump, quartic_pipeline

SEED = 20240611


@dataclass(frozen=True)
class Check:
    """``value <relation> bound``; relation is one of ``<=``, ``>``, ``==``."""

    suite: str
    name: str
    value: float
    bound: float
    relation: str = "<="

    @property
    def passed(self) -> bool:
        v = self.value
        if isinstance(v, float) and math.isnan(v):
            return False
        if self.relation == "<=":
            return v <= self.bound
        if self.relation == ">":
            return v > self.bound
        if self.relation == "==":
            return v == self.bound
        raise ValueError(self.relation)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.suite}/{self.name}: {float(self.value):.3e} {self.relation} {float(self.bound):.3e}"


# --- random points ------------------------------------------------------------

def random_gho_values(rng: np.random.Generator, exact: bool = False) -> tuple:
    """``(X, Y, Z)`` with ``w`` drawn directly so the domain always holds.

    The box keeps phase-space amplitudes O(1..10) so absolute finite-difference
    tolerances stay meaningful.
    """
    if exact:
        Y = Fraction(int(rng.integers(-9, 10)), 10)
        Z = Fraction(int(rng.integers(4, 21)), 10)
        w = Fraction(int(rng.integers(7, 21)), 10)
    else:
        Y, Z, w = rng.uniform(-0.8, 0.8), rng.uniform(0.4, 2.0), rng.uniform(0.7, 2.0)
    return ((w * w + Y * Y) / Z, Y, Z)


def random_gho(rng, exact=False):
    return gho_point(*random_gho_values(rng, exact))


def random_gholin(rng, exact=False, min_abs_w=0.1):
    if exact:
        W = Fraction(int(rng.choice([-1, 1]) * rng.integers(1, 21)), 10)
    else:
        W = float(rng.choice([-1, 1]) * rng.uniform(min_abs_w, 1.5))
    return gholin_point(W, *random_gho_values(rng, exact))


def random_action(rng, exact=False):
    return Fraction(int(rng.integers(1, 31)), 10) if exact else float(rng.uniform(0.3, 2.0))


# --- suites -------------------------------------------------------------------

def suite_gauge(rng) -> list[Check]:
    metric_dev, raw_dev = 0.0, math.inf
    for _ in range(20):
        shift = GaugeShift(float(rng.uniform(-2, 2)),
                           float(rng.choice([-1, 1]) * rng.uniform(0.1, 2.0)), "X")
        I = random_action(rng)
        for model, point in ((GHO, random_gho(rng)), (GHOLIN, random_gholin(rng))):
            md, rd = gauge_invariance_experiment(model, shift, I, point)
            metric_dev = max(metric_dev, md)
            raw_dev = min(raw_dev, rd)
    zero = gauge_invariance_experiment(GHO, GaugeShift(), 1.0, gho_point(1.0, 0.0, 1.0))
    return [
        Check("gauge", "metric deviation, 20 shifts x 2 models", metric_dev, 1e-10),
        Check("gauge", "smallest raw <GG> change", raw_dev, 1e-3, ">"),
        Check("gauge", "zero shift", max(zero), 0.0, "=="),
    ]


def suite_generators(rng) -> list[Check]:
    out = []
    for model, make in ((GHO, random_gho), (GHOLIN, random_gholin)):
        worst = 0.0
        for _ in range(100):
            worst = max(worst, generator_displacement_check(
                model, float(rng.uniform(0, 2 * np.pi)), random_action(rng), make(rng)))
        out.append(Check("generators", f"{model.name} displacement, 100 points", worst, 1e-6))
    return out


def _exact_gap(a, b) -> Fraction:
    """Largest entrywise ``|a - b|`` for object arrays of Fractions."""
    diff = np.asarray(a, dtype=object) - np.asarray(b, dtype=object)
    return max((abs(Fraction(v)) for v in diff.ravel()), default=Fraction(0))


def _dn(f: Callable[[int], np.ndarray], n: int):
    """Exact ``d/dn`` of a quadratic in ``n`` from three forward points."""
    return (-3 * f(n) + 4 * f(n + 1) - f(n + 2)) / 2


def _dI(f: Callable[[Fraction], np.ndarray], I: Fraction):
    """Exact ``d/dI`` of a quadratic in ``I`` by a central difference."""
    return (f(I + 1) - f(I - 1)) / 2


def suite_gamma_beta(rng) -> list[Check]:
    gamma = beta_gho = beta_lin = Fraction(0)
    rel2 = {"gho": Fraction(0), "gholin": Fraction(0)}
    for _ in range(10):
        x, xl = random_gho(rng, exact=True), random_gholin(rng, exact=True)
        I = random_action(rng, exact=True)
        hbar = Fraction(int(rng.integers(1, 21)), 10)
        for n in range(6):
            lvl = QuantumLevel(n, hbar)
            g_q = gho_quantum_metric(lvl, x).components
            g_c = GHO.metric_closed(I, x).components
            gamma = max(gamma, _exact_gap(g_q, Fraction(n * n + n + 1) / I**2 * g_c))
            A_c, F_c = GHO.hannay(I, x)
            A_q, F_q = gho_berry(lvl, x)
            b = lvl.c / I
            beta_gho = max(beta_gho, _exact_gap(A_q.components, b * A_c.components),
                           _exact_gap(F_q.components, b * F_c.components))
            # GHO+linear: I fixed by the quantization rule, beta = 1/hbar
            In = lvl.bohr_sommerfeld_action
            A_c, F_c = GHOLIN.hannay(In, xl)
            A_q, F_q = gholin_berry(lvl, xl)
            beta_lin = max(beta_lin, _exact_gap(A_q.components, A_c.components / hbar),
                           _exact_gap(F_q.components, F_c.components / hbar))
            for model, pt, qm in ((GHO, x, gho_quantum_metric),
                                  (GHOLIN, xl, gholin_quantum_metric)):
                lhs = _dn(lambda k: qm(QuantumLevel(k, hbar), pt).components, n)
                rhs = _dI(lambda J: model.metric_closed(J, pt).components, In) / hbar
                rel2[model.name] = max(rel2[model.name], _exact_gap(lhs, rhs))
    operator = Fraction(0)
    for _ in range(100):
        xl = random_gholin(rng, exact=True)
        lvl = QuantumLevel(int(rng.integers(0, 6)), Fraction(int(rng.integers(1, 21)), 10))
        g_op, A_op = operator_metric_and_connection(lvl, xl)
        operator = max(operator, _exact_gap(g_op.components, gholin_quantum_metric(lvl, xl).components),
                       _exact_gap(A_op.components, gholin_berry(lvl, xl)[0].components))
    return [
        Check("gamma-beta", "gho metric = (n^2+n+1)/I^2 g, n=0..5", gamma, 0, "=="),
        Check("gamma-beta", "gho Berry = (n+1/2)/I Hannay", beta_gho, 0, "=="),
        Check("gamma-beta", "gholin Berry = Hannay/hbar at I=(n+1/2)hbar", beta_lin, 0, "=="),
        Check("gamma-beta", "gho d_n g(n) = d_I g / hbar", rel2["gho"], 0, "=="),
        Check("gamma-beta", "gholin d_n g(n) = d_I g / hbar", rel2["gholin"], 0, "=="),
        Check("gamma-beta", "operator form = closed form, 100 points", operator, 0, "=="),
    ]


def gho_restricted_det(I, x):
    w = omega(x)
    return x["Z"] ** 2 * I**4 / (256 * w**6)


def gholin_restricted_det(I, x):
    w = omega(x)
    W, Z = x["W"], x["Z"]
    return Z**3 * I**4 * (I * w**3 + 8 * W**2 * Z) / (256 * w**12)


def suite_rank_det(rng) -> list[Check]:
    bad_rank = [0, 0]
    det_err = [0.0, 0.0]
    for _ in range(50):
        I = random_action(rng)
        x, xl = random_gho(rng), random_gholin(rng)
        g, gl = GHO.metric_closed(I, x), GHOLIN.metric_closed(I, xl)
        bad_rank[0] += matrix_rank(g) != 2
        bad_rank[1] += matrix_rank(gl) != 3
        d = restrict_metric(g, [0, 1]).determinant()
        ref = gho_restricted_det(I, x)
        det_err[0] = max(det_err[0], abs(d - ref) / abs(ref))
        d = restrict_metric(gl, [0, 1, 2]).determinant()
        ref = gholin_restricted_det(I, xl)
        det_err[1] = max(det_err[1], abs(d - ref) / abs(ref))
    return [
        Check("rank-det", "gho points with rank != 2", bad_rank[0], 0, "=="),
        Check("rank-det", "gholin points with rank != 3", bad_rank[1], 0, "=="),
        Check("rank-det", "gho (X,Y) determinant, relative", det_err[0], 1e-10),
        Check("rank-det", "gholin (W,X,Y) determinant, relative", det_err[1], 1e-10),
    ]


def _mismatches(a, b) -> int:
    return sum(len(list(t.items())) for t in (a - b).terms)


def suite_quartic_series(rng=None) -> list[Check]:
    res = quartic_pipeline(3)
    out = [Check("quartic-series", "W1..W3 coefficient mismatches", _mismatches(res.W, printed_W()), 0, "==")]
    for i, (g, ref) in enumerate(zip(res.G, printed_G()), start=1):
        out.append(Check("quartic-series", f"alpha_{i}mu coefficient mismatches", _mismatches(g, ref), 0, "=="))
    for ij, ref in printed_metric().items():
        out.append(Check("quartic-series", f"g{ij[0]}{ij[1]} coefficient mismatches",
                         _mismatches(res.metric[ij], ref), 0, "=="))
    out.append(Check("quartic-series", "first-order energy", int(res.energy[1] != FIRST_ORDER_ENERGY.average()),
                     0, "=="))
    for target in ("W", "G", "metric"):
        same = pipeline_dump(target) == dump_json(printed_named(target))
        out.append(Check("quartic-series", f"dump {target} byte equality", int(not same), 0, "=="))
    return out


def printed_ground_energy(m, k, lam, hbar) -> float:
    w0 = math.sqrt(k / m)
    return (hbar * w0 / 2 + hbar**2 * lam / (32 * m**2 * w0**2)
            - 7 * hbar**3 * lam**2 / (1536 * m**4 * w0**5)
            + 37 * hbar**4 * lam**3 / (24576 * m**6 * w0**8))


def suite_quartic_quantum(rng=None) -> list[Check]:
    out = []
    for lam in (0.0, 0.005, 0.01):
        x = quartic_point(1.0, 1.0, lam)
        sampler, E = quartic_ground_state(x, 1.0)
        g_num = quantum_metric_numeric(sampler, x, 1.0).as_float()
        err = float(np.abs(g_num - quartic_quantum_metric_closed(x, 1.0).as_float()).max())
        out.append(Check("quartic-quantum", f"overlap metric vs closed form, lam={lam}", err, 1e-5))
        out.append(Check("quartic-quantum", f"energy, lam={lam}",
                         abs(E - printed_ground_energy(1.0, 1.0, lam, 1.0)), 1e-12))
        V = lambda q, lam=lam: 0.5 * q * q + lam * q**4 / 24
        out.append(Check("quartic-quantum", f"Rayleigh quotient vs energy, lam={lam}",
                         abs(energy_expectation(sampler, x, 1.0, 1.0, V) - E), 1e-9))
    return out


def suite_adiabatic(rng=None) -> list[Check]:
    start, end = gho_point(1.0, 0.0, 1.0), gho_point(2.0, 0.0, 1.0)
    initial = GHO.phase_map(0.3, 1.0, start)
    drifts = {T: adiabatic_action_drift(GHO, RampSchedule(start, end, T), initial)
              for T in (250.0, 1000.0, 4000.0)}
    frozen = adiabatic_action_drift(GHO, RampSchedule(start, start, 50.0), initial,
                                    steps_per_period=1000)
    trend = drifts[250.0] > drifts[1000.0] > drifts[4000.0]
    return [
        Check("adiabatic", "frozen parameters", frozen, 1e-10),
        Check("adiabatic", "X: 1 -> 2, T=1000", drifts[1000.0], 1e-2),
        Check("adiabatic", "drift decreasing over T = 250, 1000, 4000", int(not trend), 0, "=="),
    ]


def suite_oracle_metric(rng) -> list[Check]:
    out = []
    for model, make in ((GHO, random_gho), (GHOLIN, random_gholin)):
        worst = curv = bracket = 0.0
        for _ in range(100):
            I, x = random_action(rng), make(rng)
            g = numeric_metric(model, I, x).as_float()
            ref = model.metric_closed(I, x).as_float()
            # the I/w^7 block can reach O(100); compare at double-precision resolution
            scale = 1.0 if model is GHO else max(1.0, float(np.abs(ref).max()))
            worst = max(worst, float(np.abs(g - ref).max()) / scale)
        for _ in range(10):
            I, x = random_action(rng), make(rng)
            F = model.hannay(I, x)[1].components.astype(float)
            dp, dq = phase_space_derivatives(model, I, x)
            F_fd = curvature_from_phase_space_derivatives(dp, dq).components
            curv = max(curv, float(np.abs(F_fd - F).max()))
            bracket = max(bracket, float(np.abs(poisson_curvature(model, I, x).components - F_fd).max()))
        out.append(Check("oracle-metric", f"{model.name} sampled vs closed metric" + ("" if model is GHO else " (scaled by max|g|)") + ", 100 points", worst, 1e-13))
        out.append(Check("oracle-metric", f"{model.name} curvature from map derivatives", curv, 1e-7))
        out.append(Check("oracle-metric", f"{model.name} curvature = -<{{G_i,G_j}}>", bracket, 1e-8))
    x = quartic_point(1.0, 1.0, 0.01)
    g = numeric_metric(QUARTIC, 1.0, x, 256).as_float()
    out.append(Check("oracle-metric", "quartic sampled series metric, lam=0.01",
                     float(np.abs(g - quartic_pipeline(3).metric_matrix(1, 1, 1, 0.01)).max()), 1e-10))
    E = quartic_pipeline(3).energy_value(1.0, 1.0, 1.0, 0.01)
    out.append(Check("oracle-metric", "quartic action of series energy",
                     abs(numeric_action_of_energy(QUARTIC_H, E, x) - 1.0), 1e-6))
    x0 = gho_point(1.0, 0.0, 1.0)
    g_q = quantum_metric_numeric(gho_wavefunction(0), x0).as_float()
    out.append(Check("oracle-metric", "gho overlap metric n=0",
                     float(np.abs(g_q - gho_quantum_metric(QuantumLevel(0), x0).as_float()).max()), 1e-6))
    return out


SUITES: dict[str, Callable[[np.random.Generator], list[Check]]] = {
    "gauge": suite_gauge,
    "generators": suite_generators,
    "gamma-beta": suite_gamma_beta,
    "rank-det": suite_rank_det,
    "quartic-series": suite_quartic_series,
    "quartic-quantum": suite_quartic_quantum,
    "adiabatic": suite_adiabatic,
    "oracle-metric": suite_oracle_metric,
}


def run_suite(name: str, seed: int = SEED) -> list[Check]:
    """Run one suite (or ``all``) with a fixed seed; raises ``KeyError`` on unknown names."""
    if name == "all":
        return [c for key in SUITES for c in run_suite(key, seed)]
    fn = SUITES[name]
    return fn(np.random.default_rng(seed))
