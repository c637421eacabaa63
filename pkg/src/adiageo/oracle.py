"""Brute-force checks that do not trust any closed form.

Finite differences of the action-angle maps, sampled metrics, gauge shifts
of the angle origin, time-domain integration under slow parameter ramps, and
the action integral of a one-dimensional Hamiltonian by quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from .geometry import (DomainError, GeneratorSamples, MetricTensor, ParameterPoint, TwoForm,
                       angle_average, angle_grid, metric_from_generators, raw_second_moment)
from .models import OscillatorModel, PhaseState
from .series import quartic_pipeline

FD_REL_STEP = 1e-5


def _step(v: float, rel: float = FD_REL_STEP) -> float:
    return rel * (1.0 + abs(v))


def _shifted(x: ParameterPoint, i: int, h: float) -> ParameterPoint:
    return x.replace(i, float(x.values[i]) + h)


def _stencil(x: ParameterPoint, i: int, h: float):
    """Central stencil in parameter ``i``; the step shrinks once if it leaves the domain."""
    for attempt in range(2):
        try:
            return _shifted(x, i, h), _shifted(x, i, -h), h
        except DomainError:
            if attempt:
                raise
            h *= 0.1


# --- generator property -------------------------------------------------------

def generator_displacement_check(model: OscillatorModel, phi, I, x: ParameterPoint) -> float:
    """Worst absolute error of ``(d_i q) = dG_i/dp`` and ``(d_i p) = -dG_i/dq``.

    Left sides differentiate the action-angle map in the parameters at fixed
    ``(phi, I)``; right sides differentiate ``G_i(q, p)`` in phase space.
    """
    st = model.phase_map(phi, I, x)
    q, p = float(st.q), float(st.p)
    hq, hp = _step(q), _step(p)
    dG_dp = (model.generators_qp(q, p + hp, x) - model.generators_qp(q, p - hp, x)) / (2 * hp)
    dG_dq = (model.generators_qp(q + hq, p, x) - model.generators_qp(q - hq, p, x)) / (2 * hq)
    worst = 0.0
    for i in range(len(x)):
        xp, xm, h = _stencil(x, i, _step(float(x.values[i])))
        sp, sm = model.phase_map(phi, I, xp), model.phase_map(phi, I, xm)
        dq_i = (sp.q - sm.q) / (2 * h)
        dp_i = (sp.p - sm.p) / (2 * h)
        worst = max(worst, abs(dq_i - dG_dp[i]), abs(dp_i + dG_dq[i]))
    return float(worst)


def phase_space_derivatives(model: OscillatorModel, I, x: ParameterPoint, M: int = 64):
    """``(d_i p, d_i q)`` at fixed ``(phi, I)`` on the angle grid, each ``(N, M)``."""
    phi = angle_grid(M)
    dp, dq = [], []
    for i in range(len(x)):
        xp, xm, h = _stencil(x, i, _step(float(x.values[i])))
        sp, sm = model.phase_map(phi, I, xp), model.phase_map(phi, I, xm)
        dq.append((sp.q - sm.q) / (2 * h))
        dp.append((sp.p - sm.p) / (2 * h))
    return np.array(dp), np.array(dq)


def poisson_curvature(model: OscillatorModel, I, x: ParameterPoint, M: int = 64) -> TwoForm:
    """``-<{G_i, G_j}>`` with the bracket taken by phase-space finite differences."""
    st = model.phase_map(angle_grid(M), I, x)
    q, p = np.asarray(st.q), np.asarray(st.p)
    hq, hp = _step(np.abs(q).max()), _step(np.abs(p).max())
    dGq = (model.generators_qp(q + hq, p, x) - model.generators_qp(q - hq, p, x)) / (2 * hq)
    dGp = (model.generators_qp(q, p + hp, x) - model.generators_qp(q, p - hp, x)) / (2 * hp)
    bracket = (dGq @ dGp.T - dGp @ dGq.T) / M
    return TwoForm(-0.5 * (bracket - bracket.T), x, I)


# --- sampled metrics ---------------------------------------------------------

@dataclass(frozen=True)
class QuarticSeriesModel:
    """Quartic generators sampled order by order from the perturbation series.

    Values come from evaluating the exact series on an angle grid in floating
    point; the averages are then combined order by order and truncated at
    ``lam^order`` so that the comparison with the series metric is free of
    truncation mismatch.
    """

    names: tuple = ("m", "k", "lam")
    order: int = 2

    def order_samples(self, I, x: ParameterPoint, M: int):
        res = quartic_pipeline(self.order + 1)
        phi = angle_grid(M)
        m, k = float(x["m"]), float(x["k"])
        G = np.array([[t.evaluate(phi, I, m, k) for t in g.terms] for g in res.G])
        w = np.array([t.evaluate(phi, I, m, k) for t in res.weight.terms[: self.order + 1]])
        return G.transpose(1, 0, 2), w  # (order, N, M), (order, M)

    def metric(self, I, x: ParameterPoint, M: int = 256) -> MetricTensor:
        G, w = self.order_samples(I, x, M)
        lam = float(x["lam"])
        n = self.order
        # mean[a] = <G>_a, second[a] = <G G^T>_a: order-a coefficients of the weighted averages
        mean = np.zeros((n + 1, G.shape[1]))
        second = np.zeros((n + 1, G.shape[1], G.shape[1]))
        for a in range(n + 1):
            for b in range(n + 1 - a):
                mean[a + b] += (G[a] * w[b]).mean(axis=1)
                for c in range(n + 1 - a - b):
                    second[a + b + c] += (G[a] * w[c]) @ G[b].T / G.shape[2]
        g = np.zeros_like(second[0])
        for mu in range(n + 1):
            term = second[mu].copy()
            for a in range(mu + 1):
                term -= np.outer(mean[a], mean[mu - a])
            g += lam**mu * term
        return MetricTensor(0.5 * (g + g.T), x, I)


QUARTIC = QuarticSeriesModel()


def sample_generators(model: OscillatorModel, I, x: ParameterPoint, M: int) -> GeneratorSamples:
    return GeneratorSamples(model.generators(angle_grid(M), I, x))


def numeric_metric(model, I, x: ParameterPoint, M: int = 64) -> MetricTensor:
    """Metric from generators sampled on ``M`` angles, with a grid-doubling alias check."""
    if isinstance(model, QuarticSeriesModel):
        return model.metric(I, x, M)
    gs = sample_generators(model, I, x, M)
    return metric_from_generators(gs, x, I, refine=lambda m: sample_generators(model, I, x, m))


# --- gauge shifts --------------------------------------------------------------

@dataclass(frozen=True)
class GaugeShift:
    """``lambda(I; x) = c1 I^2 + c2 I x[param]``."""

    c1: float = 0.0
    c2: float = 0.0
    param: str = "X"

    def __post_init__(self):
        if not (math.isfinite(self.c1) and math.isfinite(self.c2)):
            raise ValueError("gauge coefficients must be finite")

    def angle_shift(self, I, x: ParameterPoint) -> float:
        """``d lambda / dI``."""
        return 2 * self.c1 * I + self.c2 * float(x[self.param])

    def gradient(self, I, x: ParameterPoint) -> np.ndarray:
        """``d_i lambda`` at fixed ``I``."""
        g = np.zeros(len(x))
        g[x.index(self.param)] = self.c2 * I
        return g


def gauge_invariance_experiment(model: OscillatorModel, shift: GaugeShift, I, x: ParameterPoint,
                                M: int = 64) -> tuple[float, float]:
    """Return ``(max|g' - g|, max|<G'G'> - <GG>|)`` under a shift of the angle origin.

    The primed generators are ``G'_i(phi') = G_i(phi' - b) - d_i lambda``
    with ``b = d lambda / dI``, sampled on a grid uniform in ``phi'``.
    """
    phi_new = angle_grid(M)
    b = shift.angle_shift(I, x)
    base = GeneratorSamples(model.generators(phi_new, I, x))
    primed = GeneratorSamples(model.generators(phi_new - b, I, x)
                              - shift.gradient(I, x)[:, None])
    g = metric_from_generators(base).components
    g2 = metric_from_generators(primed).components
    raw = raw_second_moment(base)
    raw2 = raw_second_moment(primed)
    return float(np.abs(g2 - g).max()), float(np.abs(raw2 - raw).max())


# --- adiabatic ramps -------------------------------------------------------------

def smoothstep(s):
    s = min(max(s, 0.0), 1.0)
    return s * s * (3.0 - 2.0 * s)


@dataclass(frozen=True)
class RampSchedule:
    start: ParameterPoint
    end: ParameterPoint
    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("ramp time must be positive")
        if self.start.names != self.end.names or self.start.model != self.end.model:
            raise ValueError("ramp endpoints belong to different models")
        for s in np.linspace(0.0, 1.0, 101):
            self.at(s * self.T)

    def values_at(self, t: float) -> tuple:
        s = smoothstep(t / self.T)
        return tuple(float(a) + (float(b) - float(a)) * s
                     for a, b in zip(self.start.values, self.end.values))

    def at(self, t: float) -> ParameterPoint:
        return ParameterPoint(self.start.names, self.values_at(t), self.start.model)


def instantaneous_action(q, p, v: dict) -> float:
    """``I = (H + W^2 Z / 2 w^2) / w`` (``W = 0`` for the plain GHO)."""
    X, Y, Z, W = v["X"], v["Y"], v["Z"], v.get("W", 0.0)
    w2 = X * Z - Y * Y
    w = math.sqrt(w2)
    H = 0.5 * (X * q * q + 2 * Y * q * p + Z * p * p) + W * q
    return (H + W * W * Z / (2 * w2)) / w


def _max_frequency(ramp: RampSchedule) -> float:
    best = 0.0
    for s in np.linspace(0.0, 1.0, 201):
        v = dict(zip(ramp.start.names, ramp.values_at(s * ramp.T)))
        best = max(best, math.sqrt(v["X"] * v["Z"] - v["Y"] ** 2))
    return best


def adiabatic_action_drift(model: OscillatorModel, ramp: RampSchedule, initial: PhaseState,
                           steps_per_period: int = 200) -> float:
    """Largest relative change of the action along a fixed-step RK4 trajectory."""
    if steps_per_period < 200:
        raise ValueError("need at least 200 steps per oscillation period")
    names = ramp.start.names
    period = 2 * math.pi / _max_frequency(ramp)
    n_steps = math.ceil(ramp.T * steps_per_period / period)
    dt = ramp.T / n_steps
    a = [float(v) for v in ramp.start.values]
    d = [float(e) - s for s, e in zip(a, ramp.end.values)]
    iW = names.index("W") if "W" in names else None
    iX, iY, iZ = names.index("X"), names.index("Y"), names.index("Z")
    T = ramp.T

    def params(t):
        s = t / T
        s = s * s * (3.0 - 2.0 * s)
        return (a[iX] + d[iX] * s, a[iY] + d[iY] * s, a[iZ] + d[iZ] * s,
                0.0 if iW is None else a[iW] + d[iW] * s)

    def action(q, p, X, Y, Z, W):
        w2 = X * Z - Y * Y
        H = 0.5 * (X * q * q + 2 * Y * q * p + Z * p * p) + W * q
        return (H + W * W * Z / (2 * w2)) / math.sqrt(w2)

    q, p = float(initial.q), float(initial.p)
    I0 = action(q, p, *params(0.0))
    worst = 0.0
    h2 = 0.5 * dt
    for step in range(n_steps):
        t = step * dt
        X, Y, Z, W = params(t)
        k1q, k1p = Y * q + Z * p, -(X * q + Y * p + W)
        X, Y, Z, W = params(t + h2)
        q2, p2 = q + h2 * k1q, p + h2 * k1p
        k2q, k2p = Y * q2 + Z * p2, -(X * q2 + Y * p2 + W)
        q3, p3 = q + h2 * k2q, p + h2 * k2p
        k3q, k3p = Y * q3 + Z * p3, -(X * q3 + Y * p3 + W)
        Xe, Ye, Ze, We = params(t + dt)
        q4, p4 = q + dt * k3q, p + dt * k3p
        k4q, k4p = Ye * q4 + Ze * p4, -(Xe * q4 + Ye * p4 + We)
        q += dt / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q)
        p += dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        dev = abs(action(q, p, Xe, Ye, Ze, We) - I0)
        if dev > worst:
            worst = dev
    return worst / I0


def rk4_autonomous(force: Callable[[float, float], tuple[float, float]], state: PhaseState,
                   dt: float, t_total: float) -> PhaseState:
    """Fixed-step RK4 for ``(dq/dt, dp/dt) = force(q, p)``."""
    q, p = float(state.q), float(state.p)
    for _ in range(int(round(t_total / dt))):
        k1 = force(q, p)
        k2 = force(q + 0.5 * dt * k1[0], p + 0.5 * dt * k1[1])
        k3 = force(q + 0.5 * dt * k2[0], p + 0.5 * dt * k2[1])
        k4 = force(q + dt * k3[0], p + dt * k3[1])
        q += dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        p += dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return PhaseState(q, p)


def rk4_energy_error(force, energy: Callable[[float, float], float], state: PhaseState,
                     dt: float, t_total: float) -> float:
    """Relative energy error after ``t_total`` of fixed-step RK4."""
    end = rk4_autonomous(force, state, dt, t_total)
    E0 = energy(state.q, state.p)
    return abs(energy(end.q, end.p) - E0) / abs(E0)


def rk4_state_error(force, exact: Callable[[float], PhaseState], dt: float,
                    t_total: float) -> float:
    """Phase-space distance from a known solution after ``t_total``."""
    end = rk4_autonomous(force, exact(0.0), dt, t_total)
    ref = exact(t_total)
    return math.hypot(end.q - ref.q, end.p - ref.p)


def rk4_step_ratio(error: Callable[[float], float], dt: float) -> float:
    """``error(dt) / error(dt / 2)``; about ``2^order`` in the asymptotic regime."""
    return error(dt) / error(dt / 2)


# --- action integral ----------------------------------------------------------------

@dataclass(frozen=True)
class SeparableHamiltonian:
    """``H = p^2 / 2 mass(x) + V(q; x)`` with a single well at ``minimum(x)``."""

    mass: Callable[[ParameterPoint], float]
    potential: Callable[[float, ParameterPoint], float]
    minimum: Callable[[ParameterPoint], float] = lambda x: 0.0

    def __call__(self, q, p, x: ParameterPoint):
        return p * p / (2 * self.mass(x)) + self.potential(q, x)


QUARTIC_H = SeparableHamiltonian(
    mass=lambda x: float(x["m"]),
    potential=lambda q, x: 0.5 * float(x["k"]) * q * q + float(x["lam"]) * q**4 / 24.0,
)

GAUSS_NODES = 64


def _turning_point(V, q0: float, E: float, direction: float) -> float:
    span = 1.0
    for _ in range(200):
        if V(q0 + direction * span) > E:
            break
        span *= 2.0
    else:
        raise ValueError("no real turning points: potential is not confining")
    lo, hi = sorted((q0, q0 + direction * span))
    return bisect(lambda q: V(q) - E, lo, hi, xtol=1e-300, rtol=1e-12, maxiter=500)


def numeric_action_of_energy(hamiltonian: SeparableHamiltonian, E: float, x: ParameterPoint,
                             nodes: int = GAUSS_NODES) -> float:
    """``I = (1/pi) * integral of p(q; E) dq`` between the turning points.

    Each half-well is mapped with ``q = q_min + (q_turn - q_min) sin(theta)``
    which removes the square-root endpoint singularity; the smooth remainder
    goes to Gauss-Legendre.
    """
    q0 = float(hamiltonian.minimum(x))
    V = lambda q: hamiltonian.potential(q, x)
    V0 = V(q0)
    if E < V0:
        raise ValueError(f"no real turning points: E = {E} below the potential minimum {V0}")
    if E == V0:
        return 0.0
    m = hamiltonian.mass(x)
    t, wts = np.polynomial.legendre.leggauss(nodes)
    theta = 0.25 * np.pi * (t + 1.0)
    wts = 0.25 * np.pi * wts
    total = 0.0
    for direction in (1.0, -1.0):
        qt = _turning_point(V, q0, E, direction)
        L = qt - q0
        q = q0 + L * np.sin(theta)
        kinetic = np.maximum(E - np.array([V(v) for v in q]), 0.0)
        total += abs(L) * np.sum(wts * np.sqrt(2 * m * kinetic) * np.cos(theta))
    return float(total / np.pi)
