"""Closed forms for the generalized harmonic oscillator (GHO) families.

``gho``:    H = (X q^2 + 2 Y q p + Z p^2) / 2,          parameters (X, Y, Z)
``gholin``: H = (X q^2 + 2 Y q p + Z p^2) / 2 + W q,    parameters (W, X, Y, Z)

Both require ``XZ - Y^2 > 0``; ``omega = sqrt(XZ - Y^2)``. We also require
``Z > 0`` so that the action-angle chart below is real for ``I > 0``.

The metric, connection and curvature formulas accept :class:`Fraction`
parameter values and stay exact whenever ``XZ - Y^2`` is a rational square.
Phase-space maps and generators always work in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .geometry import MetricTensor, OneForm, ParameterPoint, TwoForm, register_domain

GHO_NAMES = ("X", "Y", "Z")
GHOLIN_NAMES = ("W", "X", "Y", "Z")


def _gho_domain(v: dict) -> str | None:
    disc = v["X"] * v["Z"] - v["Y"] ** 2
    if not disc > 0:
        return f"XZ - Y^2 = {float(disc):g} must be positive"
    if not v["Z"] > 0:
        return "Z must be positive"
    return None


register_domain("gho", _gho_domain)
register_domain("gholin", _gho_domain)


def gho_point(X, Y, Z) -> ParameterPoint:
    return ParameterPoint(GHO_NAMES, (X, Y, Z), "gho")


def gholin_point(W, X, Y, Z) -> ParameterPoint:
    return ParameterPoint(GHOLIN_NAMES, (W, X, Y, Z), "gholin")


@dataclass(frozen=True)
class PhaseState:
    q: float | np.ndarray
    p: float | np.ndarray


def exact_sqrt(v):
    """Square root that stays a Fraction when ``v`` is a rational square."""
    if isinstance(v, Fraction):
        rn, rd = math.isqrt(v.numerator), math.isqrt(v.denominator)
        if rn * rn == v.numerator and rd * rd == v.denominator:
            return Fraction(rn, rd)
        return math.sqrt(v)
    if isinstance(v, int):
        r = math.isqrt(v)
        if r * r == v:
            return r
    return math.sqrt(v)


def omega(x: ParameterPoint):
    return exact_sqrt(x["X"] * x["Z"] - x["Y"] ** 2)


def _array(rows):
    flat = [v for row in rows for v in (row if isinstance(row, (list, tuple)) else [row])]
    if any(isinstance(v, Fraction) for v in flat):
        return np.array(rows, dtype=object)
    return np.array(rows, dtype=float)


def _floats(x: ParameterPoint) -> dict:
    return {k: float(v) for k, v in x.as_dict().items()}


# --- generalized harmonic oscillator -------------------------------------

def gho_hamiltonian(q, p, x: ParameterPoint):
    v = _floats(x)
    return 0.5 * (v["X"] * q**2 + 2 * v["Y"] * q * p + v["Z"] * p**2)


def gho_action_angle_map(phi, I, x: ParameterPoint) -> PhaseState:
    v = _floats(x)
    w = math.sqrt(v["X"] * v["Z"] - v["Y"] ** 2)
    amp = np.sqrt(2 * v["Z"] * I / w)
    s, c = np.sin(phi), np.cos(phi)
    return PhaseState(amp * s, amp * (-(v["Y"] / v["Z"]) * s + (w / v["Z"]) * c))


def gho_inverse_map(q, p, x: ParameterPoint):
    """Return ``(phi, I)`` with ``phi`` in (-pi, pi]."""
    v = _floats(x)
    w = math.sqrt(v["X"] * v["Z"] - v["Y"] ** 2)
    I = gho_hamiltonian(q, p, x) / w
    # q = a sin(phi), Z p + Y q = a w cos(phi)
    phi = np.arctan2(q * w, v["Z"] * p + v["Y"] * q)
    return phi, I


def gho_generating_S(phi, I, x: ParameterPoint):
    v = _floats(x)
    w = math.sqrt(v["X"] * v["Z"] - v["Y"] ** 2)
    s, c = np.sin(phi), np.cos(phi)
    return -(v["Y"] * I / w) * s**2 + I * (phi + s * c)


def gho_generators(phi, I, x: ParameterPoint) -> np.ndarray:
    """``(G_X, G_Y, G_Z)`` stacked along the first axis."""
    v = _floats(x)
    X, Y, Z = v["X"], v["Y"], v["Z"]
    w = math.sqrt(X * Z - Y**2)
    s, c = np.sin(phi), np.cos(phi)
    g1 = -(Z * I / (2 * w**2)) * s * c
    g2 = (I * s / w**2) * (Y * c + w * s)
    g3 = (I * s / (2 * Z * w**2)) * ((X * Z - 2 * Y**2) * c - 2 * Y * w * s)
    return np.array(np.broadcast_arrays(g1, g2, g3))


def _gho_block(x: ParameterPoint):
    X, Y, Z = x["X"], x["Y"], x["Z"]
    return [
        [Z**2, -2 * Y * Z, 2 * Y**2 - X * Z],
        [-2 * Y * Z, 4 * X * Z, -2 * X * Y],
        [2 * Y**2 - X * Z, -2 * X * Y, X**2],
    ]


def gho_metric_closed(I, x: ParameterPoint) -> MetricTensor:
    w = omega(x)
    pref = I**2 / (32 * w**4)
    g = [[pref * e for e in row] for row in _gho_block(x)]
    return MetricTensor(_array(g), x, I)


def gho_hannay(I, x: ParameterPoint) -> tuple[OneForm, TwoForm]:
    X, Y, Z = x["X"], x["Y"], x["Z"]
    w = omega(x)
    a = [0 * I, I / (2 * w), -Y * I / (2 * Z * w)]
    f12, f13, f23 = -Z * I / (4 * w**3), Y * I / (4 * w**3), -X * I / (4 * w**3)
    zero = 0 * f12
    f = [[zero, f12, f13], [-f12, zero, f23], [-f13, -f23, zero]]
    return OneForm(_array(a), x, I), TwoForm(_array(f), x, I)


# --- generalized harmonic oscillator with a linear term ------------------

def gholin_hamiltonian(q, p, x: ParameterPoint):
    v = _floats(x)
    return 0.5 * (v["X"] * q**2 + 2 * v["Y"] * q * p + v["Z"] * p**2) + v["W"] * q


def _shift(v: dict, w: float) -> tuple[float, float]:
    return -v["W"] * v["Z"] / w**2, v["W"] * v["Y"] / w**2


def gholin_action_angle_map(phi, I, x: ParameterPoint) -> PhaseState:
    v = _floats(x)
    base = gho_action_angle_map(phi, I, gho_point(v["X"], v["Y"], v["Z"]))
    dq, dp = _shift(v, math.sqrt(v["X"] * v["Z"] - v["Y"] ** 2))
    return PhaseState(base.q + dq, base.p + dp)


def gholin_inverse_map(q, p, x: ParameterPoint):
    v = _floats(x)
    dq, dp = _shift(v, math.sqrt(v["X"] * v["Z"] - v["Y"] ** 2))
    return gho_inverse_map(q - dq, p - dp, gho_point(v["X"], v["Y"], v["Z"]))


def gholin_generating_S(phi, I, x: ParameterPoint):
    v = _floats(x)
    w = math.sqrt(v["X"] * v["Z"] - v["Y"] ** 2)
    s, c = np.sin(phi), np.cos(phi)
    q = np.sqrt(2 * v["Z"] * I / w) * s - v["W"] * v["Z"] / w**2
    return -(v["Y"] / (2 * v["Z"])) * q**2 + I * (phi + s * c)


def _d_omega(x: ParameterPoint, w):
    X, Y, Z = x["X"], x["Y"], x["Z"]
    return [0 * w, Z / (2 * w), -Y / w, X / (2 * w)]


def gholin_coefficients(x: ParameterPoint):
    """Parameter functions ``(f_i, g_i, h_i)``, each a list over (W, X, Y, Z)."""
    W, Y, Z = x["W"], x["Y"], x["Z"]
    w = omega(x)
    dw = _d_omega(x, w)
    unit = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    iW, iY, iZ = 0, 2, 3
    d_z_over_w = [unit[iZ][i] / w - Z * dw[i] / w**2 for i in range(4)]
    d_y_over_z = [unit[iY][i] / Z - Y * unit[iZ][i] / Z**2 for i in range(4)]
    d_wz_over_w2 = [(unit[iW][i] * Z + W * unit[iZ][i]) / w**2 - 2 * W * Z * dw[i] / w**3
                    for i in range(4)]
    f = [w / (2 * Z) * d for d in d_z_over_w]
    g = [Y / Z * fi + d / 2 for fi, d in zip(f, d_y_over_z)]
    h = [W / (2 * w) * a - b for a, b in zip(d_z_over_w, d_wz_over_w2)]
    return f, g, h


def gholin_generators_qp(q, p, x: ParameterPoint) -> np.ndarray:
    """``G_i`` as functions of ``(q, p)``, stacked over (W, X, Y, Z)."""
    f, g, h = (np.array([float(c) for c in cs]) for cs in gholin_coefficients(x))
    ratio = float(x["Y"]) / float(x["Z"])
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    qp, q2, lin = q * p, q * q, p + ratio * q
    return np.array([fi * qp + gi * q2 + hi * lin for fi, gi, hi in zip(f, g, h)])


def gholin_generators(phi, I, x: ParameterPoint) -> np.ndarray:
    st = gholin_action_angle_map(phi, I, x)
    return gholin_generators_qp(st.q, st.p, x)


def _gholin_blocks(x: ParameterPoint):
    W, X, Y, Z = x["W"], x["X"], x["Y"], x["Z"]
    w = omega(x)
    w2, w4 = w**2, w**4
    zero = 0 * W
    b = _gho_block(x)
    m1 = [[zero] * 4] + [[zero] + row for row in b]
    m2 = [
        [Z * w4, -W * Z**2 * w2, 2 * W * Y * Z * w2, -W * Y**2 * w2],
        [-W * Z**2 * w2, W**2 * Z**3, -2 * W**2 * Y * Z**2, W**2 * Y**2 * Z],
        [2 * W * Y * Z * w2, -2 * W**2 * Y * Z**2, W**2 * Z * (3 * Y**2 + X * Z),
         -(W**2) * Y * (Y**2 + X * Z)],
        [-W * Y**2 * w2, W**2 * Y**2 * Z, -(W**2) * Y * (Y**2 + X * Z), W**2 * X * Y**2],
    ]
    return m1, m2


def gholin_metric_closed(I, x: ParameterPoint) -> MetricTensor:
    w = omega(x)
    m1, m2 = _gholin_blocks(x)
    a, b = I**2 / (32 * w**4), I / w**7
    g = [[a * u + b * v for u, v in zip(r1, r2)] for r1, r2 in zip(m1, m2)]
    return MetricTensor(_array(g), x, I)


def _gholin_curvature_blocks(x: ParameterPoint):
    W, X, Y, Z = x["W"], x["X"], x["Y"], x["Z"]
    w2 = omega(x) ** 2
    o = 0 * W
    f1 = [[o, o, o, o], [o, o, -Z, Y], [o, Z, o, -X], [o, -Y, X, o]]
    f2 = [
        [o, o, W * Z * w2, -W * Y * w2],
        [o, o, -(W**2) * Z**2, W**2 * Y * Z],
        [-W * Z * w2, W**2 * Z**2, o, -(W**2) * Y**2],
        [W * Y * w2, -(W**2) * Y * Z, W**2 * Y**2, o],
    ]
    return f1, f2


def gholin_hannay(I, x: ParameterPoint) -> tuple[OneForm, TwoForm]:
    W, Y, Z = x["W"], x["Y"], x["Z"]
    w = omega(x)
    zero = 0 * W * I
    a = [zero, zero, I / (2 * w) + W**2 * Z / (2 * w**4), -Y * I / (2 * Z * w) - W**2 * Y / (2 * w**4)]
    f1, f2 = _gholin_curvature_blocks(x)
    c1, c2 = I / (4 * w**3), 1 / w**6
    f = [[c1 * u + c2 * v for u, v in zip(r1, r2)] for r1, r2 in zip(f1, f2)]
    return OneForm(_array(a), x, I), TwoForm(_array(f), x, I)


# --- registry used by the numeric oracle and the CLI ---------------------

@dataclass(frozen=True)
class OscillatorModel:
    """Bundle of the closed-form pieces of one exactly solvable model."""

    name: str
    names: tuple[str, ...]
    index_base: int
    make_point: Callable[..., ParameterPoint]
    hamiltonian: Callable
    phase_map: Callable
    inverse_map: Callable
    generating_S: Callable
    generators: Callable
    metric_closed: Callable
    hannay: Callable

    def point(self, values) -> ParameterPoint:
        return self.make_point(*values)

    def generators_qp(self, q, p, x: ParameterPoint) -> np.ndarray:
        phi, I = self.inverse_map(q, p, x)
        return self.generators(phi, I, x)

    def action(self, q, p, x: ParameterPoint):
        return self.inverse_map(q, p, x)[1]

    def velocity(self, q, p, v: dict):
        """Hamilton's equations ``(dq/dt, dp/dt)`` for float parameters ``v``."""
        dq = v["Y"] * q + v["Z"] * p
        dp = -(v["X"] * q + v["Y"] * p + v.get("W", 0.0))
        return dq, dp


GHO = OscillatorModel("gho", GHO_NAMES, 1, gho_point, gho_hamiltonian, gho_action_angle_map,
                      gho_inverse_map, gho_generating_S, gho_generators, gho_metric_closed,
                      gho_hannay)
GHOLIN = OscillatorModel("gholin", GHOLIN_NAMES, 0, gholin_point, gholin_hamiltonian,
                         gholin_action_angle_map, gholin_inverse_map, gholin_generating_S,
                         gholin_generators, gholin_metric_closed, gholin_hannay)
MODELS = {"gho": GHO, "gholin": GHOLIN}
