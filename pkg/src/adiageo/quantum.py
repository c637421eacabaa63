"""Quantum counterparts: metric tensors, Berry connections and curvatures.

Closed forms for the two GHO families (also in the operator form built from
the classical generators), the perturbative ground state of the quartic
oscillator, and a brute-force metric computed from wavefunction overlaps.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from numpy.polynomial import hermite as _herm

from .geometry import DomainError, MetricTensor, OneForm, ParameterPoint, TwoForm, register_domain
from .models import (_array, _gho_block, _gholin_blocks, _gholin_curvature_blocks,
                     gholin_coefficients, omega)

QUARTIC_NAMES = ("m", "k", "lam")
PERTURBATIVE_LIMIT = 0.1


def _quartic_domain(v: dict) -> str | None:
    if not v["m"] > 0:
        return "m must be positive"
    if not v["k"] > 0:
        return "k must be positive"
    if not v["lam"] >= 0:
        return "lam must be nonnegative"
    return None


register_domain("quartic", _quartic_domain)


def quartic_point(m, k, lam) -> ParameterPoint:
    return ParameterPoint(QUARTIC_NAMES, (m, k, lam), "quartic")


class WindowError(RuntimeError):
    """Quadrature window loses norm across a parameter step."""


@dataclass(frozen=True)
class QuantumLevel:
    n: int = 0
    hbar: float = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError("n must be a nonnegative integer")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    @property
    def c(self):
        """``n + 1/2``, exact."""
        return Fraction(2 * self.n + 1, 2)

    @property
    def bohr_sommerfeld_action(self):
        return self.c * self.hbar


# --- GHO families -----------------------------------------------------------

def gho_quantum_metric(level: QuantumLevel, x: ParameterPoint) -> MetricTensor:
    n = level.n
    pref = (n * n + n + 1) / (32 * omega(x) ** 4)
    g = [[pref * e for e in row] for row in _gho_block(x)]
    return MetricTensor(_array(g), x, None)


def gho_berry(level: QuantumLevel, x: ParameterPoint) -> tuple[OneForm, TwoForm]:
    X, Y, Z = x["X"], x["Y"], x["Z"]
    w, c = omega(x), level.c
    a = [0 * c * w, c / (2 * w), -c * Y / (2 * Z * w)]
    f12, f13, f23 = -c * Z / (4 * w**3), c * Y / (4 * w**3), -c * X / (4 * w**3)
    o = 0 * f12
    f = [[o, f12, f13], [-f12, o, f23], [-f13, -f23, o]]
    return OneForm(_array(a), x), TwoForm(_array(f), x)


def gholin_quantum_metric(level: QuantumLevel, x: ParameterPoint) -> MetricTensor:
    n, hbar = level.n, level.hbar
    w = omega(x)
    m1, m2 = _gholin_blocks(x)
    a = (n * n + n + 1) / (32 * w**4)
    b = level.c / (hbar * w**7)
    g = [[a * u + b * v for u, v in zip(r1, r2)] for r1, r2 in zip(m1, m2)]
    return MetricTensor(_array(g), x, None)


def gholin_berry(level: QuantumLevel, x: ParameterPoint) -> tuple[OneForm, TwoForm]:
    W, Y, Z = x["W"], x["Y"], x["Z"]
    w, c, hbar = omega(x), level.c, level.hbar
    o = 0 * W * c
    a = [o, o, c / (2 * w) + W**2 * Z / (2 * hbar * w**4),
         -c * Y / (2 * Z * w) - W**2 * Y / (2 * hbar * w**4)]
    f1, f2 = _gholin_curvature_blocks(x)
    c1, c2 = c / (4 * w**3), 1 / (hbar * w**6)
    f = [[c1 * u + c2 * v for u, v in zip(r1, r2)] for r1, r2 in zip(f1, f2)]
    return OneForm(_array(a), x), TwoForm(_array(f), x)


def operator_metric_and_connection(level: QuantumLevel, x: ParameterPoint
                                   ) -> tuple[MetricTensor, OneForm]:
    """Metric and Berry connection from the promoted generators ``G_i(q^, p^)``.

    Uses the ground-truth expectation values of ``(qp+pq)/2``, ``q^2`` and
    ``p + (Y/Z) q`` in the shifted Hermite eigenstates, written through
    ``l_i = g_i - (Y/Z) f_i`` and ``m_i = h_i - (WZ/w^2) f_i``.
    """
    if x.model != "gholin":
        raise DomainError("operator form is defined for the gholin model")
    W, Y, Z = x["W"], x["Y"], x["Z"]
    n, hbar, c = level.n, level.hbar, level.c
    w = omega(x)
    f, g, h = gholin_coefficients(x)
    l = [gi - Y / Z * fi for fi, gi in zip(f, g)]
    mm = [hi - W * Z / w**2 * fi for fi, hi in zip(f, h)]
    a1 = Fraction(n * n + n + 1, 2)
    a2 = c * w / (hbar * Z)
    shift = 4 * W**2 * Z**4 / w**6
    entry = lambda i, j: (a1 * (f[i] * f[j] + Z**2 / w**2 * l[i] * l[j])
                          + a2 * (shift * l[i] * l[j] + mm[i] * mm[j]))
    # fill the upper triangle once so float rounding cannot break symmetry
    rows = [[entry(min(i, j), max(i, j)) for j in range(4)] for i in range(4)]
    amp = c * Z / w + W**2 * Z**2 / (hbar * w**4)
    conn = [li * amp for li in l]
    return MetricTensor(_array(rows), x, None), OneForm(_array(conn), x)


# --- wavefunctions and the overlap oracle -----------------------------------

@dataclass(frozen=True)
class WavefunctionSampler:
    """``psi(q, values, hbar)`` with a recommended quadrature window.

    ``values`` is a plain ``{name: float}`` dict so the finite-difference
    stencil may step slightly outside the model domain (e.g. ``lam < 0``).
    ``window(values, hbar)`` returns ``(center, half_width)``.
    """

    psi: Callable[[np.ndarray, dict, float], np.ndarray]
    window: Callable[[dict, float], tuple[float, float]]
    nodes: int = 2001

    def grid(self, values: dict, hbar: float) -> np.ndarray:
        c, half = self.window(values, hbar)
        return np.linspace(c - half, c + half, self.nodes)


def hermite_function(n: int, xi):
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    norm = 1.0 / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
    return norm * np.exp(-xi * xi / 2) * _herm.hermval(xi, coeffs)


def gho_wavefunction(n: int = 0) -> WavefunctionSampler:
    """Eigenstate ``n`` of either GHO family (``W`` defaults to 0)."""

    def psi(q, v, hbar):
        X, Y, Z, W = v["X"], v["Y"], v["Z"], v.get("W", 0.0)
        w = math.sqrt(X * Z - Y * Y)
        s = math.sqrt(w / (Z * hbar))
        xi = (q + W * Z / w**2) * s
        return math.sqrt(s) * hermite_function(n, xi) * np.exp(-1j * Y * q * q / (2 * Z * hbar))

    def window(v, hbar):
        X, Y, Z, W = v["X"], v["Y"], v["Z"], v.get("W", 0.0)
        w2 = X * Z - Y * Y
        width = math.sqrt(Z * hbar / math.sqrt(w2))
        return -W * Z / w2, (12.0 + 2.0 * math.sqrt(n)) * width

    return WavefunctionSampler(psi, window)


def _quartic_polys(q, m, w0, hbar):
    a = m * w0 * q * q  # m w0 q^2
    p1 = 4 * a**2 + 12 * hbar * a - 9 * hbar**2
    p2 = 48 * a**4 + 416 * hbar * a**3 + 1272 * hbar**2 * a**2 + 3384 * hbar**3 * a - 4677 * hbar**4
    p3 = (64 * a**6 + 1088 * hbar * a**5 + 8592 * hbar**2 * a**4 + 48288 * hbar**3 * a**3
          + 154524 * hbar**4 * a**2 + 419076 * hbar**5 * a - 729153 * hbar**6)
    return p1, p2, p3


def quartic_psi(q, v: dict, hbar: float = 1.0):
    """Normalized perturbative ground state through ``lam^3``."""
    m, k, lam = v["m"], v["k"], v["lam"]
    w0 = math.sqrt(k / m)
    p1, p2, p3 = _quartic_polys(q, m, w0, hbar)
    pi = math.pi
    bracket = ((m * w0 / (pi * hbar)) ** 0.25
               - lam * p1 / (384 * (pi * m**7 * w0**11 * hbar**5) ** 0.25)
               + lam**2 * p2 / (884736 * (pi * m**15 * w0**23 * hbar**9) ** 0.25)
               - lam**3 * p3 / (339738624 * (pi * m**23 * w0**35 * hbar**13) ** 0.25))
    return np.exp(-m * w0 * q * q / (2 * hbar)) * bracket


def quartic_coupling(x: ParameterPoint, hbar: float = 1.0) -> float:
    """Dimensionless coupling ``hbar lam / (12 m^2 w0^3)``."""
    m, k, lam = (float(x[n]) for n in QUARTIC_NAMES)
    return hbar * lam / (12 * m**2 * math.sqrt(k / m) ** 3)


def quartic_energy(x: ParameterPoint, hbar=1):
    """Ground-state energy through ``lam^3``; exact for Fraction inputs when w0 is rational."""
    from .models import exact_sqrt

    m, k, lam = x["m"], x["k"], x["lam"]
    w0 = exact_sqrt(k / m) if isinstance(k, (Fraction, int)) and isinstance(m, (Fraction, int)) \
        else math.sqrt(k / m)
    return (hbar * w0 / 2 + hbar**2 * lam / (32 * m**2 * w0**2)
            - 7 * hbar**3 * lam**2 / (1536 * m**4 * w0**5)
            + 37 * hbar**4 * lam**3 / (24576 * m**6 * w0**8))


def quartic_ground_state(x: ParameterPoint, hbar: float = 1.0
                         ) -> tuple[WavefunctionSampler, float]:
    if quartic_coupling(x, hbar) > PERTURBATIVE_LIMIT:
        warnings.warn("perturbative regime exceeded", RuntimeWarning, stacklevel=2)

    def window(v, hb):
        return 0.0, 12.0 * math.sqrt(hb / math.sqrt(v["k"] * v["m"]))

    return WavefunctionSampler(quartic_psi, window), quartic_energy(x, hbar)


def simpson_weights(q: np.ndarray) -> np.ndarray:
    """Composite Simpson weights on an odd number of equally spaced nodes."""
    n = q.size
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson's rule needs an odd number (>= 3) of nodes")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (q[1] - q[0]) / 3.0


def energy_expectation(sampler: WavefunctionSampler, x: ParameterPoint, hbar: float,
                       mass: float, potential: Callable[[np.ndarray], np.ndarray]) -> float:
    """Rayleigh quotient ``<psi|p^2/2m + V|psi> / <psi|psi>`` on the sampler window.

    The kinetic term uses ``|psi'|^2`` with a fourth-order central stencil.
    """
    v = {k: float(val) for k, val in x.as_dict().items()}
    q = sampler.grid(v, hbar)
    w = simpson_weights(q)
    h = 1e-3 * math.sqrt(hbar)
    f = lambda s: sampler.psi(q + s, v, hbar)
    d = (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h)
    psi = f(0.0)
    norm = np.sum(w * np.abs(psi) ** 2)
    kinetic = hbar**2 / (2 * mass) * np.sum(w * np.abs(d) ** 2)
    return float((kinetic + np.sum(w * potential(q) * np.abs(psi) ** 2)) / norm)


def _stencil_step(v: float) -> float:
    return 1e-4 * (1.0 + abs(v))


def _overlaps(sampler: WavefunctionSampler, x: ParameterPoint, hbar: float, steps=None):
    base = {k: float(v) for k, v in x.as_dict().items()}
    q = sampler.grid(base, hbar)
    weight = simpson_weights(q)

    def inner(a, b):
        return np.sum(weight * np.conj(a) * b)

    psi0 = sampler.psi(q, base, hbar)
    norms = [inner(psi0, psi0).real]
    dpsi = []
    for i, name in enumerate(x.names):
        h = _stencil_step(base[name]) if steps is None else steps[i]
        vals = []
        for sgn in (1, -1):
            v = dict(base)
            v[name] = base[name] + sgn * h
            psi = sampler.psi(q, v, hbar)
            norms.append(inner(psi, psi).real)
            vals.append(psi)
        dpsi.append((vals[0] - vals[1]) / (2 * h))
    drift = max(abs(n - 1.0) for n in norms)
    if drift > 1e-8:
        raise WindowError(f"window too small: normalization drift {drift:.3e}")
    return psi0, dpsi, inner


def quantum_metric_numeric(sampler: WavefunctionSampler, x: ParameterPoint, hbar: float = 1.0,
                           steps=None) -> MetricTensor:
    """``Re(<d_i n|d_j n> - <d_i n|n><n|d_j n>)`` by quadrature and central differences."""
    psi, dpsi, inner = _overlaps(sampler, x, hbar, steps)
    nrm = inner(psi, psi).real
    psi = psi / math.sqrt(nrm)
    dpsi = [d / math.sqrt(nrm) for d in dpsi]
    n = len(dpsi)
    proj = [inner(d, psi) for d in dpsi]
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            val = (inner(dpsi[i], dpsi[j]) - proj[i] * np.conj(proj[j])).real
            g[i, j] = g[j, i] = val
    return MetricTensor(g, x, None)


def berry_connection_numeric(sampler: WavefunctionSampler, x: ParameterPoint, hbar: float = 1.0,
                             steps=None) -> OneForm:
    """``-Im <n|d_i n>`` by quadrature and central differences."""
    psi, dpsi, inner = _overlaps(sampler, x, hbar, steps)
    return OneForm(np.array([-inner(psi, d).imag for d in dpsi]), x)


# --- quartic closed forms ----------------------------------------------------

def _f(s: str) -> Fraction:
    return Fraction(s)


# (coefficient, hbar power, m exponent, k exponent) per lam order
QUARTIC_QUANTUM_SERIES = {
    (1, 1): [(_f("1/32"), 0, _f("-2"), _f("0")), (_f("-3/512"), 1, _f("-5/2"), _f("-3/2")),
             (_f("59/16384"), 2, _f("-3"), _f("-3"))],
    (1, 2): [(_f("1/32"), 0, _f("-1"), _f("-1")), (_f("-7/512"), 1, _f("-3/2"), _f("-5/2")),
             (_f("143/16384"), 2, _f("-2"), _f("-4"))],
    (1, 3): [(_f("1/128"), 1, _f("-3/2"), _f("-3/2")), (_f("-21/4096"), 2, _f("-2"), _f("-3")),
             (_f("2353/589824"), 3, _f("-5/2"), _f("-9/2"))],
    (2, 2): [(_f("1/32"), 0, _f("0"), _f("-2")), (_f("-11/512"), 1, _f("-1/2"), _f("-7/2")),
             (_f("785/49152"), 2, _f("-1"), _f("-5"))],
    (2, 3): [(_f("1/128"), 1, _f("-1/2"), _f("-5/2")), (_f("-89/12288"), 2, _f("-1"), _f("-4")),
             (_f("3841/589824"), 3, _f("-3/2"), _f("-11/2"))],
    (3, 3): [(_f("13/6144"), 2, _f("-1"), _f("-3")), (_f("-31/12288"), 3, _f("-3/2"), _f("-9/2")),
             (_f("57227/21233664"), 4, _f("-2"), _f("-6"))],
}


def quartic_quantum_metric_closed(x: ParameterPoint, hbar: float = 1.0) -> MetricTensor:
    """Ground-state quantum metric of the quartic oscillator through ``lam^2``."""
    m, k, lam = (float(x[n]) for n in QUARTIC_NAMES)
    g = np.zeros((3, 3))
    for (i, j), terms in QUARTIC_QUANTUM_SERIES.items():
        val = sum(float(c) * hbar**hp * m ** float(em) * k ** float(ek) * lam**mu
                  for mu, (c, hp, em, ek) in enumerate(terms))
        g[i - 1, j - 1] = g[j - 1, i - 1] = val
    return MetricTensor(g, x, None)


@dataclass(frozen=True)
class Identification:
    component: tuple
    order: int
    power: int
    ratio: Fraction

    @property
    def label(self) -> str:
        return f"g{self.component[0]}{self.component[1]} lam^{self.order}"


def identification_table() -> list[Identification]:
    """Ratios ``hbar^2 * quantum / classical`` coefficient by coefficient.

    Each ratio ``r`` identifies ``I^p = r hbar^p`` where ``p`` is the power of
    ``I`` in the classical coefficient.
    """
    from .series import quartic_pipeline

    classical = quartic_pipeline(3).metric
    rows = []
    for comp, terms in QUARTIC_QUANTUM_SERIES.items():
        for mu, (c, hp, em, ek) in enumerate(terms):
            poly = classical[comp].terms[mu].average()
            (mono, cc), = poly.items_raw()
            power = mono[0] // 2
            if power != hp + 2 or Fraction(mono[1], 2) != em or Fraction(mono[2], 2) != ek:
                raise ArithmeticError(f"{comp} lam^{mu}: parameter dependence differs")
            rows.append(Identification(comp, mu, power, c / cc))
    return rows
