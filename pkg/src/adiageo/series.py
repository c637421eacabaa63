"""Exact canonical perturbation theory for the quartic oscillator.

H = p^2/2m + k q^2/2 + lam q^4/4!, split as H0 + lam H1.

Functions of the unperturbed angle ``phi0`` are finite Fourier series whose
coefficients are exact rationals times monomials ``I^a m^b k^c`` with
half-integer exponents (stored doubled). The unperturbed frequency
``w0 = (k/m)^(1/2)`` is always eliminated into those exponents. A
:class:`PerturbationSeries` is a list of such Fourier series graded by the
power of ``lam``.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np

__all__ = [
    "Monomial",
    "CoefficientPoly",
    "TrigSeries",
    "PerturbationSeries",
    "OrderMismatch",
    "series_product",
    "series_average",
    "solve_homological",
    "expand_action_power",
    "series_reciprocal",
    "param_derivative",
    "chain_derivative",
    "quartic_pipeline",
    "QuarticSeries",
    "dump_entries",
    "dump_json",
]

VARS = ("I", "m", "k")
Monomial = tuple  # (2*e_I, 2*e_m, 2*e_k)
ONE: Monomial = (0, 0, 0)
W0: Monomial = (0, -1, 1)  # (k/m)^(1/2)


class OrderMismatch(ValueError):
    pass


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def monomial(I=0, m=0, k=0) -> Monomial:
    """Build a monomial from (possibly half-integer) exponents."""
    out = []
    for e in (I, m, k):
        d = Fraction(e) * 2
        if d.denominator != 1:
            raise ValueError(f"exponent {e} is not a half-integer")
        out.append(int(d))
    return tuple(out)


class CoefficientPoly(Mapping):
    """Sparse map ``Monomial -> Fraction`` with no stored zeros."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping | Iterable = ()):
        c = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        for mono, v in items:
            v = Fraction(v)
            if v:
                c[tuple(mono)] = c.get(tuple(mono), 0) + v
        self._c = {k: v for k, v in c.items() if v}

    def __getitem__(self, mono):
        return self._c[mono]

    def __iter__(self):
        return iter(sorted(self._c))

    def __len__(self):
        return len(self._c)

    def __eq__(self, other):
        if isinstance(other, CoefficientPoly):
            return self._c == other._c
        if isinstance(other, Mapping):
            return self._c == {tuple(k): Fraction(v) for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        if not self._c:
            return "0"
        terms = []
        for mono in self:
            exps = "".join(f" {n}^{Fraction(e, 2)}" for n, e in zip(VARS, mono) if e)
            terms.append(f"{self._c[mono]}{exps}")
        return " + ".join(terms)

    def __add__(self, other):
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return CoefficientPoly(c)

    def __neg__(self):
        return CoefficientPoly({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s, mono: Monomial = ONE):
        s = Fraction(s)
        return CoefficientPoly({_mono_mul(k, mono): s * v for k, v in self._c.items()})

    def __mul__(self, other):
        if not isinstance(other, CoefficientPoly):
            return self.scale(other)
        c: dict = {}
        for ka, va in self._c.items():
            for kb, vb in other._c.items():
                key = _mono_mul(ka, kb)
                c[key] = c.get(key, 0) + va * vb
        return CoefficientPoly(c)

    __rmul__ = __mul__

    def derivative(self, var: str):
        i = VARS.index(var)
        c = {}
        for mono, v in self._c.items():
            if mono[i]:
                new = list(mono)
                new[i] -= 2
                c[tuple(new)] = v * Fraction(mono[i], 2)
        return CoefficientPoly(c)

    def evaluate(self, I=1.0, m=1.0, k=1.0) -> float:
        vals = (I, m, k)
        total = 0.0
        for mono, v in self._c.items():
            term = float(v)
            for base, e in zip(vals, mono):
                if e:
                    term *= base ** (e / 2)
            total += term
        return total

    def items_raw(self):
        return self._c.items()


ZERO_POLY = CoefficientPoly()


class TrigSeries:
    """Finite Fourier series in ``phi0``: sum over ``c_k cos(k phi0) + s_k sin(k phi0)``.

    Internally a flat map ``(k, "cos"|"sin", monomial) -> Fraction``.
    """

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping | None = None):
        t = {}
        if terms:
            for (k, trig, mono), v in terms.items():
                if v:
                    t[(k, trig, mono)] = Fraction(v)
        self._t = t

    @classmethod
    def _raw(cls, t: dict):
        obj = cls.__new__(cls)
        obj._t = {k: v for k, v in t.items() if v}
        return obj

    @classmethod
    def term(cls, harmonic: int, trig: str, coeff=1, mono: Monomial = ONE):
        if trig not in ("cos", "sin"):
            raise ValueError(trig)
        if harmonic < 0:
            raise ValueError("harmonic must be nonnegative")
        if harmonic == 0 and trig == "sin":
            return cls()
        return cls({(harmonic, trig, tuple(mono)): coeff})

    @classmethod
    def constant(cls, coeff=1, mono: Monomial = ONE):
        return cls.term(0, "cos", coeff, mono)

    @classmethod
    def from_parts(cls, parts: Mapping):
        """``{(k, trig): CoefficientPoly}`` -> series."""
        t = {}
        for (k, trig), poly in parts.items():
            if k == 0 and trig == "sin":
                continue
            for mono, v in poly.items_raw():
                t[(k, trig, mono)] = v
        return cls._raw(t)

    def part(self, harmonic: int, trig: str) -> CoefficientPoly:
        return CoefficientPoly({mono: v for (k, tr, mono), v in self._t.items()
                                if k == harmonic and tr == trig})

    def harmonics(self) -> list[int]:
        return sorted({k for k, _, _ in self._t})

    def max_harmonic(self) -> int:
        return max((k for k, _, _ in self._t), default=0)

    def is_zero(self) -> bool:
        return not self._t

    def items(self):
        return sorted(self._t.items())

    def __eq__(self, other):
        return isinstance(other, TrigSeries) and self._t == other._t

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def __repr__(self):
        if not self._t:
            return "TrigSeries(0)"
        parts = []
        for k in self.harmonics():
            for trig in ("cos", "sin"):
                p = self.part(k, trig)
                if len(p):
                    parts.append(f"({p}){'' if k == 0 else f' {trig}({k}φ)'}")
        return "TrigSeries(" + " + ".join(parts) + ")"

    def __add__(self, other: "TrigSeries"):
        t = dict(self._t)
        for key, v in other._t.items():
            t[key] = t.get(key, 0) + v
        return TrigSeries._raw(t)

    def __neg__(self):
        return TrigSeries._raw({k: -v for k, v in self._t.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s, mono: Monomial = ONE):
        s = Fraction(s)
        return TrigSeries._raw({(k, tr, _mono_mul(m, mono)): s * v
                                for (k, tr, m), v in self._t.items()})

    def __mul__(self, other):
        if not isinstance(other, TrigSeries):
            return self.scale(other)
        t: dict = defaultdict(Fraction)
        half = Fraction(1, 2)
        for (ka, ta, ma), va in self._t.items():
            for (kb, tb, mb), vb in other._t.items():
                c = half * va * vb
                mono = _mono_mul(ma, mb)
                s, d = ka + kb, ka - kb
                if ta == "cos" and tb == "cos":
                    # cos a cos b = [cos(a-b) + cos(a+b)] / 2
                    t[(abs(d), "cos", mono)] += c
                    t[(s, "cos", mono)] += c
                elif ta == "sin" and tb == "sin":
                    # sin a sin b = [cos(a-b) - cos(a+b)] / 2
                    t[(abs(d), "cos", mono)] += c
                    t[(s, "cos", mono)] -= c
                else:
                    if ta == "cos":
                        # cos a sin b = sin b cos a
                        d = -d
                    # sin a cos b = [sin(a+b) + sin(a-b)] / 2
                    t[(s, "sin", mono)] += c
                    if d > 0:
                        t[(d, "sin", mono)] += c
                    elif d < 0:
                        t[(-d, "sin", mono)] -= c
        return TrigSeries._raw(dict(t))

    __rmul__ = __mul__

    def average(self) -> CoefficientPoly:
        return CoefficientPoly({mono: v for (k, tr, mono), v in self._t.items() if k == 0})

    def d_phi(self) -> "TrigSeries":
        t = {}
        for (k, tr, mono), v in self._t.items():
            if k == 0:
                continue
            if tr == "cos":
                t[(k, "sin", mono)] = -k * v
            else:
                t[(k, "cos", mono)] = k * v
        return TrigSeries._raw(t)

    def d_var(self, var: str) -> "TrigSeries":
        i = VARS.index(var)
        t = {}
        for (k, tr, mono), v in self._t.items():
            if mono[i]:
                new = list(mono)
                new[i] -= 2
                t[(k, tr, tuple(new))] = v * Fraction(mono[i], 2)
        return TrigSeries._raw(t)

    def evaluate(self, phi, I=1.0, m=1.0, k=1.0):
        phi = np.asarray(phi, dtype=float)
        out = np.zeros_like(phi)
        vals = (I, m, k)
        for (h, tr, mono), v in self._t.items():
            c = float(v)
            for base, e in zip(vals, mono):
                if e:
                    c *= base ** (e / 2)
            out = out + c * (np.cos(h * phi) if tr == "cos" else np.sin(h * phi))
        return out


@dataclass(frozen=True)
class PerturbationSeries:
    """``sum_{mu <= order} lam^mu * terms[mu]``."""

    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("a series needs at least the lam^0 term")

    @property
    def order(self) -> int:
        return len(self.terms) - 1

    @classmethod
    def zero(cls, order: int):
        return cls([TrigSeries() for _ in range(order + 1)])

    @classmethod
    def of(cls, t: TrigSeries, order: int, power: int = 0):
        terms = [TrigSeries() for _ in range(order + 1)]
        if power <= order:
            terms[power] = t
        return cls(terms)

    def __getitem__(self, mu) -> TrigSeries:
        return self.terms[mu]

    def __iter__(self) -> Iterator[TrigSeries]:
        return iter(self.terms)

    def _check(self, other):
        if self.order != other.order:
            raise OrderMismatch(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        self._check(other)
        return PerturbationSeries([a + b for a, b in zip(self.terms, other.terms)])

    def __neg__(self):
        return PerturbationSeries([-a for a in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PerturbationSeries):
            return series_product(self, other)
        if isinstance(other, TrigSeries):
            return PerturbationSeries([a * other for a in self.terms])
        return PerturbationSeries([a.scale(other) for a in self.terms])

    __rmul__ = __mul__

    def scale(self, s, mono: Monomial = ONE):
        return PerturbationSeries([a.scale(s, mono) for a in self.terms])

    def truncate(self, order: int):
        if order > self.order:
            raise OrderMismatch(f"cannot extend order {self.order} to {order}")
        return PerturbationSeries(self.terms[: order + 1])

    def times_lambda(self):
        """Multiply by ``lam``, dropping the term pushed past the truncation order."""
        return PerturbationSeries([TrigSeries()] + list(self.terms[:-1]))

    def d_phi(self):
        return PerturbationSeries([a.d_phi() for a in self.terms])

    def d_var(self, var: str):
        return PerturbationSeries([a.d_var(var) for a in self.terms])

    def is_zero(self) -> bool:
        return all(t.is_zero() for t in self.terms)

    def evaluate(self, phi, I=1.0, m=1.0, k=1.0, lam=0.0):
        phi = np.asarray(phi, dtype=float)
        total = np.zeros_like(phi)
        for mu, t in enumerate(self.terms):
            total = total + lam**mu * t.evaluate(phi, I, m, k)
        return total

    def averages(self) -> list[CoefficientPoly]:
        return series_average(self)


def series_product(a: PerturbationSeries, b: PerturbationSeries) -> PerturbationSeries:
    """Cauchy product truncated at the common order, trig products linearized."""
    if a.order != b.order:
        raise OrderMismatch(f"order mismatch: {a.order} vs {b.order}")
    n = a.order
    out = []
    for mu in range(n + 1):
        acc = TrigSeries()
        for nu in range(mu + 1):
            x, y = a.terms[nu], b.terms[mu - nu]
            if x.is_zero() or y.is_zero():
                continue
            acc = acc + x * y
        out.append(acc)
    return PerturbationSeries(out)


def series_average(a: PerturbationSeries) -> list[CoefficientPoly]:
    """Harmonic-0 part of every lam-order."""
    return [t.average() for t in a.terms]


def solve_homological(phi_mu: TrigSeries) -> TrigSeries:
    """Zero-average ``W`` with ``w0 dW/dphi0 = <Phi> - Phi``."""
    inv_w0 = (0, 1, -1)
    t = {}
    for (k, tr, mono), v in phi_mu.items():
        if k == 0:
            continue
        mono = _mono_mul(mono, inv_w0)
        if tr == "cos":
            t[(k, "sin", mono)] = -v / k
        else:
            t[(k, "cos", mono)] = v / k
    w = TrigSeries._raw(t)
    residual = phi_mu + w.d_phi().scale(1, W0)
    if residual.max_harmonic() != 0 or residual.average() != phi_mu.average():
        raise ArithmeticError("homological equation left a non-constant residue")
    return w


def _binomial(r: Fraction, j: int) -> Fraction:
    out = Fraction(1)
    for i in range(j):
        out = out * (r - i) / (i + 1)
    return out


def expand_action_power(u: PerturbationSeries, r) -> PerturbationSeries:
    """``I^r (1 + u)^r`` expanded binomially; ``u`` must vanish at lam^0."""
    r = Fraction(r)
    if not u.terms[0].is_zero():
        raise ValueError("u must have a zero lam^0 part")
    n = u.order
    power = PerturbationSeries.of(TrigSeries.constant(), n)
    total = PerturbationSeries.zero(n)
    for j in range(n + 1):
        c = _binomial(r, j)
        if c:
            total = total + power.scale(c)
        power = series_product(power, u)
    return total.scale(1, monomial(I=r))


def _is_unit(t: TrigSeries) -> bool:
    return t == TrigSeries.constant()


def series_reciprocal(a: PerturbationSeries) -> PerturbationSeries:
    """``1/a`` through the truncation order via the geometric series."""
    if not _is_unit(a.terms[0]):
        raise ValueError("reciprocal needs a lam^0 part equal to 1")
    n = a.order
    one = PerturbationSeries.of(TrigSeries.constant(), n)
    d = one - a
    total, power = one, one
    for _ in range(n):
        power = series_product(power, d)
        total = total + power
    return total


def param_derivative(a: PerturbationSeries, which: str) -> PerturbationSeries:
    """Derivative in ``m``, ``k``, ``I`` (monomial exponents) or ``lam`` (grading).

    The ``lam`` derivative loses one order of accuracy, so the result has
    order ``a.order - 1``.
    """
    if which in VARS:
        return a.d_var(which)
    if which in ("lam", "lambda"):
        if a.order == 0:
            raise OrderMismatch("cannot differentiate an order-0 series in lam")
        return PerturbationSeries([a.terms[mu].scale(mu) for mu in range(1, a.order + 1)])
    raise ValueError(f"unknown parameter {which!r}")


@dataclass(frozen=True)
class AngleMap:
    """``phi(phi0, I) = phi0 + dW/dI`` for a generating function ``W``."""

    W: PerturbationSeries

    @property
    def dphi_dphi0(self) -> PerturbationSeries:
        return (PerturbationSeries.of(TrigSeries.constant(), self.W.order)
                + self.W.d_var("I").d_phi())

    def dphi_dparam(self, which: str) -> PerturbationSeries:
        return param_derivative(self.W.d_var("I"), which)


def chain_derivative(F: PerturbationSeries, which: str, angle_map: AngleMap,
                     recip: PerturbationSeries | None = None) -> PerturbationSeries:
    """``(d_i F)`` at fixed ``(phi, I)`` from a function of ``(phi0, I)``.

    ``(d_i F)_{phi,I} = (d_i F)_{phi0,I} - (dF/dphi0) / (dphi/dphi0) * (d_i phi)_{phi0,I}``
    """
    dphi = angle_map.dphi_dparam(which)
    direct = param_derivative(F, which)
    n = min(direct.order, dphi.order, F.order)
    if recip is None:
        recip = series_reciprocal(angle_map.dphi_dphi0)
    corr = F.d_phi().truncate(n) * recip.truncate(n) * dphi.truncate(n)
    return direct.truncate(n) - corr


# --- the quartic oscillator ----------------------------------------------

PARAMS = ("m", "k", "lam")


@dataclass(frozen=True)
class QuarticSeries:
    """Everything the pipeline produces.

    ``W`` is ``sum_mu lam^mu W_mu`` (zero lam^0 term), ``Phi`` the sources of
    the homological equations, ``energy`` the averaged Hamiltonian ``H(I)``,
    ``G`` the generators in terms of ``phi0``, ``weight`` is
    ``dphi/dphi0`` and ``metric`` maps ``(i, j)`` (1-based, i <= j) to
    constant series.
    """

    W: PerturbationSeries
    Phi: tuple
    energy: tuple
    G: tuple
    weight: PerturbationSeries
    metric: dict = field(default_factory=dict)

    def metric_matrix(self, I=1.0, m=1.0, k=1.0, lam=0.0) -> np.ndarray:
        g = np.zeros((3, 3))
        for (i, j), s in self.metric.items():
            v = sum(lam**mu * t.average().evaluate(I, m, k) for mu, t in enumerate(s.terms))
            g[i - 1, j - 1] = g[j - 1, i - 1] = v
        return g

    def energy_value(self, I=1.0, m=1.0, k=1.0, lam=0.0) -> float:
        return sum(lam**mu * e.evaluate(I, m, k) for mu, e in enumerate(self.energy))

    def generators(self, phi0, I=1.0, m=1.0, k=1.0, lam=0.0) -> np.ndarray:
        return np.array([g.evaluate(phi0, I, m, k, lam) for g in self.G])

    def weights(self, phi0, I=1.0, m=1.0, k=1.0, lam=0.0) -> np.ndarray:
        return self.weight.evaluate(phi0, I, m, k, lam)


def _sin_pow4(order: int) -> PerturbationSeries:
    s = TrigSeries.term(1, "sin")
    return PerturbationSeries.of(s * s * s * s, order)


@lru_cache(maxsize=None)
def quartic_pipeline(order: int = 3) -> QuarticSeries:
    """Run canonical perturbation theory to ``order`` and assemble the metric.

    Generating functions are kept to ``lam^order``; generators and metric to
    ``lam^(order-1)`` because they involve a ``lam`` derivative.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    n = order
    sin4 = _sin_pow4(n)
    h1_pref = (Fraction(1, 6), monomial(m=-1, k=-1))  # q^4/24 = I0^2 sin^4 / (6 m k)
    W = PerturbationSeries.zero(n)
    Phi, energy = [], [CoefficientPoly({monomial(I=1, m=Fraction(-1, 2), k=Fraction(1, 2)): 1})]
    for mu in range(1, n + 1):
        u = W.d_phi().scale(1, monomial(I=-1))
        lam_h1 = (expand_action_power(u, 2) * sin4).scale(*h1_pref).times_lambda()
        phi_mu = lam_h1.terms[mu]
        w_mu = solve_homological(phi_mu)
        Phi.append(phi_mu)
        energy.append(phi_mu.average())
        terms = list(W.terms)
        terms[mu] = w_mu
        W = PerturbationSeries(terms)

    u = W.d_phi().scale(1, monomial(I=-1))
    root = expand_action_power(u, Fraction(1, 2))  # (I0)^(1/2)
    q_t = root * TrigSeries.term(1, "sin")  # q = (2/(m w0))^(1/2) q_t
    p_t = root * TrigSeries.term(1, "cos")  # p = (2 m w0)^(1/2) p_t
    sc = TrigSeries.term(2, "sin", Fraction(1, 2))
    s_t = expand_action_power(u, 1) * sc + W  # S = s_t + phi0 * I

    amap = AngleMap(W)
    weight = amap.dphi_dphi0
    recip = series_reciprocal(weight)
    # log-derivatives of the (2/(m w0))^(1/2) = sqrt(2) m^(-1/4) k^(-1/4) prefactor
    log_pref = {"m": (Fraction(-1, 4), monomial(m=-1)), "k": (Fraction(-1, 4), monomial(k=-1))}
    G = []
    for which in PARAMS:
        dq = chain_derivative(q_t, which, amap, recip)
        nq = dq.order
        if which in log_pref:
            dq = dq + q_t.truncate(nq).scale(*log_pref[which])
        p_dq = (p_t.truncate(nq) * dq).scale(2)
        dS = chain_derivative(s_t, which, amap, recip)
        dphi = amap.dphi_dparam(which)
        nd = min(dphi.order, n)
        phase_term = (recip.truncate(nd) * dphi.truncate(nd)).scale(1, monomial(I=1))
        g = p_dq.truncate(n - 1) - dS.truncate(n - 1) + phase_term.truncate(n - 1)
        G.append(g)

    wt = weight.truncate(n - 1)
    means = [series_average(g * wt) for g in G]
    metric = {}
    for i in range(3):
        for j in range(i, 3):
            second = series_average(G[i] * G[j] * wt)
            prod = series_product(_constant_series(means[i]), _constant_series(means[j]))
            g_ij = PerturbationSeries([TrigSeries.from_parts({(0, "cos"): c})
                                       for c in second]) - prod
            metric[(i + 1, j + 1)] = g_ij
    return QuarticSeries(W, tuple(Phi), tuple(energy), tuple(G), weight, metric)


def _constant_series(polys) -> PerturbationSeries:
    return PerturbationSeries([TrigSeries.from_parts({(0, "cos"): c}) for c in polys])


# --- dump format -----------------------------------------------------------

def dump_entries(s: PerturbationSeries) -> list[dict]:
    out = []
    for mu, t in enumerate(s.terms):
        for (k, tr, mono), v in t.items():
            out.append({"order": mu, "harmonic": k, "trig": tr,
                        "num": v.numerator, "den": v.denominator,
                        "e2_I": mono[0], "e2_m": mono[1], "e2_k": mono[2]})
    out.sort(key=lambda e: (e["order"], e["harmonic"], e["trig"], e["e2_I"], e["e2_m"], e["e2_k"]))
    return out


def dump_json(named: Mapping[str, PerturbationSeries]) -> str:
    """Byte-stable JSON of several named series."""
    payload = {name: dump_entries(s) for name, s in named.items()}
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def pipeline_dump(target: str, order: int = 3) -> str:
    res = quartic_pipeline(order)
    if target == "W":
        named = {"W": res.W}
    elif target == "G":
        named = {f"G{i + 1}": g for i, g in enumerate(res.G)}
    elif target == "metric":
        named = {f"g{i}{j}": s for (i, j), s in res.metric.items()}
    else:
        raise KeyError(target)
    return dump_json(named)
