import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from adiageo.geometry import DomainError, matrix_rank, restrict_metric
from adiageo.models import GHO, GHOLIN, gho_point, gholin_point
from adiageo.quantum import (QUARTIC_QUANTUM_SERIES, QuantumLevel, WavefunctionSampler, WindowError,
                             _quartic_polys, berry_connection_numeric, energy_expectation,
                             gho_berry, gho_quantum_metric, gho_wavefunction, gholin_berry,
                             gholin_quantum_metric, identification_table,
                             operator_metric_and_connection, quantum_metric_numeric,
                             quartic_coupling, quartic_energy, quartic_ground_state, quartic_point,
                             quartic_quantum_metric_closed, simpson_weights)
from adiageo.verify import random_gho, random_gholin

X0 = gho_point(1.0, 0.0, 1.0)
XL = gholin_point(1.0, 1.0, 0.0, 1.0)
levels = st.builds(QuantumLevel, st.integers(0, 4), st.floats(0.2, 3.0))
ws = st.floats(0.7, 2.5)
ys = st.floats(-1.5, 1.5)
zs = st.floats(0.3, 2.5)
lins = st.floats(-1.5, 1.5)


def gho_from(w, y, z):
    return gho_point((w * w + y * y) / z, y, z)


def curl_of(connection, x, names):
    """Central-difference ``d_i A_j - d_j A_i``."""
    n = len(names)
    dA = np.zeros((n, n))
    for i, name in enumerate(names):
        h = 1e-5 * (1 + abs(float(x[name])))
        up = connection(x.replace(name, float(x[name]) + h)).components
        dn = connection(x.replace(name, float(x[name]) - h)).components
        dA[i] = (np.asarray(up, float) - np.asarray(dn, float)) / (2 * h)
    return dA - dA.T


class TestLevel:
    def test_c_and_action(self):
        lvl = QuantumLevel(2, 0.5)
        assert lvl.c == Fraction(5, 2) and lvl.bohr_sommerfeld_action == 1.25

    @pytest.mark.parametrize("n, hbar", [(-1, 1.0), (0.5, 1.0), (0, 0.0)])
    def test_invalid(self, n, hbar):
        with pytest.raises(ValueError):
            QuantumLevel(n, hbar)


class TestGHOClosedForms:
    def test_g11_ground_and_first(self):
        assert gho_quantum_metric(QuantumLevel(0), X0)[0, 0] == pytest.approx(1 / 32, abs=1e-16)
        assert gho_quantum_metric(QuantumLevel(1), X0)[0, 0] == pytest.approx(3 / 32, abs=1e-16)

    def test_berry_values(self):
        A, F = gho_berry(QuantumLevel(0), X0)
        assert A[1] == pytest.approx(0.25, abs=1e-16)
        assert F[0, 1] == pytest.approx(-0.125, abs=1e-16)

    def test_exact(self):
        x = gho_point(Fraction(5, 4), Fraction(1, 2), Fraction(1))  # w = 1
        assert gho_quantum_metric(QuantumLevel(0), x)[0, 0] == Fraction(1, 32)

    @given(levels, ws, ys, zs)
    def test_rank_two(self, lvl, w, y, z):
        g = gho_quantum_metric(lvl, gho_from(w, y, z))
        assert abs(g.determinant()) <= 1e-12 * np.abs(g.as_float()).max() ** 3
        assert g.is_psd()

    def test_curvature_is_exterior_derivative(self, rng):
        lvl = QuantumLevel(1, 0.8)
        for _ in range(10):
            x = random_gho(rng)
            F = gho_berry(lvl, x)[1].components
            dA = curl_of(lambda y: gho_berry(lvl, y)[0], x, GHO.names)
            assert np.abs(dA - np.asarray(F, float)).max() < 1e-8


class TestGHOLinearClosedForms:
    def test_values(self):
        lvl = QuantumLevel(0, 1.0)
        assert gholin_quantum_metric(lvl, XL)[0, 0] == pytest.approx(0.5, abs=1e-16)
        assert gholin_berry(lvl, XL)[0][2] == pytest.approx(0.75, abs=1e-16)

    @given(levels, ws, ys, zs)
    def test_w_zero_reduces_to_gho(self, lvl, w, y, z):
        xg = gho_from(w, y, z)
        xl = gholin_point(0.0, xg["X"], y, z)
        g = gholin_quantum_metric(lvl, xl).as_float()
        assert np.all(g[0, 1:] == 0)
        assert np.allclose(g[1:, 1:], gho_quantum_metric(lvl, xg).as_float(), rtol=1e-13, atol=0)
        A, F = gholin_berry(lvl, xl)
        Ag, Fg = gho_berry(lvl, xg)
        assert np.allclose(np.asarray(A.components, float)[1:], np.asarray(Ag.components, float),
                           rtol=1e-13, atol=1e-15)
        assert np.allclose(np.asarray(F.components, float)[1:, 1:], np.asarray(Fg.components, float),
                           rtol=1e-13, atol=1e-15)

    def test_curvature_is_exterior_derivative(self, rng):
        lvl = QuantumLevel(2, 1.3)
        for _ in range(10):
            x = random_gholin(rng)
            F = np.asarray(gholin_berry(lvl, x)[1].components, float)
            dA = curl_of(lambda y: gholin_berry(lvl, y)[0], x, GHOLIN.names)
            assert np.abs(dA - F).max() < 1e-7 * max(1, np.abs(F).max())

    def test_rank_three(self, rng):
        for _ in range(10):
            g = gholin_quantum_metric(QuantumLevel(0), random_gholin(rng))
            assert matrix_rank(g) == 3 and g.is_psd()


class TestOperatorForm:
    def test_matches_closed_forms(self, rng):
        for _ in range(20):
            lvl = QuantumLevel(int(rng.integers(0, 4)), float(rng.uniform(0.3, 2)))
            x = random_gholin(rng)
            g, A = operator_metric_and_connection(lvl, x)
            ref = gholin_quantum_metric(lvl, x).as_float()
            assert np.abs(g.as_float() - ref).max() <= 1e-12 * np.abs(ref).max()
            assert np.allclose(A.components, gholin_berry(lvl, x)[0].components, rtol=1e-12, atol=1e-14)

    def test_exact_at_rational_point(self):
        x = gholin_point(Fraction(1, 2), Fraction(5, 4), Fraction(1, 2), Fraction(1))
        lvl = QuantumLevel(1, Fraction(1, 3))
        g, A = operator_metric_and_connection(lvl, x)
        assert np.array_equal(g.components, gholin_quantum_metric(lvl, x).components)
        assert np.array_equal(A.components, gholin_berry(lvl, x)[0].components)

    def test_w_and_y_zero(self):
        x = gholin_point(0.0, 2.0, 0.0, 0.5)
        lvl = QuantumLevel(0)
        g, A = operator_metric_and_connection(lvl, x)
        assert np.allclose(g.as_float(), gholin_quantum_metric(lvl, x).as_float(), rtol=1e-14, atol=0)
        assert A[3] == 0

    def test_rejects_gho_point(self):
        with pytest.raises(DomainError):
            operator_metric_and_connection(QuantumLevel(0), X0)


class TestOverlapOracle:
    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_gho(self, rng, n):
        for _ in range(3):
            x = random_gho(rng)
            ref = gho_quantum_metric(QuantumLevel(n), x).as_float()
            got = quantum_metric_numeric(gho_wavefunction(n), x).as_float()
            assert np.abs(got - ref).max() <= 1e-6 * max(1, np.abs(ref).max())

    @pytest.mark.parametrize("n", [0, 1])
    def test_gholin(self, rng, n):
        for _ in range(3):
            lvl, x = QuantumLevel(n, 0.8), random_gholin(rng)
            ref = gholin_quantum_metric(lvl, x).as_float()
            got = quantum_metric_numeric(gho_wavefunction(n), x, 0.8).as_float()
            assert np.abs(got - ref).max() <= 1e-6 * max(1, np.abs(ref).max())
            A = berry_connection_numeric(gho_wavefunction(n), x, 0.8).components
            assert np.allclose(A, gholin_berry(lvl, x)[0].components, rtol=1e-6, atol=1e-8)

    @pytest.mark.parametrize("lam", [0.0, 0.005, 0.01])
    def test_quartic(self, lam):
        x = quartic_point(1.0, 1.0, lam)
        sampler, _ = quartic_ground_state(x)
        got = quantum_metric_numeric(sampler, x).as_float()
        ref = quartic_quantum_metric_closed(x).as_float()
        assert np.abs(got - ref).max() < 1e-5

    def test_window_too_small(self):
        base = gho_wavefunction(0)
        narrow = WavefunctionSampler(base.psi, lambda v, hbar: (0.0, 0.5), 201)
        with pytest.raises(WindowError, match="window"):
            quantum_metric_numeric(narrow, X0)

    def test_simpson(self):
        q = np.linspace(0, 1, 11)
        assert np.sum(simpson_weights(q) * q**3) == pytest.approx(0.25, abs=1e-15)
        with pytest.raises(ValueError):
            simpson_weights(np.linspace(0, 1, 10))


class TestQuarticGroundState:
    def test_warns_outside_perturbative_regime(self):
        with pytest.warns(RuntimeWarning, match="perturbative regime exceeded"):
            quartic_ground_state(quartic_point(1.0, 1.0, 2.0))

    def test_silent_inside(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            quartic_ground_state(quartic_point(1.0, 1.0, 0.01))

    def test_energy_depends_on_coupling_only(self):
        # E / (hbar w0) is a function of hbar lam / (m^2 w0^3) alone
        a, b = quartic_point(1.0, 1.0, 0.06), quartic_point(2.0, 8.0, 0.06 * 4 * 8)
        c = quartic_point(1.0, 1.0, 0.12)
        assert quartic_coupling(a) == pytest.approx(quartic_coupling(b), rel=1e-14)
        assert quartic_coupling(a) == pytest.approx(quartic_coupling(c, 0.5), rel=1e-14)
        assert quartic_energy(a) == pytest.approx(quartic_energy(b) / 2.0, rel=1e-14)
        assert quartic_energy(a) == pytest.approx(quartic_energy(c, 0.5) / 0.5, rel=1e-14)

    def test_energy_first_order(self):
        x = quartic_point(Fraction(1), Fraction(4), Fraction(0))
        assert quartic_energy(x) == 1
        lam = Fraction(1, 100)
        e = quartic_energy(quartic_point(Fraction(1), Fraction(1), lam))
        assert e - Fraction(1, 2) - lam / 32 == -7 * lam**2 / 1536 + 37 * lam**3 / 24576

    @pytest.mark.parametrize("lam", [0.001, 0.005, 0.01])
    def test_rayleigh_quotient(self, lam):
        m, k = 1.0, 1.0
        x = quartic_point(m, k, lam)
        sampler, E = quartic_ground_state(x)
        V = lambda q: k * q**2 / 2 + lam * q**4 / 24
        assert energy_expectation(sampler, x, 1.0, m, V) == pytest.approx(E, abs=1e-9)

    def test_schrodinger_residual(self):
        # (H - E) psi vanishes through lam^3 for symbolic m, w0, hbar
        q, m, w, hb, lam = sp.symbols("q m w0 hbar lam", positive=True)
        p1, p2, p3 = _quartic_polys(q, m, w, hb)
        quarter = sp.Rational(1, 4)
        bracket = ((m * w / (sp.pi * hb)) ** quarter
                   - lam * p1 / (384 * (sp.pi * m**7 * w**11 * hb**5) ** quarter)
                   + lam**2 * p2 / (884736 * (sp.pi * m**15 * w**23 * hb**9) ** quarter)
                   - lam**3 * p3 / (339738624 * (sp.pi * m**23 * w**35 * hb**13) ** quarter))
        psi = sp.exp(-m * w * q**2 / (2 * hb)) * bracket
        E = (hb * w / 2 + hb**2 * lam / (32 * m**2 * w**2) - 7 * hb**3 * lam**2 / (1536 * m**4 * w**5)
             + 37 * hb**4 * lam**3 / (24576 * m**6 * w**8))
        res = (-hb**2 / (2 * m) * sp.diff(psi, q, 2)
               + (m * w**2 * q**2 / 2 + lam * q**4 / 24 - E) * psi)
        res = sp.expand(sp.simplify(res * sp.exp(m * w * q**2 / (2 * hb))))
        poly = sp.Poly(res, lam)
        for (power,), coeff in poly.terms():
            if power <= 3:
                assert sp.simplify(coeff) == 0
        assert poly.degree() >= 4


class TestIdentification:
    def test_leading_orders(self):
        table = {(r.component, r.order): r for r in identification_table()}
        for comp in ((1, 1), (1, 2), (2, 2)):
            assert table[(comp, 0)].ratio == 1 and table[(comp, 0)].power == 2
            assert table[(comp, 1)].ratio == Fraction(3, 2)
        assert table[((1, 3), 0)].ratio == Fraction(3, 2)
        assert table[((3, 3), 0)].ratio == Fraction(12, 5)

    def test_no_single_identification(self):
        # one rule I^p -> r hbar^p would give a single ratio per power
        ratios = {r.ratio for r in identification_table() if r.power == 4}
        assert len(ratios) > 1

    def test_fourth_power_ratios_match_listed_values(self):
        listed = [2.4, 2.43, 2.44, 2.45, 2.47, 2.51]
        got = sorted(float(r.ratio) for r in identification_table() if r.power == 4)
        assert len(got) == len(listed)
        assert all(abs(a - b) <= 0.01 for a, b in zip(got, listed))

    def test_covers_every_coefficient(self):
        table = identification_table()
        assert len(table) == 3 * len(QUARTIC_QUANTUM_SERIES)
        assert all(r.ratio > 0 for r in table)
        assert table[0].label == "g11 lam^0"

    def test_quantum_metric_leading_order_matches_gho_shape(self):
        x = quartic_point(1.0, 1.0, 0.0)
        g = quartic_quantum_metric_closed(x).as_float()
        assert g[0, 0] == pytest.approx(1 / 32) and g[0, 1] == pytest.approx(1 / 32)
        assert g[2, 2] == pytest.approx(13 / 6144)

    def test_restrict_quartic(self):
        g = quartic_quantum_metric_closed(quartic_point(1.0, 1.0, 0.0))
        assert restrict_metric(g, [0, 1]).determinant() == pytest.approx(0.0, abs=1e-18)
