"""Published quartic-oscillator series, transcribed as exact rationals.

Every entry is ``(harmonic, trig, numerator)`` over a common denominator and
a monomial ``I^a m^b k^c``. Products such as ``sin^3(cos 3phi - 2 cos phi)``
are stored linearized. ``w0 = (k/m)^(1/2)`` is already eliminated.
"""

from __future__ import annotations

from fractions import Fraction

from .series import PerturbationSeries, TrigSeries, monomial


def _sines(den, nums, harmonics=None, **mono):
    harmonics = harmonics or range(2, 2 * len(nums) + 1, 2)
    m = monomial(**mono)
    t = TrigSeries()
    for h, n in zip(harmonics, nums):
        t = t + TrigSeries.term(h, "sin", Fraction(n, den), m)
    return t


def _const(coeff, **mono):
    return TrigSeries.constant(Fraction(coeff), monomial(**mono))


H = Fraction(1, 2)

# lam^1 .. lam^3 parts of the angle generating function
W_TERMS = (
    _sines(192, (8, -1), I=2, m=-H, k=-3 * H),
    _sines(55296, (-384, 132, -32, 3), I=3, m=-1, k=-3),
    _sines(5308416, (9264, -4101, 1624, -441, 72, -5), I=4, m=-3 * H, k=-9 * H),
)

# alpha_{i mu}: generators in terms of phi0, index order (m, k, lam)
ALPHA = (
    (_sines(4, (-1,), I=1, m=-1),
     _sines(384, (7, -5, 1), I=2, m=-3 * H, k=-3 * H),
     _sines(55296, (-318, 204, -95, 27, -3), I=3, m=-2, k=-3)),
    (_sines(4, (-1,), I=1, k=-1),
     _sines(384, (23, -7, 1), I=2, m=-H, k=-5 * H),
     _sines(18432, (-362, 156, -53, 11, -1), I=3, m=-1, k=-4)),
    (_sines(192, (-8, 1), I=2, m=-H, k=-3 * H),
     _sines(27648, (384, -132, 32, -3), I=3, m=-1, k=-3),
     _sines(1769472, (-9264, 4101, -1624, 441, -72, 5), I=4, m=-3 * H, k=-9 * H)),
)

# classical metric through lam^2, keys 1-based (i, j) with i <= j
METRIC = {
    (1, 1): (_const("1/32", I=2, m=-2), _const("-1/256", I=3, m=-5 * H, k=-3 * H),
             _const("47/32768", I=4, m=-3, k=-3)),
    (1, 2): (_const("1/32", I=2, m=-1, k=-1), _const("-7/768", I=3, m=-3 * H, k=-5 * H),
             _const("347/98304", I=4, m=-2, k=-4)),
    (1, 3): (_const("1/192", I=3, m=-3 * H, k=-3 * H), _const("-103/49152", I=4, m=-2, k=-3),
             _const("15/16384", I=5, m=-5 * H, k=-9 * H)),
    (2, 2): (_const("1/32", I=2, k=-2), _const("-11/768", I=3, m=-H, k=-7 * H),
             _const("1919/294912", I=4, m=-1, k=-5)),
    (2, 3): (_const("1/192", I=3, m=-H, k=-5 * H), _const("-439/147456", I=4, m=-1, k=-4),
             _const("7/4608", I=5, m=-3 * H, k=-11 * H)),
    (3, 3): (_const("65/73728", I=4, m=-1, k=-3), _const("-89/147456", I=5, m=-3 * H, k=-9 * H),
             _const("130621/382205952", I=6, m=-2, k=-6)),
}

# averaged first-order source, I^2 / (16 m^2 w0^2)
FIRST_ORDER_ENERGY = _const("1/16", I=2, m=-1, k=-1)


def printed_W() -> PerturbationSeries:
    return PerturbationSeries((TrigSeries(),) + W_TERMS)


def printed_G() -> tuple[PerturbationSeries, ...]:
    return tuple(PerturbationSeries(a) for a in ALPHA)


def printed_metric() -> dict:
    return {ij: PerturbationSeries(s) for ij, s in METRIC.items()}


def printed_named(target: str) -> dict:
    """Named series in the same layout as :func:`adiageo.series.pipeline_dump`."""
    if target == "W":
        return {"W": printed_W()}
    if target == "G":
        return {f"G{i + 1}": g for i, g in enumerate(printed_G())}
    if target == "metric":
        return {f"g{i}{j}": s for (i, j), s in printed_metric().items()}
    raise KeyError(target)
