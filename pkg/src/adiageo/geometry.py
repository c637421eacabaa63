"""Parameter-space geometry assembled from angle-sampled generators.

Everything here is model-agnostic: a model supplies the generator values
``G_i(phi, I; x)`` on a uniform angle grid and this module turns them into
the metric ``<G_i G_j> - <G_i><G_j>``, the connection ``<G_i>`` and the
curvature of that connection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Real
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "AliasingError",
    "ParameterPoint",
    "GeneratorSamples",
    "MetricTensor",
    "OneForm",
    "TwoForm",
    "angle_grid",
    "angle_average",
    "metric_from_generators",
    "connection_from_generators",
    "curvature_from_phase_space_derivatives",
    "transform_metric",
    "restrict_metric",
    "matrix_rank",
    "register_domain",
]

DEFAULT_GRID = 64
PSD_RTOL = 1e-12
RANK_RTOL = 1e-10
ALIAS_TOL = 1e-10


class DomainError(ValueError):
    """A parameter point lies outside the model's domain."""


class AliasingError(ValueError):
    """The angle grid is too coarse for the harmonics being averaged."""


_DOMAINS: dict[str, Callable[[dict], str | None]] = {}


def register_domain(model: str, predicate: Callable[[dict], str | None]) -> None:
    """Register the domain predicate for ``model``.

    The predicate gets ``{name: value}`` and returns ``None`` when the point
    is admissible, otherwise a short reason.
    """
    _DOMAINS[model] = predicate


@dataclass(frozen=True)
class ParameterPoint:
    """Named point on the parameter manifold.

    Values may be floats or :class:`fractions.Fraction`; exact inputs flow
    through the closed-form models untouched.
    """

    names: tuple[str, ...]
    values: tuple
    model: str = "generic"

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.names) != len(self.values):
            raise ValueError("names and values differ in length")
        for name, v in zip(self.names, self.values):
            if not math.isfinite(float(v)):
                raise DomainError(f"parameter {name} is not finite: {v!r}")
        predicate = _DOMAINS.get(self.model)
        if predicate is not None:
            reason = predicate(self.as_dict())
            if reason:
                raise DomainError(f"{self.model} point {self.as_dict()} rejected: {reason}")

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.values))

    def __getitem__(self, name: str):
        return self.values[self.names.index(name)]

    def index(self, name: str) -> int:
        return self.names.index(name)

    def replace(self, name: str | int, value) -> "ParameterPoint":
        i = name if isinstance(name, int) else self.names.index(name)
        values = list(self.values)
        values[i] = value
        return ParameterPoint(self.names, values, self.model)

    def __len__(self):
        return len(self.values)


def angle_grid(m: int) -> np.ndarray:
    """``m`` uniformly spaced angles on [0, 2pi), first node at zero."""
    if m < 1:
        raise ValueError("empty grid")
    return 2.0 * np.pi * np.arange(m) / m


@dataclass(frozen=True)
class GeneratorSamples:
    """Values of ``G_i`` on a uniform angle grid, shape ``(N, M)``.

    ``weights`` optionally carries a Jacobian ``d(phi)/d(phi_0)`` when the
    grid is uniform in an auxiliary angle rather than the true angle.
    """

    values: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", v)
        if v.shape[1] == 0:
            raise ValueError("empty grid")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (v.shape[1],):
                raise ValueError("weights must match the angle grid")
            object.__setattr__(self, "weights", w)

    @property
    def n_params(self) -> int:
        return self.values.shape[0]

    @property
    def grid(self) -> np.ndarray:
        return angle_grid(self.values.shape[1])

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], m: int = DEFAULT_GRID,
                      weight_fn: Callable[[np.ndarray], np.ndarray] | None = None):
        phi = angle_grid(m)
        weights = None if weight_fn is None else weight_fn(phi)
        return cls(np.asarray(fn(phi), dtype=float), weights)


def angle_average(samples, weights=None) -> float | np.ndarray:
    """Rectangle-rule average over one period of a uniform grid.

    Exact for trigonometric polynomials whose highest harmonic is below the
    number of samples. Averages along the last axis.
    """
    s = np.asarray(samples, dtype=float)
    if s.size == 0 or s.shape[-1] == 0:
        raise ValueError("empty grid")
    if weights is not None:
        s = s * weights
    return s.mean(axis=-1)


@dataclass(frozen=True)
class MetricTensor:
    """Symmetric N x N metric at ``point``; ``action`` is None on the quantum side."""

    components: np.ndarray
    point: ParameterPoint | None = None
    action: Real | None = None

    def __post_init__(self):
        g = np.asarray(self.components)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"metric must be square, got shape {g.shape}")
        if not np.all(g == g.T):
            raise ValueError("metric is not symmetric")
        object.__setattr__(self, "components", g)

    @property
    def n(self) -> int:
        return self.components.shape[0]

    def as_float(self) -> np.ndarray:
        return np.asarray(self.components, dtype=float)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.as_float())

    def is_psd(self, rtol: float = PSD_RTOL) -> bool:
        g = self.as_float()
        scale = np.abs(g).max(initial=0.0)
        return bool(self.eigenvalues().min(initial=0.0) >= -rtol * scale)

    def determinant(self) -> float:
        return float(np.linalg.det(self.as_float()))

    def __getitem__(self, ij):
        return self.components[ij]


@dataclass(frozen=True)
class OneForm:
    components: np.ndarray
    point: ParameterPoint | None = None
    action: Real | None = None

    def __post_init__(self):
        object.__setattr__(self, "components", np.asarray(self.components))

    def __getitem__(self, i):
        return self.components[i]


@dataclass(frozen=True)
class TwoForm:
    """Antisymmetric curvature components ``F_ij``."""

    components: np.ndarray
    point: ParameterPoint | None = None
    action: Real | None = None

    def __post_init__(self):
        f = np.asarray(self.components)
        if f.ndim != 2 or f.shape[0] != f.shape[1]:
            raise ValueError("curvature must be square")
        if not np.all(f == -f.T):
            raise ValueError("curvature is not antisymmetric")
        object.__setattr__(self, "components", f)

    def __getitem__(self, ij):
        return self.components[ij]


def _raw_metric(values: np.ndarray, weights: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
    mean = angle_average(values, weights)
    m = values.shape[1]
    w = np.ones(m) if weights is None else weights
    second = (values * w) @ values.T / m
    second = 0.5 * (second + second.T)
    return second, mean


def metric_from_generators(gs: GeneratorSamples, point=None, action=None, *,
                           refine: Callable[[int], GeneratorSamples] | None = None,
                           alias_tol: float = ALIAS_TOL) -> MetricTensor:
    """Covariance ``<G_i G_j> - <G_i><G_j>`` of the sampled generators.

    When ``refine`` is given it must resample the same generators on a grid of
    the requested size; the metric is then recomputed on twice as many nodes
    and :class:`AliasingError` is raised if any component moves by more than
    ``alias_tol``.
    """
    second, mean = _raw_metric(gs.values, gs.weights)
    g = second - np.outer(mean, mean)
    g = 0.5 * (g + g.T)
    if refine is not None:
        fine = refine(2 * gs.values.shape[1])
        s2, m2 = _raw_metric(fine.values, fine.weights)
        g2 = s2 - np.outer(m2, m2)
        err = np.abs(0.5 * (g2 + g2.T) - g).max()
        if err > alias_tol:
            raise AliasingError(f"aliasing: grid doubling changed the metric by {err:.3e}")
    return MetricTensor(g, point, action)


def raw_second_moment(gs: GeneratorSamples) -> np.ndarray:
    """``<G_i G_j>`` alone (not gauge invariant)."""
    return _raw_metric(gs.values, gs.weights)[0]


def connection_from_generators(gs: GeneratorSamples, point=None, action=None) -> OneForm:
    return OneForm(angle_average(gs.values, gs.weights), point, action)


def curvature_from_phase_space_derivatives(dp, dq, point=None, action=None) -> TwoForm:
    """``F_ij = <(d_i p)(d_j q) - (d_j p)(d_i q)>`` from ``(N, M)`` sample matrices."""
    dp = np.atleast_2d(np.asarray(dp, dtype=float))
    dq = np.atleast_2d(np.asarray(dq, dtype=float))
    if dp.shape != dq.shape:
        raise ValueError(f"shape mismatch: {dp.shape} vs {dq.shape}")
    if dp.shape[1] == 0:
        raise ValueError("empty grid")
    c = dp @ dq.T / dp.shape[1]
    return TwoForm(c - c.T, point, action)


def transform_metric(g: MetricTensor, jacobian, point=None) -> MetricTensor:
    """Pull back ``g`` through ``jacobian[k, i] = dx^k / dy^i``."""
    j = np.asarray(jacobian, dtype=float)
    if j.shape != (g.n, g.n):
        raise ValueError(f"jacobian must be {g.n}x{g.n}")
    scale = np.abs(j).max(initial=0.0) ** g.n
    if scale == 0.0 or abs(np.linalg.det(j)) < 1e-14 * scale:
        raise ValueError("singular jacobian")
    out = j.T @ g.as_float() @ j
    return MetricTensor(0.5 * (out + out.T), point if point is not None else g.point, g.action)


def restrict_metric(g: MetricTensor, kept: Sequence[int]) -> MetricTensor:
    """Principal submatrix on the ``kept`` parameter indices."""
    kept = list(kept)
    if not kept:
        raise ValueError("empty index set")
    if len(set(kept)) != len(kept) or min(kept) < 0 or max(kept) >= g.n:
        raise ValueError(f"bad index set {kept} for a {g.n}x{g.n} metric")
    sub = g.components[np.ix_(kept, kept)]
    point = None
    if g.point is not None:
        names = tuple(g.point.names[i] for i in kept)
        values = tuple(g.point.values[i] for i in kept)
        point = ParameterPoint(names, values, f"{g.point.model}[{','.join(names)}]")
    return MetricTensor(sub, point, g.action)


def matrix_rank(g: MetricTensor | np.ndarray, rel_tol: float = RANK_RTOL) -> int:
    """Number of singular values above ``rel_tol`` times the largest."""
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must lie in (0, 1)")
    a = g.as_float() if isinstance(g, MetricTensor) else np.asarray(g, dtype=float)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))
