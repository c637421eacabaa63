"""Classical and quantum parameter-space geometry of adiabatic oscillators.

The classical metric is the angle covariance of the generators ``G_i`` of
parameter displacements at fixed action-angle variables; its quantum
counterpart is the metric of eigenstate overlaps. Closed forms cover the
generalized harmonic oscillator (with and without a linear term); the
quartic oscillator is handled by exact canonical perturbation theory.
"""

from .geometry import (AliasingError, DomainError, GeneratorSamples, MetricTensor, OneForm,
                       ParameterPoint, TwoForm, angle_average, angle_grid,
                       connection_from_generators, curvature_from_phase_space_derivatives,
                       matrix_rank, metric_from_generators, restrict_metric, transform_metric)
from .models import GHO, GHOLIN, MODELS, PhaseState, gho_point, gholin_point
from .quantum import QuantumLevel, quartic_point
from .series import quartic_pipeline

__version__ = "0.1.0"
