"""Plane-wave parametrices for wave equations on prescribed curved spacetimes.

Desk-scale numerical machinery: eikonal phases by null-geodesic transport,
half-wave oscillatory integrals with dyadic frequency/angle localization,
initial-data matching, Duhamel correction, and quantitative checks of
dispersive decay, Strichartz scaling, energy identities and geometric
Littlewood-Paley calculus.
"""

from .grids import GridField, GridSpec, finite_diff, mixed_norm
from .metrics import MetricSampler, make_metric

__all__ = [
    "GridField",
    "GridSpec",
    "finite_diff",
    "mixed_norm",
    "MetricSampler",
    "make_metric",
]

__version__ = "0.1.0"
