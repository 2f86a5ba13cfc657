"""Exact computations for hyperbolic toral automorphisms, their sphere factor, and the blown-up carpet."""

from .exactlat import CAT_MAP, EigenData, IntMatrix2, QuadNumber, mat_pow, quad_eigen, smith_normal_form
from .toral import TorusPoint, antipodal_periodic_points, per_counts, periodic_points
from .sphere import SpherePoint, project, sphere_apply, sphere_metric, sphere_periodic_points
from .shadowing import (
    PseudoOrbit,
    ShadowResult,
    SpecificationRequest,
    connect_segments,
    make_pseudo_orbit,
    periodic_specification,
    shadow_periodic,
    shadow_periodic_sphere,
)
from .measures import (
    BowenBall,
    EmpiricalMeasure,
    ball_mass,
    character_integral,
    discrepancy,
    homogeneity_probe,
    periodic_measure,
)
from .entropy import entropy_estimate, periodic_growth, separated_set
from .carpet import (
    BlowupRegistry,
    carpet_apply,
    carpet_periodic_count,
    carpet_periodic_measure,
    make_registry,
    registry_from_periods,
    validate_registry,
)

__version__ = "0.1.0"
