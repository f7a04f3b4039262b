"""Hyperbolic Dehn filling certificates computed from slope lengths and cone-angle families."""
from .certificates import Certificate, Verdict
from .constants import CONSTANTS_VERSION
from .family_ode import (
    MODEL_BOUNDS,
    ComplexLength,
    ConeFamilyState,
    FamilyTrace,
    Status,
    drilling_certificate,
    init_family,
    integrate_to,
    model_complex_length,
    step,
    volume_change_bounds,
)
from .flat_torus import (
    CuspShape,
    Slope,
    WeightedClass,
    enumerate_slopes,
    extremal_length,
    normalized_length,
    reduce_shape,
    shape_from_modulus,
    shape_from_record,
)
from .harmonic_bounds import (
    BoundaryForm,
    ErrorInterval,
    L2BoundReport,
    b00_upper,
    bmm,
    error_interval,
    l2_upper,
    slice_max,
)
from .slope_census import (
    CertifyConfig,
    GridConfig,
    ModuliSearchResult,
    certify_fill,
    count_excluded,
    hds_region,
    max_excluded_over_moduli,
)
from .tube import RadiusFloor, TubeBoundary, radius_floor, tube_boundary

__version__ = "0.1.0"
