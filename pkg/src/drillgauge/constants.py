"""Published constants, versioned as a single table.

Every threshold comparison in the package reads from here so that the values
can be audited in one place.
"""
import math

CONSTANTS_VERSION = "HK-exposition"

#: cone-angle family: tube radius floor and the alpha*ell cap under which it holds
TUBE_RADIUS_FLOOR = 0.531
PRODUCT_CAP = 1.019

#: single-cusp filling threshold and the number of slopes it can exclude
FILL_THRESHOLD = 7.515
SINGLE_CUSP_EXCLUSIONS = 60

#: multi-cusp threshold as printed (7.515 * sqrt(2) rounded down)
MULTI_CUSP_THRESHOLD = 10.627
MULTI_CUSP_EXCLUSIONS = 114
#: the exact multi-cusp hypothesis, used for certification
MULTI_CUSP_THRESHOLD_EXACT = FILL_THRESHOLD * math.sqrt(2.0)

#: Dehn surgery space region and its volume-change bound
HDS_THRESHOLD = 7.583
HDS_VOLUME_CHANGE = 0.306

#: drilling a short geodesic
DRILL_LENGTH = 0.162
DRILL_VOLUME_LOSS = 0.329
MIN_CUSPED_VOLUME = 2.0299
DRILL_VOLUME_FLOOR = 1.701

#: tube radius above which the boundary-value theory applies for any cone angle
BOUNDARY_RADIUS = math.atanh(1.0 / math.sqrt(3.0))

TABLE = {
    "drill_length": DRILL_LENGTH,
    "drill_volume_loss": DRILL_VOLUME_LOSS,
    "tube_radius_floor": TUBE_RADIUS_FLOOR,
    "product_cap": PRODUCT_CAP,
    "min_cusped_volume": MIN_CUSPED_VOLUME,
    "fill_threshold": FILL_THRESHOLD,
    "hds_threshold": HDS_THRESHOLD,
    "hds_volume_change": HDS_VOLUME_CHANGE,
    "multi_cusp_threshold": MULTI_CUSP_THRESHOLD,
    "multi_cusp_exclusions": MULTI_CUSP_EXCLUSIONS,
    "single_cusp_exclusions": SINGLE_CUSP_EXCLUSIONS,
    "boundary_radius": BOUNDARY_RADIUS,
}


def table(version=CONSTANTS_VERSION):
    if version != CONSTANTS_VERSION:
        raise KeyError(f"unknown constants version {version!r}")
    return dict(TABLE)
