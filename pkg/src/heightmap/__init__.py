"""Maximal intersections of axis-aligned observation boxes by height-map sweeps."""

from .errors import (
    BoxValidationError,
    EmptyBoxError,
    HeightMapError,
    InvalidBoxError,
    NonCanonicalError,
    OracleSizeError,
    ParseError,
)
from .geometry import (
    CanonicalBox,
    CanonicalBoxes,
    CanonicalMap,
    EndpointDescriptor,
    ObservationBox,
    Side,
    canonicalize,
    compare_endpoints,
    map_back,
)
from .npmle import (
    CliqueMatrix,
    clique_matrix,
    log_likelihood,
    mass_vector,
    prob_masses,
    same_equivalence_class,
)
from .oracle import clique_of, oracle_reduce
from .reduction import reduce_boxes
from .simbench import fit_loglog_slope, gen_current_status, run_benchmark
from .sweep2d import MaximalIntersection, SweepState, reduce2d, scan_emit
from .sweepnd import SliceState, reduce_nd, slice_scan

__version__ = "0.1.0"
