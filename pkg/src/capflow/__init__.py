"""Axisymmetric capillary hypersurfaces in the unit ball: a curvature flow,
capillary quermassintegrals and checks of their identities and inequalities."""

from .capgeom import cap_point_radius, cap_quermass, cap_quermass_inverse, cap_spec, cap_state
from .errors import (
    BlowUpError,
    CapflowError,
    ConvexityLossError,
    DomainError,
    GeometryError,
    InvalidInitialDataError,
)
from .flow import FlowConfig, fit_cap, run
from .quermass import quermass_theta
from .state import GraphState, load_state, save_state
from .surface import boundary_frame, make_initial, reconstruct, validate

__version__ = "0.1.0"
