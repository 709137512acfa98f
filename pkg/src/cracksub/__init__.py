"""Configurational forces, J-integrals and driving forces for cracks in
bodies whose substructure is described by an order parameter."""
from .configurational import (
    bulk_residuals, config_bulk_forces, eshelby, eshelby_of, side_config_residual,
    side_jump_residuals, stress_asymmetry_check,
)
from .constitutive import (
    DoubleWell, GLModel, LinearElastic, LinearProfile, NeoHookean, energy_eval, fd_check, stresses,
)
from .fields import AnalyticProvider, FieldSet, GridProvider, evaluate, jump, load_grid, save_grid
from .geometry import CrackGeometry, make_contour, richardson, shrink_sequence, tip_frame
from .manifolds import OrderParameterSpace, SpaceKind, so3_generator, star_product
from .tip_integrals import (
    TipState, ZoneMotion, driving_force, energy_release_balance, j_integral, j_qs,
    path_independence_report, process_zone, tip_inertia, tip_kinetics, tip_micro_remainder,
    tip_traction,
)

__version__ = "0.1.0"
