"""Constant-mean-curvature slices and foliations of the Kruskal extension."""

from .geometry import (KruskalPoint, Region, SliceParams,
                       areal_radius_from_kruskal, classify_region,
                       cmc_residual_kruskal, cmc_residual_schwarzschild,
                       envelope_max, envelope_minus, envelope_plus,
                       kruskal_from_schwarzschild, lapse_h,
                       radial_potential_l)
from .numerics import (Tolerances, find_root_bracketed,
                       integrate_endpoint_singular, solve_ivp)
from .slices import (BranchRoots, Hypersurface, SliceKind, branch_roots,
                     build_slice_ivp, build_slice_quadrature,
                     fprime_first_integral, reflect_slice, slice_T_at,
                     t_intercept)
from .foliation import (FoliationCurve, LeafParams, alpha_curve_intersection,
                        default_amplitude, gamma_y, gamma_y_derivative, leaf,
                        locate, mo_linear_family, params_from_c,
                        shifted_curve_pair, verify_disjointness)

__version__ = "0.1.0"
