"""Sub-Riemannian geodesics on the unit 3-sphere S^3 = SU(2).

The horizontal distribution is spanned by the left-invariant fields X and Y;
geodesics are computed from closed forms, by integrating the normal
Hamiltonian system, and enumerated between given endpoints. The Hopf module
covers horizontal lifts of loops on S^2 and their holonomy.
"""
from . import connect, core, geodesics, hamiltonian, hopf
from .connect import (GeodesicSolution, TargetPoint, brute_force_count, enumerate_between,
                      enumerate_to_fiber, param_equation_lhs)
from .core import (IDENTITY, contact_form, frame_at, frame_coeffs, horizontal_length,
                   is_horizontal, left_pushforward, quat_conj, quat_inv, quat_mul)
from .errors import InputError, NumericalError, S3SRError
from .geodesics import (GeodesicParam, HyperGeodesicParam, const_geodesic, geodesic_bc,
                        geodesic_hyper, vertical_line)
from .hamiltonian import Trajectory, integrate, integrate_hyper
from .hopf import (HolonomyElement, LoopOnS2, circle_action, holonomy, hopf_map,
                   horizontal_lift, shortest_loop_with_holonomy)

__version__ = "0.1.0"
