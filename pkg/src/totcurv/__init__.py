"""Total mean curvatures of hypersurfaces in euclidean and hyperbolic space.

Closed hypersurfaces are represented by exact charts (catalog surfaces,
perturbations, parallel surfaces, smoothed convex hulls) or by triangle
meshes. The package computes the totals M_r, moves surfaces along the
normal flow, measures distances, reach and volumes, and runs convergence
experiments on sequences of surfaces.
"""

from .ambient import AmbientSpace, distance, exp_map, unit_sphere_volume
from .convex import (ConvexBody, PolytopeSurface, conjecture_gap, convexity_check, hull_body,
                     polytope_from_points, random_convex_body)
from .curvature import (CurvatureProfile, curvature_profile, gauss_form_pullback, sigma_r,
                        total_mean_curvature)
from .distance import (ReachCertificate, enclosed_volume, estimate_reach, hausdorff_distance,
                       region_volume, signed_distance)
from .errors import (AccuracyWarning, AmbiguityWarning, ConfigError, FlowSingularityError,
                     GeometryError, InvalidPointError, PerturbationTooLargeError,
                     PreconditionError, SingularChartError)
from .experiments import Report, Scenario, emit_report, run_convergence, run_monotonicity, run_theorem2
from .parallel import (ParallelSweep, comparison_bound_check, limit_total_curvature,
                       parallel_curvatures, parallel_surface, parallel_sweep, tube_integral)
from .surfaces import (MeshSurface, ParametricSurface, catalog_surface, mesh_from_parametric,
                       perturb, read_mesh, write_mesh)

__version__ = "0.1.0"
