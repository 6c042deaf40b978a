"""Asymptotically hyperbolic extensions of Bartnik boundary data.

Collar constructions over a normalized Ricci flow path, profile gluing
with smoothed bridges and exponential bending, attachment to the
AdS-Schwarzschild model family, and hyperbolic Bartnik mass upper
bounds with per-certificate reports.
"""

__version__ = "0.1.0"

from .errors import (AhextError, InvalidProfileError, InvalidMetricError,
                     HypothesisError, AdmissibilityError, NotConvergedError)
from .geometry import (ProfileCurve, AxisymmetricSurfaceMetric, BartnikData,
                       CollarMetric, scalar_curvature_warped, profile_margin,
                       profile_hawking_mass, hyperbolic_hawking_mass,
                       gauss_curvature, mean_curvature_level,
                       hawking_mass_level, collar_scalar_curvature)
from .ads import (AdSSchwParams, horizon_radius, metric_coefficient,
                  profile_solve, verify_static_identity)
from .metric_path import (normalized_ricci_flow, flow_to_roundness,
                          MetricPath, constant_path, area_form_normalize,
                          reparametrize_path, compute_alpha_beta,
                          first_eigenpair, eigenpath)
from .gluing import (GluingProblem, glue_profiles, build_zeta, bend_profile,
                     glue_to_ads_schwarzschild)
from .extensions import (build_minimal_collar, build_cmc_collar_b0,
                         build_cmc_collar_bpos, bartnik_mass_upper_bound,
                         build_extension, prepare_path, ExtensionReport)
