"""Numerical laboratory for fractional Riesz mean kernels and their restriction estimates."""
from .errors import (ConvergenceError, DomainError, FitError, NoConvergence, ParameterError,
                     ParseError, PoleError, PrecisionLoss, RieszLabError, ValidationError)
from .fouriertransforms import (FtForm, decay_exponent_fit, ft_riesz, k0_kernel, kz_kernel,
                                limit_s_to_1, sphere_ft)
from .interpolation import (EndpointBound, m0_bound, m1_bound, stein_constant, theta,
                            tomas_stein_budget)
from .oscquad import (DEFAULT_QUAD, NO_SINGULARITY, OscIntegralSpec, QuadConfig, SingularitySpec,
                      bessel_tail, bochner_radial_ft, integrate_finite)
from .params import FracParam, RadialProfile, sphere_area
from .records import VerificationRecord
from .restriction_lab import (ExponentPair, KnappGeometry, knapp_mass, knapp_norm, necessity_scan,
                              restriction_quotient, tomas_stein_identity)
from .rieszkernel import (blaschke_privalov, eval_kernel, kernel_constant, kernel_mass,
                          mean_operator, spherical_mean)
from .specfun import (bessel_j, gamma_complex, hyp1f2_bessel_identity_check, hyp_pfq, pochhammer,
                      weber_schafheitlin)

__version__ = "0.1.0"
