"""Numerical Gauss-Lucas checks for polynomials and entire functions on C^M."""

from .config import ConfigError, ScenarioConfig, parse_config, serialize
from .estimators import ConvexHull2D, GreedyRearranger, SeparatelyConvexHull
from .geometry import (Hull2D, SepHullGrid, clip_to_box, dump_mask, hull2d, hull_contains,
                       load_mask, rasterize_hull2d, sep_hull_contains, sep_hull_grid,
                       signed_distance)
from .multivariate import MultiPoly, MultivariateSpec, affine_product
from .poly import ComplexPoly, critical_points_of_product, derivative, find_roots, poly_from_roots
from .product import (CanonicalProductSpec, LogValue, PowerSumLedger, convergence_probe,
                      corrected_partial_product, h_N, partial_product)
from .rearrange import (RearrangementPlan, apply_plan, dump_plan, load_plan, power_sums_along,
                        rearrange_to_zero, term_vector)
from .roots import (GenusEstimate, IndexOutOfRange, NoGenusFound, RootSequenceFamily,
                    estimate_genus, nth_root, paired, rearrangeability_diagnostic, signed_blocks)
from .verify import (Check, StabilityCone, StabilityResult, VerificationReport, is_theta_stable,
                     verify_corollary_stability, verify_gl_entire, verify_gl_polynomial,
                     verify_gl_sections)

__version__ = "0.1.0"
