"""splitlab: numerical diagnostics for invariant tangent-bundle splittings.

Concrete diffeomorphism models with invariant splittings E + F are probed for
domination conditions (one-step, volume, second-order subsequence decay,
per-index-triple exponential rates), Lyapunov spectra and their agreement with
singular-value growth, involutivity of E via finite-difference Lie brackets,
and loop-holonomy defect scaling as an independent geometric measurement.
"""

__version__ = "0.1.0"

from .cocycle import (RestrictedCocycle, SingularData, log_singular_sequence,
                      norm_conorm, restricted_cocycle, singular_data)
from .domination import (DominationReport, NonresonanceTable, PointRatios,
                         SecondOrderDiagnostic, check_volume_implication,
                         domination_report, nonresonance_diagnostic,
                         pointwise_ratios, second_order_diagnostic)
from .frobenius import (BracketDiagnostics, LocalFrame, bracket_defect,
                        cartan_check, combination_bound_check,
                        dynamical_bound_probe, frame_with_initial_vectors,
                        lie_bracket_fd, naturality_check, orthonormal_frame,
                        projection_onto_f, transverse_one_form)
from .holonomy import (HolonomyRecord, ScalingFit, SurfaceMesh, defect_scaling,
                       grow_surface, holonomy_defect, write_mesh)
from .lyapunov import (CourantFischerRecord, ExponentMargins, LyapunovEstimate,
                       RegularityReport, courant_fischer_oracle,
                       exponent_condition, group_exponents, lyapunov_spectrum,
                       regularity_check)
from .models import (ModelSystem, SplittingField, invariance_residual, iterate,
                     load_model_config, model_zoo, orbit, refine_splitting,
                     swap_splitting, zoo_entries)
from .reporting import RunConfig, RunReport, load_report
from .spaces import Space
