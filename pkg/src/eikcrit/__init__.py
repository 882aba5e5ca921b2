"""Eikonal-type PDEs near critical points of H(x, y, z_x, z_y).

Construction, classification and verification of solution families of
H(x, y, z_x, z_y) = 0 near a nondegenerate critical point: linearized
spectra, formal power series with resonance detection, saddle solution
surfaces, stable/unstable manifolds, and jet-to-function reconstruction.
"""

from .backend import BACKEND, USE_NUMBA
from .bivariate import Callable2, ExpSum2, Poly2, normal_form_builtin
from .data_functions import Monomial, SmoothBump, Table, Zero, from_config
from .errors import (AmbiguousSpectrumError, CharacteristicDataError,
                     ComplexSpectrumError, ConfigError, EikcritError,
                     EvaluationDomainError, IngestionError, IntegrationError,
                     PreconditionError, ReconstructionError, StripError)
from .flow import (CharacteristicStrip, ManifoldResult, complete_strip,
                   flow_with_drift, general_saddle_surface, integrate_flow,
                   invariant_manifold, strip_from_callable, surface_from_strip)
from .hamiltonian import (Generic, HamiltonianSpec, Linearization,
                          ModelQuadratic, NormalForm, PhasePoint, PlaneReport,
                          SeparatedEikonal, characteristic_field,
                          classify_invariant_planes, classify_second_order,
                          closed_form_eigenvalues, linearize, omega)
from .jet import (DefectReport, SolutionGrid, check_lagrangian, reconstruct_z,
                  residual_grid)
from .model_case import (eval_E, model_saddle_on_base_grid,
                         model_saddle_surface, predicted_regularity,
                         psi_model)
from .series import (BivariateSeries, ResonanceReport, detect_resonances,
                     series_residual, solve_saddle_series)
from .surfaces import JetSurface
from .verify import (DecayExponents, DivergenceProfile, axis_decay_exponents,
                     compare_solutions)

__version__ = "0.1.0"
