"""Weighted curvatures of timelike general rotational surfaces in Minkowski 4-space."""

from ._jit import BACKEND, HAVE_NUMBA, JIT_ENABLED
from .catalog import EXAMPLES, ExampleReport, verify_example, verify_examples
from .curvature import (CurvatureSample, OracleResult, curvature_sample, gaussian_curvature,
                        mean_curvature_vector, mean_curvatures, second_form_oracle,
                        second_form_oracle_array)
from .errors import (AllInvalid, ConfigError, DegenerateSurface, DegenerateVector, DomainError,
                     InvalidCombination, InvalidInitialData, InvalidSurface, IoError,
                     MinkrotError, NoRealSolution, ParseError, StencilOutOfDomain,
                     UnknownIdentifier)
from .lorentz import Vec4, causal_character, minkowski_dot, minkowski_normalize
from .meridian import (Candidate, MeridianSolution, OdeProblem, const_profile_from_flat,
                       const_profile_from_mean, solve_flat_meridian, solve_minimal_meridian)
from .mesh import Mesh3, SampledGrid, project, sample_grid, write_mesh
from .profile import Jet2, ProfileExpr, eval_jet2, parse_profile
from .surface import (Surface, SurfaceKind, ValidityReport, build_surface, frame,
                      fundamental_form_I, normal_frame, position, scan_validity, tangent_frame,
                      validity_at)
from .weighted import (Density, SpecialDensity, flat_residual, minimal_residual,
                       weighted_fields, weighted_gaussian_curvature, weighted_mean_components,
                       weighted_mean_curvature)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
