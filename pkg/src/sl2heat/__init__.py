"""Heat kernel on SL(2,R) by spectral synthesis over the tempered dual,
with independent verification through PDE residuals, Plancherel identities,
convolution semigroup checks, and Brownian motion on the group.
"""

__version__ = "0.1.0"

from .errors import (BoundaryMassError, ConvergenceError, DomainError, RouteError,
                     SingularityError, SpectrumMismatchError, TailError, WeightError)
from .group import (CartanCoords, HaarGrid, IwasawaCoords, a_s, algebra_element,
                    cartan, exp_sl2, group_element, haar_integrate, identity,
                    iwasawa, k_integrate, k_theta, make_haar_grid, n_x)
from .spectrum import (Continuous, Discrete, casimir_character, enumerate_discrete,
                       heat_eigenvalue, ktype_tail_bound, nu_cutoff, plancherel_weight)
from .specfun import hyp2f1_c1, jacobi_phi, trapezoid_periodic
from .spherical import (SphericalValue, matrix_element, phi, phi_tilde,
                        phi_tilde_derivative, run_qualification)
from .synthesis import (KernelValue, SynthesisConfig, radial_profile, rho, rho_n,
                        rho_transform_side)
from .transforms import (RadialFunction, convolve, gaussian_radial,
                         inverse_spherical_transform, project_ktype,
                         spherical_transform)
from .verify import (FDScheme, McConfig, VerifyReport, fd_laplacian, heat_residual,
                     mc_compare, mc_sample, total_mass)
