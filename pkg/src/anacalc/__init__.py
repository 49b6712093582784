"""anacalc: numerical classical analysis on uniform grids.

Quadrature and Lp norms, fixed points and ODE continuation, convolution and
mollifiers, Fourier series and transforms, residue calculus, 1D finite
elements and second-kind integral equations.
"""

from . import complexint, convolution, errors, fixpoint_ode, fourier, integral_eq, realfun, sobolev_fem
from .complexint import *  # noqa: F401,F403
from .convolution import *  # noqa: F401,F403
from .errors import *  # noqa: F401,F403
from .fixpoint_ode import *  # noqa: F401,F403
from .fourier import *  # noqa: F401,F403
from .integral_eq import *  # noqa: F401,F403
from .realfun import *  # noqa: F401,F403
from .sobolev_fem import *  # noqa: F401,F403

__version__ = "0.1.0"
