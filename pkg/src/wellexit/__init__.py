"""wellexit: exit-event statistics for overdamped Langevin dynamics.

The package simulates the first exit of the diffusion
``dX = -grad f(X) dt + sqrt(h) dB`` from a bounded metastable domain,
samples the quasi-stationary distribution with a Fleming-Viot particle
system, and checks the Monte Carlo results against closed-form
Eyring-Kramers rate and exit-probability asymptotics, including the
Agmon-distance geometry under which those asymptotics are valid.
"""

__version__ = "0.1.0"

from .errors import WellexitError

__all__ = ["WellexitError", "__version__"]
