"""Edge eigenvalue statistics laboratory for deformed complex Ginibre ensembles.

Subpackages
-----------
``linalg``      dense complex eigensolver wrappers with residual certificates
``ensemble``    specification and sampling of the deformed Gaussian model
``geometry``    limit-measure functionals, support boundary, edge classification
``kernels``     erfc-type moment integrals and the limiting edge kernel
``montecarlo``  seeded parallel experiments harvesting rescaled edge eigenvalues
``report``      goodness-of-fit statistics and report emission (JSON/CSV/SVG)
``oracles``     numerical certification of the supporting matrix-integral identities
``cli``         command-line front end
"""

from . import ensemble, geometry, kernels, linalg, montecarlo, oracles, report

__all__ = ["ensemble", "geometry", "kernels", "linalg", "montecarlo",
           "oracles", "report"]
__version__ = "0.1.0"
