"""Multi-agent search over target distributions carried by unsteady 2-D flows.

Modules, roughly in pipeline order: ``grid`` (domain, grid, cosine basis),
``flow`` (velocity fields, flow-map integration), ``transport`` (Halton
tracers and density), ``coverage`` (searched-effort record),
``search_theory`` (Koopman allocation and mismatch fields), ``control``
(SMC steering and lawnmower plans), ``detection``, ``hypergraph`` and
``harness`` (Monte Carlo episodes and ensembles).
"""
from .errors import ConfigurationError, IntegrationError
from .grid import Domain, GridSpec, ScalarField, SpectralBasis

__all__ = ["ConfigurationError", "IntegrationError", "Domain", "GridSpec", "ScalarField", "SpectralBasis"]
__version__ = "0.1.0"
