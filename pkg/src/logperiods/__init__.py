"""Exact chains on (P^1)^n, face maps, period integrals and the dilogarithm comodule."""

from .chain_core import Chain, SimplicialComplex, Vertex, boundary, dump_bundle, load_bundle
from .integrator import QuadratureConfig, I_n, verify_cauchy, verify_cauchy_simplicial

__version__ = "0.1.0"
