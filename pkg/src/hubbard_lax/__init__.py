"""Two-parameter Lax representation of the Hubbard spin ladder on a truncated
auxiliary graph, with exact steady states of the boundary-driven chain.

Subpackages are plain modules:

- linalg: small dimension-checked operator helpers (dense + scipy.sparse)
- aux_space: the auxiliary vertex graph, index map, and its reflection
- lax_builder: the S/T/X/Y operator tables and assembled Lax components
- algebra_verifier: residual checks for all defining operator identities
- hubbard_model: the physical ladder Hamiltonian and site operators
- ness_engine: transfer-operator contraction, steady-state construction,
  doubled-operator telescoping and boundary checks
- lindblad_oracle: brute-force Lindblad fixed point for tiny chains
- observables: densities, currents, scaling fits
- transfer_commutativity: commuting-family probe
- cli: command-line front end
"""

__version__ = "0.1.0"

from .lax_builder import LaxParams, assemble_family
from .ness_engine import DrivingConfig, build_ness, map_driving_to_params

__all__ = [
    "LaxParams",
    "assemble_family",
    "DrivingConfig",
    "build_ness",
    "map_driving_to_params",
    "__version__",
]
