"""Action-angle dual pair of RSvD-type many-body systems at desk scale.

Builds explicit solutions of the momentum constraints of the SU(2n)
Heisenberg double reduction, reconstructs group-level representatives,
evaluates both dual Hamiltonian families, integrates flows and verifies
the identities tying everything together.
"""

from .errors import AADualError
from .model import DarbouxPoint, Params
from .triples import AdmissibleTriple, BuildSpec, build_triple, triple_from_zeta
from .reconstruct import GroupPoint, hat_actions, reconstruct_g

__version__ = "0.1.0"

__all__ = [
    "AADualError",
    "AdmissibleTriple",
    "BuildSpec",
    "DarbouxPoint",
    "GroupPoint",
    "Params",
    "build_triple",
    "hat_actions",
    "reconstruct_g",
    "triple_from_zeta",
    "__version__",
]
