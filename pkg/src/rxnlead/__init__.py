"""Synthesis-constrained lead optimization over reaction templates.

The package trains a small slot-masked policy with group-relative
policy optimization to pick reaction templates and building blocks
that improve a lead molecule under a budgeted scoring oracle, and
exports every optimized molecule with a replay-verified synthesis
pathway.
"""

from rxnlead.errors import RxnleadError
from rxnlead.molgraph import Molecule, mol_from_smiles
from rxnlead.optimizer import LeadOptimizer
from rxnlead.reactions import ReactionTemplate, TemplateLibrary

__version__ = "0.1.0"

__all__ = [
    "LeadOptimizer",
    "Molecule",
    "ReactionTemplate",
    "RxnleadError",
    "TemplateLibrary",
    "mol_from_smiles",
    "__version__",
]
