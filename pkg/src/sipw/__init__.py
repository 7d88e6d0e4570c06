"""Deformed translational shape-invariant superpotentials and their numerical checks."""

__version__ = "0.1.0"

from .catalog import DEFORMABLE, HERMITIAN_DEFORMABLE, FamilyId, FamilyParams  # noqa: E402
from .grid import Grid  # noqa: E402

__all__ = ["DEFORMABLE", "HERMITIAN_DEFORMABLE", "FamilyId", "FamilyParams", "Grid", "__version__"]
