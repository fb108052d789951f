"""Reduced density matrices and entanglement entropies of non-Abelian anyonic systems."""

from .entropy import (
    EntropyReport,
    SectorSpectrum,
    entropy_report,
    renyi_entropy,
    spectrum,
    to_matrix,
    von_neumann_entropy,
)
from .model import AnyonModel, builtin_model, parse_model, serialize_model, verify_model
from .ops import (
    AnyonicOperator,
    AnyonicState,
    BasisDescriptor,
    SystemGeometry,
    change_basis,
    density_matrix,
    embed_local_operator,
    expectation,
    make_state,
    outer_product,
    qtrace,
)
from .reduce import Bipartition, plan_reduction, reduced_density_matrix

__all__ = [
    "AnyonModel", "AnyonicOperator", "AnyonicState", "BasisDescriptor", "Bipartition",
    "EntropyReport", "SectorSpectrum", "SystemGeometry", "builtin_model", "change_basis",
    "density_matrix", "embed_local_operator", "entropy_report", "expectation", "make_state",
    "outer_product", "parse_model", "plan_reduction", "qtrace", "reduced_density_matrix",
    "renyi_entropy", "serialize_model", "spectrum", "to_matrix", "verify_model",
    "von_neumann_entropy",
]
