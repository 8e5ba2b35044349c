"""Cellular resolutions of diagonals of toric varieties and toric stacks."""

__version__ = "0.1.0"

from .arrangement import (  # noqa: E402
    ArrangementSpec,
    QuotientComplex,
    TranslationLattice,
    build_arrangement,
    build_quotient,
    check_transversality,
    covering_map,
    quotient_complex,
    vertices_equal_lattice,
)
from .cech import WeightedProjLine, exceptional_collection_check, ext_dims, h_dims, koszul_sequence_check  # noqa: E402
from .diagonal import in_lattice_module, torsion_certificate  # noqa: E402
from .errors import InputError, ToricDiagError, VerificationError, WindowTooSmallError  # noqa: E402
from .fan import Fan, class_group, corpus_fan, fan_report, irrelevant_ideal  # noqa: E402
from .lattice import FiniteAbelianGroup, Lattice, hermite_normal_form, smith_normal_form  # noqa: E402
from .linalg import IntegerMatrix  # noqa: E402
from .morita import morita_report  # noqa: E402
from .resolution import ChainComplex, cellular_differential, exactness_certificate, verify_d_squared  # noqa: E402

__all__ = [
    "ArrangementSpec", "ChainComplex", "Fan", "FiniteAbelianGroup", "InputError", "IntegerMatrix", "Lattice",
    "QuotientComplex", "ToricDiagError", "TranslationLattice", "VerificationError", "WeightedProjLine",
    "WindowTooSmallError", "build_arrangement", "build_quotient", "cellular_differential", "check_transversality",
    "class_group", "corpus_fan", "covering_map", "exactness_certificate", "exceptional_collection_check", "ext_dims",
    "fan_report", "h_dims", "hermite_normal_form", "in_lattice_module", "irrelevant_ideal", "koszul_sequence_check",
    "morita_report", "quotient_complex", "smith_normal_form", "torsion_certificate", "verify_d_squared",
    "vertices_equal_lattice",
]
