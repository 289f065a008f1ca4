"""Typed feature structures with appropriateness enforced by type resolution."""

from .drfs import (Column, CompactDRFS, Fixed, Free, compact, drfs_unify,
                   expand, relation)
from .errors import ParseError, ResolutionBoundError, SignatureError, TfsError
from .fstruct import FeatureGraph, fs_subsumes, graph_unify
from .hierarchy import (CompiledSignature, SignatureDecls, compile_signature,
                        species_set, subsumes_type)
from .resolve import (LabellingRelation, brute_force_resolve, is_satisfiable,
                      is_well_typable, is_well_typed, materialize, resolve)
from .textio import (parse_avm, parse_drfs, parse_signature, print_drfs,
                     print_fs)
from .unfill import fill_node, unfill


def load_signature(text: str) -> CompiledSignature:
    """Parse and compile signature source text."""
    return compile_signature(parse_signature(text))


def bundled_signature(name: str) -> CompiledSignature:
    """One of the signatures shipped in ``tfs/signatures`` (e.g. ``"rho"``)."""
    from importlib.resources import files
    return load_signature(files(__package__).joinpath("signatures", f"{name}.sig").read_text())


__all__ = [
    "Column", "CompactDRFS", "CompiledSignature", "FeatureGraph", "Fixed", "Free",
    "LabellingRelation", "ParseError", "ResolutionBoundError", "SignatureDecls",
    "SignatureError", "TfsError", "brute_force_resolve", "bundled_signature",
    "compact", "compile_signature", "drfs_unify", "expand", "fill_node",
    "fs_subsumes", "graph_unify", "is_satisfiable", "is_well_typable",
    "is_well_typed", "load_signature", "materialize", "parse_avm", "parse_drfs",
    "parse_signature", "print_drfs", "print_fs", "relation", "resolve",
    "species_set", "subsumes_type", "unfill",
]
