"""Quadrance graphs on Z_m^d, n-e.c. checks and constructive 3-e.c. witnesses."""

from qec.checker import CheckMode, EcCertificate, EcQuery, EcReport, check_ec, find_witness_vertex, is_witness, naive_check_ec, venn_cell_counts, verify_certificate
from qec.graph import (
    GraphParams,
    Point,
    QuadranceGraph,
    SphereTable,
    build,
    degree,
    inner_product,
    is_edge,
    neighbor_bitset,
    norm,
    point_at,
    point_index,
    quadrance,
    sphere_table,
)
from qec.paley import PaleyGraph, build_paley, build_quadratic_residue_graph, strongly_regular_parameters, verify_isomorphism
from qec.solver import Pattern3, WitnessPlan, WitnessResult, choose_uvw, classify_dependence, count_quadratic_solutions, find_witness, reduce_system
from qec.zmod import LinearSystem, Modulus, legendre_symbol, null_space_basis, particular_solution, solve_univariate_quadratic, sqrt_mod

__all__ = [
    "CheckMode",
    "EcCertificate",
    "EcQuery",
    "EcReport",
    "check_ec",
    "find_witness_vertex",
    "is_witness",
    "naive_check_ec",
    "venn_cell_counts",
    "verify_certificate",
    "GraphParams",
    "Point",
    "QuadranceGraph",
    "SphereTable",
    "build",
    "degree",
    "inner_product",
    "is_edge",
    "neighbor_bitset",
    "norm",
    "point_at",
    "point_index",
    "quadrance",
    "sphere_table",
    "PaleyGraph",
    "build_paley",
    "build_quadratic_residue_graph",
    "strongly_regular_parameters",
    "verify_isomorphism",
    "Pattern3",
    "WitnessPlan",
    "WitnessResult",
    "choose_uvw",
    "classify_dependence",
    "count_quadratic_solutions",
    "find_witness",
    "reduce_system",
    "LinearSystem",
    "Modulus",
    "legendre_symbol",
    "null_space_basis",
    "particular_solution",
    "solve_univariate_quadratic",
    "sqrt_mod",
]
