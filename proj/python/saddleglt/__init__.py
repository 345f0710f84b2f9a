"""Spectral analysis and preconditioning of saddle-point systems from
elliptic optimal control problems."""

from saddleglt._core import (
    ConstraintKind,
    MatrixSymbol,
    PreconditionerOp,
    PrecVariant,
    SaddleSystem,
    SparseMatrixCSR,
    UniformMesh,
    assemble_convection,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    build_system,
    build_test_system,
    count_eigs_in_interval,
    full_spectrum,
    gmres,
    interpolate,
    interval_bounds,
    make_preconditioner,
    permute_to_block_toeplitz,
    predefined_symbols,
    run_solve_case,
    sample_symbol,
    symbol_eval,
    toeplitz_build,
    unscale_solution,
)

__all__ = [
    "ConstraintKind",
    "MatrixSymbol",
    "PreconditionerOp",
    "PrecVariant",
    "SaddleSystem",
    "SparseMatrixCSR",
    "UniformMesh",
    "assemble_convection",
    "assemble_load",
    "assemble_mass",
    "assemble_stiffness",
    "build_system",
    "build_test_system",
    "count_eigs_in_interval",
    "full_spectrum",
    "gmres",
    "interpolate",
    "interval_bounds",
    "make_preconditioner",
    "permute_to_block_toeplitz",
    "predefined_symbols",
    "run_solve_case",
    "sample_symbol",
    "symbol_eval",
    "toeplitz_build",
    "unscale_solution",
]
