"""Topological invariants of quarter-plane Toeplitz operators.

Lattice symbols (matrix Laurent polynomials on the torus) are factorized
slice by slice in the Wiener-Hopf sense, extended to the boundary of the
bidisk, and integrated into a three-dimensional winding number that the
package cross-checks against dense truncations of the corresponding
quarter-plane operators: Fredholm indices, corner spectra, spectral flow.
"""

__version__ = "0.1.0"

from .errors import QtopError
from .symbols import (
    LaurentSymbol,
    SliceSymbol,
    az_class,
    assemble_chiral,
    check_symmetry,
    det_on_circle,
    load_symbol,
    save_symbol,
    split_chiral,
)
from .wiener_hopf import (
    FactorizationResult,
    canonical_factorize,
    partial_indices,
    radial_scan,
    verify_factorization,
    winding_of_det,
)
from .extension import (
    ChartPoint,
    ClosedFormExtension,
    ExtendedSymbol,
    bott_generator,
    build_extended,
    build_extended_family,
    check_equivariance,
    check_hermitian,
    eval_extended,
    seam_residual,
)
from .invariants import (
    GappedInvariantReport,
    W3Result,
    calibrate_orientation,
    gapped_invariant_report,
    w3,
    winding_number,
)
from .operators import (
    CornerSpectrumResult,
    HalfPlaneGapReport,
    HalfPlaneRect,
    IndexReport,
    Quarter,
    Segment,
    SpectralFlowResult,
    assemble,
    certify_fredholm,
    corner_spectrum,
    dump_operator,
    half_plane_gap,
    kernel_dim,
    numerical_index,
    spectral_flow,
)

__all__ = [
    "__version__",
    "QtopError",
    "LaurentSymbol",
    "SliceSymbol",
    "az_class",
    "assemble_chiral",
    "check_symmetry",
    "det_on_circle",
    "load_symbol",
    "save_symbol",
    "split_chiral",
    "FactorizationResult",
    "canonical_factorize",
    "partial_indices",
    "radial_scan",
    "verify_factorization",
    "winding_of_det",
    "ChartPoint",
    "ClosedFormExtension",
    "ExtendedSymbol",
    "bott_generator",
    "build_extended",
    "build_extended_family",
    "check_equivariance",
    "check_hermitian",
    "eval_extended",
    "seam_residual",
    "GappedInvariantReport",
    "W3Result",
    "calibrate_orientation",
    "gapped_invariant_report",
    "w3",
    "winding_number",
    "CornerSpectrumResult",
    "HalfPlaneGapReport",
    "HalfPlaneRect",
    "IndexReport",
    "Quarter",
    "Segment",
    "SpectralFlowResult",
    "assemble",
    "certify_fredholm",
    "corner_spectrum",
    "dump_operator",
    "half_plane_gap",
    "kernel_dim",
    "numerical_index",
    "spectral_flow",
]
