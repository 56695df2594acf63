"""Morse-Novikov (twisted) cohomology and LCK structure checks.

Setting ``MNLCK_THREADS`` caps the BLAS/OpenMP thread pools used by numpy;
it must be set before the first import of numpy to take effect.
"""

import os

_threads = os.environ.get("MNLCK_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"

from .complex import (  # noqa: E402
    Character, Cochain, ComplexError, LeeCocycle, NotClosedError, SimplicialComplex,
    build_complex, coboundary, holonomy, validate_cocycle,
)
from .linalg import KERNEL, RankResult, SparseMatrix, rank  # noqa: E402
from .twisted import assemble_twisted, boundary_matrix, gauge_transform, twisted_betti  # noqa: E402
from .mapping_torus import base_character, mapping_torus, vanishing_check  # noqa: E402

__all__ = [
    "Character", "Cochain", "ComplexError", "KERNEL", "LeeCocycle", "NotClosedError", "RankResult",
    "SimplicialComplex", "SparseMatrix", "assemble_twisted", "base_character", "boundary_matrix",
    "build_complex", "coboundary", "gauge_transform", "holonomy", "mapping_torus", "rank",
    "twisted_betti", "validate_cocycle", "vanishing_check",
]
