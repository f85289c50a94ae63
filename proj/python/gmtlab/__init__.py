"""Python bindings for gmtlab.

Measures are built from an (N, d) point array and N weights, or taken from
the generators (``cantor``, ``plane``, ``arcsine``, ``disc``, ``segment``).
"""

from ._core import (
    ConvergenceError,
    CoincidentPoints,
    InvalidArgument,
    Kernel,
    Measure,
    ResourceLimit,
    __version__,
    apply_T,
    arcsine,
    cantor,
    chain_check,
    coordinate_energies,
    disc,
    divergence_residual,
    dyadic_wolff_sum,
    energy,
    non_lcv_cubes,
    operator_norm,
    packing_constant,
    plane,
    read_measure,
    reflectionless_defect,
    ring_centers,
    run_criterion,
    segment,
    smallest_cube_M,
    truncated_bound,
    wolff_at_support,
    write_measure,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
