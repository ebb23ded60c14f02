"""Wilson-Dirac operator, batched GMRES and performance models.

Spinor fields are NumPy arrays of shape ``(sites, 12, b)`` with complex
entries indexed by site, ``3 * spin + color`` and right-hand side.
"""

from ._core import (
    CommError,
    NumericalError,
    Problem,
    ValidationError,
    __version__,
    arithmetic_intensity,
    call_cost,
    config_canonical,
    config_hash,
    effective_bandwidth,
    read_write_ratio,
    run_kernel,
    theoretical_perf,
)

__all__ = [
    "CommError",
    "NumericalError",
    "Problem",
    "ValidationError",
    "__version__",
    "arithmetic_intensity",
    "call_cost",
    "config_canonical",
    "config_hash",
    "effective_bandwidth",
    "read_write_ratio",
    "run_kernel",
    "theoretical_perf",
]
