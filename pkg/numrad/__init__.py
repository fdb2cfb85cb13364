"""Certified numerical radius computation and a validation harness for numerical radius inequalities."""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundId,
    BoundParams,
    BoundReport,
    check_hypotheses,
    compare_tightness,
    evaluate_bound,
    list_bounds,
)
from .errors import NumradError  # noqa: E402
from .matrix import BlockMatrix2x2, load_matrix, save_matrix  # noqa: E402
from .numrange import RadiusResult, numerical_radius  # noqa: E402

__all__ = [
    "__version__",
    "BlockMatrix2x2",
    "BoundId",
    "BoundParams",
    "BoundReport",
    "NumradError",
    "RadiusResult",
    "check_hypotheses",
    "compare_tightness",
    "evaluate_bound",
    "list_bounds",
    "load_matrix",
    "numerical_radius",
    "save_matrix",
]
