"""Optimal transmit antenna selection for MIMO wiretap (MIMOME) channels."""

__version__ = "0.1.0"

from .baselines import exhaustive_select, norm_based_select, tree_node_count  # noqa: E402
from .capacity import (  # noqa: E402
    db_to_linear,
    link_capacity,
    secrecy_capacity_direct,
    secrecy_gap,
)
from .channel import generate_rayleigh, load_matrix, select_columns, store_matrix  # noqa: E402
from .csie import select_csie  # noqa: E402
from .errors import (  # noqa: E402
    BudgetError,
    ConfigError,
    DimensionError,
    FormatError,
    MimomeError,
    NumericalError,
    ProblemError,
    SelectionError,
)
from .ncsie import select_ncsie  # noqa: E402
from .tree import BabOptions, SelectionResult  # noqa: E402

__all__ = [
    "BabOptions", "BudgetError", "ConfigError", "DimensionError", "FormatError",
    "MimomeError", "NumericalError", "ProblemError", "SelectionError", "SelectionResult",
    "db_to_linear", "exhaustive_select", "generate_rayleigh", "link_capacity",
    "load_matrix", "norm_based_select", "secrecy_capacity_direct", "secrecy_gap",
    "select_columns", "select_csie", "select_ncsie", "store_matrix", "tree_node_count",
]
