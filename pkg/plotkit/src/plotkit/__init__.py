"""Figure rendering for noisyqd CSV output.

Consumes only the published file contracts (psi2_heatmap, current, norm,
trace_purity) and knows nothing about how the tables were produced.
"""

from .tables import ContractError, read_table
from .figures import KINDS, render

__all__ = ["ContractError", "KINDS", "read_table", "render"]
