"""Exact arithmetic of cusp-form coefficient sums and their power moments.

Core entry points re-exported here; the HTTP facade lives in
momentlab.service and the command line in momentlab.cli.
"""

__version__ = "0.1.0"

from .forms import build_form, build_table, load_or_build_table, partial_sum
from .series import QSeries, delta, eisenstein, eta_product_24

__all__ = [
    "__version__",
    "QSeries",
    "eisenstein",
    "delta",
    "eta_product_24",
    "build_form",
    "build_table",
    "load_or_build_table",
    "partial_sum",
]
