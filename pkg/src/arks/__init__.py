"""arks: a finite-volume laboratory for attraction-repulsion chemotaxis.

Positivity-preserving, exactly mass-conserving solver for the coupled
organism/attractant/repellent system with measure-valued organism data, plus a
diagnostics harness that fits decay exponents, accumulates dampened
dissipation integrals, and renders verdicts on the expected a priori bounds.
"""

__version__ = "0.1.0"

from . import diagnostics, elliptic, grid, initial, model, semigroup, stepper  # noqa: F401
from ._kernels import BACKEND as kernel_backend  # noqa: F401
