"""Hot-kernel backend selection.

The compiled extension is preferred; the pure-numpy twin is used when the
extension is missing or when ``ARKS_PURE_PYTHON`` is set in the environment.
Both backends produce bitwise-identical results (enforced by the parity
tests), so the choice affects speed only.
"""

import os

if os.environ.get("ARKS_PURE_PYTHON"):
    from . import _numpy_backend as _impl
else:
    try:
        from . import _cy_backend as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _numpy_backend as _impl

BACKEND = _impl.BACKEND

tridiag_solve = _impl.tridiag_solve
add_upwind_div_1d = _impl.add_upwind_div_1d
add_upwind_div_2d = _impl.add_upwind_div_2d
add_upwind_div_radial = _impl.add_upwind_div_radial
outflow_rate_1d = _impl.outflow_rate_1d
outflow_rate_2d = _impl.outflow_rate_2d
outflow_rate_radial = _impl.outflow_rate_radial

__all__ = [
    "BACKEND",
    "tridiag_solve",
    "add_upwind_div_1d",
    "add_upwind_div_2d",
    "add_upwind_div_radial",
    "outflow_rate_1d",
    "outflow_rate_2d",
    "outflow_rate_radial",
]
