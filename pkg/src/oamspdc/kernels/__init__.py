"""Hot-loop kernel selection: compiled extension if available, numpy otherwise.

Set OAMSPDC_FORCE_FALLBACK=1 to skip the compiled extension.
"""

import os

from . import _integrand_np

if os.environ.get("OAMSPDC_FORCE_FALLBACK") == "1":
    _impl = _integrand_np
    BACKEND = "numpy"
else:
    try:
        from . import _integrand_c as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _integrand_np
        BACKEND = "numpy"

integrand_grid = _impl.integrand_grid
integrand_grid_numpy = _integrand_np.integrand_grid

__all__ = ["integrand_grid", "integrand_grid_numpy", "BACKEND"]
