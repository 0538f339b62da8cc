"""Backend selection for the pointwise density kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation is used.  Setting ``MENGERLAB_PURE_PYTHON=1`` forces the
fallback.
"""

import os

from . import _kernels_py

if os.environ.get("MENGERLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = _impl.BACKEND
menger_density = _impl.menger_density
menger_density_grad = _impl.menger_density_grad

__all__ = ["BACKEND", "menger_density", "menger_density_grad", "python_backend"]

python_backend = _kernels_py
