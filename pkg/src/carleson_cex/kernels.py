"""Backend selection for the hot kernels.

The compiled extension ``carleson_cex._kernels`` is used when it can be
imported.  Setting the environment variable ``CARLESON_CEX_PURE=1`` forces
the numpy implementation in :mod:`carleson_cex._kernels_py`, which is also
the automatic fallback when the extension was not built.

Attributes
----------
BACKEND : str
    ``"cython"`` or ``"python"``.
"""
from __future__ import annotations

import os

from . import _kernels_py as python_backend

compiled_backend = None
if os.environ.get("CARLESON_CEX_PURE", "").strip() not in ("1", "true", "yes"):
    try:  # pragma: no cover - depends on the build
        from . import _kernels as compiled_backend  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover
        compiled_backend = None

_active = compiled_backend if compiled_backend is not None else python_backend

BACKEND: str = _active.BACKEND
accumulate_pairs = _active.accumulate_pairs
radial_factor_vec = _active.radial_factor_vec
bucket_pair_sum = _active.bucket_pair_sum

__all__ = ["BACKEND", "accumulate_pairs", "radial_factor_vec", "bucket_pair_sum",
           "python_backend", "compiled_backend"]
