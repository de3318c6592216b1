"""Kernel selection: compiled core when importable, NumPy fallback otherwise.

Set ``HMPBOUNDS_PURE=1`` to force the fallback.
"""

import os

from . import _fallback

fallback = _fallback

if os.environ.get("HMPBOUNDS_PURE", "") not in ("", "0"):
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _fallback

compiled = None if kernels is _fallback else kernels
NAME = kernels.NAME
