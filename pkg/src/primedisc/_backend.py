"""Pick the discovery kernel at import time.

The compiled extension is preferred; set ``PRIMEDISC_BACKEND=python`` to
force the NumPy fallback (``compiled`` makes a missing build an error).
"""

from __future__ import annotations

import os

from . import _fallback

_requested = os.environ.get("PRIMEDISC_BACKEND", "auto").lower()
if _requested not in ("auto", "compiled", "python"):
    raise ImportError(f"PRIMEDISC_BACKEND must be auto, compiled or python, not {_requested!r}")

_compiled = None
if _requested != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        if _requested == "compiled":
            raise

KERNELS = {"python": _fallback.discover}
if _compiled is not None:
    KERNELS["compiled"] = _compiled.discover

BACKEND = "compiled" if _compiled is not None else "python"
discover = KERNELS[BACKEND]
