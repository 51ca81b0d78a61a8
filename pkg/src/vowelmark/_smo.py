"""Select the SMO solver backend at import time.

The compiled extension is used when it built successfully; setting
VOWELMARK_PURE_SMO=1 forces the pure-numpy fallback (used by the
benchmark and the cross-backend tests).
"""

import os

if os.environ.get("VOWELMARK_PURE_SMO"):
    from ._smo_py import smo_solve
    BACKEND = "python"
else:
    try:
        from ._smo_cy import smo_solve  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        from ._smo_py import smo_solve
        BACKEND = "python"

__all__ = ["smo_solve", "BACKEND"]
