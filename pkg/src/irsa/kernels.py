"""Backend selection for the peeling kernels.

The compiled extension is preferred; the pure-Python twin is used when the
extension is missing or when ``IRSA_FORCE_PURE`` is set (useful for the
benchmark and for debugging).  Both expose the same two functions and return
bit-identical results.
"""

import os

if os.environ.get("IRSA_FORCE_PURE"):
    from . import _peelpure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _peelcore as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _peelpure as _impl

        BACKEND = "pure"

choose_slots = _impl.choose_slots
peel = _impl.peel
