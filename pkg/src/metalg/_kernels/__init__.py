"""Kernel backend selection.

The hot inner loops (metric axiom scan, shortest-path closure,
valuation enumeration, non-expansiveness scan, pairwise sup distances)
exist twice: a compiled Cython module ``_ckern`` working on int64
arrays, and a pure-Python twin ``_pykern`` with identical semantics
that also accepts arbitrary exact numbers.

``impl`` is the selected backend.  Selection honours the environment
variable ``METALG_BACKEND``: "pure" forces the Python twin, "c" demands
the compiled module (ImportError if missing), anything else tries the
compiled module and falls back silently.
"""

from __future__ import annotations

import os

from . import _pykern as pure

_requested = os.environ.get("METALG_BACKEND", "auto").strip().lower()

compiled = None
if _requested in {"pure", "py", "python"}:
    pass
elif _requested in {"c", "ext", "compiled"}:
    from . import _ckern as compiled  # noqa: F401  (ImportError is the point)
else:
    try:
        from . import _ckern as compiled
    except ImportError:
        compiled = None

impl = compiled if compiled is not None else pure
BACKEND = "c" if compiled is not None else "pure"


def backend_name() -> str:
    """Name of the active kernel backend: "c" or "pure"."""
    return BACKEND
