"""Selects the coverability backend: compiled when available, else pure Python.

Set ``REGSEP_PURE=1`` to force the fallback.
"""

import os

from . import _basis_py

BACKEND = "python"
coverability_fixpoint = _basis_py.coverability_fixpoint

if os.environ.get("REGSEP_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _basis  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        coverability_fixpoint = _basis.coverability_fixpoint
        BACKEND = "cython"

NOP, INC, DEC, RESET = _basis_py.NOP, _basis_py.INC, _basis_py.DEC, _basis_py.RESET
