"""Selects the scan kernel at import: the compiled module if it was built,
otherwise the numpy fallback.  Set ``AMVERIFY_PURE_PYTHON=1`` to force the
fallback."""

from __future__ import annotations

import os

from . import _scan_py

if os.environ.get("AMVERIFY_PURE_PYTHON") == "1":
    _compiled = None
else:
    try:
        from . import _scan as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "numpy"
scan_block = _compiled.scan_block if _compiled is not None else _scan_py.scan_block
fallback_scan_block = _scan_py.scan_block
compiled_scan_block = _compiled.scan_block if _compiled is not None else None
