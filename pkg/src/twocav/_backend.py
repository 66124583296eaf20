"""Kernel backend selection: compiled extension if available, numpy fallback.

Set TWOCAV_PURE_PYTHON=1 to force the fallback (used by the benchmark and
for debugging); both backends implement the same contract and agree to
rounding.
"""

from __future__ import annotations

import os

if os.environ.get("TWOCAV_PURE_PYTHON", "").strip() in ("1", "true", "yes"):
    from . import _core_py as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _core_py as _impl

rk4_affine = _impl.rk4_affine
rk4_lindblad = _impl.rk4_lindblad
COMPILED = bool(_impl.COMPILED)


def backend_name() -> str:
    return "compiled" if COMPILED else "python"
