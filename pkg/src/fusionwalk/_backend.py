"""Select the compiled kernels when available, else the NumPy fallback.

Set ``FUSIONWALK_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

BACKENDS = {"python": _fallback}
if _core is not None:
    BACKENDS["cython"] = _core

if os.environ.get("FUSIONWALK_PURE_PYTHON") or _core is None:
    NAME = "python"
else:
    NAME = "cython"

impl = BACKENDS[NAME]


def get(name=None):
    """Kernel module by name (``"cython"`` or ``"python"``); default is the active one."""
    if name is None:
        return impl
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
