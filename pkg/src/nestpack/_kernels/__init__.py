"""Kernel backend selection.

The compiled extension (``_fast``) is used when importable; the pure
Python mirror (``_pure``) otherwise.  Set ``NESTPACK_PURE_KERNELS=1`` to
force the pure backend.  Callers must look the backend up through this
module (``_kernels.impl``) at call time so it can be swapped in tests.
"""

import os

from . import _pure as pure

try:
    from . import _fast as fast
except ImportError:
    fast = None

if os.environ.get("NESTPACK_PURE_KERNELS", "") not in ("", "0"):
    impl = pure
elif fast is not None:
    impl = fast
else:
    impl = pure


def backend_name() -> str:
    return impl.BACKEND
