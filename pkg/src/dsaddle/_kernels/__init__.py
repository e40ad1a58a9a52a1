"""Kernel backend selection.

The compiled extension is preferred when present; the numpy fallback is
always available.  Set ``DSADDLE_KERNELS=py`` (or ``c``) to force a backend;
``auto`` (default) picks the compiled one if it imports.
"""

import os

from . import _pykernels

_choice = os.environ.get("DSADDLE_KERNELS", "auto").lower()

if _choice == "py":
    _impl = _pykernels
elif _choice == "c":
    from . import _ckernels as _impl  # ImportError here means: build it first
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
conv = _impl.conv
exp_transform = _impl.exp_transform
log_transform = _impl.log_transform
eval_uniform = _impl.eval_uniform
eval_at = _impl.eval_at
