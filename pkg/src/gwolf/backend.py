"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the numpy
fallback is used. Both implement the same two functions with bit-identical
output, so the choice affects speed only. Set ``GWOLF_BACKEND=python`` to
force the fallback (the benchmark and equivalence tests import both modules
directly instead).
"""

import os

if os.environ.get("GWOLF_BACKEND", "").lower() in ("python", "py"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

philox4x32 = _impl.philox4x32
stagnation_chain = _impl.stagnation_chain
