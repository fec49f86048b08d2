"""DBM kernel selection.

The compiled ``_dbm`` extension is used when it was built; otherwise the
pure-Python ``_dbm_py``. Set ``DHC_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("DHC_PURE_PYTHON") == "1":
    from . import _dbm_py as kernel
else:
    try:
        from . import _dbm as kernel
    except ImportError:  # extension not built
        from . import _dbm_py as kernel

from . import _dbm_py as python_kernel

BACKEND = "cython" if kernel is not python_kernel else "python"
INF = python_kernel.INF
LE_ZERO = python_kernel.LE_ZERO
le = python_kernel.le
lt = python_kernel.lt
