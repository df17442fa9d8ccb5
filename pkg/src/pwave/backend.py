"""Kernel backend selection.

The hot numerical kernels (thermal averaging, decay integration) exist twice:
a Cython extension built at install time and a pure-Python twin with the same
algorithms.  The compiled module is preferred when importable; setting the
environment variable ``PWAVE_PURE_PYTHON=1`` forces the Python fallback
(useful for testing and for the backend benchmark).
"""

import os

_force_python = os.environ.get("PWAVE_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

BACKEND = kernels.BACKEND_NAME

g2_energy = kernels.g2_energy
thermal_g2 = kernels.thermal_g2
decay_integrate = kernels.decay_integrate
