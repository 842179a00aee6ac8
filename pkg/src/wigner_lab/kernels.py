"""Backend selection for the propagation step loops.

The compiled extension is used when it imports; set
``WIGNER_LAB_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
evolve_ket = _kernels_py.evolve_ket
evolve_density = _kernels_py.evolve_density

if os.environ.get("WIGNER_LAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    if _compiled is not None:
        BACKEND = "compiled"
        evolve_ket = _compiled.evolve_ket
        evolve_density = _compiled.evolve_density


def backends():
    """Mapping of available backend name -> (evolve_ket, evolve_density)."""
    out = {"python": (_kernels_py.evolve_ket, _kernels_py.evolve_density)}
    try:
        from . import _kernels as _compiled
    except ImportError:
        return out
    out["compiled"] = (_compiled.evolve_ket, _compiled.evolve_density)
    return out
