"""Hot-loop kernels, compiled when available.

The Cython extension ``_ckernels`` is preferred; if it has not been built
(or ``RECOILFRINGE_PURE_PYTHON=1`` is set) the pure-Python twin is used.
``IMPLEMENTATION`` names the active backend.
"""

import os

if os.environ.get("RECOILFRINGE_PURE_PYTHON") == "1":
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        from . import _pykernels as _impl

IMPLEMENTATION = _impl.IMPLEMENTATION

KIND_MANDEL = _impl.KIND_MANDEL
KIND_GAUSSIAN = _impl.KIND_GAUSSIAN
KIND_EXPONENTIAL = _impl.KIND_EXPONENTIAL
KIND_UNIFORM = _impl.KIND_UNIFORM

erf_complex = _impl.erf_complex
erf_complex_array = _impl.erf_complex_array
char_integral = _impl.char_integral
window_flux = _impl.window_flux


def backends():
    """Return every importable backend module, compiled first."""
    from . import _pykernels

    found = []
    try:
        from . import _ckernels

        found.append(_ckernels)
    except ImportError:
        pass
    found.append(_pykernels)
    return found
