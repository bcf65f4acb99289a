"""Select the compiled reduction kernels when available.

Set ``FRAMECERT_PURE_PYTHON=1`` to force the pure-Python implementation.
"""
import os

from . import _kernels_py

_impl = _kernels_py
if not os.environ.get("FRAMECERT_PURE_PYTHON"):
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = _impl.BACKEND
reduce_poly = _impl.reduce_poly
add_scaled_shifted = _impl.add_scaled_shifted
mul_terms = _impl.mul_terms
scale_terms = _impl.scale_terms
find_reducer = _impl.find_reducer


def use_backend(name: str):
    """Switch backends at runtime (``"python"`` or ``"cython"``); used by the benchmark."""
    global _impl, BACKEND, reduce_poly, add_scaled_shifted, mul_terms, scale_terms, find_reducer
    if name == "python":
        impl = _kernels_py
    elif name == "cython":
        from . import _kernels_cy as impl  # type: ignore[no-redef]
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    _impl = impl
    BACKEND = impl.BACKEND
    reduce_poly = impl.reduce_poly
    add_scaled_shifted = impl.add_scaled_shifted
    mul_terms = impl.mul_terms
    scale_terms = impl.scale_terms
    find_reducer = impl.find_reducer
