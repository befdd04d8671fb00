"""Kernel backend selection.

The compiled extension is used when it imports; setting ``PERMCHAIN_PURE=1``
forces the pure-Python twins (useful for debugging and for the benchmark).
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("PERMCHAIN_PURE"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _kernels_py

flatten = _impl.flatten
find_occurrence = _impl.find_occurrence
deletions = _impl.deletions
marked_children = _impl.marked_children
inflate_marked = _impl.inflate_marked
sum_into = _impl.sum_into
first_unclosed = _impl.first_unclosed
inflate = _impl.inflate

MARK = _kernels_py.MARK
VALUE = _kernels_py.VALUE


def backends():
    """Map backend name to kernel module for every backend that imports."""
    found = {"python": _kernels_py}
    try:
        from . import _ckernels

        found["cython"] = _ckernels
    except ImportError:  # pragma: no cover
        pass
    return found
