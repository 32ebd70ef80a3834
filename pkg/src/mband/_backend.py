"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise the
pure-Python kernels are used. Both expose the same functions and produce
identical results, so the choice never affects outputs, only speed.
"""

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_active = _compiled if _compiled is not None else _kernels_py


def available_backends():
    """Names of the kernel backends importable in this environment."""
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def get_backend(name):
    """Return a kernel module by name ('compiled', 'python' or 'auto')."""
    if name == "auto":
        return _compiled if _compiled is not None else _kernels_py
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def use_backend(name):
    """Switch the active backend; returns the previously active module."""
    global _active
    previous = _active
    _active = get_backend(name)
    return previous


def active():
    """The kernel module currently in use."""
    return _active


def active_name():
    return "compiled" if _active.COMPILED else "python"
